//! Exhaustive, exact verification of a protocol against its target:
//! correctness, honest-party privacy, deviating-party secrecy and
//! communication accounting.

mod joint;
mod malicious;
mod privacy;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Party, World};
use crate::protocols::ProtocolSpec;

pub use joint::{enumerate_worlds, JointDistribution, Outcome};
pub use malicious::{
    check_malicious, enumerate_deviations, secrecy_property, DecisionKind, DecisionPoint, DeviationSpace,
    DeviationStrategy, MaliciousReport, MaliciousWitness, SecrecyProperty,
};
pub use privacy::{check_privacy, Counterpart, PrivacyReport, PrivacyWitness};

/// Version tag carried by every verification report.
pub const REPORT_SCHEMA: &str = "nonlocal-ot/verification-report/v1";

/// Enumeration bounds and parallelism. Reports never depend on `workers`.
#[derive(Clone, Debug)]
pub struct Config {
    /// Maximum total tape bits per input pair.
    pub max_tape_bits: usize,
    /// Maximum number of deterministic deviations per party.
    pub max_strategies: u64,
    /// Worker threads; `None` uses rayon's default.
    pub workers: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_tape_bits: 20,
            max_strategies: 1 << 24,
            workers: None,
        }
    }
}

impl Config {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    /// Run `f` on a pool sized by `workers`.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        crate::pool::install(self.workers, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrectnessReport {
    pub pass: bool,
    /// A world whose output pair is over-represented relative to the
    /// target row (or impossible under it).
    pub counterexample: Option<World>,
    pub reason: Option<String>,
}

/// Output laws must equal the target table row for every input pair.
pub fn check_correctness(spec: &ProtocolSpec, joint: &JointDistribution) -> Result<CorrectnessReport> {
    for (u, v) in joint.input_pairs() {
        let got = joint.output_dist(u, v)?;
        let want = spec.target.row(u, v).expect("target defined on its input pairs");
        if &got == want {
            continue;
        }
        let over = joint
            .row(u, v)
            .iter()
            .find(|o| {
                let pair = (o.run.output_a, o.run.output_b);
                got.mass(&pair) > want.mass(&pair)
            })
            .expect("distinct laws with equal total mass differ upward somewhere");
        let pair = (over.run.output_a, over.run.output_b);
        return Ok(CorrectnessReport {
            pass: false,
            counterexample: Some(over.world),
            reason: Some(format!(
                "inputs ({u}, {v}): outputs ({}, {}) have mass {} but the target assigns {}",
                pair.0,
                pair.1,
                got.mass(&pair),
                want.mass(&pair)
            )),
        });
    }
    Ok(CorrectnessReport {
        pass: true,
        counterexample: None,
        reason: None,
    })
}

/// Declared communication after checking it against every transcript.
pub fn comm_cost(spec: &ProtocolSpec, joint: &JointDistribution) -> Result<usize> {
    for o in joint.outcomes() {
        if o.run.transcript.len() != spec.declared_comm_bits {
            return Err(Error::CommMismatch {
                declared: spec.declared_comm_bits,
                observed: o.run.transcript.len(),
                world: o.world.to_string(),
            });
        }
    }
    Ok(spec.declared_comm_bits)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerParty<T> {
    #[serde(rename = "A")]
    pub a: T,
    #[serde(rename = "B")]
    pub b: T,
}

impl<T> PerParty<T> {
    pub fn get(&self, p: Party) -> &T {
        match p {
            Party::A => &self.a,
            Party::B => &self.b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub schema: &'static str,
    pub protocol: String,
    pub resource: String,
    pub target: String,
    pub pass: bool,
    pub correctness: CorrectnessReport,
    pub privacy: PerParty<PrivacyReport>,
    pub malicious: PerParty<MaliciousReport>,
    pub comm_bits: usize,
    pub worlds: usize,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Names of the checks that failed.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.correctness.pass {
            out.push("correctness".to_string());
        }
        for p in Party::both() {
            if !self.privacy.get(p).holds() {
                out.push(format!("privacy.{p}"));
            }
            if !self.malicious.get(p).pass {
                out.push(format!("malicious.{p}"));
            }
        }
        out
    }
}

/// Run every check on `spec`. Only structural problems are errors.
pub fn verify(spec: &ProtocolSpec, config: &Config) -> Result<VerificationReport> {
    config.install(|| {
        let joint = enumerate_worlds(spec, config)?;
        let comm_bits = comm_cost(spec, &joint)?;
        let correctness = check_correctness(spec, &joint)?;
        let privacy = PerParty {
            a: check_privacy(spec, &joint, Party::A),
            b: check_privacy(spec, &joint, Party::B),
        };
        let malicious = PerParty {
            a: check_malicious(spec, Party::A, config)?,
            b: check_malicious(spec, Party::B, config)?,
        };
        let mut report = VerificationReport {
            schema: REPORT_SCHEMA,
            protocol: spec.name.clone(),
            resource: spec.resource.name().to_string(),
            target: spec.target.name().to_string(),
            pass: false,
            correctness,
            privacy,
            malicious,
            comm_bits,
            worlds: joint.len(),
            notes: spec.notes.clone(),
        };
        report.pass = report.failures().is_empty();
        Ok(report)
    })
}

#[cfg(test)]
mod tests;
