use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::bit::Symbol;
use crate::dist::FiniteDist;
use crate::error::{Error, Result};
use crate::model::{Party, View, World};
use crate::prob::Prob;
use crate::protocols::{run_protocol, ProtocolSpec, RunResult};

use super::Config;

/// One enumerated world together with its execution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub world: World,
    pub run: RunResult,
}

/// Exact joint law of inputs, outputs, views and transcript. Inputs are
/// free; within each input pair every world carries mass `2^-tape_bits`.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    pub protocol: String,
    pub tape_bits: usize,
    outcomes: Vec<Outcome>,
    rows: BTreeMap<(Symbol, Symbol), Range<usize>>,
}

impl JointDistribution {
    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Mass of a single world within its input pair.
    pub fn world_mass(&self) -> Prob {
        Prob::dyadic(self.tape_bits as u32)
    }

    pub fn input_pairs(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        self.rows.keys().copied()
    }

    pub fn row(&self, u: Symbol, v: Symbol) -> &[Outcome] {
        self.rows
            .get(&(u, v))
            .map(|r| &self.outcomes[r.clone()])
            .unwrap_or(&[])
    }

    pub fn output_dist(&self, u: Symbol, v: Symbol) -> Result<FiniteDist<(Symbol, Symbol)>> {
        let w = self.world_mass();
        FiniteDist::from_weighted(self.row(u, v).iter().map(|o| ((o.run.output_a, o.run.output_b), w)))
    }

    pub fn view_dist(&self, p: Party, u: Symbol, v: Symbol) -> Result<FiniteDist<View>> {
        let w = self.world_mass();
        FiniteDist::from_weighted(self.row(u, v).iter().map(|o| (o.run.view(p).clone(), w)))
    }
}

/// Run every world of `spec`. Refuses when the tape space is above the
/// configured bound.
pub fn enumerate_worlds(spec: &ProtocolSpec, config: &Config) -> Result<JointDistribution> {
    let tape_bits = spec.total_tape_bits();
    if tape_bits > config.max_tape_bits {
        return Err(Error::BoundExceeded {
            what: "world enumeration",
            required: format!("2^{tape_bits}"),
            bound: format!("2^{}", config.max_tape_bits),
            unit: "tape assignments per input pair",
        });
    }
    let worlds: Vec<World> = spec.worlds().collect();
    let runs: Vec<RunResult> = worlds
        .par_iter()
        .map(|w| run_protocol(spec, w))
        .collect::<Result<_>>()?;
    let per_pair = 1usize << tape_bits;
    let mut rows = BTreeMap::new();
    for (i, (u, v)) in spec.target.input_pairs().enumerate() {
        rows.insert((u, v), i * per_pair..(i + 1) * per_pair);
    }
    let outcomes = worlds
        .into_iter()
        .zip(runs)
        .map(|(world, run)| Outcome { world, run })
        .collect();
    Ok(JointDistribution {
        protocol: spec.name.clone(),
        tape_bits,
        outcomes,
        rows,
    })
}
