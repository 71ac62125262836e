//! Deviations by one party. Only deterministic strategies are enumerated:
//! a randomized deviation is a mixture of them, and each secrecy property
//! is an equality of conditional laws that survives mixing.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::bit::{Bit, Symbol};
use crate::error::{Error, Result};
use crate::model::{Observation, Party, View, World};
use crate::primitives::Kind;
use crate::protocols::{rule, run_protocol, ProtocolSpec, Step};

use super::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionKind {
    ResourceInput,
    Message,
}

/// One point where the deviator chooses something. Its domain is every
/// observation the deviator could hold at that moment.
#[derive(Clone, Debug, Serialize)]
pub struct DecisionPoint {
    pub step: usize,
    pub kind: DecisionKind,
    /// Index of this party's message rule, for `Message` points.
    #[serde(skip)]
    rule_index: usize,
    #[serde(skip)]
    domain: Arc<Domain>,
    pub domain_size: usize,
    pub range: Vec<Symbol>,
}

#[derive(Debug)]
struct Domain {
    inputs: Vec<Symbol>,
    tape_len: u8,
    /// Resource outputs, when the resource was already called.
    resource_out: Option<Vec<Symbol>>,
    messages_in: usize,
}

impl Domain {
    fn size(&self) -> usize {
        let outs = self.resource_out.as_ref().map_or(1, |r| r.len());
        (self.inputs.len() * outs) << (self.tape_len as usize + self.messages_in)
    }

    fn index(&self, v: &View) -> usize {
        let mut i = self.inputs.binary_search(&v.own_input).expect("input in alphabet");
        i = (i << self.tape_len) | v.own_tape.index();
        if let Some(outs) = &self.resource_out {
            let o = v.resource_out.expect("resource already called");
            i = i * outs.len() + outs.binary_search(&o).expect("output in alphabet");
        }
        for k in 0..self.messages_in {
            i = (i << 1) | v.messages_in[k].as_usize();
        }
        i
    }
}

/// All deterministic deviations of one party. Decision points after the
/// party's last incoming event are left honest: they cannot change
/// anything the party observes.
#[derive(Clone, Debug, Serialize)]
pub struct DeviationSpace {
    pub party: Party,
    pub decisions: Vec<DecisionPoint>,
    pub size: u64,
}

/// One strategy: a lookup table per decision point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeviationStrategy {
    pub party: Party,
    pub id: u64,
    pub tables: Vec<Vec<Symbol>>,
}

pub fn enumerate_deviations(spec: &ProtocolSpec, party: Party, config: &Config) -> Result<DeviationSpace> {
    let last_incoming = spec
        .schedule
        .iter()
        .rposition(|s| match s {
            Step::Resource => true,
            Step::Message(d) => d.receiver() == party,
        });
    let mut decisions = Vec::new();
    let mut called = false;
    let mut received = 0;
    let mut sent = 0;
    for (i, step) in spec.schedule.iter().enumerate() {
        let relevant = last_incoming.is_some_and(|j| j >= i);
        let domain = || {
            Arc::new(Domain {
                inputs: spec.target.inputs(party).to_vec(),
                tape_len: spec.program(party).tape_len,
                resource_out: called.then(|| spec.resource.outputs(party).to_vec()),
                messages_in: received,
            })
        };
        match *step {
            Step::Resource => {
                let range = spec.resource.inputs(party).to_vec();
                if relevant && range.len() > 1 {
                    let domain = domain();
                    decisions.push(DecisionPoint {
                        step: i,
                        kind: DecisionKind::ResourceInput,
                        rule_index: 0,
                        domain_size: domain.size(),
                        domain,
                        range,
                    });
                }
                called = true;
            }
            Step::Message(d) if d.sender() == party => {
                if relevant {
                    let domain = domain();
                    decisions.push(DecisionPoint {
                        step: i,
                        kind: DecisionKind::Message,
                        rule_index: sent,
                        domain_size: domain.size(),
                        domain,
                        range: vec![Symbol::bit(Bit::ZERO), Symbol::bit(Bit::ONE)],
                    });
                }
                sent += 1;
            }
            Step::Message(_) => received += 1,
        }
    }
    let mut size = BigUint::one();
    for d in &decisions {
        size *= BigUint::from(d.range.len()).pow(d.domain_size as u32);
    }
    match size.to_u64().filter(|s| *s <= config.max_strategies) {
        Some(size) => Ok(DeviationSpace {
            party,
            decisions,
            size,
        }),
        None => Err(Error::BoundExceeded {
            what: "deviation enumeration",
            required: size.to_string(),
            bound: config.max_strategies.to_string(),
            unit: "strategies",
        }),
    }
}

impl DeviationSpace {
    /// Strategy number `id` in mixed radix, first decision point lowest.
    pub fn strategy(&self, id: u64) -> DeviationStrategy {
        assert!(id < self.size, "strategy {id} out of range");
        let mut rest = id;
        let tables = self
            .decisions
            .iter()
            .map(|d| {
                let r = d.range.len() as u64;
                (0..d.domain_size)
                    .map(|_| {
                        let digit = rest % r;
                        rest /= r;
                        d.range[digit as usize]
                    })
                    .collect()
            })
            .collect();
        DeviationStrategy {
            party: self.party,
            id,
            tables,
        }
    }

    /// The protocol with the deviator's decisions replaced.
    pub fn apply(&self, spec: &ProtocolSpec, strategy: &DeviationStrategy) -> ProtocolSpec {
        let mut out = spec.clone();
        let prog = out.program_mut(self.party);
        for (d, table) in self.decisions.iter().zip(&strategy.tables) {
            let domain = Arc::clone(&d.domain);
            let table = Arc::new(table.clone());
            match d.kind {
                DecisionKind::ResourceInput => {
                    prog.resource_input = rule(move |v| table[domain.index(v)]);
                }
                DecisionKind::Message => {
                    prog.messages[d.rule_index] = rule(move |v| table[domain.index(v)].get(0));
                }
            }
        }
        out
    }
}

/// The secrecy property guarding the honest party against a deviator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SecrecyProperty {
    /// Deviator's observation is independent of the honest input.
    InputHidden,
    /// Some honest message bit stays uniform given the other one.
    OneMessageHidden,
    /// The honest choice bit C stays uniform.
    ChoiceHidden,
    /// Some honest key bit stays uniform given the other one.
    OneKeyHidden,
    None,
}

pub fn secrecy_property(spec: &ProtocolSpec, deviator: Party) -> SecrecyProperty {
    match spec.target.kind() {
        Kind::ObliviousTransfer { sender } if sender == deviator => SecrecyProperty::InputHidden,
        Kind::ObliviousTransfer { .. } => SecrecyProperty::OneMessageHidden,
        Kind::Nonlocal => SecrecyProperty::InputHidden,
        Kind::ObliviousKey { pair_holder } if pair_holder == deviator => SecrecyProperty::ChoiceHidden,
        Kind::ObliviousKey { .. } => SecrecyProperty::OneKeyHidden,
        Kind::Other => SecrecyProperty::None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaliciousWitness {
    pub strategy: DeviationStrategy,
    pub observation: Observation,
    /// A world that yields `observation` under `strategy`.
    pub world: World,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaliciousReport {
    pub pass: bool,
    pub property: SecrecyProperty,
    pub strategies: u64,
    pub witness: Option<MaliciousWitness>,
}

pub fn check_malicious(spec: &ProtocolSpec, deviator: Party, config: &Config) -> Result<MaliciousReport> {
    let space = enumerate_deviations(spec, deviator, config)?;
    let property = secrecy_property(spec, deviator);
    let results: Vec<Option<MaliciousWitness>> = (0..space.size)
        .into_par_iter()
        .map(|id| {
            let strategy = space.strategy(id);
            let deviated = space.apply(spec, &strategy);
            check_strategy(&deviated, deviator, property).map(|w| {
                w.map(|(observation, world)| MaliciousWitness {
                    strategy,
                    observation,
                    world,
                })
            })
        })
        .collect::<Result<_>>()?;
    let witness = results.into_iter().flatten().next();
    Ok(MaliciousReport {
        pass: witness.is_none(),
        property,
        strategies: space.size,
        witness,
    })
}

/// Evaluate one deviated protocol. Returns an observation that breaks
/// the property, with a world producing it.
fn check_strategy(spec: &ProtocolSpec, deviator: Party, property: SecrecyProperty) -> Result<Option<(Observation, World)>> {
    let honest = deviator.other();
    // observation -> counts indexed by the 2-bit honest secret
    let mut tallies: BTreeMap<(Symbol, Observation), BTreeMap<Symbol, u64>> = BTreeMap::new();
    let mut sample: BTreeMap<Observation, World> = BTreeMap::new();
    for w in spec.worlds() {
        let r = run_protocol(spec, &w)?;
        let obs = r.view(deviator).observation();
        sample.entry(obs.clone()).or_insert(w);
        let (group, secret) = match property {
            SecrecyProperty::InputHidden => (w.input(deviator), w.input(honest)),
            SecrecyProperty::OneMessageHidden => (Symbol::NULL, w.input(honest)),
            SecrecyProperty::ChoiceHidden | SecrecyProperty::OneKeyHidden => (Symbol::NULL, r.output(honest)),
            SecrecyProperty::None => return Ok(None),
        };
        *tallies
            .entry((group, obs))
            .or_default()
            .entry(secret)
            .or_insert(0) += 1;
    }

    let broken = |obs: &Observation| Ok(Some((obs.clone(), sample[obs])));
    match property {
        SecrecyProperty::InputHidden => {
            // per deviator input: the law of obs must not depend on the
            // honest input; all honest inputs carry equal world counts
            let secrets: Vec<Symbol> = spec.target.inputs(honest).to_vec();
            for ((_, obs), by_secret) in &tallies {
                let c0 = by_secret.get(&secrets[0]).copied().unwrap_or(0);
                if secrets.iter().any(|s| by_secret.get(s).copied().unwrap_or(0) != c0) {
                    return broken(obs);
                }
            }
        }
        SecrecyProperty::ChoiceHidden => {
            for ((_, obs), by_secret) in &tallies {
                let c = |bit: u8| -> u64 {
                    by_secret
                        .iter()
                        .filter(|(s, _)| s.get(0).as_u8() == bit)
                        .map(|(_, n)| n)
                        .sum()
                };
                if c(0) != c(1) {
                    return broken(obs);
                }
            }
        }
        SecrecyProperty::OneMessageHidden | SecrecyProperty::OneKeyHidden => {
            for ((_, obs), by_secret) in &tallies {
                let n = |s: usize| by_secret.get(&Symbol::from_index(2, s)).copied().unwrap_or(0);
                let counts = [n(0), n(1), n(2), n(3)];
                if !(0..2).any(|j| coordinate_hidden(counts, j)) {
                    return broken(obs);
                }
            }
        }
        SecrecyProperty::None => {}
    }
    Ok(None)
}

/// Counts over `(s0, s1)` in index order 00, 01, 10, 11. True when bit `j`
/// is uniform conditioned on each value of the other bit.
fn coordinate_hidden(counts: [u64; 4], j: usize) -> bool {
    let idx = |sj: usize, other: usize| if j == 0 { sj * 2 + other } else { other * 2 + sj };
    (0..2).all(|a| counts[idx(0, a)] == counts[idx(1, a)])
}
