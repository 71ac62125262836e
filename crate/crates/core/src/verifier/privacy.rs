use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::Zero;
use serde::Serialize;

use crate::bit::Symbol;
use crate::model::{Party, View, World};
use crate::protocols::ProtocolSpec;

use super::joint::JointDistribution;

/// What the counterpart holds in one conditioning event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterpart {
    pub input: Symbol,
    pub output: Symbol,
}

/// Two counterpart situations that P can tell apart from its own view.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrivacyWitness {
    pub own_input: Symbol,
    pub own_output: Symbol,
    pub first: Counterpart,
    pub second: Counterpart,
    /// A view whose conditional mass differs between the two situations.
    pub view: View,
    /// A world producing `view` under one of them.
    pub world: World,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrivacyReport {
    pub pass: bool,
    /// The view law is reproduced from the target's own-output marginal
    /// and the (input, output)-indexed view family. `None` when the
    /// independence check already failed.
    pub simulatable: Option<bool>,
    pub witness: Option<PrivacyWitness>,
}

impl PrivacyReport {
    pub fn holds(&self) -> bool {
        self.pass && self.simulatable == Some(true)
    }
}

type Counts = BTreeMap<View, u64>;

/// P's view must be independent of the counterpart's input and output
/// given P's own input and output.
pub fn check_privacy(spec: &ProtocolSpec, joint: &JointDistribution, p: Party) -> PrivacyReport {
    // (u, w) -> (v, w') -> view counts, plus a sample world per view
    let mut groups: BTreeMap<(Symbol, Symbol), BTreeMap<Counterpart, Counts>> = BTreeMap::new();
    let mut sample: BTreeMap<(Counterpart, View), World> = BTreeMap::new();
    for o in joint.outcomes() {
        let u = o.world.input(p);
        let w = o.run.output(p);
        let cp = Counterpart {
            input: o.world.input(p.other()),
            output: o.run.output(p.other()),
        };
        let view = o.run.view(p).clone();
        sample.entry((cp, view.clone())).or_insert(o.world);
        *groups
            .entry((u, w))
            .or_default()
            .entry(cp)
            .or_default()
            .entry(view)
            .or_insert(0) += 1;
    }

    for ((u, w), by_cp) in &groups {
        let mut it = by_cp.iter();
        let (first_cp, first) = it.next().expect("group is non-empty");
        for (cp, counts) in it {
            if let Some(view) = differing_view(first, counts) {
                let world = sample
                    .get(&(*first_cp, view.clone()))
                    .or_else(|| sample.get(&(*cp, view.clone())))
                    .copied()
                    .expect("view was observed");
                return PrivacyReport {
                    pass: false,
                    simulatable: None,
                    witness: Some(PrivacyWitness {
                        own_input: *u,
                        own_output: *w,
                        first: *first_cp,
                        second: *cp,
                        view,
                        world,
                    }),
                };
            }
        }
    }

    PrivacyReport {
        pass: true,
        simulatable: Some(simulatable(spec, joint, p, &groups)),
        witness: None,
    }
}

fn total(c: &Counts) -> u64 {
    c.values().sum()
}

/// First view (in canonical order) whose normalized mass differs.
fn differing_view(a: &Counts, b: &Counts) -> Option<View> {
    let (na, nb) = (total(a), total(b));
    let mut keys: Vec<&View> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .find(|k| {
            let ca = a.get(*k).copied().unwrap_or(0) as u128;
            let cb = b.get(*k).copied().unwrap_or(0) as u128;
            ca * nb as u128 != cb * na as u128
        })
        .cloned()
}

/// Rebuild P's view law on every input pair from the family indexed by
/// (own input, own output) and the target's marginal for P.
fn simulatable(
    spec: &ProtocolSpec,
    joint: &JointDistribution,
    p: Party,
    groups: &BTreeMap<(Symbol, Symbol), BTreeMap<Counterpart, Counts>>,
) -> bool {
    // the family: merge any counterpart group (they agree)
    let family: BTreeMap<(Symbol, Symbol), (Counts, u64)> = groups
        .iter()
        .map(|(k, by_cp)| {
            let c = by_cp.values().next().expect("group is non-empty").clone();
            let n = total(&c);
            (*k, (c, n))
        })
        .collect();
    let world_mass = joint.world_mass().ratio();
    for (ua, vb) in joint.input_pairs() {
        let u = match p {
            Party::A => ua,
            Party::B => vb,
        };
        let row = spec.target.row(ua, vb).expect("target defined on its input pairs");
        let mut own_marginal: BTreeMap<Symbol, Ratio<u64>> = BTreeMap::new();
        for ((oa, ob), m) in row.iter() {
            let w = if p == Party::A { *oa } else { *ob };
            *own_marginal.entry(w).or_insert_with(Ratio::zero) += m.ratio();
        }
        let mut rebuilt: BTreeMap<View, Ratio<u64>> = BTreeMap::new();
        for (w, m) in own_marginal {
            let Some((counts, n)) = family.get(&(u, w)) else {
                return false;
            };
            for (view, c) in counts {
                *rebuilt.entry(view.clone()).or_insert_with(Ratio::zero) += m * Ratio::new(*c, *n);
            }
        }
        let mut direct: BTreeMap<View, Ratio<u64>> = BTreeMap::new();
        for o in joint.row(ua, vb) {
            *direct.entry(o.run.view(p).clone()).or_insert_with(Ratio::zero) += world_mass;
        }
        rebuilt.retain(|_, m| !m.is_zero());
        if rebuilt != direct {
            return false;
        }
    }
    true
}
