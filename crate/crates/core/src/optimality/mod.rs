//! Bounded exhaustive search over protocol templates.
//!
//! A template fixes one resource call followed by a sequence of one-bit
//! messages. Every party decision is a lookup table over the party's
//! observation at that point; B's output table is forced by the target.
//! Counts are exact over the whole table space.

mod count;
mod engine;
mod layout;

use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bit::Symbol;
use crate::error::{Error, Result};
use crate::model::Direction;
use crate::primitives::{self, Kind, Primitive};
use crate::protocols::{self, ProtocolSpec};

pub use layout::{Domain, Layout, Table, TableKind};

use count::Counter;
use engine::{Acc, Engine};

const AB: Direction = Direction::AToB;
const BA: Direction = Direction::BToA;

#[derive(Clone, Debug)]
pub struct SearchSpace {
    pub resource: Primitive,
    pub target: Primitive,
    pub template: Vec<Direction>,
    /// Exact private tape length of each party.
    pub tape: u8,
}

impl SearchSpace {
    pub fn new(resource: Primitive, target: Primitive, template: Vec<Direction>, tape: u8) -> Self {
        SearchSpace {
            resource,
            target,
            template,
            tape,
        }
    }

    /// `"<target>-from-<resource>"` with catalog primitive names.
    pub fn named(name: &str, template: Vec<Direction>, tape: u8) -> Result<Self> {
        let (target, resource) = parse_pair(name)?;
        Ok(SearchSpace::new(resource, target, template, tape))
    }

    pub fn label(&self) -> String {
        let t: Vec<String> = self.template.iter().map(|d| d.to_string()).collect();
        format!(
            "{}-from-{} [{}] tape {}",
            self.target.name().to_lowercase(),
            self.resource.name().to_lowercase(),
            t.join(", "),
            self.tape
        )
    }
}

fn parse_pair(name: &str) -> Result<(Primitive, Primitive)> {
    let bad = || Error::UnsupportedSearch(format!("`{name}` is not of the form <target>-from-<resource>"));
    let (t, r) = name.split_once("-from-").ok_or_else(bad)?;
    let t = primitives::by_name(t).ok_or_else(bad)?;
    let r = primitives::by_name(r).ok_or_else(bad)?;
    Ok((t, r))
}

impl Serialize for SearchSpace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SearchSpace", 4)?;
        st.serialize_field("resource", self.resource.name())?;
        st.serialize_field("target", self.target.name())?;
        st.serialize_field("template", &self.template)?;
        st.serialize_field("tape_budget", &self.tape)?;
        st.end()
    }
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Refuse spaces with more than `2^max_space_bits` protocols.
    pub max_space_bits: u64,
    pub workers: Option<usize>,
    pub witness_cap: usize,
    /// Quotient by message-bit flips. Ignored when entries are fixed.
    pub symmetry: bool,
    /// Restrict the space by pinning flat table entries.
    pub fixed: Vec<(usize, u8)>,
    /// Depth of the sequential prefix before parallel subtrees.
    pub split_depth: usize,
    /// Skip the privacy search when every correct protocol lets B
    /// compute `x`, since none of them can then be private.
    pub trust_certificate: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_space_bits: 1024,
            workers: None,
            witness_cap: 8,
            symmetry: true,
            fixed: Vec::new(),
            split_depth: 10,
            trust_certificate: true,
        }
    }
}

fn big(n: &BigUint) -> serde_json::Number {
    n.to_string().parse().expect("decimal digits")
}

fn ser_big<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    big(n).serialize(s)
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessTable {
    pub name: String,
    /// One entry per observation index; `null` where no world looks.
    pub values: Vec<Option<Symbol>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub tables: Vec<WitnessTable>,
    #[serde(skip)]
    pub values: Vec<Option<u8>>,
}

impl Witness {
    fn from_vals(lay: &Layout, vals: &[i8]) -> Self {
        let values: Vec<Option<u8>> = vals.iter().map(|v| (*v >= 0).then_some(*v as u8)).collect();
        let tables = lay
            .tables
            .iter()
            .map(|t| WitnessTable {
                name: t.name.clone(),
                values: values[t.offset..t.offset + t.len()]
                    .iter()
                    .map(|v| v.map(|i| t.range[i as usize]))
                    .collect(),
            })
            .collect();
        Witness { tables, values }
    }

    /// A runnable protocol; unlooked-at entries take the first value.
    pub fn to_spec(&self, space: &SearchSpace, name: impl Into<String>) -> Result<ProtocolSpec> {
        let lay = Layout::new(&space.resource, &space.target, &space.template, space.tape)?;
        Ok(lay.to_spec(name, &self.values))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeakCertificate {
    /// Correct protocols examined.
    #[serde(serialize_with = "ser_big")]
    pub checked: BigUint,
    /// Those for which `b(y=0) xor b(y=1) = x` on every world.
    #[serde(serialize_with = "ser_big")]
    pub holds: BigUint,
}

impl LeakCertificate {
    pub fn holds_for_all(&self) -> bool {
        self.checked == self.holds
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub space: SearchSpace,
    #[serde(serialize_with = "ser_big")]
    pub correct: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub correct_and_private: BigUint,
    pub exhausted: bool,
    pub witnesses: Vec<Witness>,
    /// Search nodes visited.
    pub strategies_examined: u64,
    /// Distinct correct assignments of the entries some world reads.
    pub correct_cores: u64,
    pub private_cores: u64,
    /// log2 of the space size.
    pub space_bits: u64,
    pub leak_certificate: Option<LeakCertificate>,
    pub elapsed_ms: u64,
}

fn total(hist: &std::collections::BTreeMap<u32, u64>) -> BigUint {
    hist.iter()
        .map(|(k, n)| BigUint::from(*n) << *k as usize)
        .sum()
}

/// Exhaustive count of correct and of correct-and-private protocols.
pub fn search(space: &SearchSpace, config: &SearchConfig) -> Result<SearchResult> {
    let started = Instant::now();
    let lay = Layout::new(&space.resource, &space.target, &space.template, space.tape)?;
    let space_bits = lay.space_bits();
    if space_bits > config.max_space_bits {
        return Err(Error::BoundExceeded {
            what: "protocol search",
            required: format!("2^{space_bits}"),
            bound: format!("2^{}", config.max_space_bits),
            unit: "protocols",
        });
    }
    let certify = !space.template.is_empty()
        && space.template.iter().all(|d| *d == AB)
        && space.target.kind() == Kind::Nonlocal;
    let symmetry = config.symmetry && config.fixed.is_empty();
    let (eng, st0) = Engine::new(&lay, &config.fixed, symmetry, config.witness_cap);
    let mut counter = Counter::new(&eng, false);
    let correct = counter.count(&st0.vals);
    let mut nodes = counter.nodes;
    let leak_certificate = if certify {
        let mut c = Counter::new(&eng, true);
        let holds = c.count(&st0.vals);
        nodes += c.nodes;
        Some(LeakCertificate {
            checked: correct.clone(),
            holds,
        })
    } else {
        None
    };
    let proven = config.trust_certificate && leak_certificate.as_ref().is_some_and(LeakCertificate::holds_for_all);
    let mut acc = Acc::default();
    let start = if correct.is_zero() || proven { None } else { eng.start(st0) };
    if let Some(st) = start {
        let mut frontier = Vec::new();
        eng.split(st, config.split_depth, &mut acc, &mut frontier);
        let parts: Vec<Acc> = crate::pool::install(config.workers, || {
            frontier
                .into_par_iter()
                .map(|s| {
                    let mut a = Acc::default();
                    eng.dfs(s, &mut a);
                    a
                })
                .collect()
        });
        for p in parts {
            acc.merge(p, config.witness_cap);
        }
    }
    if let Some(msg) = acc.overflow {
        return Err(Error::UnsupportedSearch(msg));
    }
    Ok(SearchResult {
        space: space.clone(),
        correct,
        correct_and_private: total(&acc.private),
        exhausted: true,
        witnesses: {
            let mut w = acc.witnesses;
            w.sort();
            w.iter().map(|v| Witness::from_vals(&lay, v)).collect()
        },
        strategies_examined: nodes + acc.nodes,
        correct_cores: acc.leaves,
        private_cores: acc.private_leaves,
        space_bits,
        leak_certificate,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// All schedules with at most `bits` messages, shortest first.
pub fn templates(bits: usize, one_way: bool) -> Vec<Vec<Direction>> {
    let dirs: &[Direction] = if one_way { &[AB] } else { &[AB, BA] };
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..bits {
        layer = layer
            .iter()
            .flat_map(|t: &Vec<Direction>| {
                dirs.iter().map(move |d| {
                    let mut n = t.clone();
                    n.push(*d);
                    n
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchSummary {
    pub space: SummarySpace,
    #[serde(serialize_with = "ser_big")]
    pub correct: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub correct_and_private: BigUint,
    pub exhausted: bool,
    pub witnesses: Vec<Witness>,
    pub strategies_examined: u64,
    pub elapsed_ms: u64,
    pub templates: Vec<SearchResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SummarySpace {
    pub name: String,
    pub resource: String,
    pub target: String,
    pub max_bits: usize,
    pub one_way: bool,
    pub tape_budget: u8,
}

impl SearchSummary {
    pub fn leak_certificate_holds(&self) -> bool {
        self.templates
            .iter()
            .filter_map(|r| r.leak_certificate.as_ref())
            .all(LeakCertificate::holds_for_all)
    }
}

/// Search every template up to `bits` messages.
pub fn search_up_to(name: &str, bits: usize, one_way: bool, tape: u8, config: &SearchConfig) -> Result<SearchSummary> {
    let started = Instant::now();
    let (target, resource) = parse_pair(name)?;
    let mut results = Vec::new();
    for t in templates(bits, one_way) {
        results.push(search(&SearchSpace::new(resource.clone(), target.clone(), t, tape), config)?);
    }
    let mut witnesses = Vec::new();
    for r in &results {
        for w in &r.witnesses {
            if witnesses.len() < config.witness_cap {
                witnesses.push(w.clone());
            }
        }
    }
    Ok(SearchSummary {
        space: SummarySpace {
            name: name.to_string(),
            resource: resource.name().to_string(),
            target: target.name().to_string(),
            max_bits: bits,
            one_way,
            tape_budget: tape,
        },
        correct: results.iter().map(|r| &r.correct).sum(),
        correct_and_private: results.iter().map(|r| &r.correct_and_private).sum(),
        exhausted: results.iter().all(|r| r.exhausted),
        witnesses,
        strategies_examined: results.iter().map(|r| r.strategies_examined).sum(),
        elapsed_ms: started.elapsed().as_millis() as u64,
        templates: results,
    })
}

/// A lower bound and the catalog protocol that meets it.
#[derive(Clone, Copy, Debug)]
pub struct Bound {
    pub name: &'static str,
    pub catalog_protocol: &'static str,
    /// Bits below which nothing correct and private exists.
    pub bits: usize,
    pub one_way_only: bool,
    pub schedule: &'static [Direction],
}

pub const BOUNDS: [Bound; 3] = [
    Bound {
        name: "ot-from-pr",
        catalog_protocol: "ot-from-pr",
        bits: 1,
        one_way_only: false,
        schedule: &[AB],
    },
    Bound {
        name: "pr-from-ok",
        catalog_protocol: "pr-from-ok",
        bits: 2,
        one_way_only: true,
        schedule: &[AB, BA],
    },
    Bound {
        name: "ot-from-ok",
        catalog_protocol: "ot-from-ok",
        bits: 3,
        one_way_only: false,
        schedule: &[BA, AB, AB],
    },
];

pub fn bound(name: &str) -> Result<Bound> {
    BOUNDS
        .iter()
        .find(|b| b.name == name)
        .copied()
        .ok_or_else(|| Error::UnsupportedSearch(format!("no lower bound registered for `{name}`")))
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub result: SearchResult,
    pub catalog_protocol: String,
    /// The catalog protocol itself lies in the space and is counted as
    /// correct and private.
    pub catalog_member: bool,
}

/// Search the catalog schedule at the bound, without private tapes, and
/// locate the catalog protocol inside it.
pub fn witness_positive(name: &str, config: &SearchConfig) -> Result<WitnessReport> {
    let b = bound(name)?;
    let space = SearchSpace::named(name, b.schedule.to_vec(), 0)?;
    let result = search(&space, config)?;
    let spec = protocols::by_name(b.catalog_protocol)?;
    let catalog_member = contains(&space, &spec, config)?;
    Ok(WitnessReport {
        result,
        catalog_protocol: b.catalog_protocol.to_string(),
        catalog_member,
    })
}

/// Whether `spec` is a correct and private member of `space`.
pub fn contains(space: &SearchSpace, spec: &ProtocolSpec, config: &SearchConfig) -> Result<bool> {
    let lay = Layout::new(&space.resource, &space.target, &space.template, space.tape)?;
    let values = lay.tabulate(spec)?;
    let pinned = SearchConfig {
        fixed: values.into_iter().enumerate().collect(),
        symmetry: false,
        ..config.clone()
    };
    let r = search(space, &pinned)?;
    Ok(r.correct_and_private == BigUint::from(1u8))
}

/// One-way A→B protocols for PR from OK: every correct one leaks x to B.
pub fn one_way_leak_certificate(bits: usize, tape: u8, config: &SearchConfig) -> Result<SearchSummary> {
    search_up_to("pr-from-ok", bits, true, tape, config)
}

#[doc(hidden)]
pub fn layout_of(space: &SearchSpace) -> Result<Layout> {
    Layout::new(&space.resource, &space.target, &space.template, space.tape)
}
