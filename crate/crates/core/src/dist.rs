//! Finite distributions with exact rational masses.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::bit::Symbol;
use crate::error::{Error, Result};
use crate::prob::Prob;

/// A distribution over a finite, totally ordered outcome set. Masses sum to
/// exactly one and every atom in the support has positive mass.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteDist<T: Ord> {
    atoms: BTreeMap<T, Prob>,
}

impl<T: Ord + Clone> FiniteDist<T> {
    /// Aggregate weighted outcomes. Repeated outcomes are merged; zero
    /// weights are dropped.
    pub fn from_weighted<I>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, Prob)>,
    {
        let mut acc: BTreeMap<T, Ratio<u64>> = BTreeMap::new();
        let mut total = Ratio::<u64>::zero();
        for (t, p) in items {
            total += p.ratio();
            if p.is_zero() {
                continue;
            }
            *acc.entry(t).or_insert_with(Ratio::zero) += p.ratio();
        }
        if total != Ratio::one() {
            return Err(Error::WeightSum {
                found: total.to_string(),
            });
        }
        let atoms = acc
            .into_iter()
            .map(|(t, r)| Ok((t, Prob::from_ratio(r)?)))
            .collect::<Result<_>>()?;
        Ok(FiniteDist { atoms })
    }

    /// Distribution of equally likely outcomes (with repetition allowed).
    pub fn uniform<I: IntoIterator<Item = T>>(items: I) -> Result<Self> {
        let items: Vec<T> = items.into_iter().collect();
        if items.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let w = Prob::new(1, items.len() as u64)?;
        Self::from_weighted(items.into_iter().map(|t| (t, w)))
    }

    /// Normalize nonnegative integer counts.
    pub fn from_counts<I: IntoIterator<Item = (T, u64)>>(counts: I) -> Result<Self> {
        let counts: Vec<(T, u64)> = counts.into_iter().collect();
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(Error::EmptyDistribution);
        }
        Self::from_weighted(
            counts
                .into_iter()
                .map(|(t, c)| Ok((t, Prob::new(c, total)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn point(t: T) -> Self {
        FiniteDist {
            atoms: BTreeMap::from([(t, Prob::one())]),
        }
    }

    pub fn mass(&self, t: &T) -> Prob {
        self.atoms.get(t).copied().unwrap_or_else(Prob::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&T, Prob)> {
        self.atoms.iter().map(|(t, p)| (t, *p))
    }

    pub fn support(&self) -> impl Iterator<Item = &T> {
        self.atoms.keys()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn prob<F: Fn(&T) -> bool>(&self, pred: F) -> Prob {
        self.atoms
            .iter()
            .filter(|(t, _)| pred(t))
            .map(|(_, p)| *p)
            .sum()
    }

    /// Pushforward through `f`.
    pub fn map<U: Ord + Clone, F: Fn(&T) -> U>(&self, f: F) -> FiniteDist<U> {
        let mut atoms: BTreeMap<U, Prob> = BTreeMap::new();
        for (t, p) in &self.atoms {
            let e = atoms.entry(f(t)).or_insert_with(Prob::zero);
            *e = *e + *p;
        }
        FiniteDist { atoms }
    }

    /// Conditional distribution given `pred`. Zero-mass events are an error.
    pub fn condition<F: Fn(&T) -> bool>(&self, pred: F) -> Result<Self> {
        let z = self.prob(&pred);
        if z.is_zero() {
            return Err(Error::UndefinedConditional);
        }
        let atoms = self
            .atoms
            .iter()
            .filter(|(t, _)| pred(t))
            .map(|(t, p)| Ok((t.clone(), p.div(z)?)))
            .collect::<Result<_>>()?;
        Ok(FiniteDist { atoms })
    }
}

/// Exact equality of supports and masses.
pub fn dist_equal<T: Ord + Clone>(d1: &FiniteDist<T>, d2: &FiniteDist<T>) -> bool {
    d1 == d2
}

/// Pushforward of weighted worlds onto their outcome records.
pub fn dist_from_worlds<W, T, F>(worlds: &[(W, T)], weight: F) -> Result<FiniteDist<T>>
where
    T: Ord + Clone,
    F: Fn(&W) -> Prob,
{
    FiniteDist::from_weighted(worlds.iter().map(|(w, t)| (t.clone(), weight(w))))
}

impl<T: Ord + fmt::Debug> fmt::Debug for FiniteDist<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.atoms.iter()).finish()
    }
}

impl<T: Ord + Serialize> Serialize for FiniteDist<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Atom<'a, T> {
            record: &'a T,
            mass: Prob,
        }
        impl<T: Serialize> Serialize for Atom<'_, T> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut st = s.serialize_struct("Atom", 2)?;
                st.serialize_field("record", self.record)?;
                st.serialize_field("mass", &self.mass)?;
                st.end()
            }
        }
        let atoms: Vec<Atom<'_, T>> = self
            .atoms
            .iter()
            .map(|(record, mass)| Atom { record, mass: *mass })
            .collect();
        let mut st = s.serialize_struct("FiniteDist", 1)?;
        st.serialize_field("atoms", &atoms)?;
        st.end()
    }
}

/// An outcome with named coordinates, compared field by field in order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Record(Vec<(String, Symbol)>);

impl Record {
    pub fn new() -> Self {
        Record(Vec::new())
    }

    pub fn with(mut self, name: impl Into<String>, value: Symbol) -> Self {
        self.0.push((name.into(), value));
        self
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_str())
    }

    /// Restriction to the named coordinates, in the order given.
    pub fn project(&self, names: &[&str]) -> Result<Record> {
        names
            .iter()
            .map(|n| {
                self.get(n)
                    .map(|v| (n.to_string(), v))
                    .ok_or_else(|| Error::UnknownCoordinate(n.to_string()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Record)
    }
}

impl fmt::Debug for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (n, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (n, v) in &self.0 {
            m.serialize_entry(n, v)?;
        }
        m.end()
    }
}

/// Marginal onto named coordinates. Every atom must carry all of them.
pub fn marginal(d: &FiniteDist<Record>, names: &[&str]) -> Result<FiniteDist<Record>> {
    for r in d.support() {
        r.project(names)?;
    }
    Ok(d.map(|r| r.project(names).expect("checked above")))
}
