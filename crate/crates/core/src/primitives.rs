//! Ideal two-party functionalities as exact behavior tables.
//!
//! A [`Primitive`] maps every input pair to a distribution over output
//! pairs. Inputless functionalities use the singleton alphabet `{-}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::bit::{Bit, Symbol};
use crate::dist::{FiniteDist, Record};
use crate::error::{Error, Result};
use crate::model::Party;
use crate::prob::Prob;

/// What the verifier should protect when this primitive is the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kind {
    /// Chosen one-out-of-two bit OT; `sender` holds `(x0, x1)`.
    ObliviousTransfer { sender: Party },
    /// PR-box style nonlocal behavior.
    Nonlocal,
    /// Oblivious key; `pair_holder` gets `(X0, X1)`, the other `(C, Y)`.
    ObliviousKey { pair_holder: Party },
    Other,
}

impl Kind {
    fn mirror(self) -> Kind {
        match self {
            Kind::ObliviousTransfer { sender } => Kind::ObliviousTransfer {
                sender: sender.other(),
            },
            Kind::ObliviousKey { pair_holder } => Kind::ObliviousKey {
                pair_holder: pair_holder.other(),
            },
            k => k,
        }
    }
}

/// Coordinate names for pretty-printing and JSON records.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Labels {
    pub input_a: Vec<String>,
    pub input_b: Vec<String>,
    pub output_a: Vec<String>,
    pub output_b: Vec<String>,
}

impl Labels {
    pub fn of(ia: &[&str], ib: &[&str], oa: &[&str], ob: &[&str]) -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Labels {
            input_a: v(ia),
            input_b: v(ib),
            output_a: v(oa),
            output_b: v(ob),
        }
    }

    pub fn input(&self, p: Party) -> &[String] {
        match p {
            Party::A => &self.input_a,
            Party::B => &self.input_b,
        }
    }

    pub fn output(&self, p: Party) -> &[String] {
        match p {
            Party::A => &self.output_a,
            Party::B => &self.output_b,
        }
    }
}

pub type Row = FiniteDist<(Symbol, Symbol)>;

#[derive(Clone)]
pub struct Primitive {
    name: String,
    kind: Kind,
    inputs_a: Vec<Symbol>,
    inputs_b: Vec<Symbol>,
    outputs_a: Vec<Symbol>,
    outputs_b: Vec<Symbol>,
    labels: Labels,
    table: BTreeMap<(Symbol, Symbol), Row>,
    tape_len: u8,
    sampler: BTreeMap<(Symbol, Symbol), Vec<(Symbol, Symbol)>>,
}

impl Primitive {
    #[allow(clippy::too_many_arguments)]
    pub fn new<F>(
        name: impl Into<String>,
        kind: Kind,
        inputs_a: Vec<Symbol>,
        inputs_b: Vec<Symbol>,
        outputs_a: Vec<Symbol>,
        outputs_b: Vec<Symbol>,
        labels: Labels,
        behavior: F,
    ) -> Result<Self>
    where
        F: Fn(Symbol, Symbol) -> Result<Row>,
    {
        let name = name.into();
        let malformed = |reason: String| Error::MalformedPrimitive {
            name: name.clone(),
            reason,
        };
        for (alpha, what) in [
            (&inputs_a, "inputs A"),
            (&inputs_b, "inputs B"),
            (&outputs_a, "outputs A"),
            (&outputs_b, "outputs B"),
        ] {
            if alpha.is_empty() {
                return Err(malformed(format!("empty alphabet for {what}")));
            }
            if alpha.windows(2).any(|w| w[0] >= w[1]) {
                return Err(malformed(format!("{what} not in canonical order")));
            }
        }
        let mut table = BTreeMap::new();
        for &u in &inputs_a {
            for &v in &inputs_b {
                let row = behavior(u, v)?;
                for (oa, ob) in row.support() {
                    if outputs_a.binary_search(oa).is_err() || outputs_b.binary_search(ob).is_err() {
                        return Err(malformed(format!("row {u}|{v} emits ({oa}, {ob}) outside the output alphabets")));
                    }
                }
                table.insert((u, v), row);
            }
        }
        let (tape_len, sampler) = build_sampler(&name, &table)?;
        Ok(Primitive {
            name,
            kind,
            inputs_a,
            inputs_b,
            outputs_a,
            outputs_b,
            labels,
            table,
            tape_len,
            sampler,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn inputs(&self, p: Party) -> &[Symbol] {
        match p {
            Party::A => &self.inputs_a,
            Party::B => &self.inputs_b,
        }
    }

    pub fn outputs(&self, p: Party) -> &[Symbol] {
        match p {
            Party::A => &self.outputs_a,
            Party::B => &self.outputs_b,
        }
    }

    pub fn input_pairs(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        self.table.keys().copied()
    }

    pub fn row(&self, u: Symbol, v: Symbol) -> Option<&Row> {
        self.table.get(&(u, v))
    }

    /// Number of uniform bits that drive [`Primitive::sample`].
    pub fn tape_len(&self) -> u8 {
        self.tape_len
    }

    /// Deterministic outcome for input pair `(u, v)` under resource tape
    /// `tape`. Each tape value is equally likely, and the induced
    /// distribution equals the table row exactly.
    pub fn sample(&self, u: Symbol, v: Symbol, tape: Symbol) -> Option<(Symbol, Symbol)> {
        if tape.len() != self.tape_len as usize {
            return None;
        }
        self.sampler.get(&(u, v)).map(|outs| outs[tape.index()])
    }

    /// Resource tape value that yields `outcome` on `(u, v)`, if any.
    pub fn tape_for(&self, u: Symbol, v: Symbol, outcome: (Symbol, Symbol)) -> Option<Symbol> {
        let outs = self.sampler.get(&(u, v))?;
        outs.iter()
            .position(|o| *o == outcome)
            .map(|i| Symbol::from_index(self.tape_len, i))
    }

    /// Row as named coordinates, A's outputs first.
    pub fn record_row(&self, u: Symbol, v: Symbol) -> Option<FiniteDist<Record>> {
        self.row(u, v)
            .map(|row| row.map(|(oa, ob)| self.output_record(*oa, *ob)))
    }

    pub fn output_record(&self, oa: Symbol, ob: Symbol) -> Record {
        let mut r = Record::new();
        for (lbl, sym, p) in [(&self.labels.output_a, oa, "A"), (&self.labels.output_b, ob, "B")] {
            if lbl.len() == sym.len() {
                for (i, n) in lbl.iter().enumerate() {
                    r = r.with(n.clone(), Symbol::bit(sym.get(i)));
                }
            } else {
                r = r.with(format!("out{p}"), sym);
            }
        }
        r
    }

    /// Swap the roles of A and B everywhere.
    pub fn mirror(&self) -> Primitive {
        let name = match self.name.as_str() {
            "OT" => "TO".to_string(),
            "TO" => "OT".to_string(),
            "OK" => "KO".to_string(),
            "KO" => "OK".to_string(),
            "PR" => "PR".to_string(),
            n => match n.strip_prefix("mirror(").and_then(|s| s.strip_suffix(')')) {
                Some(inner) => inner.to_string(),
                None => format!("mirror({n})"),
            },
        };
        let table: BTreeMap<_, _> = self
            .table
            .iter()
            .map(|((u, v), row)| ((*v, *u), row.map(|(a, b)| (*b, *a))))
            .collect();
        let sampler = self
            .sampler
            .iter()
            .map(|((u, v), outs)| ((*v, *u), outs.iter().map(|(a, b)| (*b, *a)).collect()))
            .collect();
        Primitive {
            name,
            kind: self.kind.mirror(),
            inputs_a: self.inputs_b.clone(),
            inputs_b: self.inputs_a.clone(),
            outputs_a: self.outputs_b.clone(),
            outputs_b: self.outputs_a.clone(),
            labels: Labels {
                input_a: self.labels.input_b.clone(),
                input_b: self.labels.input_a.clone(),
                output_a: self.labels.output_b.clone(),
                output_b: self.labels.output_a.clone(),
            },
            table,
            tape_len: self.tape_len,
            sampler,
        }
        .resampled()
    }

    /// Apply output relabelings to each party. Used for PR variants.
    pub fn relabel_outputs(
        &self,
        name: impl Into<String>,
        fa: impl Fn(Symbol) -> Symbol,
        fb: impl Fn(Symbol) -> Symbol,
    ) -> Result<Primitive> {
        Primitive::new(
            name,
            self.kind,
            self.inputs_a.clone(),
            self.inputs_b.clone(),
            self.outputs_a.clone(),
            self.outputs_b.clone(),
            self.labels.clone(),
            |u, v| Ok(self.table[&(u, v)].map(|(a, b)| (fa(*a), fb(*b)))),
        )
    }

    /// Same behavior table and alphabets, ignoring names and labels.
    pub fn same_behavior(&self, other: &Primitive) -> bool {
        self.inputs_a == other.inputs_a
            && self.inputs_b == other.inputs_b
            && self.outputs_a == other.outputs_a
            && self.outputs_b == other.outputs_b
            && self.table == other.table
    }

    // Sampler order must follow canonical atom order for the new orientation.
    fn resampled(mut self) -> Self {
        let (len, sampler) = build_sampler(&self.name, &self.table).expect("mirror keeps dyadic masses");
        self.tape_len = len;
        self.sampler = sampler;
        self
    }
}

impl PartialEq for Primitive {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.kind == other.kind && self.same_behavior(other)
    }
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Primitive")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("table", &self.table)
            .finish()
    }
}

impl Serialize for Primitive {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Table<'a>(&'a Primitive);
        impl Serialize for Table<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let p = self.0;
                let mut m = s.serialize_map(Some(p.table.len()))?;
                for (u, v) in p.table.keys() {
                    m.serialize_entry(&format!("{u}|{v}"), &p.record_row(*u, *v).expect("row exists"))?;
                }
                m.end()
            }
        }
        let mut m = s.serialize_map(Some(7))?;
        m.serialize_entry("name", &self.name)?;
        m.serialize_entry("inputsA", &self.inputs_a)?;
        m.serialize_entry("inputsB", &self.inputs_b)?;
        m.serialize_entry("outputsA", &self.outputs_a)?;
        m.serialize_entry("outputsB", &self.outputs_b)?;
        m.serialize_entry("labels", &serde_json::json!({
            "inputA": self.labels.input_a, "inputB": self.labels.input_b,
            "outputA": self.labels.output_a, "outputB": self.labels.output_b,
        }))?;
        m.serialize_entry("table", &Table(self))?;
        m.end()
    }
}

type Sampler = BTreeMap<(Symbol, Symbol), Vec<(Symbol, Symbol)>>;

fn build_sampler(name: &str, table: &BTreeMap<(Symbol, Symbol), Row>) -> Result<(u8, Sampler)> {
    let mut bits = 0u32;
    for row in table.values() {
        for (_, p) in row.iter() {
            let d = p.denom();
            if !d.is_power_of_two() {
                return Err(Error::NonDyadic(name.to_string()));
            }
            bits = bits.max(d.trailing_zeros());
        }
    }
    if bits > crate::bit::MAX_SYMBOL_LEN as u32 {
        return Err(Error::NonDyadic(name.to_string()));
    }
    let slots = 1u64 << bits;
    let sampler = table
        .iter()
        .map(|(k, row)| {
            let outs = row
                .iter()
                .flat_map(|(o, p)| std::iter::repeat_n(*o, (p.numer() * (slots / p.denom())) as usize))
                .collect::<Vec<_>>();
            debug_assert_eq!(outs.len() as u64, slots);
            (*k, outs)
        })
        .collect();
    Ok((bits as u8, sampler))
}

fn bits1() -> Vec<Symbol> {
    Symbol::all(1).collect()
}

fn bits2() -> Vec<Symbol> {
    Symbol::all(2).collect()
}

/// Chosen one-out-of-two bit OT from A (sender) to B (receiver).
pub fn ot() -> Primitive {
    Primitive::new(
        "OT",
        Kind::ObliviousTransfer { sender: Party::A },
        bits2(),
        bits1(),
        vec![Symbol::NULL],
        bits1(),
        Labels::of(&["x0", "x1"], &["c"], &[], &["xc"]),
        |x, c| Ok(FiniteDist::point((Symbol::NULL, Symbol::bit(x.get(c.index()))))),
    )
    .expect("OT table is well formed")
}

/// OT from B to A.
pub fn to() -> Primitive {
    ot().mirror()
}

/// Oblivious key: A gets `(X0, X1)`, B gets `(C, Y)` with `Y = X_C`; `X0`,
/// `X1` and `C` independent and uniform.
pub fn ok() -> Primitive {
    Primitive::new(
        "OK",
        Kind::ObliviousKey { pair_holder: Party::A },
        vec![Symbol::NULL],
        vec![Symbol::NULL],
        bits2(),
        bits2(),
        Labels::of(&[], &[], &["X0", "X1"], &["C", "Y"]),
        |_, _| {
            FiniteDist::uniform(Symbol::all(3).map(|t| {
                let (x0, x1, c) = (t.get(0), t.get(1), t.get(2));
                let y = if c.as_bool() { x1 } else { x0 };
                (Symbol::pair(x0, x1), Symbol::pair(c, y))
            }))
        },
    )
    .expect("OK table is well formed")
}

/// Oblivious key with the roles mirrored: B holds `(X0, X1)`.
pub fn ko() -> Primitive {
    ok().mirror()
}

/// The PR box: outputs uniform subject to `a ⊕ b = u·v`.
pub fn pr() -> Primitive {
    Primitive::new(
        "PR",
        Kind::Nonlocal,
        bits1(),
        bits1(),
        bits1(),
        bits1(),
        Labels::of(&["x"], &["y"], &["a"], &["b"]),
        |u, v| {
            let uv = u.get(0) & v.get(0);
            FiniteDist::uniform(Bit::both().map(|a| (Symbol::bit(a), Symbol::bit(a ^ uv))))
        },
    )
    .expect("PR table is well formed")
}

/// Look a primitive up by its short name.
pub fn by_name(name: &str) -> Option<Primitive> {
    match name.to_ascii_uppercase().as_str() {
        "OT" => Some(ot()),
        "TO" => Some(to()),
        "OK" => Some(ok()),
        "KO" => Some(ko()),
        "PR" => Some(pr()),
        _ => None,
    }
}

fn marginal_of(row: &Row, p: Party) -> FiniteDist<Symbol> {
    match p {
        Party::A => row.map(|(a, _)| *a),
        Party::B => row.map(|(_, b)| *b),
    }
}

/// True iff each party's output marginal does not depend on the other
/// party's input.
pub fn is_non_signaling(p: &Primitive) -> bool {
    Party::both().into_iter().all(|party| {
        p.inputs(party).iter().all(|&own| {
            let rows: Vec<FiniteDist<Symbol>> = p
                .inputs(party.other())
                .iter()
                .map(|&other| {
                    let (u, v) = match party {
                        Party::A => (own, other),
                        Party::B => (other, own),
                    };
                    marginal_of(p.row(u, v).expect("total table"), party)
                })
                .collect();
            rows.windows(2).all(|w| w[0] == w[1])
        })
    })
}

/// Probability mass helper used by tests and the nonlocality module.
pub fn mass(p: &Primitive, u: Symbol, v: Symbol, oa: Symbol, ob: Symbol) -> Prob {
    p.row(u, v).map(|r| r.mass(&(oa, ob))).unwrap_or_else(Prob::zero)
}
