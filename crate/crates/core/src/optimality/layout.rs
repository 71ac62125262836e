//! Flat table layout of a protocol template: every decision of either
//! party is a lookup table indexed by that party's observation so far.

use serde::Serialize;

use crate::bit::{Bit, Symbol};
use crate::error::{Error, Result};
use crate::model::{Direction, Party, View};
use crate::primitives::Primitive;
use crate::protocols::{rule, PartyProgram, ProtocolSpec, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TableKind {
    ResourceInput,
    /// A run of `bits` consecutive messages in one direction, starting at
    /// schedule slot `slot`; the value packs them first bit first.
    Message { slot: usize, bits: usize },
    Output,
}

/// Shape of an observation index: input, tape, resource output (if the
/// resource was called), then received message bits, most significant
/// first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Domain {
    pub inputs: usize,
    pub tape_len: u8,
    pub resource_outputs: usize,
    pub messages_in: usize,
}

impl Domain {
    pub fn size(&self) -> usize {
        (self.inputs * self.resource_outputs) << (self.tape_len as usize + self.messages_in)
    }

    pub fn index(&self, input: usize, tape: usize, res: usize, msgs: usize) -> usize {
        ((((input << self.tape_len) | tape) * self.resource_outputs + res) << self.messages_in) | msgs
    }

    /// Inverse of [`Domain::index`].
    pub fn decode(&self, mut i: usize) -> (usize, usize, usize, usize) {
        let msgs = i & ((1 << self.messages_in) - 1);
        i >>= self.messages_in;
        let res = i % self.resource_outputs;
        i /= self.resource_outputs;
        let tape = i & ((1 << self.tape_len) - 1);
        (i >> self.tape_len, tape, res, msgs)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table {
    pub name: String,
    pub owner: Party,
    pub kind: TableKind,
    pub domain: Domain,
    pub range: Vec<Symbol>,
    /// First flat entry id.
    pub offset: usize,
    /// False for messages whose receiver never decides anything later.
    pub relevant: bool,
    /// B's output table is filled by propagation, never branched on.
    pub forced: bool,
}

impl Table {
    pub fn len(&self) -> usize {
        self.domain.size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn bits_per_entry(&self) -> u32 {
        self.range.len().trailing_zeros()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimWorld {
    pub u: usize,
    pub v: usize,
    pub tape_a: usize,
    pub tape_b: usize,
    pub resource_tape: usize,
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub resource: Primitive,
    pub target: Primitive,
    pub template: Vec<Direction>,
    pub tape: u8,
    pub tables: Vec<Table>,
    pub entries: usize,
    pub res_a: Option<usize>,
    pub res_b: Option<usize>,
    /// Table index per run of same-direction messages.
    pub messages: Vec<usize>,
    pub out_a: Option<usize>,
    pub out_b: usize,
    pub worlds: Vec<SimWorld>,
    /// `(ia, ib, resource tape) -> (oa, ob)` as alphabet indices.
    pub resource_map: Vec<(usize, usize)>,
    /// Per input pair and A output: required world count and B's output.
    pub demand: Vec<Vec<Option<(u32, usize)>>>,
    pub worlds_per_pair: u32,
}

fn pos(alpha: &[Symbol], s: Symbol) -> usize {
    alpha.binary_search(&s).expect("symbol in alphabet")
}

impl Layout {
    pub fn new(resource: &Primitive, target: &Primitive, template: &[Direction], tape: u8) -> Result<Self> {
        let unsupported = |m: String| Error::UnsupportedSearch(m);
        for (p, what) in [(resource, "resource"), (target, "target")] {
            for party in Party::both() {
                for alpha in [p.inputs(party), p.outputs(party)] {
                    if !alpha.len().is_power_of_two() {
                        return Err(unsupported(format!("{what} {} has an alphabet of size {}", p.name(), alpha.len())));
                    }
                }
            }
        }
        let n_in = |p| target.inputs(p).len();
        let res_outs = |p| resource.outputs(p).len();
        let mut tables: Vec<Table> = Vec::new();
        let mut offset = 0;
        let mut push = |tables: &mut Vec<Table>, name: String, owner, kind, domain: Domain, range: Vec<Symbol>, relevant, forced| {
            let t = Table {
                name,
                owner,
                kind,
                domain,
                range,
                offset,
                relevant,
                forced,
            };
            offset += t.len();
            tables.push(t);
            tables.len() - 1
        };

        let mut res_idx = [None, None];
        for p in Party::both() {
            let range = resource.inputs(p).to_vec();
            if range.len() > 1 {
                let d = Domain {
                    inputs: n_in(p),
                    tape_len: tape,
                    resource_outputs: 1,
                    messages_in: 0,
                };
                res_idx[p as usize] =
                    Some(push(&mut tables, format!("{p}.resource_input"), p, TableKind::ResourceInput, d, range, true, false));
            }
        }

        let out_a_trivial = target.outputs(Party::A).len() == 1;
        let mut received = [0usize, 0usize];
        let mut messages = Vec::new();
        let mut slot = 0;
        while slot < template.len() {
            let dir = template[slot];
            let bits = template[slot..].iter().take_while(|d| **d == dir).count();
            let (s, r) = (dir.sender(), dir.receiver());
            // the receiver decides later iff it sends later or has an output
            let sends_later = template[slot + bits..].iter().any(|d| d.sender() == r);
            let relevant = sends_later || target.outputs(r).len() > 1;
            let d = Domain {
                inputs: n_in(s),
                tape_len: tape,
                resource_outputs: res_outs(s),
                messages_in: received[s as usize],
            };
            let name = if bits == 1 {
                format!("{s}.message{slot}")
            } else {
                format!("{s}.messages{slot}-{}", slot + bits - 1)
            };
            let range = Symbol::all(bits as u8).collect();
            messages.push(push(&mut tables, name, s, TableKind::Message { slot, bits }, d, range, relevant, false));
            received[r as usize] += bits;
            slot += bits;
        }

        let full = |p: Party| Domain {
            inputs: n_in(p),
            tape_len: tape,
            resource_outputs: res_outs(p),
            messages_in: received[p as usize],
        };
        let out_a = (!out_a_trivial).then(|| {
            push(&mut tables, "A.output".into(), Party::A, TableKind::Output, full(Party::A), target.outputs(Party::A).to_vec(), true, false)
        });
        let out_b = push(&mut tables, "B.output".into(), Party::B, TableKind::Output, full(Party::B), target.outputs(Party::B).to_vec(), true, true);

        // worlds and resource behavior
        let tr = resource.tape_len();
        let mut worlds = Vec::new();
        for u in 0..n_in(Party::A) {
            for v in 0..n_in(Party::B) {
                for ta in 0..1usize << tape {
                    for tb in 0..1usize << tape {
                        for rt in 0..1usize << tr {
                            worlds.push(SimWorld {
                                u,
                                v,
                                tape_a: ta,
                                tape_b: tb,
                                resource_tape: rt,
                            });
                        }
                    }
                }
            }
        }
        let (ria, rib) = (resource.inputs(Party::A), resource.inputs(Party::B));
        let mut resource_map = Vec::new();
        for &ia in ria {
            for &ib in rib {
                for rt in Symbol::all(tr) {
                    let (oa, ob) = resource.sample(ia, ib, rt).expect("resource tape in range");
                    resource_map.push((pos(resource.outputs(Party::A), oa), pos(resource.outputs(Party::B), ob)));
                }
            }
        }

        let worlds_per_pair = 1u32 << (2 * tape as u32 + tr as u32);
        let (ta_in, tb_in) = (target.inputs(Party::A), target.inputs(Party::B));
        let (ta_out, tb_out) = (target.outputs(Party::A), target.outputs(Party::B));
        let mut demand = Vec::new();
        for &u in ta_in {
            for &v in tb_in {
                let row = target.row(u, v).expect("target row");
                let mut per_a = vec![None; ta_out.len()];
                for ((oa, ob), m) in row.iter() {
                    let i = pos(ta_out, *oa);
                    if per_a[i].is_some() {
                        return Err(unsupported(format!(
                            "B's output in {} is not determined by the inputs and A's output",
                            target.name()
                        )));
                    }
                    let scaled = m.ratio() * worlds_per_pair as u64;
                    if !scaled.is_integer() {
                        return Err(unsupported("target masses finer than the world grid".into()));
                    }
                    per_a[i] = Some((scaled.to_integer() as u32, pos(tb_out, *ob)));
                }
                demand.push(per_a);
            }
        }

        Ok(Layout {
            resource: resource.clone(),
            target: target.clone(),
            template: template.to_vec(),
            tape,
            entries: offset,
            tables,
            res_a: res_idx[0],
            res_b: res_idx[1],
            messages,
            out_a,
            out_b,
            worlds,
            resource_map,
            demand,
            worlds_per_pair,
        })
    }

    /// Observation shape of party `p` once all messages are in.
    pub fn final_domain(&self, p: Party) -> Domain {
        Domain {
            inputs: self.target.inputs(p).len(),
            tape_len: self.tape,
            resource_outputs: self.resource.outputs(p).len(),
            messages_in: self.template.iter().filter(|d| d.receiver() == p).count(),
        }
    }

    pub fn pair_index(&self, u: usize, v: usize) -> usize {
        u * self.target.inputs(Party::B).len() + v
    }

    /// log2 of the number of protocols in the space.
    pub fn space_bits(&self) -> u64 {
        self.tables
            .iter()
            .map(|t| t.len() as u64 * t.bits_per_entry() as u64)
            .sum()
    }

    pub fn schedule(&self) -> Vec<Step> {
        std::iter::once(Step::Resource)
            .chain(self.template.iter().map(|d| Step::Message(*d)))
            .collect()
    }

    /// Build a runnable protocol from table values (`None` reads as the
    /// first range element).
    pub fn to_spec(&self, name: impl Into<String>, values: &[Option<u8>]) -> ProtocolSpec {
        let lookup = |t: usize| {
            let table = self.tables[t].clone();
            let vals: Vec<Symbol> = (0..table.len())
                .map(|i| table.range[values[table.offset + i].unwrap_or(0) as usize])
                .collect();
            let (inputs, res_alpha) = (
                self.target.inputs(table.owner).to_vec(),
                self.resource.outputs(table.owner).to_vec(),
            );
            move |v: &View| {
                let input = pos(&inputs, v.own_input);
                let res = match (table.domain.resource_outputs, v.resource_out) {
                    (1, _) | (_, None) => 0,
                    (_, Some(o)) => pos(&res_alpha, o),
                };
                let mut msgs = 0;
                for k in 0..table.domain.messages_in {
                    msgs = (msgs << 1) | v.messages_in[k].as_usize();
                }
                vals[table.domain.index(input, v.own_tape.index(), res, msgs)]
            }
        };
        let mut programs = Party::both().map(|p| {
            let res = self.resource.inputs(p)[0];
            let out = self.target.outputs(p)[0];
            PartyProgram::new(self.tape, rule(move |_| res), rule(move |_| out))
        });
        if let Some(t) = self.res_a {
            programs[0].resource_input = rule(lookup(t));
        }
        if let Some(t) = self.res_b {
            programs[1].resource_input = rule(lookup(t));
        }
        for &t in &self.messages {
            let f = std::sync::Arc::new(lookup(t));
            let owner = self.tables[t].owner as usize;
            let TableKind::Message { bits, .. } = self.tables[t].kind else {
                unreachable!("message tables carry their run length")
            };
            for j in 0..bits {
                let f = f.clone();
                programs[owner].messages.push(rule(move |v| f(v).get(j)));
            }
        }
        if let Some(t) = self.out_a {
            programs[0].output = rule(lookup(t));
        }
        programs[1].output = rule(lookup(self.out_b));
        let [a, b] = programs;
        ProtocolSpec::new(
            name,
            self.resource.clone(),
            self.target.clone(),
            a,
            b,
            self.schedule(),
            self.template.len(),
        )
        .expect("layout schedules are well formed")
    }

    /// Table values of an existing protocol with the same shape.
    pub fn tabulate(&self, spec: &ProtocolSpec) -> Result<Vec<u8>> {
        if spec.schedule != self.schedule()
            || spec.program_a.tape_len != self.tape
            || spec.program_b.tape_len != self.tape
            || !spec.resource.same_behavior(&self.resource)
            || !spec.target.same_behavior(&self.target)
        {
            return Err(Error::UnsupportedSearch(format!("{} does not fit this search space", spec.name)));
        }
        let mut values = vec![0u8; self.entries];
        for t in &self.tables {
            for i in 0..t.len() {
                let prog = spec.program(t.owner);
                let sym = match t.kind {
                    TableKind::ResourceInput => (prog.resource_input)(&self.synthetic_view(spec, t, i, 0)),
                    TableKind::Message { slot, bits } => {
                        let k = self.template[..slot].iter().filter(|d| d.sender() == t.owner).count();
                        let mut v = 0;
                        for j in 0..bits {
                            let view = self.synthetic_view(spec, t, i, slot + j);
                            v = (v << 1) | (prog.messages[k + j])(&view).as_usize();
                        }
                        Symbol::from_index(bits as u8, v)
                    }
                    TableKind::Output => (prog.output)(&self.synthetic_view(spec, t, i, self.template.len())),
                };
                let idx = t.range.binary_search(&sym).map_err(|_| Error::AlphabetViolation {
                    party: t.owner.as_char(),
                    symbol: sym.to_string(),
                    what: "search table",
                })?;
                values[t.offset + i] = idx as u8;
            }
        }
        Ok(values)
    }

    /// The view a party holds at schedule slot `upto` when entry `i` of
    /// table `t` describes it, with its own earlier messages recomputed
    /// from `spec`.
    fn synthetic_view(&self, spec: &ProtocolSpec, t: &Table, i: usize, upto: usize) -> View {
        let p = t.owner;
        let (input, tape, res, msgs) = t.domain.decode(i);
        let prog = spec.program(p);
        let mut view = View::new(p, self.target.inputs(p)[input], Symbol::from_index(self.tape, tape));
        if t.kind == TableKind::ResourceInput {
            return view;
        }
        view.resource_in = Some((prog.resource_input)(&view));
        view.resource_out = Some(self.resource.outputs(p)[res]);
        let mut got = 0;
        let mut sent = 0;
        for d in &self.template[..upto] {
            if d.sender() == p {
                let bit = (prog.messages[sent])(&view);
                view.messages_out.push(bit);
                sent += 1;
            } else {
                let shift = t.domain.messages_in - 1 - got;
                view.messages_in.push(Bit::from_u8(((msgs >> shift) & 1) as u8));
                got += 1;
            }
        }
        view
    }
}
