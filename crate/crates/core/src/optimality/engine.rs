//! Depth-first enumeration of table assignments with forward checking.
//!
//! Every world is simulated as far as the current partial assignment
//! allows. A world either finishes, which forces B's output entry and
//! bumps A's output tally, or blocks on the first unassigned entry it
//! needs. The search branches on the entry that blocks the most worlds.
//! Finished worlds also feed per-party observation histograms, and a
//! branch dies as soon as no completion can make them independent.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::model::Party;

use super::layout::{Domain, Layout};

pub(crate) const DONE: u32 = u32::MAX;
pub(crate) const UNSET: i8 = -1;

/// Reached irrelevant entries beyond this are not enumerated.
pub const MAX_COMPLETION_BITS: usize = 20;

#[derive(Clone)]
pub(crate) struct State {
    pub vals: Vec<i8>,
    tally: Vec<u32>,
    pub status: Vec<u32>,
    hist: [Histograms; 2],
    /// Worlds whose A observation is already in the histograms.
    seen_a: Vec<bool>,
}

/// Observation counts of finished worlds for one party.
#[derive(Clone, Default)]
struct Histograms {
    /// `(group, slice, obs)`.
    counts: Vec<u16>,
    /// Largest scaled count per `(group, obs)` over slices.
    top: Vec<u32>,
    /// Sum of `top` per group.
    sum: Vec<u32>,
}

/// Static shape of the privacy condition for one party. A group is the
/// party's own (input, output); a slice is the other party's (input,
/// output). Slice sizes are fixed by the target.
struct Groups {
    slices: usize,
    obs: usize,
    /// Scaled unit per `(group, slice)`; zero for empty slices.
    scale: Vec<u32>,
    /// Common scaled total of every slice in a group.
    total: Vec<u32>,
}

impl Groups {
    fn new(lay: &Layout, p: Party, obs: usize) -> Self {
        let q = p.other();
        let (own_in, own_out) = (lay.target.inputs(p).len(), lay.target.outputs(p).len());
        let (oth_in, oth_out) = (lay.target.inputs(q).len(), lay.target.outputs(q).len());
        let slices = oth_in * oth_out;
        let size = |g: usize, s: usize| {
            let (i, o) = (g / own_out, g % own_out);
            let (j, k) = (s / oth_out, s % oth_out);
            let (u, v, a, b) = match p {
                Party::A => (i, j, o, k),
                Party::B => (j, i, k, o),
            };
            match lay.demand[lay.pair_index(u, v)][a] {
                Some((n, bw)) if bw == b => n,
                _ => 0,
            }
        };
        let groups = own_in * own_out;
        let mut scale = vec![0; groups * slices];
        let mut total = vec![0; groups];
        for g in 0..groups {
            let l = (0..slices).map(|s| size(g, s)).filter(|n| *n > 0).fold(1u32, |l, n| l.lcm(&n));
            total[g] = l;
            for s in 0..slices {
                let n = size(g, s);
                if let Some(k) = l.checked_div(n) {
                    scale[g * slices + s] = k;
                }
            }
        }
        Groups {
            slices,
            obs,
            scale,
            total,
        }
    }

    fn empty(&self) -> Histograms {
        let groups = self.total.len();
        Histograms {
            counts: vec![0; groups * self.slices * self.obs],
            top: vec![0; groups * self.obs],
            sum: vec![0; groups],
        }
    }

    /// Record one finished world. False once the observation frequencies
    /// of this group can no longer agree across slices: every slice must
    /// end with at least the largest frequency seen for each observation,
    /// and those lower bounds must fit in one distribution.
    fn add(&self, h: &mut Histograms, g: usize, s: usize, o: usize) -> bool {
        let c = &mut h.counts[(g * self.slices + s) * self.obs + o];
        *c += 1;
        let scaled = *c as u32 * self.scale[g * self.slices + s];
        let top = &mut h.top[g * self.obs + o];
        if scaled > *top {
            h.sum[g] += scaled - *top;
            *top = scaled;
        }
        h.sum[g] <= self.total[g]
    }
}

pub(crate) trait Lookup {
    fn at(&self, e: usize) -> i8;
}

impl Lookup for [i8] {
    fn at(&self, e: usize) -> i8 {
        self[e]
    }
}

/// A partial assignment with one entry overridden.
struct With<'v> {
    base: &'v [i8],
    e: usize,
    v: i8,
}

impl Lookup for With<'_> {
    fn at(&self, e: usize) -> i8 {
        if e == self.e {
            self.v
        } else {
            self.base[e]
        }
    }
}

pub(crate) struct Done {
    pub pair: usize,
    pub a_out: usize,
    pub b_key: usize,
    pub obs_a: usize,
    pub obs_b: usize,
}

/// One finished world as the privacy check sees it.
#[derive(Clone, Copy)]
struct Record {
    u: usize,
    v: usize,
    a_out: usize,
    b_out: usize,
    obs_a: usize,
    obs_b: usize,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Acc {
    pub nodes: u64,
    pub leaves: u64,
    pub private_leaves: u64,
    /// Counts keyed by a power of two: `sum n * 2^k`.
    pub private: BTreeMap<u32, u64>,
    pub witnesses: Vec<Vec<i8>>,
    pub overflow: Option<String>,
}

impl Acc {
    pub fn merge(&mut self, other: Acc, cap: usize) {
        self.nodes += other.nodes;
        self.leaves += other.leaves;
        self.private_leaves += other.private_leaves;
        for (k, n) in other.private {
            *self.private.entry(k).or_insert(0) += n;
        }
        for w in other.witnesses {
            if self.witnesses.len() < cap {
                self.witnesses.push(w);
            }
        }
        if self.overflow.is_none() {
            self.overflow = other.overflow;
        }
    }
}

pub(crate) struct Engine<'a> {
    pub lay: &'a Layout,
    /// Entries no branch may change.
    fixed: Vec<bool>,
    /// Power of two contributed by the message-flip quotient.
    pub symmetry_bits: u32,
    irrelevant_tables: Vec<usize>,
    /// Observation shape of each party at the end of the run.
    pub full: [Domain; 2],
    groups: [Groups; 2],
    /// Owning table of every entry.
    table_of: Vec<u16>,
    /// Message runs up to and including the last one A receives.
    runs_to_a: usize,
    witness_cap: usize,
}

/// Branching order key; smaller is better.
type Score = (usize, usize, usize, u32);

impl<'a> Engine<'a> {
    pub fn new(lay: &'a Layout, fixed: &[(usize, u8)], symmetry: bool, witness_cap: usize) -> (Self, State) {
        let mut vals = vec![UNSET; lay.entries];
        let mut is_fixed = vec![false; lay.entries];
        for &(e, v) in fixed {
            vals[e] = v as i8;
            is_fixed[e] = true;
        }
        let mut symmetry_bits = 0;
        if symmetry {
            // xoring a message run with a constant at sender and receiver is
            // a bijection on protocols that preserves correctness and privacy
            for &t in &lay.messages {
                let table = &lay.tables[t];
                if table.relevant && !is_fixed[table.offset] {
                    vals[table.offset] = 0;
                    is_fixed[table.offset] = true;
                    symmetry_bits += table.bits_per_entry();
                }
            }
        }
        let irrelevant_tables = lay.messages.iter().copied().filter(|&t| !lay.tables[t].relevant).collect();
        let full = Party::both().map(|p| lay.final_domain(p));
        let groups = Party::both().map(|p| Groups::new(lay, p, full[p as usize].size()));
        let n_a_out = lay.target.outputs(Party::A).len();
        let state = State {
            vals,
            tally: vec![0; lay.demand.len() * n_a_out],
            status: vec![DONE - 1; lay.worlds.len()],
            hist: [groups[0].empty(), groups[1].empty()],
            seen_a: vec![false; lay.worlds.len()],
        };
        let engine = Engine {
            lay,
            fixed: is_fixed,
            symmetry_bits,
            irrelevant_tables,
            full,
            groups,
            table_of: lay
                .tables
                .iter()
                .enumerate()
                .flat_map(|(i, t)| std::iter::repeat_n(i as u16, t.len()))
                .collect(),
            runs_to_a: lay
                .messages
                .iter()
                .rposition(|t| lay.tables[*t].owner == Party::B)
                .map_or(0, |i| i + 1),
            witness_cap,
        };
        (engine, state)
    }

    /// Simulate every world once. `None` if the fixed entries already
    /// contradict the target.
    pub fn start(&self, mut st: State) -> Option<State> {
        for w in 0..self.lay.worlds.len() {
            if !self.advance(&mut st, w) {
                return None;
            }
        }
        Some(st)
    }

    fn get(&self, vals: &(impl Lookup + ?Sized), table: usize, idx: usize) -> Result<usize, u32> {
        let e = self.lay.tables[table].offset + idx;
        match vals.at(e) {
            UNSET => Err(e as u32),
            v => Ok(v as usize),
        }
    }

    /// Run world `w` with irrelevant messages read from `irr` (zero when
    /// absent). Errors with the first unassigned entry it needs.
    pub fn simulate(&self, vals: &(impl Lookup + ?Sized), w: usize, irr: Option<&[i8]>) -> Result<Done, u32> {
        let lay = self.lay;
        let sw = lay.worlds[w];
        let ia = match lay.res_a {
            Some(t) => self.get(vals, t, lay.tables[t].domain.index(sw.u, sw.tape_a, 0, 0))?,
            None => 0,
        };
        let ib = match lay.res_b {
            Some(t) => self.get(vals, t, lay.tables[t].domain.index(sw.v, sw.tape_b, 0, 0))?,
            None => 0,
        };
        let (ra, rb) = self.resource_out(sw.resource_tape, ia, ib);
        let own = |p: Party| match p {
            Party::A => (sw.u, sw.tape_a, ra),
            Party::B => (sw.v, sw.tape_b, rb),
        };
        let mut msgs = [0usize, 0usize];
        for &t in &lay.messages {
            let table = &lay.tables[t];
            let s = table.owner;
            let (input, tape, res) = own(s);
            let idx = table.domain.index(input, tape, res, msgs[s as usize]);
            let value = if table.relevant {
                self.get(vals, t, idx)?
            } else {
                irr.map_or(0, |v| v[table.offset + idx].max(0) as usize)
            };
            let r = s.other() as usize;
            msgs[r] = (msgs[r] << table.bits_per_entry()) | value;
        }
        let obs = |p: Party| {
            let (input, tape, res) = own(p);
            self.full[p as usize].index(input, tape, res, msgs[p as usize])
        };
        let (obs_a, obs_b) = (obs(Party::A), obs(Party::B));
        let a_out = match lay.out_a {
            Some(t) => self.get(vals, t, obs_a)?,
            None => 0,
        };
        Ok(Done {
            pair: lay.pair_index(sw.u, sw.v),
            a_out,
            b_key: lay.tables[lay.out_b].offset + obs_b,
            obs_a,
            obs_b,
        })
    }

    pub fn resource_out(&self, resource_tape: usize, ia: usize, ib: usize) -> (usize, usize) {
        let lay = self.lay;
        let n_ib = lay.resource.inputs(Party::B).len();
        let per_tape = 1usize << lay.resource.tape_len();
        lay.resource_map[(ia * n_ib + ib) * per_tape + resource_tape]
    }

    /// A's final observation in world `w`, once every message to A is
    /// known, provided A has no output to wait for.
    fn early_obs_a(&self, vals: &[i8], w: usize) -> Option<usize> {
        let lay = self.lay;
        if lay.out_a.is_some() {
            return None;
        }
        let sw = lay.worlds[w];
        let get = |t: Option<usize>, input: usize, tape: usize| match t {
            Some(t) => self.get(vals, t, lay.tables[t].domain.index(input, tape, 0, 0)).ok(),
            None => Some(0),
        };
        let (ia, ib) = (get(lay.res_a, sw.u, sw.tape_a)?, get(lay.res_b, sw.v, sw.tape_b)?);
        let (ra, rb) = self.resource_out(sw.resource_tape, ia, ib);
        let mut msgs = [0usize, 0usize];
        for &t in &lay.messages[..self.runs_to_a] {
            let table = &lay.tables[t];
            let s = table.owner;
            let (input, tape, res) = match s {
                Party::A => (sw.u, sw.tape_a, ra),
                Party::B => (sw.v, sw.tape_b, rb),
            };
            let idx = table.domain.index(input, tape, res, msgs[s as usize]);
            let value = if table.relevant { self.get(vals, t, idx).ok()? } else { 0 };
            let r = s.other() as usize;
            msgs[r] = (msgs[r] << table.bits_per_entry()) | value;
        }
        Some(self.full[0].index(sw.u, sw.tape_a, ra, msgs[0]))
    }

    /// Move world `w` forward. False on a contradiction.
    fn advance(&self, st: &mut State, w: usize) -> bool {
        match self.simulate(&st.vals[..], w, None) {
            Err(e) => {
                st.status[w] = e;
                if !st.seen_a[w] {
                    if let Some(o) = self.early_obs_a(&st.vals, w) {
                        st.seen_a[w] = true;
                        let sw = self.lay.worlds[w];
                        let Some((_, b_want)) = self.lay.demand[self.lay.pair_index(sw.u, sw.v)][0] else {
                            return false;
                        };
                        let n_b = self.lay.target.outputs(Party::B).len();
                        return self.groups[0].add(&mut st.hist[0], sw.u, sw.v * n_b + b_want, o);
                    }
                }
                true
            }
            Ok(Done {
                pair,
                a_out,
                b_key,
                obs_a,
                obs_b,
            }) => {
                st.status[w] = DONE;
                let Some((limit, b_want)) = self.lay.demand[pair][a_out] else {
                    return false;
                };
                let n_a = self.lay.target.outputs(Party::A).len();
                let slot = &mut st.tally[pair * n_a + a_out];
                *slot += 1;
                if *slot > limit {
                    return false;
                }
                match st.vals[b_key] {
                    UNSET => st.vals[b_key] = b_want as i8,
                    v if v as usize != b_want => return false,
                    _ => {}
                }
                let sw = self.lay.worlds[w];
                let n_b = self.lay.target.outputs(Party::B).len();
                let (ga, gb) = (sw.u * n_a + a_out, sw.v * n_b + b_want);
                let fresh = !std::mem::replace(&mut st.seen_a[w], true);
                (!fresh || self.groups[0].add(&mut st.hist[0], ga, gb, obs_a)) && self.groups[1].add(&mut st.hist[1], gb, ga, obs_b)
            }
        }
    }

    /// Children after branching, or `None` at a leaf.
    fn children(&self, st: &State) -> Option<Vec<State>> {
        let open: Vec<u32> = (0..st.status.len() as u32).filter(|w| st.status[*w as usize] != DONE).collect();
        if open.is_empty() {
            return None;
        }
        let Some((e, values)) = self.choose(&st.vals, &st.status, &open) else {
            return Some(Vec::new());
        };
        let mut out = Vec::with_capacity(values.len());
        'vals: for val in values {
            let mut child = st.clone();
            child.vals[e as usize] = val as i8;
            for &w in &open {
                if child.status[w as usize] == e && !self.advance(&mut child, w as usize) {
                    continue 'vals;
                }
            }
            out.push(child);
        }
        Some(out)
    }

    /// The blocking entry with the fewest values that do not immediately
    /// contradict the target, with those values. Ties prefer the entry
    /// blocking most worlds, then later tables, then the lowest id. `None`
    /// if some blocking entry has no such value.
    pub fn choose(&self, vals: &[i8], status: &[u32], open: &[u32]) -> Option<(u32, Vec<usize>)> {
        let mut blocked: Vec<(u32, u32)> = open.iter().map(|&w| (status[w as usize], w)).collect();
        blocked.sort_unstable();
        let mut best: Option<(Score, Vec<usize>)> = None;
        let mut ws = Vec::new();
        let mut i = 0;
        while i < blocked.len() {
            let e = blocked[i].0;
            ws.clear();
            while i < blocked.len() && blocked[i].0 == e {
                ws.push(blocked[i].1 as usize);
                i += 1;
            }
            let values = self.feasible(vals, e as usize, &ws);
            if values.is_empty() {
                return None;
            }
            let later = (u16::MAX - self.table_of[e as usize]) as usize;
            let score = (values.len(), usize::MAX - ws.len(), later, e);
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                best = Some((score, values));
            }
        }
        best.map(|((.., e), v)| (e, v))
    }

    /// Values of `e` under which no world in `ws` finishes with an output
    /// pair the target forbids or two outputs for one B observation.
    fn feasible(&self, vals: &[i8], e: usize, ws: &[usize]) -> Vec<usize> {
        let mut forced: Vec<(usize, usize)> = Vec::new();
        (0..self.range_of(e))
            .filter(|&v| {
                forced.clear();
                let with = With { base: vals, e, v: v as i8 };
                ws.iter().all(|&w| match self.simulate(&with, w, None) {
                    Err(_) => true,
                    Ok(d) => {
                        let Some((_, want)) = self.lay.demand[d.pair][d.a_out] else {
                            return false;
                        };
                        match vals[d.b_key] {
                            UNSET => match forced.iter().find(|(k, _)| *k == d.b_key) {
                                Some((_, x)) => *x == want,
                                None => {
                                    forced.push((d.b_key, want));
                                    true
                                }
                            },
                            x => x as usize == want,
                        }
                    }
                })
            })
            .collect()
    }

    pub fn range_of(&self, e: usize) -> usize {
        self.lay.tables[self.table_of[e] as usize].range.len()
    }

    pub fn bits_of(&self, e: usize) -> u32 {
        self.lay.tables[self.table_of[e] as usize].bits_per_entry()
    }

    pub fn dfs(&self, st: State, acc: &mut Acc) {
        acc.nodes += 1;
        match self.children(&st) {
            None => self.leaf(&st, acc),
            Some(ch) => {
                for c in ch {
                    self.dfs(c, acc);
                }
            }
        }
    }

    /// Like [`Engine::dfs`] but stops at `depth` and hands back the
    /// frontier for parallel processing.
    pub fn split(&self, st: State, depth: usize, acc: &mut Acc, frontier: &mut Vec<State>) {
        if depth == 0 {
            frontier.push(st);
            return;
        }
        acc.nodes += 1;
        match self.children(&st) {
            None => self.leaf(&st, acc),
            Some(ch) => {
                for c in ch {
                    self.split(c, depth - 1, acc, frontier);
                }
            }
        }
    }

    /// Free bits in relevant tables: unassigned entries can take any value.
    fn free_bits(&self, vals: &[i8]) -> u32 {
        self.lay
            .tables
            .iter()
            .filter(|t| t.relevant)
            .map(|t| {
                let unset = vals[t.offset..t.offset + t.len()].iter().filter(|v| **v == UNSET).count();
                unset as u32 * t.bits_per_entry()
            })
            .sum()
    }

    fn leaf(&self, st: &State, acc: &mut Acc) {
        acc.leaves += 1;
        let core_bits = self.free_bits(&st.vals) + self.symmetry_bits;
        let irr_entries: Vec<usize> = self
            .irrelevant_tables
            .iter()
            .flat_map(|&t| {
                let tb = &self.lay.tables[t];
                tb.offset..tb.offset + tb.len()
            })
            .filter(|e| !self.fixed[*e])
            .collect();
        let irr_bits: u32 = irr_entries.iter().map(|e| self.bits_of(*e)).sum();
        // the core drops irrelevant messages; completions only refine views
        let core = self.records(&st.vals, None, false);
        if !private(&core) {
            return;
        }
        let mut witness = st.vals.clone();
        if irr_entries.is_empty() {
            *acc.private.entry(core_bits).or_insert(0) += 1;
        } else {
            let reached = self.reached_irrelevant(&st.vals);
            let reached_bits: u32 = reached.iter().map(|e| self.bits_of(*e)).sum();
            if reached_bits as usize > MAX_COMPLETION_BITS {
                acc.overflow.get_or_insert_with(|| {
                    format!("{reached_bits} reached bits in trailing messages exceed the completion bound")
                });
                return;
            }
            let mut n = 0u64;
            let mut first = None;
            let mut irr = st.vals.clone();
            for mask in 0u64..1 << reached_bits {
                let mut rest = mask;
                for &e in &reached {
                    let b = self.bits_of(e);
                    irr[e] = (rest & ((1 << b) - 1)) as i8;
                    rest >>= b;
                }
                if private(&self.records(&st.vals, Some(&irr), true)) {
                    n += 1;
                    first.get_or_insert_with(|| irr.clone());
                }
            }
            if n == 0 {
                return;
            }
            witness = first.expect("n > 0");
            let rest = irr_bits - reached_bits;
            *acc.private.entry(core_bits + rest).or_insert(0) += n;
        }
        acc.private_leaves += 1;
        if acc.witnesses.len() < self.witness_cap {
            acc.witnesses.push(witness);
        }
    }

    /// Unfixed entries of trailing messages that some world consults.
    fn reached_irrelevant(&self, vals: &[i8]) -> Vec<usize> {
        let lay = self.lay;
        let mut out = Vec::new();
        for w in 0..lay.worlds.len() {
            let sw = lay.worlds[w];
            let (ra, rb) = self.resources(vals, w);
            let mut msgs = [0usize, 0usize];
            for &t in &lay.messages {
                let table = &lay.tables[t];
                let s = table.owner;
                let (input, tape, res) = match s {
                    Party::A => (sw.u, sw.tape_a, ra),
                    Party::B => (sw.v, sw.tape_b, rb),
                };
                let idx = table.domain.index(input, tape, res, msgs[s as usize]);
                let value = if table.relevant {
                    vals[table.offset + idx] as usize
                } else {
                    if !self.fixed[table.offset + idx] {
                        out.push(table.offset + idx);
                    }
                    0
                };
                let r = s.other() as usize;
                msgs[r] = (msgs[r] << table.bits_per_entry()) | value;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn resources(&self, vals: &[i8], w: usize) -> (usize, usize) {
        let lay = self.lay;
        let sw = lay.worlds[w];
        let entry = |t: usize, input: usize, tape: usize| {
            let tb = &lay.tables[t];
            vals[tb.offset + tb.domain.index(input, tape, 0, 0)] as usize
        };
        let ia = lay.res_a.map_or(0, |t| entry(t, sw.u, sw.tape_a));
        let ib = lay.res_b.map_or(0, |t| entry(t, sw.v, sw.tape_b));
        self.resource_out(sw.resource_tape, ia, ib)
    }

    /// Records for all worlds of a finished assignment. With
    /// `with_irrelevant` false, trailing messages are blanked out of the
    /// receiver's observation.
    fn records(&self, vals: &[i8], irr: Option<&[i8]>, with_irrelevant: bool) -> Vec<Record> {
        let lay = self.lay;
        (0..lay.worlds.len())
            .map(|w| {
                let sw = lay.worlds[w];
                let src = if with_irrelevant { irr.or(Some(vals)) } else { None };
                let d = self.simulate(vals, w, src).expect("leaf assignment is complete");
                Record {
                    u: sw.u,
                    v: sw.v,
                    a_out: d.a_out,
                    b_out: vals[d.b_key] as usize,
                    obs_a: d.obs_a,
                    obs_b: d.obs_b,
                }
            })
            .collect()
    }
}

/// Exact conditional independence of each party's observation from the
/// other party's input and output, given its own input and output.
fn private(records: &[Record]) -> bool {
    independent(records.iter().map(|r| ((r.u, r.a_out), (r.v, r.b_out), r.obs_a)))
        && independent(records.iter().map(|r| ((r.v, r.b_out), (r.u, r.a_out), r.obs_b)))
}

fn independent(items: impl Iterator<Item = ((usize, usize), (usize, usize), usize)>) -> bool {
    let mut v: Vec<_> = items.collect();
    v.sort_unstable();
    let mut i = 0;
    while i < v.len() {
        let g = v[i].0;
        let mut j = i;
        while j < v.len() && v[j].0 == g {
            j += 1;
        }
        if !group_independent(&v[i..j]) {
            return false;
        }
        i = j;
    }
    true
}

/// (own, counterpart, observation) indices.
type Cell = ((usize, usize), (usize, usize), usize);

/// Within one own-(input, output) group, every counterpart slice must have
/// the same normalized observation histogram.
fn group_independent(g: &[Cell]) -> bool {
    let mut slices: Vec<Vec<(usize, u64)>> = Vec::new();
    let mut i = 0;
    while i < g.len() {
        let c = g[i].1;
        let mut hist: Vec<(usize, u64)> = Vec::new();
        while i < g.len() && g[i].1 == c {
            match hist.last_mut() {
                Some((o, n)) if *o == g[i].2 => *n += 1,
                _ => hist.push((g[i].2, 1)),
            }
            i += 1;
        }
        slices.push(hist);
    }
    let first = &slices[0];
    let n0: u64 = first.iter().map(|(_, n)| n).sum();
    slices[1..].iter().all(|s| {
        let n: u64 = s.iter().map(|(_, n)| n).sum();
        s.len() == first.len() && s.iter().zip(first).all(|((o, a), (o0, b))| o == o0 && a * n0 == b * n)
    })
}
