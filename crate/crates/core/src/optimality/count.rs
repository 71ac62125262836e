//! Exact count of correct protocols.
//!
//! Unfinished worlds are split into groups that share no unassigned
//! entry; each group is counted on its own and the results multiply.
//! Sub-counts are memoized on everything the group can still read. A
//! count is a histogram over how many worlds of each input pair end with
//! each constrained A output, so the global per-pair frequencies can be
//! checked when groups are combined.

use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap as HashMap;

use crate::model::Party;

use super::engine::{Done, Engine, DONE, UNSET};

/// `m / 2^e`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dyadic {
    m: BigUint,
    e: u32,
}

impl Dyadic {
    fn mul(&self, o: &Dyadic) -> Dyadic {
        Dyadic {
            m: &self.m * &o.m,
            e: self.e + o.e,
        }
    }

    fn add(&mut self, o: &Dyadic) {
        if self.e >= o.e {
            self.m += &o.m << (self.e - o.e) as usize;
        } else {
            self.m = (&self.m << (o.e - self.e) as usize) + &o.m;
            self.e = o.e;
        }
    }
}

/// Tally contribution -> weighted count.
type Hist = Vec<(Box<[u8]>, Dyadic)>;

pub(crate) struct Counter<'e, 'a> {
    eng: &'e Engine<'a>,
    certify: bool,
    /// Constrained tally slot of each `(pair, a_out)`.
    slot: Vec<Option<usize>>,
    limit: Vec<u8>,
    memo: HashMap<Vec<u32>, Rc<Hist>>,
    scratch: Scratch,
    pub nodes: u64,
}

const MEMO_CAP: usize = 1 << 21;

impl<'e, 'a> Counter<'e, 'a> {
    /// With `certify`, a world with B input `y` and output `b` also
    /// requires B's output at the same observation with `y` flipped to be
    /// `b xor x`.
    pub fn new(eng: &'e Engine<'a>, certify: bool) -> Self {
        let lay = eng.lay;
        let mut slot = Vec::new();
        let mut limit = Vec::new();
        for per_a in &lay.demand {
            for d in per_a {
                match d {
                    Some((n, _)) if *n < lay.worlds_per_pair => {
                        slot.push(Some(limit.len()));
                        limit.push(u8::try_from(*n).expect("tally fits a byte"));
                    }
                    _ => slot.push(None),
                }
            }
        }
        Counter {
            eng,
            certify,
            slot,
            limit,
            memo: HashMap::default(),
            scratch: Scratch::default(),
            nodes: 0,
        }
    }

    /// Number of correct protocols with the engine's fixed entries.
    pub fn count(&mut self, vals: &[i8]) -> BigUint {
        let mut vals = vals.to_vec();
        let free: u32 = (0..vals.len()).filter(|e| vals[*e] == UNSET).map(|e| self.eng.bits_of(e)).sum();
        let n = self.eng.lay.worlds.len();
        let mut status = vec![DONE - 1; n];
        let all: Vec<u32> = (0..n as u32).collect();
        let Some(h) = self.branch(&mut vals, &mut status, &all, None) else {
            return BigUint::zero();
        };
        let mut total = Dyadic {
            m: BigUint::zero(),
            e: 0,
        };
        for (_, d) in h.iter() {
            total.add(d);
        }
        let shift = free + self.eng.symmetry_bits;
        (total.m << shift as usize) >> total.e as usize
    }

    /// Advance the worlds of `comp` blocked on `on` (all of them when
    /// `None`), then count every independent remainder.
    fn branch(&mut self, vals: &mut [i8], status: &mut [u32], comp: &[u32], on: Option<u32>) -> Option<Hist> {
        let mut tally = vec![0u8; self.limit.len()];
        let mut spent = 0u32;
        for &w in comp {
            if on.is_none_or(|e| status[w as usize] == e) && !self.advance(vals, status, w as usize, &mut tally, &mut spent) {
                return None;
            }
        }
        let rest: Vec<u32> = comp.iter().copied().filter(|w| status[*w as usize] != DONE).collect();
        let mut acc: Hist = vec![(
            tally.into_boxed_slice(),
            Dyadic {
                m: BigUint::one(),
                e: spent,
            },
        )];
        for (part, key) in self.split(vals, &rest) {
            let h = self.solve(vals, status, &part, key);
            acc = self.convolve(&acc, &h);
            if acc.is_empty() {
                return None;
            }
        }
        Some(acc)
    }

    fn solve(&mut self, vals: &[i8], status: &[u32], comp: &[u32], key: Vec<u32>) -> Rc<Hist> {
        self.nodes += 1;
        if let Some(h) = self.memo.get(&key) {
            return h.clone();
        }
        let mut out: HashMap<Box<[u8]>, Dyadic> = HashMap::default();
        let (e, values) = self.eng.choose(vals, status, comp).unwrap_or((0, Vec::new()));
        for val in values {
            let mut v = vals.to_vec();
            let mut st = status.to_vec();
            v[e as usize] = val as i8;
            if let Some(h) = self.branch(&mut v, &mut st, comp, Some(e)) {
                let bits = self.eng.bits_of(e as usize);
                for (k, mut d) in h {
                    d.e += bits;
                    match out.get_mut(&k) {
                        Some(x) => x.add(&d),
                        None => {
                            out.insert(k, d);
                        }
                    }
                }
            }
        }
        let mut h: Hist = out.into_iter().collect();
        h.sort_by(|a, b| a.0.cmp(&b.0));
        let h = Rc::new(h);
        if self.memo.len() >= MEMO_CAP {
            self.memo.clear();
        }
        self.memo.insert(key, h.clone());
        h
    }

    fn convolve(&self, x: &Hist, y: &Hist) -> Hist {
        if x.is_empty() || y.is_empty() {
            return Vec::new();
        }
        if self.limit.is_empty() {
            return vec![(x[0].0.clone(), x[0].1.mul(&y[0].1))];
        }
        let mut out: HashMap<Box<[u8]>, Dyadic> = HashMap::default();
        for (ka, a) in x {
            'pairs: for (kb, b) in y {
                let mut k = ka.clone();
                for i in 0..k.len() {
                    k[i] += kb[i];
                    if k[i] > self.limit[i] {
                        continue 'pairs;
                    }
                }
                let d = a.mul(b);
                match out.get_mut(&k) {
                    Some(x) => x.add(&d),
                    None => {
                        out.insert(k, d);
                    }
                }
            }
        }
        let mut h: Hist = out.into_iter().collect();
        h.sort_by(|a, b| a.0.cmp(&b.0));
        h
    }

    fn advance(&self, vals: &mut [i8], status: &mut [u32], w: usize, tally: &mut [u8], spent: &mut u32) -> bool {
        let lay = self.eng.lay;
        let Done { pair, a_out, b_key, obs_b, .. } = match self.eng.simulate(vals, w, None) {
            Err(e) => {
                status[w] = e;
                return true;
            }
            Ok(d) => d,
        };
        status[w] = DONE;
        let Some((_, b_want)) = lay.demand[pair][a_out] else {
            return false;
        };
        let n_a = lay.target.outputs(Party::A).len();
        if let Some(k) = self.slot[pair * n_a + a_out] {
            tally[k] += 1;
            if tally[k] > self.limit[k] {
                return false;
            }
        }
        if !self.force(vals, b_key, b_want, spent) {
            return false;
        }
        if self.certify {
            let sw = lay.worlds[w];
            let e = self.sibling(obs_b);
            return self.force(vals, e, b_want ^ (sw.u & 1), spent);
        }
        true
    }

    fn force(&self, vals: &mut [i8], e: usize, want: usize, spent: &mut u32) -> bool {
        match vals[e] {
            UNSET => {
                vals[e] = want as i8;
                *spent += self.eng.bits_of(e);
                true
            }
            v => v as usize == want,
        }
    }

    /// B's output entry at the same observation with the input bit flipped.
    fn sibling(&self, obs_b: usize) -> usize {
        let lay = self.eng.lay;
        let d = self.eng.full[Party::B as usize];
        let (y, tape, res, msgs) = d.decode(obs_b);
        lay.tables[lay.out_b].offset + d.index(y ^ 1, tape, res, msgs)
    }

    /// Entries world `w` has read or may still read.
    fn explore(&self, vals: &[i8], w: usize, out: &mut Vec<u32>) {
        let lay = self.eng.lay;
        let sw = lay.worlds[w];
        let pick = |t: Option<usize>, input: usize, tape: usize, out: &mut Vec<u32>| match t {
            None => 0..1,
            Some(t) => {
                let e = lay.tables[t].offset + lay.tables[t].domain.index(input, tape, 0, 0);
                out.push(e as u32);
                choices(vals[e], lay.tables[t].range.len())
            }
        };
        let ias = pick(lay.res_a, sw.u, sw.tape_a, out);
        let ibs = pick(lay.res_b, sw.v, sw.tape_b, out);
        for ia in ias {
            for ib in ibs.clone() {
                let (ra, rb) = self.eng.resource_out(sw.resource_tape, ia, ib);
                self.walk(vals, w, 0, [0, 0], (ra, rb), out);
            }
        }
    }

    fn walk(&self, vals: &[i8], w: usize, k: usize, msgs: [usize; 2], res: (usize, usize), out: &mut Vec<u32>) {
        let lay = self.eng.lay;
        let sw = lay.worlds[w];
        let own = |p: Party| match p {
            Party::A => (sw.u, sw.tape_a, res.0),
            Party::B => (sw.v, sw.tape_b, res.1),
        };
        if k == lay.messages.len() {
            let obs = |p: Party| {
                let (i, t, r) = own(p);
                self.eng.full[p as usize].index(i, t, r, msgs[p as usize])
            };
            if let Some(t) = lay.out_a {
                let e = lay.tables[t].offset + obs(Party::A);
                out.push(e as u32);
            }
            let ob = obs(Party::B);
            let e = lay.tables[lay.out_b].offset + ob;
            out.push(e as u32);
            if self.certify {
                let e = self.sibling(ob);
                out.push(e as u32);
            }
            return;
        }
        let table = &lay.tables[lay.messages[k]];
        let s = table.owner;
        let r = s.other() as usize;
        let values = if table.relevant {
            let (i, t, rr) = own(s);
            let e = table.offset + table.domain.index(i, t, rr, msgs[s as usize]);
            out.push(e as u32);
            choices(vals[e], table.range.len())
        } else {
            0..1
        };
        for b in values {
            let mut m = msgs;
            m[r] = (m[r] << table.bits_per_entry()) | b;
            self.walk(vals, w, k + 1, m, res, out);
        }
    }

    /// Groups of worlds connected through unassigned entries, each with
    /// its memo key: the worlds and every entry they have read or may
    /// still read, with its current value.
    fn split(&mut self, vals: &[i8], worlds: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
        let mut sc = std::mem::take(&mut self.scratch);
        if sc.mark.len() < vals.len() {
            sc.mark = vec![(0, 0); vals.len()];
        }
        let n = worlds.len();
        sc.parent.clear();
        sc.parent.extend(0..n as u32);
        fn find(p: &mut [u32], mut i: u32) -> u32 {
            while p[i as usize] != i {
                p[i as usize] = p[p[i as usize] as usize];
                i = p[i as usize];
            }
            i
        }
        sc.stamp += 1;
        let stamp = sc.stamp;
        sc.flat.clear();
        sc.ends.clear();
        for (i, &w) in worlds.iter().enumerate() {
            let start = sc.flat.len();
            self.explore(vals, w as usize, &mut sc.flat);
            for k in start..sc.flat.len() {
                let e = sc.flat[k] as usize;
                if vals[e] != UNSET {
                    continue;
                }
                let (g, owner) = sc.mark[e];
                if g != stamp {
                    sc.mark[e] = (stamp, i as u32);
                } else {
                    let (a, b) = (find(&mut sc.parent, i as u32), find(&mut sc.parent, owner));
                    if a != b {
                        sc.parent[a.max(b) as usize] = a.min(b);
                    }
                }
            }
            sc.ends.push(sc.flat.len());
        }
        sc.order.clear();
        for i in 0..n as u32 {
            let r = find(&mut sc.parent, i);
            sc.order.push((r, i));
        }
        sc.order.sort_unstable();
        let mut groups = Vec::new();
        let mut k = 0;
        while k < n {
            let root = sc.order[k].0;
            sc.stamp += 1;
            let tag = sc.stamp;
            let mut ws = Vec::new();
            let mut entries = Vec::new();
            while k < n && sc.order[k].0 == root {
                let i = sc.order[k].1 as usize;
                ws.push(worlds[i]);
                let start = if i == 0 { 0 } else { sc.ends[i - 1] };
                for &e in &sc.flat[start..sc.ends[i]] {
                    if sc.mark[e as usize].0 != tag {
                        sc.mark[e as usize].0 = tag;
                        entries.push(e);
                    }
                }
                k += 1;
            }
            ws.sort_unstable();
            if entries.len() > 16 {
                let (lo, hi) = entries.iter().fold((u32::MAX, 0), |(l, h), &e| (l.min(e), h.max(e)));
                entries.clear();
                entries.extend((lo..=hi).filter(|&e| sc.mark[e as usize].0 == tag));
            } else {
                entries.sort_unstable();
            }
            let mut key = ws.clone();
            key.push(u32::MAX);
            key.extend(entries.iter().map(|&e| e * 8 + (vals[e as usize] + 1) as u32));
            groups.push((ws, key));
        }
        groups.sort_unstable();
        self.scratch = sc;
        groups
    }
}

/// Reusable buffers for [`Counter::split`].
#[derive(Default)]
struct Scratch {
    /// Per entry: last stamp and the first world that read it.
    mark: Vec<(u32, u32)>,
    stamp: u32,
    parent: Vec<u32>,
    flat: Vec<u32>,
    ends: Vec<usize>,
    order: Vec<(u32, u32)>,
}

fn choices(v: i8, range: usize) -> std::ops::Range<usize> {
    if v == UNSET {
        0..range
    } else {
        v as usize..v as usize + 1
    }
}
