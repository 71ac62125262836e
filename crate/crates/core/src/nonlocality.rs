//! CHSH statistics in the equal-outcome form: exact values from behavior
//! tables, local deterministic strategies, and singlet measurements by
//! state-vector arithmetic.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::One;
use serde::Serialize;

use crate::bit::{Bit, Symbol};
use crate::dist::FiniteDist;
use crate::error::{Error, Result};
use crate::model::Party;
use crate::primitives::{self, Kind, Labels, Primitive};
use crate::prob::Prob;

/// Largest CHSH correlator reachable with quantum states, `2√2`.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Largest CHSH correlator of a local behavior.
pub const LOCAL_BOUND: i64 = 2;

/// `p[i][j]`: probability that the outcomes agree when A uses setting `i`
/// and B uses setting `j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EqualStats<T> {
    pub p00: T,
    pub p01: T,
    pub p10: T,
    pub p11: T,
}

impl<T: Copy> EqualStats<T> {
    pub fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        EqualStats {
            p00: f(0, 0),
            p01: f(0, 1),
            p10: f(1, 0),
            p11: f(1, 1),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match (i, j) {
            (0, 0) => self.p00,
            (0, 1) => self.p01,
            (1, 0) => self.p10,
            _ => self.p11,
        }
    }

    pub fn transpose(&self) -> Self {
        EqualStats::from_fn(|i, j| self.get(j, i))
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> EqualStats<U> {
        EqualStats::from_fn(|i, j| f(self.get(i, j)))
    }
}

impl EqualStats<Prob> {
    pub fn signed(&self) -> EqualStats<Ratio<i64>> {
        self.map(|p| Ratio::new(p.numer() as i64, p.denom() as i64))
    }

    pub fn to_f64(&self) -> EqualStats<f64> {
        self.map(Prob::to_f64)
    }
}

/// `p11 - (p00 + p01 + p10)`; positive exactly when the local inequality
/// `p11 <= p00 + p01 + p10` is violated.
pub fn chsh_p_value<T>(s: &EqualStats<T>) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    s.p11 - (s.p00 + s.p01 + s.p10)
}

/// `E11 - E10 - E01 - E00` with `E_ij = 2 p_ij - 1`. Local behaviors reach
/// at most 2.
pub fn chsh_correlator<T>(s: &EqualStats<T>) -> T
where
    T: Copy + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let two = T::one() + T::one();
    let e = |i, j| two * s.get(i, j) - T::one();
    e(1, 1) - e(1, 0) - e(0, 1) - e(0, 0)
}

fn binary(p: &Primitive) -> bool {
    let bits = |alpha: &[Symbol]| alpha.len() == 2 && alpha.iter().all(|s| s.len() == 1);
    Party::both()
        .into_iter()
        .all(|q| bits(p.inputs(q)) && bits(p.outputs(q)))
}

/// Exact agreement probabilities of a binary-input binary-output box.
pub fn equal_stats(p: &Primitive) -> Result<EqualStats<Prob>> {
    if !binary(p) {
        return Err(Error::NotBinary(p.name().to_string()));
    }
    let agree = |i: usize, j: usize| {
        let (u, v) = (p.inputs(Party::A)[i], p.inputs(Party::B)[j]);
        Bit::both()
            .into_iter()
            .map(|o| primitives::mass(p, u, v, Symbol::bit(o), Symbol::bit(o)))
            .fold(Prob::zero(), |a, b| a + b)
    };
    Ok(EqualStats::from_fn(agree))
}

/// The PR box with B's output flipped: outcomes agree only on inputs
/// (1, 1). A relabeling of [`primitives::pr`].
pub fn pr_variant() -> Primitive {
    primitives::pr()
        .relabel_outputs("PR-variant", |a| a, flip)
        .expect("relabeling keeps the table well formed")
}

fn flip(s: Symbol) -> Symbol {
    s.with_flipped(0)
}

/// A deterministic local strategy as a box: A answers `a_u`, B answers
/// `b_v`.
pub fn local_box(a: [Bit; 2], b: [Bit; 2]) -> Primitive {
    let bit = |x: Bit| Symbol::bit(x);
    Primitive::new(
        format!("local-{}{}{}{}", a[0], a[1], b[0], b[1]),
        Kind::Other,
        Symbol::all(1).collect(),
        Symbol::all(1).collect(),
        Symbol::all(1).collect(),
        Symbol::all(1).collect(),
        Labels::of(&["x"], &["y"], &["a"], &["b"]),
        |u, v| Ok(FiniteDist::point((bit(a[u.index()]), bit(b[v.index()])))),
    )
    .expect("deterministic table is well formed")
}

/// `p_ij = 1` if `a_i = b_j`, else 0.
pub fn local_strategy_stats(a0: Bit, a1: Bit, b0: Bit, b1: Bit) -> EqualStats<Prob> {
    let (a, b) = ([a0, a1], [b0, b1]);
    EqualStats::from_fn(|i, j| if a[i] == b[j] { Prob::one() } else { Prob::zero() })
}

/// All 16 deterministic local strategies, `(a0, a1, b0, b1)` in binary
/// order.
pub fn local_strategies() -> impl Iterator<Item = [Bit; 4]> {
    (0..16u8).map(|k| [3, 2, 1, 0].map(|s| Bit::from_u8((k >> s) & 1)))
}

/// Measurement directions in the x-z plane of the Bloch sphere, in
/// radians, one per setting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasurementAngles {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl MeasurementAngles {
    pub fn degrees(a: [f64; 2], b: [f64; 2]) -> Self {
        MeasurementAngles {
            a: a.map(f64::to_radians),
            b: b.map(f64::to_radians),
        }
    }

    pub fn swapped(&self) -> Self {
        MeasurementAngles { a: self.b, b: self.a }
    }
}

/// Settings giving agreement probabilities `(0, 1/4, 1/4, 3/4)` on the
/// singlet: with agreement `sin²((α - β)/2)`, the differences 0°, 60°, 60°
/// and 120° are needed, met by A at (0°, 60°) and B at (0°, -60°).
pub fn table_angles() -> MeasurementAngles {
    MeasurementAngles::degrees([0.0, 60.0], [0.0, -60.0])
}

/// Two-qubit pure state over `|00>, |01>, |10>, |11>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector2Q {
    pub amps: [Complex64; 4],
}

impl StateVector2Q {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::WeightSum { found: norm.to_string() });
        }
        Ok(StateVector2Q { amps })
    }

    /// `(|01> - |10>) / √2`.
    pub fn singlet() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        StateVector2Q { amps: [z, h, -h, z] }
    }

    /// Probability of outcomes `(oa, ob)` when A measures along `alpha`
    /// and B along `beta`.
    pub fn outcome_prob(&self, alpha: f64, beta: f64, oa: usize, ob: usize) -> f64 {
        let (ea, eb) = (eigenvector(alpha, oa), eigenvector(beta, ob));
        let mut amp = Complex64::new(0.0, 0.0);
        for (i, x) in ea.iter().enumerate() {
            for (j, y) in eb.iter().enumerate() {
                amp += (x * y).conj() * self.amps[2 * i + j];
            }
        }
        amp.norm_sqr()
    }
}

/// Eigenvector for outcome `o` of the observable along angle `theta`.
fn eigenvector(theta: f64, o: usize) -> [Complex64; 2] {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let r = |x: f64| Complex64::new(x, 0.0);
    match o {
        0 => [r(c), r(s)],
        _ => [r(-s), r(c)],
    }
}

/// Agreement probabilities of the singlet under the given settings.
pub fn singlet_stats(m: &MeasurementAngles) -> EqualStats<f64> {
    let psi = StateVector2Q::singlet();
    EqualStats::from_fn(|i, j| (0..2).map(|o| psi.outcome_prob(m.a[i], m.b[j], o, o)).sum())
}

/// Named behaviors for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ChshReport {
    pub behavior: String,
    pub p_stats: [f64; 4],
    pub p_value: f64,
    pub correlator: f64,
    pub local_bound: i64,
    pub tsirelson: f64,
    /// Both flags test this one inequality orientation; the standard PR
    /// box sits at -4 here and only its variant exceeds the bounds.
    pub violates_local: bool,
    pub violates_quantum: bool,
    /// Exact values as fractions when the behavior comes from a table.
    pub exact: Option<ExactChsh>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactChsh {
    pub p_stats: [String; 4],
    pub p_value: String,
    pub correlator: String,
}

const TOL: f64 = 1e-9;

fn report_f64(behavior: &str, s: &EqualStats<f64>, exact: Option<ExactChsh>) -> ChshReport {
    let correlator = chsh_correlator(s);
    ChshReport {
        behavior: behavior.to_string(),
        p_stats: s.to_array(),
        p_value: chsh_p_value(s),
        correlator,
        local_bound: LOCAL_BOUND,
        tsirelson: TSIRELSON,
        violates_local: correlator > LOCAL_BOUND as f64 + TOL,
        violates_quantum: correlator > TSIRELSON + TOL,
        exact,
    }
}

fn report_exact(behavior: &str, s: &EqualStats<Prob>) -> ChshReport {
    let q = s.signed();
    let exact = ExactChsh {
        p_stats: s.to_array().map(|p| p.to_string()),
        p_value: chsh_p_value(&q).to_string(),
        correlator: chsh_correlator(&q).to_string(),
    };
    let mut r = report_f64(behavior, &s.to_f64(), Some(exact));
    r.violates_local = chsh_correlator(&q) > Ratio::from_integer(LOCAL_BOUND);
    r
}

/// `singlet`, `pr`, `pr-variant`, or `local-<a0><a1><b0><b1>`.
pub fn chsh_report(behavior: &str) -> Result<ChshReport> {
    match behavior {
        "singlet" => Ok(report_f64(behavior, &singlet_stats(&table_angles()), None)),
        "pr" => Ok(report_exact(behavior, &equal_stats(&primitives::pr())?)),
        "pr-variant" => Ok(report_exact(behavior, &equal_stats(&pr_variant())?)),
        _ => {
            let bits = behavior
                .strip_prefix("local-")
                .filter(|b| b.len() == 4)
                .and_then(|b| b.parse::<Symbol>().ok())
                .ok_or_else(|| Error::NotBinary(behavior.to_string()))?;
            let [a0, a1, b0, b1] = [0, 1, 2, 3].map(|i| bits.get(i));
            Ok(report_exact(behavior, &local_strategy_stats(a0, a1, b0, b1)))
        }
    }
}
