//! Second-moment statements for incomplete Kloosterman sums.
//!
//! * the window mean value `sum_{n=1}^{p} |S(n,H)|^2` against `H^2/p + 8pH`,
//!   and the exact identity expressing it through `|K(ell,a;p)|^2`;
//! * the disjoint-interval mean value against `2^12 p log^2 H`;
//! * the dyadic splitting of a window length `k <= 2H` into aligned blocks.
//!
//! Logarithms are natural throughout.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::accum::{CompensatedSum, ComplexAccumulator};
use crate::error::{KlabError, Result};
use crate::expsums::{
    geometric_modulus_sq, incomplete_kloosterman, interval_sum, ComplexSum, PhaseTable, SumSpec,
    WindowSpec,
};
use crate::interval::IntInterval;
use crate::modarith::PrimeModulus;

/// Pairwise disjoint intervals in `(0, p)` whose sizes lie in `(H/2, H]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DisjointFamily {
    intervals: Vec<IntInterval>,
    h: u64,
}

impl DisjointFamily {
    pub fn new(intervals: Vec<IntInterval>, h: u64, p: &PrimeModulus) -> Result<Self> {
        if intervals.is_empty() {
            return Err(KlabError::InvalidFamily("family is empty".into()));
        }
        for i in &intervals {
            i.check_within(p)?;
            if i.len() > h || 2 * i.len() <= h {
                return Err(KlabError::InvalidFamily(format!(
                    "interval {i} has size {} outside (H/2, H] for H = {h}",
                    i.len()
                )));
            }
        }
        let mut sorted = intervals.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0].intersects(&w[1])) {
            return Err(KlabError::InvalidFamily(format!(
                "intervals {} and {} overlap",
                w[0], w[1]
            )));
        }
        Ok(Self { intervals, h })
    }

    pub fn intervals(&self) -> &[IntInterval] {
        &self.intervals
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    /// Number of intervals J.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// One side of a mean-value inequality. `ratio > 1` is a falsification.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanValueReport {
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
    pub p: u64,
    pub ell: u64,
    pub h: u64,
    /// Family size for the disjoint-interval statement.
    pub j: Option<usize>,
}

impl MeanValueReport {
    fn new(lhs: f64, bound: f64, spec: &SumSpec, h: u64, j: Option<usize>) -> Self {
        Self {
            lhs,
            bound,
            ratio: lhs / bound,
            p: spec.modulus().get(),
            ell: spec.ell(),
            h,
            j,
        }
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.bound
    }
}

fn check_h(h: u64, p: &PrimeModulus) -> Result<()> {
    if h == 0 || h > p.get() {
        return Err(KlabError::InvalidWindow {
            h,
            min: 1,
            max: p.get(),
        });
    }
    Ok(())
}

/// `sum_{n=1}^{p} |S(n,H)|^2`.
pub fn lemma1_lhs(spec: &SumSpec, h: u64) -> Result<f64> {
    check_h(h, spec.modulus())?;
    lemma1_lhs_with(&PhaseTable::new(*spec.modulus()), spec.ell(), h)
}

pub fn lemma1_lhs_with(table: &PhaseTable, ell: u64, h: u64) -> Result<f64> {
    let windows = table.all_windows(ell, h)?;
    Ok(windows
        .iter()
        .map(|s| s.norm_sqr())
        .collect::<CompensatedSum>()
        .value())
}

/// `H^2/p + 8pH`.
pub fn lemma1_bound(h: u64, p: &PrimeModulus) -> f64 {
    let (h, p) = (h as f64, p.get() as f64);
    h * h / p + 8.0 * p * h
}

pub fn check_lemma1(spec: &SumSpec, h: u64) -> Result<MeanValueReport> {
    let lhs = lemma1_lhs(spec, h)?;
    Ok(MeanValueReport::new(
        lhs,
        lemma1_bound(h, spec.modulus()),
        spec,
        h,
        None,
    ))
}

/// The weights `|K(ell, a; p)|^2` for `a = 0..p`, reusable across window lengths.
#[derive(Debug, Clone)]
pub struct SpectralWeights {
    p: PrimeModulus,
    k_sq: Vec<f64>,
}

impl SpectralWeights {
    pub fn new(table: &PhaseTable, ell: u64) -> Result<Self> {
        let p = *table.modulus();
        let k_sq = (0..p.get())
            .into_par_iter()
            .map(|a| table.kloosterman(ell, a).map(|k| k * k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p, k_sq })
    }

    /// `|K(ell, a; p)|^2`.
    pub fn weight(&self, a: u64) -> f64 {
        self.k_sq[(a % self.p.get()) as usize]
    }

    /// `(1/p) sum_{a=1}^{p} |K(ell,a;p)|^2 |sum_{h=1}^{H} e(ah/p)|^2`.
    pub fn rhs(&self, h: u64) -> f64 {
        let total: CompensatedSum = self
            .k_sq
            .iter()
            .enumerate()
            .map(|(a, w)| w * geometric_modulus_sq(a as u64, h, &self.p))
            .collect();
        total.value() / self.p.get() as f64
    }
}

/// Right-hand side of the spectral identity for `sum_n |S(n,H)|^2`.
pub fn spectral_rhs(spec: &SumSpec, h: u64) -> Result<f64> {
    check_h(h, spec.modulus())?;
    let table = PhaseTable::new(*spec.modulus());
    Ok(SpectralWeights::new(&table, spec.ell())?.rhs(h))
}

/// Largest modulus accepted by [`spectral_rhs_double_sum`].
pub const DOUBLE_SUM_MAX_P: u64 = 200;

/// Same quantity as [`spectral_rhs`] with the explicit double sum over
/// `h1, h2` in place of the closed-form geometric modulus.
pub fn spectral_rhs_double_sum(spec: &SumSpec, h: u64) -> Result<f64> {
    let p = spec.modulus();
    check_h(h, p)?;
    if p.get() > DOUBLE_SUM_MAX_P {
        return Err(KlabError::InvalidWindow {
            h: p.get(),
            min: 3,
            max: DOUBLE_SUM_MAX_P,
        });
    }
    let table = PhaseTable::new(*p);
    let m = p.get();
    let mut total = CompensatedSum::new();
    for a in 0..m {
        let k = table.kloosterman(spec.ell(), a)?;
        let mut inner = ComplexAccumulator::new();
        for h1 in 1..=h {
            for h2 in 1..=h {
                let phase = (a * ((h2 + m - h1 % m) % m)) % m;
                inner.add(table.root(phase));
            }
        }
        total.add(k * k * inner.value().re);
    }
    Ok(total.value() / m as f64)
}

/// `sum_j |sum_{n in I_j} e(ell n̄/p)|^2`.
pub fn mvt_lhs(spec: &SumSpec, fam: &DisjointFamily) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for i in fam.intervals() {
        acc.add(interval_sum(spec, i)?.norm_sqr());
    }
    Ok(acc.value())
}

/// [`mvt_lhs`] using precomputed tables.
pub fn mvt_lhs_with(table: &PhaseTable, ell: u64, fam: &DisjointFamily) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for i in fam.intervals() {
        i.check_within(table.modulus())?;
        acc.add(table.window_sum(ell, i.lo() - 1, i.len()).norm_sqr());
    }
    Ok(acc.value())
}

/// `2^12 p (ln H)^2`; zero at `H = 1`, so that case is an error.
pub fn mvt_bound(h: u64, p: &PrimeModulus) -> Result<f64> {
    if h < 2 {
        return Err(KlabError::DegenerateBound { h });
    }
    let log_h = (h as f64).ln();
    Ok(4096.0 * p.get() as f64 * log_h * log_h)
}

/// Smallest H at which the disjoint-interval bound is asserted.
pub const MVT_MIN_H: u64 = 4;

/// `sum_j |I_j|^2`, the bound used below [`MVT_MIN_H`].
pub fn mvt_trivial_bound(fam: &DisjointFamily) -> f64 {
    fam.intervals()
        .iter()
        .map(|i| (i.len() as f64).powi(2))
        .sum()
}

/// Checks the family against `2^12 p log^2 H` for `H >= 4` and the trivial
/// bound otherwise.
pub fn check_mvt(spec: &SumSpec, fam: &DisjointFamily) -> Result<MeanValueReport> {
    let table = PhaseTable::new(*spec.modulus());
    check_mvt_with(&table, spec, fam)
}

pub fn check_mvt_with(
    table: &PhaseTable,
    spec: &SumSpec,
    fam: &DisjointFamily,
) -> Result<MeanValueReport> {
    let lhs = mvt_lhs_with(table, spec.ell(), fam)?;
    let bound = if fam.h() >= MVT_MIN_H {
        mvt_bound(fam.h(), spec.modulus())?
    } else {
        mvt_trivial_bound(fam)
    };
    Ok(MeanValueReport::new(
        lhs,
        bound,
        spec,
        fam.h(),
        Some(fam.len()),
    ))
}

/// One aligned block of a [`DyadicPlan`]: `d` in the digit set, `v < 2^d`,
/// covering positions `offset + 1 ..= offset + len` of the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicBlock {
    pub d: u32,
    pub v: u64,
    pub offset: u64,
    pub len: u64,
}

/// `k = sum_{d in D} 2^(t-d)` with `t` the least positive integer such that `2H <= 2^t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DyadicPlan {
    pub k: u64,
    pub h: u64,
    pub t: u32,
    pub digits: Vec<u32>,
    pub blocks: Vec<DyadicBlock>,
}

impl DyadicPlan {
    /// The tiling invariants: block sizes, offsets, `v < 2^d`, and exact
    /// coverage of `{1..k}`.
    pub fn is_consistent(&self) -> bool {
        let two_t = 1u64 << self.t;
        if !(2 * self.h <= two_t && two_t <= 4 * self.h) {
            return false;
        }
        if self.t > 1 && 2 * self.h <= 1 << (self.t - 1) {
            return false;
        }
        let mut cursor = 0u64;
        for (b, &d) in self.blocks.iter().zip(&self.digits) {
            if b.d != d || d > self.t {
                return false;
            }
            let v: u64 = self
                .digits
                .iter()
                .filter(|&&e| e < d)
                .map(|&e| 1u64 << (d - e))
                .sum();
            if b.len != 1 << (self.t - d) || b.v != v || v >= 1 << d {
                return false;
            }
            if b.offset != cursor || b.offset != v * b.len {
                return false;
            }
            cursor += b.len;
        }
        self.blocks.len() == self.digits.len() && cursor == self.k
    }
}

/// Splits `1 <= k <= 2H` into dyadic blocks, largest first.
pub fn dyadic_plan(k: u64, h: u64) -> Result<DyadicPlan> {
    if h == 0 || k == 0 || k > 2 * h {
        return Err(KlabError::InvalidK { k, two_h: 2 * h });
    }
    let mut t = 1u32;
    while (1u64 << t) < 2 * h {
        t += 1;
    }
    // bit b of k contributes 2^b = 2^(t-d) with d = t - b
    let mut digits: Vec<u32> = (0..=t)
        .filter(|&b| k >> b & 1 == 1)
        .map(|b| t - b)
        .collect();
    digits.sort_unstable();
    let mut blocks = Vec::with_capacity(digits.len());
    for &d in &digits {
        let v: u64 = digits
            .iter()
            .take_while(|&&e| e < d)
            .map(|&e| 1u64 << (d - e))
            .sum();
        let len = 1u64 << (t - d);
        blocks.push(DyadicBlock {
            d,
            v,
            offset: v * len,
            len,
        });
    }
    Ok(DyadicPlan {
        k,
        h,
        t,
        digits,
        blocks,
    })
}

/// `S(n, k)` rebuilt as `sum_{d in D} S(n + v_d 2^(t-d), 2^(t-d))`.
pub fn reconstruct_s(spec: &SumSpec, n: u64, plan: &DyadicPlan) -> ComplexSum {
    let p = spec.modulus();
    plan.blocks
        .iter()
        .map(|b| {
            let start = ((n % p.get()) as u128 + b.offset as u128) % p.get() as u128;
            let w = WindowSpec::new(start as u64, b.len, p).expect("block length is positive");
            incomplete_kloosterman(spec, &w)
        })
        .fold(Complex64::new(0.0, 0.0), |acc, z| acc + z)
}

/// Summary of `|S(n, H)|` over all n; exploratory only.
#[derive(Debug, Clone, PartialEq)]
pub struct HooleyStats {
    pub p: u64,
    pub ell: u64,
    pub h: u64,
    pub max_abs: f64,
    /// First `n in 1..=p` attaining `max_abs`.
    pub argmax_n: u64,
    /// `max_abs / sqrt(H)`.
    pub max_ratio: f64,
    /// Mean over n of `|S(n,H)|^2 / H`.
    pub mean_sq_over_h: f64,
}

pub fn hooley_scan(spec: &SumSpec, h: u64) -> Result<HooleyStats> {
    check_h(h, spec.modulus())?;
    hooley_scan_with(&PhaseTable::new(*spec.modulus()), spec.ell(), h)
}

pub fn hooley_scan_with(table: &PhaseTable, ell: u64, h: u64) -> Result<HooleyStats> {
    let sums = table.all_windows(ell, h)?;
    let (mut max_abs, mut argmax) = (f64::NEG_INFINITY, 0usize);
    let mut sq = CompensatedSum::new();
    for (i, s) in sums.iter().enumerate() {
        let a = s.norm();
        if a > max_abs {
            max_abs = a;
            argmax = i;
        }
        sq.add(s.norm_sqr());
    }
    let hf = h as f64;
    Ok(HooleyStats {
        p: table.modulus().get(),
        ell,
        h,
        max_abs,
        argmax_n: argmax as u64 + 1,
        max_ratio: max_abs / hf.sqrt(),
        mean_sq_over_h: sq.value() / (sums.len() as f64 * hf),
    })
}
