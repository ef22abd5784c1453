//! Solutions of `xy ≡ 1 (mod p)` with `(x, y)` in a box `I1 × I2`, and the
//! orthogonality split of the solution count into a main term `|I1||I2|/p`
//! and a character-sum error term.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::accum::ComplexAccumulator;
use crate::error::{KlabError, Result};
use crate::expsums::{ComplexSum, PhaseTable};
use crate::interval::IntInterval;
use crate::modarith::{batch_inv_u64, inv_u64, PrimeModulus};

/// Pairs `(I1^(j), I2^(j))` with `|I1| = H`, `|I2| = K` and pairwise disjoint `I1`'s.
/// The `I2`'s may overlap freely.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPairFamily {
    pairs: Vec<(IntInterval, IntInterval)>,
    h: u64,
    k: u64,
}

impl IntervalPairFamily {
    pub fn new(
        pairs: Vec<(IntInterval, IntInterval)>,
        h: u64,
        k: u64,
        p: &PrimeModulus,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(KlabError::InvalidFamily("family is empty".into()));
        }
        for (j, (i1, i2)) in pairs.iter().enumerate() {
            i1.check_within(p)?;
            i2.check_within(p)?;
            if i1.len() != h || i2.len() != k {
                return Err(KlabError::InvalidFamily(format!(
                    "pair {} has sizes ({}, {}), expected ({h}, {k})",
                    j + 1,
                    i1.len(),
                    i2.len()
                )));
            }
        }
        let mut firsts: Vec<IntInterval> = pairs.iter().map(|(i1, _)| *i1).collect();
        firsts.sort();
        if let Some(w) = firsts.windows(2).find(|w| w[0].intersects(&w[1])) {
            return Err(KlabError::InvalidFamily(format!(
                "first intervals {} and {} overlap",
                w[0], w[1]
            )));
        }
        Ok(Self { pairs, h, k })
    }

    pub fn pairs(&self) -> &[(IntInterval, IntInterval)] {
        &self.pairs
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Number of pairs J.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Count decomposition for one pair: `count = s1 + Re(s2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolubilityReport {
    /// 1-based pair index.
    pub j: usize,
    pub count: u64,
    pub s1: f64,
    pub s2: ComplexSum,
    pub witness: Option<(u64, u64)>,
}

impl SolubilityReport {
    /// `|count - s1 - Re(s2)|`.
    pub fn residual(&self) -> f64 {
        (self.count as f64 - self.s1 - self.s2.re).abs()
    }

    pub fn is_exact(&self, tol: f64) -> bool {
        self.residual() < tol && self.s2.im.abs() < tol
    }
}

/// Number of `x ∈ I1` with `x̄ ∈ I2`, and the solution with the least `x`.
pub fn count_solutions(
    i1: &IntInterval,
    i2: &IntInterval,
    p: &PrimeModulus,
) -> Result<(u64, Option<(u64, u64)>)> {
    i1.check_within(p)?;
    i2.check_within(p)?;
    let m = p.get();
    let inv = |x: u64| inv_u64(x, m).expect("interval inside (0, p)");
    if i1.len() <= i2.len() {
        let mut count = 0;
        let mut witness = None;
        for x in i1.iter() {
            let y = inv(x);
            if i2.contains(y) {
                count += 1;
                witness.get_or_insert((x, y));
            }
        }
        Ok((count, witness))
    } else {
        let mut count = 0;
        let mut witness: Option<(u64, u64)> = None;
        for y in i2.iter() {
            let x = inv(y);
            if i1.contains(x) {
                count += 1;
                if witness.is_none_or(|(wx, _)| x < wx) {
                    witness = Some((x, y));
                }
            }
        }
        Ok((count, witness))
    }
}

/// `S_1 = |I1| |I2| / p`.
pub fn main_term(i1: &IntInterval, i2: &IntInterval, p: &PrimeModulus) -> f64 {
    (i1.len() as f64 * i2.len() as f64) / p.get() as f64
}

/// `S_2 = (1/p) sum_{ell=1}^{p-1} (sum_{y ∈ I2} e(-ell y/p)) (sum_{x ∈ I1} e(ell x̄/p))`.
pub fn error_term(i1: &IntInterval, i2: &IntInterval, p: &PrimeModulus) -> Result<ComplexSum> {
    error_term_with(&PhaseTable::new(*p), i1, i2)
}

/// [`error_term`] against a shared table. Cost `O(p |I1|)`.
///
/// The phases `ell x̄ mod p` are advanced by adding `x̄` per step of `ell`, so
/// the inner loop has no modular multiplication.
pub fn error_term_with(
    table: &PhaseTable,
    i1: &IntInterval,
    i2: &IntInterval,
) -> Result<ComplexSum> {
    let p = table.modulus();
    i1.check_within(p)?;
    i2.check_within(p)?;
    let m = p.get();
    let xs: Vec<u64> = i1.iter().collect();
    let inverses = batch_inv_u64(&xs, m)?;
    let mut phases = inverses.clone();
    let one = Complex64::new(1.0, 0.0);
    let mut total = ComplexAccumulator::new();
    for ell in 1..m {
        let x_factor = phases
            .iter()
            .map(|&ph| table.root(ph))
            .collect::<ComplexAccumulator>()
            .value();
        // geometric series over y = lo..=hi of e(-ell y / p)
        let neg = m - ell;
        let start = table.root((neg as u128 * i2.lo() as u128 % m as u128) as u64);
        let span = table.root((neg as u128 * i2.len() as u128 % m as u128) as u64);
        let y_factor = start * (one - span) / (one - table.root(neg));
        total.add(y_factor * x_factor);
        for (ph, &inv) in phases.iter_mut().zip(&inverses) {
            *ph += inv;
            if *ph >= m {
                *ph -= m;
            }
        }
    }
    Ok(total.value() / m as f64)
}

/// Count, main term, error term and witness for one pair.
pub fn solubility_report(
    table: &PhaseTable,
    j: usize,
    i1: &IntInterval,
    i2: &IntInterval,
) -> Result<SolubilityReport> {
    let p = table.modulus();
    let (count, witness) = count_solutions(i1, i2, p)?;
    Ok(SolubilityReport {
        j,
        count,
        s1: main_term(i1, i2, p),
        s2: error_term_with(table, i1, i2)?,
        witness,
    })
}

/// Smallest 1-based `j` whose pair has a solution, with the least-`x` witness.
pub fn family_first_soluble(
    fam: &IntervalPairFamily,
    p: &PrimeModulus,
) -> Result<Option<(usize, (u64, u64))>> {
    let found = fam
        .pairs()
        .par_iter()
        .enumerate()
        .map(|(j, (i1, i2))| count_solutions(i1, i2, p).map(|(_, w)| w.map(|w| (j + 1, w))))
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().next())
}

/// `c p^3 (ln p)^4 / (H^2 K^2)` for real-valued `H`, `K`.
pub fn theorem1_threshold_real(h: f64, k: f64, p: &PrimeModulus, c: f64) -> f64 {
    let pf = p.get() as f64;
    c * pf.powi(3) * p.ln().powi(4) / (h * h * k * k)
}

/// `ceil(c p^3 (ln p)^4 / (H^2 K^2))`, saturating at `u64::MAX`.
pub fn theorem1_threshold(h: u64, k: u64, p: &PrimeModulus, c: f64) -> u64 {
    let v = theorem1_threshold_real(h as f64, k as f64, p, c).ceil();
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

/// Family sizes from the `J >> p^(1/3)`, `H > p^(2/3)`, `K > p^(2/3) (log p)^2` regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorollaryParams {
    pub h: u64,
    pub k: u64,
    pub j: u64,
}

impl CorollaryParams {
    /// `H = ceil(p^(2/3)) + 1`, `K = ceil(p^(2/3) (ln p)^2) + 1`, `J = ceil(p^(1/3))`,
    /// without any feasibility check.
    pub fn from_formulas(p: &PrimeModulus) -> Self {
        let pf = p.get() as f64;
        let two_thirds = pf.powf(2.0 / 3.0);
        Self {
            h: two_thirds.ceil() as u64 + 1,
            k: (two_thirds * p.ln() * p.ln()).ceil() as u64 + 1,
            j: pf.cbrt().ceil() as u64,
        }
    }
}

/// [`CorollaryParams::from_formulas`], rejected when the intervals cannot fit
/// in `(0, p)`: `K > p - 1` or `J H > p - 1`.
pub fn corollary_preset(p: &PrimeModulus) -> Result<CorollaryParams> {
    let c = CorollaryParams::from_formulas(p);
    let room = p.get() - 1;
    if c.k > room {
        return Err(KlabError::InfeasibleGeometry(format!(
            "K = {} exceeds p - 1 = {room} (H = {}, J = {})",
            c.k, c.h, c.j
        )));
    }
    if c.j as u128 * c.h as u128 > room as u128 {
        return Err(KlabError::InfeasibleGeometry(format!(
            "J H = {} * {} exceeds p - 1 = {room} (K = {})",
            c.j, c.h, c.k
        )));
    }
    Ok(c)
}

/// `sum_j |S_2,j|` against `J^(1/2) (ln p) (p ln^2 H)^(1/2)`. Diagnostic only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorAggregate {
    pub sum_abs_s2: f64,
    pub reference: f64,
    pub ratio: f64,
}

pub fn error_aggregate(table: &PhaseTable, fam: &IntervalPairFamily) -> Result<ErrorAggregate> {
    let p = table.modulus();
    let sum_abs_s2: f64 = fam
        .pairs()
        .par_iter()
        .map(|(i1, i2)| error_term_with(table, i1, i2).map(|z| z.norm()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    let log_h = (fam.h().max(2) as f64).ln();
    let reference = (fam.len() as f64).sqrt() * p.ln() * (p.get() as f64 * log_h * log_h).sqrt();
    Ok(ErrorAggregate {
        sum_abs_s2,
        reference,
        ratio: sum_abs_s2 / reference,
    })
}
