//! Additive characters, complete Kloosterman sums and incomplete sums
//! `S(n, H) = sum_{m = n+1, m != 0 mod p}^{n+H} e(ell * m̄ / p)`.
//!
//! Every phase is reduced modulo p in integers before it is converted to
//! floating point, so `e(x/p)` never sees an argument larger than one turn.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::accum::{pairwise_sum, ComplexAccumulator};
use crate::error::{KlabError, Result};
use crate::interval::IntInterval;
use crate::modarith::{inv_u64, inverse_table, mul_u64, PrimeModulus, Residue};

pub type ComplexSum = Complex64;

/// Sliding windows are recomputed from scratch every this many steps.
pub const RESUM_INTERVAL: u64 = 1 << 16;

/// Windows longer than this are summed pairwise instead of sequentially.
pub const PAIRWISE_THRESHOLD: u64 = 1 << 20;

/// Tolerance on the imaginary part of a complete sum, relative to p.
pub const REALNESS_TOLERANCE: f64 = 1e-6;

/// The twist `ell` together with its modulus; `ell` is a unit mod p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumSpec {
    ell: Residue,
    p: PrimeModulus,
}

impl SumSpec {
    pub fn new(ell: u64, p: PrimeModulus) -> Result<Self> {
        if ell == 0 || ell >= p.get() {
            return Err(KlabError::InvalidTwist { ell, p: p.get() });
        }
        Ok(Self {
            ell: p.residue(ell),
            p,
        })
    }

    #[inline]
    pub fn ell(&self) -> u64 {
        self.ell.value()
    }

    #[inline]
    pub fn modulus(&self) -> &PrimeModulus {
        &self.p
    }
}

/// The window `{n+1, ..., n+H}`; `n` is stored reduced mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    n: u64,
    h: u64,
}

impl WindowSpec {
    pub fn new(n: u64, h: u64, p: &PrimeModulus) -> Result<Self> {
        if h == 0 {
            return Err(KlabError::InvalidWindow {
                h,
                min: 1,
                max: u64::MAX,
            });
        }
        Ok(Self { n: n % p.get(), h })
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn h(&self) -> u64 {
        self.h
    }

    /// Number of nonzero residues the window actually sums over.
    pub fn term_count(&self, p: &PrimeModulus) -> u64 {
        let p = p.get();
        // multiples of p in (n, n + h]
        let zeros = (self.n as u128 + self.h as u128) / p as u128 - self.n as u128 / p as u128;
        self.h - zeros as u64
    }
}

#[inline]
fn unit_root(k: u64, p: u64) -> Complex64 {
    let (s, c) = (TAU * (k as f64 / p as f64)).sin_cos();
    Complex64::new(c, s)
}

/// `e(x/p) = exp(2 pi i x / p)`.
pub fn e_p(x: i128, p: &PrimeModulus) -> ComplexSum {
    unit_root(p.reduce(x).value(), p.get())
}

/// `2 sqrt(p)`, the bound on `|K(ell, a; p)|` for `p ∤ ell a`.
pub fn weil_complete_bound(p: &PrimeModulus) -> f64 {
    2.0 * p.sqrt()
}

/// `2 (1 + ln p) sqrt(p)`, the bound on `|S(n, H)|` for every n and H.
pub fn weil_incomplete_bound(p: &PrimeModulus) -> f64 {
    2.0 * (1.0 + p.ln()) * p.sqrt()
}

/// `|sum_{h=1}^{H} e(a h / p)|^2`, in closed form `sin^2(pi a H/p) / sin^2(pi a/p)`.
pub fn geometric_modulus_sq(a: u64, h: u64, p: &PrimeModulus) -> f64 {
    let m = p.get();
    let a = a % m;
    if a == 0 {
        return (h as f64) * (h as f64);
    }
    let ah = mul_u64(a, h % m, m);
    let num = (PI * (ah as f64 / m as f64)).sin();
    let den = (PI * (a as f64 / m as f64)).sin();
    (num * num) / (den * den)
}

/// Precomputed inverses and roots of unity for one prime.
///
/// Holds `2p` words, so it is meant for primes up to a few times 10^7.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    p: PrimeModulus,
    inverses: Vec<u64>,
    roots: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(p: PrimeModulus) -> Self {
        let m = p.get();
        let inverses = inverse_table(&p);
        let roots = (0..m).into_par_iter().map(|k| unit_root(k, m)).collect();
        Self { p, inverses, roots }
    }

    #[inline]
    pub fn modulus(&self) -> &PrimeModulus {
        &self.p
    }

    /// `m̄` for `m` not divisible by p, and 0 otherwise.
    #[inline]
    pub fn inverse(&self, m: u64) -> u64 {
        self.inverses[(m % self.p.get()) as usize]
    }

    /// `e(k/p)` for any `k`.
    #[inline]
    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.p.get()) as usize]
    }

    /// `e(ell m̄ / p)`, or 0 when `m ≡ 0`.
    #[inline]
    pub fn term(&self, ell: u64, m: u64) -> Complex64 {
        let m = m % self.p.get();
        if m == 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.roots[mul_u64(ell, self.inverses[m as usize], self.p.get()) as usize]
    }

    /// `S(n, h)` summed from scratch.
    pub fn window_sum(&self, ell: u64, n: u64, h: u64) -> ComplexSum {
        let term = |m: u64| self.term(ell, m);
        if h > PAIRWISE_THRESHOLD {
            pairwise_sum(n + 1, n + 1 + h, &term)
        } else {
            (n + 1..=n + h)
                .map(term)
                .collect::<ComplexAccumulator>()
                .value()
        }
    }

    /// `K(a, b; p) = sum_{x=1}^{p-1} e((a x + b x̄)/p)`.
    pub fn kloosterman(&self, a: u64, b: u64) -> Result<f64> {
        let m = self.p.get();
        let (a, b) = (a % m, b % m);
        let acc: ComplexAccumulator = (1..m)
            .map(|x| {
                let phase = (mul_u64(a, x, m) + mul_u64(b, self.inverses[x as usize], m)) % m;
                self.roots[phase as usize]
            })
            .collect();
        let z = acc.value();
        if z.im.abs() >= REALNESS_TOLERANCE * m as f64 {
            return Err(KlabError::NonRealAccumulation {
                a,
                b,
                p: m,
                imag: z.im,
            });
        }
        Ok(z.re)
    }

    /// `S(n, h)` for every `n = 1..=p`; entry `n - 1` holds `S(n mod p, h)`.
    ///
    /// Blocks of [`RESUM_INTERVAL`] consecutive starts are seeded by a
    /// from-scratch window sum and advanced by `S(n+1) = S(n) - term(n+1) + term(n+1+h)`.
    /// The block layout is fixed, so the output does not depend on thread count.
    pub fn all_windows(&self, ell: u64, h: u64) -> Result<Vec<ComplexSum>> {
        let m = self.p.get();
        if h == 0 || h > m {
            return Err(KlabError::InvalidWindow { h, min: 1, max: m });
        }
        let ell = ell % m;
        let mut out = vec![Complex64::new(0.0, 0.0); m as usize];
        out.par_chunks_mut(RESUM_INTERVAL as usize)
            .enumerate()
            .for_each(|(block, chunk)| {
                let first = 1 + block as u64 * RESUM_INTERVAL;
                let mut acc = ComplexAccumulator::new();
                acc.add(self.window_sum(ell, first, h));
                chunk[0] = acc.value();
                for (i, slot) in chunk.iter_mut().enumerate().skip(1) {
                    let n = first + i as u64 - 1;
                    acc.sub(self.term(ell, n + 1));
                    acc.add(self.term(ell, n + 1 + h));
                    *slot = acc.value();
                }
            });
        Ok(out)
    }
}

/// Complete Kloosterman sum `K(a, b; p)`, returned as a real number.
pub fn kloosterman_complete(a: Residue, b: Residue, p: &PrimeModulus) -> Result<f64> {
    PhaseTable::new(*p).kloosterman(a.value(), b.value())
}

/// `S(n, H)` by direct summation: one extended-Euclid inverse and one
/// `sin_cos` per term.
pub fn incomplete_kloosterman(spec: &SumSpec, w: &WindowSpec) -> ComplexSum {
    let m = spec.p.get();
    let ell = spec.ell();
    let term = |x: u64| {
        let r = x % m;
        if r == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let inv = inv_u64(r, m).expect("nonzero residue mod prime");
        unit_root(mul_u64(ell, inv, m), m)
    };
    let (start, end) = (w.n + 1, w.n + 1 + w.h);
    if w.h > PAIRWISE_THRESHOLD {
        pairwise_sum(start, end, &term)
    } else {
        (start..end)
            .map(term)
            .collect::<ComplexAccumulator>()
            .value()
    }
}

/// `sum_{n in I} e(ell n̄ / p)` for an interval inside `(0, p)`.
pub fn interval_sum(spec: &SumSpec, interval: &IntInterval) -> Result<ComplexSum> {
    interval.check_within(&spec.p)?;
    let w = WindowSpec::new(interval.lo() - 1, interval.len(), &spec.p)?;
    Ok(incomplete_kloosterman(spec, &w))
}

/// `S(n, H)` for all `n = 1..=p` (entry `n - 1`), in O(p) work.
pub fn all_windows(spec: &SumSpec, h: u64) -> Result<Vec<ComplexSum>> {
    PhaseTable::new(spec.p).all_windows(spec.ell(), h)
}
