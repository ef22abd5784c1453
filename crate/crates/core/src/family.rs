//! Seeded generation of interval families.
//!
//! All randomness comes from Xoshiro256++ seeded through SplitMix64
//! (`rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`). Bounded draws use
//! plain rejection sampling on `next_u64`, so a port only needs those two
//! published generators to reproduce every family bit for bit.

use std::fmt;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{KlabError, Result};
use crate::interval::IntInterval;
use crate::meanvalue::DisjointFamily;
use crate::modarith::PrimeModulus;
use crate::solver::IntervalPairFamily;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `tags` into `seed`, giving every sweep cell its own stream.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(mix64(seed), |acc, &t| mix64(acc ^ t))
}

#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, n)`; `n > 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let limit = u64::MAX - u64::MAX % n;
        loop {
            let x = self.0.next_u64();
            if x < limit {
                return x % n;
            }
        }
    }

    /// Uniform in `[lo, hi]`.
    pub fn between(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    /// `count` distinct values from `[lo, hi]` in ascending order
    /// (partial Fisher-Yates over the range).
    pub fn sample_distinct(&mut self, lo: u64, hi: u64, count: usize) -> Vec<u64> {
        let mut pool: Vec<u64> = (lo..=hi).collect();
        let count = count.min(pool.len());
        for i in 0..count {
            let r = i + self.below((pool.len() - i) as u64) as usize;
            pool.swap(i, r);
        }
        pool.truncate(count);
        pool.sort_unstable();
        pool
    }

    /// `count` nondecreasing values in `[0, slack]`: the cumulative gaps
    /// placed before each of `count` intervals.
    fn sorted_cuts(&mut self, count: usize, slack: u64) -> Vec<u64> {
        let mut cuts: Vec<u64> = (0..count).map(|_| self.below(slack + 1)).collect();
        cuts.sort_unstable();
        cuts
    }
}

/// Placement of the first intervals of a pair family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GenMode {
    /// Uniformly random gaps between consecutive intervals.
    RandomDisjoint,
    /// Interval j starts at `(j-1) floor((p-1)/J) + 1`.
    EquallySpaced,
    /// All intervals packed back to back at a random offset.
    AdversarialClustered,
}

impl GenMode {
    pub const ALL: [GenMode; 3] = [
        GenMode::RandomDisjoint,
        GenMode::EquallySpaced,
        GenMode::AdversarialClustered,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GenMode::RandomDisjoint => "random-disjoint",
            GenMode::EquallySpaced => "equally-spaced",
            GenMode::AdversarialClustered => "adversarial-clustered",
        }
    }
}

impl fmt::Display for GenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GenMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        GenMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown generator mode `{s}`"))
    }
}

/// Largest J for which J disjoint intervals of size H fit in `(0, p)`.
pub fn max_family_size(p: &PrimeModulus, h: u64) -> u64 {
    (p.get() - 1) / h.max(1)
}

fn check_fit(p: &PrimeModulus, h: u64, j: u64) -> Result<()> {
    if h == 0 || j == 0 {
        return Err(KlabError::InvalidFamily(format!(
            "H = {h} and J = {j} must be positive"
        )));
    }
    if j as u128 * h as u128 > (p.get() - 1) as u128 {
        return Err(KlabError::InfeasibleGeometry(format!(
            "J H = {j} * {h} exceeds p - 1 = {}",
            p.get() - 1
        )));
    }
    Ok(())
}

/// J pairs with `|I1| = H`, `|I2| = K`, disjoint `I1`'s placed by `mode`,
/// and each `I2` at a uniformly random position.
pub fn generate_family(
    p: &PrimeModulus,
    h: u64,
    k: u64,
    j: u64,
    seed: u64,
    mode: GenMode,
) -> Result<IntervalPairFamily> {
    check_fit(p, h, j)?;
    let room = p.get() - 1;
    if k == 0 || k > room {
        return Err(KlabError::InfeasibleGeometry(format!(
            "K = {k} must lie in [1, p - 1 = {room}]"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let slack = room - j * h;
    let starts: Vec<u64> = match mode {
        GenMode::EquallySpaced => {
            let stride = room / j;
            (0..j).map(|i| i * stride + 1).collect()
        }
        GenMode::RandomDisjoint => rng
            .sorted_cuts(j as usize, slack)
            .into_iter()
            .enumerate()
            .map(|(i, cut)| 1 + i as u64 * h + cut)
            .collect(),
        GenMode::AdversarialClustered => {
            let s = 1 + rng.below(slack + 1);
            (0..j).map(|i| s + i * h).collect()
        }
    };
    let mut pairs = Vec::with_capacity(j as usize);
    for start in starts {
        let i1 = IntInterval::with_len(start, h)?;
        let i2 = IntInterval::with_len(1 + rng.below(room - k + 1), k)?;
        pairs.push((i1, i2));
    }
    IntervalPairFamily::new(pairs, h, k, p)
}

/// J disjoint intervals with sizes drawn uniformly from `(H/2, H]` and
/// random gaps.
pub fn generate_disjoint_family(
    p: &PrimeModulus,
    h: u64,
    j: u64,
    seed: u64,
) -> Result<DisjointFamily> {
    check_fit(p, h, j)?;
    let mut rng = SeededRng::new(seed);
    let lens: Vec<u64> = (0..j).map(|_| rng.between(h / 2 + 1, h)).collect();
    let slack = p.get() - 1 - lens.iter().sum::<u64>();
    let cuts = rng.sorted_cuts(j as usize, slack);
    let mut intervals = Vec::with_capacity(j as usize);
    let mut used = 0u64;
    for (len, cut) in lens.into_iter().zip(cuts) {
        intervals.push(IntInterval::with_len(1 + used + cut, len)?);
        used += len;
    }
    DisjointFamily::new(intervals, h, p)
}
