//! Shared fixtures for the kernel benchmarks.

use klab::family::SeededRng;
use klab::{IntInterval, PrimeModulus, Residue};

pub const SEED: u64 = 0x6b6c_6162;

pub fn prime(p: u64) -> PrimeModulus {
    PrimeModulus::new(p).expect("benchmark modulus must be prime")
}

/// `count` nonzero residues drawn from a fixed stream.
pub fn random_residues(p: &PrimeModulus, count: usize) -> Vec<Residue> {
    let mut rng = SeededRng::new(SEED);
    (0..count)
        .map(|_| Residue::new(rng.between(1, p.get() - 1), p).unwrap())
        .collect()
}

/// A pair of intervals of lengths `h` and `k` at fixed random offsets.
pub fn interval_pair(p: &PrimeModulus, h: u64, k: u64) -> (IntInterval, IntInterval) {
    let mut rng = SeededRng::new(SEED ^ h ^ (k << 32));
    let room = p.get() - 1;
    let a = IntInterval::with_len(1 + rng.below(room - h + 1), h).unwrap();
    let b = IntInterval::with_len(1 + rng.below(room - k + 1), k).unwrap();
    (a, b)
}
