//! Exact arithmetic modulo an odd prime below 2^63.
//!
//! Products go through `u128`, so nothing here ever overflows. The bar
//! operator m -> m̄ is computed by the extended Euclidean algorithm.

use std::fmt;

use crate::error::{KlabError, Result};

/// A validated odd prime `3 <= p < 2^63` with its square root and natural log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeModulus {
    p: u64,
    sqrt_p: f64,
    log_p: f64,
}

impl PrimeModulus {
    pub const MAX: u64 = 1 << 63;

    pub fn new(p: u64) -> Result<Self> {
        if !(3..Self::MAX).contains(&p) || !is_prime_u64(p) {
            return Err(KlabError::NotPrime(p));
        }
        let pf = p as f64;
        Ok(Self {
            p,
            sqrt_p: pf.sqrt(),
            log_p: pf.ln(),
        })
    }

    #[inline]
    pub fn get(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn sqrt(&self) -> f64 {
        self.sqrt_p
    }

    /// Natural logarithm of p.
    #[inline]
    pub fn ln(&self) -> f64 {
        self.log_p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, x: i128) -> Residue {
        Residue(x.rem_euclid(self.p as i128) as u64)
    }

    /// Reduces an unsigned integer into `[0, p)`.
    #[inline]
    pub fn residue(&self, x: u64) -> Residue {
        Residue(x % self.p)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.p.fmt(f)
    }
}

/// An integer in `[0, p)` for some prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Residue(u64);

impl Residue {
    pub fn new(value: u64, p: &PrimeModulus) -> Result<Self> {
        if value >= p.get() {
            return Err(KlabError::ResidueOutOfRange { value, p: p.get() });
        }
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[inline]
pub(crate) fn mul_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `(a * b) mod p` with a double-width intermediate.
#[inline]
pub fn mul_mod(a: Residue, b: Residue, p: &PrimeModulus) -> Residue {
    Residue(mul_u64(a.0, b.0, p.get()))
}

/// Inverse of a nonzero integer modulo `m` by the extended Euclidean algorithm.
/// Returns `None` when `gcd(a, m) != 1`.
pub(crate) fn inv_u64(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return None;
    }
    Some(s0.rem_euclid(m as i128) as u64)
}

/// The bar operator: returns ā with `a * ā ≡ 1 (mod p)`.
pub fn inv_mod(a: Residue, p: &PrimeModulus) -> Result<Residue> {
    if a.0.is_multiple_of(p.get()) {
        return Err(KlabError::ZeroNotInvertible { index: 0 });
    }
    inv_u64(a.0, p.get())
        .map(Residue)
        .ok_or(KlabError::ZeroNotInvertible { index: 0 })
}

/// Inverts every element with one extended-Euclid call and `3(n - 1)`
/// multiplications (Montgomery's trick).
pub fn batch_inv(values: &[Residue], p: &PrimeModulus) -> Result<Vec<Residue>> {
    let raw: Vec<u64> = values.iter().map(|r| r.0).collect();
    Ok(batch_inv_u64(&raw, p.get())?
        .into_iter()
        .map(Residue)
        .collect())
}

pub(crate) fn batch_inv_u64(values: &[u64], m: u64) -> Result<Vec<u64>> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    // prefix[i] = v_0 * ... * v_i
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = 1u64;
    for (index, &v) in values.iter().enumerate() {
        if v % m == 0 {
            return Err(KlabError::ZeroNotInvertible { index });
        }
        acc = mul_u64(acc, v, m);
        prefix.push(acc);
    }
    let mut inv_acc = inv_u64(acc, m).ok_or(KlabError::ZeroNotInvertible { index: 0 })?;
    let mut out = vec![0u64; values.len()];
    for i in (1..values.len()).rev() {
        out[i] = mul_u64(inv_acc, prefix[i - 1], m);
        inv_acc = mul_u64(inv_acc, values[i], m);
    }
    out[0] = inv_acc;
    Ok(out)
}

/// Table `t` of length `p` with `t[m] = m̄` for `1 <= m < p` and `t[0] = 0`.
pub fn inverse_table(p: &PrimeModulus) -> Vec<u64> {
    let m = p.get();
    let units: Vec<u64> = (1..m).collect();
    let mut table = Vec::with_capacity(m as usize);
    table.push(0);
    // units never contain 0 mod p
    table.extend(batch_inv_u64(&units, m).expect("units are invertible"));
    table
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_u64(acc, base, m);
        }
        base = mul_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

// First twelve primes: a deterministic witness set for every n < 3.3e24.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin over the full `u64` range.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &q in &MR_WITNESSES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn mul_mod_small() {
        let p = pm(7);
        assert_eq!(mul_mod(Residue(3), Residue(5), &p).value(), 1);
        assert_eq!(mul_mod(Residue(0), Residue(6), &p).value(), 0);
    }

    #[test]
    fn mul_mod_near_2_63_matches_bigint() {
        let m = (1u64 << 63) - 25;
        let p = pm(m);
        let a = Residue::new(1 << 62, &p).unwrap();
        let expected = (BigUint::from(1u64 << 62) * BigUint::from(1u64 << 62)) % BigUint::from(m);
        let got = mul_mod(a, a, &p);
        assert_eq!(BigUint::from(got.value()), expected);
    }

    #[test]
    fn modulus_metadata() {
        let p = pm(10_007);
        assert!((p.sqrt() * p.sqrt() - 10_007.0).abs() <= 2.0 * f64::EPSILON * 10_007.0);
        assert_eq!(p.ln(), (10_007f64).ln());
        assert_eq!(PrimeModulus::new(2), Err(KlabError::NotPrime(2)));
        assert_eq!(PrimeModulus::new(91), Err(KlabError::NotPrime(91)));
        assert!(PrimeModulus::new(1 << 63).is_err());
        assert!(Residue::new(7, &pm(7)).is_err());
    }

    #[test]
    fn inv_mod_examples() {
        let p = pm(7);
        assert_eq!(inv_mod(Residue(3), &p).unwrap().value(), 5);
        assert_eq!(inv_mod(Residue(1), &p).unwrap().value(), 1);
        assert_eq!(
            inv_mod(Residue(0), &p),
            Err(KlabError::ZeroNotInvertible { index: 0 })
        );
    }

    #[test]
    fn inv_mod_large_prime_random() {
        let p = pm(1_000_000_007);
        let mut x = 0x9E37_79B9_7F4A_7C15u64;
        for _ in 0..100 {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = p.residue(x >> 11);
            if a.is_zero() {
                continue;
            }
            let b = inv_mod(a, &p).unwrap();
            assert_eq!(mul_mod(a, b, &p).value(), 1);
        }
    }

    #[test]
    fn batch_inv_examples() {
        let p = pm(7);
        let vals: Vec<Residue> = [1, 2, 3].iter().map(|&v| Residue(v)).collect();
        let inv: Vec<u64> = batch_inv(&vals, &p)
            .unwrap()
            .iter()
            .map(|r| r.value())
            .collect();
        assert_eq!(inv, vec![1, 4, 5]);
        assert!(batch_inv(&[], &p).unwrap().is_empty());
        let bad = [Residue(2), Residue(0), Residue(3)];
        assert_eq!(
            batch_inv(&bad, &p),
            Err(KlabError::ZeroNotInvertible { index: 1 })
        );
    }

    #[test]
    fn batch_inv_full_group_is_permutation() {
        let p = pm(101);
        let vals: Vec<Residue> = (1..101).map(Residue).collect();
        let inv = batch_inv(&vals, &p).unwrap();
        for (v, i) in vals.iter().zip(&inv) {
            assert_eq!(*i, inv_mod(*v, &p).unwrap());
        }
        let mut sorted: Vec<u64> = inv.iter().map(|r| r.value()).collect();
        sorted.sort_unstable();
        assert_eq!(sorted, (1..101).collect::<Vec<_>>());
        let table = inverse_table(&p);
        assert_eq!(table[0], 0);
        assert!(table[1..].iter().zip(&inv).all(|(a, b)| *a == b.value()));
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime_u64(2));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(0));
        // strong pseudoprime to bases 2, 3, 5, 7
        assert!(!trial_division(3_215_031_751));
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        assert!(!is_prime_u64(u64::MAX));
    }

    #[test]
    fn primality_agrees_with_trial_division_to_1e6() {
        // sieve as the oracle; trial division per n would be slow
        let limit = 1_000_000usize;
        let mut sieve = vec![true; limit + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= limit {
            if sieve[i] {
                let mut j = i * i;
                while j <= limit {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        for n in (0..=limit).step_by(997).chain(0..5000) {
            assert_eq!(sieve[n], trial_division(n as u64));
        }
        for (n, &is_p) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(n as u64), is_p, "n = {n}");
        }
    }

    proptest! {
        #[test]
        fn inverse_is_involution_and_unit(a in 1u64..1_000_000_006) {
            let p = pm(1_000_000_007);
            let r = Residue::new(a, &p).unwrap();
            let inv = inv_mod(r, &p).unwrap();
            prop_assert_eq!(mul_mod(r, inv, &p).value(), 1);
            prop_assert_eq!(inv_mod(inv, &p).unwrap(), r);
        }

        #[test]
        fn batch_matches_elementwise(vals in proptest::collection::vec(1u64..10_006, 0..64)) {
            let p = pm(10_007);
            let rs: Vec<Residue> = vals.iter().map(|&v| Residue(v)).collect();
            let batch = batch_inv(&rs, &p).unwrap();
            for (r, b) in rs.iter().zip(batch) {
                prop_assert_eq!(inv_mod(*r, &p).unwrap(), b);
            }
        }

        #[test]
        fn mul_mod_matches_bigint(a in 0u64..(1 << 63) - 25, b in 0u64..(1 << 63) - 25) {
            let m = (1u64 << 63) - 25;
            let p = pm(m);
            let got = mul_mod(Residue(a), Residue(b), &p).value();
            let want = (BigUint::from(a) * BigUint::from(b)) % BigUint::from(m);
            prop_assert_eq!(BigUint::from(got), want);
        }
    }
}
