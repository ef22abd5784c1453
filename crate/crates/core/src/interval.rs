use std::fmt;

use crate::error::{KlabError, Result};
use crate::modarith::PrimeModulus;

/// The integer set `{lo, ..., hi}` with `1 <= lo <= hi`.
///
/// Containment in `(0, p)` depends on the modulus and is checked by the
/// operations that need it (see [`IntInterval::check_within`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntInterval {
    lo: u64,
    hi: u64,
}

#[allow(clippy::len_without_is_empty)]
impl IntInterval {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(KlabError::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `{start, ..., start + len - 1}`.
    pub fn with_len(start: u64, len: u64) -> Result<Self> {
        if len == 0 {
            return Err(KlabError::InvalidInterval {
                lo: start,
                hi: start,
            });
        }
        Self::new(start, start + len - 1)
    }

    /// `{1, ..., p - 1}`.
    pub fn full(p: &PrimeModulus) -> Self {
        Self {
            lo: 1,
            hi: p.get() - 1,
        }
    }

    #[inline]
    pub fn lo(&self) -> u64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Cardinality `hi - lo + 1`.
    #[inline]
    pub fn len(&self) -> u64 {
        self.hi - self.lo + 1
    }

    #[inline]
    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &IntInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn check_within(&self, p: &PrimeModulus) -> Result<()> {
        if self.hi >= p.get() {
            return Err(KlabError::IntervalOutOfRange {
                lo: self.lo,
                hi: self.hi,
                p: p.get(),
            });
        }
        Ok(())
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for IntInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}
