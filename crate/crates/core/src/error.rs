use thiserror::Error;

/// Errors raised by the arithmetic, summation and solving layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KlabError {
    #[error("{0} is not an odd prime below 2^63")]
    NotPrime(u64),

    #[error("residue {value} is not reduced modulo {p}")]
    ResidueOutOfRange { value: u64, p: u64 },

    /// `index` is the position of the offending value in a batch, 0 for single inversions.
    #[error("value at index {index} is 0 mod p and has no inverse")]
    ZeroNotInvertible { index: usize },

    #[error("twist {ell} is not a unit modulo {p}")]
    InvalidTwist { ell: u64, p: u64 },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: u64, hi: u64 },

    #[error("interval [{lo}, {hi}] is not contained in (0, {p})")]
    IntervalOutOfRange { lo: u64, hi: u64, p: u64 },

    #[error("window length {h} must satisfy {min} <= H <= {max}")]
    InvalidWindow { h: u64, min: u64, max: u64 },

    #[error("complete sum K({a},{b};{p}) accumulated imaginary part {imag:e}")]
    NonRealAccumulation { a: u64, b: u64, p: u64, imag: f64 },

    #[error("bound 2^12 p log^2 H is degenerate at H = {h} (needs H >= 2)")]
    DegenerateBound { h: u64 },

    #[error("k = {k} must satisfy 1 <= k <= 2H = {two_h}")]
    InvalidK { k: u64, two_h: u64 },

    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("family violates its hypotheses: {0}")]
    InvalidFamily(String),
}

pub type Result<T> = std::result::Result<T, KlabError>;
