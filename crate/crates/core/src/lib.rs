//! Complete and incomplete Kloosterman sums modulo a prime, with numerical
//! checks of their mean-value bounds and a solver for `xy ≡ 1 (mod p)` over
//! families of short intervals.
//!
//! * [`modarith`]: exact arithmetic mod p, inverses, primality.
//! * [`expsums`]: `e(x/p)`, `K(a,b;p)`, `S(n,H)` and the all-windows sweep.
//! * [`meanvalue`]: second-moment bounds, the spectral identity, dyadic plans.
//! * [`solver`]: solution counts and their main/error-term split.
//! * [`family`]: seeded interval-family generators.
//! * [`harness`]: configuration and output for command-line sweeps.

pub mod accum;
pub mod error;
pub mod expsums;
pub mod family;
pub mod harness;
pub mod interval;
pub mod meanvalue;
pub mod modarith;
pub mod solver;

pub use error::{KlabError, Result};
pub use expsums::{ComplexSum, PhaseTable, SumSpec, WindowSpec};
pub use family::GenMode;
pub use interval::IntInterval;
pub use meanvalue::{DisjointFamily, DyadicPlan, MeanValueReport};
pub use modarith::{PrimeModulus, Residue};
pub use solver::{IntervalPairFamily, SolubilityReport};
