//! Random noble means substitutions.
//!
//! The rules `zeta_{m,i}: a -> a^i b a^{m-i}, b -> a` for `0 <= i <= m`,
//! mixed locally with probabilities `(p_0, ..., p_m)`. The crate covers
//! random word generation, legal words and complexity, generation sets and
//! topological entropy, subword frequencies from induced substitution
//! matrices, exact geometry in `Z[lambda_m]`, and the diffraction of the
//! random Fibonacci case (`m = 1`).

pub mod diffraction;
pub mod entropy;
pub mod error;
pub mod family;
pub mod geometry;
pub mod induced;
pub mod legal;
pub mod rng;
pub mod substitution;
pub mod word;

pub use error::{Error, Result};
pub use family::{NobleMeans, ProbabilityVector};
pub use rng::RandomSource;
pub use word::{Letter, Word};
