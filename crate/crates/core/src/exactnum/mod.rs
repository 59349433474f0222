//! Exact rational combinatorics and the managed-precision numeric layer.

pub mod bernoulli;
pub mod cyclotomic;
pub mod hp;

pub use bernoulli::{
    bernoulli_number, bernoulli_poly, coeff_a, coeff_big_a, euler_poly, fract, norlund_poly,
    periodic_bernoulli,
};
pub use cyclotomic::{CycloSum, CycloVec, Turn};
pub use hp::{float_to_decimal, pi, HpContext, HpValue, CHECK_EXTRA_BITS, MIN_PRECISION};
pub use rug::{Float, Integer, Rational};

/// Exact rational carrier used throughout the crate.
pub type BigRational = rug::Rational;
