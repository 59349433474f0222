//! Paratrophic determinants attached to the multiplicative monoid `Z/NZ`.
//!
//! The crate builds the matrices `X_N`, `Y_N`, `Z_N` (and their Bernoulli and
//! tangent-power specializations), block-diagonalizes them with the discrete
//! Fourier, cosine and sine transforms, and assembles their determinants
//! from character-indexed factors. Every assembled value is compared against
//! an independent dense determinant.

pub mod blockfact;
pub mod characters;
pub mod error;
pub mod exactnum;
pub mod matrices;
pub mod par;
pub mod residues;
pub mod specialvalues;

pub use error::{Error, Result};
