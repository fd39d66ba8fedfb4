//! Explicit tridiagonal representation of the rank-1 double affine Hecke
//! algebra of type (C₁∨, C₁), the orthogonal polynomials it generates on the
//! unit circle and on the interval, and numerical checks of the surrounding
//! identities (Askey–Wilson identification, AW(3) relations, truncations).

pub mod algebra;
pub mod askey_wilson;
pub mod daha;
pub mod error;
pub mod interval;
pub mod operator;
pub mod opuc;
pub mod params;
pub mod suite;
pub mod truncation;

pub use error::{Error, Result};
pub use params::{derive_parameters, Mode, ParameterSet};

/// Crate version, embedded in every artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
