//! The tridiagonal representation: coefficients, reflections `R₁..R₄`,
//! generators `T₁..T₄`, and verification of the defining relations.

pub mod build;
pub mod coefficients;
pub mod verify;

pub use build::{
    build_reflection, build_reflection_opts, build_t, build_t_opts, symmetrize, BuildOptions,
    HeckeGenerator, Reflection, Representation,
};
pub use coefficients::{coeff_a, coeff_alpha, RepCoefficients};
pub use verify::{
    verify_derivation_system, verify_involutions, verify_product_relation, DerivationReport,
    InvolutionReport, ProductReport,
};
