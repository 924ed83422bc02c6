//! Numerical workbench for multi-parameter singular integrals on discrete tori.
//!
//! The crate is organized around five building blocks:
//!
//! - [`lattice`]: complex fields on a multi-parameter discrete torus,
//!   unitary Fourier transforms, inner products and (de)serialization.
//! - [`multiplier`]: convolution-type operators given by frequency symbols
//!   (Hilbert, Riesz, cone projections, mollified cones, tensor products).
//! - [`zonal`]: zonal harmonics on spheres, expansion of odd cone profiles
//!   and synthesis of product-type cone multipliers from them.
//! - [`dyadic`]: Haar analysis, product/little/mixed BMO norms, dyadic
//!   shifts and paraproducts.
//! - [`commutator`]: iterated commutators with symbol multiplication,
//!   operator-norm estimation, opposing-support test functions and the
//!   bilinear form dual to iterated commutators.

pub mod commutator;
pub mod dyadic;
pub mod lattice;
pub mod multiplier;
pub mod zonal;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid spec mismatch between operands")]
    SpecMismatch,
    #[error("non-finite sample at flat index {0}")]
    NonFinite(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("quadrature did not converge: residual {residual:.3e} > {tol:.3e}")]
    QuadratureResidual { residual: f64, tol: f64 },
    #[error("empty frequency support: {0}")]
    EmptySupport(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
