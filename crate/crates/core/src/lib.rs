//! Numerical core: finite-difference spectra of fermions scattering off a
//! static impurity, Slater-determinant overlaps and their power-law decay,
//! metastable-state kinetics, and Townsend avalanche Monte Carlo.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod avalanche;
pub mod error;
pub mod fit;
pub mod grid;
pub mod kinetics;
pub mod linalg;
pub mod overlap;
pub mod spectral;
pub mod tridiag;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
