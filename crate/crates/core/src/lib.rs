//! Finite-dimensional laboratory for rank-one perturbations of self-adjoint,
//! unitary, contractive and dissipative operators, their spectral measures,
//! Cauchy-type singular integrals and functional models.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cauchy;
pub mod clark;
pub mod error;
pub mod halfplane;
pub mod harness;
pub mod linalg;
pub mod measure;
pub mod model;
pub mod perturbation;
pub mod representation;
pub mod sio;

pub use error::{Error, Result};
pub use measure::{Atom, DensityGrid, Measure, Support};
