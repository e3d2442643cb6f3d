//! Exact and floating-point calculus of Hermitian metrics on complex projective space.

pub mod ambient;
pub mod error;
pub mod fixtures;
pub mod forms;
pub mod hermitian;
pub mod linalg;
pub mod polyalg;
pub mod quadrature;
pub mod radon;
pub mod scalar;
pub mod variation;
pub mod gauduchon_solve;

pub use error::{Error, Result};
pub use scalar::{Gq, Scalar};
