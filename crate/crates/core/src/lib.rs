//! Complex-valued neural networks trained in a single complex channel,
//! with simulators for two optical realizations of the learned weights:
//! Mach-Zehnder interferometer meshes and diffractive layers.

pub mod backprop;
pub mod cnet;
pub mod error;
pub mod linalg;
pub mod photonic;
pub mod tasks;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use num_complex::Complex64;
