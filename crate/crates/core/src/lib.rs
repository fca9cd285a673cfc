//! ℓ¹-TV compressed sensing: recovery of signals that are both sparse and
//! piecewise constant from few linear measurements.

pub mod bounds;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod prox;
pub mod rng;
pub mod signals;
pub mod solvers;
pub mod unrolled;

pub use error::{Error, Result};
