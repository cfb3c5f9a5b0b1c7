//! Moment dynamics, combinatorics and simulation of the free Jacobi process
//! built from sums of free unitary Brownian motions.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod generating_functions;
pub mod matrix_sim;
pub mod moment_dynamics;
pub mod scalar;
pub mod word_algebra;

pub use error::{Error, Result};
