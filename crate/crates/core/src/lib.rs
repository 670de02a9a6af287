//! Bounded almost-automorphic solutions of nonautonomous linear, nonlinear and
//! constant-delay differential equations, built from exponential dichotomies
//! and Green-operator fixed-point iteration.

pub mod dichotomy;
pub mod error;
pub mod greenop;
pub mod io;
pub mod lasota;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod signals;
pub mod solvers;

pub use error::{Error, Result};
