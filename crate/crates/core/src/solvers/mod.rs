//! Bounded solutions of linear, semilinear and constant-delay equations.

mod linear;
mod picard;
mod problem;
mod report;
mod residual;

pub use linear::{
    solve_constant, solve_linear_green, solve_scalar_massera, solve_scalar_oscillatory, solve_triangular,
    triangular_estimates, ConstantReport, OscillatoryReport, BOUND_TOL, EIGEN_TOL,
};
pub use picard::{forcing_norm, picard_fixed_point, picard_preconditions, picard_region, PicardOptions};
pub use problem::{Nonlinearity, ProblemSpec};
pub use report::{geometric_rate, FixedPointReport, FixedPointStatus, Preconditions};
pub use residual::residual_check;
