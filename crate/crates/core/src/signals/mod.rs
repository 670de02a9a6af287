//! Closed-form coefficient signals, their samples on uniform grids, ergodic
//! means and recurrence diagnostics.
//!
//! Every type here is immutable after construction and every operation is a
//! pure function, so signals can be shared freely across threads.

mod expr;
mod grid;
mod matrix;
mod mean;
mod recurrence;

pub use expr::{ScalarSignal, TrigKind, UnaryMap, EPS_DIV};
pub use grid::{sample, sample_window, GridFunction, Samplable, Window};
pub use matrix::{MatrixSignal, Structure};
pub use mean::{doubling_horizons, ergodic_mean, window_average, MeanReport, MeanSettings};
pub use recurrence::{
    bounded_antiderivative_check, bounded_antiderivative_check_with_step, growth_report, running_max_slope,
    shift_deviation, shift_grid, translation_recurrence_test, AntiderivativeReport, CandidateDeviation, GrowthReport,
    RecurrenceReport,
};
