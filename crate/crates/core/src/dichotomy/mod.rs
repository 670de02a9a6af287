//! Evolution operators, exponential dichotomies and the Green matrix.
//!
//! An [`EvolutionField`] caches its window transitions at construction and
//! is read-only afterwards.

mod diagnostics;
mod estimate;
mod evolution;

pub use diagnostics::{bi_ap_deviation, integral_bi_aa_probe, verify_identity_lemma, BiAaReport, BiApReport};
pub use estimate::{
    commutation_residual, estimate_dichotomy, green_matrix, scalar_dichotomy_from_mean, scalar_dichotomy_max_ratio,
    scalar_dichotomy_with_margin, square_samples, DichotomyEstimate, DichotomyMethod, DEFAULT_MARGIN,
};
pub use evolution::{EvolutionField, EvolutionOptions};
