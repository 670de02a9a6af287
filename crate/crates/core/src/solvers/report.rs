use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedPointStatus {
    Converged,
    MaxIter,
    PreconditionFailed,
}

/// The two contraction preconditions with the numbers behind each verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Preconditions {
    #[serde(rename = "precondition_4cL")]
    pub precondition_4cl: bool,
    pub precondition_f: bool,
    /// `4 c L`.
    #[serde(rename = "four_c_L")]
    pub four_c_l: f64,
    pub alpha: f64,
    pub f_norm: f64,
    /// `alpha rho / (2c)`.
    pub f_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub iterations: usize,
    /// `|phi_{k+1} - phi_k|_inf` per iteration.
    pub residual_history: Vec<f64>,
    /// `2 c L / alpha`.
    pub apriori_rate: f64,
    /// Geometric fit of `residual_history`.
    pub measured_rate: f64,
    pub preconditions: Preconditions,
    pub status: FixedPointStatus,
}

/// Geometric rate `r` from a least-squares fit of `ln residual_k ~ a + k ln r`
/// over the strictly positive entries. Returns 0 when fewer than two remain.
pub fn geometric_rate(residuals: &[f64]) -> f64 {
    let (xs, ys): (Vec<f64>, Vec<f64>) = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0 && r.is_finite())
        .map(|(k, r)| (k as f64, r.ln()))
        .unzip();
    if xs.len() < 2 {
        return 0.0;
    }
    crate::quad::ls_slope(&xs, &ys).map(f64::exp).unwrap_or(0.0)
}
