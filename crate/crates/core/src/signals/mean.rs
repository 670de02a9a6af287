//! Long-horizon ergodic means `M(f) = lim (1/2T) \int_{-T+xi}^{T+xi} f`.
//!
//! The limit is only ever approximated: estimates are computed on an
//! increasing list of horizons and a finite set of offsets, and the report
//! says whether the last two horizons agree and the offsets agree, each to
//! within `tol`. Nothing is silently accepted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ScalarSignal;
use crate::error::{Error, Result};
use crate::quad::{even_steps, simpson_weight};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSettings {
    /// Increasing horizons `T`.
    pub horizons: Vec<f64>,
    /// Offsets `xi`; must contain 0.
    pub offsets: Vec<f64>,
    pub tol: f64,
    /// Simpson step.
    pub dt: f64,
}

impl Default for MeanSettings {
    fn default() -> Self {
        MeanSettings {
            horizons: doubling_horizons(1.0e4, 4),
            offsets: vec![0.0, 1.0, std::f64::consts::E, 10.0],
            tol: 1e-3,
            dt: 0.05,
        }
    }
}

/// `count` horizons ending at `t_max`, each twice the previous one.
pub fn doubling_horizons(t_max: f64, count: usize) -> Vec<f64> {
    (0..count).rev().map(|k| t_max / 2f64.powi(k as i32)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanReport {
    #[serde(with = "crate::io::complex")]
    pub mean: Complex64,
    pub horizons: Vec<f64>,
    /// Estimate at each horizon with `xi = 0`.
    #[serde(with = "crate::io::complex_vec")]
    pub estimates: Vec<Complex64>,
    pub offsets: Vec<f64>,
    /// Estimate at the largest horizon for each offset.
    #[serde(with = "crate::io::complex_vec")]
    pub offset_estimates: Vec<Complex64>,
    /// `|estimate(T_last) - estimate(T_prev)|` at `xi = 0`.
    pub horizon_spread: f64,
    pub uniformity_deviation: f64,
    pub tol: f64,
    pub converged: bool,
}

impl MeanReport {
    /// Error unless the report converged.
    pub fn require_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NotConverged {
                spread: self.horizon_spread,
                uniformity: self.uniformity_deviation,
                tol: self.tol,
            })
        }
    }
}

/// `(1/2T) \int_{-T+xi}^{T+xi} s` by composite Simpson with step close to `dt`.
pub fn window_average(s: &ScalarSignal, horizon: f64, xi: f64, dt: f64) -> Result<Complex64> {
    let n = even_steps(2.0 * horizon, dt).max(2);
    let h = 2.0 * horizon / n as f64;
    let a = xi - horizon;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        acc += s.eval(a + k as f64 * h)? * simpson_weight(k, n + 1);
    }
    Ok(acc * (h / 3.0) / (2.0 * horizon))
}

pub fn ergodic_mean(s: &ScalarSignal, settings: &MeanSettings) -> Result<MeanReport> {
    let MeanSettings {
        horizons,
        offsets,
        tol,
        dt,
    } = settings;
    if horizons.len() < 2 {
        return Err(Error::invalid("ergodic mean needs at least two horizons"));
    }
    if horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] <= 0.0 {
        return Err(Error::invalid("horizons must be positive and strictly increasing"));
    }
    if offsets.len() < 2 || !offsets.contains(&0.0) {
        return Err(Error::invalid("ergodic mean needs at least two offsets including 0"));
    }
    if !(*tol > 0.0) || !(*dt > 0.0) {
        return Err(Error::invalid("tol and dt must be positive"));
    }

    let estimates = horizons
        .iter()
        .map(|&t| window_average(s, t, 0.0, *dt))
        .collect::<Result<Vec<_>>>()?;
    let mean = *estimates.last().expect("two or more horizons");
    let t_last = *horizons.last().expect("two or more horizons");
    let offset_estimates = offsets
        .iter()
        .map(|&xi| {
            if xi == 0.0 {
                Ok(mean)
            } else {
                window_average(s, t_last, xi, *dt)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let horizon_spread = (estimates[estimates.len() - 1] - estimates[estimates.len() - 2]).norm();
    let uniformity_deviation = offset_estimates.iter().map(|e| (e - mean).norm()).fold(0.0, f64::max);
    let converged = horizon_spread < *tol && uniformity_deviation < *tol;

    Ok(MeanReport {
        mean,
        horizons: horizons.clone(),
        estimates,
        offsets: offsets.clone(),
        offset_estimates,
        horizon_spread,
        uniformity_deviation,
        tol: *tol,
        converged,
    })
}
