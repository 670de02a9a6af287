//! Dichotomy projections with certified constants `(c, alpha)` and the Green
//! matrix they define.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EvolutionField;
use crate::error::{Error, Result};
use crate::io::ComplexRepr;
use crate::linalg::{identity, max_abs, reproject, spectral_norm, CMatrix};
use crate::quad::{cumulative, ls_fit};
use crate::signals::{MeanReport, ScalarSignal};

/// Safety margin below `|Re M(mu)|` used by [`scalar_dichotomy_from_mean`].
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Step of the antiderivative used to bound the scalar constant `c`.
const SCALAR_C_STEP: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyMethod {
    ErgodicMean,
    SampledFit,
    UserSupplied,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEstimate", into = "RawEstimate")]
pub struct DichotomyEstimate {
    p: CMatrix,
    pub c: f64,
    pub alpha: f64,
    pub certified_window: f64,
    pub method: DichotomyMethod,
}

#[derive(Serialize, Deserialize)]
struct RawEstimate {
    #[serde(rename = "P")]
    p: Vec<ComplexRepr>,
    c: f64,
    alpha: f64,
    certified_window: f64,
    method: DichotomyMethod,
}

impl TryFrom<RawEstimate> for DichotomyEstimate {
    type Error = Error;

    fn try_from(raw: RawEstimate) -> Result<Self> {
        let dim = (raw.p.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != raw.p.len() {
            return Err(Error::invalid(format!(
                "P must hold a square number of entries, got {}",
                raw.p.len()
            )));
        }
        let entries: Vec<Complex64> = raw.p.into_iter().map(Complex64::from).collect();
        let p = CMatrix::from_row_slice(dim, dim, &entries);
        DichotomyEstimate::new(p, raw.c, raw.alpha, raw.certified_window, raw.method)
    }
}

impl From<DichotomyEstimate> for RawEstimate {
    fn from(d: DichotomyEstimate) -> Self {
        let dim = d.p.nrows();
        let p = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| ComplexRepr::from(d.p[(i, j)]))
            .collect();
        RawEstimate {
            p,
            c: d.c,
            alpha: d.alpha,
            certified_window: d.certified_window,
            method: d.method,
        }
    }
}

impl DichotomyEstimate {
    /// Validates the constants and re-projects `p` so that `P^2 = P`.
    ///
    /// Estimators always return `c >= 1`; a smaller user-supplied `c` is
    /// accepted here and left for the Green-bound checks to reject.
    pub fn new(p: CMatrix, c: f64, alpha: f64, certified_window: f64, method: DichotomyMethod) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!("dichotomy constant c = {c} must be positive")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!(
                "dichotomy exponent alpha = {alpha} must be positive"
            )));
        }
        if !(certified_window >= 0.0) {
            return Err(Error::invalid("certified_window must be non-negative"));
        }
        Ok(DichotomyEstimate {
            p: reproject(&p)?,
            c,
            alpha,
            certified_window,
            method,
        })
    }

    pub fn user_supplied(p: CMatrix, c: f64, alpha: f64, certified_window: f64) -> Result<Self> {
        Self::new(p, c, alpha, certified_window, DichotomyMethod::UserSupplied)
    }

    pub fn projection(&self) -> &CMatrix {
        &self.p
    }

    pub fn complement(&self) -> CMatrix {
        identity(self.dim()) - &self.p
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    /// `c e^{-alpha |t - s|}`.
    pub fn envelope(&self, lag: f64) -> f64 {
        self.c * (-self.alpha * lag.abs()).exp()
    }

    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::new(self.p.clone(), c, self.alpha, self.certified_window, self.method)
    }
}

/// `G(t, s) = Psi(t, s) P` for `t >= s`, `-Psi(t, s)(I - P)` for `t < s`.
pub fn green_matrix(e: &EvolutionField, d: &DichotomyEstimate, t: f64, s: f64) -> Result<CMatrix> {
    let psi = e.evolution(t, s)?;
    if t >= s {
        Ok(psi * d.projection())
    } else {
        Ok(-(psi * d.complement()))
    }
}

/// `max |Psi(t, t0) P - P Psi(t, t0)|` over the given times.
pub fn commutation_residual(e: &EvolutionField, d: &DichotomyEstimate, t0: f64, times: &[f64]) -> Result<f64> {
    let p = d.projection();
    let mut sup = 0.0f64;
    for &t in times {
        let psi = e.evolution(t, t0)?;
        sup = sup.max(max_abs(&(&psi * p - p * &psi)));
    }
    Ok(sup)
}

/// Scalar dichotomy from the sign of `Re M(mu)` with the default 5% margin.
pub fn scalar_dichotomy_from_mean(mu: &ScalarSignal, report: &MeanReport, window: f64) -> Result<DichotomyEstimate> {
    scalar_dichotomy_with_margin(mu, report, window, DEFAULT_MARGIN)
}

/// `alpha = |Re M(mu)| (1 - margin)`; `c` is the sampled sup of
/// `|exp(\int_s^t mu)| e^{alpha |t - s|}` over the ordered pairs of
/// `[0, window]` on the decaying side.
pub fn scalar_dichotomy_with_margin(
    mu: &ScalarSignal,
    report: &MeanReport,
    window: f64,
    margin: f64,
) -> Result<DichotomyEstimate> {
    report.require_converged()?;
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::invalid(format!("margin {margin} must lie in [0, 1)")));
    }
    if !(window > 0.0) {
        return Err(Error::invalid("dichotomy window must be positive"));
    }
    let m = report.mean.re;
    if m.abs() < report.tol {
        return Err(Error::ZeroMean {
            mean: m,
            tol: report.tol,
            row: None,
        });
    }
    let alpha = m.abs() * (1.0 - margin);
    let stable = m < 0.0;
    let n = ((window / SCALAR_C_STEP).ceil() as usize).max(2);
    let h = window / n as f64;
    let r = cumulative(|t| mu.eval(t).map(|z| Complex64::new(z.re, 0.0)), 0.0, h, n)?;
    let mut log_c = 0.0f64;
    if stable {
        // sup_{s <= t} R(t) - R(s) + alpha (t - s)
        let mut low = f64::INFINITY;
        for (k, rk) in r.iter().enumerate() {
            let v = rk.re + alpha * k as f64 * h;
            low = low.min(v);
            log_c = log_c.max(v - low);
        }
    } else {
        // sup_{t < s} R(t) - R(s) + alpha (s - t)
        let mut high = f64::NEG_INFINITY;
        for (k, rk) in r.iter().enumerate() {
            let v = rk.re - alpha * k as f64 * h;
            high = high.max(v);
            log_c = log_c.max(high - v);
        }
    }
    let p = if stable { 1.0 } else { 0.0 };
    DichotomyEstimate::new(
        CMatrix::from_element(1, 1, Complex64::new(p, 0.0)),
        log_c.exp(),
        alpha,
        window,
        DichotomyMethod::ErgodicMean,
    )
}

/// Scans margins `0.05, 0.10, ..., 0.95` and keeps the estimate with the
/// largest `alpha / c`; ties go to the smaller margin.
pub fn scalar_dichotomy_max_ratio(mu: &ScalarSignal, report: &MeanReport, window: f64) -> Result<DichotomyEstimate> {
    let mut best: Option<DichotomyEstimate> = None;
    for k in 1..=19 {
        let margin = 0.05 * k as f64;
        let d = scalar_dichotomy_with_margin(mu, report, window, margin)?;
        let better = match &best {
            None => true,
            Some(b) => d.alpha / d.c > b.alpha / b.c,
        };
        if better {
            best = Some(d);
        }
    }
    Ok(best.expect("at least one margin"))
}

/// Fits `(c, alpha)` to the sampled Green matrix. `alpha` is minus the
/// least-squares slope of the per-lag envelope of `log |G(t, s)|`; `c` is
/// then inflated until the bound holds at every sample.
pub fn estimate_dichotomy(e: &EvolutionField, p: &CMatrix, samples: &[(f64, f64)]) -> Result<DichotomyEstimate> {
    if samples.is_empty() {
        return Err(Error::invalid("estimate_dichotomy needs at least one (t, s) sample"));
    }
    let probe = DichotomyEstimate::new(p.clone(), 1.0, 1.0, 0.0, DichotomyMethod::SampledFit)?;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(samples.len());
    for &(t, s) in samples {
        let g = spectral_norm(&green_matrix(e, &probe, t, s)?);
        points.push(((t - s).abs(), g));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut lags: Vec<f64> = Vec::new();
    let mut logs: Vec<f64> = Vec::new();
    for &(lag, g) in &points {
        if g <= 0.0 {
            continue;
        }
        match lags.last() {
            Some(&last) if (lag - last).abs() <= 1e-9 * lag.max(1.0) => {
                let top = logs.last_mut().expect("paired");
                *top = top.max(g.ln());
            }
            _ => {
                lags.push(lag);
                logs.push(g.ln());
            }
        }
    }
    if lags.len() < 2 {
        return Err(Error::NoDecay { alpha: 0.0 });
    }
    let (slope, _) = ls_fit(&lags, &logs)?;
    let alpha = -slope;
    if !(alpha > 0.0) {
        return Err(Error::NoDecay { alpha });
    }
    let c = points
        .iter()
        .map(|&(lag, g)| g * (alpha * lag).exp())
        .fold(1.0f64, f64::max);
    let certified_window = points.last().map(|x| x.0).unwrap_or(0.0);
    DichotomyEstimate::new(p.clone(), c, alpha, certified_window, DichotomyMethod::SampledFit)
}

/// All ordered pairs of an `n x n` uniform grid over `[t0, t1]^2`.
pub fn square_samples(t0: f64, t1: f64, n: usize) -> Vec<(f64, f64)> {
    let h = if n > 1 { (t1 - t0) / (n - 1) as f64 } else { 0.0 };
    let nodes: Vec<f64> = (0..n).map(|k| t0 + k as f64 * h).collect();
    nodes.iter().flat_map(|&t| nodes.iter().map(move |&s| (t, s))).collect()
}
