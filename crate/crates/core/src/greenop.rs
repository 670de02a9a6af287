//! Exponential convolutions and the Green operator
//! `(Gamma phi)(t) = \int G(t, s) phi(s) ds`, with truncated improper
//! integrals.
//!
//! Outputs live on the input grid shrunk by the truncation length on each
//! side that carries a tail; nothing is extrapolated.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dichotomy::{DichotomyEstimate, EvolutionField};
use crate::error::{Error, Result};
use crate::linalg::{is_identity, is_zero, CMatrix, CVector};
use crate::quad::{even_steps, simpson_weight};
use crate::signals::GridFunction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub tol: f64,
    #[serde(rename = "T_max")]
    pub t_max: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tol: 1e-8,
            t_max: 100.0,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tol: f64, t_max: f64) -> Result<Self> {
        if !(tol > 0.0) || !(t_max > 0.0) {
            return Err(Error::invalid("truncation tol and T_max must be positive"));
        }
        Ok(TruncationPolicy { tol, t_max })
    }

    /// `T = min(T_max, ln(c M / (alpha tol)) / alpha)`, clamped at 0, so that
    /// `c M e^{-alpha T} / alpha <= tol` unless `T_max` binds.
    pub fn length(&self, c: f64, alpha: f64, m: f64) -> f64 {
        if m <= 0.0 {
            return 0.0;
        }
        let arg = c * m / (alpha * self.tol);
        if arg <= 1.0 {
            return 0.0;
        }
        (arg.ln() / alpha).min(self.t_max)
    }

    /// Tail bound `c M e^{-alpha T} / alpha` for a given truncation length.
    pub fn tail(&self, c: f64, alpha: f64, m: f64, length: f64) -> f64 {
        c * m * (-alpha * length).exp() / alpha
    }
}

fn shrink_check(len: usize, left: usize, right: usize) -> Result<()> {
    if len < left + right + 2 {
        return Err(Error::WindowTooShort {
            needed: left + right + 2,
            available: len,
        });
    }
    Ok(())
}

fn conv_exp(phi: &GridFunction, alpha: f64, policy: &TruncationPolicy, forward: bool) -> Result<GridFunction> {
    if !(alpha > 0.0) {
        return Err(Error::invalid("convolution rate alpha must be positive"));
    }
    let dt = phi.dt();
    let m = phi.sup_norm();
    let n_t = even_steps(policy.length(1.0, alpha, m), dt);
    let len = phi.len();
    shrink_check(len, if forward { n_t } else { 0 }, if forward { 0 } else { n_t })?;
    let dim = phi.dim();
    let kernel: Vec<f64> = (0..=n_t)
        .map(|k| (-alpha * k as f64 * dt).exp() * simpson_weight(k, n_t + 1) * dt / 3.0)
        .collect();
    let out_len = len - n_t;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len * dim];
    for j in 0..out_len {
        // Output time index in the input grid.
        let jj = if forward { j + n_t } else { j };
        if n_t == 0 {
            continue;
        }
        for (k, w) in kernel.iter().enumerate() {
            let src = if forward { jj - k } else { jj + k };
            let v = phi.value(src);
            for i in 0..dim {
                out[j * dim + i] += v[i] * *w;
            }
        }
    }
    let t0 = if forward { phi.time(n_t) } else { phi.t0() };
    GridFunction::new(t0, dt, dim, out)
}

/// `(L1 phi)(t) = \int_{t-T}^{t} e^{-alpha (t - s)} phi(s) ds`.
pub fn conv_exp_minus(phi: &GridFunction, alpha: f64, policy: &TruncationPolicy) -> Result<GridFunction> {
    conv_exp(phi, alpha, policy, true)
}

/// `(L2 phi)(t) = \int_{t}^{t+T} e^{alpha (t - s)} phi(s) ds`.
pub fn conv_exp_plus(phi: &GridFunction, alpha: f64, policy: &TruncationPolicy) -> Result<GridFunction> {
    conv_exp(phi, alpha, policy, false)
}

/// Step transitions of one evolution field on one grid, prepared for
/// repeated applications of the Green operator.
///
/// The stable part is accumulated from the left end of the grid and the
/// unstable part from the right end, each by Simpson recursion over two
/// parity chains. Each step is multiplied by the projection it acts on, so
/// the projection is assumed to commute with the evolution.
#[derive(Clone, Debug)]
pub struct GreenKernel {
    t0: f64,
    dt: f64,
    len: usize,
    dim: usize,
    p: CMatrix,
    q: CMatrix,
    stable: Option<Vec<CMatrix>>,
    unstable: Option<Vec<CMatrix>>,
}

impl GreenKernel {
    pub fn new(e: &EvolutionField, d: &DichotomyEstimate, t0: f64, dt: f64, len: usize) -> Result<Self> {
        if e.dim() != d.dim() {
            return Err(Error::invalid(format!(
                "projection is {}x{} but the system has dimension {}",
                d.dim(),
                d.dim(),
                e.dim()
            )));
        }
        if len < 3 || !(dt > 0.0) {
            return Err(Error::invalid(
                "Green kernel needs dt > 0 and at least three grid points",
            ));
        }
        let p = d.projection().clone();
        let q = d.complement();
        let stable = if is_zero(&p, 0.0) {
            None
        } else {
            Some(e.forward_steps(t0, dt, len - 1)?.into_iter().map(|m| &p * m).collect())
        };
        let unstable = if is_identity(&p, 0.0) {
            None
        } else {
            Some(e.backward_steps(t0, dt, len - 1)?.into_iter().map(|m| &q * m).collect())
        };
        Ok(GreenKernel {
            t0,
            dt,
            len,
            dim: e.dim(),
            p,
            q,
            stable,
            unstable,
        })
    }

    pub fn has_stable(&self) -> bool {
        self.stable.is_some()
    }

    pub fn has_unstable(&self) -> bool {
        self.unstable.is_some()
    }

    /// Grid points lost on the (left, right) ends for a truncation of `n_t`
    /// steps. One extra step covers the parity chain starting at index 1.
    pub fn shrink(&self, n_t: usize) -> (usize, usize) {
        let left = if self.has_stable() { n_t + 1 } else { 0 };
        let right = if self.has_unstable() { n_t + 1 } else { 0 };
        (left, right)
    }

    /// Green operator at every grid point, integrating over the whole grid.
    /// Values within the truncation length of an active end carry the
    /// truncation error of a short integral and must be discarded.
    pub fn apply_full(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        let (n, dim, h) = (self.len, self.dim, self.dt);
        if values.len() != n * dim {
            return Err(Error::invalid("Green kernel applied to a grid of the wrong shape"));
        }
        let vec_at = |k: usize| CVector::from_column_slice(&values[k * dim..(k + 1) * dim]);
        let mut out = vec![Complex64::new(0.0, 0.0); n * dim];
        let third = Complex64::new(h / 3.0, 0.0);
        let four_thirds = Complex64::new(4.0 * h / 3.0, 0.0);
        let step = |v: &[CMatrix], i: usize| -> usize {
            if v.len() == 1 {
                0
            } else {
                i
            }
        };

        if let Some(fwd) = &self.stable {
            let pv: Vec<CVector> = (0..n).map(|k| &self.p * vec_at(k)).collect();
            for start in 0..2usize.min(n) {
                let mut acc: CVector = DVector::zeros(dim);
                let mut j = start;
                while j + 2 < n {
                    let a = &fwd[step(fwd, j)] * (&acc + &pv[j] * third);
                    acc = &fwd[step(fwd, j + 1)] * (a + &pv[j + 1] * four_thirds) + &pv[j + 2] * third;
                    j += 2;
                    for i in 0..dim {
                        out[j * dim + i] += acc[i];
                    }
                }
            }
        }
        if let Some(bwd) = &self.unstable {
            let qv: Vec<CVector> = (0..n).map(|k| &self.q * vec_at(k)).collect();
            for end in [n - 1, n - 2] {
                let mut acc: CVector = DVector::zeros(dim);
                let mut j = end;
                while j >= 2 {
                    let a = &bwd[step(bwd, j - 1)] * (&acc + &qv[j] * third);
                    acc = &bwd[step(bwd, j - 2)] * (a + &qv[j - 1] * four_thirds) + &qv[j - 2] * third;
                    j -= 2;
                    for i in 0..dim {
                        out[j * dim + i] -= acc[i];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Green operator on the grid shrunk by `n_t` truncation steps.
    pub fn apply(&self, phi: &GridFunction, n_t: usize) -> Result<GridFunction> {
        if phi.len() != self.len || (phi.t0() - self.t0).abs() > 1e-9 * self.dt || phi.dim() != self.dim {
            return Err(Error::invalid("grid function does not match the Green kernel grid"));
        }
        let (left, right) = self.shrink(n_t);
        shrink_check(self.len, left, right)?;
        let full = self.apply_full(phi.values())?;
        let out = full[left * self.dim..(self.len - right) * self.dim].to_vec();
        GridFunction::new(phi.time(left), self.dt, self.dim, out)
    }
}

/// Number of grid steps covering the truncation length for `phi` under `d`.
pub fn truncation_steps(d: &DichotomyEstimate, m: f64, dt: f64, policy: &TruncationPolicy) -> usize {
    even_steps(policy.length(d.c, d.alpha, m), dt)
}

/// `(Gamma phi)(t) = \int_{t-T}^{t} Psi(t,s) P phi(s) ds - \int_{t}^{t+T} Psi(t,s)(I-P) phi(s) ds`.
pub fn green_apply(
    e: &EvolutionField,
    d: &DichotomyEstimate,
    phi: &GridFunction,
    policy: &TruncationPolicy,
) -> Result<GridFunction> {
    let n_t = truncation_steps(d, phi.sup_norm(), phi.dt(), policy);
    if phi.len() < 3 {
        return Err(Error::WindowTooShort {
            needed: 3,
            available: phi.len(),
        });
    }
    let kernel = GreenKernel::new(e, d, phi.t0(), phi.dt(), phi.len())?;
    let (left, right) = kernel.shrink(n_t);
    shrink_check(phi.len(), left, right)?;
    kernel.apply(phi, n_t)
}
