//! Recurrence diagnostics of the evolution kernel under simultaneous time
//! shifts.

use serde::{Deserialize, Serialize};

use super::{green_matrix, DichotomyEstimate, EvolutionField};
use crate::error::{Error, Result};
use crate::greenop::TruncationPolicy;
use crate::linalg::{identity, spectral_norm, CMatrix};
use crate::quad::{even_steps, simpson_weight};
use crate::signals::MatrixSignal;

/// Node spacing of the quadratures below.
const DIAG_STEP: f64 = 0.01;

/// `|LHS - RHS|` for
/// `Psi_A(t+xi, s+xi) - Psi_B(t, s) = \int_s^t Psi_B(t, r) [A(r+xi) - B(r)] Psi_A(r+xi, s+xi) dr`.
pub fn verify_identity_lemma(ea: &EvolutionField, eb: &EvolutionField, t: f64, s: f64, xi: f64) -> Result<f64> {
    if ea.dim() != eb.dim() {
        return Err(Error::invalid("identity check needs systems of equal dimension"));
    }
    if t == s {
        return Ok(0.0);
    }
    let p = ea.dim();
    let n = even_steps((t - s).abs(), DIAG_STEP).max(2);
    let h = (t - s) / n as f64;
    let node = |k: usize| s + k as f64 * h;

    // Psi_A(r_k + xi, s + xi), accumulated forward.
    let mut psi_a = Vec::with_capacity(n + 1);
    psi_a.push(identity(p));
    for k in 0..n {
        let step = ea.integrate(node(k + 1) + xi, node(k) + xi)?;
        let next = step * &psi_a[k];
        psi_a.push(next);
    }
    // Psi_B(t, r_k), accumulated from the far end.
    let mut psi_b = vec![identity(p); n + 1];
    for k in (0..n).rev() {
        psi_b[k] = &psi_b[k + 1] * eb.integrate(node(k + 1), node(k))?;
    }

    let a = ea.coefficient();
    let b = eb.coefficient();
    let mut rhs = CMatrix::zeros(p, p);
    for k in 0..=n {
        let r = node(k);
        let delta = a.eval(r + xi)? - b.eval(r)?;
        rhs += (&psi_b[k] * delta * &psi_a[k]) * num_complex::Complex64::new(simpson_weight(k, n + 1), 0.0);
    }
    rhs *= num_complex::Complex64::new(h / 3.0, 0.0);
    let lhs = &psi_a[n] - &psi_b[0];
    Ok(spectral_norm(&(lhs - rhs)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiApReport {
    pub max_ratio: f64,
    pub bound: f64,
    /// `c^2 / (alpha - alpha')`.
    pub c1: f64,
    /// Sampled `sup |A(. + xi) - A|`.
    pub delta_a: f64,
    pub holds: bool,
}

/// `max |G(t+xi, s+xi) - G(t, s)| e^{alpha' |t - s|}` over the samples,
/// against `c1 sup |A(. + xi) - A|`.
///
/// On `t >= s` the Green difference is `(Psi(t+xi, s+xi) - Psi(t, s)) P`;
/// on `t < s` it is the unstable-side counterpart.
pub fn bi_ap_deviation(
    e: &EvolutionField,
    d: &DichotomyEstimate,
    xi: f64,
    samples: &[(f64, f64)],
    alpha_prime: f64,
) -> Result<BiApReport> {
    if !(alpha_prime > 0.0 && alpha_prime < d.alpha) {
        return Err(Error::invalid(format!(
            "alpha' = {alpha_prime} must lie in (0, alpha = {})",
            d.alpha
        )));
    }
    if samples.is_empty() {
        return Err(Error::invalid("bi_ap_deviation needs at least one sample"));
    }
    let mut max_ratio = 0.0f64;
    for &(t, s) in samples {
        let diff = green_matrix(e, d, t + xi, s + xi)? - green_matrix(e, d, t, s)?;
        max_ratio = max_ratio.max(spectral_norm(&diff) * (alpha_prime * (t - s).abs()).exp());
    }
    let lo = samples.iter().map(|x| x.0.min(x.1)).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|x| x.0.max(x.1)).fold(f64::NEG_INFINITY, f64::max);
    let delta_a = e
        .coefficient()
        .shift_deviation(xi, lo, hi.max(lo + DIAG_STEP), DIAG_STEP)?;
    let c1 = d.c * d.c / (d.alpha - alpha_prime);
    let bound = c1 * delta_a;
    Ok(BiApReport {
        max_ratio,
        bound,
        c1,
        delta_a,
        holds: max_ratio <= bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiAaReport {
    pub xi_sequence: Vec<f64>,
    pub truncation: f64,
    pub integrals_forward: Vec<f64>,
    pub integrals_backward: Vec<f64>,
    pub decreasing: bool,
}

/// `\int_{t-T}^{t} |(Psi_x(t, s) - Psi_y(t, s)) P| ds` where
/// `Psi_x(t, s) = Psi_ex(t + sx, s + sx)` and likewise for `y`.
fn kernel_gap_integral(
    ex: &EvolutionField,
    sx: f64,
    ey: &EvolutionField,
    sy: f64,
    p: &CMatrix,
    t: f64,
    length: f64,
) -> Result<f64> {
    let n = even_steps(length, DIAG_STEP);
    if n == 0 {
        return Ok(0.0);
    }
    let h = length / n as f64;
    let dim = ex.dim();
    let mut gx = identity(dim);
    let mut gy = identity(dim);
    let mut acc = 0.0;
    for k in 0..=n {
        let r = t - k as f64 * h;
        acc += simpson_weight(k, n + 1) * spectral_norm(&((&gx - &gy) * p));
        if k < n {
            gx = &gx * ex.integrate(r + sx, r - h + sx)?;
            gy = &gy * ey.integrate(r + sy, r - h + sy)?;
        }
    }
    Ok(acc * h / 3.0)
}

/// Forward integrals compare `A(. + xi_n)` with `B`; backward integrals
/// compare `B(. - xi_n)` with `A`. The truncation length makes the neglected
/// tail `2 c e^{-alpha T} / alpha` at most `policy.tol`.
pub fn integral_bi_aa_probe(
    e: &EvolutionField,
    d: &DichotomyEstimate,
    b: &MatrixSignal,
    xi_sequence: &[f64],
    t: f64,
    policy: &TruncationPolicy,
) -> Result<BiAaReport> {
    if b.dim() != e.dim() {
        return Err(Error::invalid("limit matrix B must match the system dimension"));
    }
    let eb = EvolutionField::new(b.clone(), 0.0, 0.0, e.options())?;
    let length = policy.length(d.c, d.alpha, 2.0);
    let p = d.projection();
    let mut integrals_forward = Vec::with_capacity(xi_sequence.len());
    let mut integrals_backward = Vec::with_capacity(xi_sequence.len());
    for &xi in xi_sequence {
        integrals_forward.push(kernel_gap_integral(e, xi, &eb, 0.0, p, t, length)?);
        integrals_backward.push(kernel_gap_integral(&eb, -xi, e, 0.0, p, t, length)?);
    }
    let decreasing = match (integrals_forward.first(), integrals_forward.last()) {
        (Some(f), Some(l)) if integrals_forward.len() > 1 => {
            l < f && integrals_backward.last() < integrals_backward.first()
        }
        _ => false,
    };
    Ok(BiAaReport {
        xi_sequence: xi_sequence.to_vec(),
        truncation: length,
        integrals_forward,
        integrals_backward,
        decreasing,
    })
}
