//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn identity(p: usize) -> CMatrix {
    CMatrix::identity(p, p)
}

/// Operator 2-norm.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `|P^2 - P|` in the max-entry norm.
pub fn idempotency_residual(p: &CMatrix) -> f64 {
    max_abs(&(p * p - p))
}

/// Returns a projection close to `p`. Small drift is removed by the
/// iteration `P <- 3P^2 - 2P^3`; large violations are rejected.
pub fn reproject(p: &CMatrix) -> Result<CMatrix> {
    if !p.is_square() {
        return Err(Error::invalid("projection must be square"));
    }
    let mut q = p.clone();
    let mut res = idempotency_residual(&q);
    if res > 1e-6 {
        return Err(Error::NotProjection { residual: res });
    }
    let mut iter = 0;
    while res > 1e-12 && iter < 20 {
        let q2 = &q * &q;
        let q3 = &q2 * &q;
        q = q2 * Complex64::new(3.0, 0.0) - q3 * Complex64::new(2.0, 0.0);
        res = idempotency_residual(&q);
        iter += 1;
    }
    if res > 1e-12 {
        return Err(Error::NotProjection { residual: res });
    }
    Ok(q)
}

/// True when `m` is within `tol` of the zero matrix.
pub fn is_zero(m: &CMatrix, tol: f64) -> bool {
    max_abs(m) <= tol
}

pub fn is_identity(m: &CMatrix, tol: f64) -> bool {
    max_abs(&(m - identity(m.nrows()))) <= tol
}

/// Eigenvalues via the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::invalid("Schur decomposition did not converge"))?;
    let ev = schur
        .eigenvalues()
        .ok_or_else(|| Error::invalid("eigenvalues unavailable from Schur form"))?;
    Ok(ev.iter().copied().collect())
}

/// Spectral (Riesz) projection onto the eigenvectors whose eigenvalues have
/// negative real part. A one-sided spectrum gives `I` or `0` directly;
/// a split spectrum requires independent eigenvectors.
pub fn stable_spectral_projection(a: &CMatrix) -> Result<CMatrix> {
    let p = a.nrows();
    let ev = eigenvalues(a)?;
    if let Some(lambda) = ev.iter().find(|l| l.re == 0.0) {
        return Err(Error::EigenvalueViolation(format!(
            "eigenvalue {lambda} on the imaginary axis admits no dichotomy"
        )));
    }
    if ev.iter().all(|l| l.re < 0.0) {
        return Ok(identity(p));
    }
    if ev.iter().all(|l| l.re > 0.0) {
        return Ok(CMatrix::zeros(p, p));
    }
    let mut vecs = CMatrix::zeros(p, p);
    for (k, lambda) in ev.iter().enumerate() {
        let shifted = a - identity(p) * *lambda;
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.ok_or_else(|| Error::invalid("SVD failed"))?;
        // Right singular vector of the smallest singular value spans the kernel.
        let (imin, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
        let v = v_t.row(imin).adjoint();
        vecs.set_column(k, &v);
    }
    let inv = vecs
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::EigenvalueViolation("eigenvectors are not independent".into()))?;
    let mut d = CMatrix::zeros(p, p);
    for (k, lambda) in ev.iter().enumerate() {
        if lambda.re < 0.0 {
            d[(k, k)] = Complex64::new(1.0, 0.0);
        }
    }
    reproject(&(&vecs * d * inv))
}
