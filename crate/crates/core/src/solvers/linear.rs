//! Bounded solutions of linear equations `y' = A(t) y + f(t)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ProblemSpec;
use crate::dichotomy::{scalar_dichotomy_from_mean, DichotomyEstimate, EvolutionField};
use crate::error::{Error, Result};
use crate::greenop::{truncation_steps, GreenKernel, TruncationPolicy};
use crate::linalg::{eigenvalues, is_identity, is_zero, CMatrix, CVector};
use crate::quad::{cumulative, even_steps, simpson_weight};
use crate::signals::{
    bounded_antiderivative_check, ergodic_mean, growth_report, sample, AntiderivativeReport, GridFunction,
    GrowthReport, MatrixSignal, MeanSettings, ScalarSignal, Window,
};

/// Growth-slope threshold for the boundedness verdicts of this module.
pub const BOUND_TOL: f64 = 1e-2;

/// Eigenvalue tolerance of [`solve_constant`].
pub const EIGEN_TOL: f64 = 1e-8;

/// Sup norm of a sampled vector signal on `[t0 - left, t1 + right]`.
pub(crate) fn padded_sup(f: &[ScalarSignal], window: &Window, left: f64, right: f64) -> Result<f64> {
    let dt = window.dt;
    let lo = even_steps(left, dt);
    let hi = even_steps(right, dt);
    let n = window.len() + lo + hi;
    Ok(sample(f, window.t0 - lo as f64 * dt, dt, n)?.sup_norm())
}

/// Branch of a scalar dichotomy: `Some(true)` stable, `Some(false)` unstable.
fn scalar_branch(d: &DichotomyEstimate) -> Result<bool> {
    if d.dim() != 1 {
        return Err(Error::invalid("scalar solver needs a 1x1 dichotomy projection"));
    }
    Ok(is_identity(d.projection(), 1e-12))
}

/// Massera integral on a scalar grid: for the stable branch
/// `y(t_j) = \int_{t_j - T}^{t_j} exp(\int_s^{t_j} mu) f(s) ds`, for the unstable
/// branch `y(t_j) = -\int_{t_j}^{t_j + T} exp(\int_s^{t_j} mu) f(s) ds`, with
/// `T = n_t dt`. The output drops `n_t` points on the integrated side.
fn massera_on_grid(mu: &ScalarSignal, forcing: &GridFunction, stable: bool, n_t: usize) -> Result<GridFunction> {
    let (len, dt) = (forcing.len(), forcing.dt());
    if len < n_t + 2 {
        return Err(Error::WindowTooShort {
            needed: n_t + 2,
            available: len,
        });
    }
    let r = cumulative(|t| mu.eval(t), forcing.t0(), dt, len - 1)?;
    let out_len = len - n_t;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    if n_t > 0 {
        for (j, o) in out.iter_mut().enumerate() {
            let jj = if stable { j + n_t } else { j };
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..=n_t {
                let i = if stable { jj - k } else { jj + k };
                acc += (r[jj] - r[i]).exp() * forcing.scalar(i) * simpson_weight(k, n_t + 1);
            }
            *o = if stable { acc * (dt / 3.0) } else { -acc * (dt / 3.0) };
        }
    }
    let t0 = if stable { forcing.time(n_t) } else { forcing.t0() };
    GridFunction::new(t0, dt, 1, out)
}

/// Bounded solution of `y' = mu(t) y + f(t)` on `window`.
pub fn solve_scalar_massera(
    mu: &ScalarSignal,
    f: &ScalarSignal,
    d: &DichotomyEstimate,
    window: &Window,
    policy: &TruncationPolicy,
) -> Result<GridFunction> {
    window.validate()?;
    let stable = scalar_branch(d)?;
    let pad = policy.t_max;
    let m = padded_sup(
        std::slice::from_ref(f),
        window,
        if stable { pad } else { 0.0 },
        if stable { 0.0 } else { pad },
    )?;
    let n_t = truncation_steps(d, m, window.dt, policy);
    let padded = if stable {
        window.padded(n_t, 0)
    } else {
        window.padded(0, n_t)
    };
    let forcing = sample(f, padded.t0, padded.dt, padded.len())?;
    massera_on_grid(mu, &forcing, stable, n_t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryReport {
    pub phase: AntiderivativeReport,
    pub growth: GrowthReport,
}

/// Phase `theta = \int a` and `J = \int e^{-i theta} f` at the nodes
/// `start + k h`, `k = 0..=n`, starting from `(theta0, j0)`.
fn march_phase(
    a: &ScalarSignal,
    f: &ScalarSignal,
    start: f64,
    h: f64,
    n: usize,
    theta0: f64,
    j0: Complex64,
) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let half = cumulative(|t| a.eval_re(t).map(|x| Complex64::new(x, 0.0)), start, 0.5 * h, 2 * n)?;
    let theta_half: Vec<f64> = half.iter().map(|z| theta0 + z.re).collect();
    let g = |m: usize| -> Result<Complex64> {
        Ok(Complex64::from_polar(1.0, -theta_half[m]) * f.eval(start + m as f64 * 0.5 * h)?)
    };
    let mut theta = Vec::with_capacity(n + 1);
    let mut j = Vec::with_capacity(n + 1);
    let mut acc = j0;
    let mut left = g(0)?;
    theta.push(theta_half[0]);
    j.push(acc);
    for k in 0..n {
        let mid = g(2 * k + 1)?;
        let right = g(2 * k + 2)?;
        acc += (left + mid * 4.0 + right) * (h / 6.0);
        theta.push(theta_half[2 * k + 2]);
        j.push(acc);
        left = right;
    }
    Ok((theta, j))
}

/// `y(t) = e^{i \int_0^t a} v + \int_0^t e^{i \int_s^t a} f(s) ds` for real `a`
/// whose antiderivative is bounded.
pub fn solve_scalar_oscillatory(
    a: &ScalarSignal,
    v: Complex64,
    f: &ScalarSignal,
    window: &Window,
) -> Result<(GridFunction, OscillatoryReport)> {
    window.validate()?;
    let horizon = window.t0.abs().max(window.t1.abs()).max(1.0);
    let phase = bounded_antiderivative_check(a, horizon, BOUND_TOL)?;
    if !phase.bounded_verdict {
        return Err(Error::UnboundedPhase {
            slope: phase.growth_slope,
            bound: BOUND_TOL,
        });
    }
    let dt = window.dt;
    let (theta0, j0) = if window.t0 == 0.0 {
        (0.0, Complex64::new(0.0, 0.0))
    } else {
        let n0 = even_steps(window.t0.abs(), dt).max(2);
        let (th, jj) = march_phase(a, f, 0.0, window.t0 / n0 as f64, n0, 0.0, Complex64::new(0.0, 0.0))?;
        (th[n0], jj[n0])
    };
    let n = window.len() - 1;
    let (theta, j) = march_phase(a, f, window.t0, dt, n, theta0, j0)?;
    let values: Vec<Complex64> = theta
        .iter()
        .zip(&j)
        .map(|(th, jj)| Complex64::from_polar(1.0, *th) * (v + jj))
        .collect();
    let y = GridFunction::from_scalars(window.t0, dt, values)?;
    let growth = growth_report(&y, BOUND_TOL)?;
    Ok((y, OscillatoryReport { phase, growth }))
}

/// Per-row scalar dichotomies of the diagonal of an upper-triangular `A`.
/// A vanishing mean is reported with its row.
pub fn triangular_estimates(a: &MatrixSignal, settings: &MeanSettings, window: f64) -> Result<Vec<DichotomyEstimate>> {
    (0..a.dim())
        .map(|k| {
            let akk = a.entry(k, k);
            let report = ergodic_mean(akk, settings)?;
            scalar_dichotomy_from_mean(akk, &report, window).map_err(|e| match e {
                Error::ZeroMean { mean, tol, .. } => Error::ZeroMean {
                    mean,
                    tol,
                    row: Some(k),
                },
                other => other,
            })
        })
        .collect()
}

/// Backward substitution: the last row is solved first and each row above
/// sees the rows below it as forcing `f_k + sum_{j>k} a_kj y_j`.
pub fn solve_triangular(
    a: &MatrixSignal,
    f: &[ScalarSignal],
    estimates: &[DichotomyEstimate],
    window: &Window,
    policy: &TruncationPolicy,
) -> Result<GridFunction> {
    window.validate()?;
    let p = a.dim();
    if !a.is_upper_triangular() {
        return Err(Error::invalid("solve_triangular needs an upper-triangular A"));
    }
    if f.len() != p || estimates.len() != p {
        return Err(Error::invalid("forcing and per-row estimates must match the dimension"));
    }
    let dt = window.dt;
    let reach = p as f64 * policy.t_max;
    let coupling: Vec<Vec<f64>> = (0..p)
        .map(|k| {
            (0..p)
                .map(|j| {
                    if j > k {
                        let s = a.entry(k, j);
                        if s.is_zero() {
                            Ok(0.0)
                        } else {
                            s.sup_norm_on(window.t0 - reach, window.t1 + reach, dt)
                        }
                    } else {
                        Ok(0.0)
                    }
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    // Truncation steps per row from a-priori forcing bounds, bottom-up.
    let mut steps = vec![0usize; p];
    let mut bounds = vec![0.0f64; p];
    for k in (0..p).rev() {
        let fk = padded_sup(std::slice::from_ref(&f[k]), window, reach, reach)?;
        let m = fk + (k + 1..p).map(|j| coupling[k][j] * bounds[j]).sum::<f64>();
        let d = &estimates[k];
        steps[k] = truncation_steps(d, m, dt, policy);
        bounds[k] = d.c * m / d.alpha + policy.tol;
    }
    // Row k lives on the window padded by the steps of all rows above it.
    let pad: Vec<usize> = (0..=p).map(|k| steps[..k].iter().sum()).collect();
    let mut rows: Vec<Option<GridFunction>> = vec![None; p];
    for k in (0..p).rev() {
        let outer = window.padded(pad[k + 1], pad[k + 1]);
        let mut forcing = sample(&f[k], outer.t0, dt, outer.len())?.into_values();
        for j in k + 1..p {
            let akj = a.entry(k, j);
            if akj.is_zero() {
                continue;
            }
            let yj = rows[j].as_ref().expect("rows below are solved first");
            let offset = pad[j] - pad[k + 1];
            for (i, fi) in forcing.iter_mut().enumerate() {
                *fi += akj.eval(outer.time(i))? * yj.scalar(i + offset);
            }
        }
        let forcing = GridFunction::from_scalars(outer.t0, dt, forcing)?;
        let stable = scalar_branch(&estimates[k])?;
        let n_t = steps[k];
        let y = massera_on_grid(a.entry(k, k), &forcing, stable, n_t)?;
        // Trim the idle side so every row is centred on the window.
        let y = if stable {
            y.slice(0, y.len() - 1 - n_t)?
        } else {
            y.slice(n_t, y.len() - 1)?
        };
        rows[k] = Some(y);
    }
    let n = window.len();
    let mut values = vec![Complex64::new(0.0, 0.0); n * p];
    for (k, row) in rows.iter().enumerate() {
        let row = row.as_ref().expect("all rows solved");
        for i in 0..n {
            values[i * p + k] = row.scalar(i + pad[k]);
        }
    }
    GridFunction::new(window.t0, dt, p, values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    #[serde(with = "crate::io::complex_vec")]
    pub eigenvalues: Vec<Complex64>,
    pub growth: GrowthReport,
}

/// `y(t) = exp(At) [v + \int_0^t exp(-As) f(s) ds]` for a constant `A` with
/// distinct eigenvalues of unit modulus.
pub fn solve_constant(
    a: &CMatrix,
    v: &[Complex64],
    f: &[ScalarSignal],
    window: &Window,
) -> Result<(GridFunction, ConstantReport)> {
    window.validate()?;
    let p = a.nrows();
    if !a.is_square() || v.len() != p || f.len() != p {
        return Err(Error::invalid("solve_constant needs a square A and matching v, f"));
    }
    let ev = eigenvalues(a)?;
    for (i, l) in ev.iter().enumerate() {
        if (l.norm() - 1.0).abs() > EIGEN_TOL {
            return Err(Error::EigenvalueViolation(format!(
                "eigenvalue {l} has modulus {} != 1",
                l.norm()
            )));
        }
        if ev[..i].iter().any(|m| (m - l).norm() <= EIGEN_TOL) {
            return Err(Error::EigenvalueViolation(format!("eigenvalue {l} is repeated")));
        }
    }
    let integrand = |s: f64| -> Result<CVector> {
        let mut fv = CVector::zeros(p);
        for (i, fi) in f.iter().enumerate() {
            fv[i] = fi.eval(s)?;
        }
        Ok((a * Complex64::new(-s, 0.0)).exp() * fv)
    };
    let march = |start: f64, h: f64, n: usize, init: CVector| -> Result<Vec<CVector>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut acc = init;
        let mut left = integrand(start)?;
        out.push(acc.clone());
        for k in 0..n {
            let a0 = start + k as f64 * h;
            let mid = integrand(a0 + 0.5 * h)?;
            let right = integrand(start + (k + 1) as f64 * h)?;
            acc += (&left + mid * Complex64::new(4.0, 0.0) + &right) * Complex64::new(h / 6.0, 0.0);
            out.push(acc.clone());
            left = right;
        }
        Ok(out)
    };
    let dt = window.dt;
    let init = if window.t0 == 0.0 {
        CVector::zeros(p)
    } else {
        let n0 = even_steps(window.t0.abs(), dt).max(2);
        march(0.0, window.t0 / n0 as f64, n0, CVector::zeros(p))?
            .pop()
            .expect("non-empty")
    };
    let n = window.len() - 1;
    let integrals = march(window.t0, dt, n, init)?;
    let vv = CVector::from_column_slice(v);
    let mut values = Vec::with_capacity((n + 1) * p);
    for (k, ik) in integrals.iter().enumerate() {
        let t = window.t0 + k as f64 * dt;
        let y = (a * Complex64::new(t, 0.0)).exp() * (&vv + ik);
        values.extend(y.iter().copied());
    }
    let y = GridFunction::new(window.t0, dt, p, values)?;
    let growth = growth_report(&y, BOUND_TOL)?;
    Ok((
        y,
        ConstantReport {
            eigenvalues: ev,
            growth,
        },
    ))
}

/// Grid layout shared by the Green-operator solvers: the window padded by
/// the truncation length on each active side.
pub(crate) struct GreenLayout {
    pub kernel: GreenKernel,
    pub grid: Window,
    pub n_t: usize,
    pub left: usize,
}

pub(crate) fn green_layout(
    e: &EvolutionField,
    d: &DichotomyEstimate,
    inner: &Window,
    m: f64,
    policy: &TruncationPolicy,
) -> Result<GreenLayout> {
    let n_t = truncation_steps(d, m, inner.dt, policy);
    let stable = !is_zero(d.projection(), 0.0);
    let unstable = !is_identity(d.projection(), 0.0);
    let left = if stable { n_t + 1 } else { 0 };
    let right = if unstable { n_t + 1 } else { 0 };
    let grid = inner.padded(left, right);
    let kernel = GreenKernel::new(e, d, grid.t0, grid.dt, grid.len())?;
    Ok(GreenLayout {
        kernel,
        grid,
        n_t,
        left,
    })
}

/// `y = Gamma f` on `window`, checked against `|y| <= (2c/alpha)|f| + tol`.
pub fn solve_linear_green(
    spec: &ProblemSpec,
    e: &EvolutionField,
    d: &DichotomyEstimate,
    window: &Window,
    policy: &TruncationPolicy,
) -> Result<GridFunction> {
    spec.validate()?;
    window.validate()?;
    if !spec.g.is_none() {
        return Err(Error::invalid("solve_linear_green needs g = none"));
    }
    if spec.dim() != e.dim() || spec.dim() != d.dim() {
        return Err(Error::invalid(
            "problem, evolution field and dichotomy dimensions differ",
        ));
    }
    let m = padded_sup(&spec.f, window, policy.t_max, policy.t_max)?;
    let layout = green_layout(e, d, window, m, policy)?;
    let forcing = sample(&spec.f, layout.grid.t0, layout.grid.dt, layout.grid.len())?;
    let y = layout.kernel.apply(&forcing, layout.n_t)?;
    let bound = 2.0 * d.c / d.alpha * forcing.sup_norm() + policy.tol;
    let norm = y.sup_norm();
    if norm > bound {
        return Err(Error::BoundViolation { norm, bound });
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::signals::Structure;

    fn policy() -> TruncationPolicy {
        TruncationPolicy::new(1e-10, 100.0).unwrap()
    }

    fn scalar_d(stable: bool) -> DichotomyEstimate {
        let p = if stable { 1.0 } else { 0.0 };
        DichotomyEstimate::user_supplied(CMatrix::from_element(1, 1, Complex64::new(p, 0.0)), 1.0, 0.95, 40.0).unwrap()
    }

    fn err(y: &GridFunction, comp: usize, f: impl Fn(f64) -> Complex64) -> f64 {
        (0..y.len())
            .map(|k| (y.value(k)[comp] - f(y.time(k))).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn massera_examples() {
        let w = Window::new(0.0, 20.0, 0.01).unwrap();
        let mu = ScalarSignal::constant(-1.0);
        let y = solve_scalar_massera(&mu, &ScalarSignal::constant(1.0), &scalar_d(true), &w, &policy()).unwrap();
        assert_eq!(y.len(), w.len());
        assert!(err(&y, 0, |_| Complex64::new(1.0, 0.0)) < 1e-9);
        let y = solve_scalar_massera(&mu, &ScalarSignal::cos(1.0, 1.0, 0.0), &scalar_d(true), &w, &policy()).unwrap();
        assert!(err(&y, 0, |t| Complex64::new((t.cos() + t.sin()) / 2.0, 0.0)) < 1e-9);
        let y = solve_scalar_massera(
            &ScalarSignal::constant(1.0),
            &ScalarSignal::constant(1.0),
            &scalar_d(false),
            &w,
            &policy(),
        )
        .unwrap();
        assert!((y.t0() - 0.0).abs() < 1e-12);
        assert!(err(&y, 0, |_| Complex64::new(-1.0, 0.0)) < 1e-9);
    }

    #[test]
    fn oscillatory_examples() {
        let w = Window::new(-5.0, 30.0, 0.01).unwrap();
        let (y, rep) = solve_scalar_oscillatory(
            &ScalarSignal::zero(),
            Complex64::new(1.0, 0.0),
            &ScalarSignal::zero(),
            &w,
        )
        .unwrap();
        assert!(err(&y, 0, |_| Complex64::new(1.0, 0.0)) < 1e-14);
        assert!(rep.growth.bounded);
        let v = Complex64::new(0.5, -0.25);
        let (y, _) = solve_scalar_oscillatory(&ScalarSignal::zero(), v, &ScalarSignal::cos(1.0, 1.0, 0.0), &w).unwrap();
        assert!(err(&y, 0, |t| v + t.sin()) < 1e-10);
        let (y, rep) = solve_scalar_oscillatory(
            &ScalarSignal::cos(1.0, 1.0, 0.0),
            Complex64::new(1.0, 0.0),
            &ScalarSignal::zero(),
            &w,
        )
        .unwrap();
        assert!(err(&y, 0, |t| Complex64::from_polar(1.0, t.sin())) < 1e-10);
        assert!((0..y.len()).all(|k| (y.scalar(k).norm() - 1.0).abs() < 1e-10));
        assert!(rep.phase.bounded_verdict && rep.growth.bounded);
        assert!(matches!(
            solve_scalar_oscillatory(&ScalarSignal::constant(1.0), v, &ScalarSignal::zero(), &w),
            Err(Error::UnboundedPhase { .. })
        ));
    }

    #[test]
    fn triangular_examples() {
        let w = Window::new(0.0, 20.0, 0.01).unwrap();
        let one = ScalarSignal::constant(1.0);
        let m1 = ScalarSignal::constant(-1.0);
        let z = ScalarSignal::zero();
        let a = MatrixSignal::new(
            vec![vec![m1.clone(), one.clone()], vec![z.clone(), m1.clone()]],
            Structure::UpperTriangular,
        )
        .unwrap();
        let ds = vec![scalar_d(true), scalar_d(true)];
        let y = solve_triangular(&a, &[z.clone(), one.clone()], &ds, &w, &policy()).unwrap();
        assert!(err(&y, 0, |_| Complex64::new(1.0, 0.0)) < 1e-9);
        assert!(err(&y, 1, |_| Complex64::new(1.0, 0.0)) < 1e-9);
        let y = solve_triangular(&a, &[z.clone(), z.clone()], &ds, &w, &policy()).unwrap();
        assert_eq!(y.sup_norm(), 0.0);

        let a = MatrixSignal::diagonal(vec![m1.clone(), ScalarSignal::constant(2.0)]);
        let d2 =
            DichotomyEstimate::user_supplied(CMatrix::from_element(1, 1, Complex64::new(0.0, 0.0)), 1.0, 1.9, 40.0)
                .unwrap();
        let y = solve_triangular(
            &a,
            &[ScalarSignal::cos(1.0, 1.0, 0.0), one.clone()],
            &[scalar_d(true), d2],
            &w,
            &policy(),
        )
        .unwrap();
        assert!(err(&y, 0, |t| Complex64::new((t.cos() + t.sin()) / 2.0, 0.0)) < 1e-9);
        assert!(err(&y, 1, |_| Complex64::new(-0.5, 0.0)) < 1e-9);
    }

    #[test]
    fn triangular_zero_mean_names_the_row() {
        let a = MatrixSignal::diagonal(vec![ScalarSignal::constant(-1.0), ScalarSignal::sin(1.0, 1.0, 0.0)]);
        let st = MeanSettings {
            horizons: crate::signals::doubling_horizons(2000.0, 3),
            ..MeanSettings::default()
        };
        assert!(matches!(
            triangular_estimates(&a, &st, 20.0),
            Err(Error::ZeroMean { row: Some(1), .. })
        ));
    }

    #[test]
    fn constant_examples() {
        let w = Window::new(0.0, 30.0, 0.01).unwrap();
        let rot = CMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0].map(|x| Complex64::new(x, 0.0)));
        let v = [Complex64::new(0.3, 0.0), Complex64::new(-0.4, 0.0)];
        let (y, rep) = solve_constant(&rot, &v, &[ScalarSignal::zero(), ScalarSignal::zero()], &w).unwrap();
        assert!((0..y.len()).all(|k| (crate::quad::norm(y.value(k)) - 0.5).abs() < 1e-12));
        assert!(rep.growth.bounded);

        let ia = CMatrix::from_element(1, 1, Complex64::new(0.0, 1.0));
        let (y, _) = solve_constant(&ia, &[Complex64::new(0.0, 0.0)], &[ScalarSignal::cis(2.0)], &w).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert!(err(&y, 0, |t| (i * t).exp() * ((i * t).exp() - 1.0) / i) < 1e-10);
        assert!(y.sup_norm() <= 2.0 + 1e-12);

        let (y, _) = solve_constant(
            &rot,
            &[Complex64::new(0.0, 0.0); 2],
            &[ScalarSignal::zero(), ScalarSignal::zero()],
            &w,
        )
        .unwrap();
        assert_eq!(y.sup_norm(), 0.0);

        let bad = CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0].map(|x| Complex64::new(x, 0.0)));
        assert!(matches!(
            solve_constant(&bad, &v, &[ScalarSignal::zero(), ScalarSignal::zero()], &w),
            Err(Error::EigenvalueViolation(_))
        ));
        let rep = identity(2);
        assert!(solve_constant(&rep, &v, &[ScalarSignal::zero(), ScalarSignal::zero()], &w).is_err());
    }

    #[test]
    fn constant_window_off_origin() {
        let w = Window::new(5.0, 10.0, 0.01).unwrap();
        let ia = CMatrix::from_element(1, 1, Complex64::new(0.0, 1.0));
        let (y, _) = solve_constant(&ia, &[Complex64::new(0.0, 0.0)], &[ScalarSignal::cis(2.0)], &w).unwrap();
        let i = Complex64::new(0.0, 1.0);
        assert!(err(&y, 0, |t| (i * t).exp() * ((i * t).exp() - 1.0) / i) < 1e-10);
    }

    #[test]
    fn linear_green_examples() {
        let w = Window::new(0.0, 20.0, 0.01).unwrap();
        let a = MatrixSignal::scalar(ScalarSignal::constant(-1.0));
        let e = EvolutionField::with_defaults(a.clone()).unwrap();
        let d = DichotomyEstimate::user_supplied(identity(1), 1.0, 1.0, 40.0).unwrap();
        let spec = ProblemSpec::linear(a.clone(), vec![ScalarSignal::cos(1.0, 1.0, 0.0)]).unwrap();
        let y = solve_linear_green(&spec, &e, &d, &w, &policy()).unwrap();
        assert_eq!(y.len(), w.len());
        assert!((y.t0() - w.t0).abs() < 1e-12);
        assert!(err(&y, 0, |t| Complex64::new((t.cos() + t.sin()) / 2.0, 0.0)) < 1e-9);
        let spec = ProblemSpec::linear(a, vec![ScalarSignal::zero()]).unwrap();
        assert_eq!(
            solve_linear_green(&spec, &e, &d, &w, &policy()).unwrap().sup_norm(),
            0.0
        );

        let saddle = MatrixSignal::from_real_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let e = EvolutionField::with_defaults(saddle.clone()).unwrap();
        let mut p = identity(2);
        p[(1, 1)] = Complex64::new(0.0, 0.0);
        let d = DichotomyEstimate::user_supplied(p, 1.0, 1.0, 40.0).unwrap();
        let spec = ProblemSpec::linear(saddle, vec![ScalarSignal::constant(1.0); 2]).unwrap();
        let y = solve_linear_green(&spec, &e, &d, &w, &policy()).unwrap();
        assert!(err(&y, 0, |_| Complex64::new(1.0, 0.0)) < 1e-9);
        assert!(err(&y, 1, |_| Complex64::new(-1.0, 0.0)) < 1e-9);
    }

    #[test]
    fn corrupted_constant_violates_bound() {
        let w = Window::new(0.0, 20.0, 0.01).unwrap();
        let a = MatrixSignal::scalar(ScalarSignal::constant(-1.0));
        let e = EvolutionField::with_defaults(a.clone()).unwrap();
        let d = DichotomyEstimate::user_supplied(identity(1), 0.2, 1.0, 40.0).unwrap();
        let spec = ProblemSpec::linear(a, vec![ScalarSignal::constant(1.0)]).unwrap();
        assert!(matches!(
            solve_linear_green(&spec, &e, &d, &w, &policy()),
            Err(Error::BoundViolation { .. })
        ));
    }
}
