//! Fixed-point iteration `phi_{k+1} = phi_0 + Gamma[g(., phi_k(. - tau))]`
//! for the delayed semilinear equation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::linear::{green_layout, padded_sup};
use super::{geometric_rate, FixedPointReport, FixedPointStatus, Preconditions, ProblemSpec};
use crate::dichotomy::{DichotomyEstimate, EvolutionField};
use crate::error::{Error, Result};
use crate::greenop::{truncation_steps, TruncationPolicy};
use crate::linalg::{is_identity, is_zero};
use crate::quad::lagrange4;
use crate::signals::{sample, GridFunction, ScalarSignal, Window};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Absolute sup-norm stopping tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions {
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

/// Delay given in whole steps when `tau` sits on the lattice.
pub(crate) fn delay_steps(tau: f64, dt: f64) -> Option<usize> {
    let q = tau / dt;
    let r = q.round();
    if (q - r).abs() <= 1e-9 * q.max(1.0) {
        Some(r as usize)
    } else {
        None
    }
}

/// Region on which the Lipschitz constant is sampled: the window extended
/// by `T_max + tau` on the left and `T_max` on the right.
pub fn picard_region(window: &Window, tau: f64, policy: &TruncationPolicy) -> Window {
    Window {
        t0: window.t0 - policy.t_max - tau,
        t1: window.t1 + policy.t_max,
        dt: window.dt,
    }
}

/// Sup-norm of the forcing over the grid extension of [`picard_region`].
pub fn forcing_norm(f: &[ScalarSignal], window: &Window, tau: f64, policy: &TruncationPolicy) -> Result<f64> {
    padded_sup(f, window, policy.t_max + tau, policy.t_max)
}

/// Evaluates the preconditions `4 c L < alpha` and `|f| <= alpha rho / (2c)`.
pub fn picard_preconditions(
    spec: &ProblemSpec,
    d: &DichotomyEstimate,
    window: &Window,
    policy: &TruncationPolicy,
) -> Result<(Preconditions, f64)> {
    let lipschitz = spec.g.lipschitz(&picard_region(window, spec.tau, policy))?;
    let f_norm = forcing_norm(&spec.f, window, spec.tau, policy)?;
    let four_c_l = 4.0 * d.c * lipschitz;
    let f_bound = d.alpha * spec.rho / (2.0 * d.c);
    Ok((
        Preconditions {
            precondition_4cl: four_c_l < d.alpha,
            precondition_f: f_norm <= f_bound,
            four_c_l,
            alpha: d.alpha,
            f_norm,
            f_bound,
        },
        lipschitz,
    ))
}

pub fn picard_fixed_point(
    spec: &ProblemSpec,
    e: &EvolutionField,
    d: &DichotomyEstimate,
    window: &Window,
    policy: &TruncationPolicy,
    options: &PicardOptions,
) -> Result<(GridFunction, FixedPointReport)> {
    spec.validate()?;
    window.validate()?;
    if spec.dim() != e.dim() || spec.dim() != d.dim() {
        return Err(Error::invalid(
            "problem, evolution field and dichotomy dimensions differ",
        ));
    }
    if !(options.tol > 0.0) || options.max_iter == 0 {
        return Err(Error::invalid("Picard iteration needs tol > 0 and max_iter >= 1"));
    }
    let (pre, lipschitz) = picard_preconditions(spec, d, window, policy)?;
    let apriori_rate = 2.0 * d.c * lipschitz / d.alpha;
    let mut report = FixedPointReport {
        iterations: 0,
        residual_history: Vec::new(),
        apriori_rate,
        measured_rate: 0.0,
        preconditions: pre.clone(),
        status: FixedPointStatus::PreconditionFailed,
    };
    if !(pre.precondition_4cl && pre.precondition_f) {
        let mut which = Vec::new();
        if !pre.precondition_4cl {
            which.push(format!(
                "4cL < alpha fails: 4cL = {}, alpha = {}",
                pre.four_c_l, pre.alpha
            ));
        }
        if !pre.precondition_f {
            which.push(format!(
                "|f| <= alpha rho / (2c) fails: |f| = {}, bound = {}",
                pre.f_norm, pre.f_bound
            ));
        }
        return Err(Error::PreconditionFailed {
            which: which.join("; "),
            report: Box::new(report),
        });
    }

    let dt = window.dt;
    let dim = spec.dim();
    let stable = !is_zero(d.projection(), 0.0);
    let unstable = !is_identity(d.projection(), 0.0);
    let n_g = truncation_steps(d, 2.0 * lipschitz * spec.rho, dt, policy);
    let n_tau = (spec.tau / dt).ceil() as usize;
    // The delayed argument is unknown before the computational window; the
    // resulting error moves right by tau per iteration while contracting.
    let fronts = if lipschitz > 0.0 && n_tau > 0 {
        let decay = (policy.tol / (2.0 * lipschitz * spec.rho)).ln() / apriori_rate.max(1e-300).ln();
        decay.clamp(0.0, 60.0).ceil() as usize + 2
    } else {
        2
    };
    let left_c = if stable { 2 * (n_g + 1) } else { 0 } + n_tau * fronts;
    let right_c = if unstable { 2 * (n_g + 1) } else { 0 };
    let comp = window.padded(left_c, right_c);
    let layout = green_layout(e, d, &comp, pre.f_norm, policy)?;
    let big = &layout.grid;
    let (n_big, n_comp) = (big.len(), comp.len());
    let offset = layout.left;

    let forcing = sample(&spec.f, big.t0, dt, n_big)?;
    let restrict = |full: &[Complex64]| full[offset * dim..(offset + n_comp) * dim].to_vec();
    let phi0 = restrict(&layout.kernel.apply_full(forcing.values())?);

    let weights: Vec<Complex64> = match spec.g.weight() {
        Some(w) => sample(w, big.t0, dt, n_big)?.into_values(),
        None => vec![Complex64::new(0.0, 0.0); n_big],
    };
    let shift = if spec.tau == 0.0 {
        Some(0)
    } else {
        delay_steps(spec.tau, dt)
    };
    let win_first = left_c;
    let win_last = left_c + window.len() - 1;

    let mut phi = phi0.clone();
    let mut h = vec![Complex64::new(0.0, 0.0); n_big * dim];
    let mut delayed = vec![Complex64::new(0.0, 0.0); dim];
    loop {
        if report.iterations >= options.max_iter {
            report.status = FixedPointStatus::MaxIter;
            report.measured_rate = geometric_rate(&report.residual_history);
            return Err(Error::MaxIter {
                report: Box::new(report),
            });
        }
        report.iterations += 1;
        for i in 0..n_big {
            let out = &mut h[i * dim..(i + 1) * dim];
            let t = big.time(i);
            let available = match shift {
                Some(s) => {
                    let idx = i as isize - offset as isize - s as isize;
                    if idx >= 0 && (idx as usize) < n_comp {
                        let idx = idx as usize;
                        delayed.copy_from_slice(&phi[idx * dim..(idx + 1) * dim]);
                        true
                    } else {
                        false
                    }
                }
                None => lagrange4(&phi, dim, comp.t0, dt, t - spec.tau, &mut delayed).is_some(),
            };
            if available {
                spec.g.apply(weights[i], &delayed, out)?;
            } else {
                out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
            }
        }
        let gamma_h = restrict(&layout.kernel.apply_full(&h)?);
        let next: Vec<Complex64> = phi0.iter().zip(&gamma_h).map(|(a, b)| a + b).collect();

        let residual = pointwise_sup(&next, &phi, dim, 0, n_comp - 1);
        let distance = pointwise_sup(&next, &phi0, dim, win_first, win_last);
        report.residual_history.push(residual);
        if distance > spec.rho + options.tol {
            return Err(Error::BallEscape {
                iteration: report.iterations,
                distance,
                radius: spec.rho,
            });
        }
        phi = next;
        if residual < options.tol {
            break;
        }
    }
    report.status = FixedPointStatus::Converged;
    report.measured_rate = geometric_rate(&report.residual_history);
    let out = phi[win_first * dim..(win_last + 1) * dim].to_vec();
    Ok((GridFunction::new(window.t0, dt, dim, out)?, report))
}

fn pointwise_sup(a: &[Complex64], b: &[Complex64], dim: usize, first: usize, last: usize) -> f64 {
    (first..=last)
        .map(|k| {
            a[k * dim..(k + 1) * dim]
                .iter()
                .zip(&b[k * dim..(k + 1) * dim])
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::signals::MatrixSignal;
    use crate::solvers::{solve_linear_green, Nonlinearity};

    fn setup(l: f64) -> (ProblemSpec, EvolutionField, DichotomyEstimate) {
        let a = MatrixSignal::scalar(ScalarSignal::constant(-1.0));
        let g = Nonlinearity::table(|y| l * y.sin(), -20.0, 20.0, 1e-3, l).unwrap();
        let spec = ProblemSpec::new(a.clone(), vec![ScalarSignal::cos(1.0, 1.0, 0.0)], g, 1.0, 3.0).unwrap();
        let e = EvolutionField::with_defaults(a).unwrap();
        let d = DichotomyEstimate::new(
            identity(1),
            1.0,
            0.95,
            40.0,
            crate::dichotomy::DichotomyMethod::ErgodicMean,
        )
        .unwrap();
        (spec, e, d)
    }

    #[test]
    fn linear_problem_converges_in_one_step() {
        let (mut spec, e, d) = setup(0.1);
        spec.g = Nonlinearity::None;
        let w = Window::new(0.0, 20.0, 0.01).unwrap();
        let policy = TruncationPolicy::new(1e-10, 100.0).unwrap();
        let (y, rep) = picard_fixed_point(&spec, &e, &d, &w, &policy, &PicardOptions::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert_eq!(rep.residual_history, vec![0.0]);
        let lin = solve_linear_green(&spec, &e, &d, &w, &policy).unwrap();
        assert!(y.sup_diff(&lin).unwrap() < 2.0 * policy.tol);
    }

    #[test]
    fn contraction_on_benchmark() {
        let (spec, e, d) = setup(0.1);
        let w = Window::new(0.0, 30.0, 0.01).unwrap();
        let policy = TruncationPolicy::new(1e-10, 100.0).unwrap();
        let (_, rep) = picard_fixed_point(&spec, &e, &d, &w, &policy, &PicardOptions::default()).unwrap();
        assert_eq!(rep.status, FixedPointStatus::Converged);
        assert!(rep.iterations <= 30);
        assert!(rep.measured_rate <= 1.2 * rep.apriori_rate);
        assert!(rep.residual_history.windows(2).skip(1).all(|w| w[1] < w[0]));
    }

    #[test]
    fn large_lipschitz_fails_precondition() {
        let (spec, e, d) = setup(0.3);
        let w = Window::new(0.0, 10.0, 0.01).unwrap();
        match picard_fixed_point(
            &spec,
            &e,
            &d,
            &w,
            &TruncationPolicy::default(),
            &PicardOptions::default(),
        ) {
            Err(Error::PreconditionFailed { which, report }) => {
                assert!(which.contains("4cL"));
                assert!(!report.preconditions.precondition_4cl);
                assert!((report.preconditions.four_c_l - 1.2).abs() < 1e-12);
            }
            other => panic!("expected PreconditionFailed, got {other:?}"),
        }
    }

    #[test]
    fn large_forcing_fails_precondition() {
        let (mut spec, e, d) = setup(0.1);
        spec.rho = 0.5;
        let w = Window::new(0.0, 10.0, 0.01).unwrap();
        let r = picard_fixed_point(
            &spec,
            &e,
            &d,
            &w,
            &TruncationPolicy::default(),
            &PicardOptions::default(),
        );
        assert!(matches!(r, Err(Error::PreconditionFailed { report, .. }) if !report.preconditions.precondition_f));
    }

    #[test]
    fn max_iter_carries_the_report() {
        let (spec, e, d) = setup(0.1);
        let w = Window::new(0.0, 10.0, 0.01).unwrap();
        let opts = PicardOptions {
            tol: 1e-14,
            max_iter: 2,
        };
        match picard_fixed_point(&spec, &e, &d, &w, &TruncationPolicy::default(), &opts) {
            Err(Error::MaxIter { report }) => {
                assert_eq!(report.iterations, 2);
                assert_eq!(report.status, FixedPointStatus::MaxIter);
            }
            other => panic!("expected MaxIter, got {other:?}"),
        }
    }

    #[test]
    fn off_lattice_delay_matches_lattice_delay() {
        let (mut spec, e, d) = setup(0.1);
        let w = Window::new(0.0, 20.0, 0.01).unwrap();
        let policy = TruncationPolicy::new(1e-10, 100.0).unwrap();
        spec.tau = 1.0;
        let (a, _) = picard_fixed_point(&spec, &e, &d, &w, &policy, &PicardOptions::default()).unwrap();
        spec.tau = 1.0 + 1e-7;
        let (b, _) = picard_fixed_point(&spec, &e, &d, &w, &policy, &PicardOptions::default()).unwrap();
        assert!(a.sup_diff(&b).unwrap() < 1e-6);
    }
}
