//! The delayed Lasota–Wazewska model
//! `y' = -delta(t) y + p(t) e^{-gamma y(t - tau)}`.
//!
//! The production term is split as `p + p (e^{-gamma y} - 1)`, so the
//! forcing is `p` and the perturbation vanishes at `y = 0` with Lipschitz
//! constant `gamma |p|_inf` on `y >= 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dichotomy::{scalar_dichotomy_max_ratio, DichotomyEstimate, EvolutionField};
use crate::error::{Error, Result};
use crate::greenop::TruncationPolicy;
use crate::io::complex;
use crate::oracle::{compare_after_transient, integrate_dde, History, TRANSIENT_FACTOR};
use crate::signals::{ergodic_mean, GridFunction, MatrixSignal, MeanReport, MeanSettings, ScalarSignal, Window};
use crate::solvers::{
    forcing_norm, picard_fixed_point, picard_region, FixedPointReport, Nonlinearity, PicardOptions, ProblemSpec,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LasotaConfig {
    /// Death rate.
    pub delta: ScalarSignal,
    /// Production rate.
    pub p: ScalarSignal,
    pub gamma: f64,
    pub tau: f64,
}

impl LasotaConfig {
    /// `delta = 2 + sin t + sin(sqrt 2 t)`, `p = 1 + 0.5 cos(sqrt 3 t)`,
    /// `gamma = 0.05`, `tau = 1`.
    pub fn canonical() -> Self {
        LasotaConfig {
            delta: ScalarSignal::constant(2.0)
                + ScalarSignal::sin(1.0, 1.0, 0.0)
                + ScalarSignal::sin(1.0, std::f64::consts::SQRT_2, 0.0),
            p: ScalarSignal::constant(1.0) + ScalarSignal::cos(0.5, 3f64.sqrt(), 0.0),
            gamma: 0.05,
            tau: 1.0,
        }
    }

    /// Checks `gamma >= 0`, `tau > 0` and strict positivity of the sampled
    /// `delta` and `p` on `window`.
    pub fn validate(&self, window: &Window) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!(
                "gamma = {} must be finite and >= 0",
                self.gamma
            )));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid(format!("tau = {} must be positive", self.tau)));
        }
        for (name, s) in [("delta", &self.delta), ("p", &self.p)] {
            for k in 0..window.len() {
                let t = window.time(k);
                let v = s.eval(t)?;
                if !(v.re > 0.0) || v.im != 0.0 {
                    return Err(Error::invalid(format!("{name}({t}) = {v} is not strictly positive")));
                }
            }
        }
        Ok(())
    }

    /// `y' = -delta y + p + p (e^{-gamma y(t - tau)} - 1)` with ball radius `rho`.
    pub fn problem(&self, rho: f64) -> Result<ProblemSpec> {
        ProblemSpec::new(
            MatrixSignal::scalar(self.delta.clone().scaled_re(-1.0)),
            vec![self.p.clone()],
            Nonlinearity::ScaledExpDecay {
                gamma: self.gamma,
                weight: self.p.clone(),
            },
            self.tau,
            rho,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionDReport {
    #[serde(with = "complex")]
    pub mean: Complex64,
    pub delta_minus: f64,
    pub converged: bool,
    pub passes: bool,
}

/// Condition (D): the ergodic mean of `delta` converges and its real part
/// exceeds `delta_minus > 0`.
pub fn check_condition_d(cfg: &LasotaConfig, delta_minus: f64, settings: &MeanSettings) -> Result<ConditionDReport> {
    Ok(condition_d_with_mean(cfg, delta_minus, settings)?.0)
}

fn condition_d_with_mean(
    cfg: &LasotaConfig,
    delta_minus: f64,
    settings: &MeanSettings,
) -> Result<(ConditionDReport, MeanReport)> {
    if !(delta_minus > 0.0) {
        return Err(Error::invalid(format!("delta_minus = {delta_minus} must be positive")));
    }
    let report = ergodic_mean(&cfg.delta, settings)?;
    let passes = report.converged && report.mean.re > delta_minus;
    Ok((
        ConditionDReport {
            mean: report.mean,
            delta_minus,
            converged: report.converged,
            passes,
        },
        report,
    ))
}

/// `alpha / (4 c |p|_inf)` with the sup taken over `region`.
pub fn gamma_threshold(cfg: &LasotaConfig, d: &DichotomyEstimate, region: &Window) -> Result<f64> {
    let p_norm = cfg.p.sup_norm_on(region.t0, region.t1, region.dt)?;
    if !(p_norm > 0.0) {
        return Err(Error::invalid("production rate p vanishes on the region"));
    }
    Ok(d.alpha / (4.0 * d.c * p_norm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LasotaOptions {
    pub delta_minus: f64,
    pub mean: MeanSettings,
    pub policy: TruncationPolicy,
    pub picard: PicardOptions,
}

impl LasotaOptions {
    pub fn new(delta_minus: f64) -> Self {
        LasotaOptions {
            delta_minus,
            mean: MeanSettings::default(),
            policy: TruncationPolicy::default(),
            picard: PicardOptions::default(),
        }
    }
}

fn negated(report: &MeanReport) -> MeanReport {
    let mut r = report.clone();
    r.mean = -r.mean;
    r.estimates.iter_mut().for_each(|z| *z = -*z);
    r.offset_estimates.iter_mut().for_each(|z| *z = -*z);
    r
}

/// Everything the pipeline determines on the way to the solution.
#[derive(Clone, Debug)]
pub struct LasotaSetup {
    pub condition: ConditionDReport,
    pub dichotomy: DichotomyEstimate,
    pub gamma_star: f64,
    pub problem: ProblemSpec,
    pub evolution: EvolutionField,
}

/// Condition (D), the dichotomy of `-delta` (margin chosen to maximise
/// `alpha / c`), the threshold `gamma*`, and the problem with
/// `rho = 2 c |p|_inf / alpha`.
pub fn lasota_setup(cfg: &LasotaConfig, window: &Window, options: &LasotaOptions) -> Result<LasotaSetup> {
    window.validate()?;
    cfg.validate(window)?;
    let (condition, report) = condition_d_with_mean(cfg, options.delta_minus, &options.mean)?;
    if !condition.passes {
        return Err(Error::ConditionDFailed {
            mean: condition.mean.re,
            delta_minus: options.delta_minus,
        });
    }
    let region = picard_region(window, cfg.tau, &options.policy);
    let mu = cfg.delta.clone().scaled_re(-1.0);
    let dichotomy = scalar_dichotomy_max_ratio(&mu, &negated(&report), region.t1 - region.t0)?;
    let gamma_star = gamma_threshold(cfg, &dichotomy, &region)?;
    if cfg.gamma >= gamma_star {
        return Err(Error::GammaTooLarge {
            gamma: cfg.gamma,
            threshold: gamma_star,
        });
    }
    let f_norm = forcing_norm(std::slice::from_ref(&cfg.p), window, cfg.tau, &options.policy)?;
    let rho = 2.0 * dichotomy.c * f_norm / dichotomy.alpha * (1.0 + 1e-9);
    let problem = cfg.problem(rho)?;
    let evolution = EvolutionField::with_defaults(problem.a.clone())?;
    Ok(LasotaSetup {
        condition,
        dichotomy,
        gamma_star,
        problem,
        evolution,
    })
}

#[derive(Clone, Debug)]
pub struct LasotaSolution {
    pub setup: LasotaSetup,
    pub solution: GridFunction,
    pub report: FixedPointReport,
}

/// The bounded solution on `window`, checked to be strictly positive.
pub fn solve_lasota(cfg: &LasotaConfig, window: &Window, options: &LasotaOptions) -> Result<LasotaSolution> {
    let setup = lasota_setup(cfg, window, options)?;
    let (solution, report) = picard_fixed_point(
        &setup.problem,
        &setup.evolution,
        &setup.dichotomy,
        window,
        &options.policy,
        &options.picard,
    )?;
    for k in 0..solution.len() {
        let value = solution.value(k)[0].re;
        if !(value > 0.0) {
            return Err(Error::NegativeSolution {
                t: solution.time(k),
                value,
            });
        }
    }
    Ok(LasotaSolution {
        setup,
        solution,
        report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseDiff {
    pub first: usize,
    pub second: usize,
    pub sup_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub transient: f64,
    pub threshold: f64,
    pub pairs: Vec<PairwiseDiff>,
    pub converging: bool,
}

/// Integrates the model from every history and compares all pairs after
/// the transient `15 / alpha`; converging iff every difference is below
/// `10 tol`.
pub fn stability_probe(
    cfg: &LasotaConfig,
    histories: &[History],
    t_end: f64,
    step: f64,
    alpha: f64,
    tol: f64,
) -> Result<StabilityReport> {
    if !(alpha > 0.0 && tol > 0.0) {
        return Err(Error::invalid("stability probe needs alpha > 0 and tol > 0"));
    }
    let problem = cfg.problem(1.0)?;
    let trajectories = histories
        .iter()
        .map(|h| integrate_dde(&problem, h, t_end, step))
        .collect::<Result<Vec<_>>>()?;
    let transient = TRANSIENT_FACTOR / alpha;
    let threshold = 10.0 * tol;
    let mut pairs = Vec::new();
    for i in 0..trajectories.len() {
        for j in i + 1..trajectories.len() {
            pairs.push(PairwiseDiff {
                first: i,
                second: j,
                sup_diff: compare_after_transient(&trajectories[i], &trajectories[j], transient)?,
            });
        }
    }
    let converging = pairs.iter().all(|p| p.sup_diff < threshold);
    Ok(StabilityReport {
        transient,
        threshold,
        pairs,
        converging,
    })
}
