use std::path::Path;

use automorph::dichotomy::DichotomyEstimate;
use automorph::lasota::{solve_lasota, stability_probe, ConditionDReport, LasotaOptions, StabilityReport};
use automorph::oracle::{compare_after_transient, integrate_dde, History, TRANSIENT_FACTOR};
use automorph::solvers::{FixedPointReport, PicardOptions};
use automorph::Error;
use serde::{Deserialize, Serialize};

use crate::support::{mean_settings, oracle_step, write_csv, write_json};
use crate::{exit, CliError, Problem, RunConfig};

/// Constant histories of the stability probe.
pub const HISTORY_LEVELS: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LasotaReport {
    pub status: String,
    pub gamma: f64,
    pub gamma_star: f64,
    pub condition_d: ConditionDReport,
    pub dichotomy: DichotomyEstimate,
    pub fixed_point: FixedPointReport,
    /// Sup-difference to a method-of-steps trajectory after the transient.
    pub oracle_sup_diff: f64,
    pub stability: StabilityReport,
}

#[derive(Serialize)]
struct LasotaFailure {
    status: &'static str,
    error: String,
}

/// Condition (D), threshold, fixed point and stability probe; writes
/// `solution.csv` and `lasota_report.json`. Exit 3 when condition (D) fails
/// or `gamma` is not below the threshold.
pub fn cmd_lasota(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let lasota = match cfg.problem()? {
        Problem::Lasota(l) => l,
        Problem::Spec(_) => {
            return Err(CliError::Config(
                "problem: `lasota` expects delta, p, gamma, tau".into(),
            ))
        }
    };
    let delta_minus = cfg
        .delta_minus
        .ok_or_else(|| CliError::Config("delta_minus: required by `lasota`".into()))?;
    let window = cfg.grid.window()?;
    let options = LasotaOptions {
        delta_minus,
        mean: mean_settings(cfg),
        policy: cfg.policy()?,
        picard: PicardOptions {
            tol: cfg.tolerances.fp_tol,
            max_iter: cfg.max_iter.unwrap_or(PicardOptions::default().max_iter),
        },
    };
    let sol = match solve_lasota(&lasota, &window, &options) {
        Ok(sol) => sol,
        Err(e @ (Error::GammaTooLarge { .. } | Error::ConditionDFailed { .. })) => {
            let status = if matches!(e, Error::GammaTooLarge { .. }) {
                "gamma_too_large"
            } else {
                "condition_d_failed"
            };
            eprintln!("{e}");
            write_json(
                cfg,
                out,
                "lasota_report.json",
                &LasotaFailure {
                    status,
                    error: e.to_string(),
                },
            )?;
            return Ok(exit::PRECONDITION);
        }
        Err(Error::PreconditionFailed { report, .. }) => {
            write_json(cfg, out, "lasota_report.json", &report)?;
            return Ok(exit::PRECONDITION);
        }
        Err(Error::MaxIter { report }) => {
            write_json(cfg, out, "lasota_report.json", &report)?;
            return Ok(exit::MAX_ITER);
        }
        Err(e) => return Err(e.into()),
    };

    let step = oracle_step(window.dt, lasota.tau);
    let alpha = sol.setup.dichotomy.alpha;
    let histories = HISTORY_LEVELS
        .iter()
        .map(|v| History::constant(&[*v], window.t0, lasota.tau))
        .collect::<automorph::Result<Vec<_>>>()?;
    let stability = stability_probe(&lasota, &histories, window.t1, step, alpha, cfg.tolerances.fp_tol)?;
    let trajectory = integrate_dde(&sol.setup.problem, &histories[2], window.t1, step)?;
    let oracle_sup_diff = compare_after_transient(&sol.solution, &trajectory, TRANSIENT_FACTOR / alpha)?;

    let report = LasotaReport {
        status: if stability.converging {
            "converged_stable"
        } else {
            "converged_unstable"
        }
        .into(),
        gamma: lasota.gamma,
        gamma_star: sol.setup.gamma_star,
        condition_d: sol.setup.condition.clone(),
        dichotomy: sol.setup.dichotomy.clone(),
        fixed_point: sol.report.clone(),
        oracle_sup_diff,
        stability,
    };
    write_csv(cfg, out, "solution.csv", &sol.solution)?;
    write_json(cfg, out, "lasota_report.json", &report)?;
    Ok(exit::OK)
}
