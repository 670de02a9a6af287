use std::path::Path;

use automorph::dichotomy::{scalar_dichotomy_from_mean, DichotomyEstimate, EvolutionField};
use automorph::signals::{ergodic_mean, GridFunction, ScalarSignal};
use automorph::solvers::{
    picard_fixed_point, solve_constant, solve_linear_green, solve_scalar_massera, solve_scalar_oscillatory,
    solve_triangular, triangular_estimates, PicardOptions, ProblemSpec,
};
use automorph::Error;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::support::{dichotomy_for, initial_value, mean_settings, write_csv, write_json};
use crate::{exit, CliError, Problem, RunConfig};

/// `report.json` of a linear solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearReport {
    pub method: String,
    pub sup_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dichotomy: Option<DichotomyEstimate>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub row_dichotomies: Vec<DichotomyEstimate>,
}

/// Dispatches on the shape of the problem: Picard iteration for a
/// nonlinearity or delay, otherwise Massera (scalar), the oscillatory
/// formula (scalar with purely imaginary `A`), back-substitution
/// (triangular), the constant-coefficient formula (unit-modulus spectrum) or
/// the Green operator.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let spec = match cfg.problem()? {
        Problem::Spec(s) => s,
        Problem::Lasota(_) => {
            return Err(CliError::Config(
                "problem: Lasota configurations are solved by the `lasota` subcommand".into(),
            ))
        }
    };
    if !spec.g.is_none() || spec.tau > 0.0 {
        return solve_picard(cfg, &spec, out);
    }
    let (y, report) = solve_linear(cfg, &spec)?;
    write_csv(cfg, out, "solution.csv", &y)?;
    write_json(cfg, out, "report.json", &report)?;
    Ok(exit::OK)
}

fn solve_picard(cfg: &RunConfig, spec: &ProblemSpec, out: &Path) -> Result<i32, CliError> {
    let window = cfg.grid.window()?;
    let policy = cfg.policy()?;
    let d = dichotomy_for(cfg, &spec.a)?;
    let e = EvolutionField::with_defaults(spec.a.clone())?;
    let options = PicardOptions {
        tol: cfg.tolerances.fp_tol,
        max_iter: cfg.max_iter.unwrap_or(PicardOptions::default().max_iter),
    };
    match picard_fixed_point(spec, &e, &d, &window, &policy, &options) {
        Ok((y, report)) => {
            write_csv(cfg, out, "solution.csv", &y)?;
            write_json(cfg, out, "report.json", &report)?;
            Ok(exit::OK)
        }
        Err(Error::PreconditionFailed { which, report }) => {
            eprintln!("precondition failed: {which}");
            write_json(cfg, out, "report.json", &report)?;
            Ok(exit::PRECONDITION)
        }
        Err(Error::MaxIter { report }) => {
            eprintln!("no convergence after {} iterations", report.iterations);
            write_json(cfg, out, "report.json", &report)?;
            Ok(exit::MAX_ITER)
        }
        Err(e) => Err(e.into()),
    }
}

fn is_purely_imaginary(s: &ScalarSignal, cfg: &RunConfig) -> Result<bool, CliError> {
    let w = cfg.grid.window()?;
    for k in 0..w.len() {
        if s.eval(w.time(k))?.re != 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn linear_report(method: &str, y: &GridFunction) -> LinearReport {
    LinearReport {
        method: method.into(),
        sup_norm: y.sup_norm(),
        dichotomy: None,
        row_dichotomies: Vec::new(),
    }
}

fn solve_linear(cfg: &RunConfig, spec: &ProblemSpec) -> Result<(GridFunction, LinearReport), CliError> {
    let window = cfg.grid.window()?;
    let policy = cfg.policy()?;
    let a = &spec.a;
    let p = a.dim();
    if cfg.dichotomy.is_none() {
        if p == 1 {
            let mu = a.entry(0, 0);
            let report = ergodic_mean(mu, &mean_settings(cfg))?;
            if report.converged && report.mean.re.abs() >= report.tol {
                let d = scalar_dichotomy_from_mean(mu, &report, cfg.truncation.t_max)?;
                let y = solve_scalar_massera(mu, &spec.f[0], &d, &window, &policy)?;
                let mut r = linear_report("massera", &y);
                r.dichotomy = Some(d);
                return Ok((y, r));
            }
            if is_purely_imaginary(mu, cfg)? {
                let phase = mu.clone().scaled(Complex64::new(0.0, -1.0));
                let v = initial_value(cfg, 1)?[0];
                let (y, _) = solve_scalar_oscillatory(&phase, v, &spec.f[0], &window)?;
                return Ok((y.clone(), linear_report("oscillatory", &y)));
            }
        } else if a.is_upper_triangular() && !a.is_diagonal() {
            let estimates = triangular_estimates(a, &mean_settings(cfg), cfg.truncation.t_max)?;
            let y = solve_triangular(a, &spec.f, &estimates, &window, &policy)?;
            let mut r = linear_report("triangular", &y);
            r.row_dichotomies = estimates;
            return Ok((y, r));
        } else if a.is_constant() {
            let a0 = a.eval(0.0)?;
            let unit = automorph::linalg::eigenvalues(&a0)?
                .iter()
                .all(|l| (l.norm() - 1.0).abs() <= automorph::solvers::EIGEN_TOL);
            if unit {
                let v = initial_value(cfg, p)?;
                let (y, _) = solve_constant(&a0, &v, &spec.f, &window)?;
                return Ok((y.clone(), linear_report("constant", &y)));
            }
        }
    }
    let d = dichotomy_for(cfg, a)?;
    let e = EvolutionField::with_defaults(a.clone())?;
    let y = solve_linear_green(spec, &e, &d, &window, &policy)?;
    let mut r = linear_report("green", &y);
    r.dichotomy = Some(d);
    Ok((y, r))
}
