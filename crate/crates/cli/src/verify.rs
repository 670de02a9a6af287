use std::path::Path;

use automorph::dichotomy::{
    green_matrix, square_samples, verify_identity_lemma, DichotomyEstimate, EvolutionField, EvolutionOptions,
};
use automorph::greenop::TruncationPolicy;
use automorph::linalg::spectral_norm;
use automorph::oracle::{compare_after_transient, integrate_dde, History, TRANSIENT_FACTOR};
use automorph::signals::{GridFunction, Window};
use automorph::solvers::{
    picard_fixed_point, solve_linear_green, FixedPointReport, FixedPointStatus, Nonlinearity, PicardOptions,
    ProblemSpec,
};
use automorph::Error;
use serde::{Deserialize, Serialize};

use crate::support::{dichotomy_for, oracle_step, write_json};
use crate::{exit, CliError, Problem, RunConfig};

pub const ALL_CHECKS: [&str; 6] = [
    "cocycle",
    "identity_lemma",
    "green_bound",
    "solution_bound",
    "contraction_rate",
    "oracle_agreement",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl CheckResult {
    fn upper(check: &str, value: f64, bound: f64) -> Self {
        CheckResult {
            check: check.into(),
            value,
            bound,
            pass: value <= bound,
        }
    }
}

struct Context<'a> {
    cfg: &'a RunConfig,
    spec: ProblemSpec,
    window: Window,
    policy: TruncationPolicy,
    e: EvolutionField,
    d: DichotomyEstimate,
    picard: Option<Result<(GridFunction, FixedPointReport), Error>>,
}

impl Context<'_> {
    fn is_linear(&self) -> bool {
        self.spec.g.is_none() && self.spec.tau == 0.0
    }

    /// The linear solution for linear problems, the fixed point otherwise.
    fn trajectory(&mut self) -> Option<GridFunction> {
        if self.is_linear() {
            solve_linear_green(&self.spec, &self.e, &self.d, &self.window, &self.policy).ok()
        } else {
            self.solution().as_ref().ok().map(|(y, _)| y.clone())
        }
    }
}

impl Context<'_> {
    fn solution(&mut self) -> &Result<(GridFunction, FixedPointReport), Error> {
        if self.picard.is_none() {
            let options = PicardOptions {
                tol: self.cfg.tolerances.fp_tol,
                max_iter: self.cfg.max_iter.unwrap_or(PicardOptions::default().max_iter),
            };
            self.picard = Some(picard_fixed_point(
                &self.spec,
                &self.e,
                &self.d,
                &self.window,
                &self.policy,
                &options,
            ));
        }
        self.picard.as_ref().expect("just computed")
    }
}

fn probe_times(w: &Window) -> [f64; 3] {
    let span = (w.t1 - w.t0).min(8.0);
    [w.t0 + 0.0625 * span, w.t0 + 0.25 * span, w.t0 + 0.5 * span]
}

fn cocycle(ctx: &Context) -> Result<CheckResult, CliError> {
    let [a, b, c] = probe_times(&ctx.window);
    let mut worst = 0.0f64;
    for (t, r, s) in [(c, b, a), (a, b, c), (b, c, a)] {
        let full = ctx.e.evolution(t, s)?;
        let split = ctx.e.evolution(t, r)? * ctx.e.evolution(r, s)?;
        worst = worst.max(spectral_norm(&(&full - split)) / spectral_norm(&full).max(1.0));
    }
    Ok(CheckResult::upper("cocycle", worst, 1e-8))
}

fn identity_lemma(ctx: &Context) -> Result<CheckResult, CliError> {
    let [s, _, t] = probe_times(&ctx.window);
    let mut worst = 0.0f64;
    for xi in [0.0, 0.1] {
        worst = worst.max(verify_identity_lemma(&ctx.e, &ctx.e, t, s, xi)?);
        worst = worst.max(verify_identity_lemma(&ctx.e, &ctx.e, s, t, xi)?);
    }
    Ok(CheckResult::upper("identity_lemma", worst, 1e-6))
}

/// `max |G(t, s)| / (c e^{-alpha |t - s|})` over a sample grid.
fn green_bound(ctx: &Context) -> Result<CheckResult, CliError> {
    let w = &ctx.window;
    let samples = square_samples(w.t0, w.t0 + (w.t1 - w.t0).min(10.0), 10);
    let mut worst = 0.0f64;
    for (t, s) in samples {
        let g = green_matrix(&ctx.e, &ctx.d, t, s)?;
        worst = worst.max(spectral_norm(&g) / ctx.d.envelope((t - s).abs()));
    }
    Ok(CheckResult::upper("green_bound", worst, 1.0 + 1e-9))
}

fn solution_bound(ctx: &Context) -> Result<CheckResult, CliError> {
    let linear = ProblemSpec {
        g: Nonlinearity::None,
        tau: 0.0,
        ..ctx.spec.clone()
    };
    match solve_linear_green(&linear, &ctx.e, &ctx.d, &ctx.window, &ctx.policy) {
        Ok(y) => {
            let m = automorph::solvers::forcing_norm(&linear.f, &ctx.window, 0.0, &ctx.policy)?;
            let bound = 2.0 * ctx.d.c / ctx.d.alpha * m + ctx.policy.tol;
            Ok(CheckResult::upper("solution_bound", y.sup_norm(), bound))
        }
        Err(Error::BoundViolation { norm, bound }) => Ok(CheckResult::upper("solution_bound", norm, bound)),
        Err(e) => Err(e.into()),
    }
}

fn contraction_rate(ctx: &mut Context) -> Result<CheckResult, CliError> {
    if ctx.is_linear() {
        return Ok(CheckResult::upper("contraction_rate", 0.0, 0.0));
    }
    match ctx.solution() {
        Ok((_, report)) => {
            let bound = 1.2 * report.apriori_rate;
            let value = report.measured_rate;
            Ok(CheckResult {
                check: "contraction_rate".into(),
                value,
                bound,
                pass: report.status == FixedPointStatus::Converged && value <= bound,
            })
        }
        Err(Error::PreconditionFailed { report, .. }) | Err(Error::MaxIter { report }) => Ok(CheckResult {
            check: "contraction_rate".into(),
            value: report.measured_rate,
            bound: 1.2 * report.apriori_rate,
            pass: false,
        }),
        Err(e) => Err(CliError::Config(format!("problem: {e}"))),
    }
}

fn oracle_agreement(ctx: &mut Context) -> Result<CheckResult, CliError> {
    let transient = TRANSIENT_FACTOR / ctx.d.alpha;
    let (w, tau, dim) = (ctx.window, ctx.spec.tau, ctx.spec.dim());
    let spec = ctx.spec.clone();
    let Some(y) = ctx.trajectory() else {
        return Ok(CheckResult::upper("oracle_agreement", f64::INFINITY, 1e-4));
    };
    let history = History::constant(&vec![0.0; dim], w.t0, tau)?;
    let trajectory = integrate_dde(&spec, &history, w.t1, oracle_step(w.dt, tau))?;
    let value = match compare_after_transient(&y, &trajectory, transient) {
        Ok(v) => v,
        Err(Error::EmptyOverlap { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    Ok(CheckResult::upper("oracle_agreement", value, 1e-4))
}

/// Runs the requested invariant checks and writes `verify.json`; exit 5 if
/// any fails.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let names: Vec<String> = match &cfg.checks {
        Some(list) => list.clone(),
        None => ALL_CHECKS.iter().map(|s| s.to_string()).collect(),
    };
    if let Some(bad) = names.iter().find(|n| !ALL_CHECKS.contains(&n.as_str())) {
        return Err(CliError::Config(format!("checks: unknown check `{bad}`")));
    }
    let mut results = Vec::with_capacity(names.len());
    if !names.is_empty() {
        let spec = match cfg.problem()? {
            Problem::Spec(s) => s,
            Problem::Lasota(_) => {
                return Err(CliError::Config("problem: `verify` expects a ProblemSpec".into()));
            }
        };
        let window = cfg.grid.window()?;
        let e = EvolutionField::new(spec.a.clone(), window.t0, window.t1, EvolutionOptions::default())?;
        let mut ctx = Context {
            cfg,
            d: dichotomy_for(cfg, &spec.a)?,
            spec,
            window,
            policy: cfg.policy()?,
            e,
            picard: None,
        };
        for name in &names {
            let r = match name.as_str() {
                "cocycle" => cocycle(&ctx)?,
                "identity_lemma" => identity_lemma(&ctx)?,
                "green_bound" => green_bound(&ctx)?,
                "solution_bound" => solution_bound(&ctx)?,
                "contraction_rate" => contraction_rate(&mut ctx)?,
                _ => oracle_agreement(&mut ctx)?,
            };
            results.push(r);
        }
    }
    write_json(cfg, out, "verify.json", &results)?;
    for r in results.iter().filter(|r| !r.pass) {
        eprintln!("check {} failed: value {:e} > bound {:e}", r.check, r.value, r.bound);
    }
    Ok(if results.iter().all(|r| r.pass) {
        exit::OK
    } else {
        exit::CHECK_FAILED
    })
}
