use std::path::Path;

use automorph::signals::{
    bounded_antiderivative_check, sample, translation_recurrence_test, AntiderivativeReport, RecurrenceReport,
};
use serde::{Deserialize, Serialize};

use crate::support::write_json;
use crate::{exit, CliError, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AaTestOutput {
    pub recurrence: RecurrenceReport,
    pub antiderivative: AntiderivativeReport,
}

/// Translation-number search on the sampled `signal` plus the bounded
/// antiderivative check; writes `aa_test.json`.
pub fn cmd_aa_test(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let signal = cfg
        .signal
        .as_ref()
        .ok_or_else(|| CliError::Config("signal: required by `aa-test`".into()))?;
    let window = cfg.grid.window()?;
    let opts = &cfg.aa_test;
    let candidates = match (&opts.candidates, &opts.candidate_grid) {
        (Some(list), _) => list.clone(),
        (None, Some(g)) => {
            if !(g.step > 0.0 && g.to >= g.from) {
                return Err(CliError::Config(
                    "aa_test.candidate_grid: needs step > 0 and to >= from".into(),
                ));
            }
            let n = ((g.to - g.from) / g.step + 1e-9).floor() as usize;
            (0..=n).map(|k| g.from + k as f64 * g.step).collect()
        }
        (None, None) => {
            let half = 0.5 * (window.t1 - window.t0);
            let step = 10.0 * window.dt;
            let n = (half / step).floor() as usize;
            (1..=n).map(|k| k as f64 * step).collect()
        }
    };
    let g = sample(signal, window.t0, window.dt, window.len())?;
    let recurrence = translation_recurrence_test(&g, &candidates, opts.epsilon)?;
    let antiderivative = bounded_antiderivative_check(signal, opts.horizon, opts.bound_tol)?;
    write_json(
        cfg,
        out,
        "aa_test.json",
        &AaTestOutput {
            recurrence,
            antiderivative,
        },
    )?;
    Ok(exit::OK)
}
