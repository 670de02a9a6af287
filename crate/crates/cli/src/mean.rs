use std::path::Path;

use automorph::lasota::ConditionDReport;
use automorph::signals::{ergodic_mean, MeanReport};
use serde::{Deserialize, Serialize};

use crate::support::{mean_settings, write_json};
use crate::{exit, CliError, Problem, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanOutput {
    #[serde(flatten)]
    pub report: MeanReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_d: Option<ConditionDReport>,
}

/// Ergodic mean of `signal` (or of the Lasota `delta`), written to
/// `mean.json`.
pub fn cmd_mean(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let signal = match (&cfg.signal, &cfg.problem) {
        (Some(s), _) => s.clone(),
        (None, Some(_)) => match cfg.problem()? {
            Problem::Lasota(l) => l.delta,
            Problem::Spec(_) => return Err(CliError::Config("signal: missing".into())),
        },
        (None, None) => return Err(CliError::Config("signal: missing".into())),
    };
    let report = ergodic_mean(&signal, &mean_settings(cfg))?;
    let condition_d = cfg.delta_minus.map(|delta_minus| ConditionDReport {
        mean: report.mean,
        delta_minus,
        converged: report.converged,
        passes: report.converged && report.mean.re > delta_minus,
    });
    let code = if report.converged {
        exit::OK
    } else {
        exit::NOT_CONVERGED
    };
    write_json(cfg, out, "mean.json", &MeanOutput { report, condition_d })?;
    Ok(code)
}
