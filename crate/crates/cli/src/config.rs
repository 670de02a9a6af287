use std::path::{Path, PathBuf};

use automorph::dichotomy::DichotomyEstimate;
use automorph::greenop::TruncationPolicy;
use automorph::lasota::LasotaConfig;
use automorph::signals::{ScalarSignal, Window};
use automorph::solvers::ProblemSpec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            t0: 0.0,
            t1: 40.0,
            dt: 0.01,
        }
    }
}

impl GridConfig {
    pub fn window(&self) -> Result<Window, CliError> {
        Window::new(self.t0, self.t1, self.dt).map_err(|e| CliError::Config(format!("grid: {e}")))
    }
}

/// Parses `t0,t1,dt`.
pub fn parse_grid(s: &str) -> Result<GridConfig, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected t0,t1,dt, got `{s}`"));
    }
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"));
    Ok(GridConfig {
        t0: num(parts[0])?,
        t1: num(parts[1])?,
        dt: num(parts[2])?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Truncation tolerance of the Green integrals.
    pub quad_tol: f64,
    /// Fixed-point stopping tolerance.
    pub fp_tol: f64,
    pub mean_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            quad_tol: 1e-8,
            fp_tol: 1e-8,
            mean_tol: 1e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Truncation {
    #[serde(rename = "T_max")]
    pub t_max: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { t_max: 100.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            formats: vec!["csv".into(), "json".into()],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, format: &str) -> bool {
        self.formats.iter().any(|f| f == format)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateGrid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AaTestConfig {
    pub epsilon: f64,
    pub candidates: Option<Vec<f64>>,
    pub candidate_grid: Option<CandidateGrid>,
    pub horizon: f64,
    pub bound_tol: f64,
}

impl Default for AaTestConfig {
    fn default() -> Self {
        AaTestConfig {
            epsilon: 0.1,
            candidates: None,
            candidate_grid: None,
            horizon: 100.0,
            bound_tol: 1e-2,
        }
    }
}

/// Everything a subcommand reads from its JSON configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// A `ProblemSpec` or a `LasotaConfig`, told apart by the `delta` key.
    #[serde(default)]
    pub problem: Option<Value>,
    /// Signal for `mean` and `aa-test`.
    #[serde(default)]
    pub signal: Option<ScalarSignal>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub truncation: Truncation,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub delta_minus: Option<f64>,
    /// User-supplied dichotomy; derived from `A` when absent.
    #[serde(default)]
    pub dichotomy: Option<DichotomyEstimate>,
    /// Initial value for the oscillatory and constant-coefficient solvers.
    #[serde(default, with = "automorph::io::complex_vec")]
    pub initial: Vec<Complex64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    /// Names of the `verify` checks to run; all of them when absent.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    #[serde(default)]
    pub aa_test: AaTestConfig,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Spec(ProblemSpec),
    Lasota(LasotaConfig),
}

fn path_error<E: std::fmt::Display>(prefix: &str, err: serde_path_to_error::Error<E>) -> CliError {
    let path = err.path().to_string();
    let field = if path == "." {
        prefix.trim_end_matches('.').to_string()
    } else {
        format!("{prefix}{path}")
    };
    if field.is_empty() {
        CliError::Config(err.into_inner().to_string())
    } else {
        CliError::Config(format!("{field}: {}", err.into_inner()))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| path_error("", e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.grid.window()?;
        let t = &self.tolerances;
        for (name, v) in [("quad_tol", t.quad_tol), ("fp_tol", t.fp_tol), ("mean_tol", t.mean_tol)] {
            if !(v > 0.0) {
                return Err(CliError::Config(format!(
                    "tolerances.{name}: must be positive, got {v}"
                )));
            }
        }
        if !(self.truncation.t_max > 0.0) {
            return Err(CliError::Config("truncation.T_max: must be positive".into()));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let value = self
            .problem
            .as_ref()
            .ok_or_else(|| CliError::Config("problem: missing".into()))?;
        if value.get("delta").is_some() {
            let cfg: LasotaConfig = serde_path_to_error::deserialize(value).map_err(|e| path_error("problem.", e))?;
            Ok(Problem::Lasota(cfg))
        } else {
            let spec: ProblemSpec = serde_path_to_error::deserialize(value).map_err(|e| path_error("problem.", e))?;
            spec.validate().map_err(|e| CliError::Config(format!("problem: {e}")))?;
            Ok(Problem::Spec(spec))
        }
    }

    pub fn policy(&self) -> Result<TruncationPolicy, CliError> {
        Ok(TruncationPolicy::new(self.tolerances.quad_tol, self.truncation.t_max)?)
    }
}
