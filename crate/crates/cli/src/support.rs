use std::fs;
use std::path::Path;

use automorph::dichotomy::{
    estimate_dichotomy, scalar_dichotomy_from_mean, square_samples, DichotomyEstimate, DichotomyMethod, EvolutionField,
};
use automorph::linalg::{stable_spectral_projection, CMatrix};
use automorph::signals::{ergodic_mean, GridFunction, MatrixSignal, MeanSettings};
use num_complex::Complex64;
use serde::Serialize;

use crate::{CliError, RunConfig};

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

pub(crate) fn write_json<T: Serialize>(cfg: &RunConfig, dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    if !cfg.output.wants("json") {
        return Ok(());
    }
    ensure_dir(dir)?;
    let path = dir.join(name);
    let text = automorph::io::to_json_string(value)?;
    fs::write(&path, text).map_err(|e| io_error(&path, e))
}

pub(crate) fn write_csv(cfg: &RunConfig, dir: &Path, name: &str, grid: &GridFunction) -> Result<(), CliError> {
    if !cfg.output.wants("csv") {
        return Ok(());
    }
    ensure_dir(dir)?;
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(|e| io_error(&path, e))?;
    grid.write_csv(std::io::BufWriter::new(file))?;
    Ok(())
}

pub(crate) fn mean_settings(cfg: &RunConfig) -> MeanSettings {
    MeanSettings {
        tol: cfg.tolerances.mean_tol,
        ..MeanSettings::default()
    }
}

/// A dichotomy for `A` when none is supplied: per-entry ergodic means for
/// diagonal `A`, the spectral splitting with a sampled `(c, alpha)` fit for
/// constant `A`.
pub fn derive_dichotomy(a: &MatrixSignal, settings: &MeanSettings, window: f64) -> Result<DichotomyEstimate, CliError> {
    let p = a.dim();
    if a.is_diagonal() {
        let mut proj = CMatrix::zeros(p, p);
        let (mut c, mut alpha) = (1.0f64, f64::INFINITY);
        for k in 0..p {
            let entry = a.entry(k, k);
            let report = ergodic_mean(entry, settings)?;
            let d = scalar_dichotomy_from_mean(entry, &report, window)?;
            proj[(k, k)] = d.projection()[(0, 0)];
            c = c.max(d.c);
            alpha = alpha.min(d.alpha);
        }
        return Ok(DichotomyEstimate::new(
            proj,
            c,
            alpha,
            window,
            DichotomyMethod::ErgodicMean,
        )?);
    }
    if a.is_constant() {
        let a0 = a.eval(0.0)?;
        let proj = stable_spectral_projection(&a0)?;
        let e = EvolutionField::with_defaults(a.clone())?;
        return Ok(estimate_dichotomy(&e, &proj, &square_samples(0.0, 10.0, 12))?);
    }
    Err(CliError::Config(
        "dichotomy: a time-dependent non-diagonal A needs a user-supplied `dichotomy`".into(),
    ))
}

pub(crate) fn dichotomy_for(cfg: &RunConfig, a: &MatrixSignal) -> Result<DichotomyEstimate, CliError> {
    match &cfg.dichotomy {
        Some(d) if d.dim() != a.dim() => Err(CliError::Config("dichotomy: dimension does not match A".into())),
        Some(d) => Ok(d.clone()),
        None => derive_dichotomy(a, &mean_settings(cfg), cfg.truncation.t_max),
    }
}

/// Initial value from the config, zero when absent.
pub(crate) fn initial_value(cfg: &RunConfig, dim: usize) -> Result<Vec<Complex64>, CliError> {
    if cfg.initial.is_empty() {
        Ok(vec![Complex64::new(0.0, 0.0); dim])
    } else if cfg.initial.len() == dim {
        Ok(cfg.initial.clone())
    } else {
        Err(CliError::Config(format!(
            "initial: expected {dim} components, got {}",
            cfg.initial.len()
        )))
    }
}

/// Largest step not above `dt` that divides `tau`.
pub(crate) fn oracle_step(dt: f64, tau: f64) -> f64 {
    if tau > 0.0 {
        tau / (tau / dt - 1e-9).ceil()
    } else {
        dt
    }
}
