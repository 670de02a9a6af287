use thiserror::Error;

use crate::solvers::FixedPointReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division guard tripped at t = {t}: |{shift} + u(t)| = {magnitude:e} < {eps:e}")]
    DivisionGuard {
        t: f64,
        shift: f64,
        magnitude: f64,
        eps: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shift {shift} leaves no overlap on a window of length {window}")]
    EmptyOverlap { shift: f64, window: f64 },

    #[error("requested span {span} exceeds the integration horizon {horizon}")]
    HorizonExceeded { span: f64, horizon: f64 },

    #[error("mean {mean} has real part below tolerance {tol}{}", row.map(|r| format!(" (row {r})")).unwrap_or_default())]
    ZeroMean { mean: f64, tol: f64, row: Option<usize> },

    #[error(
        "ergodic mean did not converge (horizon spread {spread:e}, uniformity deviation {uniformity:e}, tol {tol:e})"
    )]
    NotConverged { spread: f64, uniformity: f64, tol: f64 },

    #[error("fitted decay rate {alpha} is not positive")]
    NoDecay { alpha: f64 },

    #[error("matrix is not a projection: |P^2 - P| = {residual:e}")]
    NotProjection { residual: f64 },

    #[error("window too short: need {needed} samples, have {available}")]
    WindowTooShort { needed: usize, available: usize },

    #[error("phase antiderivative grows with slope {slope:e} (bound {bound:e})")]
    UnboundedPhase { slope: f64, bound: f64 },

    #[error("eigenvalue condition violated: {0}")]
    EigenvalueViolation(String),

    #[error("precondition failed: {which}")]
    PreconditionFailed {
        which: String,
        report: Box<FixedPointReport>,
    },

    #[error("iterate {iteration} left the ball: |phi - phi0| = {distance:e} > rho = {radius:e}")]
    BallEscape {
        iteration: usize,
        distance: f64,
        radius: f64,
    },

    #[error("fixed-point iteration hit max_iter = {}", report.iterations)]
    MaxIter { report: Box<FixedPointReport> },

    #[error("step {step} does not divide the delay {tau}")]
    StepMismatch { step: f64, tau: f64 },

    #[error("history: {0}")]
    History(String),

    #[error("condition (D) failed: mean {mean} is not above delta_minus = {delta_minus}")]
    ConditionDFailed { mean: f64, delta_minus: f64 },

    #[error("gamma = {gamma} is not below the threshold {threshold}")]
    GammaTooLarge { gamma: f64, threshold: f64 },

    #[error("solution is not positive: y({t}) = {value}")]
    NegativeSolution { t: f64, value: f64 },

    #[error("solution bound violated: |y| = {norm:e} > {bound:e}")]
    BoundViolation { norm: f64, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
