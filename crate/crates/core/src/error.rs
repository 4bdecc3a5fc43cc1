use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid bracket: both ends of [{lo}, {hi}] terminate as {flag}")]
    BracketInvalid { lo: f64, hi: f64, flag: String },

    #[error("bisection did not converge after {iterations} iterations (width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },

    #[error("integrator step size underflow at r = {r:e}")]
    StepFailure { r: f64 },

    #[error("quotient increased at step {step} ({before:.17e} -> {after:.17e}); reduce dt")]
    NonDecrease { step: usize, before: f64, after: f64 },

    #[error("finite-difference error dominates the identity residual; refine the grid")]
    GridTooCoarse,

    #[error("nonlinear fixed-point iteration diverged at t = {t}")]
    SolverDiverged { t: f64 },

    #[error("time {t} is outside [0, {horizon})")]
    InvalidTime { t: f64, horizon: f64 },

    #[error("operation requires the mass-critical exponent p = 2 + 4/d (got p = {p})")]
    NotMassCritical { p: f64 },

    #[error("operation requires the critical coupling c = c_* (got c = {c})")]
    NotCriticalCoupling { c: f64 },

    #[error("profile mass {mass} differs from ground-state mass {expected}")]
    MassMismatch { mass: f64, expected: f64 },

    #[error("ground state was computed for different parameters")]
    ParamsMismatch,

    #[error("malformed CSV at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },

    #[error("radial nodes must be positive and strictly increasing (index {index})")]
    NonMonotoneGrid { index: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 1 for validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BracketInvalid { .. }
            | Error::NoConvergence { .. }
            | Error::StepFailure { .. }
            | Error::NonDecrease { .. }
            | Error::GridTooCoarse
            | Error::SolverDiverged { .. } => 2,
            _ => 1,
        }
    }
}
