use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("epsilon must lie in the open interval (0, 2), got {0}")]
    InvalidEpsilon(f64),

    #[error("{what} = {value} is outside the domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {value} with error {err_estimate}")]
    QuadratureNonConvergence {
        lo: f64,
        hi: f64,
        value: f64,
        err_estimate: f64,
    },

    #[error("ODE integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: &'static str },

    #[error("could not bracket eigenvalue {n}: {reason}")]
    Bracket { n: usize, reason: String },

    #[error("eigenvalue index {n} out of range (problem has {available})")]
    IndexOutOfRange { n: usize, available: usize },

    #[error("power series tail not converged at x = {x} with {terms} terms (tail estimate {tail})")]
    TailNotConverged { x: f64, terms: usize, tail: f64 },

    #[error("backward recurrence unstable at lambda = {lambda}: |d(N) - d(2N)| = {change}")]
    RecurrenceUnstable { lambda: f64, change: f64 },

    #[error("no sign change of the recurrence discrepancy on [{lo}, {hi}]; min |d| = {min_abs} at lambda = {best}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        best: f64,
        min_abs: f64,
    },

    #[error("minimisation failed: {0}")]
    Minimisation(String),
}

pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::Domain {
        what,
        value,
        domain,
    }
}
