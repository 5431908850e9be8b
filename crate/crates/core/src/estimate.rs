use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeffs::ProblemParams;
use crate::error::{Error, Result};

/// How a window treats the endpoint `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RightEnd {
    /// Dirichlet condition pushed to the singular endpoint, which selects the
    /// bounded solution there. The published tables follow this convention.
    #[default]
    Limit,
    /// Dirichlet condition at `1 - 10^-m`.
    Truncated,
}

impl RightEnd {
    pub fn as_str(&self) -> &'static str {
        match self {
            RightEnd::Limit => "limit",
            RightEnd::Truncated => "truncated",
        }
    }
}

impl std::str::FromStr for RightEnd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "limit" => Ok(RightEnd::Limit),
            "truncated" => Ok(RightEnd::Truncated),
            other => Err(Error::InvalidArgument(format!("unknown right-end treatment '{other}'"))),
        }
    }
}

/// Distance from 1 at which [`RightEnd::Limit`] imposes its Dirichlet
/// condition. Eigenvalues are converged to well below 1e-8 there.
pub const LIMIT_CUT: f64 = 1e-15;

/// Regular truncation of the singular interval `(0, 1)`: left endpoint
/// `10^-m`, right endpoint per [`RightEnd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Window {
    m: u32,
    right: RightEnd,
}

impl Window {
    pub fn new(m: u32) -> Result<Self> {
        Self::with_right_end(m, RightEnd::default())
    }

    /// `[10^-m, 1 - 10^-m]` with Dirichlet conditions at both ends.
    pub fn truncated(m: u32) -> Result<Self> {
        Self::with_right_end(m, RightEnd::Truncated)
    }

    pub fn with_right_end(m: u32, right: RightEnd) -> Result<Self> {
        // 10^-m must stay distinguishable from 0 and 1 in f64 arithmetic.
        if (1..=15).contains(&m) {
            Ok(Self { m, right })
        } else {
            Err(Error::InvalidArgument(format!(
                "window index m = {m} must be in 1..=15"
            )))
        }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn right_end(&self) -> RightEnd {
        self.right
    }

    /// Left endpoint `10^-m`.
    pub fn a(&self) -> f64 {
        10f64.powi(-(self.m as i32))
    }

    /// `1 - b`, kept separately because `b` itself rounds near 1.
    pub fn b_gap(&self) -> f64 {
        match self.right {
            RightEnd::Limit => LIMIT_CUT,
            RightEnd::Truncated => self.a(),
        }
    }

    /// Right endpoint.
    pub fn b(&self) -> f64 {
        1.0 - self.b_gap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Shooting,
    Fd,
    Recurrence,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Shooting => "shooting",
            Method::Fd => "fd",
            Method::Recurrence => "recurrence",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "shooting" => Ok(Method::Shooting),
            "fd" => Ok(Method::Fd),
            "recurrence" => Ok(Method::Recurrence),
            other => Err(Error::InvalidArgument(format!("unknown method '{other}'"))),
        }
    }
}

/// One computed eigenvalue. `mu` is authoritative; `lambda = eps mu / 2` is
/// derived from it at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub epsilon: f64,
    pub n: usize,
    pub mu: f64,
    pub lambda: f64,
    pub method: Method,
    /// `None` when the estimate targets the full singular problem.
    pub window: Option<Window>,
    pub tol: f64,
    pub bracket: (f64, f64),
}

impl EigenEstimate {
    pub fn new(
        params: &ProblemParams,
        n: usize,
        mu: f64,
        method: Method,
        window: Option<Window>,
        tol: f64,
        bracket: (f64, f64),
    ) -> Self {
        Self {
            epsilon: params.epsilon(),
            n,
            mu,
            lambda: params.lambda_from_mu(mu),
            method,
            window,
            tol,
            bracket,
        }
    }

    pub fn m(&self) -> Option<u32> {
        self.window.map(|w| w.m())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_endpoints() {
        let w = Window::truncated(3).unwrap();
        assert_eq!(w.a(), 1e-3);
        assert_eq!(w.b(), 1.0 - 1e-3);
        assert!(w.a() < w.b());
        let w = Window::new(3).unwrap();
        assert_eq!(w.right_end(), RightEnd::Limit);
        assert_eq!(w.b_gap(), LIMIT_CUT);
        assert_eq!("Truncated".parse::<RightEnd>().unwrap(), RightEnd::Truncated);
        assert!(Window::new(0).is_err());
        assert!(Window::new(16).is_err());
    }

    #[test]
    fn lambda_follows_mu() {
        let p = ProblemParams::new(0.5).unwrap();
        let e = EigenEstimate::new(&p, 1, 4.0, Method::Fd, None, 1e-6, (3.9, 4.1));
        assert_eq!(e.lambda, 1.0);
    }

    #[test]
    fn method_parsing() {
        assert_eq!("FD".parse::<Method>().unwrap(), Method::Fd);
        assert_eq!(" recurrence".parse::<Method>().unwrap(), Method::Recurrence);
        assert!("pruess".parse::<Method>().is_err());
    }
}
