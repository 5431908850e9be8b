//! Coefficients of the Sturm–Liouville form `-(p u')' = mu w u` on `(0, 1)`:
//!
//! ```text
//! p(x) = (1 - x)^(1 + 1/eps) (1 + x)^(1 - 1/eps)
//! w(x) = x^-1 (1 - x)^(1/eps) (1 + x)^(-1/eps)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// The single physical parameter `epsilon`, restricted to the open interval `(0, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    epsilon: f64,
}

impl ProblemParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 && epsilon < 2.0 {
            Ok(Self { epsilon })
        } else {
            Err(Error::InvalidEpsilon(epsilon))
        }
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Exponent of `(1 - x)` in `p`.
    #[inline]
    pub(crate) fn p_exp_minus(&self) -> f64 {
        1.0 + 1.0 / self.epsilon
    }

    /// Exponent of `(1 + x)` in `p`.
    #[inline]
    pub(crate) fn p_exp_plus(&self) -> f64 {
        1.0 - 1.0 / self.epsilon
    }

    /// `lambda = eps * mu / 2`.
    #[inline]
    pub fn lambda_from_mu(&self, mu: f64) -> f64 {
        0.5 * self.epsilon * mu
    }

    /// `mu = 2 lambda / eps`.
    #[inline]
    pub fn mu_from_lambda(&self, lambda: f64) -> f64 {
        2.0 * lambda / self.epsilon
    }
}

/// `base^exp` for `base >= 0`, exact at `base == 0`.
#[inline]
pub(crate) fn pow_nonneg(base: f64, exp: f64) -> f64 {
    if base == 0.0 {
        if exp > 0.0 {
            0.0
        } else if exp == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        (exp * base.ln()).exp()
    }
}

/// `p` evaluated from `xc = 1 - x`, which may be known more accurately than `x`.
#[inline]
pub(crate) fn p_split(x: f64, xc: f64, params: &ProblemParams) -> f64 {
    pow_nonneg(xc, params.p_exp_minus()) * pow_nonneg(1.0 + x, params.p_exp_plus())
}

/// `p'` evaluated from `(x, 1 - x)`.
#[inline]
pub(crate) fn p_prime_split(x: f64, xc: f64, params: &ProblemParams) -> f64 {
    let a = params.p_exp_minus();
    let b = params.p_exp_plus();
    pow_nonneg(xc, a - 1.0) * pow_nonneg(1.0 + x, b - 1.0) * (b * xc - a * (1.0 + x))
}

#[inline]
pub(crate) fn w_split(x: f64, xc: f64, params: &ProblemParams) -> f64 {
    let e = 1.0 / params.epsilon();
    pow_nonneg(xc / (1.0 + x), e) / x
}

/// Evaluators for `p`, `p'` and `w` bound to one `epsilon`.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientSet {
    params: ProblemParams,
}

impl CoefficientSet {
    pub fn new(params: ProblemParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn p(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain("x", x, "[0, 1]"));
        }
        Ok(p_split(x, 1.0 - x, &self.params))
    }

    pub fn p_prime(&self, x: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&x) {
            return Err(domain("x", x, "[0, 1)"));
        }
        Ok(p_prime_split(x, 1.0 - x, &self.params))
    }

    pub fn w(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(domain("x", x, "(0, 1)"));
        }
        Ok(w_split(x, 1.0 - x, &self.params))
    }

    /// `w / p = 1 / (x (1 - x) (1 + x))`; the epsilon-dependent exponents cancel.
    pub fn w_over_p(&self, x: f64) -> Result<f64> {
        w_over_p(x)
    }
}

pub fn p(x: f64, params: &ProblemParams) -> Result<f64> {
    CoefficientSet::new(*params).p(x)
}

pub fn w(x: f64, params: &ProblemParams) -> Result<f64> {
    CoefficientSet::new(*params).w(x)
}

pub fn p_prime(x: f64, params: &ProblemParams) -> Result<f64> {
    CoefficientSet::new(*params).p_prime(x)
}

pub fn w_over_p(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain("x", x, "(0, 1)"));
    }
    Ok(1.0 / (x * (1.0 - x) * (1.0 + x)))
}
