//! Two-sided growth control of the eigenvalues `mu_n`:
//!
//! ```text
//! n^2 pi^2 / beta^2 + alpha <= mu_n <= n^2 pi^2 / beta^2 + F_n(delta)
//! F_n(delta) = n^2 pi^2 (1/(beta - 2 delta)^2 - 1/beta^2) + (c + nu)/delta^2
//! ```
//!
//! with `alpha = min V`, `c = max(3/4, 1/eps^2 - 1/4)` and any slack `nu > 0`.
//! The upper bound holds for sufficiently large `n` at `delta = n^(-2/3)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coeffs::ProblemParams;
use crate::error::{domain, Error, Result};
use crate::liouville::LiouvilleMap;

pub const DEFAULT_NU: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBounds {
    pub epsilon: f64,
    pub beta: f64,
    pub alpha: f64,
    pub c_env: f64,
    pub nu: f64,
}

/// `max(3/4, 1/eps^2 - 1/4)`: the larger of the two endpoint coefficients of `V`.
pub fn envelope_constant(params: &ProblemParams) -> f64 {
    let e = params.epsilon();
    (0.75f64).max(1.0 / (e * e) - 0.25)
}

impl AsymptoticBounds {
    pub fn new(map: &LiouvilleMap, nu: f64) -> Result<Self> {
        let alpha = map.alpha()?;
        Self::from_parts(map.params(), map.beta(), alpha, nu)
    }

    pub fn from_parts(params: &ProblemParams, beta: f64, alpha: f64, nu: f64) -> Result<Self> {
        if !(beta > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("beta = {beta}, alpha = {alpha}")));
        }
        if !(nu > 0.0) {
            return Err(domain("nu", nu, "(0, inf)"));
        }
        Ok(Self {
            epsilon: params.epsilon(),
            beta,
            alpha,
            c_env: envelope_constant(params),
            nu,
        })
    }

    /// `n^2 pi^2 / beta^2`.
    pub fn leading(&self, n: usize) -> f64 {
        let k = n as f64 * PI / self.beta;
        k * k
    }
}

/// `n^2 pi^2 / beta^2 + alpha`.
pub fn lower_bound(n: usize, bounds: &AsymptoticBounds) -> f64 {
    bounds.leading(n) + bounds.alpha
}

/// `F_n(delta)`, an upper bound on `mu_n - n^2 pi^2 / beta^2` for large `n`.
pub fn upper_envelope(n: usize, delta: f64, bounds: &AsymptoticBounds) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.5 * bounds.beta) {
        return Err(domain("delta", delta, "(0, beta/2)"));
    }
    let nf = n as f64;
    let b = bounds.beta;
    let shrunk = b - 2.0 * delta;
    Ok(nf * nf * PI * PI * (1.0 / (shrunk * shrunk) - 1.0 / (b * b)) + (bounds.c_env + bounds.nu) / (delta * delta))
}

/// `F_n(n^(-2/3))`.
pub fn standard_envelope(n: usize, bounds: &AsymptoticBounds) -> Result<f64> {
    upper_envelope(n, (n as f64).powf(-2.0 / 3.0), bounds)
}

/// `n^2 pi^2 / beta^2 + F_n(n^(-2/3))`.
pub fn upper_bound(n: usize, bounds: &AsymptoticBounds) -> Result<f64> {
    Ok(bounds.leading(n) + standard_envelope(n, bounds)?)
}

/// Leading-order eigenvalue on the `lambda` scale, `eps n^2 pi^2 / (2 beta^2)`.
pub fn weyl_estimate(n: usize, params: &ProblemParams, beta: f64) -> f64 {
    let k = n as f64 * PI / beta;
    0.5 * params.epsilon() * k * k
}

/// Smallest `n0` in the sample such that every sampled `(n, mu_n)` with
/// `n >= n0` satisfies the upper envelope. `None` if the largest sample fails.
pub fn envelope_onset(spectrum: &[(usize, f64)], bounds: &AsymptoticBounds) -> Result<Option<usize>> {
    let mut sorted: Vec<(usize, f64)> = spectrum.to_vec();
    sorted.sort_by_key(|s| s.0);
    let mut onset = None;
    for &(n, mu) in sorted.iter().rev() {
        if mu - bounds.leading(n) <= standard_envelope(n, bounds)? {
            onset = Some(n);
        } else {
            break;
        }
    }
    Ok(onset)
}

/// `|n^-2 mu_n beta^2 / pi^2 - 1|`.
pub fn weyl_deviation(n: usize, mu: f64, bounds: &AsymptoticBounds) -> f64 {
    (mu / bounds.leading(n) - 1.0).abs()
}
