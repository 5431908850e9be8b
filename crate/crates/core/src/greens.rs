//! The inverse of the operator: `(R f)(x) = int_0^1 G(x, y) f(y) w(y) dy`
//! with `G(x, y) = gamma(min(x, y))` and `gamma(x) = int_0^x dt / p(t)`.
//! Its trace and Hilbert–Schmidt norm tie the computed spectra together:
//!
//! ```text
//! sum 1/mu_n   = int_0^1 gamma w dx
//! sum 1/mu_n^2 = 2 int_0^1 gamma(y)^2 w(y) int_y^1 w(x) dx dy
//! ```
//!
//! Integrals run in `r = -ln(1 - x)`. There `gamma` grows like `e^(r/eps)`
//! and `w dx` decays like `e^(-r (1 + 1/eps))`, so both are carried with
//! those factors removed and the integrands decay like `e^-r` and `e^-2r`.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{lower_bound, upper_bound, AsymptoticBounds};
use crate::coeffs::{pow_nonneg, ProblemParams};
use crate::error::{domain, Error, Result};
use crate::quad::{integrate, QuadRequest};

/// Truncation of the `r` axis; the neglected tails are below `e^-R_MAX`.
const R_MAX: f64 = 45.0;

/// `r = -ln(1 - x)`.
fn r_of_x(x: f64) -> f64 {
    -(-x).ln_1p()
}

/// `e^(-r/eps) gamma`, computed as `int_0^r e^(-u/eps) (2 - e^(u - r))^(1/eps - 1) du`.
fn gamma_scaled(r: f64, params: &ProblemParams, rel_tol: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let ie = 1.0 / params.epsilon();
    let f = |u: f64| (-u * ie).exp() * pow_nonneg(2.0 - (u - r).exp(), ie - 1.0);
    // Beyond about 40 eps the integrand is below e^-40 of its peak.
    let hi = r.min(45.0 * params.epsilon());
    Ok(integrate(&QuadRequest::new(&f, 0.0, hi, 1e-300).rel_tol(rel_tol))?.value)
}

/// `e^(r (1 + 1/eps)) w dx/dr = (2 - e^-r)^(-1/eps) / (1 - e^-r)`.
fn weight_scaled(r: f64, params: &ProblemParams) -> f64 {
    pow_nonneg(2.0 - (-r).exp(), -1.0 / params.epsilon()) / -(-r).exp_m1()
}

/// `e^(r (1 + 1/eps)) int_r^inf w dx/dr' dr'`.
fn tail_weight_scaled(r: f64, params: &ProblemParams, rel_tol: f64) -> Result<f64> {
    let ie = 1.0 / params.epsilon();
    let f = |u: f64| (-u * (1.0 + ie)).exp() * weight_scaled(r + u, params);
    let hi = 45.0 / (1.0 + ie);
    let req = QuadRequest::new(&f, 0.0, hi, 1e-300).rel_tol(rel_tol);
    // 1/(r + u) is logarithmically sharp at u = 0 for small r.
    let req = if r < 1e-3 { req.max_subdivisions(20_000) } else { req };
    Ok(integrate(&req)?.value)
}

/// `gamma(x)`, `+inf` at `x = 1`.
pub fn gamma(x: f64, params: &ProblemParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("x", x, "[0, 1]"));
    }
    if x == 1.0 {
        return Ok(f64::INFINITY);
    }
    let r = r_of_x(x);
    Ok(gamma_scaled(r, params, 1e-13)? * (r / params.epsilon()).exp())
}

/// `G(x, y) = gamma(min(x, y))`; infinite only at `(1, 1)`.
pub fn kernel_g(x: f64, y: f64, params: &ProblemParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("x", x, "[0, 1]"));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(domain("y", y, "[0, 1]"));
    }
    gamma(x.min(y), params)
}

/// `gamma` tabulated on a fixed grid, with `G` evaluated from the table for
/// grid points and by quadrature elsewhere.
#[derive(Debug, Clone)]
pub struct KernelEval {
    params: ProblemParams,
    grid: Vec<f64>,
    gamma: Vec<f64>,
}

impl KernelEval {
    /// `points` grid nodes spread uniformly in `r` over `x in [0, 1 - 1e-12]`.
    pub fn new(params: ProblemParams, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument("kernel grid needs at least two points".into()));
        }
        let r_top = r_of_x(1.0 - 1e-12);
        let grid: Vec<f64> = (0..points)
            .map(|i| -(-(r_top * i as f64 / (points - 1) as f64)).exp_m1())
            .collect();
        let gamma = grid.iter().map(|&x| gamma(x, &params)).collect::<Result<Vec<_>>>()?;
        Ok(Self { params, grid, gamma })
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn gamma_grid(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma(&self, x: f64) -> Result<f64> {
        match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => Ok(self.gamma[i]),
            Err(_) => gamma(x, &self.params),
        }
    }

    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain("x", x, "[0, 1]"));
        }
        if !(0.0..=1.0).contains(&y) {
            return Err(domain("y", y, "[0, 1]"));
        }
        self.gamma(x.min(y))
    }

    /// `G` at grid nodes `(i, j)`.
    pub fn kernel_at(&self, i: usize, j: usize) -> f64 {
        self.gamma[i.min(j)]
    }
}

/// `int_0^1 gamma w dx`.
pub fn trace_integral(params: &ProblemParams, tol: f64) -> Result<f64> {
    let inner = (tol * 1e-3).max(1e-14);
    let cell = std::cell::RefCell::new(None::<Error>);
    let g = |r: f64| -> f64 {
        match gamma_scaled(r, params, inner) {
            Ok(v) => v * weight_scaled(r, params) * (-r).exp(),
            Err(e) => {
                cell.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let res = integrate(&QuadRequest::new(&g, 0.0, R_MAX, 1e-300).rel_tol(tol));
    if let Some(e) = cell.into_inner() {
        return Err(e);
    }
    Ok(res?.value)
}

/// `2 int_0^1 gamma(y)^2 w(y) [int_y^1 w(x) dx] dy`.
pub fn hs_norm_sq(params: &ProblemParams, tol: f64) -> Result<f64> {
    let inner = (tol * 1e-3).max(1e-14);
    let cell = std::cell::RefCell::new(None::<Error>);
    let g = |r: f64| -> f64 {
        let v = gamma_scaled(r, params, inner).and_then(|gs| {
            let t = tail_weight_scaled(r, params, inner)?;
            Ok(2.0 * gs * gs * weight_scaled(r, params) * t * (-2.0 * r).exp())
        });
        match v {
            Ok(v) => v,
            Err(e) => {
                cell.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let res = integrate(&QuadRequest::new(&g, 0.0, R_MAX / 2.0, 1e-300).rel_tol(tol));
    if let Some(e) = cell.into_inner() {
        return Err(e);
    }
    Ok(res?.value)
}

/// A partial sum of `mu_n^-power` with an interval for the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSum {
    pub power: i32,
    pub terms: usize,
    pub partial: f64,
    pub tail_lo: f64,
    pub tail_hi: f64,
}

impl SpectralSum {
    pub fn interval(&self) -> (f64, f64) {
        (self.partial + self.tail_lo, self.partial + self.tail_hi)
    }

    pub fn midpoint(&self) -> f64 {
        self.partial + 0.5 * (self.tail_lo + self.tail_hi)
    }

    /// Distance from `target` to the interval, relative to `target`.
    pub fn relative_miss(&self, target: f64) -> f64 {
        let (lo, hi) = self.interval();
        let miss = if target < lo {
            lo - target
        } else if target > hi {
            target - hi
        } else {
            0.0
        };
        miss / target.abs()
    }
}

/// Terms summed explicitly before the integral remainder takes over.
const EXPLICIT_TAIL: usize = 1_000_000;

/// `sum_{n <= K} mu_n^-power` from `mus = [mu_1, ..., mu_K]`, with the tail
/// bracketed between the upper envelope (lower end) and the lower bound
/// `n^2 pi^2 / beta^2 + alpha` (upper end).
pub fn spectral_sum(mus: &[f64], power: i32, bounds: &AsymptoticBounds) -> Result<SpectralSum> {
    if !(power == 1 || power == 2) {
        return Err(Error::InvalidArgument(format!("power {power} not in {{1, 2}}")));
    }
    if mus.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::InvalidArgument("eigenvalues must be positive".into()));
    }
    let k = mus.len();
    let partial: f64 = mus.iter().map(|&m| m.powi(-power)).sum();
    let first = k + 1;
    if !(lower_bound(first, bounds) > 0.0) {
        return Err(Error::InvalidArgument(format!("lower bound not positive at n = {first}")));
    }
    let last = first.max(EXPLICIT_TAIL);
    let (mut lo, mut hi) = (0.0, 0.0);
    for n in first..=last {
        lo += upper_bound(n, bounds)?.powi(-power);
        hi += lower_bound(n, bounds).powi(-power);
    }
    // Remainder beyond `last`, from integrals of a n^2 (1 + t) with t
    // bounding the relative correction.
    let a = bounds.leading(1);
    let m = last as f64;
    let p = power as f64;
    let t_up = upper_bound(last + 1, bounds)? / bounds.leading(last + 1) - 1.0;
    lo += (a * (1.0 + t_up)).powi(-power) * (m + 1.0).powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
    let t_lo = (bounds.alpha / (a * m * m)).min(0.0);
    hi += (a * (1.0 + t_lo)).powi(-power) * m.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
    Ok(SpectralSum {
        power,
        terms: k,
        partial,
        tail_lo: lo,
        tail_hi: hi,
    })
}
