//! The power-series side of the eigenproblem. With `u(x) = sum_{n>=1} v_n x^n`,
//!
//! ```text
//! n (n - 1) v_{n-1} - n (n + 1) v_{n+1} + 2 (n - lambda)/eps v_n = 0,
//! v_1 = 1,  v_2 = (1 - lambda)/eps,
//! ```
//!
//! and `lambda` is an eigenvalue exactly when this solution is the minimal
//! one, `|v_n| ~ n^(-1/eps - 1)`. Every other solution grows like
//! `n^(1/eps - 1)`. The minimal solution is computed by backward recursion
//! from far out (Miller's algorithm) and compared with the initial data.

use serde::{Deserialize, Serialize};

use crate::coeffs::ProblemParams;
use crate::error::{Error, Result};
use crate::estimate::{EigenEstimate, Method};
use crate::roots::illinois;

/// Values are renormalised by `2^-RESCALE_BITS` once they exceed `2^RESCALE_BITS`.
const RESCALE_BITS: i32 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// `v_1 .. v_N` stored as `mantissa[i] * 2^exponent[i]` for index `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceRun {
    pub lambda: f64,
    pub epsilon: f64,
    pub direction: Direction,
    mantissa: Vec<f64>,
    exponent: Vec<i32>,
}

impl RecurrenceRun {
    /// Number of stored terms `N`.
    pub fn len(&self) -> usize {
        self.mantissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mantissa.is_empty()
    }

    /// `v_n` for `1 <= n <= N`; may overflow to infinity for very long runs.
    pub fn value(&self, n: usize) -> f64 {
        let (m, e) = self.scaled(n);
        ldexp(m, e)
    }

    /// `(mantissa, exponent)` with `v_n = mantissa * 2^exponent`.
    pub fn scaled(&self, n: usize) -> (f64, i32) {
        assert!(n >= 1 && n <= self.len(), "index {n} outside 1..={}", self.len());
        (self.mantissa[n - 1], self.exponent[n - 1])
    }

    /// `v_n / v_1`.
    pub fn normalized(&self, n: usize) -> f64 {
        let (m1, e1) = self.scaled(1);
        let (m, e) = self.scaled(n);
        ldexp(m / m1, e - e1)
    }

    pub fn values(&self) -> Vec<f64> {
        (1..=self.len()).map(|n| self.value(n)).collect()
    }

    /// Relative residual of the recurrence at interior index `2 <= n < N`.
    pub fn residual(&self, n: usize) -> f64 {
        assert!(n >= 2 && n < self.len(), "index {n} is not interior");
        let e = self.exponent[n - 2].max(self.exponent[n - 1]).max(self.exponent[n]);
        let at = |k: usize| ldexp(self.mantissa[k - 1], self.exponent[k - 1] - e);
        let nf = n as f64;
        let terms = [
            nf * (nf - 1.0) * at(n - 1),
            -nf * (nf + 1.0) * at(n + 1),
            2.0 * (nf - self.lambda) / self.epsilon * at(n),
        ];
        let scale = terms.iter().map(|t| t.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            terms.iter().sum::<f64>().abs() / scale
        }
    }
}

fn ldexp(x: f64, e: i32) -> f64 {
    // Split so neither factor overflows on its own.
    let half = e / 2;
    x * 2f64.powi(half) * 2f64.powi(e - half)
}

/// `v_1 .. v_N` from the initial data by forward recursion.
pub fn forward_run(lambda: f64, params: &ProblemParams, len: usize) -> Result<RecurrenceRun> {
    if len < 3 {
        return Err(Error::InvalidArgument("a run needs at least three terms".into()));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} is not finite")));
    }
    let eps = params.epsilon();
    let mut mantissa = vec![0.0; len];
    let mut exponent = vec![0i32; len];
    mantissa[0] = 1.0;
    mantissa[1] = (1.0 - lambda) / eps;
    let (mut prev, mut cur, mut shift) = (mantissa[0], mantissa[1], 0i32);
    let limit = 2f64.powi(RESCALE_BITS);
    for n in 2..len {
        let nf = n as f64;
        let next = ((nf - 1.0) * prev + 2.0 * (nf - lambda) / (eps * nf) * cur) / (nf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > limit {
            prev = ldexp(prev, -RESCALE_BITS);
            cur = ldexp(cur, -RESCALE_BITS);
            shift += RESCALE_BITS;
        }
        mantissa[n] = cur;
        exponent[n] = shift;
    }
    Ok(RecurrenceRun {
        lambda,
        epsilon: eps,
        direction: Direction::Forward,
        mantissa,
        exponent,
    })
}

/// Ratio `v_{N+1} / v_N` of the minimal solution to leading order,
/// `-(1 + 1/N)^(-1 - 1/eps)`.
pub fn minimal_ratio(n: usize, params: &ProblemParams) -> f64 {
    let nf = n as f64;
    -(1.0 + 1.0 / nf).powf(-1.0 - 1.0 / params.epsilon())
}

/// Backward recursion from `v~_{N+1} = seed_ratio`, `v~_N = 1` down to `v~_1`.
pub fn backward_run(lambda: f64, params: &ProblemParams, len: usize, seed_ratio: f64) -> Result<RecurrenceRun> {
    if len < 3 {
        return Err(Error::InvalidArgument("a run needs at least three terms".into()));
    }
    let eps = params.epsilon();
    let mut mantissa = vec![0.0; len];
    let mut exponent = vec![0i32; len];
    let (mut above, mut cur, mut shift) = (seed_ratio, 1.0f64, 0i32);
    mantissa[len - 1] = cur;
    let limit = 2f64.powi(RESCALE_BITS);
    // Indices are 1-based: from (v_{n+1}, v_n) produce v_{n-1}.
    for n in (2..=len).rev() {
        let nf = n as f64;
        let below = (nf * (nf + 1.0) * above - 2.0 * (nf - lambda) / eps * cur) / (nf * (nf - 1.0));
        above = cur;
        cur = below;
        if cur.abs() > limit {
            above = ldexp(above, -RESCALE_BITS);
            cur = ldexp(cur, -RESCALE_BITS);
            shift += RESCALE_BITS;
        }
        mantissa[n - 2] = cur;
        exponent[n - 2] = shift;
    }
    // Exponents grew toward small n; store them relative to v_N's scale.
    Ok(RecurrenceRun {
        lambda,
        epsilon: eps,
        direction: Direction::Backward,
        mantissa,
        exponent,
    })
}

/// Value of a partial sum of the power series with a ratio-test tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail: f64,
    pub terms: usize,
}

/// `u(x) = sum v_n x^n` over the stored terms of a forward run. Fails when
/// the estimated tail exceeds `tol (1 + |u|)`.
pub fn u_series(x: f64, run: &RecurrenceRun, tol: f64) -> Result<SeriesValue> {
    if !(0.0..1.0).contains(&x) {
        return Err(crate::error::domain("x", x, "[0, 1)"));
    }
    if run.direction != Direction::Forward {
        return Err(Error::InvalidArgument("u_series needs a forward run".into()));
    }
    if x == 0.0 {
        return Ok(SeriesValue {
            value: 0.0,
            tail: 0.0,
            terms: run.len(),
        });
    }
    let ln_x = x.ln();
    let len = run.len();
    // ln |v_n x^n|, or -inf for a zero term.
    let ln_term = |n: usize| -> f64 {
        let (m, e) = run.scaled(n);
        m.abs().ln() + e as f64 * std::f64::consts::LN_2 + n as f64 * ln_x
    };
    let mut sum = 0.0;
    for n in 1..=len {
        let (m, _) = run.scaled(n);
        if m != 0.0 {
            sum += m.signum() * ln_term(n).exp();
        }
    }
    // Per-term decay from block maxima, robust to sign changes of v_n.
    let block = 16.min(len / 4).max(1);
    let block_max = |end: usize| (end + 1 - block..=end).map(&ln_term).fold(f64::NEG_INFINITY, f64::max);
    let (mid, end) = (len / 2, len);
    let (a, b) = (block_max(mid), block_max(end));
    let ln_ratio = if a.is_finite() && b.is_finite() {
        (b - a) / (end - mid) as f64
    } else {
        ln_x
    };
    let tail = if ln_ratio < 0.0 {
        let r = ln_ratio.exp();
        b.exp() * r / (1.0 - r)
    } else {
        f64::INFINITY
    };
    if !(tail <= tol * (1.0 + sum.abs())) {
        return Err(Error::TailNotConverged {
            x,
            terms: run.len(),
            tail,
        });
    }
    Ok(SeriesValue {
        value: sum,
        tail,
        terms: run.len(),
    })
}

/// Default starting length for the backward recursion.
pub fn default_n_start(params: &ProblemParams) -> usize {
    200.max((50.0 / params.epsilon()).ceil() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MillerDiscrepancy {
    pub lambda: f64,
    /// `v~_2 / v~_1 - (1 - lambda)/eps`; has poles where `v~_1 = 0`.
    pub d: f64,
    /// `(v~_2 - (1 - lambda)/eps v~_1) / hypot(v~_1, v~_2)`: same zeros as
    /// `d`, bounded, and continuous in `lambda`.
    pub scaled: f64,
    pub n_start: usize,
}

/// The discrepancy from one backward run of length `n_start`.
pub fn miller_discrepancy(lambda: f64, params: &ProblemParams, n_start: usize) -> Result<MillerDiscrepancy> {
    let run = backward_run(lambda, params, n_start, minimal_ratio(n_start, params))?;
    let (m1, e1) = run.scaled(1);
    let (m2, e2) = run.scaled(2);
    let e = e1.max(e2);
    let v1 = ldexp(m1, e1 - e);
    let v2 = ldexp(m2, e2 - e);
    let r = (1.0 - lambda) / params.epsilon();
    Ok(MillerDiscrepancy {
        lambda,
        d: v2 / v1 - r,
        scaled: (v2 - r * v1) / v1.hypot(v2),
        n_start,
    })
}

/// Tolerance on the change of the scaled discrepancy under doubling.
pub const DOUBLING_TOL: f64 = 1e-8;

/// Discrepancy with the start doubled until the scaled value changes by at
/// most `DOUBLING_TOL` (up to 64 times the default start).
pub fn miller_discrepancy_checked(lambda: f64, params: &ProblemParams) -> Result<MillerDiscrepancy> {
    let mut n = default_n_start(params);
    let mut cur = miller_discrepancy(lambda, params, n)?;
    let mut change = f64::INFINITY;
    for _ in 0..6 {
        let next = miller_discrepancy(lambda, params, 2 * n)?;
        change = (next.scaled - cur.scaled).abs();
        n *= 2;
        cur = next;
        if change <= DOUBLING_TOL {
            return Ok(cur);
        }
    }
    Err(Error::RecurrenceUnstable { lambda, change })
}

/// Root of the scaled discrepancy in `lambda`, bracketed to `tol` in `lambda`.
pub fn refine_eigen_recurrence(
    bracket: (f64, f64),
    params: &ProblemParams,
    n: usize,
    tol: f64,
) -> Result<EigenEstimate> {
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("bracket ({lo}, {hi}) is empty")));
    }
    let f = |lambda: f64| -> Result<f64> { Ok(miller_discrepancy_checked(lambda, params)?.scaled) };
    let flo = f(lo)?;
    let fhi = f(hi)?;
    if flo * fhi > 0.0 {
        // Report where |d| comes closest to zero.
        let mut best = (lo, flo.abs());
        for i in 1..64 {
            let x = lo + (hi - lo) * i as f64 / 64.0;
            let v = f(x)?.abs();
            if v < best.1 {
                best = (x, v);
            }
        }
        return Err(Error::NoSignChange {
            lo,
            hi,
            best: best.0,
            min_abs: best.1,
        });
    }
    let root = illinois(f, lo, hi, flo, fhi, tol, 200)?;
    let eps = params.epsilon();
    let mu = params.mu_from_lambda(root.estimate);
    Ok(EigenEstimate::new(
        params,
        n,
        mu,
        Method::Recurrence,
        None,
        2.0 * tol / eps,
        (params.mu_from_lambda(root.lo), params.mu_from_lambda(root.hi)),
    ))
}

/// The first `count` eigenvalues, located by scanning the scaled
/// discrepancy in steps of `step` from `lambda = 0` and refining each sign
/// change.
pub fn recurrence_eigenvalues(params: &ProblemParams, count: usize, step: f64, tol: f64) -> Result<Vec<EigenEstimate>> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument("scan step must be positive".into()));
    }
    let mut out = Vec::with_capacity(count);
    let mut lo = 0.0;
    let mut flo = miller_discrepancy_checked(lo, params)?.scaled;
    // Guard against scanning forever; the spectrum grows like n^2.
    let limit = 10.0 * (count as f64 + 1.0).powi(2) / params.epsilon().min(1.0) + 10.0;
    while out.len() < count {
        let hi = lo + step;
        if hi > limit {
            return Err(Error::Bracket {
                n: out.len() + 1,
                reason: format!("no sign change of the discrepancy below lambda = {limit}"),
            });
        }
        let fhi = miller_discrepancy_checked(hi, params)?.scaled;
        if flo == 0.0 || flo * fhi < 0.0 {
            out.push(refine_eigen_recurrence((lo, hi), params, out.len() + 1, tol)?);
        }
        lo = hi;
        flo = fhi;
    }
    Ok(out)
}
