//! Second-order finite differences for `-g'' + V g = mu g` on `(lo, hi)` with
//! Dirichlet ends, and Sturm-sequence bisection on the resulting symmetric
//! tridiagonal matrix.

use crate::coeffs::ProblemParams;
use crate::error::{Error, Result};
use crate::estimate::{EigenEstimate, Method};
use crate::liouville::LiouvilleMap;

/// `delta` values of the default sweep, as fractions of `beta`.
pub const DELTA_SWEEP: [f64; 3] = [1e-2, 3e-3, 1e-3];

#[derive(Debug, Clone)]
pub struct TridiagonalSpectrumProblem {
    lo: f64,
    hi: f64,
    h: f64,
    diag: Vec<f64>,
    /// Every off-diagonal entry equals this.
    off: f64,
}

impl TridiagonalSpectrumProblem {
    /// `n` interior points of `(lo, hi)`, step `h = (hi - lo) / (n + 1)`.
    pub fn new<V: Fn(f64) -> Result<f64>>(potential: V, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("interval ({lo}, {hi}) is empty")));
        }
        if n < 3 {
            return Err(Error::InvalidArgument("need at least three interior points".into()));
        }
        let h = (hi - lo) / (n + 1) as f64;
        let inv_h2 = 1.0 / (h * h);
        let diag = (1..=n)
            .map(|i| {
                let s = lo + i as f64 * h;
                let v = potential(s)?;
                if !v.is_finite() {
                    return Err(Error::InvalidArgument(format!("potential is not finite at {s}")));
                }
                Ok(2.0 * inv_h2 + v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            lo,
            hi,
            h,
            diag,
            off: -inv_h2,
        })
    }

    /// The Schrödinger form of the operator on `(delta, beta - delta)`.
    pub fn schrodinger(map: &LiouvilleMap, delta: f64, n: usize) -> Result<Self> {
        if !(delta > 0.0 && delta < 0.5 * map.beta()) {
            return Err(crate::error::domain("delta", delta, "(0, beta/2)"));
        }
        Self::new(|s| map.potential_V(s), delta, map.beta() - delta, n)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> f64 {
        self.off
    }

    /// Number of eigenvalues strictly below `mu`, from the signs of the
    /// pivots of `A - mu I = L D L^T`.
    pub fn sturm_count(&self, mu: f64) -> usize {
        let e2 = self.off * self.off;
        let pivmin = f64::MIN_POSITIVE.max(e2 * f64::EPSILON * f64::EPSILON);
        let mut count = 0;
        let mut q = self.diag[0] - mu;
        for i in 0..self.diag.len() {
            if i > 0 {
                q = self.diag[i] - mu - e2 / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    /// The `n`-th smallest eigenvalue (`n >= 1`) bisected to a bracket of
    /// width at most `tol`. Returns `(midpoint, (lo, hi))`.
    pub fn eigenvalue(&self, n: usize, tol: f64) -> Result<(f64, (f64, f64))> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                n,
                available: self.len(),
            });
        }
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        let (mut lo, mut hi) = self.gershgorin();
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((0.5 * (lo + hi), (lo, hi)))
    }
}

/// `mu_n` of the truncated Schrödinger problem, tagged `fd`.
pub fn fd_eigenvalue(
    params: &ProblemParams,
    problem: &TridiagonalSpectrumProblem,
    n: usize,
    tol: f64,
) -> Result<EigenEstimate> {
    let (mu, bracket) = problem.eigenvalue(n, tol)?;
    Ok(EigenEstimate::new(params, n, mu, Method::Fd, None, tol, bracket))
}

/// `(4 mu(h/2) - mu(h)) / 3` from grids with `points` and `2 points + 1`
/// interior nodes, so the second step is exactly half the first.
pub fn richardson(map: &LiouvilleMap, n: usize, delta: f64, points: usize, tol: f64) -> Result<f64> {
    if points < 3 * n {
        return Err(Error::InvalidArgument(format!(
            "{points} grid points are too few for eigenvalue {n}"
        )));
    }
    let coarse = TridiagonalSpectrumProblem::schrodinger(map, delta, points)?.eigenvalue(n, tol)?.0;
    let fine = TridiagonalSpectrumProblem::schrodinger(map, delta, 2 * points + 1)?.eigenvalue(n, tol)?.0;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdSweep {
    /// `(delta, extrapolated mu)` in sweep order.
    pub points: Vec<(f64, f64)>,
    pub estimate: EigenEstimate,
}

impl FdSweep {
    /// Largest change between consecutive `delta` values.
    pub fn spread(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .fold(0.0, f64::max)
    }
}

/// Extrapolated `mu_n` across the default `delta` sweep, reported at the
/// smallest `delta`.
pub fn fd_sweep(map: &LiouvilleMap, n: usize, points: usize, tol: f64) -> Result<FdSweep> {
    let mut out = Vec::with_capacity(DELTA_SWEEP.len());
    for frac in DELTA_SWEEP {
        let delta = frac * map.beta();
        out.push((delta, richardson(map, n, delta, points, tol)?));
    }
    let mu = out.last().map(|p| p.1).unwrap_or(f64::NAN);
    let estimate = EigenEstimate::new(map.params(), n, mu, Method::Fd, None, tol, (mu - tol, mu + tol));
    Ok(FdSweep { points: out, estimate })
}

/// Default grid size: enough to put several nodes inside the smallest
/// cutoff and to resolve `n` oscillations.
pub fn default_points(n: usize) -> usize {
    4000.max(200 * n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const BETA: f64 = 2.622_057_554_292_119_8;

    fn laplacian(len: f64, n: usize) -> TridiagonalSpectrumProblem {
        TridiagonalSpectrumProblem::new(|_| Ok(0.0), 0.0, len, n).unwrap()
    }

    #[test]
    fn zero_potential_counts() {
        let p = laplacian(BETA, 200);
        assert_eq!(p.sturm_count(0.0), 0);
        let h = p.step();
        let first = 4.0 / (h * h) * (PI / (2.0 * 201.0)).sin().powi(2);
        assert_eq!(p.sturm_count(first * (1.0 + 1e-9)), 1);
        assert_eq!(p.sturm_count(first * (1.0 - 1e-9)), 0);
        assert_eq!(p.sturm_count(1e12), 200);
    }

    #[test]
    fn laplacian_closed_form() {
        let n = 300;
        let p = laplacian(1.7, n);
        let h = p.step();
        for k in 1..=10 {
            let exact = 4.0 / (h * h) * (k as f64 * PI / (2.0 * (n + 1) as f64)).sin().powi(2);
            let (mu, (lo, hi)) = p.eigenvalue(k, 1e-13 * exact).unwrap();
            assert!(((mu - exact) / exact).abs() < 1e-10, "k={k}");
            let slack = 1e-12 * exact;
            assert!(lo - slack <= exact && exact <= hi + slack);
        }
    }

    #[test]
    fn richardson_on_laplacian_converges() {
        let exact = (PI / BETA).powi(2);
        let mu = |n: usize| laplacian(BETA, n).eigenvalue(1, 1e-14).unwrap().0;
        let errs: Vec<f64> = [500, 1000, 2000].iter().map(|&n| (mu(n) - exact).abs()).collect();
        // Second order: halving h (roughly) quarters the error.
        assert!((errs[0] / errs[1] - 4.0).abs() < 0.1, "{errs:?}");
        assert!((errs[1] / errs[2] - 4.0).abs() < 0.1, "{errs:?}");
        let c = laplacian(BETA, 500).eigenvalue(1, 1e-14).unwrap().0;
        let f = laplacian(BETA, 1001).eigenvalue(1, 1e-14).unwrap().0;
        let extrapolated = (4.0 * f - c) / 3.0;
        assert!(((extrapolated - exact) / exact).abs() < 1e-9, "{extrapolated} vs {exact}");
    }

    #[test]
    fn index_out_of_range() {
        let p = laplacian(1.0, 10);
        assert!(matches!(p.eigenvalue(11, 1e-8), Err(Error::IndexOutOfRange { .. })));
        assert!(p.eigenvalue(0, 1e-8).is_err());
    }

    #[test]
    fn operator_count_places_fifth_eigenvalue() {
        let params = ProblemParams::new(1.0).unwrap();
        let map = LiouvilleMap::new(params);
        let p = TridiagonalSpectrumProblem::schrodinger(&map, 1e-3 * map.beta(), 4000).unwrap();
        // The cutoff at delta = 1e-3 beta lifts lambda_5 by about 1.1e-3, to
        // 21.54253, so the tabulated 21.54137 still counts only four below it.
        assert_eq!(p.sturm_count(2.0 * 14.36405), 3);
        assert_eq!(p.sturm_count(2.0 * 14.3652), 4);
        assert_eq!(p.sturm_count(2.0 * 21.54137), 4);
        assert_eq!(p.sturm_count(2.0 * 21.5430), 5);
    }

    #[test]
    fn extrapolated_eigenvalues_match_shooting() {
        // Shooting values on the m = 7 windows.
        for (eps, n, lambda) in [(1.0, 1, 1.448458), (0.5, 3, 5.482684)] {
            let params = ProblemParams::new(eps).unwrap();
            let map = LiouvilleMap::new(params);
            let mu = richardson(&map, n, 1e-3 * map.beta(), 4000, 1e-10).unwrap();
            let target = params.mu_from_lambda(lambda);
            assert!(((mu - target) / target).abs() < 5e-3, "eps={eps}: {mu} vs {target}");
        }
    }

    #[test]
    fn enlarging_the_interval_does_not_raise_eigenvalues() {
        let map = LiouvilleMap::new(ProblemParams::new(0.5).unwrap());
        let h = 2e-4;
        let mut prev = f64::INFINITY;
        for frac in DELTA_SWEEP {
            let delta = frac * map.beta();
            let n = ((map.beta() - 2.0 * delta) / h) as usize;
            let mu = TridiagonalSpectrumProblem::schrodinger(&map, delta, n)
                .unwrap()
                .eigenvalue(2, 1e-10)
                .unwrap()
                .0;
            assert!(mu <= prev + 1e-6, "{mu} > {prev}");
            prev = mu;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn count_is_monotone(a in 0.0f64..200.0, b in 0.0f64..200.0) {
            let map = LiouvilleMap::new(ProblemParams::new(1.0).unwrap());
            let p = TridiagonalSpectrumProblem::schrodinger(&map, 1e-2 * map.beta(), 400).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(p.sturm_count(lo) <= p.sturm_count(hi));
        }
    }
}
