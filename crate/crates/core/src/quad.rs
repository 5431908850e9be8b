//! Adaptive Gauss–Kronrod quadrature with algebraic endpoint substitution, and
//! the integrals built on it: `beta` and the Green-kernel weight `gamma`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::coeffs::{pow_nonneg, ProblemParams};
use crate::error::{domain, Error, Result};

// Kronrod 15-point abscissae on [-1, 1] (non-negative half) with the weights of
// the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Describes one integral. Endpoint exponents declare an algebraic singularity
/// `(x - lo)^a` or `(hi - x)^b` of the integrand, with `a, b > -1`.
pub struct QuadRequest<'a> {
    pub integrand: &'a dyn Fn(f64) -> f64,
    pub lo: f64,
    pub hi: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub lo_exponent: Option<f64>,
    pub hi_exponent: Option<f64>,
    pub max_subdivisions: usize,
}

impl<'a> QuadRequest<'a> {
    pub fn new(integrand: &'a dyn Fn(f64) -> f64, lo: f64, hi: f64, abs_tol: f64) -> Self {
        Self {
            integrand,
            lo,
            hi,
            abs_tol,
            rel_tol: 0.0,
            lo_exponent: None,
            hi_exponent: None,
            max_subdivisions: 2000,
        }
    }

    pub fn rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn singular_lo(mut self, exponent: f64) -> Self {
        self.lo_exponent = Some(exponent);
        self
    }

    /// The integrand only sees `x`, so points closer to `hi` than its float
    /// spacing collapse onto `hi`. Exponents much below -0.5 at a nonzero
    /// `hi` lose accuracy; reflect the integrand to put them at 0 instead.
    pub fn singular_hi(mut self, exponent: f64) -> Self {
        self.hi_exponent = Some(exponent);
        self
    }

    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "quadrature interval [{}, {}] must satisfy lo < hi",
                self.lo, self.hi
            )));
        }
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) || self.abs_tol < 0.0 || self.rel_tol < 0.0 {
            return Err(Error::InvalidArgument("quadrature tolerance must be positive".into()));
        }
        for e in [self.lo_exponent, self.hi_exponent].into_iter().flatten() {
            if !(e > -1.0) {
                return Err(Error::InvalidArgument(format!(
                    "endpoint exponent {e} is not integrable (must exceed -1)"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub evaluations: usize,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection of a smooth integrand on `[a, b]`: the segment
/// with the largest error is split until the summed error meets the budget.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> (QuadResult, bool) {
    let mut heap = BinaryHeap::new();
    let (value, err) = gauss_kronrod(f, a, b);
    heap.push(Segment { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    let mut evaluations = 15;
    let mut converged = false;
    for _ in 0..max_subdivisions {
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            converged = true;
            break;
        }
        let Some(seg) = heap.pop() else { break };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // Interval cannot be split further in floating point.
            heap.push(seg);
            break;
        }
        let (v1, e1) = gauss_kronrod(f, seg.a, mid);
        let (v2, e2) = gauss_kronrod(f, mid, seg.b);
        evaluations += 30;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.err;
        heap.push(Segment { a: seg.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, err: e2 });
    }
    if !converged && total_err <= abs_tol.max(rel_tol * total.abs()) {
        converged = true;
    }
    // Re-sum to shed the drift of the running totals.
    let (value, err) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.err));
    (
        QuadResult {
            value,
            err_estimate: err,
            evaluations,
        },
        converged,
    )
}

/// Integrates `req.integrand` over `[lo, hi]`.
///
/// A declared endpoint exponent `a` is removed by the substitution
/// `x - lo = (mid - lo) t^(1/(1+a))`, which turns `(x - lo)^a dx` into a bounded
/// multiple of `dt`; the interval is split at its midpoint so that each half
/// carries at most one substitution.
pub fn integrate(req: &QuadRequest<'_>) -> Result<QuadResult> {
    req.validate()?;
    let f = req.integrand;
    let (lo, hi) = (req.lo, req.hi);
    let mut pieces: Vec<(QuadResult, bool)> = Vec::with_capacity(2);
    let split = req.lo_exponent.is_some() || req.hi_exponent.is_some();
    let mid = 0.5 * (lo + hi);
    let share = if split { 0.5 } else { 1.0 };
    let abs_tol = req.abs_tol * share;

    if !split {
        pieces.push(adaptive(&|x| f(x), lo, hi, abs_tol, req.rel_tol, req.max_subdivisions));
    } else {
        let len = mid - lo;
        match req.lo_exponent {
            Some(e) => {
                let q = 1.0 / (1.0 + e);
                let g = move |t: f64| {
                    let x = lo + len * pow_nonneg(t, q);
                    f(x) * len * q * pow_nonneg(t, q - 1.0)
                };
                pieces.push(adaptive(&g, 0.0, 1.0, abs_tol, req.rel_tol, req.max_subdivisions));
            }
            None => pieces.push(adaptive(&|x| f(x), lo, mid, abs_tol, req.rel_tol, req.max_subdivisions)),
        }
        let len = hi - mid;
        match req.hi_exponent {
            Some(e) => {
                let q = 1.0 / (1.0 + e);
                let g = move |t: f64| {
                    let x = hi - len * pow_nonneg(t, q);
                    f(x) * len * q * pow_nonneg(t, q - 1.0)
                };
                pieces.push(adaptive(&g, 0.0, 1.0, abs_tol, req.rel_tol, req.max_subdivisions));
            }
            None => pieces.push(adaptive(&|x| f(x), mid, hi, abs_tol, req.rel_tol, req.max_subdivisions)),
        }
    }

    let value: f64 = pieces.iter().map(|(r, _)| r.value).sum();
    let err_estimate: f64 = pieces.iter().map(|(r, _)| r.err_estimate).sum();
    let evaluations = pieces.iter().map(|(r, _)| r.evaluations).sum();
    let converged = pieces.iter().all(|(_, c)| *c)
        || err_estimate <= req.abs_tol.max(req.rel_tol * value.abs());
    if !converged || !value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            lo,
            hi,
            value,
            err_estimate,
        });
    }
    Ok(QuadResult {
        value,
        err_estimate,
        evaluations,
    })
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let wt = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = wt;
        weights[n - 1 - i] = wt;
    }
    (nodes, weights)
}

/// `beta = int_0^1 y^-1/2 (1-y)^-1/2 (1+y)^-1/2 dy` after `y = t^2`:
/// `2 int_0^1 (1 - t^4)^-1/2 dt`, with the remaining `(1 - t)^-1/2` declared.
pub fn beta_const(tol: f64) -> Result<QuadResult> {
    let f = |t: f64| {
        let omt = 1.0 - t;
        2.0 / (omt * (1.0 + t) * (1.0 + t * t)).sqrt()
    };
    integrate(&QuadRequest::new(&f, 0.0, 1.0, tol).singular_hi(-0.5))
}

/// `beta` straight from the original integrand with both endpoint exponents declared.
pub fn beta_direct(tol: f64) -> Result<QuadResult> {
    let f = |y: f64| 1.0 / (y * (1.0 - y) * (1.0 + y)).sqrt();
    integrate(
        &QuadRequest::new(&f, 0.0, 1.0, tol)
            .singular_lo(-0.5)
            .singular_hi(-0.5),
    )
}

/// `gamma(x) = int_0^x dt / p(t)`; `+inf` at `x = 1`, where the integral diverges.
///
/// Computed in the variable `r = -ln(1 - t)`, where the integrand becomes
/// `e^(r/eps) (2 - e^-r)^(1/eps - 1)`.
pub fn gamma(x: f64, params: &ProblemParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("x", x, "[0, 1]"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(f64::INFINITY);
    }
    let inv_eps = 1.0 / params.epsilon();
    let upper = -(-x).ln_1p();
    let f = |r: f64| (r * inv_eps).exp() * pow_nonneg(2.0 - (-r).exp(), inv_eps - 1.0);
    let res = integrate(&QuadRequest::new(&f, 0.0, upper, 1e-300).rel_tol(1e-13))?;
    Ok(res.value)
}
