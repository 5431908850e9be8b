//! The Liouville change of variables `s = psi(x)` that turns the problem into
//! `-g'' + V g = mu g` on `(0, beta)`.
//!
//! `psi` has the parameter-free integrand `y^-1/2 (1-y)^-1/2 (1+y)^-1/2`.
//! Substituting `y = v^2` on `[0, 1/2]` and `1 - y = v^2` on `[1/2, 1]` makes
//! both halves smooth:
//!
//! ```text
//! psi(t)        = F_L(sqrt t),        F_L(u) = 2 int_0^u (1 - v^4)^-1/2 dv
//! beta - psi(t) = F_R(sqrt(1 - t)),   F_R(v) = 2 int_0^v (1 - v^2)^-1/2 (2 - v^2)^-1/2 dv
//! ```
//!
//! so a fixed Gauss–Legendre rule evaluates either to roundoff, and Newton on
//! `F_L` or `F_R` inverts `psi` while keeping both `phi` and `1 - phi` to full
//! relative precision.
//!
//! The gauge factor is `c = k(phi)` with
//! `k(z) = (w p)^-1/4 = z^1/4 (1 - z)^-a (1 + z)^b`, `a = 1/(2 eps) + 1/4`,
//! `b = 1/(2 eps) - 1/4`.

use serde::{Deserialize, Serialize};

use crate::coeffs::ProblemParams;
use crate::error::{domain, Error, Result};
use crate::quad::gauss_legendre;
use crate::roots::golden_section;

const GL_POINTS: usize = 40;
const HALF_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Which formula produced a potential value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `(3/4) s^-2`
    Left,
    Direct,
    /// `(1/eps^2 - 1/4) (beta - s)^-2`
    Right,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Left => "left",
            Branch::Direct => "direct",
            Branch::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSample {
    pub s: f64,
    pub v: f64,
    pub branch: Branch,
}

#[derive(Debug, Clone)]
pub struct LiouvilleMap {
    params: ProblemParams,
    beta: f64,
    /// `psi(1/2)`, where the two halves meet.
    s_mid: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    s_lo: f64,
    s_hi: f64,
}

/// Half-width `1e-4` of the asymptotic zones, as a fraction of `beta`.
pub const DEFAULT_CROSSOVER: f64 = 1e-4;

impl LiouvilleMap {
    pub fn new(params: ProblemParams) -> Self {
        let (nodes, weights) = gauss_legendre(GL_POINTS);
        let mut map = Self {
            params,
            beta: 0.0,
            s_mid: 0.0,
            nodes,
            weights,
            s_lo: 0.0,
            s_hi: 0.0,
        };
        map.s_mid = map.f_left(HALF_SQRT2);
        map.beta = map.s_mid + map.f_right(HALF_SQRT2);
        map.s_lo = DEFAULT_CROSSOVER * map.beta;
        map.s_hi = map.beta * (1.0 - DEFAULT_CROSSOVER);
        map
    }

    /// Moves the asymptotic zones to `s < frac beta` and `s > (1 - frac) beta`.
    pub fn with_crossover(mut self, frac: f64) -> Result<Self> {
        if !(frac > 0.0 && frac < 0.25) {
            return Err(domain("crossover fraction", frac, "(0, 1/4)"));
        }
        self.s_lo = frac * self.beta;
        self.s_hi = self.beta * (1.0 - frac);
        Ok(self)
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn crossover(&self) -> (f64, f64) {
        (self.s_lo, self.s_hi)
    }

    fn gl<F: Fn(f64) -> f64>(&self, upper: f64, f: F) -> f64 {
        let half = 0.5 * upper;
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(half * (1.0 + x)))
            .sum();
        half * sum
    }

    fn f_left(&self, u: f64) -> f64 {
        self.gl(u, |v| 2.0 / (1.0 - v.powi(4)).sqrt())
    }

    fn f_right(&self, v: f64) -> f64 {
        self.gl(v, |t| 2.0 / ((1.0 - t * t) * (2.0 - t * t)).sqrt())
    }

    /// `psi(t)` for `t` given together with `1 - t`.
    pub fn psi_split(&self, t: f64, tc: f64) -> f64 {
        if t <= 0.5 {
            self.f_left(t.sqrt())
        } else {
            self.beta - self.f_right(tc.sqrt())
        }
    }

    pub fn psi(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(domain("t", t, "[0, 1]"));
        }
        Ok(self.psi_split(t, 1.0 - t))
    }

    /// `(phi(s), 1 - phi(s))`.
    pub fn phi_split(&self, s: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.beta).contains(&s) {
            return Err(domain("s", s, "[0, beta]"));
        }
        if s <= self.s_mid {
            let u = self.invert(s, |u| self.f_left(u), |u| 2.0 / (1.0 - u.powi(4)).sqrt(), 0.5 * s);
            let z = u * u;
            Ok((z, 1.0 - z))
        } else {
            let sigma = self.beta - s;
            let v = self.invert(
                sigma,
                |v| self.f_right(v),
                |v| 2.0 / ((1.0 - v * v) * (2.0 - v * v)).sqrt(),
                sigma * HALF_SQRT2,
            );
            let zc = v * v;
            Ok((1.0 - zc, zc))
        }
    }

    /// Newton for `f(u) = target` on `[0, 1/sqrt 2]`; `f` is increasing and
    /// nearly linear there.
    fn invert<F, D>(&self, target: f64, f: F, df: D, guess: f64) -> f64
    where
        F: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        if target <= 0.0 {
            return 0.0;
        }
        let mut u = guess.clamp(0.0, HALF_SQRT2);
        for _ in 0..50 {
            let step = (f(u) - target) / df(u);
            let next = (u - step).clamp(0.0, HALF_SQRT2);
            let done = (next - u).abs() <= 4.0 * f64::EPSILON * next;
            u = next;
            if done {
                break;
            }
        }
        u
    }

    pub fn phi(&self, s: f64) -> Result<f64> {
        Ok(self.phi_split(s)?.0)
    }

    /// `phi' = sqrt(phi (1 - phi) (1 + phi))`.
    pub fn phi_prime(&self, s: f64) -> Result<f64> {
        let (z, zc) = self.phi_split(s)?;
        Ok((z * zc * (1.0 + z)).sqrt())
    }

    /// `phi'' = (1 - 3 phi^2) / 2`.
    pub fn phi_dprime(&self, s: f64) -> Result<f64> {
        let z = self.phi(s)?;
        Ok(0.5 * (1.0 - 3.0 * z * z))
    }

    /// Chebyshev–Lobatto points of `[0, beta]` paired with `phi`.
    pub fn grid(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        if points < 2 {
            return Err(Error::InvalidArgument("grid needs at least two points".into()));
        }
        (0..points)
            .map(|i| {
                let theta = std::f64::consts::PI * i as f64 / (points - 1) as f64;
                let s = 0.5 * self.beta * (1.0 - theta.cos());
                Ok((s, self.phi(s)?))
            })
            .collect()
    }

    fn a_exp(&self) -> f64 {
        0.5 / self.params.epsilon() + 0.25
    }

    fn b_exp(&self) -> f64 {
        0.5 / self.params.epsilon() - 0.25
    }

    /// `L = k'/k` and `L'` at `z`, given `zc = 1 - z`.
    fn log_derivs(&self, z: f64, zc: f64) -> (f64, f64) {
        let (a, b) = (self.a_exp(), self.b_exp());
        let l = 0.25 / z + a / zc + b / (1.0 + z);
        let dl = -0.25 / (z * z) + a / (zc * zc) - b / ((1.0 + z) * (1.0 + z));
        (l, dl)
    }

    fn ln_k(&self, z: f64, zc: f64) -> f64 {
        0.25 * z.ln() - self.a_exp() * zc.ln() + self.b_exp() * z.ln_1p()
    }

    pub fn k(&self, z: f64) -> Result<f64> {
        check_open_unit(z)?;
        Ok(self.ln_k(z, 1.0 - z).exp())
    }

    pub fn k_prime(&self, z: f64) -> Result<f64> {
        check_open_unit(z)?;
        let (l, _) = self.log_derivs(z, 1.0 - z);
        Ok(self.ln_k(z, 1.0 - z).exp() * l)
    }

    pub fn k_dprime(&self, z: f64) -> Result<f64> {
        check_open_unit(z)?;
        let (l, dl) = self.log_derivs(z, 1.0 - z);
        Ok(self.ln_k(z, 1.0 - z).exp() * (l * l + dl))
    }

    fn interior(&self, s: f64) -> Result<(f64, f64)> {
        if !(s > 0.0 && s < self.beta) {
            return Err(domain("s", s, "(0, beta)"));
        }
        let (z, zc) = self.phi_split(s)?;
        if z <= 0.0 || zc <= 0.0 {
            return Err(domain("s", s, "(0, beta) resolvable in f64"));
        }
        Ok((z, zc))
    }

    pub fn c(&self, s: f64) -> Result<f64> {
        let (z, zc) = self.interior(s)?;
        Ok(self.ln_k(z, zc).exp())
    }

    /// `c' = k'(phi) phi'`.
    pub fn c_prime(&self, s: f64) -> Result<f64> {
        let (z, zc) = self.interior(s)?;
        let (l, _) = self.log_derivs(z, zc);
        let dphi = (z * zc * (1.0 + z)).sqrt();
        Ok(self.ln_k(z, zc).exp() * l * dphi)
    }

    /// `c'' = k''(phi) phi'^2 + k'(phi) phi''`.
    pub fn c_dprime(&self, s: f64) -> Result<f64> {
        let (z, zc) = self.interior(s)?;
        let (l, dl) = self.log_derivs(z, zc);
        let dphi2 = z * zc * (1.0 + z);
        let ddphi = 0.5 * (1.0 - 3.0 * z * z);
        Ok(self.ln_k(z, zc).exp() * ((l * l + dl) * dphi2 + l * ddphi))
    }

    /// `V(s)` from the expanded chain-rule form
    ///
    /// ```text
    /// V = -c c'' P / phi' - c c' (phi'^2 p'(phi) - P phi'') / phi'^2,   P = p(phi)
    /// ```
    ///
    /// with no asymptotic switching. `c^2` and `P` are combined in log form
    /// so small `eps` cannot overflow the individual factors.
    pub fn potential_direct(&self, s: f64) -> Result<f64> {
        let (z, zc) = self.interior(s)?;
        Ok(self.expanded_form(z, zc))
    }

    fn expanded_form(&self, z: f64, zc: f64) -> f64 {
        let (l, dl) = self.log_derivs(z, zc);
        let dphi2 = z * zc * (1.0 + z);
        let dphi = dphi2.sqrt();
        let ddphi = 0.5 * (1.0 - 3.0 * z * z);
        // c''/c and c'/c
        let cdd = (l * l + dl) * dphi2 + l * ddphi;
        let cd = l * dphi;
        let big_a = self.params.p_exp_minus();
        let big_b = self.params.p_exp_plus();
        let ln_c2 = 2.0 * self.ln_k(z, zc);
        let ln_p = big_a * zc.ln() + big_b * z.ln_1p();
        let c2_p = (ln_c2 + ln_p).exp();
        // c^2 p'(phi), with p' = (1-z)^(A-1) (1+z)^(B-1) (B (1-z) - A (1+z))
        let c2_dp = (ln_c2 + (big_a - 1.0) * zc.ln() + (big_b - 1.0) * z.ln_1p()).exp()
            * (big_b * zc - big_a * (1.0 + z));
        -cdd * c2_p / dphi - cd * (dphi2 * c2_dp - c2_p * ddphi) / dphi2
    }

    /// The same potential reduced to a function of `z = phi(s)`:
    /// `W(z) = (L^2 - L') z (1 - z^2) - L (1 - 3 z^2) / 2`.
    pub fn potential_reduced(&self, s: f64) -> Result<f64> {
        let (z, zc) = self.interior(s)?;
        Ok(self.reduced_form(z, zc))
    }

    fn reduced_form(&self, z: f64, zc: f64) -> f64 {
        let (l, dl) = self.log_derivs(z, zc);
        (l * l - dl) * z * zc * (1.0 + z) - 0.5 * l * (1.0 - 3.0 * z * z)
    }

    pub fn left_asymptote(&self, s: f64) -> f64 {
        0.75 / (s * s)
    }

    pub fn right_asymptote(&self, s: f64) -> f64 {
        let e = self.params.epsilon();
        let d = self.beta - s;
        (1.0 / (e * e) - 0.25) / (d * d)
    }

    pub fn potential(&self, s: f64) -> Result<PotentialSample> {
        if !(s > 0.0 && s < self.beta) {
            return Err(domain("s", s, "(0, beta)"));
        }
        let (v, branch) = if s < self.s_lo {
            (self.left_asymptote(s), Branch::Left)
        } else if s > self.s_hi {
            (self.right_asymptote(s), Branch::Right)
        } else {
            (self.potential_direct(s)?, Branch::Direct)
        };
        Ok(PotentialSample { s, v, branch })
    }

    #[allow(non_snake_case)]
    pub fn potential_V(&self, s: f64) -> Result<f64> {
        Ok(self.potential(s)?.v)
    }

    /// `V` at `points` equally spaced interior points.
    pub fn sample_potential(&self, points: usize) -> Result<Vec<PotentialSample>> {
        if points == 0 {
            return Err(Error::InvalidArgument("need at least one sample".into()));
        }
        let h = self.beta / (points + 1) as f64;
        (1..=points).map(|i| self.potential(i as f64 * h)).collect()
    }

    /// `(argmin, min)` of `V` over `[s_lo, s_hi]`, by a grid scan followed by
    /// golden-section refinement to `tol` in `s`.
    pub fn alpha_min(&self, tol: f64) -> Result<(f64, f64)> {
        if !(tol > 0.0) {
            return Err(domain("tol", tol, "(0, inf)"));
        }
        const SCAN: usize = 2000;
        let h = (self.s_hi - self.s_lo) / SCAN as f64;
        let mut best = (0usize, f64::INFINITY);
        for i in 0..=SCAN {
            let v = self.potential_direct(self.s_lo + i as f64 * h)?;
            if !v.is_finite() {
                return Err(Error::Minimisation(format!(
                    "V is not finite at s = {}",
                    self.s_lo + i as f64 * h
                )));
            }
            if v < best.1 {
                best = (i, v);
            }
        }
        if best.0 == 0 || best.0 == SCAN {
            return Err(Error::Minimisation(
                "minimum of V sits on the edge of the search interval".into(),
            ));
        }
        let lo = self.s_lo + (best.0 - 1) as f64 * h;
        let hi = self.s_lo + (best.0 + 1) as f64 * h;
        golden_section(|s| self.potential_direct(s), lo, hi, tol)
    }

    pub fn alpha(&self) -> Result<f64> {
        Ok(self.alpha_min(1e-10)?.1)
    }
}

fn check_open_unit(z: f64) -> Result<()> {
    if z > 0.0 && z < 1.0 {
        Ok(())
    } else {
        Err(domain("z", z, "(0, 1)"))
    }
}
