//! Scalar Dormand–Prince 5(4) integrator with embedded error control.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub atol: f64,
    pub rtol: f64,
    pub max_steps: usize,
    /// Largest step as a fraction of the interval.
    pub max_step_fraction: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 0.0,
            max_steps: 1_000_000,
            max_step_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOutcome {
    pub y: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl Dopri5 {
    pub fn with_atol(atol: f64) -> Self {
        Self {
            atol,
            ..Self::default()
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`.
    pub fn integrate<F>(&self, f: F, t0: f64, y0: f64, t1: f64) -> Result<OdeOutcome>
    where
        F: Fn(f64, f64) -> f64,
    {
        self.integrate_observed(f, t0, y0, t1, |_, _| {})
    }

    /// As [`Dopri5::integrate`], calling `observe(t, y)` after every accepted step.
    pub fn integrate_observed<F, O>(
        &self,
        f: F,
        t0: f64,
        y0: f64,
        t1: f64,
        mut observe: O,
    ) -> Result<OdeOutcome>
    where
        F: Fn(f64, f64) -> f64,
        O: FnMut(f64, f64),
    {
        let span = t1 - t0;
        if !(span > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "integration interval [{t0}, {t1}] is empty"
            )));
        }
        let h_max = span * self.max_step_fraction;
        let h_min = span * 1e-14;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, y);
        let mut h = {
            let scale = self.atol + self.rtol * y.abs();
            let guess = 0.01 * (scale / k1.abs().max(1e-300)).powf(0.2);
            guess.clamp(h_min * 10.0, h_max)
        };
        let mut steps = 0;
        let mut rejected = 0;
        observe(t, y);
        while t < t1 {
            if steps + rejected >= self.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: "step budget exhausted",
                });
            }
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            let k2 = f(t + C2 * h, y + h * A21 * k1);
            let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2));
            let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
            let k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
            let k6 = f(
                t + h,
                y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
            );
            let y_new = y + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
            let t_new = if last { t1 } else { t + h };
            let k7 = f(t_new, y_new);
            let err = (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
            let scale = self.atol + self.rtol * y.abs().max(y_new.abs());
            let ratio = err / scale;
            if !ratio.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite derivative",
                });
            }
            if ratio <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                steps += 1;
                observe(t, y);
                let grow = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h * grow).min(h_max);
            } else {
                rejected += 1;
                h *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
                if h < h_min {
                    return Err(Error::Integration {
                        t,
                        reason: "step size underflow",
                    });
                }
            }
        }
        Ok(OdeOutcome { y, steps, rejected })
    }
}
