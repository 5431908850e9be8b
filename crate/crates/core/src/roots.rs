//! Bracketed scalar root finding and minimisation.

use crate::error::{Error, Result};

/// Final bracket of a root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub estimate: f64,
    pub evaluations: usize,
}

/// Illinois-modified regula falsi on `[lo, hi]` with `f(lo) < 0 < f(hi)`
/// (after orientation), shrinking the bracket below `2 xtol`.
///
/// New iterates are kept at least `xtol` away from the current endpoints so
/// the bracket keeps collapsing from both sides near the root.
pub fn illinois<F>(mut f: F, lo: f64, hi: f64, flo: f64, fhi: f64, xtol: f64, max_iter: usize) -> Result<RootBracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(flo.signum() * fhi.signum() < 0.0) && flo != 0.0 && fhi != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "root is not bracketed: f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    if flo == 0.0 {
        return Ok(RootBracket { lo, hi: lo, estimate: lo, evaluations: 0 });
    }
    if fhi == 0.0 {
        return Ok(RootBracket { lo: hi, hi, estimate: hi, evaluations: 0 });
    }
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, flo, fhi);
    let mut side = 0i8;
    let mut evaluations = 0;
    while (b - a).abs() > 2.0 * xtol {
        if evaluations >= max_iter {
            return Err(Error::InvalidArgument(format!(
                "root search did not converge in {max_iter} evaluations (bracket [{a}, {b}])"
            )));
        }
        let width = b - a;
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !x.is_finite() || x <= a || x >= b {
            x = 0.5 * (a + b);
        }
        let guard = xtol.min(0.25 * width);
        x = x.clamp(a + guard, b - guard);
        let fx = f(x)?;
        evaluations += 1;
        if fx == 0.0 {
            return Ok(RootBracket { lo: x, hi: x, estimate: x, evaluations });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        // Illinois can still stall on one side; fall back to bisection then.
        if (b - a) > 0.5 * width && evaluations % 3 == 0 {
            let m = 0.5 * (a + b);
            let fm = f(m)?;
            evaluations += 1;
            if fm == 0.0 {
                return Ok(RootBracket { lo: m, hi: m, estimate: m, evaluations });
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
            side = 0;
        }
    }
    Ok(RootBracket {
        lo: a,
        hi: b,
        estimate: 0.5 * (a + b),
        evaluations,
    })
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmin, min)`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) {
        return Err(Error::Minimisation(format!("empty interval [{lo}, {hi}]")));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..300 {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}
