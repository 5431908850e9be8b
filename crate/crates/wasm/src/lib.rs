//! Three operations for the browser page: the potential curve, window
//! eigenvalues, and the recurrence discrepancy across a range of lambda.
//! Each has a plain Rust form (tested natively) and a `#[wasm_bindgen]` wrapper.

use bos_core::liouville::LiouvilleMap;
use bos_core::recurrence::{default_n_start, miller_discrepancy};
use bos_core::shooting::solve_window;
use bos_core::{ProblemParams, Window};
use wasm_bindgen::prelude::*;

/// Largest eigenvalue index the page may request.
pub const MAX_INDEX: usize = 40;
/// Largest number of samples per curve.
pub const MAX_POINTS: usize = 4000;

fn params(eps: f64) -> Result<ProblemParams, String> {
    ProblemParams::new(eps).map_err(|e| e.to_string())
}

/// `[s_0, V(s_0), s_1, V(s_1), ...]` on a Chebyshev grid, with `V` clipped
/// to `v_max` so the plot stays readable.
pub fn potential_points(eps: f64, points: usize, v_max: f64) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    let map = LiouvilleMap::new(params(eps)?);
    let samples = map.sample_potential(points).map_err(|e| e.to_string())?;
    Ok(samples.iter().flat_map(|p| [p.s, p.v.min(v_max)]).collect())
}

/// `[beta, alpha, argmin]` for the potential.
pub fn potential_summary(eps: f64) -> Result<Vec<f64>, String> {
    let map = LiouvilleMap::new(params(eps)?);
    let (s, alpha) = map.alpha_min(1e-10).map_err(|e| e.to_string())?;
    Ok(vec![map.beta(), alpha, s])
}

/// `lambda_1^(m) .. lambda_n^(m)`.
pub fn window_lambdas(eps: f64, m: u32, n: usize) -> Result<Vec<f64>, String> {
    if !(1..=MAX_INDEX).contains(&n) {
        return Err(format!("n must lie in 1..={MAX_INDEX}"));
    }
    let p = params(eps)?;
    let w = Window::new(m).map_err(|e| e.to_string())?;
    (1..=n)
        .map(|k| solve_window(&p, w, k, 1e-8).map(|e| e.lambda).map_err(|e| e.to_string()))
        .collect()
}

/// `[lambda_0, D(lambda_0), ...]` for the bounded discrepancy `D` on a
/// uniform grid; zeros of `D` are the eigenvalues. One fixed, generous start
/// index is used throughout: a plot needs no doubling check.
pub fn discrepancy_points(eps: f64, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(lo < hi) {
        return Err("empty lambda range".into());
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    let p = params(eps)?;
    let n_start = 16 * default_n_start(&p);
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let lambda = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let d = miller_discrepancy(lambda, &p, n_start).map_err(|e| e.to_string())?;
        out.push(lambda);
        out.push(d.scaled);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn potential_curve(eps: f64, points: usize, v_max: f64) -> Result<Vec<f64>, JsError> {
    potential_points(eps, points, v_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn potential_constants(eps: f64) -> Result<Vec<f64>, JsError> {
    potential_summary(eps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn window_eigenvalues(eps: f64, m: u32, n: usize) -> Result<Vec<f64>, JsError> {
    window_lambdas(eps, m, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn recurrence_discrepancy(eps: f64, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    discrepancy_points(eps, lo, hi, points).map_err(|e| JsError::new(&e))
}
