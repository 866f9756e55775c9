//! Browser bindings. Each export returns a flat `Float64Array` the page can
//! plot directly; the computations live in plain functions so they can be
//! tested natively.

use inflation_spectra::cocycle::lyapunov_pair;
use inflation_spectra::mahler::figure1_data;
use inflation_spectra::paircorr::{periodogram, WeightVector};
use inflation_spectra::substitution::classify;
use wasm_bindgen::prelude::*;

/// Longest cocycle the page may request per k.
pub const MAX_COCYCLE_LENGTH: usize = 200_000;
/// Largest patch radius the page may request.
pub const MAX_RADIUS: f64 = 20_000.0;
/// Largest number of k values per scan.
pub const MAX_POINTS: usize = 2_000;

/// Triples (m, log λ, m(q_m)) for m in `from..=to`.
pub fn figure1_series(from: u32, to: u32) -> Result<Vec<f64>, String> {
    let rows = figure1_data(u64::from(from), u64::from(to)).map_err(|e| e.to_string())?;
    Ok(rows
        .iter()
        .flat_map(|r| [r.m as f64, r.log_lambda, r.m_q])
        .collect())
}

fn k_grid(k_from: f64, k_to: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    if !(k_from.is_finite() && k_to.is_finite() && k_from < k_to) {
        return Err("need a finite k range with k_from < k_to".into());
    }
    let step = (k_to - k_from) / (points - 1) as f64;
    Ok((0..points).map(|i| k_from + step * i as f64).collect())
}

/// Triples (k, χ_min, χ_max) on an even grid of k. Points whose orbit hits the
/// zero set of the cocycle come back as NaN.
pub fn exponent_scan(
    m: u32,
    k_from: f64,
    k_to: f64,
    points: usize,
    n: usize,
) -> Result<Vec<f64>, String> {
    if n == 0 || n > MAX_COCYCLE_LENGTH {
        return Err(format!("n must lie in 1..={MAX_COCYCLE_LENGTH}"));
    }
    classify(u64::from(m)).map_err(|e| e.to_string())?;
    Ok(k_grid(k_from, k_to, points)?
        .into_iter()
        .flat_map(|k| match lyapunov_pair(u64::from(m), k, n) {
            Ok(e) => [k, e.chi_min, e.chi_max],
            Err(_) => [k, f64::NAN, f64::NAN],
        })
        .collect())
}

/// Pairs (k, |Σ u e^{-2πikx}|² / 2R) over the patch [−R, R] with real weights.
pub fn periodogram_curve(
    m: u32,
    u0: f64,
    u1: f64,
    radius: f64,
    k_from: f64,
    k_to: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if !(radius > 0.0 && radius <= MAX_RADIUS) {
        return Err(format!("radius must lie in (0, {MAX_RADIUS}]"));
    }
    let ks = k_grid(k_from, k_to, points)?;
    let samples = periodogram(u64::from(m), WeightVector::real(u0, u1), radius, &ks)
        .map_err(|e| e.to_string())?;
    Ok(samples.iter().flat_map(|s| [s.k, s.intensity]).collect())
}

/// Spectral class and λ as a short label.
#[wasm_bindgen(js_name = classify)]
pub fn classify_js(m: u32) -> Result<String, JsError> {
    let m = u64::from(m);
    let class = classify(m).map_err(|e| JsError::new(&e.to_string()))?;
    let lambda = inflation_spectra::substitution::eigen_data(m)
        .map_err(|e| JsError::new(&e.to_string()))?
        .lambda_plus;
    Ok(format!("{class}, λ ≈ {lambda:.6}"))
}

#[wasm_bindgen(js_name = figure1Series)]
pub fn figure1_series_js(from: u32, to: u32) -> Result<Vec<f64>, JsError> {
    figure1_series(from, to).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = exponentScan)]
pub fn exponent_scan_js(
    m: u32,
    k_from: f64,
    k_to: f64,
    points: usize,
    n: usize,
) -> Result<Vec<f64>, JsError> {
    exponent_scan(m, k_from, k_to, points, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = periodogramCurve)]
#[allow(clippy::too_many_arguments)]
pub fn periodogram_curve_js(
    m: u32,
    u0: f64,
    u1: f64,
    radius: f64,
    k_from: f64,
    k_to: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    periodogram_curve(m, u0, u1, radius, k_from, k_to, points).map_err(|e| JsError::new(&e))
}
