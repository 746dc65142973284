//! wasm-bindgen exports for the static demo page in `www/`.
//!
//! Each export returns a JSON string. The `*_json` functions hold the logic
//! and are plain Rust so they can be tested natively.

use oblivious_kand::certificates::{check_bernoulli, constants};
use oblivious_kand::factor_lp::{approximation_ratio, r_k_f64, r_k_normalizer};
use oblivious_kand::oblivious::{BiasPartition, RoundingVector};
use oblivious_kand::rational::{format_rational, parse_rational, to_f64};
use oblivious_kand::Rational;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Larger pattern spaces make the in-browser LP too slow to be interactive.
pub const MAX_PATTERNS: u128 = 20_000;

fn list(s: &str) -> Result<Vec<Rational>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| parse_rational(x).map_err(|e| e.to_string())).collect()
}

#[derive(Serialize)]
struct RatioOut {
    k: usize,
    ell: usize,
    ratio: f64,
    alpha_star: f64,
    upper_bound: f64,
    /// Minimizing pattern weights, largest first.
    support: Vec<(String, f64)>,
}

/// Approximation ratio of the oblivious algorithm `(t, p)` given as comma lists.
pub fn ratio_json(k: usize, thresholds: &str, probs: &str) -> Result<String, String> {
    let t = BiasPartition::new(list(thresholds)?).map_err(|e| e.to_string())?;
    let p = RoundingVector::new(list(probs)?).map_err(|e| e.to_string())?;
    let c = constants(k).map_err(|e| e.to_string())?;
    let dim = 2 * (2 * t.ell() as u64 + 1);
    let patterns = oblivious_kand::rational::binomial(k as u64 + dim - 1, dim - 1);
    if patterns > MAX_PATTERNS {
        return Err(format!("{patterns} patterns is too many for the browser; use the CLI"));
    }
    let res = approximation_ratio(k, &t, &p).map_err(|e| e.to_string())?;
    let mut support: Vec<(String, f64)> = res.weights.support().map(|(c, w)| (c.to_string(), to_f64(w))).collect();
    support.sort_by(|a, b| b.1.total_cmp(&a.1));
    let out = RatioOut { k, ell: t.ell(), ratio: res.ratio, alpha_star: to_f64(&c.alpha_star), upper_bound: 0.5f64.powi(k as i32 - 1), support };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurveOut {
    k: usize,
    p_star: f64,
    alpha_star: f64,
    /// `(p, r_k(p)/normalizer)`: what the hard instance forces at rounding probability `p`,
    /// an upper bound on the superoblivious ratio that touches `α*` at `p*`.
    points: Vec<(f64, f64)>,
}

/// The hard solution's objective as a function of the superoblivious rounding probability.
pub fn curve_json(k: usize, points: usize) -> Result<String, String> {
    let c = constants(k).map_err(|e| e.to_string())?;
    let norm = to_f64(&r_k_normalizer(k));
    let n = points.clamp(2, 2000);
    let pts = (0..n)
        .map(|i| {
            let p = 0.5 + 0.5 * i as f64 / (n - 1) as f64;
            (p, r_k_f64(k, p) / norm)
        })
        .collect();
    serde_json::to_string(&CurveOut { k, p_star: to_f64(&c.p_star), alpha_star: to_f64(&c.alpha_star), points: pts }).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct BernoulliOut {
    k: usize,
    holds: bool,
    gamma: String,
    tight: Vec<(usize, usize)>,
    /// `(i, j, margin)` for every `i + j <= k`.
    margins: Vec<(usize, usize, f64)>,
}

/// Exact check of the Bernoulli-type inequalities at `γ_k`.
pub fn bernoulli_json(k: usize) -> Result<String, String> {
    if k > 200 {
        return Err("k is limited to 200 in the browser".into());
    }
    let r = check_bernoulli(k).map_err(|e| e.to_string())?;
    let c = constants(k).map_err(|e| e.to_string())?;
    let margins = r.margins.iter().map(|(i, j, m)| (*i, *j, to_f64(m))).collect();
    serde_json::to_string(&BernoulliOut { k, holds: r.holds, gamma: format_rational(&c.gamma), tight: r.tight, margins }).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn ratio(k: usize, thresholds: &str, probs: &str) -> Result<String, JsValue> {
    ratio_json(k, thresholds, probs).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn curve(k: usize, points: usize) -> Result<String, JsValue> {
    curve_json(k, points).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn bernoulli(k: usize) -> Result<String, JsValue> {
    bernoulli_json(k).map_err(JsValue::from)
}
