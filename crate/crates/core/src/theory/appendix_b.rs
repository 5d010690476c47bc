//! Numerical check that the cumulative edge ratio built from the
//! power-law approximations of `#(d)` and `X(d1,d2)` has the shape of
//! `g(d1,d2) = (d1+d2)^{1−a} d1^a d2^a` when `d1/d2` is large.
//!
//! For each pair the ratio
//!
//! ```text
//!   Σ_{i ≥ j, i > d1, j > d2} (i+j)^{1−a} (ij)^{−2}
//!   ------------------------------------------------
//!   Σ_{i > d1} i^{−2−a} · Σ_{j > d2} j^{−2−a}
//! ```
//!
//! is divided by `g`'s shape; the check reports how far those quotients
//! spread around the single constant that best balances them.
//!
//! Infinite sums are evaluated exactly for the first terms, then by
//! Euler–Maclaurin up to `truncation_factor × threshold`, then closed with a
//! power-law tail integral whose exponent is read off the summand.

use serde::Serialize;

use super::quadrature::smooth_sum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixBConfig {
    /// Terms summed one by one before switching to Euler–Maclaurin.
    pub exact_terms: u64,
    /// Explicit summation stops at this multiple of the threshold.
    pub truncation_factor: f64,
    /// Largest accepted relative uncertainty of a tail correction.
    pub truncation_tolerance: f64,
}

impl Default for AppendixBConfig {
    fn default() -> Self {
        AppendixBConfig { exact_terms: 256, truncation_factor: 1e3, truncation_tolerance: 1e-3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixBPoint {
    pub d1: u64,
    pub d2: u64,
    pub ratio: f64,
    pub shape: f64,
    pub relative_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixBReport {
    pub a2: f64,
    pub constant: f64,
    pub max_relative_deviation: f64,
    pub max_truncation_error: f64,
    pub points: Vec<AppendixBPoint>,
}

/// Σ_{k > start} f(k) with `(value, relative truncation uncertainty)`.
fn tail_sum<F: Fn(f64) -> f64>(f: F, start: u64, cfg: &AppendixBConfig) -> Result<(f64, f64)> {
    let upper = ((start.max(1) as f64) * cfg.truncation_factor).floor() as u64;
    let upper = upper.max(start + cfg.exact_terms + 1);
    let body = smooth_sum(&f, start + 1, upper as f64, cfg.exact_terms);

    let m = upper as f64;
    let fm = f(m);
    // local and secant log-slopes at the truncation point
    let local = -((f(m * 1.001)).ln() - (f(m / 1.001)).ln()) / (1.001f64 * 1.001).ln();
    let secant = -(fm.ln() - f(m / 10.0).ln()) / 10f64.ln();
    if !(local > 1.0 && secant > 1.0) {
        return Err(Error::domain(format!("summand does not decay fast enough at {m} (log-slope {local})")));
    }
    // Σ_{k > m} f(k) ≈ ∫_m^∞ f − f(m)/2
    let tail = fm * m / (local - 1.0) - 0.5 * fm;
    let alt = fm * m / (secant - 1.0) - 0.5 * fm;
    let total = body + tail;
    Ok((total, (tail - alt).abs() / total))
}

/// Numerator of the ratio; the inner sum over `j` runs over `(d2, i]`.
fn double_tail_sum(a: f64, d1: u64, d2: u64, cfg: &AppendixBConfig) -> Result<(f64, f64)> {
    let exponent = 1.0 - a;
    let inner = |i: f64| {
        let sum = smooth_sum(|j| (i + j).powf(exponent) / (j * j), d2 + 1, i, cfg.exact_terms);
        sum / (i * i)
    };
    tail_sum(inner, d1, cfg)
}

pub fn appendix_b_check(a2: f64, pairs: &[(u64, u64)], cfg: &AppendixBConfig) -> Result<AppendixBReport> {
    if !(a2.is_finite() && a2 > 0.0) {
        return Err(Error::param(format!("a2 must be positive, got {a2}")));
    }
    if pairs.is_empty() {
        return Err(Error::param("no (d1, d2) pairs to check"));
    }
    let mut max_trunc: f64 = 0.0;
    let mut raw = Vec::with_capacity(pairs.len());
    for &(d1, d2) in pairs {
        if d2 == 0 || d1 < d2 {
            return Err(Error::param(format!("need d1 ≥ d2 ≥ 1, got ({d1}, {d2})")));
        }
        let (num, e_num) = double_tail_sum(a2, d1, d2, cfg)?;
        let (den1, e1) = tail_sum(|i| i.powf(-2.0 - a2), d1, cfg)?;
        let (den2, e2) = tail_sum(|j| j.powf(-2.0 - a2), d2, cfg)?;
        let trunc = e_num + e1 + e2;
        if trunc > cfg.truncation_tolerance {
            return Err(Error::domain(format!(
                "truncation error {trunc:.3e} at ({d1}, {d2}) exceeds {:.1e}",
                cfg.truncation_tolerance
            )));
        }
        max_trunc = max_trunc.max(trunc);
        let (x1, x2) = (d1 as f64, d2 as f64);
        let shape = (x1 + x2).powf(1.0 - a2) * x1.powf(a2) * x2.powf(a2);
        raw.push((d1, d2, num / (den1 * den2), shape));
    }

    // the constant minimising the largest |q/c − 1| balances the extremes
    let quotients = raw.iter().map(|&(_, _, r, s)| r / s);
    let (lo, hi) = quotients.fold((f64::INFINITY, 0f64), |(lo, hi), q| (lo.min(q), hi.max(q)));
    let constant = 0.5 * (lo + hi);
    let points: Vec<AppendixBPoint> = raw
        .into_iter()
        .map(|(d1, d2, ratio, shape)| AppendixBPoint {
            d1,
            d2,
            ratio,
            shape,
            relative_deviation: (ratio / (constant * shape) - 1.0).abs(),
        })
        .collect();
    let max_relative_deviation = points.iter().map(|p| p.relative_deviation).fold(0.0, f64::max);
    Ok(AppendixBReport { a2, constant, max_relative_deviation, max_truncation_error: max_trunc, points })
}

/// `d2 ∈ [10, 100]` and `d1/d2 ∈ [10, 1000]`, both sampled at quarter
/// decades.
pub fn default_pairs() -> Vec<(u64, u64)> {
    let mut pairs = Vec::new();
    for i in 0..=4 {
        let d2 = 10f64.powf(1.0 + 0.25 * i as f64).round() as u64;
        for k in 0..=8 {
            let ratio = 10f64.powf(1.0 + 0.25 * k as f64);
            pairs.push(((d2 as f64 * ratio).round() as u64, d2));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_sum_of_pure_power_law() {
        // Σ_{k>d} k^{-2} against the digamma-free reference Σ_{k>d} = ψ'(d+1),
        // computed here by brute force over 10^7 terms plus the 1/N tail.
        let cfg = AppendixBConfig::default();
        let (got, err) = tail_sum(|k| k.powi(-2), 10, &cfg).unwrap();
        let brute: f64 = (11..10_000_000u64).map(|k| (k as f64).powi(-2)).sum::<f64>() + 1.0 / 9_999_999.5;
        assert!(((got - brute) / brute).abs() < 1e-9, "{got} vs {brute}");
        assert!(err < 1e-6);
    }

    #[test]
    fn double_sum_against_brute_force() {
        let cfg = AppendixBConfig { exact_terms: 64, ..Default::default() };
        let a = 1.5;
        let (d1, d2) = (40u64, 4u64);
        let (got, _) = double_tail_sum(a, d1, d2, &cfg).unwrap();
        let limit = 20_000u64;
        let mut brute = 0.0;
        for i in (d1 + 1)..=limit {
            let x = i as f64;
            let inner: f64 = ((d2 + 1)..=i).map(|j| (x + j as f64).powf(1.0 - a) / (j * j) as f64).sum();
            brute += inner / (x * x);
        }
        // the i > 2·10^4 remainder is about (40 / 2·10^4)^1.5 ≈ 1e-4 of the total
        let rel = (got - brute) / brute;
        assert!(rel > 0.0 && rel < 1e-3, "{got} vs {brute}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let cfg = AppendixBConfig::default();
        assert!(appendix_b_check(0.0, &[(100, 10)], &cfg).is_err());
        assert!(appendix_b_check(0.3, &[], &cfg).is_err());
        assert!(appendix_b_check(0.3, &[(5, 10)], &cfg).is_err());
    }
}
