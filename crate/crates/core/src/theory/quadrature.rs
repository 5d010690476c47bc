//! Gauss–Legendre quadrature and Euler–Maclaurin sums of smooth tails.

use std::f64::consts::PI;
use std::sync::OnceLock;

const GL_POINTS: usize = 16;

/// Nodes and weights of the 16-point rule on [-1, 1], from Newton
/// iteration on the Legendre polynomial.
fn gauss_legendre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

/// `∫_lo^hi f(x) dx` for `0 < lo ≤ hi`, integrating in `ln x` with one
/// 16-point panel per factor `e^{1/2}`.
pub fn integrate_log<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let (s0, s1) = (lo.ln(), hi.ln());
    let panels = ((s1 - s0) / 0.5).ceil().max(1.0) as usize;
    let width = (s1 - s0) / panels as f64;
    let rule = gauss_legendre();
    let mut total = 0.0;
    for k in 0..panels {
        let mid = s0 + (k as f64 + 0.5) * width;
        let mut panel = 0.0;
        for &(node, weight) in rule {
            let x = (mid + 0.5 * width * node).exp();
            panel += weight * f(x) * x;
        }
        total += 0.5 * width * panel;
    }
    total
}

/// `Σ_{k=lo}^{hi} f(k)` for a smooth `f`: the first `exact` terms directly,
/// the remainder by Euler–Maclaurin with the first derivative correction.
///
/// `hi` may be fractional; the Euler–Maclaurin part then integrates up to
/// `hi` itself, which keeps the result continuous in `hi`.
pub fn smooth_sum<F: Fn(f64) -> f64>(f: F, lo: u64, hi: f64, exact: u64) -> f64 {
    if hi < lo as f64 {
        return 0.0;
    }
    let split = lo.saturating_add(exact);
    let last = hi.floor() as u64;
    let mut total: f64 = (lo..split.min(last + 1)).map(|k| f(k as f64)).sum();
    if (split as f64) <= hi {
        let (a, b) = (split as f64, hi);
        let deriv = |x: f64| {
            let h = 1e-4 * x;
            (f(x + h) - f(x - h)) / (2.0 * h)
        };
        total += integrate_log(&f, a, b) + 0.5 * (f(a) + f(b)) + (deriv(b) - deriv(a)) / 12.0;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_integrate_polynomials() {
        let rule = gauss_legendre();
        let w: f64 = rule.iter().map(|r| r.1).sum();
        assert!((w - 2.0).abs() < 1e-14);
        // exact for degree ≤ 31
        let x30: f64 = rule.iter().map(|&(x, w)| w * x.powi(30)).sum();
        assert!((x30 - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_power_laws() {
        let got = integrate_log(|x| x.powf(-2.3), 10.0, 1e6);
        let exact = (10f64.powf(-1.3) - 1e6f64.powf(-1.3)) / 1.3;
        assert!(((got - exact) / exact).abs() < 1e-13);
    }

    #[test]
    fn smooth_sum_matches_direct_summation() {
        let f = |x: f64| x.powf(-1.7) * (1.0 + 3.0 / x);
        let direct: f64 = (20..=200_000u64).map(|k| f(k as f64)).sum();
        let got = smooth_sum(f, 20, 200_000.0, 100);
        assert!(((got - direct) / direct).abs() < 1e-9, "{got} vs {direct}");
        let short = smooth_sum(f, 5, 9.0, 100);
        let exact: f64 = (5..=9u64).map(|k| f(k as f64)).sum();
        assert_eq!(short, exact);
    }
}
