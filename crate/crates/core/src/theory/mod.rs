//! Closed-form expectations for Buckley–Osthus graphs and numerical checks
//! of the approximations the estimators rely on.

mod appendix_b;
mod prop1;
pub mod quadrature;
mod special;

pub use appendix_b::{appendix_b_check, default_pairs, AppendixBConfig, AppendixBPoint, AppendixBReport};
pub use prop1::{prop1_scaling_check, Prop1Report, Prop1Row};
pub use special::{ln_gamma, log_beta};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub a: f64,
    pub m: u32,
    pub n: f64,
}

impl TheoryParams {
    pub fn new(a: f64, m: u32, n: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::param(format!("a must be positive, got {a}")));
        }
        if m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        if !(n.is_finite() && n >= 0.0) {
            return Err(Error::param(format!("n must be non-negative, got {n}")));
        }
        Ok(TheoryParams { a, m, n })
    }
}

/// Leading term of `E #(d)`: `n · B(d − m + ma, a + 2) / B(ma, a + 1)`.
pub fn expected_degree_count(p: &TheoryParams, d: u64) -> Result<f64> {
    let m = p.m as u64;
    if d < m {
        return Err(Error::domain(format!("degree {d} below m = {m}")));
    }
    let (a, m) = (p.a, p.m as f64);
    let num = log_beta(d as f64 - m + m * a, a + 2.0)?;
    let den = log_beta(m * a, a + 1.0)?;
    Ok(p.n * (num - den).exp())
}

/// Leading term of `E X(d1,d2)`:
/// `n · m a (a+1) Γ(ma+a+1)/Γ(ma) · (d1+d2)^{1−a} / (d1² d2²)`.
pub fn expected_edge_count(p: &TheoryParams, d1: u64, d2: u64) -> Result<f64> {
    let m = p.m as u64;
    if d1 < m || d2 < m {
        return Err(Error::domain(format!("degrees ({d1}, {d2}) below m = {m}")));
    }
    let (a, m) = (p.a, p.m as f64);
    let gamma_ratio = (ln_gamma(m * a + a + 1.0) - ln_gamma(m * a)).exp();
    let (x1, x2) = (d1 as f64, d2 as f64);
    Ok(p.n * m * a * (a + 1.0) * gamma_ratio * (x1 + x2).powf(1.0 - a) / (x1 * x1 * x2 * x2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(n: f64) -> TheoryParams {
        TheoryParams::new(1.0, 1, n).unwrap()
    }

    #[test]
    fn degree_counts_at_a_equals_one() {
        // B(d,3)/B(1,2) = 4/(d(d+1)(d+2))
        let p = br(1000.0);
        for d in 1..=50u64 {
            let x = d as f64;
            let exact = 4000.0 / (x * (x + 1.0) * (x + 2.0));
            let got = expected_degree_count(&p, d).unwrap();
            assert!(((got - exact) / exact).abs() < 1e-12, "d={d}");
        }
        assert!((expected_degree_count(&p, 1).unwrap() - 2000.0 / 3.0).abs() < 1e-9);
        assert!((expected_degree_count(&p, 2).unwrap() - 1000.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn degree_counts_sum_to_n_at_a_equals_one() {
        let p = br(1.0);
        let partial: f64 = (1..=1_000_000u64).map(|d| expected_degree_count(&p, d).unwrap()).sum();
        // telescoping: Σ_{d ≤ D} 4/(d(d+1)(d+2)) = 1 − 2/((D+1)(D+2))
        let exact = 1.0 - 2.0 / (1_000_001.0 * 1_000_002.0);
        assert!((partial - exact).abs() < 1e-9);
    }

    #[test]
    fn degree_counts_decay_like_power_law() {
        for &a in &[0.276, 0.5, 1.0, 2.0] {
            let p = TheoryParams::new(a, 3, 1.0).unwrap();
            let ratio = expected_degree_count(&p, 10_000).unwrap() / expected_degree_count(&p, 1_000).unwrap();
            let target = 10f64.powf(-2.0 - a);
            assert!((ratio / target - 1.0).abs() < 0.02, "a={a}: {ratio} vs {target}");
        }
    }

    #[test]
    fn degree_count_domain() {
        let p = TheoryParams::new(0.5, 3, 10.0).unwrap();
        assert!(matches!(expected_degree_count(&p, 2), Err(Error::Domain(_))));
        assert!(TheoryParams::new(0.0, 1, 1.0).is_err());
        assert!(TheoryParams::new(1.0, 0, 1.0).is_err());
    }

    #[test]
    fn edge_counts_closed_form_and_scaling() {
        let p = br(10.0);
        let got = expected_edge_count(&p, 3, 5).unwrap();
        assert!((got - 40.0 / (9.0 * 25.0)).abs() < 1e-12);
        for &a in &[0.276, 0.5, 1.7] {
            let p = TheoryParams::new(a, 2, 1e5).unwrap();
            let base = expected_edge_count(&p, 30, 7).unwrap();
            let scaled = expected_edge_count(&p, 60, 14).unwrap();
            let factor = 2f64.powf(1.0 - a) / 16.0;
            assert!((scaled / base / factor - 1.0).abs() < 1e-12);
        }
        assert!(expected_edge_count(&TheoryParams::new(0.5, 3, 1.0).unwrap(), 2, 10).is_err());
    }
}
