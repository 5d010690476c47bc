//! Estimators of the initial attractiveness from cumulative statistics.
//!
//! Degree estimator: fit `f(d) = b1 d^{−1−a1}` to `#~(d)` over a degree range.
//! Edge estimator: fit `g(d1,d2) = b2 (d1+d2)^{1−a2} d1^{a2} d2^{a2}` to
//! `rho~(d1,d2)` over pairs of that range with `d1/d2` above a cutoff.
//! Both minimise the mean squared difference of square roots, with
//! parameters `(a, ln b)`, by damped Gauss–Newton.

mod gauss_newton;
mod range;

pub use gauss_newton::{gauss_newton, GaussNewtonOptions, GaussNewtonResult, LeastSquares, Termination};
pub use range::{
    floor_degree, select_degree_range, select_range, DegreeRangeChoice, RangeChoice, RangeSelectionOptions, WindowScore,
};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{LogGrid, RhoSurface};

pub fn eval_f(a1: f64, b1: f64, d: f64) -> f64 {
    b1 * d.powf(-1.0 - a1)
}

pub fn eval_g(a2: f64, b2: f64, d1: f64, d2: f64) -> f64 {
    b2 * (d1 + d2).powf(1.0 - a2) * d1.powf(a2) * d2.powf(a2)
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::param("regression needs at least two paired points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("regression abscissae are all equal"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Least squares on `(log10 d, log10 value)`; every value must be positive.
pub fn loglog_regression(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if let Some(&(d, v)) = points.iter().find(|&&(d, v)| !(d > 0.0 && v > 0.0)) {
        return Err(Error::domain(format!("log-log regression needs positive data, got ({d}, {v})")));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    linear_regression(&x, &y)
}

/// Inclusive degree bounds and the grid points inside them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeRange {
    pub lo: u64,
    pub hi: u64,
    pub grid_points: Vec<u64>,
    /// Grid indices of `grid_points`.
    #[serde(skip)]
    pub indices: std::ops::Range<usize>,
}

impl DegreeRange {
    pub fn new(lo: u64, hi: u64, grid: &LogGrid) -> Result<Self> {
        if lo < 1 || lo >= hi {
            return Err(Error::param(format!("degree range needs 1 ≤ lo < hi, got [{lo}, {hi}]")));
        }
        let start = grid.count_below(lo);
        let end = grid.count_below(hi + 1);
        if start >= end {
            return Err(Error::param(format!("no grid points inside [{lo}, {hi}]")));
        }
        Ok(DegreeRange { lo, hi, grid_points: grid.points()[start..end].to_vec(), indices: start..end })
    }

    /// `[10^lo_exp, 10^(lo_exp + length)]` rounded inwards to integers.
    pub fn from_log10(lo_exp: f64, length: f64, grid: &LogGrid) -> Result<Self> {
        let lo = 10f64.powf(lo_exp).ceil() as u64;
        let hi = 10f64.powf(lo_exp + length).floor() as u64;
        DegreeRange::new(lo.max(1), hi, grid)
    }
}

/// Grid pairs `(d1, d2)` of a degree range with `d1 / d2 > ratio_cutoff`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDomain {
    pub ratio_cutoff: f64,
    /// `(d1, d2)` with `d1 > d2`.
    pub pairs: Vec<(u64, u64)>,
    /// Grid indices of `pairs`.
    #[serde(skip)]
    pub indices: Vec<(usize, usize)>,
}

impl PairDomain {
    pub fn new(range: &DegreeRange, ratio_cutoff: f64) -> Result<Self> {
        if !(ratio_cutoff.is_finite() && ratio_cutoff >= 1.0) {
            return Err(Error::param(format!("ratio cutoff must be at least 1, got {ratio_cutoff}")));
        }
        let mut pairs = Vec::new();
        let mut indices = Vec::new();
        for (i, p) in range.indices.clone().enumerate() {
            for (k, q) in range.indices.clone().enumerate().take(i) {
                let (d1, d2) = (range.grid_points[i], range.grid_points[k]);
                if d1 as f64 / d2 as f64 > ratio_cutoff {
                    pairs.push((d1, d2));
                    indices.push((p, q));
                }
            }
        }
        if pairs.is_empty() {
            return Err(Error::param(format!(
                "no pairs in [{}, {}] with ratio above {ratio_cutoff}",
                range.lo, range.hi
            )));
        }
        Ok(PairDomain { ratio_cutoff, pairs, indices })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub solver: GaussNewtonOptions,
    /// Overrides the regression-based starting value of `a`.
    pub initial_a: Option<f64>,
    /// Steps leaving `|a| ≤ max_abs_a` are rejected; a fit that keeps
    /// pressing against the bound is reported as diverged.
    pub max_abs_a: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { solver: GaussNewtonOptions::default(), initial_a: None, max_abs_a: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    /// Mean squared difference between model and data on the raw scale.
    pub sigma2: f64,
    /// Mean squared difference of square roots (the minimised objective).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub points: usize,
    #[serde(skip)]
    pub trace: Vec<f64>,
}

/// One term of a square-root fit: the data value and the feature that
/// multiplies `a` in `ln(model) = ln b + offset + a·slope_feature`.
#[derive(Debug, Clone, Copy)]
struct Term {
    sqrt_value: f64,
    value: f64,
    offset: f64,
    feature: f64,
}

struct SqrtPowerModel {
    terms: Vec<Term>,
    max_abs_a: f64,
}

impl SqrtPowerModel {
    fn sqrt_model(&self, t: &Term, theta: &DVector<f64>) -> f64 {
        (0.5 * (theta[1] + t.offset + theta[0] * t.feature)).exp()
    }

    fn sigma2(&self, theta: &DVector<f64>) -> f64 {
        let sum: f64 = self
            .terms
            .iter()
            .map(|t| {
                let m = self.sqrt_model(t, theta);
                (m * m - t.value).powi(2)
            })
            .sum();
        sum / self.terms.len() as f64
    }

    /// `ln b` minimising the objective at fixed `a`.
    fn best_log_b(&self, a: f64) -> Option<f64> {
        let theta = DVector::from_vec(vec![a, 0.0]);
        let (mut num, mut den) = (0.0, 0.0);
        for t in &self.terms {
            let h = self.sqrt_model(t, &theta);
            num += t.sqrt_value * h;
            den += h * h;
        }
        (num > 0.0 && den > 0.0).then(|| 2.0 * (num / den).ln())
    }

    fn fit(&self, initial_a: f64, opts: &FitOptions) -> Result<FitResult> {
        let log_b = self
            .best_log_b(initial_a)
            .ok_or_else(|| Error::Fit("cannot initialise scale: data are all zero".into()))?;
        let res = gauss_newton(self, DVector::from_vec(vec![initial_a, log_b]), &opts.solver);
        let theta = &res.theta;
        Ok(FitResult {
            a: theta[0],
            b: theta[1].exp(),
            sigma2: self.sigma2(theta),
            objective: res.objective,
            iterations: res.iterations,
            converged: res.converged(),
            points: self.terms.len(),
            trace: res.trace,
        })
    }
}

impl LeastSquares for SqrtPowerModel {
    fn residuals(&self, theta: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.terms.len(), self.terms.iter().map(|t| t.sqrt_value - self.sqrt_model(t, theta)))
    }

    fn jacobian(&self, theta: &DVector<f64>) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.terms.len(), 2);
        for (i, t) in self.terms.iter().enumerate() {
            let m = self.sqrt_model(t, theta);
            j[(i, 0)] = -0.5 * t.feature * m;
            j[(i, 1)] = -0.5 * m;
        }
        j
    }

    fn admissible(&self, theta: &DVector<f64>) -> bool {
        theta[0].abs() <= self.max_abs_a && theta[1].is_finite()
    }
}

fn check_values(values: impl Iterator<Item = f64>) -> Result<()> {
    for v in values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::domain(format!("fit data must be finite and non-negative, got {v}")));
        }
    }
    Ok(())
}

/// Fits `f` to `(d, #~(d))` points.
pub fn fit_degree_points(points: &[(f64, f64)], opts: &FitOptions) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::param("degree fit needs at least two points"));
    }
    check_values(points.iter().map(|p| p.1))?;
    let initial_a = match opts.initial_a {
        Some(a) => a,
        None => {
            let positive: Vec<_> = points.iter().copied().filter(|p| p.1 > 0.0).collect();
            let (slope, _) = loglog_regression(&positive)?;
            -slope - 1.0
        }
    };
    let model = SqrtPowerModel {
        terms: points
            .iter()
            .map(|&(d, v)| Term { sqrt_value: v.sqrt(), value: v, offset: -d.ln(), feature: -d.ln() })
            .collect(),
        max_abs_a: opts.max_abs_a,
    };
    model.fit(initial_a.clamp(-opts.max_abs_a, opts.max_abs_a), opts)
}

/// Fits `g` to `(d1, d2, rho~)` points.
pub fn fit_edge_points(points: &[(f64, f64, f64)], opts: &FitOptions) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::param("edge fit needs at least two points"));
    }
    check_values(points.iter().map(|p| p.2))?;
    // ln g = ln b + ln(d1+d2) + a·ln(d1 d2 / (d1+d2))
    let feature = |d1: f64, d2: f64| (d1 * d2 / (d1 + d2)).ln();
    let initial_a = match opts.initial_a {
        Some(a) => a,
        None => {
            let (x, y): (Vec<f64>, Vec<f64>) = points
                .iter()
                .filter(|p| p.2 > 0.0)
                .map(|&(d1, d2, v)| (feature(d1, d2), v.ln() - (d1 + d2).ln()))
                .unzip();
            linear_regression(&x, &y).map(|(slope, _)| slope).unwrap_or(1.0)
        }
    };
    let model = SqrtPowerModel {
        terms: points
            .iter()
            .map(|&(d1, d2, v)| Term {
                sqrt_value: v.sqrt(),
                value: v,
                offset: (d1 + d2).ln(),
                feature: feature(d1, d2),
            })
            .collect(),
        max_abs_a: opts.max_abs_a,
    };
    model.fit(initial_a.clamp(-opts.max_abs_a, opts.max_abs_a), opts)
}

/// Degree fit on a surface's `#~` over `range`.
pub fn fit_degree(surface: &RhoSurface, range: &DegreeRange, opts: &FitOptions) -> Result<FitResult> {
    let mut points = Vec::with_capacity(range.grid_points.len());
    for (p, &d) in range.indices.clone().zip(&range.grid_points) {
        let v = surface.cum_deg(p);
        if v == 0 {
            return Err(Error::domain(format!("cumulative degree count vanishes at d = {d}")));
        }
        points.push((d as f64, v as f64));
    }
    fit_degree_points(&points, opts)
}

/// Edge fit on a surface's `rho~` over `domain`.
pub fn fit_edges(surface: &RhoSurface, domain: &PairDomain, opts: &FitOptions) -> Result<FitResult> {
    let mut points = Vec::with_capacity(domain.len());
    for (&(p, q), &(d1, d2)) in domain.indices.iter().zip(&domain.pairs) {
        let rho = surface.rho(p, q).ok_or_else(|| Error::domain(format!("rho undefined at ({d1}, {d2})")))?;
        points.push((d1 as f64, d2 as f64, rho));
    }
    fit_edge_points(&points, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::log_grid;

    #[test]
    fn model_functions() {
        assert!((eval_f(0.0, 1.0, 10.0) - 0.1).abs() < 1e-15);
        assert!((eval_f(1.0, 100.0, 10.0) - 1.0).abs() < 1e-14);
        let r = eval_f(0.37, 3.0, 34.0) / eval_f(0.37, 3.0, 17.0);
        assert!((r - 2f64.powf(-1.37)).abs() < 1e-14);
        assert!((eval_g(1.0, 2.5, 3.0, 7.0) - 2.5 * 21.0).abs() < 1e-12);
        assert!((eval_g(0.3, 1.0, 5.0, 80.0) - eval_g(0.3, 1.0, 80.0, 5.0)).abs() < 1e-12);
        // the edge surface reported for the web host graph
        let v = eval_g(0.2774, 8.331e-4, 1e4, 1e3);
        let expect = 8.331e-4 * 11_000f64.powf(0.7226) * 1e7f64.powf(0.2774);
        assert!((v / expect - 1.0).abs() < 1e-14);
    }

    #[test]
    fn regression_baselines() {
        let pts: Vec<(f64, f64)> = (1..50).map(|d| (d as f64, (d as f64).powi(-2))).collect();
        let (slope, intercept) = loglog_regression(&pts).unwrap();
        assert!((slope + 2.0).abs() < 1e-12);
        assert!(intercept.abs() < 1e-12);
        assert!(loglog_regression(&[(1.0, 0.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn cumulative_slope_is_raw_slope_plus_one() {
        // pure power law on integers: tail sums computed exactly
        let gamma = 2.5;
        let dmax = 2_000_000u64;
        let mut tail = vec![0.0; dmax as usize + 2];
        for d in (1..=dmax).rev() {
            tail[d as usize] = tail[d as usize + 1] + (d as f64).powf(-gamma);
        }
        let raw: Vec<(f64, f64)> = (100..1000).map(|d| (d as f64, (d as f64).powf(-gamma))).collect();
        let cum: Vec<(f64, f64)> = (100..1000).map(|d| (d as f64, tail[d as usize + 1])).collect();
        let (s_raw, _) = loglog_regression(&raw).unwrap();
        let (s_cum, _) = loglog_regression(&cum).unwrap();
        assert!((s_cum - s_raw - 1.0).abs() < 0.01, "{s_raw} {s_cum}");
    }

    #[test]
    fn ranges_and_domains() {
        let grid = log_grid(1.01, 100_000).unwrap();
        let r = DegreeRange::new(100, 10_000, &grid).unwrap();
        assert_eq!(*r.grid_points.first().unwrap(), 100);
        assert!(*r.grid_points.last().unwrap() <= 10_000);
        assert!(DegreeRange::new(10, 10, &grid).is_err());
        assert!(DegreeRange::new(0, 10, &grid).is_err());
        let dom = PairDomain::new(&r, 10.0).unwrap();
        assert!(dom.pairs.iter().all(|&(d1, d2)| d1 as f64 / d2 as f64 > 10.0 && d1 > d2));
        let p = dom.indices[0];
        assert_eq!(grid.points()[p.0], dom.pairs[0].0);
        let narrow = DegreeRange::new(100, 900, &grid).unwrap();
        assert!(PairDomain::new(&narrow, 10.0).is_err());
        let r = DegreeRange::from_log10(2.9, 1.0, &grid).unwrap();
        assert_eq!((r.lo, r.hi), (795, 7943));
    }

    #[test]
    fn exact_degree_data_recovered() {
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|k| {
                let d = (10f64 * 1.03f64.powi(k)).floor();
                (d, eval_f(0.3, 100.0, d))
            })
            .collect();
        let res = fit_degree_points(&pts, &FitOptions::default()).unwrap();
        assert!(res.converged);
        assert!((res.a - 0.3).abs() < 1e-6);
        assert!((res.b / 100.0 - 1.0).abs() < 1e-6);
        assert!(res.sigma2 < 1e-20);
    }

    #[test]
    fn exact_edge_data_recovered_from_far_start() {
        let mut pts = Vec::new();
        for i in 0..40 {
            for k in 0..40 {
                let (d1, d2) = ((20.0 * 1.1f64.powi(i)).floor(), (20.0 * 1.1f64.powi(k)).floor());
                if d1 / d2 > 10.0 {
                    pts.push((d1, d2, eval_g(0.3, 2e-4, d1, d2)));
                }
            }
        }
        for start in [0.05, 1.0, 3.0] {
            let opts = FitOptions { initial_a: Some(start), ..Default::default() };
            let res = fit_edge_points(&pts, &opts).unwrap();
            assert!(res.converged, "start {start}");
            assert!((res.a - 0.3).abs() < 1e-6);
            assert!((res.b / 2e-4 - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn scaling_data_leaves_a_unchanged() {
        let pts: Vec<(f64, f64)> = (10..300)
            .map(|d| {
                let d = d as f64;
                (d, eval_f(0.6, 5e4, d) * (1.0 + 0.05 * (d * 0.7).sin()))
            })
            .collect();
        let base = fit_degree_points(&pts, &FitOptions::default()).unwrap();
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(d, v)| (d, 7.5 * v)).collect();
        let res = fit_degree_points(&scaled, &FitOptions::default()).unwrap();
        assert!((res.a - base.a).abs() < 1e-8);
        assert!((res.b / base.b / 7.5 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_data() {
        assert!(fit_degree_points(&[(1.0, 1.0)], &FitOptions::default()).is_err());
        assert!(fit_degree_points(&[(1.0, -1.0), (2.0, 1.0)], &FitOptions::default()).is_err());
        assert!(fit_edge_points(&[(20.0, 1.0, 0.0), (30.0, 2.0, 0.0)], &FitOptions::default()).is_err());
    }
}
