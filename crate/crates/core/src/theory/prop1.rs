//! Monte-Carlo scaling of loop and multi-edge counts in `H(a,m,n)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitting::linear_regression;
use crate::pa::{map_bo_samples, BoParams};

#[derive(Debug, Clone, Serialize)]
pub struct Prop1Row {
    pub n: u64,
    pub samples: usize,
    pub mean_loops: f64,
    pub mean_multi_edges: f64,
    /// `mean_loops / (m n)`
    pub loop_fraction: f64,
    /// `mean_multi_edges / (m n)`
    pub multi_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop1Report {
    pub a: f64,
    pub m: u32,
    pub rows: Vec<Prop1Row>,
    /// Slope of `log10(mean multi-edges)` against `log10 n`.
    pub multi_edge_slope: f64,
    /// Slope of mean loop count against `ln n`.
    pub loop_slope: f64,
}

impl Prop1Report {
    pub fn fractions_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].loop_fraction < w[0].loop_fraction && w[1].multi_fraction < w[0].multi_fraction)
    }
}

/// Generates `samples` graphs for every `n` (sample `k` of size `n` uses
/// stream `k` of `seed ^ n`) and regresses the mean counts.
pub fn prop1_scaling_check(a: f64, m: u32, ns: &[u64], samples: usize, seed: u64) -> Result<Prop1Report> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param(format!("a must lie in (0, 1), got {a}")));
    }
    if ns.len() < 2 || ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("need at least two strictly increasing sizes"));
    }
    if samples == 0 {
        return Err(Error::param("need at least one sample per size"));
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let params = BoParams::new(a, m, n, seed ^ n)?;
        let counts = map_bo_samples(&params, samples, |g| {
            let r = g.count_multiplicities();
            (r.loops, r.multi_edges)
        })?;
        let k = samples as f64;
        let mean_loops = counts.iter().map(|c| c.0 as f64).sum::<f64>() / k;
        let mean_multi = counts.iter().map(|c| c.1 as f64).sum::<f64>() / k;
        let edges = m as f64 * n as f64;
        rows.push(Prop1Row {
            n,
            samples,
            mean_loops,
            mean_multi_edges: mean_multi,
            loop_fraction: mean_loops / edges,
            multi_fraction: mean_multi / edges,
        });
    }
    let log_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).log10()).collect();
    let log_multi: Vec<f64> = rows.iter().map(|r| r.mean_multi_edges.max(f64::MIN_POSITIVE).log10()).collect();
    let ln_n: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let loops: Vec<f64> = rows.iter().map(|r| r.mean_loops).collect();
    let (multi_edge_slope, _) = linear_regression(&log_n, &log_multi)?;
    let (loop_slope, _) = linear_regression(&ln_n, &loops)?;
    Ok(Prop1Report { a, m, rows, multi_edge_slope, loop_slope })
}
