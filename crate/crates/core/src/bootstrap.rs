//! Resampling error estimates for the two estimators.
//!
//! Vertex bootstrap: draw `n` vertices with replacement, rebuild `#~` and
//! refit `a1` on the fixed degree range. Edge bootstrap: draw `|E|` edge
//! labels `(deg u, deg v)` with replacement, rebuild `X~` and refit `a2` on
//! the fixed pair domain. Vertex degrees are taken from the original graph,
//! so `#~` is not resampled in the edge bootstrap.
//!
//! Iteration `k` draws from stream `k` of the master seed, so results do not
//! depend on the number of worker threads.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fitting::{fit_degree_points, fit_edges, DegreeRange, FitOptions, PairDomain};
use crate::rng;
use crate::stats::{DegreeHistogram, EdgeDegreeMatrix, GridAccumulator, RhoSurface};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapOptions {
    pub iterations: usize,
    pub seed: u64,
    pub fit: FitOptions,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        BootstrapOptions { iterations: 1000, seed: 0, fit: FitOptions::default() }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BootstrapReport {
    /// Estimate on the original data.
    pub original: f64,
    /// Convergent refits, ordered by iteration index.
    pub estimates: Vec<f64>,
    /// Iteration index of each entry in `estimates`.
    pub iteration_of: Vec<usize>,
    /// Requested number of iterations `B`.
    pub iterations: usize,
    pub diverged: usize,
    /// Mean of `(a_i − original)²` over the convergent refits.
    pub sigma_s2: f64,
}

impl BootstrapReport {
    pub fn sigma_s(&self) -> f64 {
        self.sigma_s2.sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.estimates.iter().sum::<f64>() / self.estimates.len() as f64
    }
}

fn run<F>(original: f64, opts: &BootstrapOptions, refit: F) -> Result<BootstrapReport>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Option<f64> + Sync,
{
    if opts.iterations == 0 {
        return Err(Error::param("bootstrap needs at least one iteration"));
    }
    let outcomes: Vec<Option<f64>> =
        (0..opts.iterations).into_par_iter().map(|k| refit(&mut rng::stream(opts.seed, k as u64))).collect();
    let mut estimates = Vec::with_capacity(outcomes.len());
    let mut iteration_of = Vec::with_capacity(outcomes.len());
    for (k, a) in outcomes.into_iter().enumerate() {
        if let Some(a) = a {
            estimates.push(a);
            iteration_of.push(k);
        }
    }
    if estimates.is_empty() {
        return Err(Error::Fit(format!("all {} bootstrap refits diverged", opts.iterations)));
    }
    let sigma_s2 = estimates.iter().map(|a| (a - original) * (a - original)).sum::<f64>() / estimates.len() as f64;
    Ok(BootstrapReport {
        original,
        diverged: opts.iterations - estimates.len(),
        iterations: opts.iterations,
        estimates,
        iteration_of,
        sigma_s2,
    })
}

/// Resamples vertices and refits `a1` on `range`.
pub fn bootstrap_vertices(
    h: &DegreeHistogram,
    range: &DegreeRange,
    opts: &BootstrapOptions,
) -> Result<BootstrapReport> {
    let thresholds = &range.grid_points;
    let points_of = |cum: &[u64]| -> Option<Vec<(f64, f64)>> {
        thresholds.iter().zip(cum).map(|(&d, &c)| (c > 0).then_some((d as f64, c as f64))).collect()
    };
    // `level[v]` = number of range thresholds strictly below deg(v), so
    // `#~(thresholds[i]) = #{v : level[v] > i}`.
    let level_of = |d: u64| thresholds.partition_point(|&t| t < d);
    let mut levels = Vec::with_capacity(h.n_vertices() as usize);
    let mut original_counts = vec![0u64; thresholds.len() + 1];
    for (d, c) in h.iter() {
        let l = level_of(d);
        original_counts[l] += c;
        levels.extend(std::iter::repeat_n(l as u32, c as usize));
    }
    if levels.is_empty() {
        return Err(Error::param("bootstrap needs at least one vertex"));
    }
    let suffix = |counts: &[u64]| -> Vec<u64> {
        let mut cum = vec![0u64; thresholds.len()];
        let mut acc = 0;
        for i in (0..thresholds.len()).rev() {
            acc += counts[i + 1];
            cum[i] = acc;
        }
        cum
    };
    let points = points_of(&suffix(&original_counts))
        .ok_or_else(|| Error::domain("cumulative degree count vanishes inside the range"))?;
    let fit = fit_degree_points(&points, &opts.fit)?;
    if !fit.converged {
        return Err(Error::Fit("degree fit on the original data did not converge".into()));
    }
    run(fit.a, opts, |rng| {
        let mut counts = vec![0u64; thresholds.len() + 1];
        for _ in 0..levels.len() {
            counts[levels[rng.random_range(0..levels.len())] as usize] += 1;
        }
        let pts = points_of(&suffix(&counts))?;
        fit_degree_points(&pts, &opts.fit).ok().filter(|f| f.converged).map(|f| f.a)
    })
}

/// Resamples edge labels and refits `a2` on `domain`, keeping `#~` of
/// `surface` fixed.
pub fn bootstrap_edges(
    x: &EdgeDegreeMatrix,
    surface: &RhoSurface,
    domain: &PairDomain,
    opts: &BootstrapOptions,
) -> Result<BootstrapReport> {
    let grid = surface.grid();
    // (bucket, weight); labels below the grid never reach any threshold.
    let labels: Vec<(Option<usize>, u64)> = x
        .edge_labels()
        .into_iter()
        .map(|(j1, j2)| (GridAccumulator::bucket_of(grid, j1, j2), if j1 == j2 { 2 } else { 1 }))
        .collect();
    if labels.is_empty() {
        return Err(Error::param("bootstrap needs at least one edge"));
    }
    let fit = fit_edges(surface, domain, &opts.fit)?;
    if !fit.converged {
        return Err(Error::Fit("edge fit on the original data did not converge".into()));
    }
    run(fit.a, opts, |rng| {
        let mut acc = GridAccumulator::new(grid);
        for _ in 0..labels.len() {
            if let (Some(b), w) = labels[rng.random_range(0..labels.len())] {
                acc.add_bucket(b, w);
            }
        }
        let resampled = surface.with_cum_edges(acc.into_cumulative());
        fit_edges(&resampled, domain, &opts.fit).ok().filter(|f| f.converged).map(|f| f.a)
    })
}
