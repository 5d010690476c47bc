//! Choice of the degree window `[10^x, 10^(x+L)]` on which both estimators
//! run: every window of log-length `L` on a `step` lattice is fitted with
//! both models and the one with the smallest product of the two optimised
//! objectives wins. If no window of length `L` admits two convergent fits,
//! the length is shrunk by `shrink_step` until one does.
//!
//! A window is admissible when it starts at or above
//! `max(min_degree, mean_degree_factor · mean degree)` and at least
//! `min_tail` vertices have degree above its upper end.

use rayon::prelude::*;
use serde::Serialize;

use super::{fit_degree, fit_edges, DegreeRange, FitOptions, FitResult, PairDomain};
use crate::error::{Error, Result};
use crate::stats::RhoSurface;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSelectionOptions {
    /// Window length in decades.
    pub window: f64,
    /// Spacing of window start exponents, in decades.
    pub step: f64,
    /// Windows are never shrunk below this length.
    pub min_window: f64,
    pub shrink_step: f64,
    pub ratio_cutoff: f64,
    /// Windows starting below this degree are skipped.
    pub min_degree: u64,
    /// Windows starting below this multiple of the mean degree are skipped.
    pub mean_degree_factor: f64,
    /// Windows must end at a degree exceeded by at least this many vertices.
    pub min_tail: u64,
    pub min_degree_points: usize,
    pub min_pairs: usize,
    pub fit: FitOptions,
}

impl Default for RangeSelectionOptions {
    fn default() -> Self {
        RangeSelectionOptions {
            window: 3.0,
            step: 0.1,
            min_window: 1.0,
            shrink_step: 0.1,
            ratio_cutoff: 10.0,
            min_degree: 1,
            mean_degree_factor: 4.0,
            min_tail: 100,
            min_degree_points: 5,
            min_pairs: 5,
            fit: FitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowScore {
    pub lo_exp: f64,
    pub lo: u64,
    pub hi: u64,
    pub degree_objective: Option<f64>,
    pub edge_objective: Option<f64>,
    pub product: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeChoice {
    pub window: f64,
    pub lo_exp: f64,
    pub range: DegreeRange,
    pub domain: PairDomain,
    pub degree_fit: FitResult,
    pub edge_fit: FitResult,
    pub product: f64,
    pub scores: Vec<WindowScore>,
}

struct Candidate {
    lo_exp: f64,
    range: DegreeRange,
    domain: Option<PairDomain>,
    degree_fit: Option<FitResult>,
    edge_fit: Option<FitResult>,
}

impl Candidate {
    fn both(&self) -> Option<(&FitResult, &FitResult)> {
        match (&self.degree_fit, &self.edge_fit) {
            (Some(d), Some(e)) if d.converged && e.converged => Some((d, e)),
            _ => None,
        }
    }

    fn degree(&self) -> Option<&FitResult> {
        self.degree_fit.as_ref().filter(|d| d.converged)
    }
}

fn evaluate(surface: &RhoSurface, lo_exp: f64, window: f64, opts: &RangeSelectionOptions) -> Option<Candidate> {
    let range = DegreeRange::from_log10(lo_exp, window, surface.grid()).ok()?;
    if range.grid_points.len() < opts.min_degree_points || range.lo < floor_degree(surface, opts) {
        return None;
    }
    if range.indices.is_empty() || surface.cum_deg(range.indices.end - 1) < opts.min_tail {
        return None;
    }
    let domain = PairDomain::new(&range, opts.ratio_cutoff).ok().filter(|d| d.len() >= opts.min_pairs);
    let degree_fit = fit_degree(surface, &range, &opts.fit).ok();
    let edge_fit = domain.as_ref().and_then(|d| fit_edges(surface, d, &opts.fit).ok());
    Some(Candidate { lo_exp, range, domain, degree_fit, edge_fit })
}

/// Smallest admissible window start.
pub fn floor_degree(surface: &RhoSurface, opts: &RangeSelectionOptions) -> u64 {
    opts.min_degree.max((opts.mean_degree_factor * surface.mean_degree()).ceil() as u64).max(1)
}

/// Largest grid degree exceeded by at least `min_tail` vertices.
fn top_degree(surface: &RhoSurface, min_tail: u64) -> Option<u64> {
    let grid = surface.grid().points();
    (0..grid.len()).rev().find(|&p| surface.cum_deg(p) >= min_tail.max(1)).map(|p| grid[p])
}

/// All admissible windows of each length from `opts.window` down to
/// `opts.min_window`, longest first, stopping at the first length for which
/// `accept` holds on some window.
fn scan<F>(surface: &RhoSurface, opts: &RangeSelectionOptions, accept: F) -> Result<(f64, Vec<Candidate>)>
where
    F: Fn(&Candidate) -> bool,
{
    if !(opts.window > 0.0 && opts.step > 0.0 && opts.shrink_step > 0.0) {
        return Err(Error::param("window, step and shrink step must be positive"));
    }
    let top = top_degree(surface, opts.min_tail)
        .ok_or_else(|| Error::Fit(format!("fewer than {} vertices of positive degree", opts.min_tail.max(1))))?;
    let top_exp = (top as f64).log10();
    let bottom_exp = (floor_degree(surface, opts) as f64).log10();

    let mut window = opts.window;
    while window >= opts.min_window - 1e-9 {
        let starts: Vec<f64> =
            (0..).map(|k| bottom_exp + k as f64 * opts.step).take_while(|&x| x + window <= top_exp + 1e-12).collect();
        let candidates: Vec<Candidate> =
            starts.par_iter().filter_map(|&x| evaluate(surface, x, window, opts)).collect();
        if candidates.iter().any(&accept) {
            return Ok((window, candidates));
        }
        window = ((window - opts.shrink_step) * 1e9).round() / 1e9;
    }
    Err(Error::Fit(format!(
        "no admissible window of length ≥ {} decade(s) between degrees {} and {}",
        opts.min_window,
        floor_degree(surface, opts),
        top
    )))
}

fn scores(candidates: &[Candidate]) -> Vec<WindowScore> {
    candidates
        .iter()
        .map(|c| {
            let dobj = c.degree().map(|d| d.objective);
            let eobj = c.edge_fit.as_ref().filter(|e| e.converged).map(|e| e.objective);
            WindowScore {
                lo_exp: c.lo_exp,
                lo: c.range.lo,
                hi: c.range.hi,
                degree_objective: dobj,
                edge_objective: eobj,
                product: dobj.zip(eobj).map(|(a, b)| a * b),
            }
        })
        .collect()
}

pub fn select_range(surface: &RhoSurface, opts: &RangeSelectionOptions) -> Result<RangeChoice> {
    let (window, candidates) = scan(surface, opts, |c| c.both().is_some()).map_err(|_| {
        Error::Fit(format!("no window of length ≥ {} admits convergent degree and edge fits", opts.min_window))
    })?;
    let scores = scores(&candidates);
    let (c, product) = candidates
        .into_iter()
        .zip(&scores)
        .filter_map(|(c, s)| s.product.map(|p| (c, p)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("scan returns a length with a scored window");
    Ok(RangeChoice {
        window,
        lo_exp: c.lo_exp,
        range: c.range,
        domain: c.domain.expect("scored windows have a pair domain"),
        degree_fit: c.degree_fit.expect("scored windows carry a degree fit"),
        edge_fit: c.edge_fit.expect("scored windows carry an edge fit"),
        product,
        scores,
    })
}

/// Window chosen from the degree fit alone, for data on which no window
/// admits a convergent edge fit.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeRangeChoice {
    pub window: f64,
    pub lo_exp: f64,
    pub range: DegreeRange,
    pub degree_fit: FitResult,
    /// Edge fit on the same window, when a pair domain exists; it may be
    /// non-convergent.
    pub edge_fit: Option<FitResult>,
    /// Number of scanned windows on which an edge fit was attempted.
    pub edge_attempts: usize,
    pub scores: Vec<WindowScore>,
}

/// Longest admissible windows with a convergent degree fit; the one with the
/// smallest degree objective wins.
pub fn select_degree_range(surface: &RhoSurface, opts: &RangeSelectionOptions) -> Result<DegreeRangeChoice> {
    let (window, candidates) = scan(surface, opts, |c| c.degree().is_some())?;
    let scores = scores(&candidates);
    let edge_attempts = candidates.iter().filter(|c| c.domain.is_some()).count();
    let c = candidates
        .into_iter()
        .filter(|c| c.degree().is_some())
        .min_by(|a, b| a.degree_fit.as_ref().unwrap().objective.total_cmp(&b.degree_fit.as_ref().unwrap().objective))
        .expect("scan returns a length with a convergent degree fit");
    Ok(DegreeRangeChoice {
        window,
        lo_exp: c.lo_exp,
        range: c.range,
        degree_fit: c.degree_fit.expect("filtered on a degree fit"),
        edge_fit: c.edge_fit,
        edge_attempts,
        scores,
    })
}
