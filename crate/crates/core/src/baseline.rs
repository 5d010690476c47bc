//! Comparison models: the configuration model on an i.i.d. power-law
//! degree sequence (GDS) and Holme–Kim preferential attachment with triad
//! formation (HK).

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::{self, ChaCha8Rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdsParams {
    pub n: u64,
    pub gamma: f64,
    /// Desired edge count; `None` keeps the natural cutoff.
    pub target_edges: Option<u64>,
    pub seed: u64,
}

impl GdsParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        if self.n > VertexId::MAX as u64 {
            return Err(Error::param(format!("n = {} exceeds 32-bit vertex ids", self.n)));
        }
        if !(self.gamma.is_finite() && self.gamma > 1.0) {
            return Err(Error::param(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// A sampled degree sequence and the truncation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSample {
    pub degrees: Vec<u64>,
    /// Largest admissible degree.
    pub d_cap: u64,
    /// Mean of the truncated law.
    pub expected_mean: f64,
    /// 1-based index of the entry incremented to make the sum even, if any.
    pub parity_fix: Option<u64>,
}

/// Prefix sums of `d^{−γ}` and `d^{1−γ}` for `d = 1..=cap`.
struct TruncatedMoments {
    mass: Vec<f64>,
    first: Vec<f64>,
}

impl TruncatedMoments {
    fn new(gamma: f64, cap: u64) -> Self {
        let mut mass = Vec::with_capacity(cap as usize + 1);
        let mut first = Vec::with_capacity(cap as usize + 1);
        mass.push(0.0);
        first.push(0.0);
        let (mut s0, mut s1) = (0.0, 0.0);
        for d in 1..=cap {
            let p = (d as f64).powf(-gamma);
            s0 += p;
            s1 += p * d as f64;
            mass.push(s0);
            first.push(s1);
        }
        TruncatedMoments { mass, first }
    }

    fn mean(&self, cap: u64) -> f64 {
        self.first[cap as usize] / self.mass[cap as usize]
    }
}

/// `n^{1/(γ−1)}`, clipped to `[1, max(n − 1, 1)]`.
pub fn natural_cutoff(n: u64, gamma: f64) -> u64 {
    let cap = (n as f64).powf(1.0 / (gamma - 1.0));
    let upper = n.saturating_sub(1).max(1) as f64;
    cap.min(upper).max(1.0).floor() as u64
}

/// Chooses the truncation point: the natural cutoff, lowered when its mean
/// overshoots `target_edges` by more than 5%.
fn choose_cap(params: &GdsParams) -> Result<(u64, f64)> {
    let natural = natural_cutoff(params.n, params.gamma);
    let moments = TruncatedMoments::new(params.gamma, natural);
    let natural_mean = moments.mean(natural);
    let Some(target) = params.target_edges else {
        return Ok((natural, natural_mean));
    };
    let desired = 2.0 * target as f64 / params.n as f64;
    let within = |mean: f64| (mean / desired - 1.0).abs() <= 0.05;
    if within(natural_mean) {
        return Ok((natural, natural_mean));
    }
    if natural_mean < desired {
        return Err(Error::param(format!(
            "target of {target} edges needs mean degree {desired:.3}, but gamma = {} with cutoff {natural} gives at most {natural_mean:.3}",
            params.gamma
        )));
    }
    // smallest cap whose mean reaches the target; the mean grows with the cap
    let (mut lo, mut hi) = (1u64, natural);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if moments.mean(mid) >= desired {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let best = [lo.saturating_sub(1).max(1), lo]
        .into_iter()
        .min_by(|&a, &b| (moments.mean(a) - desired).abs().total_cmp(&(moments.mean(b) - desired).abs()))
        .unwrap_or(lo);
    let mean = moments.mean(best);
    if !within(mean) {
        return Err(Error::param(format!(
            "no cutoff brings the mean degree within 5% of {desired:.3} (closest {mean:.3})"
        )));
    }
    Ok((best, mean))
}

/// Increments one uniformly chosen entry when the sum is odd. Returns the
/// index that was changed.
pub fn make_even_sum<R: Rng + ?Sized>(degrees: &mut [u64], rng: &mut R) -> Option<usize> {
    if degrees.is_empty() || degrees.iter().sum::<u64>() % 2 == 0 {
        return None;
    }
    let i = rng.random_range(0..degrees.len());
    degrees[i] += 1;
    Some(i)
}

/// Draws `n` i.i.d. degrees from `P(d) ∝ d^{−γ}` on `[1, d_cap]`.
pub fn sample_power_law_degrees(params: &GdsParams) -> Result<PowerLawSample> {
    params.validate()?;
    let (d_cap, expected_mean) = choose_cap(params)?;
    let mut rng = rng::stream(params.seed, 0);
    let zipf = Zipf::new(d_cap as f64, params.gamma).map_err(|e| Error::param(format!("{e:?}")))?;
    let mut degrees: Vec<u64> = (0..params.n).map(|_| zipf.sample(&mut rng) as u64).collect();
    let parity_fix = make_even_sum(&mut degrees, &mut rng).map(|i| i as u64 + 1);
    Ok(PowerLawSample { degrees, d_cap, expected_mean, parity_fix })
}

/// Uniform stub matching; loops and parallel edges are kept.
pub fn generate_configuration(degrees: &[u64], seed: u64) -> Result<Graph> {
    let total: u64 = degrees.iter().sum();
    if total % 2 == 1 {
        return Err(Error::param(format!("degree sum {total} is odd")));
    }
    if degrees.len() > VertexId::MAX as usize {
        return Err(Error::param("too many vertices for 32-bit ids"));
    }
    let mut stubs: Vec<VertexId> = Vec::with_capacity(total as usize);
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v as VertexId, d as usize));
    }
    let mut rng = rng::stream(seed, 1);
    stubs.shuffle(&mut rng);
    let edges = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Ok(Graph::from_parts_unchecked(degrees.len(), edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HkParams {
    pub n: u64,
    pub m: u32,
    /// Probability of a triad-formation step for each edge after the first.
    pub p_t: f64,
    pub seed: u64,
}

impl HkParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.p_t) {
            return Err(Error::param(format!("triad probability must lie in [0, 1], got {}", self.p_t)));
        }
        if self.n < self.m as u64 + 1 {
            return Err(Error::param(format!("n must be at least m + 1 = {}", self.m + 1)));
        }
        let edges = (self.m as u64).checked_mul(self.n);
        if self.n > VertexId::MAX as u64 || edges.is_none_or(|e| e > (i32::MAX as u64)) {
            return Err(Error::param("HK graph exceeds the 32-bit id limits"));
        }
        Ok(())
    }

    /// Vertices and edges of the complete seed graph on `m + 1` vertices.
    pub fn seed_graph_size(&self) -> (u64, u64) {
        let n0 = self.m as u64 + 1;
        (n0, n0 * (n0 - 1) / 2)
    }

    pub fn edge_count(&self) -> u64 {
        let (n0, e0) = self.seed_graph_size();
        self.m as u64 * (self.n - n0) + e0
    }
}

struct HkState {
    adjacency: Vec<Vec<VertexId>>,
    /// Every edge endpoint once; uniform draws are degree-proportional.
    endpoints: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
}

impl HkState {
    fn add_edge(&mut self, u: VertexId, v: VertexId) {
        self.adjacency[u as usize].push(v);
        self.adjacency[v as usize].push(u);
        self.endpoints.push(u);
        self.endpoints.push(v);
        self.edges.push((u, v));
    }

    fn preferential(&self, chosen: &[VertexId], rng: &mut ChaCha8Rng) -> VertexId {
        loop {
            let w = self.endpoints[rng.random_range(0..self.endpoints.len())];
            if !chosen.contains(&w) {
                return w;
            }
        }
    }

    /// Uniform neighbour of `w` not yet chosen, if one exists.
    fn triad(&self, w: VertexId, chosen: &[VertexId], rng: &mut ChaCha8Rng) -> Option<VertexId> {
        let nb = &self.adjacency[w as usize];
        for _ in 0..32 {
            let u = nb[rng.random_range(0..nb.len())];
            if !chosen.contains(&u) {
                return Some(u);
            }
        }
        let free: Vec<VertexId> = nb.iter().copied().filter(|u| !chosen.contains(u)).collect();
        (!free.is_empty()).then(|| free[rng.random_range(0..free.len())])
    }
}

/// Holme–Kim growth from a complete graph on `m + 1` vertices. Each new
/// vertex makes `m` distinct links: the first preferential, each later one a
/// triad step (to a neighbour of the last preferential target) with
/// probability `p_t`, falling back to a preferential step when no neighbour
/// is available.
pub fn generate_holme_kim(params: &HkParams) -> Result<Graph> {
    params.validate()?;
    let n = params.n as usize;
    let m = params.m as usize;
    let total_edges = params.edge_count() as usize;
    let mut rng = rng::stream(params.seed, 0);
    let mut state = HkState {
        adjacency: vec![Vec::new(); n],
        endpoints: Vec::with_capacity(2 * total_edges),
        edges: Vec::with_capacity(total_edges),
    };
    for u in 0..=m as VertexId {
        for v in (u + 1)..=m as VertexId {
            state.add_edge(u, v);
        }
    }

    let mut chosen: Vec<VertexId> = Vec::with_capacity(m);
    for v in (m + 1)..n {
        chosen.clear();
        let mut last_pa = state.preferential(&chosen, &mut rng);
        chosen.push(last_pa);
        for _ in 1..m {
            let triad = if rng.random::<f64>() < params.p_t { state.triad(last_pa, &chosen, &mut rng) } else { None };
            let target = match triad {
                Some(t) => t,
                None => {
                    last_pa = state.preferential(&chosen, &mut rng);
                    last_pa
                }
            };
            chosen.push(target);
        }
        for &t in &chosen {
            state.add_edge(v as VertexId, t);
        }
    }
    Ok(Graph::from_parts_unchecked(n, state.edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forced_configurations() {
        assert_eq!(generate_configuration(&[1, 1], 3).unwrap().edges().len(), 1);
        let e = generate_configuration(&[1, 1], 3).unwrap().into_edges()[0];
        assert!(e == (0, 1) || e == (1, 0));
        assert_eq!(generate_configuration(&[2], 0).unwrap().edges(), &[(0, 0)]);
        assert!(matches!(generate_configuration(&[1, 2], 0), Err(Error::Parameter(_))));
    }

    #[test]
    fn configuration_preserves_degrees() {
        let degrees = vec![3, 1, 4, 1, 5, 9, 2, 6, 5, 4];
        let g = generate_configuration(&degrees, 8).unwrap();
        assert_eq!(g.degrees(), degrees);
    }

    #[test]
    fn even_sequence_untouched() {
        let mut d = vec![1, 1, 1, 1];
        assert_eq!(make_even_sum(&mut d, &mut rng::from_seed(0)), None);
        assert_eq!(d, vec![1, 1, 1, 1]);
        let mut d = vec![1, 2, 2];
        let i = make_even_sum(&mut d, &mut rng::from_seed(0)).unwrap();
        assert_eq!(d.iter().sum::<u64>(), 6);
        assert_eq!(d[i], if i == 0 { 2 } else { 3 });
    }

    #[test]
    fn steep_power_law_is_mostly_ones() {
        let p = GdsParams { n: 100_000, gamma: 50.0, target_edges: None, seed: 5 };
        let s = sample_power_law_degrees(&p).unwrap();
        let ones = s.degrees.iter().filter(|&&d| d == 1).count();
        assert!(ones as f64 >= 0.999 * p.n as f64);
        assert_eq!(s.degrees.iter().sum::<u64>() % 2, 0);
    }

    #[test]
    fn cutoff_and_target() {
        assert_eq!(natural_cutoff(1_000_000, 2.0), 999_999);
        assert_eq!(natural_cutoff(10_000, 3.0), 100);
        let p = GdsParams { n: 100_000, gamma: 2.276, target_edges: Some(100_000), seed: 1 };
        let s = sample_power_law_degrees(&p).unwrap();
        assert!((s.expected_mean / 2.0 - 1.0).abs() <= 0.05);
        assert!(s.d_cap < natural_cutoff(100_000, 2.276));
        let infeasible = GdsParams { target_edges: Some(10_000_000), ..p };
        assert!(matches!(sample_power_law_degrees(&infeasible), Err(Error::Parameter(_))));
        let bad = GdsParams { gamma: 1.0, ..p };
        assert!(sample_power_law_degrees(&bad).is_err());
    }

    #[test]
    fn hk_sizes() {
        let p = HkParams { n: 14, m: 12, p_t: 0.5, seed: 2 };
        let g = generate_holme_kim(&p).unwrap();
        assert_eq!(g.edge_count() as u64, 12 + 78);
        let p = HkParams { n: 2_000, m: 3, p_t: 0.5, seed: 2 };
        let g = generate_holme_kim(&p).unwrap();
        assert_eq!(g.edge_count() as u64, p.edge_count());
        let r = g.count_multiplicities();
        assert_eq!((r.loops, r.multi_edges), (0, 0));
        assert_eq!(generate_holme_kim(&p).unwrap(), g);
    }

    #[test]
    fn hk_seed_graph_only() {
        let p = HkParams { n: 4, m: 3, p_t: 0.5, seed: 0 };
        let g = generate_holme_kim(&p).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(generate_holme_kim(&HkParams { n: 3, ..p }).is_err());
        assert!(generate_holme_kim(&HkParams { p_t: 1.5, ..p }).is_err());
    }
}
