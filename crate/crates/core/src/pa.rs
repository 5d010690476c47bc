//! Buckley–Osthus preferential attachment.
//!
//! The chain `H(a,1,t)` starts from a single vertex with a loop. At step `t`
//! a new vertex attaches one edge to an existing vertex `s` with probability
//! `(deg(s) + a − 1) / ((a+1)t − 1)` or to itself with probability
//! `a / ((a+1)t − 1)`. `H(a,m,n)` merges consecutive blocks of `m` chain
//! vertices of `H(a,1,mn)`.
//!
//! Sampling splits the attachment mass `(a+1)t − 1` into a uniform urn
//! (mass `a` on each of the `t` vertices, the new one included) and an
//! excess urn holding vertex `s` exactly `deg(s) − 1` times (mass `t − 1`).
//! Each step appends the chosen target to the excess urn, so both urns are
//! maintained in O(1) per step for any real `a > 0`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::rng::{self, ChaCha8Rng};

/// Largest number of chain vertices (`m·n`) accepted.
pub const MAX_CHAIN_LEN: u64 = i32::MAX as u64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoParams {
    pub a: f64,
    pub m: u32,
    pub n: u64,
    pub seed: u64,
}

impl BoParams {
    pub fn new(a: f64, m: u32, n: u64, seed: u64) -> Result<Self> {
        let p = BoParams { a, m, n, seed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_attractiveness(self.a)?;
        if self.m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::param("n must be at least 1"));
        }
        match (self.m as u64).checked_mul(self.n) {
            Some(len) if len <= MAX_CHAIN_LEN => Ok(()),
            _ => Err(Error::param(format!(
                "m·n = {}·{} exceeds the 32-bit vertex-id limit {MAX_CHAIN_LEN}",
                self.m, self.n
            ))),
        }
    }
}

fn check_attractiveness(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("initial attractiveness must be positive, got {a}")))
    }
}

/// State of the single-edge chain after some number of completed steps.
#[derive(Debug, Clone, Default)]
pub struct AttachmentState {
    degrees: Vec<u32>,
    excess: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
}

impl AttachmentState {
    pub fn new() -> Self {
        Self::default()
    }

    fn with_capacity(steps: usize) -> Self {
        AttachmentState {
            degrees: Vec::with_capacity(steps),
            excess: Vec::with_capacity(steps),
            edges: Vec::with_capacity(steps),
        }
    }

    /// Completed steps; equals the vertex and edge count of the chain graph.
    pub fn t(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Multiset holding each vertex `deg − 1` times.
    pub fn excess_list(&self) -> &[VertexId] {
        &self.excess
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Exact attachment probabilities for the next step over vertices
    /// `0..=t`, the last entry being the new vertex itself.
    pub fn attachment_distribution(&self, a: f64) -> Result<Vec<f64>> {
        check_attractiveness(a)?;
        let next = (self.t() + 1) as f64;
        let total = (a + 1.0) * next - 1.0;
        let mut p: Vec<f64> = self.degrees.iter().map(|&d| (d as f64 + a - 1.0) / total).collect();
        p.push(a / total);
        Ok(p)
    }

    /// Runs one chain step and returns the chosen target.
    pub fn step<R: Rng + ?Sized>(&mut self, a: f64, rng: &mut R) -> VertexId {
        let new = self.degrees.len() as VertexId;
        let t = self.degrees.len() + 1;
        let uniform_mass = a * t as f64;
        let total = uniform_mass + (t - 1) as f64;
        let target = if rng.random::<f64>() * total < uniform_mass || self.excess.is_empty() {
            rng.random_range(0..t) as VertexId
        } else {
            self.excess[rng.random_range(0..self.excess.len())]
        };
        self.degrees.push(1);
        self.degrees[target as usize] += 1;
        self.excess.push(target);
        self.edges.push((new, target));
        target
    }

    pub fn into_graph(self) -> Graph {
        let n = self.degrees.len();
        Graph::from_parts_unchecked(n, self.edges)
    }
}

/// Samples the chain `H(a,1,n)`: `n` vertices and `n` edges, edge `t`
/// joining vertex `t` to its chosen target.
pub fn generate_bo_chain(a: f64, n: u64, seed: u64) -> Result<Graph> {
    let mut rng = rng::from_seed(seed);
    generate_bo_chain_with(a, n, &mut rng)
}

pub fn generate_bo_chain_with<R: Rng + ?Sized>(a: f64, n: u64, rng: &mut R) -> Result<Graph> {
    check_attractiveness(a)?;
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if n > MAX_CHAIN_LEN {
        return Err(Error::param(format!("chain length {n} exceeds {MAX_CHAIN_LEN}")));
    }
    let mut state = AttachmentState::with_capacity(n as usize);
    for _ in 0..n {
        state.step(a, rng);
    }
    Ok(state.into_graph())
}

/// Maps vertex `v` to block `v / m`, keeping edges in order.
pub fn merge_blocks(g: &Graph, m: u32) -> Result<Graph> {
    if m == 0 {
        return Err(Error::param("block size must be at least 1"));
    }
    if !g.n().is_multiple_of(m as usize) {
        return Err(Error::param(format!("vertex count {} not divisible by m = {m}", g.n())));
    }
    let edges = g.edges().iter().map(|&(u, v)| (u / m, v / m)).collect();
    Ok(Graph::from_parts_unchecked(g.n() / m as usize, edges))
}

/// Samples `H(a,m,n)` with `n` vertices and `m·n` edges.
pub fn generate_bo(params: &BoParams) -> Result<Graph> {
    generate_bo_stream(params, 0)
}

fn generate_bo_stream(params: &BoParams, index: u64) -> Result<Graph> {
    params.validate()?;
    let mut rng: ChaCha8Rng = rng::stream(params.seed, index);
    let chain = generate_bo_chain_with(params.a, params.m as u64 * params.n, &mut rng)?;
    if params.m == 1 {
        return Ok(chain);
    }
    merge_blocks(&chain, params.m)
}

/// Sample `k` of the batch uses stream `k` of `params.seed`; sample 0 equals
/// [`generate_bo`].
pub fn generate_bo_batch(params: &BoParams, samples: usize) -> Result<Vec<Graph>> {
    params.validate()?;
    (0..samples as u64).into_par_iter().map(|k| generate_bo_stream(params, k)).collect()
}

/// Runs `f` on each sample of a batch without keeping the graphs around.
pub fn map_bo_samples<T, F>(params: &BoParams, samples: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Graph) -> T + Sync,
{
    params.validate()?;
    (0..samples as u64).into_par_iter().map(|k| generate_bo_stream(params, k).map(&f)).collect()
}
