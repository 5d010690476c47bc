//! Multigraph edge lists and their simplification.

mod io;

pub use io::{load_binary, load_edge_list, load_graph_file, save_binary, save_edge_list, BINARY_MAGIC};

use crate::error::{Error, Result};

/// Vertex identifier. Ids are 0-based and 32 bits wide.
pub type VertexId = u32;

/// Undirected multigraph stored as an edge list; loops and parallel edges
/// are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(VertexId, VertexId)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u as usize >= n || v as usize >= n) {
            return Err(Error::Validation(format!("edge ({u}, {v}) has an endpoint outside 0..{n}")));
        }
        Ok(Graph { n, edges })
    }

    /// Caller guarantees every endpoint is below `n`.
    pub(crate) fn from_parts_unchecked(n: usize, edges: Vec<(VertexId, VertexId)>) -> Self {
        debug_assert!(edges.iter().all(|&(u, v)| (u as usize) < n && (v as usize) < n));
        Graph { n, edges }
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn into_edges(self) -> Vec<(VertexId, VertexId)> {
        self.edges
    }

    /// Multigraph degrees: a loop adds 2 to its vertex.
    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg
    }

    pub fn simplify(&self) -> SimpleGraph {
        SimpleGraph::from_pairs(self.n, sorted_pair_keys(&self.edges))
    }

    pub fn count_multiplicities(&self) -> MultiplicityReport {
        let loops = self.edges.iter().filter(|&&(u, v)| u == v).count() as u64;
        let mut keys = sorted_pair_keys(&self.edges);
        let non_loop = keys.len() as u64;
        keys.dedup();
        MultiplicityReport { loops, multi_edges: non_loop - keys.len() as u64, total_edges: self.edges.len() as u64 }
    }
}

/// Loop and parallel-edge accounting of a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MultiplicityReport {
    pub loops: u64,
    /// Excess parallel edges: Σ over unordered non-loop pairs of (occurrences − 1).
    pub multi_edges: u64,
    pub total_edges: u64,
}

impl MultiplicityReport {
    pub fn simple_edges(&self) -> u64 {
        self.total_edges - self.loops - self.multi_edges
    }
}

fn pair_key(u: VertexId, v: VertexId) -> u64 {
    let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
    ((lo as u64) << 32) | hi as u64
}

/// Sorted (not deduplicated) keys of the non-loop edges, normalised so the
/// smaller endpoint sits in the high half.
fn sorted_pair_keys(edges: &[(VertexId, VertexId)]) -> Vec<u64> {
    let mut keys: Vec<u64> = edges.iter().filter(|&&(u, v)| u != v).map(|&(u, v)| pair_key(u, v)).collect();
    keys.sort_unstable();
    keys
}

/// Undirected simple graph in compressed adjacency form. Neighbour lists are
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
}

impl SimpleGraph {
    /// `keys` must be sorted; duplicates are merged here.
    fn from_pairs(n: usize, mut keys: Vec<u64>) -> Self {
        keys.dedup();
        let mut offsets = vec![0usize; n + 1];
        for &k in &keys {
            offsets[(k >> 32) as usize + 1] += 1;
            offsets[(k & 0xffff_ffff) as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0; offsets[n]];
        for &k in &keys {
            let (u, v) = ((k >> 32) as usize, (k & 0xffff_ffff) as usize);
            neighbors[cursor[u]] = v as VertexId;
            cursor[u] += 1;
            neighbors[cursor[v]] = u as VertexId;
            cursor[v] += 1;
        }
        SimpleGraph { offsets, neighbors }
    }

    /// Builds a simple graph from arbitrary (possibly repeated, looped) pairs.
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        Ok(Graph::new(n, edges.to_vec())?.simplify())
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<u64> {
        self.offsets.windows(2).map(|w| (w[1] - w[0]) as u64).collect()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        (0..self.n() as VertexId)
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_parts_unchecked(self.n(), self.edges().collect())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn simplify_merges_and_drops_loops() {
        let g = Graph::new(3, vec![(0, 0), (0, 1), (1, 0), (1, 2)]).unwrap();
        let s = g.simplify();
        assert_eq!(s.neighbors(0), &[1]);
        assert_eq!(s.neighbors(1), &[0, 2]);
        assert_eq!(s.neighbors(2), &[1]);
        assert_eq!(s.edge_count(), 2);
    }

    #[test]
    fn simplify_empty() {
        let s = Graph::empty(2).simplify();
        assert_eq!(s.n(), 2);
        assert_eq!(s.degrees(), vec![0, 0]);
        assert_eq!(s.edge_count(), 0);
    }

    #[test]
    fn multiplicity_hand_counts() {
        let g = Graph::new(3, vec![(0, 0), (0, 1), (1, 0), (1, 2)]).unwrap();
        assert_eq!(g.count_multiplicities(), MultiplicityReport { loops: 1, multi_edges: 1, total_edges: 4 });
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(g.count_multiplicities(), MultiplicityReport { loops: 0, multi_edges: 0, total_edges: 1 });
    }

    #[test]
    fn rejects_out_of_range_endpoint() {
        assert!(matches!(Graph::new(2, vec![(0, 2)]), Err(Error::Validation(_))));
    }

    #[test]
    fn loop_counts_twice_in_multigraph_degree() {
        let g = Graph::new(2, vec![(0, 0), (1, 0)]).unwrap();
        assert_eq!(g.degrees(), vec![3, 1]);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (1usize..30).prop_flat_map(|n| {
            prop::collection::vec((0..n as u32, 0..n as u32), 0..80)
                .prop_map(move |edges| Graph::new(n, edges).unwrap())
        })
    }

    proptest! {
        #[test]
        fn simplification_invariants(g in arb_graph()) {
            let s = g.simplify();
            let report = g.count_multiplicities();
            prop_assert_eq!(s.edge_count() as u64, report.simple_edges());
            prop_assert_eq!(s.degrees().iter().sum::<u64>(), 2 * s.edge_count() as u64);
            for v in 0..s.n() as u32 {
                let nb = s.neighbors(v);
                prop_assert!(!nb.contains(&v));
                prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
                for &u in nb {
                    prop_assert!(s.neighbors(u).binary_search(&v).is_ok());
                    prop_assert!(g.edges().iter().any(|&e| e == (u, v) || e == (v, u)));
                }
            }
            // idempotence
            prop_assert_eq!(s.to_graph().simplify(), s);
        }
    }
}
