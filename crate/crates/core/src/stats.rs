//! Empirical degree and edge-degree distributions.
//!
//! `X(d1,d2)` is stored symmetrically and every edge is counted once in each
//! orientation, so an edge joining two degree-`d` vertices adds 2 to
//! `X(d,d)`. The cumulative functions are strict tail sums:
//!
//! ```text
//! #~(d)      = Σ_{j > d} #(j)
//! X~(d1,d2)  = Σ_{j1 ≥ j2, j1 > max(d1,d2), j2 > min(d1,d2)} X(j1,j2)
//! rho~(d1,d2) = X~(d1,d2) / (#~(d1) #~(d2))
//! ```

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::graph::{Graph, SimpleGraph};

/// `#(d)` including the `d = 0` bucket of isolated vertices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    counts: BTreeMap<u64, u64>,
    n_vertices: u64,
}

impl DegreeHistogram {
    pub fn from_degrees(degrees: &[u64]) -> Self {
        let mut counts = BTreeMap::new();
        for &d in degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        DegreeHistogram { counts, n_vertices: degrees.len() as u64 }
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut h = DegreeHistogram::default();
        for (d, c) in counts {
            if c > 0 {
                *h.counts.entry(d).or_insert(0) += c;
                h.n_vertices += c;
            }
        }
        h
    }

    pub fn count(&self, d: u64) -> u64 {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    pub fn n_vertices(&self) -> u64 {
        self.n_vertices
    }

    /// Non-zero `(d, #(d))` pairs in increasing `d`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&d, &c)| (d, c))
    }

    pub fn max_degree(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    /// Σ d·#(d); twice the edge count for a simple graph.
    pub fn degree_sum(&self) -> u64 {
        self.iter().map(|(d, c)| d * c).sum()
    }
}

pub fn degree_histogram(g: &SimpleGraph) -> DegreeHistogram {
    DegreeHistogram::from_degrees(&g.degrees())
}

/// Strict upper tail sums of a degree histogram, queryable at any `d`.
#[derive(Debug, Clone)]
pub struct CumulativeDegree {
    degrees: Vec<u64>,
    /// `tail[i] = Σ_{k ≥ i} count(degrees[k])`
    tail: Vec<u64>,
}

impl CumulativeDegree {
    /// `#~(d) = Σ_{j > d} #(j)`.
    pub fn at(&self, d: u64) -> u64 {
        let idx = self.degrees.partition_point(|&x| x <= d);
        self.tail.get(idx).copied().unwrap_or(0)
    }
}

pub fn cumulative_degree(h: &DegreeHistogram) -> CumulativeDegree {
    let degrees: Vec<u64> = h.counts.keys().copied().collect();
    let mut tail = vec![0u64; degrees.len()];
    let mut acc = 0;
    for (i, (_, &c)) in h.counts.iter().enumerate().rev() {
        acc += c;
        tail[i] = acc;
    }
    CumulativeDegree { degrees, tail }
}

/// Sparse symmetric `X(d1,d2)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeDegreeMatrix {
    /// Every non-zero cell in both orientations, sorted by `(d1, d2)`.
    cells: Vec<((u64, u64), u64)>,
}

impl EdgeDegreeMatrix {
    /// Builds `X` from one `(deg u, deg v)` label per undirected edge.
    pub fn from_edge_labels(labels: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut map: HashMap<(u64, u64), u64> = HashMap::new();
        for (d1, d2) in labels {
            *map.entry((d1, d2)).or_insert(0) += 1;
            *map.entry((d2, d1)).or_insert(0) += 1;
        }
        let mut cells: Vec<_> = map.into_iter().collect();
        cells.sort_unstable();
        EdgeDegreeMatrix { cells }
    }

    /// Builds `X` from explicit cells. Cells may be listed in one or both
    /// orientations; a mirrored pair must agree.
    pub fn from_cells(cells: impl IntoIterator<Item = ((u64, u64), u64)>) -> Result<Self> {
        let mut map: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for ((d1, d2), x) in cells {
            if x == 0 {
                continue;
            }
            for key in [(d1, d2), (d2, d1)] {
                match map.get(&key) {
                    Some(&old) if old != x => {
                        return Err(Error::Validation(format!("conflicting values {old} and {x} for X{key:?}")))
                    }
                    _ => {
                        map.insert(key, x);
                    }
                }
            }
        }
        for (&(d1, d2), &x) in &map {
            if d1 == d2 && x % 2 == 1 {
                return Err(Error::Validation(format!("diagonal X({d1},{d1}) = {x} must be even")));
            }
        }
        Ok(EdgeDegreeMatrix { cells: map.into_iter().collect() })
    }

    pub fn get(&self, d1: u64, d2: u64) -> u64 {
        self.cells.binary_search_by_key(&(d1, d2), |&(k, _)| k).map(|i| self.cells[i].1).unwrap_or(0)
    }

    /// All non-zero cells, both orientations, sorted.
    pub fn cells(&self) -> &[((u64, u64), u64)] {
        &self.cells
    }

    /// Cells with `d1 ≥ d2`.
    pub fn lower_cells(&self) -> impl Iterator<Item = ((u64, u64), u64)> + '_ {
        self.cells.iter().copied().filter(|&((d1, d2), _)| d1 >= d2)
    }

    /// Σ_{d2} X(d, d2) as a map over `d`.
    pub fn marginals(&self) -> BTreeMap<u64, u64> {
        let mut m = BTreeMap::new();
        for &((d1, _), x) in &self.cells {
            *m.entry(d1).or_insert(0) += x;
        }
        m
    }

    /// Number of undirected edges represented.
    pub fn edge_count(&self) -> u64 {
        self.lower_cells().map(|((d1, d2), x)| if d1 == d2 { x / 2 } else { x }).sum()
    }

    /// The multiset of edge labels `(j1, j2)`, `j1 ≥ j2`, one per edge, in
    /// cell order.
    pub fn edge_labels(&self) -> Vec<(u64, u64)> {
        let mut labels = Vec::with_capacity(self.edge_count() as usize);
        for ((d1, d2), x) in self.lower_cells() {
            let copies = if d1 == d2 { x / 2 } else { x };
            labels.extend(std::iter::repeat_n((d1, d2), copies as usize));
        }
        labels
    }
}

pub fn edge_degree_matrix(g: &SimpleGraph) -> EdgeDegreeMatrix {
    let deg = g.degrees();
    EdgeDegreeMatrix::from_edge_labels(g.edges().map(|(u, v)| (deg[u as usize], deg[v as usize])))
}

/// `#(d)` and `X(d1,d2)` of a multigraph without simplifying it: parallel
/// edges are counted with multiplicity, a loop adds 2 to its vertex's degree
/// and is left out of `X`.
pub fn multigraph_statistics(g: &Graph) -> (DegreeHistogram, EdgeDegreeMatrix) {
    let deg = g.degrees();
    let x = EdgeDegreeMatrix::from_edge_labels(
        g.edges().iter().filter(|(u, v)| u != v).map(|&(u, v)| (deg[u as usize], deg[v as usize])),
    );
    (DegreeHistogram::from_degrees(&deg), x)
}

/// `X~` over arbitrary thresholds, backed by the sorted lower-half cells.
#[derive(Debug, Clone)]
pub struct CumulativeEdges {
    /// `(j1, j2, X)` with `j1 ≥ j2`, sorted by `j1` descending.
    cells: Vec<(u64, u64, u64)>,
}

pub fn cumulative_edges(x: &EdgeDegreeMatrix) -> CumulativeEdges {
    let mut cells: Vec<(u64, u64, u64)> = x.lower_cells().map(|((a, b), c)| (a, b, c)).collect();
    cells.sort_unstable_by(|p, q| q.cmp(p));
    CumulativeEdges { cells }
}

impl CumulativeEdges {
    pub fn at(&self, d1: u64, d2: u64) -> u64 {
        let (hi, lo) = if d1 >= d2 { (d1, d2) } else { (d2, d1) };
        self.cells.iter().take_while(|&&(j1, _, _)| j1 > hi).filter(|&&(_, j2, _)| j2 > lo).map(|&(_, _, x)| x).sum()
    }

    /// Evaluates `X~` at many threshold pairs with an offline sweep over
    /// `max(d1,d2)` and a Fenwick tree over `j2`.
    pub fn evaluate_many(&self, queries: &[(u64, u64)]) -> Vec<u64> {
        let mut keys: Vec<u64> = self.cells.iter().map(|c| c.1).collect();
        keys.sort_unstable();
        keys.dedup();
        let mut tree = Fenwick::new(keys.len());

        let mut order: Vec<usize> = (0..queries.len()).collect();
        let hi_of = |i: usize| queries[i].0.max(queries[i].1);
        order.sort_unstable_by_key(|&i| std::cmp::Reverse(hi_of(i)));

        let mut out = vec![0u64; queries.len()];
        let mut next = 0;
        let total_keys = keys.len();
        for i in order {
            let (d1, d2) = queries[i];
            let (hi, lo) = (d1.max(d2), d1.min(d2));
            while next < self.cells.len() && self.cells[next].0 > hi {
                let (_, j2, x) = self.cells[next];
                tree.add(keys.partition_point(|&k| k < j2), x);
                next += 1;
            }
            let first_above = keys.partition_point(|&k| k <= lo);
            out[i] = tree.prefix(total_keys) - tree.prefix(first_above);
        }
        out
    }
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    fn add(&mut self, idx: usize, value: u64) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += value;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum of positions `0..end`.
    fn prefix(&self, end: usize) -> u64 {
        let mut i = end;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// `{ floor(alpha^k) : k ≥ 1 } ∩ [1, d_max]`, deduplicated.
///
/// Powers are formed by repeated `f64` multiplication starting from
/// `alpha`, so the grid is identical on every IEEE-754 platform.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    alpha: f64,
    points: Vec<u64>,
}

impl LogGrid {
    pub fn new(alpha: f64, d_max: u64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 1.0) {
            return Err(Error::param(format!("grid base must exceed 1, got {alpha}")));
        }
        let mut points = Vec::new();
        let mut power = alpha;
        while power.floor() <= d_max as f64 {
            let p = power.floor() as u64;
            if points.last() != Some(&p) {
                points.push(p);
            }
            power *= alpha;
        }
        Ok(LogGrid { alpha, points })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of grid points strictly below `d`.
    pub fn count_below(&self, d: u64) -> usize {
        self.points.partition_point(|&p| p < d)
    }
}

pub fn log_grid(alpha: f64, d_max: u64) -> Result<LogGrid> {
    LogGrid::new(alpha, d_max)
}

/// Accumulator for `X~` on every pair of grid thresholds.
///
/// A lower-half cell `(j1, j2)` contributes to the thresholds `(g_p, g_q)`
/// with `g_p < j1` and `g_q < j2`, so it is dropped into bucket
/// `(count_below(j1) − 1, count_below(j2) − 1)` and a two-dimensional suffix
/// sum yields `X~` for all pairs at once.
#[derive(Debug, Clone)]
pub struct GridAccumulator {
    size: usize,
    buckets: Vec<u64>,
}

impl GridAccumulator {
    pub fn new(grid: &LogGrid) -> Self {
        let size = grid.len();
        GridAccumulator { size, buckets: vec![0; size * size] }
    }

    /// Bucket index of a lower-half label, or `None` when it lies below the
    /// grid in either coordinate.
    pub fn bucket_of(grid: &LogGrid, j1: u64, j2: u64) -> Option<usize> {
        let (p, q) = (grid.count_below(j1), grid.count_below(j2));
        if p == 0 || q == 0 {
            None
        } else {
            Some((p - 1) * grid.len() + (q - 1))
        }
    }

    pub fn add_bucket(&mut self, bucket: usize, x: u64) {
        self.buckets[bucket] += x;
    }

    pub fn clear(&mut self) {
        self.buckets.iter_mut().for_each(|b| *b = 0);
    }

    /// Consumes the buckets and returns the lower-triangular `X~` table,
    /// indexed by [`tri_index`].
    pub fn into_cumulative(mut self) -> Vec<u64> {
        let s = self.size;
        let b = &mut self.buckets;
        for p in (0..s).rev() {
            for q in (0..s).rev() {
                let mut v = b[p * s + q];
                if q + 1 < s {
                    v += b[p * s + q + 1];
                }
                if p + 1 < s {
                    v += b[(p + 1) * s + q];
                }
                if p + 1 < s && q + 1 < s {
                    v -= b[(p + 1) * s + q + 1];
                }
                b[p * s + q] = v;
            }
        }
        let mut tri = vec![0u64; s * (s + 1) / 2];
        for p in 0..s {
            for q in 0..=p {
                tri[tri_index(p, q)] = b[p * s + q];
            }
        }
        tri
    }
}

/// Index of `(p, q)`, `p ≥ q`, in a packed lower triangle.
pub fn tri_index(p: usize, q: usize) -> usize {
    debug_assert!(p >= q);
    p * (p + 1) / 2 + q
}

/// `#~`, `X~` and `rho~` on every grid point (pair).
#[derive(Debug, Clone)]
pub struct RhoSurface {
    grid: LogGrid,
    mean_degree: f64,
    cum_deg: Vec<u64>,
    cum_edges: Vec<u64>,
}

impl RhoSurface {
    pub fn from_parts(grid: LogGrid, mean_degree: f64, cum_deg: Vec<u64>, cum_edges: Vec<u64>) -> Self {
        assert_eq!(cum_deg.len(), grid.len());
        assert_eq!(cum_edges.len(), grid.len() * (grid.len() + 1) / 2);
        RhoSurface { grid, mean_degree, cum_deg, cum_edges }
    }

    /// Mean degree of the underlying graph.
    pub fn mean_degree(&self) -> f64 {
        self.mean_degree
    }

    pub fn grid(&self) -> &LogGrid {
        &self.grid
    }

    /// `#~` at grid index `p`.
    pub fn cum_deg(&self, p: usize) -> u64 {
        self.cum_deg[p]
    }

    pub fn cum_deg_values(&self) -> &[u64] {
        &self.cum_deg
    }

    /// `X~` at grid indices `(p, q)` in either order.
    pub fn cum_edges(&self, p: usize, q: usize) -> u64 {
        let (hi, lo) = if p >= q { (p, q) } else { (q, p) };
        self.cum_edges[tri_index(hi, lo)]
    }

    /// `rho~` at grid indices; `None` where `#~(d1)·#~(d2) = 0`.
    pub fn rho(&self, p: usize, q: usize) -> Option<f64> {
        let denom = self.cum_deg[p] as f64 * self.cum_deg[q] as f64;
        (denom > 0.0).then(|| self.cum_edges(p, q) as f64 / denom)
    }

    /// Replaces `X~`, keeping grid and `#~`.
    pub fn with_cum_edges(&self, cum_edges: Vec<u64>) -> Self {
        RhoSurface::from_parts(self.grid.clone(), self.mean_degree, self.cum_deg.clone(), cum_edges)
    }
}

/// `#~` at every grid point.
pub fn cumulative_degree_on_grid(h: &DegreeHistogram, grid: &LogGrid) -> Vec<u64> {
    let cum = cumulative_degree(h);
    grid.points().iter().map(|&d| cum.at(d)).collect()
}

/// `X~` on the grid, packed lower-triangular.
pub fn cumulative_edges_on_grid(x: &EdgeDegreeMatrix, grid: &LogGrid) -> Vec<u64> {
    let mut acc = GridAccumulator::new(grid);
    for ((j1, j2), c) in x.lower_cells() {
        if let Some(b) = GridAccumulator::bucket_of(grid, j1, j2) {
            acc.add_bucket(b, c);
        }
    }
    acc.into_cumulative()
}

pub fn rho_surface(h: &DegreeHistogram, x: &EdgeDegreeMatrix, grid: &LogGrid) -> RhoSurface {
    let mean_degree = if h.n_vertices() == 0 { 0.0 } else { h.degree_sum() as f64 / h.n_vertices() as f64 };
    RhoSurface::from_parts(
        grid.clone(),
        mean_degree,
        cumulative_degree_on_grid(h, grid),
        cumulative_edges_on_grid(x, grid),
    )
}

/// `rho~(d1,d2)` at arbitrary thresholds, `None` where undefined.
pub fn rho_at(cum_deg: &CumulativeDegree, cum_edges: &CumulativeEdges, d1: u64, d2: u64) -> Option<f64> {
    let denom = cum_deg.at(d1) as f64 * cum_deg.at(d2) as f64;
    (denom > 0.0).then(|| cum_edges.at(d1, d2) as f64 / denom)
}

/// `d_nn(d) = Σ d1 X(d,d1) / Σ X(d,d1)`, defined where the denominator is
/// positive.
pub fn d_nn_profile(x: &EdgeDegreeMatrix) -> BTreeMap<u64, f64> {
    let mut sums: BTreeMap<u64, (u128, u64)> = BTreeMap::new();
    for &((d, d1), c) in x.cells() {
        let e = sums.entry(d).or_insert((0, 0));
        e.0 += d1 as u128 * c as u128;
        e.1 += c;
    }
    sums.into_iter().filter(|&(_, (_, den))| den > 0).map(|(d, (num, den))| (d, num as f64 / den as f64)).collect()
}
