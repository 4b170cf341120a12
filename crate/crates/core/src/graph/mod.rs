//! Labeled graphs, vertex partitions and stochastic block model parameters.
//!
//! A [`LabeledGraph`] stores the strict upper triangle of its adjacency
//! matrix as a packed bit vector: pair `(u, v)` with `u < v` has index
//! `k = u*(2n-u-1)/2 + (v-u-1)` and lives in byte `k / 8`, bit `k % 8`
//! (LSB first). This is also the on-disk layout of the PGRF format.

mod io;
mod sample;

use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

pub use io::{read_graph, read_graph_from, write_graph, write_graph_to, PGRF_MAGIC, PGRF_VERSION};
pub use sample::{gen_er, gen_sbm, PairSampler};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid edge probability {value} at ({row}, {col})")]
    InvalidProbability { row: usize, col: usize, value: f64 },
    #[error("probability matrix is not symmetric at ({0}, {1})")]
    AsymmetricMatrix(usize, usize),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("block index {index} out of range for {blocks} blocks")]
    BlockOutOfRange { index: usize, blocks: usize },
    #[error("malformed graph file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Number of unordered vertex pairs, `C(n, 2)`.
#[inline]
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Row-major index of the pair `(u, v)`, `u < v < n`.
#[inline]
pub fn pair_index(n: usize, u: usize, v: usize) -> u64 {
    debug_assert!(u < v && v < n);
    let (n, u, v) = (n as u64, u as u64, v as u64);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

/// Inverse of [`pair_index`].
pub fn pair_from_index(n: usize, k: u64) -> (usize, usize) {
    debug_assert!(k < pair_count(n));
    let mut u = 0usize;
    let mut row_start = 0u64;
    loop {
        let row_len = (n - u - 1) as u64;
        if k < row_start + row_len {
            return (u, u + 1 + (k - row_start) as usize);
        }
        row_start += row_len;
        u += 1;
    }
}

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    n: usize,
    adj: Vec<u8>,
}

impl std::fmt::Debug for LabeledGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LabeledGraph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl LabeledGraph {
    pub fn empty(n: usize) -> Self {
        let bytes = pair_count(n).div_ceil(8) as usize;
        Self { n, adj: vec![0; bytes] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        let pairs = pair_count(n);
        for k in 0..pairs {
            g.adj[(k >> 3) as usize] |= 1 << (k & 7);
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.set_edge(u, v, true);
        }
        g
    }

    /// Wraps raw packed adjacency bytes. Fails if the length is wrong or any
    /// pad bit past the last pair is set.
    pub fn from_packed(n: usize, adj: Vec<u8>) -> Result<Self, GraphError> {
        let pairs = pair_count(n);
        let expected = pairs.div_ceil(8) as usize;
        if adj.len() != expected {
            return Err(GraphError::SizeMismatch(format!(
                "expected {expected} adjacency bytes for n={n}, got {}",
                adj.len()
            )));
        }
        let used = (pairs % 8) as u32;
        if used != 0 {
            let last = adj[expected - 1];
            if last >> used != 0 {
                return Err(GraphError::Format("nonzero adjacency pad bits".into()));
            }
        }
        Ok(Self { n, adj })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn packed(&self) -> &[u8] {
        &self.adj
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.pair_bit(pair_index(self.n, a, b))
    }

    #[inline]
    pub fn pair_bit(&self, k: u64) -> bool {
        (self.adj[(k >> 3) as usize] >> (k & 7)) & 1 == 1
    }

    /// Sets or clears the edge `{u, v}`. Self-loops are not representable.
    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        assert!(u != v, "self-loop ({u}, {u}) is not representable");
        assert!(u < self.n && v < self.n, "vertex out of range");
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let k = pair_index(self.n, a, b);
        let byte = &mut self.adj[(k >> 3) as usize];
        if present {
            *byte |= 1 << (k & 7);
        } else {
            *byte &= !(1 << (k & 7));
        }
    }

    pub fn edge_count(&self) -> u64 {
        self.adj.iter().map(|b| b.count_ones() as u64).sum()
    }

    pub fn degree(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.has_edge(u, v)).count()
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&v| self.has_edge(u, v))
    }

    /// All edges `(u, v)` with `u < v`, in row-major pair order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |u| {
            let base = if u + 1 < n { pair_index(n, u, u + 1) } else { 0 };
            (u + 1..n).filter_map(move |v| self.pair_bit(base + (v - u - 1) as u64).then_some((u, v)))
        })
    }

    /// Graph with vertex `v` renamed to `map[v]`. `map` must be a bijection on `0..n`.
    pub fn relabel(&self, map: &[usize]) -> LabeledGraph {
        assert_eq!(map.len(), self.n);
        let mut out = LabeledGraph::empty(self.n);
        for (u, v) in self.edges() {
            out.set_edge(map[u], map[v], true);
        }
        out
    }

    /// Induced subgraph on `range`, renumbered from zero preserving order.
    pub fn induced(&self, range: Range<usize>) -> LabeledGraph {
        let m = range.len();
        let mut out = LabeledGraph::empty(m);
        let mut k = 0u64;
        for a in 0..m {
            for b in a + 1..m {
                if self.has_edge(range.start + a, range.start + b) {
                    out.adj[(k >> 3) as usize] |= 1 << (k & 7);
                }
                k += 1;
            }
        }
        out
    }
}

/// Ordered blocks `V_1..V_r` as contiguous index ranges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl Partition {
    /// Blocks must have positive sizes. The empty vertex set is represented
    /// by the single block `[0]`.
    pub fn new(sizes: Vec<usize>) -> Result<Self, GraphError> {
        if sizes.is_empty() {
            return Err(GraphError::InvalidPartition("at least one block required".into()));
        }
        if sizes.len() > u16::MAX as usize {
            return Err(GraphError::InvalidPartition(format!("too many blocks ({})", sizes.len())));
        }
        let total: usize = sizes.iter().sum();
        let empty_set = total == 0 && sizes.len() == 1;
        if !empty_set && sizes.contains(&0) {
            return Err(GraphError::InvalidPartition("block sizes must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &s in &sizes {
            acc += s;
            offsets.push(acc);
        }
        Ok(Self { sizes, offsets })
    }

    pub fn single(n: usize) -> Self {
        Self::new(vec![n]).expect("single block is always valid")
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> usize {
        self.offsets[self.sizes.len()]
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn block_of(&self, v: usize) -> usize {
        debug_assert!(v < self.n());
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    /// Per-vertex block index.
    pub fn membership(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n());
        for (i, &s) in self.sizes.iter().enumerate() {
            out.extend(std::iter::repeat_n(i, s));
        }
        out
    }
}

/// A labeled representative of a partitioned structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedGraph {
    graph: LabeledGraph,
    partition: Partition,
}

impl PartitionedGraph {
    pub fn new(graph: LabeledGraph, partition: Partition) -> Result<Self, GraphError> {
        if graph.n() != partition.n() {
            return Err(GraphError::SizeMismatch(format!(
                "graph has {} vertices, partition covers {}",
                graph.n(),
                partition.n()
            )));
        }
        Ok(Self { graph, partition })
    }

    /// Normalizes an arbitrary block membership into contiguous blocks.
    ///
    /// Vertices are stably sorted by block; returns the partitioned graph
    /// and the permutation `perm[old] = new`. Empty blocks are dropped.
    pub fn from_membership(
        graph: &LabeledGraph,
        membership: &[usize],
    ) -> Result<(Self, Vec<usize>), GraphError> {
        if membership.len() != graph.n() {
            return Err(GraphError::SizeMismatch(format!(
                "membership has {} entries for {} vertices",
                membership.len(),
                graph.n()
            )));
        }
        let mut order: Vec<usize> = (0..graph.n()).collect();
        order.sort_by_key(|&v| membership[v]);
        let mut perm = vec![0; graph.n()];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let mut sizes = Vec::new();
        let mut last = None;
        for &v in &order {
            if last != Some(membership[v]) {
                sizes.push(0);
                last = Some(membership[v]);
            }
            *sizes.last_mut().unwrap() += 1;
        }
        if sizes.is_empty() {
            sizes.push(0);
        }
        let pg = Self::new(graph.relabel(&perm), Partition::new(sizes)?)?;
        Ok((pg, perm))
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn into_parts(self) -> (LabeledGraph, Partition) {
        (self.graph, self.partition)
    }

    /// Induced subgraph on block `i`, renumbered `0..n_i`.
    pub fn block_subgraph(&self, i: usize) -> Result<LabeledGraph, GraphError> {
        self.check_block(i)?;
        Ok(self.graph.induced(self.partition.block(i)))
    }

    /// The `n_i * n_j` adjacency bits between blocks `i < j`, rows indexed by
    /// block `i` and columns by block `j`, both in labeling order.
    pub fn cross_slice(&self, i: usize, j: usize) -> Result<Vec<bool>, GraphError> {
        self.check_block(i)?;
        self.check_block(j)?;
        if i >= j {
            return Err(GraphError::InvalidPartition(format!("cross slice needs i < j, got ({i}, {j})")));
        }
        let (bi, bj) = (self.partition.block(i), self.partition.block(j));
        let mut out = Vec::with_capacity(bi.len() * bj.len());
        for u in bi {
            for v in bj.clone() {
                out.push(self.graph.has_edge(u, v));
            }
        }
        Ok(out)
    }

    /// `profile[u][b]` is the number of neighbours of `u` inside block `b`.
    pub fn degree_profile(&self) -> Vec<Vec<usize>> {
        let r = self.partition.num_blocks();
        let member = self.partition.membership();
        let mut profile = vec![vec![0usize; r]; self.n()];
        for (u, v) in self.graph.edges() {
            profile[u][member[v]] += 1;
            profile[v][member[u]] += 1;
        }
        profile
    }

    /// Edge counts per block pair, `counts[i][j]` for `i <= j` (mirrored).
    pub fn block_edge_counts(&self) -> Vec<Vec<u64>> {
        let r = self.partition.num_blocks();
        let member = self.partition.membership();
        let mut counts = vec![vec![0u64; r]; r];
        for (u, v) in self.graph.edges() {
            let (a, b) = (member[u], member[v]);
            counts[a.min(b)][a.max(b)] += 1;
        }
        for a in 0..r {
            for b in 0..a {
                counts[a][b] = counts[b][a];
            }
        }
        counts
    }

    /// Applies a per-block relabeling: vertex `offset_i + x` goes to
    /// `offset_i + maps[i][x]`.
    pub fn relabel_blocks(&self, maps: &[Vec<usize>]) -> PartitionedGraph {
        assert_eq!(maps.len(), self.partition.num_blocks());
        let mut full = Vec::with_capacity(self.n());
        for (i, map) in maps.iter().enumerate() {
            let off = self.partition.offset(i);
            assert_eq!(map.len(), self.partition.sizes()[i]);
            full.extend(map.iter().map(|&x| off + x));
        }
        PartitionedGraph {
            graph: self.graph.relabel(&full),
            partition: self.partition.clone(),
        }
    }

    fn check_block(&self, i: usize) -> Result<(), GraphError> {
        let blocks = self.partition.num_blocks();
        if i >= blocks {
            return Err(GraphError::BlockOutOfRange { index: i, blocks });
        }
        Ok(())
    }
}

/// Block sizes plus a symmetric matrix of edge probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SbmParams {
    partition: Partition,
    probs: Vec<f64>,
}

impl SbmParams {
    /// `probs` is row-major `r x r`.
    pub fn new(sizes: Vec<usize>, probs: Vec<f64>) -> Result<Self, GraphError> {
        let partition = Partition::new(sizes)?;
        let r = partition.num_blocks();
        if probs.len() != r * r {
            return Err(GraphError::SizeMismatch(format!(
                "probability matrix has {} entries, expected {}",
                probs.len(),
                r * r
            )));
        }
        for i in 0..r {
            for j in 0..r {
                let value = probs[i * r + j];
                if !(0.0..=1.0).contains(&value) {
                    return Err(GraphError::InvalidProbability { row: i, col: j, value });
                }
                if value != probs[j * r + i] {
                    return Err(GraphError::AsymmetricMatrix(i, j));
                }
            }
        }
        Ok(Self { partition, probs })
    }

    /// `P_ii = p`, `P_ij = q` for `i != j`.
    pub fn planted(sizes: Vec<usize>, p: f64, q: f64) -> Result<Self, GraphError> {
        let r = sizes.len();
        let probs = (0..r * r).map(|k| if k / r == k % r { p } else { q }).collect();
        Self::new(sizes, probs)
    }

    /// Erdős–Rényi `G(n, p)` as the one-block model.
    pub fn erdos_renyi(n: usize, p: f64) -> Result<Self, GraphError> {
        Self::new(vec![n], vec![p])
    }

    /// Empirical block-pair densities of `pg`. Pairs with no vertex pairs
    /// (singleton blocks on the diagonal) get probability zero.
    pub fn estimate(pg: &PartitionedGraph) -> Self {
        let part = pg.partition();
        let r = part.num_blocks();
        let counts = pg.block_edge_counts();
        let mut probs = vec![0.0; r * r];
        for i in 0..r {
            for j in 0..r {
                let (a, b) = (part.sizes()[i] as u64, part.sizes()[j] as u64);
                let pairs = if i == j { a * a.saturating_sub(1) / 2 } else { a * b };
                probs[i * r + j] = if pairs == 0 { 0.0 } else { counts[i][j] as f64 / pairs as f64 };
            }
        }
        Self { partition: part.clone(), probs }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn sizes(&self) -> &[usize] {
        self.partition.sizes()
    }

    pub fn n(&self) -> usize {
        self.partition.n()
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    #[inline]
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.num_blocks() + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.probs
    }

    /// `Some((p, q))` when every diagonal entry equals `p` and every
    /// off-diagonal entry equals `q` (`q = p` when `r = 1`).
    pub fn as_planted(&self) -> Option<(f64, f64)> {
        let r = self.num_blocks();
        let p = self.prob(0, 0);
        let q = if r > 1 { self.prob(0, 1) } else { p };
        for i in 0..r {
            for j in 0..r {
                let expect = if i == j { p } else { q };
                if self.prob(i, j) != expect {
                    return None;
                }
            }
        }
        Some((p, q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_is_row_major() {
        let n = 5;
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                assert_eq!(pair_index(n, u, v), k);
                assert_eq!(pair_from_index(n, k), (u, v));
                k += 1;
            }
        }
        assert_eq!(k, pair_count(n));
    }

    #[test]
    fn packed_size_and_padding() {
        for n in 0..20 {
            let g = LabeledGraph::complete(n);
            assert_eq!(g.packed().len() as u64, pair_count(n).div_ceil(8));
            assert_eq!(g.edge_count(), pair_count(n));
        }
        assert!(LabeledGraph::from_packed(3, vec![0b1000]).is_err());
        assert!(LabeledGraph::from_packed(3, vec![0b111]).is_ok());
        assert!(LabeledGraph::from_packed(3, vec![]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric_and_loop_free() {
        let g = LabeledGraph::from_edges(4, [(2, 0), (1, 3)]);
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0));
        assert!(g.has_edge(3, 1));
        assert!(!g.has_edge(2, 2));
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn partition_rejects_bad_sizes() {
        assert!(Partition::new(vec![]).is_err());
        assert!(Partition::new(vec![3, 0, 2]).is_err());
        assert!(Partition::new(vec![0]).is_ok());
        let p = Partition::new(vec![2, 3, 1]).unwrap();
        assert_eq!(p.n(), 6);
        assert_eq!(p.block(1), 2..5);
        assert_eq!((0..6).map(|v| p.block_of(v)).collect::<Vec<_>>(), vec![0, 0, 1, 1, 1, 2]);
    }

    #[test]
    fn block_subgraph_of_k4() {
        let pg = PartitionedGraph::new(LabeledGraph::complete(4), Partition::new(vec![2, 2]).unwrap()).unwrap();
        assert_eq!(pg.block_subgraph(0).unwrap(), LabeledGraph::complete(2));
        assert_eq!(pg.block_subgraph(1).unwrap(), LabeledGraph::complete(2));
        assert!(pg.block_subgraph(2).is_err());
        let empty = PartitionedGraph::new(LabeledGraph::empty(4), Partition::new(vec![2, 2]).unwrap()).unwrap();
        assert_eq!(empty.block_subgraph(1).unwrap(), LabeledGraph::empty(2));
    }

    #[test]
    fn cross_slice_examples() {
        let part = Partition::new(vec![2, 2]).unwrap();
        let full = PartitionedGraph::new(LabeledGraph::complete(4), part.clone()).unwrap();
        assert_eq!(full.cross_slice(0, 1).unwrap(), vec![true; 4]);
        let empty = PartitionedGraph::new(LabeledGraph::empty(4), part.clone()).unwrap();
        assert_eq!(empty.cross_slice(0, 1).unwrap(), vec![false; 4]);
        let single = PartitionedGraph::new(LabeledGraph::from_edges(4, [(0, 2)]), part).unwrap();
        assert_eq!(single.cross_slice(0, 1).unwrap(), vec![true, false, false, false]);
        assert!(single.cross_slice(1, 0).is_err());
    }

    #[test]
    fn membership_normalization_is_stable() {
        let g = LabeledGraph::from_edges(5, [(0, 1), (1, 4), (2, 3)]);
        let (pg, perm) = PartitionedGraph::from_membership(&g, &[1, 0, 1, 0, 1]).unwrap();
        assert_eq!(pg.partition().sizes(), &[2, 3]);
        assert_eq!(perm, vec![2, 0, 3, 1, 4]);
        for (u, v) in g.edges() {
            assert!(pg.graph().has_edge(perm[u], perm[v]));
        }
        assert_eq!(pg.graph().edge_count(), 3);
    }

    #[test]
    fn params_validation() {
        assert!(SbmParams::planted(vec![2, 2], 1.5, 0.1).is_err());
        assert!(SbmParams::new(vec![1, 1], vec![0.1, 0.2, 0.3, 0.1]).is_err());
        let p = SbmParams::planted(vec![3, 3, 2], 0.3, 0.05).unwrap();
        assert_eq!(p.as_planted(), Some((0.3, 0.05)));
        let m = SbmParams::new(vec![1, 1], vec![0.1, 0.2, 0.2, 0.3]).unwrap();
        assert_eq!(m.as_planted(), None);
    }
}
