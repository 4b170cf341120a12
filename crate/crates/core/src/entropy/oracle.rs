//! Exact enumeration over every labeled graph on a few vertices.
//!
//! Graphs are bitmasks over the pairs in row-major order. The group of
//! block-preserving vertex permutations is materialized as permutations of
//! pair indices; sweeping the unvisited masks in increasing order and
//! expanding each into its orbit yields every partitioned structure once,
//! with the orbit minimum as its canonical form and the orbit size as the
//! number of labeled graphs `N(S)` it stands for.

use rayon::prelude::*;
use serde::Serialize;

use super::{graph_entropy, n_of_s_per_part, EntropyError, Neumaier};
use crate::graph::{pair_count, pair_index, LabeledGraph, Partition, PartitionedGraph, SbmParams};

/// Largest number of vertex pairs the oracle enumerates (`n = 8`).
pub const ORACLE_MAX_PAIRS: u64 = 28;

#[derive(Clone, Debug, Serialize)]
pub struct StructureClass {
    /// Smallest adjacency mask in the class; bit `k` is pair `k`.
    pub canonical: u32,
    /// `P(S)`.
    pub probability: f64,
    /// `log2 P(G)` shared by every member.
    pub log2_prob_graph: f64,
    pub n_of_s: u64,
    pub aut_size: u64,
    /// The per-block count `prod n_i! / prod |Aut(S_i)|`.
    pub n_of_s_per_part: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactEntropy {
    pub n: usize,
    pub sizes: Vec<usize>,
    pub classes: usize,
    /// `-sum_S P(S) log2 P(S)`.
    pub h_struct: f64,
    /// `H_G - sum_S P(S) log2 N(S)` with the closed-form `H_G`.
    pub h_struct_via_identity: f64,
    /// `-sum_G P(G) log2 P(G)` over all labeled graphs.
    pub h_graph_enumerated: f64,
    pub h_graph_closed: f64,
    pub sum_p_log_n: f64,
    pub sum_p_log_n_per_part: f64,
    /// Classes where the per-block count differs from `N(S)`.
    pub per_part_disagreements: usize,
    pub total_probability: f64,
    #[serde(skip)]
    pub structures: Vec<StructureClass>,
}

impl ExactEntropy {
    /// `|H_G - H_S - sum_S P(S) log2 N(S)|` with the enumerated `H_G`.
    pub fn residual(&self) -> f64 {
        (self.h_graph_enumerated - self.h_struct - self.sum_p_log_n).abs()
    }
}

/// Per pair: index of its block pair; per block pair: `(pairs, log2 P, log2 (1-P))`.
struct PairModel {
    pair_class: Vec<usize>,
    classes: Vec<(u32, f64, f64)>,
}

impl PairModel {
    fn new(params: &SbmParams) -> Self {
        let part = params.partition();
        let r = part.num_blocks();
        let member = part.membership();
        let n = part.n();
        let mut pair_class = Vec::with_capacity(pair_count(n) as usize);
        let mut classes: Vec<(u32, f64, f64)> = (0..r * r)
            .map(|k| {
                let p = params.prob(k / r, k % r);
                (0, p.log2(), (1.0 - p).log2())
            })
            .collect();
        for u in 0..n {
            for v in u + 1..n {
                let c = member[u] * r + member[v];
                pair_class.push(c);
                classes[c].0 += 1;
            }
        }
        Self { pair_class, classes }
    }

    fn log2_prob(&self, mask: u32, counts: &mut [u32]) -> f64 {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut m = mask;
        while m != 0 {
            counts[self.pair_class[m.trailing_zeros() as usize]] += 1;
            m &= m - 1;
        }
        let mut total = 0.0;
        for (&k, &(pairs, lp, lq)) in counts.iter().zip(&self.classes) {
            if k > 0 {
                total += k as f64 * lp;
            }
            if pairs > k {
                total += (pairs - k) as f64 * lq;
            }
        }
        total
    }
}

/// Every block-preserving vertex permutation, as a map on pair indices.
fn pair_permutations(part: &Partition) -> Vec<Vec<u8>> {
    let n = part.n();
    let mut perms: Vec<Vec<usize>> = vec![(0..n).collect()];
    for i in 0..part.num_blocks() {
        let block: Vec<usize> = part.block(i).collect();
        let mut arrangements = Vec::new();
        let mut current = block.clone();
        permutations(&mut current, 0, &mut arrangements);
        perms = perms
            .iter()
            .flat_map(|base| {
                let block = &block;
                arrangements.iter().map(move |arr| {
                    let mut p = base.clone();
                    for (&from, &to) in block.iter().zip(arr) {
                        p[from] = to;
                    }
                    p
                })
            })
            .collect();
    }
    perms
        .into_iter()
        .map(|p| {
            let mut map = Vec::with_capacity(pair_count(n) as usize);
            for u in 0..n {
                for v in u + 1..n {
                    let (a, b) = (p[u].min(p[v]), p[u].max(p[v]));
                    map.push(pair_index(n, a, b) as u8);
                }
            }
            map
        })
        .collect()
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

fn apply(map: &[u8], mask: u32) -> u32 {
    let mut out = 0u32;
    let mut m = mask;
    while m != 0 {
        out |= 1 << map[m.trailing_zeros() as usize];
        m &= m - 1;
    }
    out
}

fn mask_graph(n: usize, mask: u32) -> LabeledGraph {
    let bytes = (0..pair_count(n).div_ceil(8)).map(|b| (mask >> (8 * b)) as u8).collect();
    LabeledGraph::from_packed(n, bytes).expect("mask fits the pair count")
}

/// Partitioned structural entropy by exhaustive enumeration.
pub fn exact_structural_entropy(params: &SbmParams) -> Result<ExactEntropy, EntropyError> {
    let part = params.partition();
    let n = part.n();
    let pairs = pair_count(n);
    if pairs > ORACLE_MAX_PAIRS {
        return Err(EntropyError::TooManyPairs { pairs, max: ORACLE_MAX_PAIRS });
    }
    let total = 1u64 << pairs;
    let model = PairModel::new(params);
    let r2 = model.classes.len();

    const CHUNK: u64 = 1 << 12;
    let h_graph_enumerated = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0; r2];
            (c * CHUNK..((c + 1) * CHUNK).min(total))
                .map(|mask| {
                    let lp = model.log2_prob(mask as u32, &mut counts);
                    if lp == f64::NEG_INFINITY {
                        0.0
                    } else {
                        -lp.exp2() * lp
                    }
                })
                .sum::<Neumaier>()
                .value()
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .sum::<Neumaier>()
        .value();

    let group = pair_permutations(part);
    let group_order = group.len() as u64;
    let mut visited = vec![0u64; total.div_ceil(64) as usize];
    let mut counts = vec![0; r2];
    let mut orbit = Vec::with_capacity(group.len());
    let mut structures = Vec::new();
    for mask in 0..total {
        if visited[(mask >> 6) as usize] >> (mask & 63) & 1 == 1 {
            continue;
        }
        orbit.clear();
        orbit.extend(group.iter().map(|map| apply(map, mask as u32)));
        orbit.sort_unstable();
        orbit.dedup();
        for &m in &orbit {
            visited[(m >> 6) as usize] |= 1 << (m & 63);
        }
        let size = orbit.len() as u64;
        let lp = model.log2_prob(mask as u32, &mut counts);
        let rep = PartitionedGraph::new(mask_graph(n, mask as u32), part.clone()).expect("sizes agree");
        let per_part = n_of_s_per_part(&rep)? as u64;
        structures.push(StructureClass {
            canonical: mask as u32,
            probability: if lp == f64::NEG_INFINITY { 0.0 } else { size as f64 * lp.exp2() },
            log2_prob_graph: lp,
            n_of_s: size,
            aut_size: group_order / size,
            n_of_s_per_part: per_part,
        });
    }

    let mut h_struct = Neumaier::default();
    let mut sum_p_log_n = Neumaier::default();
    let mut sum_p_log_n_per_part = Neumaier::default();
    let mut total_probability = Neumaier::default();
    for s in &structures {
        if s.probability == 0.0 {
            continue;
        }
        let log_n = (s.n_of_s as f64).log2();
        h_struct.add(-s.probability * (log_n + s.log2_prob_graph));
        sum_p_log_n.add(s.probability * log_n);
        sum_p_log_n_per_part.add(s.probability * (s.n_of_s_per_part as f64).log2());
        total_probability.add(s.probability);
    }
    let h_graph_closed = graph_entropy(params);
    Ok(ExactEntropy {
        n,
        sizes: part.sizes().to_vec(),
        classes: structures.len(),
        h_struct: h_struct.value(),
        h_struct_via_identity: h_graph_closed - sum_p_log_n.value(),
        h_graph_enumerated,
        h_graph_closed,
        sum_p_log_n: sum_p_log_n.value(),
        sum_p_log_n_per_part: sum_p_log_n_per_part.value(),
        per_part_disagreements: structures.iter().filter(|s| s.n_of_s != s.n_of_s_per_part).count(),
        total_probability: total_probability.value(),
        structures,
    })
}

/// `|H_G - H_S - sum_S P(S) log2 N(S)|` from the exact enumeration.
pub fn identity_check_eq3(params: &SbmParams) -> Result<f64, EntropyError> {
    Ok(exact_structural_entropy(params)?.residual())
}
