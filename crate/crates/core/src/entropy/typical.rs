//! Typicality statistic for sampled graphs and the symmetry-rate experiment.

use rayon::prelude::*;
use serde::Serialize;

use super::{log2_factorial, structural_entropy_leading, EntropyError, Neumaier, AUT_MAX_N};
use crate::graph::{gen_er, pair_count, Partition, PartitionedGraph, SbmParams};
use crate::iso;

/// Whether the per-block asymmetry behind `P(S) = prod n_i! P(G)` was checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Asymmetry {
    /// Every block subgraph has a trivial automorphism group.
    Verified,
    /// Some block has a nontrivial automorphism; the statistic overstates
    /// `P(S)` and is inexact.
    Symmetric,
    /// Too large to check; asymmetry is assumed.
    Assumed,
}

#[derive(Clone, Debug, Serialize)]
pub struct TypicalityReport {
    /// `-log2 P(S) / C(n,2)`.
    pub statistic: f64,
    pub target: f64,
    pub asymmetry: Asymmetry,
}

impl TypicalityReport {
    /// `|statistic - target| < 3 eps`.
    pub fn is_typical(&self, eps: f64) -> bool {
        (self.statistic - self.target).abs() < 3.0 * eps
    }
}

/// `log2 P(G)` from the block-pair edge counts; `-inf` if impossible.
pub fn log2_prob_graph(pg: &PartitionedGraph, params: &SbmParams) -> f64 {
    let sizes = params.sizes();
    let r = sizes.len();
    let counts = pg.block_edge_counts();
    let mut total = Neumaier::default();
    for i in 0..r {
        for j in i..r {
            let pairs = if i == j { pair_count(sizes[i]) } else { (sizes[i] * sizes[j]) as u64 };
            let k = counts[i][j];
            let p = params.prob(i, j);
            if k > 0 {
                total.add(k as f64 * p.log2());
            }
            if pairs > k {
                total.add((pairs - k) as f64 * (1.0 - p).log2());
            }
        }
    }
    total.value()
}

/// Expected value of the statistic's leading terms: the leading structural
/// entropy divided by `C(n,2)`.
pub fn typicality_target(params: &SbmParams) -> f64 {
    structural_entropy_leading(params).h_struct_leading / pair_count(params.n()) as f64
}

/// `-log2 P(S) / C(n,2)` with `log2 P(S) = sum_i log2 n_i! + log2 P(G)`,
/// exact when every block is asymmetric.
pub fn typicality_statistic(pg: &PartitionedGraph, params: &SbmParams) -> TypicalityReport {
    assert_eq!(pg.partition(), params.partition(), "graph and model blocks differ");
    let part = pg.partition();
    let log2_ps = part.sizes().iter().map(|&s| log2_factorial(s)).sum::<f64>() + log2_prob_graph(pg, params);
    let asymmetry = if pg.n() > AUT_MAX_N {
        Asymmetry::Assumed
    } else if (0..part.num_blocks())
        .any(|i| iso::has_nontrivial_automorphism(&single(pg.block_subgraph(i).expect("block in range"))))
    {
        Asymmetry::Symmetric
    } else {
        Asymmetry::Verified
    };
    TypicalityReport {
        statistic: -log2_ps / pair_count(pg.n()) as f64,
        target: typicality_target(params),
        asymmetry,
    }
}

fn single(g: crate::graph::LabeledGraph) -> PartitionedGraph {
    let n = g.n();
    PartitionedGraph::new(g, Partition::single(n)).expect("single block covers the graph")
}

/// Fraction of `G(n, p)` samples with a nontrivial automorphism; trial `t`
/// uses seed `seed + t`.
pub fn symmetry_rate(n: usize, p: f64, trials: u64, seed: u64) -> Result<f64, EntropyError> {
    if n > AUT_MAX_N {
        return Err(EntropyError::TooLarge { n, max: AUT_MAX_N });
    }
    if trials == 0 {
        return Ok(0.0);
    }
    let symmetric = (0..trials)
        .into_par_iter()
        .filter(|&t| iso::has_nontrivial_automorphism(&single(gen_er(n, p, seed.wrapping_add(t)))))
        .count();
    Ok(symmetric as f64 / trials as f64)
}
