//! Entropy of SBM graphs and of their partitioned structures.
//!
//! Closed forms live here; [`oracle`] enumerates small graph spaces exactly
//! and [`typical`] holds the per-sample typicality statistic and the
//! automorphism sampling experiment.

mod oracle;
mod typical;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{pair_count, PartitionedGraph, SbmParams};
use crate::iso;

pub use oracle::{exact_structural_entropy, identity_check_eq3, ExactEntropy, StructureClass, ORACLE_MAX_PAIRS};
pub use typical::{
    log2_prob_graph, symmetry_rate, typicality_statistic, typicality_target, Asymmetry, TypicalityReport,
};

/// Largest `n` accepted by the automorphism routines.
pub const AUT_MAX_N: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum EntropyError {
    #[error("n = {n} exceeds the limit of {max} for exhaustive search")]
    TooLarge { n: usize, max: usize },
    #[error("{pairs} vertex pairs exceed the enumeration limit of {max}")]
    TooManyPairs { pairs: u64, max: u64 },
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::Sum<f64> for Neumaier {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::default();
        iter.for_each(|x| acc.add(x));
        acc
    }
}

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    xlog2x(p) + xlog2x(1.0 - p)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `log2 n!` as the sum of `log2 k`.
pub fn log2_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).log2()).sum::<Neumaier>().value()
}

fn choose2(n: usize) -> f64 {
    pair_count(n) as f64
}

/// Entropy of the labeled graph: one Bernoulli coin per vertex pair.
pub fn graph_entropy(params: &SbmParams) -> f64 {
    let (intra, inter) = graph_entropy_terms(params);
    intra + inter
}

fn graph_entropy_terms(params: &SbmParams) -> (f64, f64) {
    let sizes = params.sizes();
    let r = sizes.len();
    let intra = (0..r).map(|i| choose2(sizes[i]) * binary_entropy(params.prob(i, i))).sum::<Neumaier>().value();
    let inter = (0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .map(|(i, j)| sizes[i] as f64 * sizes[j] as f64 * binary_entropy(params.prob(i, j)))
        .sum::<Neumaier>()
        .value();
    (intra, inter)
}

/// Leading terms of the partitioned structural entropy.
#[derive(Clone, Debug, Serialize)]
pub struct EntropyReport {
    pub n: usize,
    pub sizes: Vec<usize>,
    /// `H_G`, bits.
    pub h_graph: f64,
    /// `sum_i C(n_i, 2) h(P_ii)`.
    pub intra: f64,
    /// `sum_{i<j} n_i n_j h(P_ij)`.
    pub inter: f64,
    /// `sum_i log2 n_i!`, the bits spent on labels inside blocks.
    pub label_savings: f64,
    /// `h_graph - label_savings`.
    pub h_struct_leading: f64,
    /// All blocks have the same size, so `sum_i log2 n_i! = r log2 (n/r)!`.
    pub equal_parts: bool,
    /// `z (h(p) - h(q)) + C(n,2) h(q) - r log2 (n/r)!` with
    /// `z = sum_i C(n_i, 2)`; present for planted models with equal parts.
    pub planted_form: Option<f64>,
    /// The `O(log n / n^alpha)` remainder is not evaluated.
    pub error_term: &'static str,
}

pub fn structural_entropy_leading(params: &SbmParams) -> EntropyReport {
    let sizes = params.sizes().to_vec();
    let n = params.n();
    let r = sizes.len();
    let (intra, inter) = graph_entropy_terms(params);
    let h_graph = intra + inter;
    let label_savings = sizes.iter().map(|&s| log2_factorial(s)).sum::<Neumaier>().value();
    let equal_parts = sizes.iter().all(|&s| s == sizes[0]);
    let planted_form = match (params.as_planted(), equal_parts) {
        (Some((p, q)), true) => {
            let z: f64 = sizes.iter().map(|&s| choose2(s)).sum();
            Some(z * (binary_entropy(p) - binary_entropy(q)) + choose2(n) * binary_entropy(q) - r as f64 * log2_factorial(n / r))
        }
        _ => None,
    };
    EntropyReport {
        n,
        sizes,
        h_graph,
        intra,
        inter,
        label_savings,
        h_struct_leading: h_graph - label_savings,
        equal_parts,
        planted_form,
        error_term: "excluded",
    }
}

fn check_aut_size(pg: &PartitionedGraph) -> Result<(), EntropyError> {
    if pg.n() > AUT_MAX_N {
        return Err(EntropyError::TooLarge { n: pg.n(), max: AUT_MAX_N });
    }
    Ok(())
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Order of the group of block-preserving automorphisms.
pub fn aut_size_partitioned(pg: &PartitionedGraph) -> Result<u128, EntropyError> {
    check_aut_size(pg)?;
    Ok(iso::count_automorphisms(pg))
}

/// Number of labeled graphs with the same partitioned structure as `pg`:
/// `prod_i n_i! / |Aut_P(pg)|`.
pub fn n_of_s(pg: &PartitionedGraph) -> Result<u128, EntropyError> {
    let aut = aut_size_partitioned(pg)?;
    Ok(pg.partition().sizes().iter().map(|&s| factorial(s)).product::<u128>() / aut)
}

/// `prod_i n_i! / prod_i |Aut(S_i)|`, using the automorphism groups of the
/// block subgraphs alone. Never exceeds [`n_of_s`]; equal when no cross edge
/// breaks a within-block symmetry.
pub fn n_of_s_per_part(pg: &PartitionedGraph) -> Result<u128, EntropyError> {
    check_aut_size(pg)?;
    let part = pg.partition();
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..part.num_blocks() {
        num *= factorial(part.sizes()[i]);
        den *= iso::count_graph_automorphisms(&pg.block_subgraph(i).expect("block index in range"));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LabeledGraph, Partition};

    fn pg(sizes: Vec<usize>, edges: &[(usize, usize)]) -> PartitionedGraph {
        let part = Partition::new(sizes).unwrap();
        PartitionedGraph::new(LabeledGraph::from_edges(part.n(), edges.iter().copied()), part).unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
        assert_eq!(binary_entropy(1.0), 0.0);
        // -0.3 log2 0.3 - 0.7 log2 0.7 from natural logs
        let direct = -(0.3f64 * 0.3f64.ln() + 0.7 * 0.7f64.ln()) / std::f64::consts::LN_2;
        assert!((binary_entropy(0.3) - direct).abs() < 1e-12);
        assert!((binary_entropy(0.3) - 0.8812908992).abs() < 1e-9);
        let direct = -(0.05f64 * 0.05f64.ln() + 0.95 * 0.95f64.ln()) / std::f64::consts::LN_2;
        assert!((binary_entropy(0.05) - direct).abs() < 1e-12);
    }

    #[test]
    fn log_factorials() {
        assert_eq!(log2_factorial(0), 0.0);
        assert_eq!(log2_factorial(1), 0.0);
        assert_eq!(log2_factorial(2), 1.0);
        assert!((log2_factorial(10) - 3_628_800f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn graph_entropy_examples() {
        let p = SbmParams::planted(vec![2, 2], 0.5, 0.5).unwrap();
        assert!((graph_entropy(&p) - 6.0).abs() < 1e-12);
        let er = SbmParams::erdos_renyi(10, 0.3).unwrap();
        assert!((graph_entropy(&er) - 45.0 * binary_entropy(0.3)).abs() < 1e-12);
        let big = SbmParams::planted(vec![256, 256], 0.3, 0.05).unwrap();
        let h = |p: f64| -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / std::f64::consts::LN_2;
        let expect = 2.0 * 32640.0 * h(0.3) + 65536.0 * h(0.05);
        assert!((graph_entropy(&big) - expect).abs() < 1e-6);
    }

    #[test]
    fn leading_terms() {
        let rep = structural_entropy_leading(&SbmParams::planted(vec![2, 2], 0.5, 0.5).unwrap());
        assert!((rep.h_struct_leading - 4.0).abs() < 1e-12);
        assert!(rep.equal_parts);
        assert!((rep.planted_form.unwrap() - 4.0).abs() < 1e-12);

        let rep = structural_entropy_leading(&SbmParams::erdos_renyi(9, 0.3).unwrap());
        let expect = 36.0 * binary_entropy(0.3) - log2_factorial(9);
        assert!((rep.h_struct_leading - expect).abs() < 1e-12);

        let params = SbmParams::planted(vec![128; 4], 0.3, 0.05).unwrap();
        let rep = structural_entropy_leading(&params);
        assert!((rep.h_struct_leading - rep.planted_form.unwrap()).abs() < 1e-6);
        assert!(rep.h_struct_leading <= rep.h_graph);

        let rep = structural_entropy_leading(&SbmParams::planted(vec![3, 5], 0.3, 0.05).unwrap());
        assert!(!rep.equal_parts && rep.planted_form.is_none());
        assert!((rep.label_savings - (6f64.log2() + 120f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(aut_size_partitioned(&pg(vec![2, 2], &[(0, 1)])).unwrap(), 4);
        assert_eq!(aut_size_partitioned(&pg(vec![2, 2], &[(0, 2)])).unwrap(), 1);
        assert_eq!(aut_size_partitioned(&pg(vec![2, 2], &[])).unwrap(), 4);
        assert_eq!(n_of_s(&pg(vec![2, 2], &[(0, 1)])).unwrap(), 1);
        assert_eq!(n_of_s(&pg(vec![2, 2], &[(0, 2)])).unwrap(), 4);
        assert_eq!(n_of_s(&pg(vec![2, 2], &[])).unwrap(), 1);
        // the cross edge breaks both within-block swaps
        assert_eq!(n_of_s_per_part(&pg(vec![2, 2], &[(0, 2)])).unwrap(), 1);
        assert_eq!(
            aut_size_partitioned(&pg(vec![13], &[])),
            Err(EntropyError::TooLarge { n: 13, max: AUT_MAX_N })
        );
    }
}
