//! Checks that two partitioned graphs are partition-respecting isomorphic.
//!
//! Small graphs go through the exhaustive search in [`crate::iso`]. Larger
//! graphs are re-encoded under one shared model: the decoder output is a
//! function of the bitstreams alone and is isomorphic to each input, so equal
//! streams prove isomorphism. Block-pair edge counts and per-block degree
//! profiles are compared as well; they are necessary conditions and give a
//! readable reason when the ladder fails.

use serde::Serialize;

use super::{encode_with_model, CodecError, QuantizedModel};
use crate::graph::{PartitionedGraph, SbmParams};
use crate::iso;

/// Largest `n` verified by exhaustive search.
pub const EXACT_VERIFY_MAX_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMethod {
    Exact,
    Ladder,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub method: VerifyMethod,
    pub passed: bool,
    pub same_partition: bool,
    pub edge_counts_equal: bool,
    pub degree_profiles_equal: bool,
    /// `None` when the exact search was used.
    pub reencode_equal: Option<bool>,
}

pub fn verify_roundtrip(original: &PartitionedGraph, candidate: &PartitionedGraph) -> Result<VerifyReport, CodecError> {
    let same_partition = original.partition() == candidate.partition();
    if !same_partition {
        return Ok(VerifyReport {
            method: VerifyMethod::Exact,
            passed: false,
            same_partition,
            edge_counts_equal: false,
            degree_profiles_equal: false,
            reencode_equal: None,
        });
    }
    let edge_counts_equal = original.block_edge_counts() == candidate.block_edge_counts();
    let degree_profiles_equal = profile_multisets(original) == profile_multisets(candidate);
    if original.n() <= EXACT_VERIFY_MAX_N {
        return Ok(VerifyReport {
            method: VerifyMethod::Exact,
            passed: iso::are_isomorphic(original, candidate),
            same_partition,
            edge_counts_equal,
            degree_profiles_equal,
            reencode_equal: None,
        });
    }
    let reencode_equal = edge_counts_equal && {
        let model = QuantizedModel::from_params(&SbmParams::estimate(original));
        encode_with_model(original, &model)?.0 == encode_with_model(candidate, &model)?.0
    };
    Ok(VerifyReport {
        method: VerifyMethod::Ladder,
        passed: reencode_equal && edge_counts_equal && degree_profiles_equal,
        same_partition,
        edge_counts_equal,
        degree_profiles_equal,
        reencode_equal: Some(reencode_equal),
    })
}

/// Per block, the sorted list of the block's degree-profile rows.
fn profile_multisets(pg: &PartitionedGraph) -> Vec<Vec<Vec<usize>>> {
    let rows = pg.degree_profile();
    (0..pg.partition().num_blocks())
        .map(|i| {
            let mut block: Vec<Vec<usize>> = pg.partition().block(i).map(|v| rows[v].clone()).collect();
            block.sort_unstable();
            block
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{sbm_decode, sbm_encode};
    use crate::graph::{gen_sbm, LabeledGraph};

    #[test]
    fn small_and_large_roundtrips_pass() {
        for sizes in [vec![4, 5], vec![20, 30, 10]] {
            let params = SbmParams::planted(sizes, 0.4, 0.1).unwrap();
            let pg = gen_sbm(&params, 11);
            let back = sbm_decode(&sbm_encode(&pg, &params).unwrap()).unwrap();
            let report = verify_roundtrip(&pg, &back).unwrap();
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn detects_differences() {
        let params = SbmParams::planted(vec![20, 20], 0.4, 0.1).unwrap();
        let pg = gen_sbm(&params, 5);
        let (mut g, part) = pg.clone().into_parts();
        let (u, v) = (0, 21);
        g.set_edge(u, v, !g.has_edge(u, v));
        let other = PartitionedGraph::new(g, part).unwrap();
        let report = verify_roundtrip(&pg, &other).unwrap();
        assert!(!report.passed);
        assert!(!report.edge_counts_equal);

        // equal edge counts, different degree multisets
        let a = PartitionedGraph::new(
            LabeledGraph::from_edges(12, [(0, 6), (1, 7)]),
            crate::graph::Partition::new(vec![6, 6]).unwrap(),
        )
        .unwrap();
        let b = PartitionedGraph::new(
            LabeledGraph::from_edges(12, [(0, 6), (0, 7)]),
            crate::graph::Partition::new(vec![6, 6]).unwrap(),
        )
        .unwrap();
        let report = verify_roundtrip(&a, &b).unwrap();
        assert_eq!(report.method, VerifyMethod::Ladder);
        assert!(report.edge_counts_equal && !report.degree_profiles_equal && !report.passed);
    }
}
