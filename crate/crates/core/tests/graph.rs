use proptest::prelude::*;
use sbmz_core::graph::{
    gen_er, gen_sbm, pair_count, read_graph, read_graph_from, write_graph, write_graph_to, LabeledGraph, Partition,
    PartitionedGraph, SbmParams,
};

fn sizes_strategy() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..8, 1..5)
}

fn pg_strategy() -> impl Strategy<Value = PartitionedGraph> {
    (sizes_strategy(), 0.0f64..=1.0, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(sizes, p, q, seed)| gen_sbm(&SbmParams::planted(sizes, p, q).unwrap(), seed))
}

proptest! {
    #[test]
    fn handshake(pg in pg_strategy()) {
        let g = pg.graph();
        let degrees: usize = (0..g.n()).map(|u| g.degree(u)).sum();
        prop_assert_eq!(degrees as u64, 2 * g.edge_count());
        let profile_total: usize = pg.degree_profile().iter().flatten().sum();
        prop_assert_eq!(profile_total, degrees);
    }

    #[test]
    fn blocks_and_slices_partition_the_edges(pg in pg_strategy()) {
        let r = pg.partition().num_blocks();
        let mut total = 0u64;
        for i in 0..r {
            let sub = pg.block_subgraph(i).unwrap();
            let off = pg.partition().offset(i);
            for u in 0..sub.n() {
                for v in u + 1..sub.n() {
                    prop_assert_eq!(sub.has_edge(u, v), pg.graph().has_edge(u + off, v + off));
                }
            }
            total += sub.edge_count();
            for j in i + 1..r {
                let slice = pg.cross_slice(i, j).unwrap();
                prop_assert_eq!(slice.len(), pg.partition().sizes()[i] * pg.partition().sizes()[j]);
                total += slice.iter().filter(|&&b| b).count() as u64;
            }
        }
        prop_assert_eq!(total, pg.graph().edge_count());
    }

    #[test]
    fn file_roundtrip(pg in pg_strategy()) {
        let mut buf = Vec::new();
        write_graph_to(&pg, &mut buf);
        let sizes = pg.partition().sizes();
        prop_assert_eq!(buf.len(), 4 + 1 + 8 + 2 + 8 * sizes.len() + pair_count(pg.n()).div_ceil(8) as usize);
        prop_assert_eq!(read_graph_from(&buf).unwrap(), pg);
    }

    #[test]
    fn normalized_membership_preserves_edges(n in 0usize..12, seed in any::<u64>(), labels in proptest::collection::vec(0usize..3, 12)) {
        let g = gen_er(n, 0.4, seed);
        let (pg, perm) = PartitionedGraph::from_membership(&g, &labels[..n]).unwrap();
        for (u, v) in g.edges() {
            prop_assert!(pg.graph().has_edge(perm[u], perm[v]));
        }
        prop_assert_eq!(pg.graph().edge_count(), g.edge_count());
        for u in 0..n {
            for w in 0..n {
                if labels[u] < labels[w] {
                    prop_assert!(perm[u] < perm[w]);
                }
            }
        }
    }
}

#[test]
fn degenerate_samplers() {
    let full = gen_sbm(&SbmParams::planted(vec![3, 3], 1.0, 1.0).unwrap(), 1);
    assert_eq!(full.graph().edge_count(), 15);
    let empty = gen_sbm(&SbmParams::planted(vec![3, 3], 0.0, 0.0).unwrap(), 1);
    assert_eq!(empty.graph().edge_count(), 0);
    assert_eq!(gen_er(4, 1.0, 5), LabeledGraph::complete(4));
    assert_eq!(gen_er(0, 0.5, 5).n(), 0);
    assert_eq!(gen_er(100, 0.5, 42), gen_er(100, 0.5, 42));
    assert_ne!(gen_er(100, 0.5, 42), gen_er(100, 0.5, 43));
}

#[test]
fn sbm_edge_counts_within_four_sigma() {
    let params = SbmParams::planted(vec![500, 500], 0.3, 0.05).unwrap();
    let intra_pairs = 2.0 * pair_count(500) as f64;
    let inter_pairs = 250_000.0f64;
    let (mi, si) = (intra_pairs * 0.3, (intra_pairs * 0.3 * 0.7).sqrt());
    let (mx, sx) = (inter_pairs * 0.05, (inter_pairs * 0.05 * 0.95).sqrt());
    for seed in 0..100 {
        let counts = gen_sbm(&params, seed).block_edge_counts();
        let intra = (counts[0][0] + counts[1][1]) as f64;
        let inter = counts[0][1] as f64;
        assert!((intra - mi).abs() <= 4.0 * si, "seed {seed}: intra {intra}");
        assert!((inter - mx).abs() <= 4.0 * sx, "seed {seed}: inter {inter}");
    }
}

#[test]
fn file_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.pgrf");
    let pg = gen_sbm(&SbmParams::planted(vec![7, 9, 4], 0.4, 0.1).unwrap(), 3);
    write_graph(&pg, &path).unwrap();
    assert_eq!(read_graph(&path).unwrap(), pg);
    let empty = PartitionedGraph::new(LabeledGraph::empty(0), Partition::new(vec![0]).unwrap()).unwrap();
    write_graph(&empty, &path).unwrap();
    assert_eq!(read_graph(&path).unwrap(), empty);
    assert!(read_graph(dir.path().join("missing")).is_err());
}
