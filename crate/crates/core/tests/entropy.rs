use std::collections::BTreeMap;

use sbmz_core::entropy::{
    binary_entropy, exact_structural_entropy, graph_entropy, identity_check_eq3, log2_factorial, n_of_s,
    structural_entropy_leading, symmetry_rate, typicality_statistic, Asymmetry,
};
use sbmz_core::graph::{gen_sbm, pair_count, pair_from_index, LabeledGraph, PartitionedGraph, SbmParams};

/// Independent enumeration: every vertex permutation is tried and kept if
/// it preserves blocks; probabilities are plain products.
struct Brute {
    classes: BTreeMap<u32, (f64, u64)>,
    h_graph: f64,
}

fn brute(params: &SbmParams) -> Brute {
    let n = params.n();
    let member = params.partition().membership();
    let pairs: Vec<(usize, usize)> = (0..pair_count(n)).map(|k| pair_from_index(n, k)).collect();
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    permute(&mut p, 0, &mut |perm| {
        if (0..n).all(|v| member[perm[v]] == member[v]) {
            perms.push(perm.to_vec());
        }
    });
    let index = |u: usize, v: usize| pairs.iter().position(|&e| e == (u.min(v), u.max(v))).unwrap();
    let maps: Vec<Vec<usize>> = perms.iter().map(|perm| pairs.iter().map(|&(u, v)| index(perm[u], perm[v])).collect()).collect();
    let mut classes: BTreeMap<u32, (f64, u64)> = BTreeMap::new();
    let mut h_graph = 0.0;
    for mask in 0..1u32 << pairs.len() {
        let prob: f64 = pairs
            .iter()
            .enumerate()
            .map(|(k, &(u, v))| {
                let q = params.prob(member[u], member[v]);
                if mask >> k & 1 == 1 { q } else { 1.0 - q }
            })
            .product();
        if prob > 0.0 {
            h_graph -= prob * prob.log2();
        }
        let canon = maps
            .iter()
            .map(|m| (0..pairs.len()).filter(|&k| mask >> k & 1 == 1).fold(0u32, |acc, k| acc | 1 << m[k]))
            .min()
            .unwrap();
        let e = classes.entry(canon).or_insert((0.0, 0));
        e.0 += prob;
        e.1 += 1;
    }
    Brute { classes, h_graph }
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

#[test]
fn oracle_agrees_with_independent_enumeration() {
    let cases = [
        (vec![2, 2], 0.5, 0.5),
        (vec![2, 2], 0.3, 0.05),
        (vec![4], 0.3, 0.3),
        (vec![1, 3], 0.9, 0.1),
        (vec![2, 1, 2], 0.3, 0.5),
        (vec![3, 2], 0.1, 0.9),
    ];
    for (sizes, p, q) in cases {
        let params = SbmParams::planted(sizes.clone(), p, q).unwrap();
        let exact = exact_structural_entropy(&params).unwrap();
        let b = brute(&params);
        assert_eq!(exact.classes, b.classes.len(), "{sizes:?}");
        let h_struct: f64 = b.classes.values().filter(|c| c.0 > 0.0).map(|c| -c.0 * c.0.log2()).sum();
        let p_log_n: f64 = b.classes.values().map(|c| c.0 * (c.1 as f64).log2()).sum();
        assert!((exact.h_struct - h_struct).abs() < 1e-9, "{sizes:?}");
        assert!((exact.sum_p_log_n - p_log_n).abs() < 1e-9, "{sizes:?}");
        assert!((exact.h_graph_enumerated - b.h_graph).abs() < 1e-9, "{sizes:?}");
        for s in &exact.structures {
            let (prob, count) = b.classes[&s.canonical];
            assert_eq!(s.n_of_s, count);
            assert!((s.probability - prob).abs() < 1e-12);
            // P(S) = N(S) P(G)
            assert!((s.n_of_s as f64 * s.log2_prob_graph.exp2() - prob).abs() < 1e-12);
        }
    }
}

#[test]
fn identity_holds_on_a_grid() {
    for n in 2..=5 {
        for sizes in compositions(n) {
            for &p in &[0.1, 0.5, 0.9] {
                for &q in &[0.3, 0.9] {
                    let params = SbmParams::planted(sizes.clone(), p, q).unwrap();
                    let exact = exact_structural_entropy(&params).unwrap();
                    assert!(exact.residual() <= 1e-9, "{sizes:?} {p} {q}: {}", exact.residual());
                    assert!((exact.total_probability - 1.0).abs() < 1e-12);
                    let savings: f64 = sizes.iter().map(|&s| log2_factorial(s)).sum();
                    let hg = graph_entropy(&params);
                    assert!(exact.h_struct <= hg + 1e-9 && exact.h_struct >= hg - savings - 1e-9);
                    assert!(exact.sum_p_log_n_per_part <= exact.sum_p_log_n + 1e-12);
                }
            }
        }
    }
    assert!(identity_check_eq3(&SbmParams::planted(vec![3, 3], 0.3, 0.05).unwrap()).unwrap() <= 1e-9);
}

#[test]
fn one_block_matches_unpartitioned_forms() {
    let params = SbmParams::erdos_renyi(4, 0.3).unwrap();
    let exact = exact_structural_entropy(&params).unwrap();
    assert_eq!(exact.classes, 11);
    let b = brute(&params);
    let h: f64 = b.classes.values().map(|c| -c.0 * c.0.log2()).sum();
    assert!((exact.h_struct - h).abs() < 1e-12);
    let rep = structural_entropy_leading(&params);
    assert!((rep.h_struct_leading - (6.0 * binary_entropy(0.3) - log2_factorial(4))).abs() < 1e-12);
}

#[test]
fn n_of_s_examples() {
    let part = sbmz_core::graph::Partition::new(vec![2, 2]).unwrap();
    let pg = |edges: &[(usize, usize)]| {
        PartitionedGraph::new(LabeledGraph::from_edges(4, edges.iter().copied()), part.clone()).unwrap()
    };
    assert_eq!(n_of_s(&pg(&[(0, 1)])).unwrap(), 1);
    assert_eq!(n_of_s(&pg(&[(0, 2)])).unwrap(), 4);
    assert_eq!(n_of_s(&pg(&[])).unwrap(), 1);
}

#[test]
fn typicality_rates() {
    let eps = 0.05;
    for n in [100usize, 200] {
        let params = SbmParams::planted(vec![n / 2, n / 2], 0.3, 0.05).unwrap();
        let pass = (0..100)
            .filter(|&s| {
                let rep = typicality_statistic(&gen_sbm(&params, s), &params);
                assert_eq!(rep.asymmetry, Asymmetry::Assumed);
                rep.is_typical(eps)
            })
            .count();
        assert!(pass as f64 >= 100.0 * (1.0 - 4.0 * eps), "n={n}: {pass}");
    }
}

#[test]
fn symmetry_rate_trivial_cases() {
    assert_eq!(symmetry_rate(1, 0.3, 20, 0).unwrap(), 0.0);
    assert_eq!(symmetry_rate(2, 0.5, 20, 0).unwrap(), 1.0);
    let r = symmetry_rate(8, 0.5, 200, 0).unwrap();
    assert!(r > 0.0 && r < 1.0);
}
