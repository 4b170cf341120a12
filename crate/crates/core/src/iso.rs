//! Partition-respecting isomorphism and automorphism search.
//!
//! Exhaustive backtracking over part-preserving bijections, pruned by a
//! colour refinement that starts from block membership (so the first round
//! is exactly the per-block degree profile). Intended for small graphs; the
//! codec never calls into this module.

use std::collections::BTreeMap;

use crate::graph::{LabeledGraph, PartitionedGraph};

/// Stable colouring of the disjoint union `a + b`; returns the colours of
/// `a`'s vertices followed by `b`'s.
fn refine_colors(a: &PartitionedGraph, b: &PartitionedGraph) -> Vec<u32> {
    let (na, nb) = (a.n(), b.n());
    let neighbors: Vec<Vec<usize>> = a
        .graph()
        .neighbors_lists()
        .into_iter()
        .chain(b.graph().neighbors_lists().into_iter().map(|l| l.into_iter().map(|v| v + na).collect()))
        .collect();
    let mut colors: Vec<u32> = a
        .partition()
        .membership()
        .into_iter()
        .chain(b.partition().membership())
        .map(|c| c as u32)
        .collect();
    let mut classes = count_distinct(&colors);
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..na + nb)
            .map(|v| {
                let mut s: Vec<u32> = neighbors[v].iter().map(|&w| colors[w]).collect();
                s.sort_unstable();
                (colors[v], s)
            })
            .collect();
        let mut ids = BTreeMap::new();
        for s in &sigs {
            let next = ids.len() as u32;
            ids.entry(s).or_insert(next);
        }
        let next: Vec<u32> = sigs.iter().map(|s| ids[s]).collect();
        let next_classes = ids.len();
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

fn count_distinct(c: &[u32]) -> usize {
    let mut v = c.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

impl LabeledGraph {
    fn neighbors_lists(&self) -> Vec<Vec<usize>> {
        let mut lists = vec![Vec::new(); self.n()];
        for (u, v) in self.edges() {
            lists[u].push(v);
            lists[v].push(u);
        }
        lists
    }
}

struct Search<'a> {
    a: &'a LabeledGraph,
    b: &'a LabeledGraph,
    color_a: Vec<u32>,
    color_b: Vec<u32>,
    order: Vec<usize>,
}

impl<'a> Search<'a> {
    /// `None` if the colour histograms differ (no isomorphism can exist).
    fn new(a: &'a PartitionedGraph, b: &'a PartitionedGraph) -> Option<Self> {
        if a.partition() != b.partition() {
            return None;
        }
        let colors = refine_colors(a, b);
        let (ca, cb) = colors.split_at(a.n());
        let mut ha = ca.to_vec();
        let mut hb = cb.to_vec();
        ha.sort_unstable();
        hb.sort_unstable();
        if ha != hb {
            return None;
        }
        let mut class_size = BTreeMap::new();
        for &c in ca {
            *class_size.entry(c).or_insert(0usize) += 1;
        }
        let mut order: Vec<usize> = (0..a.n()).collect();
        order.sort_by_key(|&v| (class_size[&ca[v]], ca[v], v));
        Some(Self {
            a: a.graph(),
            b: b.graph(),
            color_a: ca.to_vec(),
            color_b: cb.to_vec(),
            order,
        })
    }

    fn discrete(&self) -> bool {
        count_distinct(&self.color_a) == self.color_a.len()
    }

    fn consistent(&self, image: &[usize], placed: &[usize], x: usize, y: usize) -> bool {
        self.color_a[x] == self.color_b[y]
            && placed
                .iter()
                .all(|&x2| self.a.has_edge(x, x2) == self.b.has_edge(y, image[x2]))
    }

    /// Finds an isomorphism honouring the `forced` pairs `(x, y)`.
    fn find(&self, forced: &[(usize, usize)]) -> Option<Vec<usize>> {
        let n = self.order.len();
        let mut image = vec![usize::MAX; n];
        let mut used = vec![false; n];
        let mut placed = Vec::with_capacity(n);
        for &(x, y) in forced {
            if used[y] || image[x] != usize::MAX || !self.consistent(&image, &placed, x, y) {
                return None;
            }
            image[x] = y;
            used[y] = true;
            placed.push(x);
        }
        let rest: Vec<usize> = self.order.iter().copied().filter(|&x| image[x] == usize::MAX).collect();
        self.extend(&rest, &mut image, &mut used, &mut placed).then_some(image)
    }

    fn extend(&self, rest: &[usize], image: &mut [usize], used: &mut [bool], placed: &mut Vec<usize>) -> bool {
        let Some((&x, tail)) = rest.split_first() else {
            return true;
        };
        for y in 0..image.len() {
            if used[y] || !self.consistent(image, placed, x, y) {
                continue;
            }
            image[x] = y;
            used[y] = true;
            placed.push(x);
            if self.extend(tail, image, used, placed) {
                return true;
            }
            placed.pop();
            used[y] = false;
            image[x] = usize::MAX;
        }
        false
    }

    /// Candidates `y` for `order[i]` that extend the pointwise stabilizer of
    /// `order[..i]` to an automorphism.
    fn orbit_in_stabilizer(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let x = self.order[i];
        let fixed: Vec<(usize, usize)> = self.order[..i].iter().map(|&v| (v, v)).collect();
        (0..self.order.len()).filter(move |&y| {
            if self.color_a[x] != self.color_b[y] {
                return false;
            }
            let mut forced = fixed.clone();
            forced.push((x, y));
            self.find(&forced).is_some()
        })
    }
}

/// A part-preserving isomorphism `a -> b` as `map[v_a] = v_b`, if one exists.
pub fn find_isomorphism(a: &PartitionedGraph, b: &PartitionedGraph) -> Option<Vec<usize>> {
    Search::new(a, b)?.find(&[])
}

pub fn are_isomorphic(a: &PartitionedGraph, b: &PartitionedGraph) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Order of the part-preserving automorphism group, via the stabilizer
/// chain `|Aut| = prod_i |orbit of v_i in Aut_(v_1..v_{i-1})|`.
pub fn count_automorphisms(pg: &PartitionedGraph) -> u128 {
    let s = Search::new(pg, pg).expect("a graph is isomorphic to itself");
    if s.discrete() {
        return 1;
    }
    (0..pg.n()).map(|i| s.orbit_in_stabilizer(i).count() as u128).product()
}

/// Whether any part-preserving automorphism other than the identity exists.
pub fn has_nontrivial_automorphism(pg: &PartitionedGraph) -> bool {
    let s = Search::new(pg, pg).expect("a graph is isomorphic to itself");
    if s.discrete() {
        return false;
    }
    (0..pg.n()).any(|i| {
        let x = s.order[i];
        s.orbit_in_stabilizer(i).any(|y| y != x)
    })
}

/// Plain (single-block) automorphism group order.
pub fn count_graph_automorphisms(g: &LabeledGraph) -> u128 {
    let pg = PartitionedGraph::new(g.clone(), crate::graph::Partition::single(g.n())).unwrap();
    count_automorphisms(&pg)
}
