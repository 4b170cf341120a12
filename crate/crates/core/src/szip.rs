//! Structural (unlabeled) graph codec.
//!
//! The encoder peels vertices one at a time while refining an ordered
//! partition of the remaining vertices into cells:
//!
//! 1. start with one cell holding every vertex in input order;
//! 2. remove `v`, the first vertex of the first cell; for every remaining
//!    cell `C`, in order, code `|N(v) ∩ C|`: a single adjacency bit under
//!    `Bernoulli(p)` when `|C| = 1`, otherwise a count under
//!    `Binomial(|C|, p)`;
//! 3. split each cell into `(C ∩ N(v), C \ N(v))`, both in their previous
//!    order, dropping empty parts, and repeat until no vertex is left.
//!
//! Vertices in one cell have identical adjacency to every vertex removed so
//! far, so only the counts matter. The decoder replays the same refinement
//! over placeholder slots `0..n`, declaring the first `k` slots of a cell to
//! be the neighbours; its cells are therefore always contiguous slot ranges
//! and slot `i` is the vertex removed at step `i`. The encoder keeps its
//! cells in the same array layout, so the vertex at array position `i` when
//! step `i` starts is exactly the vertex the decoder calls `i`.

use std::ops::Range;

use crate::arith::{ArithDecoder, ArithEncoder, ArithError, Bitstream, FixedProb};
use crate::graph::LabeledGraph;

/// Bijection from input vertex ids to the decoder's canonical ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMap {
    to_canonical: Vec<usize>,
}

impl CanonicalMap {
    pub fn len(&self) -> usize {
        self.to_canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_canonical.is_empty()
    }

    pub fn canonical(&self, v: usize) -> usize {
        self.to_canonical[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.to_canonical
    }

    /// `inverse()[c]` is the input vertex that receives canonical id `c`.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for (v, &c) in self.to_canonical.iter().enumerate() {
            inv[c] = v;
        }
        inv
    }
}

pub fn szip_encode(g: &LabeledGraph, model_p: FixedProb) -> Result<Bitstream, ArithError> {
    szip_encode_with_map(g, model_p).map(|(bits, _)| bits)
}

/// Encodes `g` and returns the labeling under which [`szip_decode`] will
/// reproduce it: `g.relabel(map) == szip_decode(bits)`.
pub fn szip_encode_with_map(g: &LabeledGraph, model_p: FixedProb) -> Result<(Bitstream, CanonicalMap), ArithError> {
    let n = g.n();
    let mut enc = ArithEncoder::new();
    // order[pos] = input vertex currently paired with decoder slot `pos`
    let mut order: Vec<usize> = (0..n).collect();
    let mut cells: Vec<Range<usize>> = if n > 0 { vec![0..n] } else { Vec::new() };
    let mut next = Vec::with_capacity(n);
    let mut outside = Vec::with_capacity(n);
    for step in 0..n {
        let v = order[step];
        next.clear();
        for cell in &cells {
            let start = cell.start.max(step + 1);
            let end = cell.end;
            if start >= end {
                continue;
            }
            if end - start == 1 {
                enc.encode_bernoulli(g.has_edge(v, order[start]), model_p)?;
                next.push(start..end);
                continue;
            }
            // stable split: neighbours first
            outside.clear();
            let mut k = 0;
            for pos in start..end {
                let w = order[pos];
                if g.has_edge(v, w) {
                    order[start + k] = w;
                    k += 1;
                } else {
                    outside.push(w);
                }
            }
            order[start + k..end].copy_from_slice(&outside);
            enc.encode_binomial(k, end - start, model_p)?;
            if k > 0 {
                next.push(start..start + k);
            }
            if start + k < end {
                next.push(start + k..end);
            }
        }
        std::mem::swap(&mut cells, &mut next);
    }
    let mut to_canonical = vec![0; n];
    for (slot, &v) in order.iter().enumerate() {
        to_canonical[v] = slot;
    }
    Ok((enc.finish(), CanonicalMap { to_canonical }))
}

/// Decodes an `n`-vertex graph isomorphic to the encoder's input.
pub fn szip_decode(bits: &Bitstream, n: usize, model_p: FixedProb) -> Result<LabeledGraph, ArithError> {
    let mut dec = ArithDecoder::new(bits)?;
    let mut g = LabeledGraph::empty(n);
    let mut cells: Vec<Range<usize>> = if n > 0 { vec![0..n] } else { Vec::new() };
    let mut next = Vec::with_capacity(n);
    for step in 0..n {
        next.clear();
        for cell in &cells {
            let start = cell.start.max(step + 1);
            let end = cell.end;
            if start >= end {
                continue;
            }
            if end - start == 1 {
                if dec.decode_bernoulli(model_p)? {
                    g.set_edge(step, start, true);
                }
                next.push(start..end);
                continue;
            }
            let k = dec.decode_binomial(end - start, model_p)?;
            for w in start..start + k {
                g.set_edge(step, w, true);
            }
            if k > 0 {
                next.push(start..start + k);
            }
            if start + k < end {
                next.push(start + k..end);
            }
        }
        std::mem::swap(&mut cells, &mut next);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_er;

    fn check(g: &LabeledGraph, p: FixedProb) -> Bitstream {
        let (bits, map) = szip_encode_with_map(g, p).unwrap();
        let decoded = szip_decode(&bits, g.n(), p).unwrap();
        assert_eq!(g.relabel(map.as_slice()), decoded);
        bits
    }

    #[test]
    fn empty_and_complete() {
        for n in 0..8 {
            let empty = LabeledGraph::empty(n);
            check(&empty, FixedProb::HALF);
            assert_eq!(szip_decode(&szip_encode(&empty, FixedProb::HALF).unwrap(), n, FixedProb::HALF).unwrap(), empty);
            let full = LabeledGraph::complete(n);
            assert_eq!(szip_decode(&szip_encode(&full, FixedProb::HALF).unwrap(), n, FixedProb::HALF).unwrap(), full);
        }
        assert_eq!(szip_encode(&LabeledGraph::empty(0), FixedProb::HALF).unwrap().bit_len(), 0);
    }

    #[test]
    fn single_edge_and_path() {
        let edge = LabeledGraph::from_edges(2, [(0, 1)]);
        let (_, map) = szip_encode_with_map(&edge, FixedProb::HALF).unwrap();
        assert!(map.as_slice() == [0, 1] || map.as_slice() == [1, 0]);
        check(&edge, FixedProb::HALF);
        // centre first and centre last
        check(&LabeledGraph::from_edges(3, [(0, 1), (0, 2)]), FixedProb::HALF);
        check(&LabeledGraph::from_edges(3, [(0, 1), (1, 2)]), FixedProb::HALF);
    }

    #[test]
    fn random_graphs_relabel_exactly() {
        for seed in 0..100 {
            check(&gen_er(50, 0.3, seed), FixedProb::quantize(0.3));
        }
    }

    #[test]
    fn degenerate_models() {
        let full = LabeledGraph::complete(6);
        let bits = check(&full, FixedProb::ONE);
        assert_eq!(bits.bit_len(), 0);
        assert!(szip_encode(&full, FixedProb::ZERO).is_err());
        assert_eq!(check(&LabeledGraph::empty(6), FixedProb::ZERO).bit_len(), 0);
    }

    #[test]
    fn reencode_is_a_fixed_point() {
        for seed in 0..20 {
            let g = gen_er(40, 0.2, seed);
            let p = FixedProb::quantize(0.2);
            let bits = szip_encode(&g, p).unwrap();
            let decoded = szip_decode(&bits, 40, p).unwrap();
            assert_eq!(szip_encode(&decoded, p).unwrap(), bits);
            assert_eq!(szip_decode(&bits, 40, p).unwrap(), decoded);
        }
    }
}
