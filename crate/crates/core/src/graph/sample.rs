use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LabeledGraph, PartitionedGraph, SbmParams};

/// Edge-coin source for the samplers.
///
/// Backed by ChaCha8 seeded with `seed_from_u64(seed)`. Exactly one 64-bit
/// word is drawn per vertex pair, in row-major pair order (`(0,1), (0,2),
/// ..., (1,2), ...`), so pair `k` always consumes stream word `k` regardless
/// of the probabilities involved. A pair is an edge iff its word is below
/// the threshold of its probability.
pub struct PairSampler {
    rng: ChaCha8Rng,
}

impl PairSampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Threshold `t` such that `P(word < t) = p` up to `2^-64`. `None` means
    /// always present.
    pub fn threshold(p: f64) -> Option<u64> {
        if p >= 1.0 {
            None
        } else if p <= 0.0 {
            Some(0)
        } else {
            // exact power-of-two scaling, saturating cast
            Some((p * 18_446_744_073_709_551_616.0) as u64)
        }
    }

    #[inline]
    pub fn draw(&mut self, threshold: Option<u64>) -> bool {
        let word = self.rng.next_u64();
        match threshold {
            None => true,
            Some(t) => word < t,
        }
    }
}

/// Samples a graph from the stochastic block model.
pub fn gen_sbm(params: &SbmParams, seed: u64) -> PartitionedGraph {
    let part = params.partition().clone();
    let n = part.n();
    let r = part.num_blocks();
    let member = part.membership();
    let thresholds: Vec<Option<u64>> = params.matrix().iter().map(|&p| PairSampler::threshold(p)).collect();
    let mut sampler = PairSampler::new(seed);
    let mut g = LabeledGraph::empty(n);
    let mut k = 0u64;
    for u in 0..n {
        let row = member[u] * r;
        for &bv in &member[u + 1..] {
            if sampler.draw(thresholds[row + bv]) {
                g.adj[(k >> 3) as usize] |= 1 << (k & 7);
            }
            k += 1;
        }
    }
    PartitionedGraph::new(g, part).expect("sizes agree by construction")
}

/// Samples `G(n, p)`; identical to [`gen_sbm`] with a single block.
pub fn gen_er(n: usize, p: f64, seed: u64) -> LabeledGraph {
    let params = SbmParams::erdos_renyi(n, p.clamp(0.0, 1.0)).expect("one block with clamped p");
    gen_sbm(&params, seed).into_parts().0
}
