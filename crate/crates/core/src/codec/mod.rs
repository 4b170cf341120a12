//! Cascade encoder and parallel decoder for partitioned graphs.
//!
//! Every block's induced subgraph goes through [`szip`](crate::szip); the
//! encoder also keeps the labeling each block decoder will produce and codes
//! the cross-block adjacency under those labelings, one Bernoulli bit per
//! vertex pair, all block pairs `(i, j)` in lexicographic order in a single
//! stream. The decoder decodes the block streams independently (in
//! parallel) and then installs the cross bits.

mod container;
mod verify;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{ArithDecoder, ArithEncoder, ArithError, Bitstream, FixedProb};
use crate::graph::{GraphError, LabeledGraph, Partition, PartitionedGraph, SbmParams};
use crate::szip::{szip_decode, szip_encode_with_map, CanonicalMap};

pub use container::{read_codeword, read_codeword_from, write_codeword, write_codeword_to, SBMZ_MAGIC, SBMZ_VERSION};
pub use verify::{verify_roundtrip, VerifyMethod, VerifyReport, EXACT_VERIFY_MAX_N};

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed codeword: {0}")]
    Format(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Symmetric block-pair probabilities in fixed point, stored as the upper
/// triangle with diagonal, row-major: `(0,0), (0,1), ..., (0,r-1), (1,1), ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuantizedModel {
    r: usize,
    upper: Vec<FixedProb>,
}

impl QuantizedModel {
    pub fn from_params(params: &SbmParams) -> Self {
        let r = params.num_blocks();
        let mut upper = Vec::with_capacity(r * (r + 1) / 2);
        for i in 0..r {
            for j in i..r {
                upper.push(FixedProb::quantize(params.prob(i, j)));
            }
        }
        Self { r, upper }
    }

    pub fn planted(r: usize, p: FixedProb, q: FixedProb) -> Self {
        let mut upper = Vec::with_capacity(r * (r + 1) / 2);
        for i in 0..r {
            for j in i..r {
                upper.push(if i == j { p } else { q });
            }
        }
        Self { r, upper }
    }

    pub fn from_upper(r: usize, upper: Vec<FixedProb>) -> Result<Self, CodecError> {
        if upper.len() != r * (r + 1) / 2 {
            return Err(CodecError::Format(format!("{} matrix entries for r={r}", upper.len())));
        }
        Ok(Self { r, upper })
    }

    pub fn num_blocks(&self) -> usize {
        self.r
    }

    pub fn upper(&self) -> &[FixedProb] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> FixedProb {
        let (i, j) = (i.min(j), i.max(j));
        // rows 0..i hold r + (r-1) + ... + (r-i+1) entries
        self.upper[i * self.r - i * (i.saturating_sub(1)) / 2 + (j - i)]
    }

    /// `(p, q)` when all diagonal entries agree and all off-diagonal entries
    /// agree; `q` is zero for a single block.
    pub fn as_planted(&self) -> Option<(FixedProb, FixedProb)> {
        let p = self.get(0, 0);
        let q = if self.r > 1 { self.get(0, 1) } else { FixedProb::ZERO };
        for i in 0..self.r {
            for j in i..self.r {
                if self.get(i, j) != if i == j { p } else { q } {
                    return None;
                }
            }
        }
        Some((p, q))
    }

    pub fn to_params(&self, sizes: Vec<usize>) -> Result<SbmParams, GraphError> {
        let r = self.r;
        let probs = (0..r * r).map(|k| self.get(k / r, k % r).to_f64()).collect();
        SbmParams::new(sizes, probs)
    }
}

/// Header plus `r` block streams and one cross stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub partition: Partition,
    pub model: QuantizedModel,
    pub blocks: Vec<Bitstream>,
    pub cross: Bitstream,
}

impl Codeword {
    pub fn n(&self) -> usize {
        self.partition.n()
    }

    /// Payload bits: the block streams plus the cross stream.
    pub fn payload_bits(&self) -> u64 {
        self.blocks.iter().map(Bitstream::bit_len).sum::<u64>() + self.cross.bit_len()
    }
}

pub fn sbm_encode(pg: &PartitionedGraph, params: &SbmParams) -> Result<Codeword, CodecError> {
    if params.partition() != pg.partition() {
        return Err(GraphError::SizeMismatch(format!(
            "graph blocks {:?} vs model blocks {:?}",
            pg.partition().sizes(),
            params.sizes()
        ))
        .into());
    }
    encode_with_model(pg, &QuantizedModel::from_params(params)).map(|(cw, _)| cw)
}

/// Encodes under an already quantized model and also returns each block's
/// canonical map, i.e. the labeling the decoder will reproduce.
pub fn encode_with_model(
    pg: &PartitionedGraph,
    model: &QuantizedModel,
) -> Result<(Codeword, Vec<CanonicalMap>), CodecError> {
    let part = pg.partition();
    let r = part.num_blocks();
    if model.num_blocks() != r {
        return Err(GraphError::SizeMismatch(format!("model has {} blocks, graph has {r}", model.num_blocks())).into());
    }
    let coded: Vec<(Bitstream, CanonicalMap)> = (0..r)
        .into_par_iter()
        .map(|i| -> Result<_, CodecError> {
            let sub = pg.block_subgraph(i)?;
            Ok(szip_encode_with_map(&sub, model.get(i, i))?)
        })
        .collect::<Result<_, _>>()?;
    let (blocks, maps): (Vec<_>, Vec<_>) = coded.into_iter().unzip();

    let inverse: Vec<Vec<usize>> = maps.iter().map(CanonicalMap::inverse).collect();
    let g = pg.graph();
    let mut enc = ArithEncoder::new();
    for i in 0..r {
        for j in i + 1..r {
            let prob = model.get(i, j);
            let (oi, oj) = (part.offset(i), part.offset(j));
            for &a in &inverse[i] {
                for &b in &inverse[j] {
                    enc.encode_bernoulli(g.has_edge(oi + a, oj + b), prob)?;
                }
            }
        }
    }
    let cw = Codeword {
        partition: part.clone(),
        model: model.clone(),
        blocks,
        cross: enc.finish(),
    };
    Ok((cw, maps))
}

/// Same as [`encode_with_model`] but quantizing `params`.
pub fn sbm_encode_with_maps(
    pg: &PartitionedGraph,
    params: &SbmParams,
) -> Result<(Codeword, Vec<CanonicalMap>), CodecError> {
    encode_with_model(pg, &QuantizedModel::from_params(params))
}

pub fn sbm_decode(cw: &Codeword) -> Result<PartitionedGraph, CodecError> {
    let part = &cw.partition;
    let r = part.num_blocks();
    if cw.blocks.len() != r || cw.model.num_blocks() != r {
        return Err(CodecError::Format("block count disagrees with header".into()));
    }
    let decoded: Vec<LabeledGraph> = (0..r)
        .into_par_iter()
        .map(|i| szip_decode(&cw.blocks[i], part.sizes()[i], cw.model.get(i, i)))
        .collect::<Result<_, _>>()?;

    let mut g = LabeledGraph::empty(part.n());
    for (i, sub) in decoded.iter().enumerate() {
        let off = part.offset(i);
        for (u, v) in sub.edges() {
            g.set_edge(off + u, off + v, true);
        }
    }
    let mut dec = ArithDecoder::new(&cw.cross)?;
    for i in 0..r {
        for j in i + 1..r {
            let prob = cw.model.get(i, j);
            for a in part.block(i) {
                for b in part.block(j) {
                    if dec.decode_bernoulli(prob)? {
                        g.set_edge(a, b, true);
                    }
                }
            }
        }
    }
    Ok(PartitionedGraph::new(g, part.clone())?)
}

/// Per-block maps in the form taken by [`PartitionedGraph::relabel_blocks`].
pub fn block_maps(maps: &[CanonicalMap]) -> Vec<Vec<usize>> {
    maps.iter().map(|m| m.as_slice().to_vec()).collect()
}
