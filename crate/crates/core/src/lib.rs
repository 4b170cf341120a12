//! Lossless compression of partitioned graph structures drawn from
//! stochastic block models, plus exact and closed-form analysis of their
//! partitioned structural entropy.
//!
//! The codec pipeline is:
//!
//! 1. each block's induced subgraph is coded up to isomorphism by the
//!    peeling codec in [`szip`], which also reports the labeling the decoder
//!    will reconstruct;
//! 2. the cross-block adjacency bits are arithmetic-coded under those
//!    labelings ([`codec`]).
//!
//! Decoding runs the block decoders independently and then installs the
//! cross bits, reproducing the input up to a relabeling inside each block.

pub mod arith;
pub mod codec;
pub mod entropy;
pub mod graph;
pub mod iso;
pub mod szip;

pub use arith::{ArithDecoder, ArithEncoder, ArithError, Bitstream, FixedProb};
pub use codec::{sbm_decode, sbm_encode, Codeword, CodecError, QuantizedModel};
pub use graph::{gen_er, gen_sbm, GraphError, LabeledGraph, Partition, PartitionedGraph, SbmParams};
