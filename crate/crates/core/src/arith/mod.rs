//! Deterministic binary arithmetic coding with Bernoulli and binomial models.
//!
//! Probabilities are 32-bit fixed point ([`FixedProb`]) and all interval
//! arithmetic is integer, so encoder and decoder agree bit for bit on every
//! platform. Streams are raw MSB-first bit sequences without an end marker:
//! the decoder must be driven with the same model sequence as the encoder.

mod bits;
mod coder;
mod prob;

use thiserror::Error;

pub use bits::{BitSink, BitSource, Bitstream, OVERREAD_ALLOWANCE};
pub use coder::{ArithDecoder, ArithEncoder};
pub use prob::{binomial_cumulative, binomial_weights, FixedProb, MAX_BINOMIAL_TRIALS, PROB_ONE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("bit source exhausted")]
    Exhausted,
    #[error("symbol has zero probability under its model")]
    ImpossibleSymbol,
    #[error("count {k} exceeds {m} trials")]
    CountOutOfRange { k: usize, m: usize },
    #[error("degenerate model has no coding table")]
    DegenerateModel,
    #[error("binomial model with {0} trials is out of range")]
    ModelTooLarge(usize),
    #[error("malformed bitstream: {0}")]
    Malformed(String),
}
