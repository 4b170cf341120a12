use std::collections::HashMap;

use super::bits::{BitSink, BitSource, Bitstream, OVERREAD_ALLOWANCE};
use super::prob::{binomial_cumulative, FixedProb, PROB_ONE};
use super::ArithError;

// The coding interval is tracked in a 56-bit window: `range` stays in
// [2^48, 2^56] between symbols, `low` carries one overflow bit above the window.
const WINDOW_BYTES: u32 = 7;
const TOP: u64 = 1 << 56;
const BOTTOM: u64 = 1 << 48;

#[inline]
fn scale(range: u64, units: u64) -> u64 {
    ((range as u128 * units as u128) >> 32) as u64
}

/// Memoized cumulative tables keyed by `(prob, m)`.
#[derive(Default, Debug)]
struct BinomialTables {
    tables: HashMap<(FixedProb, usize), Vec<u64>>,
}

impl BinomialTables {
    fn get(&mut self, m: usize, prob: FixedProb) -> Result<&[u64], ArithError> {
        use std::collections::hash_map::Entry;
        match self.tables.entry((prob, m)) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(binomial_cumulative(m, prob)?)),
        }
    }
}

/// Binary arithmetic (range) encoder with byte-wise renormalization and
/// carry propagation.
#[derive(Debug)]
pub struct ArithEncoder {
    low: u64,
    range: u64,
    cache: Option<u8>,
    pending: u64,
    sink: BitSink,
    tables: BinomialTables,
}

impl Default for ArithEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl ArithEncoder {
    pub fn new() -> Self {
        Self {
            low: 0,
            range: TOP,
            cache: None,
            pending: 0,
            sink: BitSink::new(),
            tables: BinomialTables::default(),
        }
    }

    /// Narrows the interval to `[lo, hi)` out of `2^32` units.
    fn encode_units(&mut self, lo: u64, hi: u64) {
        debug_assert!(lo < hi && hi <= PROB_ONE);
        let r_lo = scale(self.range, lo);
        let r_hi = scale(self.range, hi);
        self.low += r_lo;
        self.range = r_hi - r_lo;
        while self.range < BOTTOM {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF << 48 || self.low >= TOP {
            let carry = (self.low >> 56) as u8;
            if let Some(c) = self.cache {
                self.sink.push_byte(c.wrapping_add(carry));
            }
            for _ in 0..self.pending {
                self.sink.push_byte(0xFFu8.wrapping_add(carry));
            }
            self.pending = 0;
            self.cache = Some((self.low >> 48) as u8);
        } else {
            self.pending += 1;
        }
        self.low = (self.low & (BOTTOM - 1)) << 8;
    }

    /// Codes one bit with `P(bit = 1) = prob1`. Bit 0 takes the lower part
    /// of the interval.
    pub fn encode_bernoulli(&mut self, bit: bool, prob1: FixedProb) -> Result<(), ArithError> {
        match prob1.units() {
            0 if bit => Err(ArithError::ImpossibleSymbol),
            PROB_ONE if !bit => Err(ArithError::ImpossibleSymbol),
            0 | PROB_ONE => Ok(()),
            p1 => {
                let split = PROB_ONE - p1;
                if bit {
                    self.encode_units(split, PROB_ONE);
                } else {
                    self.encode_units(0, split);
                }
                Ok(())
            }
        }
    }

    /// Codes a count `k` out of `m` trials against `Binomial(m, prob)`.
    /// One trial is exactly [`encode_bernoulli`](Self::encode_bernoulli).
    pub fn encode_binomial(&mut self, k: usize, m: usize, prob: FixedProb) -> Result<(), ArithError> {
        if k > m {
            return Err(ArithError::CountOutOfRange { k, m });
        }
        if m == 1 {
            return self.encode_bernoulli(k == 1, prob);
        }
        match forced_count(m, prob) {
            Some(forced) if forced == k => return Ok(()),
            Some(_) => return Err(ArithError::ImpossibleSymbol),
            None => {}
        }
        let cum = self.tables.get(m, prob)?;
        let (lo, hi) = (cum[k], cum[k + 1]);
        self.encode_units(lo, hi);
        Ok(())
    }

    /// Flushes the interval and returns the stream.
    ///
    /// Picks the value in the final interval with the most trailing zero
    /// bits, emits it, then drops trailing zero bits up to the decoder's
    /// overread allowance; the decoder reads missing bits as zero.
    pub fn finish(mut self) -> Bitstream {
        let hi = self.low + self.range;
        let mut v = self.low;
        for s in (0..=57u32).rev() {
            let mask = (1u64 << s) - 1;
            let cand = (self.low + mask) & !mask;
            if cand < hi {
                v = cand;
                break;
            }
        }
        self.low = v;
        for _ in 0..=WINDOW_BYTES {
            self.shift_low();
        }
        self.sink.trim_trailing_zeros(OVERREAD_ALLOWANCE);
        self.sink.finish()
    }
}

fn forced_count(m: usize, prob: FixedProb) -> Option<usize> {
    match prob.units() {
        0 => Some(0),
        PROB_ONE => Some(m),
        _ if m == 0 => Some(0),
        _ => None,
    }
}

/// Mirror of [`ArithEncoder`]. Must be driven with the same model sequence.
#[derive(Debug)]
pub struct ArithDecoder<'a> {
    code: u64,
    range: u64,
    src: BitSource<'a>,
    tables: BinomialTables,
}

impl<'a> ArithDecoder<'a> {
    pub fn new(stream: &'a Bitstream) -> Result<Self, ArithError> {
        let mut src = BitSource::new(stream);
        let mut code = 0u64;
        for _ in 0..WINDOW_BYTES {
            code = (code << 8) | src.read_byte()? as u64;
        }
        Ok(Self {
            code,
            range: TOP,
            src,
            tables: BinomialTables::default(),
        })
    }

    /// Bits consumed so far, including the read-ahead window.
    pub fn bits_read(&self) -> u64 {
        self.src.position()
    }

    fn narrow(&mut self, r_lo: u64, r_hi: u64) -> Result<(), ArithError> {
        self.code -= r_lo;
        self.range = r_hi - r_lo;
        while self.range < BOTTOM {
            self.code = (self.code << 8) | self.src.read_byte()? as u64;
            self.range <<= 8;
        }
        Ok(())
    }

    pub fn decode_bernoulli(&mut self, prob1: FixedProb) -> Result<bool, ArithError> {
        match prob1.units() {
            0 => Ok(false),
            PROB_ONE => Ok(true),
            p1 => {
                let bound = scale(self.range, PROB_ONE - p1);
                if self.code < bound {
                    self.narrow(0, bound)?;
                    Ok(false)
                } else {
                    let range = self.range;
                    self.narrow(bound, range)?;
                    Ok(true)
                }
            }
        }
    }

    pub fn decode_binomial(&mut self, m: usize, prob: FixedProb) -> Result<usize, ArithError> {
        if m == 1 {
            return self.decode_bernoulli(prob).map(usize::from);
        }
        if let Some(forced) = forced_count(m, prob) {
            return Ok(forced);
        }
        let (range, code) = (self.range, self.code);
        let cum = self.tables.get(m, prob)?;
        // largest k with scale(range, cum[k]) <= code
        let k = cum[1..=m].partition_point(|&c| scale(range, c) <= code);
        let (r_lo, r_hi) = (scale(range, cum[k]), scale(range, cum[k + 1]));
        self.narrow(r_lo, r_hi)?;
        Ok(k)
    }
}
