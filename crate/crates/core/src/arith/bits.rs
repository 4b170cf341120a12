use super::ArithError;

/// Bits the decoder may read past the end of a stream; they read as zero.
/// The encoder trims at most this many trailing zero bits, so a valid stream
/// never needs more.
pub const OVERREAD_ALLOWANCE: u64 = 64;

/// A finished MSB-first bit sequence, zero-padded to whole bytes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Bitstream {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl Bitstream {
    /// Fails if `bytes` is not exactly `ceil(bit_len / 8)` long or a pad bit is set.
    pub fn from_parts(bytes: Vec<u8>, bit_len: u64) -> Result<Self, ArithError> {
        if bytes.len() as u64 != bit_len.div_ceil(8) {
            return Err(ArithError::Malformed(format!(
                "{} bytes cannot hold exactly {bit_len} bits",
                bytes.len()
            )));
        }
        let tail = (bit_len % 8) as u32;
        if tail != 0 && bytes[bytes.len() - 1] & (0xFF >> tail) != 0 {
            return Err(ArithError::Malformed("nonzero pad bits".into()));
        }
        Ok(Self { bytes, bit_len })
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit(&self, k: u64) -> bool {
        assert!(k < self.bit_len);
        (self.bytes[(k >> 3) as usize] >> (7 - (k & 7))) & 1 == 1
    }
}

/// Growable MSB-first bit buffer.
#[derive(Clone, Debug, Default)]
pub struct BitSink {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn push_bit(&mut self, bit: bool) {
        let off = (self.bit_len & 7) as u32;
        if off == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> off;
        }
        self.bit_len += 1;
    }

    pub fn push_byte(&mut self, byte: u8) {
        let off = (self.bit_len & 7) as u32;
        if off == 0 {
            self.bytes.push(byte);
        } else {
            *self.bytes.last_mut().unwrap() |= byte >> off;
            self.bytes.push(byte << (8 - off));
        }
        self.bit_len += 8;
    }

    /// Drops up to `max_bits` trailing zero bits.
    pub fn trim_trailing_zeros(&mut self, max_bits: u64) {
        let floor = self.bit_len.saturating_sub(max_bits);
        let mut len = self.bit_len;
        while len > floor && !self.bit_at(len - 1) {
            len -= 1;
        }
        self.bit_len = len;
        self.bytes.truncate(len.div_ceil(8) as usize);
    }

    fn bit_at(&self, k: u64) -> bool {
        self.bytes[(k >> 3) as usize] >> (7 - (k & 7)) & 1 == 1
    }

    pub fn finish(self) -> Bitstream {
        let mut bytes = self.bytes;
        bytes.truncate(self.bit_len.div_ceil(8) as usize);
        let tail = (self.bit_len % 8) as u32;
        if tail != 0 {
            let last = bytes.last_mut().unwrap();
            *last &= !(0xFFu8 >> tail);
        }
        Bitstream { bytes, bit_len: self.bit_len }
    }
}

/// Reader over a [`Bitstream`]; yields zeros for up to
/// [`OVERREAD_ALLOWANCE`] bits past the end, then reports exhaustion.
#[derive(Clone, Debug)]
pub struct BitSource<'a> {
    stream: &'a Bitstream,
    pos: u64,
}

impl<'a> BitSource<'a> {
    pub fn new(stream: &'a Bitstream) -> Self {
        Self { stream, pos: 0 }
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool, ArithError> {
        let len = self.stream.bit_len;
        let bit = if self.pos < len {
            self.stream.bit(self.pos)
        } else if self.pos < len + OVERREAD_ALLOWANCE {
            false
        } else {
            return Err(ArithError::Exhausted);
        };
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_byte(&mut self) -> Result<u8, ArithError> {
        if self.pos & 7 == 0 && self.pos + 8 <= self.stream.bit_len {
            let b = self.stream.bytes[(self.pos >> 3) as usize];
            self.pos += 8;
            return Ok(b);
        }
        let mut b = 0u8;
        for _ in 0..8 {
            b = (b << 1) | self.read_bit()? as u8;
        }
        Ok(b)
    }
}
