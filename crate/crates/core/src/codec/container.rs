//! SBMZ container.
//!
//! ```text
//! "SBMZ" | version u8 = 1 | n u64 | r u16 | r x size u64 | model flag u8
//! flag 0: p u32, q u32
//! flag 1: r(r+1)/2 x u32, upper triangle with diagonal, row-major
//! r x (bit length u64 | ceil(len/8) bytes)     block streams
//! bit length u64 | ceil(len/8) bytes           cross stream
//! ```
//! Integers are little-endian; probabilities use the raw [`FixedProb`] encoding.

use std::fs;
use std::path::Path;

use super::{CodecError, Codeword, QuantizedModel};
use crate::arith::{Bitstream, FixedProb};
use crate::graph::Partition;

pub const SBMZ_MAGIC: [u8; 4] = *b"SBMZ";
pub const SBMZ_VERSION: u8 = 1;

const FLAG_PLANTED: u8 = 0;
const FLAG_MATRIX: u8 = 1;

pub fn write_codeword_to(cw: &Codeword, out: &mut Vec<u8>) {
    let sizes = cw.partition.sizes();
    out.extend_from_slice(&SBMZ_MAGIC);
    out.push(SBMZ_VERSION);
    out.extend_from_slice(&(cw.n() as u64).to_le_bytes());
    out.extend_from_slice(&(sizes.len() as u16).to_le_bytes());
    for &s in sizes {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    match cw.model.as_planted() {
        Some((p, q)) => {
            out.push(FLAG_PLANTED);
            out.extend_from_slice(&p.raw().to_le_bytes());
            out.extend_from_slice(&q.raw().to_le_bytes());
        }
        None => {
            out.push(FLAG_MATRIX);
            for prob in cw.model.upper() {
                out.extend_from_slice(&prob.raw().to_le_bytes());
            }
        }
    }
    for s in cw.blocks.iter().chain(std::iter::once(&cw.cross)) {
        out.extend_from_slice(&s.bit_len().to_le_bytes());
        out.extend_from_slice(s.bytes());
    }
}

pub fn write_codeword(cw: &Codeword, path: impl AsRef<Path>) -> Result<(), CodecError> {
    let mut buf = Vec::new();
    write_codeword_to(cw, &mut buf);
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_codeword(path: impl AsRef<Path>) -> Result<Codeword, CodecError> {
    read_codeword_from(&fs::read(path)?)
}

pub fn read_codeword_from(bytes: &[u8]) -> Result<Codeword, CodecError> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != SBMZ_MAGIC {
        return Err(format_err("bad magic"));
    }
    let version = cur.u8()?;
    if version != SBMZ_VERSION {
        return Err(format_err(format!("unsupported version {version}")));
    }
    let n = cur.u64()?;
    let r = cur.u16()? as usize;
    let mut sizes = Vec::with_capacity(r);
    let mut total = 0u64;
    for _ in 0..r {
        let s = cur.u64()?;
        total = total.checked_add(s).ok_or_else(|| format_err("block sizes overflow"))?;
        sizes.push(s as usize);
    }
    if total != n {
        return Err(format_err(format!("block sizes sum to {total}, header says n={n}")));
    }
    let partition = Partition::new(sizes).map_err(|e| format_err(e.to_string()))?;
    let model = match cur.u8()? {
        FLAG_PLANTED => {
            let p = FixedProb::from_raw(cur.u32()?);
            let q = FixedProb::from_raw(cur.u32()?);
            QuantizedModel::planted(r, p, q)
        }
        FLAG_MATRIX => {
            let upper = (0..r * (r + 1) / 2)
                .map(|_| cur.u32().map(FixedProb::from_raw))
                .collect::<Result<_, _>>()?;
            QuantizedModel::from_upper(r, upper)?
        }
        other => return Err(format_err(format!("unknown model flag {other}"))),
    };
    let mut streams = Vec::with_capacity(r + 1);
    for _ in 0..=r {
        let bit_len = cur.u64()?;
        let len = usize::try_from(bit_len.div_ceil(8)).map_err(|_| format_err("stream too long"))?;
        let data = cur.take(len)?.to_vec();
        streams.push(Bitstream::from_parts(data, bit_len).map_err(|e| format_err(e.to_string()))?);
    }
    if cur.pos != bytes.len() {
        return Err(format_err(format!("{} trailing bytes", bytes.len() - cur.pos)));
    }
    let cross = streams.pop().expect("r + 1 streams");
    Ok(Codeword {
        partition,
        model,
        blocks: streams,
        cross,
    })
}

fn format_err(msg: impl Into<String>) -> CodecError {
    CodecError::Format(msg.into())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], CodecError> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format_err("truncated codeword"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
