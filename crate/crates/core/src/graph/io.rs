//! PGRF graph files.
//!
//! ```text
//! "PGRF" | version u8 = 1 | n u64 | r u16 | r x size u64 | ceil(C(n,2)/8) adjacency bytes
//! ```
//! Integers are little-endian; adjacency bit `k` is pair `k` in row-major
//! order, LSB first within each byte.

use std::fs;
use std::path::Path;

use super::{pair_count, GraphError, LabeledGraph, Partition, PartitionedGraph};

pub const PGRF_MAGIC: [u8; 4] = *b"PGRF";
pub const PGRF_VERSION: u8 = 1;

pub fn write_graph_to(pg: &PartitionedGraph, out: &mut Vec<u8>) {
    let sizes = pg.partition().sizes();
    out.extend_from_slice(&PGRF_MAGIC);
    out.push(PGRF_VERSION);
    out.extend_from_slice(&(pg.n() as u64).to_le_bytes());
    out.extend_from_slice(&(sizes.len() as u16).to_le_bytes());
    for &s in sizes {
        out.extend_from_slice(&(s as u64).to_le_bytes());
    }
    out.extend_from_slice(pg.graph().packed());
}

pub fn write_graph(pg: &PartitionedGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let mut buf = Vec::new();
    write_graph_to(pg, &mut buf);
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<PartitionedGraph, GraphError> {
    read_graph_from(&fs::read(path)?)
}

pub fn read_graph_from(bytes: &[u8]) -> Result<PartitionedGraph, GraphError> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != PGRF_MAGIC {
        return Err(GraphError::Format("bad magic".into()));
    }
    let version = cur.take(1)?[0];
    if version != PGRF_VERSION {
        return Err(GraphError::Format(format!("unsupported version {version}")));
    }
    let n = cur.u64()?;
    if n > 1 << 32 {
        return Err(GraphError::Format(format!("vertex count {n} too large")));
    }
    let r = cur.u16()? as usize;
    let mut sizes = Vec::with_capacity(r);
    let mut total = 0u64;
    for _ in 0..r {
        let s = cur.u64()?;
        total = total.checked_add(s).ok_or_else(|| GraphError::Format("block sizes overflow".into()))?;
        sizes.push(s as usize);
    }
    if total != n {
        return Err(GraphError::Format(format!("block sizes sum to {total}, header says n={n}")));
    }
    let n = n as usize;
    let partition = Partition::new(sizes).map_err(|e| GraphError::Format(e.to_string()))?;
    let adj_len = pair_count(n).div_ceil(8) as usize;
    let adj = cur.take(adj_len)?.to_vec();
    if cur.pos != bytes.len() {
        return Err(GraphError::Format(format!("{} trailing bytes", bytes.len() - cur.pos)));
    }
    let graph = LabeledGraph::from_packed(n, adj).map_err(|e| GraphError::Format(e.to_string()))?;
    PartitionedGraph::new(graph, partition)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], GraphError> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| GraphError::Format("truncated file".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64, GraphError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u16(&mut self) -> Result<u16, GraphError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
}
