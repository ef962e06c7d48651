//! Binary dataset files.
//!
//! All integers are little-endian.
//!
//! ```text
//! header   magic "CHRG" | version u16 | split u8 | order u8 | count u64 | seed u64
//! record   source_order u8 | chromatic u8 | clique u8 | edges u16 | adjacency
//! trailer  CRC-32 (IEEE) of all record bytes, u32
//! ```
//!
//! `adjacency` is the strict upper triangle of the matrix in row-major order,
//! `(0,1), (0,2), …, (0,N−1), (1,2), …`, packed eight entries per byte with
//! the first entry in the least significant bit, `ceil(N(N−1)/2 / 8)` bytes.
//! Split tags are 0 = train, 1 = valid, 2 = test.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Dataset, DatasetError, LabeledGraph, Split};
use crate::graph::Graph;

pub const MAGIC: &[u8; 4] = b"CHRG";
pub const FORMAT_VERSION: u16 = 1;
pub const HEADER_LEN: usize = 24;

/// Bytes of packed adjacency per record.
pub fn packed_len(order: usize) -> usize {
    (order * (order.saturating_sub(1)) / 2).div_ceil(8)
}

pub fn record_len(order: usize) -> usize {
    5 + packed_len(order)
}

pub fn pack_adjacency(g: &Graph) -> Vec<u8> {
    let n = g.order();
    let mut out = vec![0u8; packed_len(n)];
    let mut bit = 0usize;
    for i in 0..n {
        let row = g.neighbors(i);
        for j in i + 1..n {
            if row.contains(j) {
                out[bit >> 3] |= 1 << (bit & 7);
            }
            bit += 1;
        }
    }
    out
}

pub fn unpack_adjacency(order: usize, bytes: &[u8]) -> Result<Graph, String> {
    if bytes.len() != packed_len(order) {
        return Err(format!("expected {} adjacency bytes, got {}", packed_len(order), bytes.len()));
    }
    let mut edges = Vec::new();
    let mut bit = 0usize;
    for i in 0..order {
        for j in i + 1..order {
            if bytes[bit >> 3] & (1 << (bit & 7)) != 0 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    // Padding bits past the last pair must be zero.
    let total = order * order.saturating_sub(1) / 2;
    if !total.is_multiple_of(8) && bytes[total / 8] >> (total % 8) != 0 {
        return Err("non-zero padding bits in adjacency".into());
    }
    Graph::from_edges(order, &edges).map_err(|e| e.to_string())
}

/// Serializes `ds` into the binary format.
pub fn encode_dataset(ds: &Dataset) -> Result<Vec<u8>, DatasetError> {
    ds.validate()?;
    let mut out = Vec::with_capacity(HEADER_LEN + ds.len() * record_len(ds.order) + 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&ds.format_version.to_le_bytes());
    out.push(ds.split.tag());
    out.push(ds.order as u8);
    out.extend_from_slice(&(ds.len() as u64).to_le_bytes());
    out.extend_from_slice(&ds.seed.to_le_bytes());

    let body_start = out.len();
    for (index, r) in ds.records.iter().enumerate() {
        let narrow = |v: usize, what: &str| {
            u8::try_from(v).map_err(|_| DatasetError::InvalidRecord {
                index,
                reason: format!("{what} {v} does not fit in a byte"),
            })
        };
        out.push(narrow(r.source_order, "source order")?);
        out.push(narrow(r.chromatic, "chromatic number")?);
        out.push(narrow(r.clique, "clique number")?);
        out.extend_from_slice(&(r.edges as u16).to_le_bytes());
        out.extend_from_slice(&pack_adjacency(&r.graph));
    }
    let crc = crc32fast::hash(&out[body_start..]);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub fn decode_dataset(bytes: &[u8]) -> Result<Dataset, DatasetError> {
    if bytes.len() < HEADER_LEN {
        return Err(DatasetError::CorruptHeader(format!(
            "file is {} bytes, shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(DatasetError::CorruptHeader(format!("bad magic {:02x?}", &bytes[..4])));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != FORMAT_VERSION {
        return Err(DatasetError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let split = Split::from_tag(bytes[6]).ok_or_else(|| DatasetError::CorruptHeader(format!("unknown split tag {}", bytes[6])))?;
    let order = bytes[7] as usize;
    if order == 0 {
        return Err(DatasetError::CorruptHeader("order 0".into()));
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let seed = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));

    let rec_len = record_len(order);
    let expected = usize::try_from(count)
        .ok()
        .and_then(|c| c.checked_mul(rec_len))
        .and_then(|b| b.checked_add(HEADER_LEN + 4))
        .ok_or_else(|| DatasetError::CorruptHeader(format!("record count {count} is implausible")))?;
    if bytes.len() < expected {
        return Err(DatasetError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(DatasetError::TrailingBytes {
            extra: bytes.len() - expected,
        });
    }
    let body = &bytes[HEADER_LEN..expected - 4];
    let stored = u32::from_le_bytes(bytes[expected - 4..].try_into().expect("4 bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(DatasetError::ChecksumMismatch { stored, computed });
    }

    let records = body
        .chunks_exact(rec_len)
        .enumerate()
        .map(|(index, rec)| {
            let invalid = |reason: String| DatasetError::InvalidRecord { index, reason };
            let graph = unpack_adjacency(order, &rec[5..]).map_err(invalid)?;
            let r = LabeledGraph {
                graph,
                source_order: rec[0] as usize,
                chromatic: rec[1] as usize,
                clique: rec[2] as usize,
                edges: u16::from_le_bytes([rec[3], rec[4]]) as usize,
            };
            r.validate().map_err(invalid)?;
            Ok(r)
        })
        .collect::<Result<Vec<_>, DatasetError>>()?;

    Ok(Dataset {
        split,
        order,
        seed,
        format_version: version,
        records,
    })
}

pub fn write_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let bytes = encode_dataset(ds)?;
    let mut f = fs::File::create(path)?;
    f.write_all(&bytes)?;
    f.sync_all()?;
    Ok(())
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Dataset, DatasetError> {
    decode_dataset(&fs::read(path)?)
}
