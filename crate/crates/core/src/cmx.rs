//! CMX: the binary interchange format for compatibility tensors.
//!
//! ```text
//! offset size  field
//! 0      4     magic "CMX1"
//! 4      2     version (u16 LE) = 1
//! 6      4     n (u32 LE)
//! 10     1     relation_count (4 or 16)
//! 11     1     puzzle_type (1 or 2)
//! 12     1     flags: bit0 normalized, bit1 symmetric
//! 13     3     reserved, zero
//! 16     ...   n * relation_count * n f32 LE, anchor-major, then relation, then candidate
//! ```
//!
//! Type-1 relations are indexed by anchor edge; Type-2 by `4 * anchor + candidate`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::model::{CompatibilityTensor, PuzzleType};

pub const MAGIC: [u8; 4] = *b"CMX1";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;

const FLAG_NORMALIZED: u8 = 1;
const FLAG_SYMMETRIC: u8 = 2;

#[derive(Debug, Error)]
pub enum CmxError {
    #[error("not a CMX file")]
    BadMagic,
    #[error("unsupported CMX version {0}")]
    UnsupportedVersion(u16),
    #[error("short header")]
    ShortHeader,
    #[error("short payload")]
    ShortPayload,
    #[error("trailing bytes after payload")]
    TrailingBytes,
    #[error("inconsistent header: {0}")]
    BadHeader(String),
    #[error("score at index {0} is NaN")]
    NaN(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CmxHeader {
    pub version: u16,
    pub n: u32,
    pub relation_count: u8,
    pub puzzle_type: u8,
    pub flags: u8,
}

impl CmxHeader {
    pub fn for_tensor(t: &CompatibilityTensor) -> Self {
        let mut flags = 0;
        if t.normalized {
            flags |= FLAG_NORMALIZED;
        }
        if t.symmetric {
            flags |= FLAG_SYMMETRIC;
        }
        CmxHeader {
            version: VERSION,
            n: t.n() as u32,
            relation_count: t.relation_count() as u8,
            puzzle_type: t.puzzle_type().code(),
            flags,
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4..6].copy_from_slice(&self.version.to_le_bytes());
        b[6..10].copy_from_slice(&self.n.to_le_bytes());
        b[10] = self.relation_count;
        b[11] = self.puzzle_type;
        b[12] = self.flags;
        b
    }

    pub fn parse(b: &[u8]) -> std::result::Result<Self, CmxError> {
        if b.len() < 4 || b[0..4] != MAGIC {
            return Err(CmxError::BadMagic);
        }
        if b.len() < HEADER_LEN {
            return Err(CmxError::ShortHeader);
        }
        let version = u16::from_le_bytes([b[4], b[5]]);
        if version != VERSION {
            return Err(CmxError::UnsupportedVersion(version));
        }
        let h = CmxHeader {
            version,
            n: u32::from_le_bytes([b[6], b[7], b[8], b[9]]),
            relation_count: b[10],
            puzzle_type: b[11],
            flags: b[12],
        };
        let pt = h.puzzle_type()?;
        if pt.relation_count() != h.relation_count as usize {
            return Err(CmxError::BadHeader(format!(
                "type {} puzzles have {} relations, header says {}",
                h.puzzle_type,
                pt.relation_count(),
                h.relation_count
            )));
        }
        if b[13..16] != [0, 0, 0] {
            return Err(CmxError::BadHeader("reserved bytes not zero".into()));
        }
        Ok(h)
    }

    pub fn puzzle_type(&self) -> std::result::Result<PuzzleType, CmxError> {
        PuzzleType::try_from(self.puzzle_type).map_err(CmxError::BadHeader)
    }

    pub fn payload_len(&self) -> usize {
        4 * self.n as usize * self.n as usize * self.relation_count as usize
    }
}

/// Total file size for a tensor of `n` pieces.
pub fn file_len(n: usize, relation_count: usize) -> usize {
    HEADER_LEN + 4 * n * n * relation_count
}

pub fn encode(t: &CompatibilityTensor) -> std::result::Result<Vec<u8>, CmxError> {
    if let Some(i) = t.scores().iter().position(|v| v.is_nan()) {
        return Err(CmxError::NaN(i));
    }
    let mut out = Vec::with_capacity(file_len(t.n(), t.relation_count()));
    out.extend_from_slice(&CmxHeader::for_tensor(t).to_bytes());
    for v in t.scores() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> std::result::Result<CompatibilityTensor, CmxError> {
    let h = CmxHeader::parse(bytes)?;
    let payload = &bytes[HEADER_LEN..];
    let want = h.payload_len();
    if payload.len() < want {
        return Err(CmxError::ShortPayload);
    }
    if payload.len() > want {
        return Err(CmxError::TrailingBytes);
    }
    let scores = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let mut t = CompatibilityTensor::from_scores(h.n as usize, h.puzzle_type()?, scores)
        .map_err(|e| CmxError::BadHeader(e.to_string()))?;
    t.normalized = h.flags & FLAG_NORMALIZED != 0;
    t.symmetric = h.flags & FLAG_SYMMETRIC != 0;
    Ok(t)
}

/// Writes `t` to `w`, returning the byte count.
pub fn write_cmx<W: Write>(
    t: &CompatibilityTensor,
    mut w: W,
) -> std::result::Result<usize, CmxError> {
    let bytes = encode(t)?;
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(bytes.len())
}

pub fn read_cmx<R: Read>(mut r: R) -> std::result::Result<CompatibilityTensor, CmxError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn save(t: &CompatibilityTensor, path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_cmx(t, BufWriter::new(f)).map_err(|e| match e {
        CmxError::Io(io) => Error::io(path, io),
        other => other.into(),
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<CompatibilityTensor> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_cmx(BufReader::new(f)).map_err(|e| match e {
        CmxError::Io(io) => Error::io(path, io),
        other => other.into(),
    })
}
