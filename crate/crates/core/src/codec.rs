//! File header: an 8-byte little-endian length followed by the shapes block.
//!
//! ```text
//! 07 00 00 00 00 00 00 00 | 02 | 00 | 02 03 02 01 03
//! desc_len                | n  | shape 0 | shape 1 ...
//! ```
//!
//! `desc_len` counts the shapes block: the constructor count byte plus
//! every encoded description. Constructor names are not stored.
//!
//! Descriptions use a prefix code: `00` none, `01` byte, `02 l r` product,
//! `03` recursive position.

use crate::desc::{Desc, Schema};
use crate::error::{Result, WireError};

const NONE: u8 = 0x00;
const BYTE: u8 = 0x01;
const PROD: u8 = 0x02;
const REC: u8 = 0x03;

/// Width of the length prefix and of every offset.
pub const WORD: usize = 8;

/// Decoding refuses descriptions nested deeper than this.
pub const MAX_DESC_DEPTH: usize = 512;

/// A decoded header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub desc_len: u64,
    pub shapes: Vec<Desc>,
}

impl Header {
    /// Bytes before the tree block.
    pub fn data_start(&self) -> usize {
        WORD + self.desc_len as usize
    }
}

pub fn encode_desc(d: &Desc) -> Vec<u8> {
    let mut out = Vec::new();
    encode_desc_into(d, &mut out);
    out
}

fn encode_desc_into(d: &Desc, out: &mut Vec<u8>) {
    match d {
        Desc::None => out.push(NONE),
        Desc::Byte => out.push(BYTE),
        Desc::Rec => out.push(REC),
        Desc::Prod(l, r) => {
            out.push(PROD);
            encode_desc_into(l, out);
            encode_desc_into(r, out);
        }
    }
}

/// Decodes one description starting at `pos`; returns it with the
/// position just past it.
pub fn decode_desc(bytes: &[u8], pos: usize) -> Result<(Desc, usize)> {
    decode_desc_bounded(bytes, pos, bytes.len(), 0)
}

fn decode_desc_bounded(bytes: &[u8], pos: usize, end: usize, depth: usize) -> Result<(Desc, usize)> {
    if depth >= MAX_DESC_DEPTH {
        return Err(WireError::BadDescTag { pos, code: PROD });
    }
    let code = match bytes.get(pos) {
        Some(&c) if pos < end => c,
        _ => return Err(WireError::TruncatedBuffer { pos, needed: 1, end }),
    };
    match code {
        NONE => Ok((Desc::None, pos + 1)),
        BYTE => Ok((Desc::Byte, pos + 1)),
        REC => Ok((Desc::Rec, pos + 1)),
        PROD => {
            let (l, next) = decode_desc_bounded(bytes, pos + 1, end, depth + 1)?;
            let (r, next) = decode_desc_bounded(bytes, next, end, depth + 1)?;
            Ok((Desc::prod(l, r), next))
        }
        code => Err(WireError::BadDescTag { pos, code }),
    }
}

/// The shapes block: count byte followed by each shape.
pub fn encode_shapes(s: &Schema) -> Vec<u8> {
    let mut out = vec![s.len() as u8];
    for shape in s.shapes() {
        encode_desc_into(shape, &mut out);
    }
    out
}

/// Length prefix plus shapes block. `s` must have passed validation.
pub fn encode_header(s: &Schema) -> Vec<u8> {
    let shapes = encode_shapes(s);
    let mut out = Vec::with_capacity(WORD + shapes.len());
    out.extend_from_slice(&(shapes.len() as u64).to_le_bytes());
    out.extend_from_slice(&shapes);
    out
}

/// Decodes the header at the start of `bytes`; returns it with the
/// position of the first tree byte.
pub fn decode_header(bytes: &[u8]) -> Result<(Header, usize)> {
    let prefix: [u8; WORD] = bytes.get(..WORD).and_then(|p| p.try_into().ok()).ok_or(WireError::TruncatedBuffer {
        pos: 0,
        needed: WORD,
        end: bytes.len(),
    })?;
    let desc_len = u64::from_le_bytes(prefix);
    let declared_end = usize::try_from(desc_len).ok().and_then(|n| n.checked_add(WORD)).unwrap_or(usize::MAX);
    let end = declared_end.min(bytes.len());

    let count = match bytes.get(WORD) {
        Some(&c) if WORD < end => c,
        _ => return Err(WireError::TruncatedBuffer { pos: WORD, needed: 1, end }),
    };
    let mut pos = WORD + 1;
    let mut shapes = Vec::with_capacity(usize::from(count));
    for _ in 0..count {
        let (d, next) = decode_desc_bounded(bytes, pos, end, 0)?;
        shapes.push(d);
        pos = next;
    }
    let actual = (pos - WORD) as u64;
    if actual != desc_len {
        return Err(WireError::TrailingGarbageInHeader { declared: desc_len, actual });
    }
    Ok((Header { desc_len, shapes }, pos))
}

/// Checks that the stored shapes are exactly those of `expected`.
pub fn check_compat(expected: &Schema, h: &Header) -> Result<()> {
    if expected.len() == h.shapes.len() && expected.shapes().eq(h.shapes.iter()) {
        return Ok(());
    }
    let mut found = vec![h.shapes.len() as u8];
    for d in &h.shapes {
        encode_desc_into(d, &mut found);
    }
    Err(WireError::SchemaMismatch { expected: encode_shapes(expected), found })
}
