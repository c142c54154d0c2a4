//! On-disk container for one encoded column: a 16-byte header, then the
//! payload.
//!
//! | offset | size | field                                             |
//! |--------|------|---------------------------------------------------|
//! | 0      | 2    | magic `SB` (0x53 0x42)                            |
//! | 2      | 1    | codec id: 1 rle, 2 null_suppress, 3 heavy         |
//! | 3      | 1    | type: 0 integer, 1 text, 0x80 + scale for decimal |
//! | 4      | 4    | original value count, u32 LE                      |
//! | 8      | 4    | payload length in bytes, u32 LE                   |
//! | 12     | 4    | CRC-32 (IEEE) of the payload, u32 LE              |

use super::rle::count_runs;
use super::{Codec, CodecError, ColumnKind, EncodedColumn};

pub const HEADER_LEN: usize = 16;
pub const MAGIC: [u8; 2] = *b"SB";

fn type_byte(k: ColumnKind) -> u8 {
    match k {
        ColumnKind::Integer => 0,
        ColumnKind::Text => 1,
        ColumnKind::Decimal(s) => 0x80 | (s & 0x7f),
    }
}

fn kind_of(b: u8) -> Option<ColumnKind> {
    match b {
        0 => Some(ColumnKind::Integer),
        1 => Some(ColumnKind::Text),
        b if b & 0x80 != 0 => Some(ColumnKind::Decimal(b & 0x7f)),
        _ => None,
    }
}

pub fn write_container(e: &EncodedColumn) -> Result<Vec<u8>, CodecError> {
    let too_big = |what: &str| CodecError::Corrupt(format!("{what} exceeds u32"));
    let len = u32::try_from(e.original_len).map_err(|_| too_big("value count"))?;
    let plen = u32::try_from(e.payload.len()).map_err(|_| too_big("payload"))?;
    let mut out = Vec::with_capacity(HEADER_LEN + e.payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(e.codec.id());
    out.push(type_byte(e.kind));
    out.extend_from_slice(&len.to_le_bytes());
    out.extend_from_slice(&plen.to_le_bytes());
    out.extend_from_slice(&crc32fast::hash(&e.payload).to_le_bytes());
    out.extend_from_slice(&e.payload);
    Ok(out)
}

pub fn read_container(bytes: &[u8]) -> Result<EncodedColumn, CodecError> {
    let corrupt = |m: String| CodecError::Corrupt(m);
    if bytes.len() < HEADER_LEN {
        return Err(corrupt(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if bytes[..2] != MAGIC {
        return Err(corrupt("bad magic".into()));
    }
    let codec = Codec::from_id(bytes[2]).ok_or_else(|| corrupt(format!("unknown codec id {}", bytes[2])))?;
    let kind = kind_of(bytes[3]).ok_or_else(|| corrupt(format!("unknown type byte {}", bytes[3])))?;
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let original_len = u64::from(u32_at(4));
    let plen = u32_at(8) as usize;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != plen {
        return Err(corrupt(format!("payload is {} bytes, header says {plen}", payload.len())));
    }
    if crc32fast::hash(payload) != u32_at(12) {
        return Err(corrupt("checksum mismatch".into()));
    }
    let mut e = EncodedColumn {
        codec,
        kind,
        original_len,
        run_count: None,
        payload: payload.to_vec(),
    };
    if codec == Codec::Rle {
        e.run_count = Some(count_runs(&e)?);
    }
    Ok(e)
}
