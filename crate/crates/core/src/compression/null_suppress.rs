//! Null suppression: leading zero bytes of each value are dropped.
//!
//! Values go in groups of four. Each group starts with a tag byte holding
//! four 2-bit width codes, first value in the low bits:
//! `0` = zero (no bytes), `1` = one byte, `2` = two bytes, `3` = a length
//! byte (3..=8) followed by that many bytes. Value bytes are the
//! little-endian two's-complement representation with high zero bytes
//! removed, so negative numbers always take the long form. Unused codes in
//! the last group are 0.

use super::{CodecError, ColumnData, ColumnVector, Codec, EncodedColumn};

fn significant_bytes(u: u64) -> usize {
    8 - (u.leading_zeros() / 8) as usize
}

pub fn null_suppress_encode(v: &ColumnVector) -> Result<EncodedColumn, CodecError> {
    let ColumnData::Int(values) = &v.data else {
        return Err(CodecError::NotInteger { codec: "null_suppress" });
    };
    let mut payload = Vec::with_capacity(values.len() * 2);
    for group in values.chunks(4) {
        let tag_at = payload.len();
        payload.push(0u8);
        let mut tag = 0u8;
        for (i, &x) in group.iter().enumerate() {
            let u = x as u64;
            let n = significant_bytes(u);
            let code = match n {
                0..=2 => n as u8,
                _ => 3,
            };
            tag |= code << (2 * i);
            if code == 3 {
                payload.push(n as u8);
            }
            payload.extend_from_slice(&u.to_le_bytes()[..n]);
        }
        payload[tag_at] = tag;
    }
    Ok(EncodedColumn {
        codec: Codec::NullSuppress,
        kind: v.kind,
        original_len: values.len() as u64,
        run_count: None,
        payload,
    })
}

pub fn null_suppress_decode(e: &EncodedColumn) -> Result<ColumnVector, CodecError> {
    if e.codec != Codec::NullSuppress {
        return Err(CodecError::WrongCodec {
            expected: "null_suppress",
            got: e.codec.name(),
        });
    }
    let p = &e.payload;
    let corrupt = |m: &str| CodecError::Corrupt(m.to_string());
    let mut out = Vec::with_capacity(e.original_len as usize);
    let mut pos = 0;
    while (out.len() as u64) < e.original_len {
        let tag = *p.get(pos).ok_or_else(|| corrupt("missing tag byte"))?;
        pos += 1;
        let in_group = (e.original_len - out.len() as u64).min(4) as usize;
        for i in 0..in_group {
            let n = match (tag >> (2 * i)) & 3 {
                3 => {
                    let n = *p.get(pos).ok_or_else(|| corrupt("missing length byte"))? as usize;
                    pos += 1;
                    if !(3..=8).contains(&n) {
                        return Err(corrupt("long value length outside 3..=8"));
                    }
                    n
                }
                c => c as usize,
            };
            let bytes = p.get(pos..pos + n).ok_or_else(|| corrupt("truncated value"))?;
            let mut le = [0u8; 8];
            le[..n].copy_from_slice(bytes);
            out.push(u64::from_le_bytes(le) as i64);
            pos += n;
        }
    }
    if pos != p.len() {
        return Err(corrupt("trailing bytes"));
    }
    Ok(ColumnVector::new(e.kind, ColumnData::Int(out)))
}
