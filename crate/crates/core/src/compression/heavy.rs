//! Heavy general-purpose codec hook, backed by LZ4 when the `lz4` feature is
//! on. Input is the plain serialization: 8 little-endian bytes per number,
//! or per text a u32 length then the bytes.

use super::{CodecError, ColumnData, ColumnKind, ColumnVector, Codec, EncodedColumn};

pub fn plain_bytes(v: &ColumnVector) -> Vec<u8> {
    let mut out = Vec::new();
    match &v.data {
        ColumnData::Int(x) => x.iter().for_each(|n| out.extend_from_slice(&n.to_le_bytes())),
        ColumnData::Text(x) => {
            for s in x {
                out.extend_from_slice(&(s.len() as u32).to_le_bytes());
                out.extend_from_slice(s.as_bytes());
            }
        }
    }
    out
}

fn from_plain(kind: ColumnKind, bytes: &[u8], len: u64) -> Result<ColumnVector, CodecError> {
    let corrupt = |m: &str| CodecError::Corrupt(m.to_string());
    let data = match kind {
        ColumnKind::Text => {
            let mut v = Vec::with_capacity(len as usize);
            let mut pos = 0;
            while pos < bytes.len() {
                let n = bytes.get(pos..pos + 4).ok_or_else(|| corrupt("truncated length"))?;
                let n = u32::from_le_bytes(n.try_into().expect("4 bytes")) as usize;
                pos += 4;
                let s = bytes.get(pos..pos + n).ok_or_else(|| corrupt("truncated text"))?;
                v.push(String::from_utf8(s.to_vec()).map_err(|e| CodecError::Corrupt(e.to_string()))?);
                pos += n;
            }
            ColumnData::Text(v)
        }
        _ => {
            if bytes.len() % 8 != 0 {
                return Err(corrupt("length not a multiple of 8"));
            }
            ColumnData::Int(
                bytes
                    .chunks_exact(8)
                    .map(|c| i64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect(),
            )
        }
    };
    if data.len() as u64 != len {
        return Err(corrupt("value count differs from header"));
    }
    Ok(ColumnVector::new(kind, data))
}

#[cfg(feature = "lz4")]
pub fn heavy_encode(v: &ColumnVector) -> Result<EncodedColumn, CodecError> {
    Ok(EncodedColumn {
        codec: Codec::Heavy,
        kind: v.kind,
        original_len: v.len() as u64,
        run_count: None,
        payload: lz4_flex::compress_prepend_size(&plain_bytes(v)),
    })
}

#[cfg(feature = "lz4")]
pub fn heavy_decode(e: &EncodedColumn) -> Result<ColumnVector, CodecError> {
    if e.codec != Codec::Heavy {
        return Err(CodecError::WrongCodec {
            expected: "heavy",
            got: e.codec.name(),
        });
    }
    let bytes = lz4_flex::decompress_size_prepended(&e.payload).map_err(|err| CodecError::Corrupt(err.to_string()))?;
    from_plain(e.kind, &bytes, e.original_len)
}

#[cfg(not(feature = "lz4"))]
pub fn heavy_encode(_: &ColumnVector) -> Result<EncodedColumn, CodecError> {
    Err(CodecError::Unavailable("heavy"))
}

#[cfg(not(feature = "lz4"))]
pub fn heavy_decode(_: &EncodedColumn) -> Result<ColumnVector, CodecError> {
    Err(CodecError::Unavailable("heavy"))
}

pub fn heavy_available() -> bool {
    cfg!(feature = "lz4")
}

#[cfg(all(test, feature = "lz4"))]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let v = ColumnVector::ints((0..1000).map(|i| i % 7).collect());
        let e = heavy_encode(&v).unwrap();
        assert!(e.payload.len() < 8000 / 4);
        assert_eq!(heavy_decode(&e).unwrap(), v);
        let t = ColumnVector::texts(vec!["AMERICA".into(), "ASIA".into(), String::new()]);
        assert_eq!(heavy_decode(&heavy_encode(&t).unwrap()).unwrap(), t);
    }
}
