//! Run-length encoding.
//!
//! Integer payload: per run, the value as i64 LE then the run length as
//! u64 LE (16 bytes a run). Text payload: per run, the byte length as
//! u32 LE, the UTF-8 bytes, then the run length as u64 LE.

use super::{CodecError, ColumnData, ColumnKind, ColumnVector, Codec, EncodedColumn};

fn read_u64(buf: &[u8], pos: &mut usize) -> Result<u64, CodecError> {
    let b = buf
        .get(*pos..*pos + 8)
        .ok_or_else(|| CodecError::Corrupt("truncated run".into()))?;
    *pos += 8;
    Ok(u64::from_le_bytes(b.try_into().expect("8 bytes")))
}

fn group<T: PartialEq>(v: &[T]) -> Vec<(&T, u64)> {
    let mut out: Vec<(&T, u64)> = Vec::new();
    for x in v {
        match out.last_mut() {
            Some((last, n)) if *last == x => *n += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

pub fn rle_encode(v: &ColumnVector) -> EncodedColumn {
    let mut payload = Vec::new();
    let run_count = match &v.data {
        ColumnData::Int(x) => {
            let g = group(x);
            for (value, n) in &g {
                payload.extend_from_slice(&value.to_le_bytes());
                payload.extend_from_slice(&n.to_le_bytes());
            }
            g.len()
        }
        ColumnData::Text(x) => {
            let g = group(x);
            for (value, n) in &g {
                payload.extend_from_slice(&(value.len() as u32).to_le_bytes());
                payload.extend_from_slice(value.as_bytes());
                payload.extend_from_slice(&n.to_le_bytes());
            }
            g.len()
        }
    };
    EncodedColumn {
        codec: Codec::Rle,
        kind: v.kind,
        original_len: v.len() as u64,
        run_count: Some(run_count as u64),
        payload,
    }
}

fn expect_rle(e: &EncodedColumn) -> Result<(), CodecError> {
    if e.codec != Codec::Rle {
        return Err(CodecError::WrongCodec {
            expected: "rle",
            got: e.codec.name(),
        });
    }
    Ok(())
}

/// Streams `(value, run length)` pairs of an integer RLE payload.
pub struct IntRuns<'a> {
    payload: &'a [u8],
    pos: usize,
}

impl Iterator for IntRuns<'_> {
    type Item = Result<(i64, u64), CodecError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos == self.payload.len() {
            return None;
        }
        let run = read_u64(self.payload, &mut self.pos)
            .and_then(|v| Ok((v as i64, read_u64(self.payload, &mut self.pos)?)));
        if run.is_err() {
            self.pos = self.payload.len();
        }
        Some(run)
    }
}

/// Integer runs without decoding the column.
pub fn runs(e: &EncodedColumn) -> Result<IntRuns<'_>, CodecError> {
    expect_rle(e)?;
    if e.kind == ColumnKind::Text {
        return Err(CodecError::NotNumeric);
    }
    Ok(IntRuns {
        payload: &e.payload,
        pos: 0,
    })
}

fn text_runs(e: &EncodedColumn) -> Result<Vec<(String, u64)>, CodecError> {
    let p = &e.payload;
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < p.len() {
        let len = p
            .get(pos..pos + 4)
            .map(|b| u32::from_le_bytes(b.try_into().expect("4 bytes")) as usize)
            .ok_or_else(|| CodecError::Corrupt("truncated run length".into()))?;
        pos += 4;
        let bytes = p
            .get(pos..pos + len)
            .ok_or_else(|| CodecError::Corrupt("truncated run text".into()))?;
        let s = String::from_utf8(bytes.to_vec()).map_err(|e| CodecError::Corrupt(e.to_string()))?;
        pos += len;
        out.push((s, read_u64(p, &mut pos)?));
    }
    Ok(out)
}

/// Number of runs in an RLE payload.
pub(crate) fn count_runs(e: &EncodedColumn) -> Result<u64, CodecError> {
    match e.kind {
        ColumnKind::Text => Ok(text_runs(e)?.len() as u64),
        _ => runs(e)?.try_fold(0u64, |n, r| r.map(|_| n + 1)),
    }
}

pub fn rle_decode(e: &EncodedColumn) -> Result<ColumnVector, CodecError> {
    expect_rle(e)?;
    let data = match e.kind {
        ColumnKind::Text => {
            let mut v = Vec::with_capacity(e.original_len as usize);
            for (s, n) in text_runs(e)? {
                v.extend(std::iter::repeat_n(s, n as usize));
            }
            ColumnData::Text(v)
        }
        _ => {
            let mut v = Vec::with_capacity(e.original_len as usize);
            for r in runs(e)? {
                let (x, n) = r?;
                v.extend(std::iter::repeat_n(x, n as usize));
            }
            ColumnData::Int(v)
        }
    };
    if data.len() as u64 != e.original_len {
        return Err(CodecError::Corrupt(format!(
            "runs cover {} values, header says {}",
            data.len(),
            e.original_len
        )));
    }
    Ok(ColumnVector::new(e.kind, data))
}

/// Σ value × run length, read straight off the runs.
pub fn sum_on_compressed(e: &EncodedColumn) -> Result<i128, CodecError> {
    let mut total = 0i128;
    for r in runs(e)? {
        let (x, n) = r?;
        total += i128::from(x) * i128::from(n);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_runs(e: &EncodedColumn) -> Vec<(i64, u64)> {
        runs(e).unwrap().map(Result::unwrap).collect()
    }

    #[test]
    fn examples() {
        let e = rle_encode(&ColumnVector::ints(vec![5, 5, 5, 5]));
        assert_eq!(int_runs(&e), vec![(5, 4)]);
        assert_eq!(sum_on_compressed(&e).unwrap(), 20);
        let e = rle_encode(&ColumnVector::ints(vec![1, 2, 3]));
        assert_eq!(int_runs(&e), vec![(1, 1), (2, 1), (3, 1)]);
        assert_eq!(sum_on_compressed(&rle_encode(&ColumnVector::ints(vec![]))).unwrap(), 0);
    }

    #[test]
    fn text_round_trip_and_sum_rejected() {
        let v = ColumnVector::texts(["a", "a", "", "bé", "bé"].map(String::from).to_vec());
        let e = rle_encode(&v);
        assert_eq!(e.run_count, Some(3));
        assert_eq!(rle_decode(&e).unwrap(), v);
        assert_eq!(sum_on_compressed(&e), Err(CodecError::NotNumeric));
    }
}
