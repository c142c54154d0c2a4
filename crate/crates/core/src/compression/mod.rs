//! Column codecs (RLE, null suppression, a heavy general-purpose hook),
//! entropy, and aggregation over RLE runs.

pub mod bench;
pub mod container;
pub mod heavy;
pub mod null_suppress;
pub mod rle;

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

pub use bench::{compression_benchmark, BenchRow};
pub use container::{read_container, write_container, HEADER_LEN};
pub use null_suppress::{null_suppress_decode, null_suppress_encode};
pub use rle::{rle_decode, rle_encode, runs, sum_on_compressed};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("column is not sorted")]
    NotSorted,
    #[error("{codec} needs an integer column")]
    NotInteger { codec: &'static str },
    #[error("column is not numeric")]
    NotNumeric,
    #[error("empty column")]
    Empty,
    #[error("expected {expected} encoding, got {got}")]
    WrongCodec { expected: &'static str, got: &'static str },
    #[error("corrupt payload: {0}")]
    Corrupt(String),
    #[error("codec {0} is not built in")]
    Unavailable(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Integer,
    /// Integer units at the given decimal scale.
    Decimal(u8),
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ColumnData {
    Int(Vec<i64>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Int(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sortedness {
    Unsorted,
    Sorted,
    RunsPresent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnVector {
    pub kind: ColumnKind,
    pub data: ColumnData,
    pub sortedness: Sortedness,
}

fn observe<T: PartialOrd>(v: &[T]) -> Sortedness {
    if v.windows(2).all(|w| w[0] <= w[1]) {
        Sortedness::Sorted
    } else if v.windows(2).any(|w| w[0] == w[1]) {
        Sortedness::RunsPresent
    } else {
        Sortedness::Unsorted
    }
}

impl ColumnVector {
    /// Builds a vector and records the sortedness it actually has.
    pub fn new(kind: ColumnKind, data: ColumnData) -> Self {
        let sortedness = match &data {
            ColumnData::Int(v) => observe(v),
            ColumnData::Text(v) => observe(v),
        };
        Self { kind, data, sortedness }
    }

    pub fn ints(values: Vec<i64>) -> Self {
        Self::new(ColumnKind::Integer, ColumnData::Int(values))
    }

    pub fn texts(values: Vec<String>) -> Self {
        Self::new(ColumnKind::Text, ColumnData::Text(values))
    }

    /// Overrides the flag; a `Sorted` claim is verified.
    pub fn with_sortedness(mut self, flag: Sortedness) -> Result<Self, CodecError> {
        if flag == Sortedness::Sorted && self.sortedness != Sortedness::Sorted {
            return Err(CodecError::NotSorted);
        }
        self.sortedness = flag;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// The same values in non-decreasing order.
    pub fn sorted(&self) -> Self {
        let data = match &self.data {
            ColumnData::Int(v) => {
                let mut v = v.clone();
                v.sort_unstable();
                ColumnData::Int(v)
            }
            ColumnData::Text(v) => {
                let mut v = v.clone();
                v.sort_unstable();
                ColumnData::Text(v)
            }
        };
        Self::new(self.kind, data)
    }

    /// Bytes of the fixed-width representation: 8 per number, the longest
    /// value's length per text.
    pub fn raw_bytes(&self) -> u64 {
        match &self.data {
            ColumnData::Int(v) => 8 * v.len() as u64,
            ColumnData::Text(v) => {
                let width = v.iter().map(String::len).max().unwrap_or(0) as u64;
                width * v.len() as u64
            }
        }
    }

    pub fn plain_sum(&self) -> Result<i128, CodecError> {
        match &self.data {
            ColumnData::Int(v) => Ok(v.iter().map(|&x| i128::from(x)).sum()),
            ColumnData::Text(_) => Err(CodecError::NotNumeric),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Codec {
    Rle,
    NullSuppress,
    Heavy,
}

impl Codec {
    pub fn id(self) -> u8 {
        match self {
            Codec::Rle => 1,
            Codec::NullSuppress => 2,
            Codec::Heavy => 3,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            1 => Some(Codec::Rle),
            2 => Some(Codec::NullSuppress),
            3 => Some(Codec::Heavy),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Codec::Rle => "rle",
            Codec::NullSuppress => "null_suppress",
            Codec::Heavy => "heavy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedColumn {
    pub codec: Codec,
    pub kind: ColumnKind,
    pub original_len: u64,
    /// Number of runs, for RLE.
    pub run_count: Option<u64>,
    pub payload: Vec<u8>,
}

impl EncodedColumn {
    /// raw_bytes / payload bytes; infinite for an empty payload.
    pub fn ratio(&self, raw_bytes: u64) -> f64 {
        raw_bytes as f64 / self.payload.len() as f64
    }
}

pub fn encode(v: &ColumnVector, codec: Codec) -> Result<EncodedColumn, CodecError> {
    match codec {
        Codec::Rle => Ok(rle_encode(v)),
        Codec::NullSuppress => null_suppress_encode(v),
        Codec::Heavy => heavy::heavy_encode(v),
    }
}

pub fn decode(e: &EncodedColumn) -> Result<ColumnVector, CodecError> {
    match e.codec {
        Codec::Rle => rle_decode(e),
        Codec::NullSuppress => null_suppress_decode(e),
        Codec::Heavy => heavy::heavy_decode(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub column: String,
    pub shannon_entropy_bits: f64,
    pub distinct_count: u64,
    pub length: u64,
}

fn entropy_of<T: Hash + Eq>(values: &[T]) -> (f64, u64) {
    let mut counts: HashMap<&T, u64> = HashMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let n = values.len() as f64;
    let h = counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum::<f64>();
    // -0.0 for a single symbol
    (h.max(0.0), counts.len() as u64)
}

/// Shannon entropy over empirical value frequencies.
pub fn entropy(column: &str, v: &ColumnVector) -> Result<EntropyReport, CodecError> {
    if v.is_empty() {
        return Err(CodecError::Empty);
    }
    let (h, distinct) = match &v.data {
        ColumnData::Int(x) => entropy_of(x),
        ColumnData::Text(x) => entropy_of(x),
    };
    Ok(EntropyReport {
        column: column.to_string(),
        shannon_entropy_bits: h,
        distinct_count: distinct,
        length: v.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sortedness_is_observed_and_claims_checked() {
        assert_eq!(ColumnVector::ints(vec![1, 2, 2]).sortedness, Sortedness::Sorted);
        assert_eq!(ColumnVector::ints(vec![3, 3, 1]).sortedness, Sortedness::RunsPresent);
        assert_eq!(ColumnVector::ints(vec![3, 1, 2]).sortedness, Sortedness::Unsorted);
        assert_eq!(
            ColumnVector::ints(vec![2, 1]).with_sortedness(Sortedness::Sorted),
            Err(CodecError::NotSorted)
        );
    }

    #[test]
    fn entropy_cases() {
        let e = entropy("c", &ColumnVector::ints(vec![7; 10])).unwrap();
        assert_eq!(e.shannon_entropy_bits, 0.0);
        let e = entropy("c", &ColumnVector::ints(vec![1, 2, 3, 4, 4, 3, 2, 1])).unwrap();
        assert!((e.shannon_entropy_bits - 2.0).abs() < 1e-12);
        assert_eq!(e.distinct_count, 4);
        assert_eq!(entropy("c", &ColumnVector::ints(vec![])), Err(CodecError::Empty));
    }
}
