//! Ratio and timing comparison of codecs over generated columns, sorted
//! and in file order.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{decode, encode, heavy, sum_on_compressed, Codec, CodecError, ColumnData, ColumnKind, ColumnVector};
use crate::catalog::{build_ssb_catalog, SchemaCatalog};
use crate::datagen::tbl::{read_tbl, Row, TblError};
use crate::value::Value;

pub const DEFAULT_COLUMNS: [&str; 5] = ["LO_ORDERDATE", "LO_QUANTITY", "LO_DISCOUNT", "LO_EXTENDEDPRICE", "LO_REVENUE"];
pub const CSV_HEADER: &str = "column,codec,sorted,ratio,encode_ms,agg_ms";

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("missing data file {0}")]
    MissingFile(PathBuf),
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("column {0} is not numeric")]
    NotNumeric(String),
    #[error("sort key {key} is not in table {table}")]
    BadSortKey { key: String, table: String },
    #[error(transparent)]
    Tbl(#[from] TblError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("{column}/{codec}: compressed sum {got} differs from plain sum {want}")]
    SumMismatch { column: String, codec: String, got: i128, want: i128 },
}

/// One CSV row. `codec` is `plain` for the uncompressed baseline, whose
/// aggregation reads the decoded values directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub column: String,
    pub codec: String,
    pub sorted: bool,
    pub ratio: f64,
    pub encode_ms: f64,
    /// SUM over the column: on the runs for rle, decode-then-sum for the
    /// other codecs.
    pub agg_ms: f64,
}

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6}",
            self.column, self.codec, self.sorted, self.ratio, self.encode_ms, self.agg_ms
        )
    }
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

const TIMING_REPS: usize = 3;

fn best_of<T>(mut f: impl FnMut() -> T) -> (T, f64) {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..TIMING_REPS {
        let t = Instant::now();
        let r = f();
        best = best.min(t.elapsed().as_secs_f64() * 1e3);
        out = Some(r);
    }
    (out.expect("at least one rep"), best)
}

fn locate<'a>(catalog: &'a SchemaCatalog, spec: &str) -> Result<(&'a str, String), BenchError> {
    let (table, column) = match spec.split_once('.') {
        Some((t, c)) => (
            catalog.table(t).ok_or_else(|| BenchError::UnknownColumn(spec.to_string()))?,
            c,
        ),
        None => (
            catalog
                .tables
                .iter()
                .find(|t| t.column(spec).is_some())
                .ok_or_else(|| BenchError::UnknownColumn(spec.to_string()))?,
            spec,
        ),
    };
    let col = table.column(column).ok_or_else(|| BenchError::UnknownColumn(spec.to_string()))?;
    Ok((&table.name, col.name.clone()))
}

fn numeric(values: &[Value], name: &str) -> Result<ColumnVector, BenchError> {
    let mut kind = ColumnKind::Integer;
    let mut out = Vec::with_capacity(values.len());
    for v in values {
        match v {
            Value::Int(i) => out.push(*i),
            Value::Decimal(d) => {
                kind = ColumnKind::Decimal(d.scale);
                out.push(d.units);
            }
            _ => return Err(BenchError::NotNumeric(name.to_string())),
        }
    }
    Ok(ColumnVector::new(kind, ColumnData::Int(out)))
}

fn row_order(rows: &[Row], keys: &[usize], column: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.sort_by(|&a, &b| {
        keys.iter()
            .chain(std::iter::once(&column))
            .map(|&k| rows[a][k].compare(&rows[b][k]).unwrap_or(Ordering::Equal))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    });
    idx
}

fn measure(name: &str, v: &ColumnVector, sorted: bool, out: &mut Vec<BenchRow>) -> Result<(), BenchError> {
    let raw = v.raw_bytes();
    let want = v.plain_sum()?;
    let (_, plain_ms) = best_of(|| v.plain_sum());
    out.push(BenchRow {
        column: name.to_string(),
        codec: "plain".into(),
        sorted,
        ratio: 1.0,
        encode_ms: 0.0,
        agg_ms: plain_ms,
    });
    let mut codecs = vec![Codec::Rle, Codec::NullSuppress];
    if heavy::heavy_available() {
        codecs.push(Codec::Heavy);
    }
    for codec in codecs {
        let (encoded, encode_ms) = best_of(|| encode(v, codec));
        let encoded = encoded?;
        let (got, agg_ms) = best_of(|| match codec {
            Codec::Rle => sum_on_compressed(&encoded),
            _ => decode(&encoded).and_then(|d| d.plain_sum()),
        });
        let got = got?;
        if got != want {
            return Err(BenchError::SumMismatch {
                column: name.to_string(),
                codec: codec.name().to_string(),
                got,
                want,
            });
        }
        out.push(BenchRow {
            column: name.to_string(),
            codec: codec.name().to_string(),
            sorted,
            ratio: encoded.ratio(raw),
            encode_ms,
            agg_ms,
        });
    }
    Ok(())
}

/// For each column, codec and {file order, sorted}: compression ratio,
/// encode time and SUM time. The sorted variant orders the column's table
/// by `sort_keys` then by the column itself.
pub fn compression_benchmark(dir: &Path, columns: &[String], sort_keys: &[String]) -> Result<Vec<BenchRow>, BenchError> {
    let catalog = build_ssb_catalog();
    let mut tables: HashMap<String, Vec<Row>> = HashMap::new();
    let mut out = Vec::new();
    for spec in columns {
        let (table, column) = locate(&catalog, spec)?;
        let def = catalog.table(table).expect("located");
        if !tables.contains_key(table) {
            let path = dir.join(def.file_name());
            if !path.is_file() {
                return Err(BenchError::MissingFile(path));
            }
            tables.insert(table.to_string(), read_tbl(&path, def)?);
        }
        let rows = &tables[table];
        let stored: Vec<&str> = def.stored_columns().map(|c| c.name.as_str()).collect();
        let pos = |name: &str| stored.iter().position(|c| c.eq_ignore_ascii_case(name));
        let col = pos(&column).ok_or_else(|| BenchError::NotNumeric(column.clone()))?;
        let keys = sort_keys
            .iter()
            .map(|k| {
                pos(k).ok_or_else(|| BenchError::BadSortKey {
                    key: k.clone(),
                    table: table.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let file_order: Vec<Value> = rows.iter().map(|r| r[col].clone()).collect();
        let sorted_order: Vec<Value> = row_order(rows, &keys, col).into_iter().map(|i| rows[i][col].clone()).collect();
        measure(&column, &numeric(&file_order, &column)?, false, &mut out)?;
        measure(&column, &numeric(&sorted_order, &column)?, true, &mut out)?;
    }
    Ok(out)
}
