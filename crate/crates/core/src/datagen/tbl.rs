//! dbgen-style flat files: `|`-separated fields, a `|` after the last
//! field, `\n` after every row, no header.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::catalog::{LogicalType, TableDef};
use crate::value::{Decimal, Value};

pub type Row = Vec<Value>;

#[derive(Debug, thiserror::Error)]
pub enum TblError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("write failed at row {row}: {source}")]
    Write {
        row: u64,
        #[source]
        source: io::Error,
    },
}

pub fn render_row(row: &[Value], out: &mut String) {
    use std::fmt::Write as _;
    for v in row {
        let _ = write!(out, "{v}|");
    }
    out.push('\n');
}

/// Writes rows to `sink`, returning the row count. Errors carry the index
/// of the row being written.
pub fn write_tbl<W, I, E>(rows: I, mut sink: W) -> Result<u64, E>
where
    W: Write,
    I: IntoIterator<Item = Result<Row, E>>,
    E: From<TblError>,
{
    let mut buf = String::new();
    let mut n = 0u64;
    for row in rows {
        let row = row?;
        buf.clear();
        render_row(&row, &mut buf);
        sink.write_all(buf.as_bytes())
            .map_err(|source| TblError::Write { row: n, source })?;
        n += 1;
    }
    sink.flush()
        .map_err(|source| TblError::Write { row: n, source })?;
    Ok(n)
}

pub fn parse_field(text: &str, ty: LogicalType) -> Result<Value, String> {
    match ty {
        LogicalType::Integer => text
            .parse::<i64>()
            .map(Value::Int)
            .map_err(|e| format!("bad integer `{text}`: {e}")),
        LogicalType::Decimal { scale, .. } => Decimal::parse(text, scale)
            .map(Value::Decimal)
            .map_err(|e| e.to_string()),
        LogicalType::FixedText(_) | LogicalType::VarText(_) => Ok(Value::Text(text.to_string())),
        LogicalType::CalendarDate => NaiveDate::parse_from_str(text, "%Y-%m-%d")
            .map(Value::Date)
            .map_err(|e| format!("bad date `{text}`: {e}")),
    }
}

/// Parses one line against the stored columns of `table`.
pub fn parse_line(line: &str, table: &TableDef) -> Result<Row, String> {
    let body = line
        .strip_suffix('|')
        .ok_or_else(|| "missing trailing `|`".to_string())?;
    let types: Vec<LogicalType> = table.stored_columns().map(|c| c.logical_type).collect();
    let fields: Vec<&str> = body.split('|').collect();
    if fields.len() != types.len() {
        return Err(format!(
            "expected {} fields, found {}",
            types.len(),
            fields.len()
        ));
    }
    fields
        .iter()
        .zip(types)
        .map(|(f, t)| parse_field(f, t))
        .collect()
}

/// Streaming reader over a `.tbl` file.
pub struct TblReader {
    path: PathBuf,
    table: TableDef,
    lines: io::Lines<BufReader<File>>,
    line_no: u64,
}

impl TblReader {
    pub fn open(path: &Path, table: &TableDef) -> Result<Self, TblError> {
        let file = File::open(path).map_err(|source| TblError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            table: table.clone(),
            lines: BufReader::new(file).lines(),
            line_no: 0,
        })
    }
}

impl Iterator for TblReader {
    type Item = Result<Row, TblError>;

    fn next(&mut self) -> Option<Self::Item> {
        let line = self.lines.next()?;
        self.line_no += 1;
        Some(match line {
            Err(source) => Err(TblError::Io {
                path: self.path.clone(),
                source,
            }),
            Ok(l) => parse_line(&l, &self.table).map_err(|reason| TblError::Malformed {
                path: self.path.clone(),
                line: self.line_no,
                reason,
            }),
        })
    }
}

pub fn read_tbl(path: &Path, table: &TableDef) -> Result<Vec<Row>, TblError> {
    TblReader::open(path, table)?.collect()
}

/// `wc -l`.
pub fn count_lines(path: &Path) -> Result<u64, TblError> {
    let file = File::open(path).map_err(|source| TblError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = BufReader::new(file);
    let mut n = 0u64;
    loop {
        let buf = reader.fill_buf().map_err(|source| TblError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if buf.is_empty() {
            return Ok(n);
        }
        n += buf.iter().filter(|&&b| b == b'\n').count() as u64;
        let len = buf.len();
        reader.consume(len);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{ColumnDef, Provenance, TableKind};

    fn table() -> TableDef {
        TableDef {
            name: "T".into(),
            kind: TableKind::Dimension,
            columns: vec![
                ColumnDef::new("A", LogicalType::Integer),
                ColumnDef::new("B", LogicalType::VarText(10)),
                ColumnDef::new("C", LogicalType::MONEY),
            ],
            primary_key: vec!["A".into()],
            foreign_keys: vec![],
            provenance: Provenance::Added,
            note: String::new(),
        }
    }

    #[test]
    fn renders_dbgen_format() {
        let mut out = Vec::new();
        let rows: Vec<Result<Row, TblError>> =
            vec![Ok(vec![Value::Int(1), Value::text("ABC"), Value::money(350)])];
        write_tbl(rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1|ABC|3.50|\n");
    }

    #[test]
    fn empty_stream_empty_file() {
        let mut out = Vec::new();
        let n = write_tbl(Vec::<Result<Row, TblError>>::new(), &mut out).unwrap();
        assert_eq!(n, 0);
        assert!(out.is_empty());
    }

    #[test]
    fn dates_render_iso() {
        let d = NaiveDate::from_ymd_opt(1995, 3, 5).unwrap();
        let mut s = String::new();
        render_row(&[Value::Date(d)], &mut s);
        assert_eq!(s, "1995-03-05|\n");
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let t = table();
        assert_eq!(
            parse_line("7|x y|-0.05|", &t).unwrap(),
            vec![Value::Int(7), Value::text("x y"), Value::money(-5)]
        );
        assert!(parse_line("7|x|1.00", &t).unwrap_err().contains("trailing"));
        assert!(parse_line("7|x|", &t).unwrap_err().contains("expected 3"));
        assert!(parse_line("q|x|1.00|", &t).is_err());
    }

    #[test]
    fn reader_reports_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.tbl");
        std::fs::write(&p, "1|a|1.00|\n2|b|2.00|\n3|c|\n").unwrap();
        let err = read_tbl(&p, &table()).unwrap_err();
        match err {
            TblError::Malformed { line, .. } => assert_eq!(line, 3),
            other => panic!("{other}"),
        }
        assert_eq!(count_lines(&p).unwrap(), 3);
    }
}
