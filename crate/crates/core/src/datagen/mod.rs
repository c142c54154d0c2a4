//! Deterministic, chunked generation of SSB and reference TPC-H data.
//!
//! Every `(table, column, chunk)` draws from its own ChaCha8 substream, so a
//! chunk can be regenerated without touching the rest of the table and the
//! output depends only on the [`GenSpec`].

pub mod calendar;
pub mod domain;
pub mod hierarchy;
pub mod plan;
pub mod rng;
pub mod ssb;
pub mod tbl;
pub mod tpch;
pub mod uniformity;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::{
    build_ssb_catalog_with, build_tpch_reference_catalog, SchemaCatalog, SsbOptions,
    DEFAULT_DATE_TABLE,
};
use crate::scale::ScaleFactor;

pub use calendar::Calendar;
pub use plan::{CardinalityPlan, ScalingRule};
pub use rng::GENERATOR_ID;
pub use ssb::{derive_row_fields, FactRow, PartialFactRow};
pub use tbl::Row;

pub const DEFAULT_CHUNK_ROWS: u64 = 10_000;

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("unknown table {0}")]
    UnknownTable(String),
    #[error("invalid generation spec: {0}")]
    InvalidSpec(String),
    #[error("{what} overflows for order {orderkey} line {linenumber}")]
    Overflow {
        what: &'static str,
        orderkey: i64,
        linenumber: i64,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Benchmark {
    Ssb,
    Tpch,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Ssb => "ssb",
            Benchmark::Tpch => "tpch",
        }
    }
}

/// Everything the generated bytes depend on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub scale_factor: ScaleFactor,
    pub seed: u64,
    pub calendar: Calendar,
    pub chunk_rows: u64,
    pub materialize_profit: bool,
    pub date_table: String,
    pub plan: CardinalityPlan,
    pub reference_plan: CardinalityPlan,
}

impl GenSpec {
    pub fn new(scale_factor: ScaleFactor, seed: u64) -> Self {
        Self {
            scale_factor,
            seed,
            calendar: Calendar::default(),
            chunk_rows: DEFAULT_CHUNK_ROWS,
            materialize_profit: false,
            date_table: DEFAULT_DATE_TABLE.to_string(),
            plan: CardinalityPlan::ssb(DEFAULT_DATE_TABLE),
            reference_plan: CardinalityPlan::tpch(),
        }
    }

    pub fn with_date_table(mut self, name: &str) -> Self {
        let name = name.to_ascii_uppercase();
        for (t, _) in &mut self.plan.rules {
            if t.eq_ignore_ascii_case(&self.date_table) {
                *t = name.clone();
            }
        }
        self.date_table = name;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.calendar.start > self.calendar.end {
            return Err(GenError::InvalidSpec(format!(
                "calendar starts {} after it ends {}",
                self.calendar.start, self.calendar.end
            )));
        }
        if self.chunk_rows < 4 {
            return Err(GenError::InvalidSpec("chunk_rows must be at least 4".into()));
        }
        Ok(())
    }

    /// SHA-256 over the canonical JSON form.
    pub fn spec_hash(&self) -> String {
        crate::sha256_hex(&serde_json::to_vec(self).expect("spec serializes"))
    }

    /// Rows per chunk, rounded down to whole orders.
    pub fn fact_chunk_rows(&self) -> u64 {
        (self.chunk_rows / ssb::LINES_PER_ORDER).max(1) * ssb::LINES_PER_ORDER
    }

    pub fn cardinality(&self, table: &str) -> Result<u64, GenError> {
        self.plan
            .cardinality(table, self.scale_factor, &self.calendar)
            .ok_or_else(|| GenError::UnknownTable(table.to_string()))
    }

    pub fn reference_cardinality(&self, table: &str) -> Result<u64, GenError> {
        self.reference_plan
            .cardinality(table, self.scale_factor, &self.calendar)
            .ok_or_else(|| GenError::UnknownTable(table.to_string()))
    }

    pub fn catalog(&self) -> SchemaCatalog {
        build_ssb_catalog_with(&SsbOptions {
            date_table: self.date_table.clone(),
            materialize_profit: self.materialize_profit,
        })
    }
}

/// Row count of an SSB table under the default plan and calendar.
pub fn cardinality(table: &str, sf: ScaleFactor) -> Option<u64> {
    CardinalityPlan::ssb(DEFAULT_DATE_TABLE).cardinality(table, sf, &Calendar::default())
}

pub(crate) trait ChunkSource: Send + Sync {
    fn total_rows(&self) -> u64;
    fn chunk_rows(&self) -> u64;
    fn chunk(&self, index: u64) -> Result<Vec<Row>, GenError>;
}

/// A table as a sequence of independently generated chunks.
pub struct TableStream {
    table: String,
    source: Box<dyn ChunkSource>,
    next: u64,
}

impl TableStream {
    pub fn table(&self) -> &str {
        &self.table
    }

    pub fn total_rows(&self) -> u64 {
        self.source.total_rows()
    }

    pub fn chunk_rows(&self) -> u64 {
        self.source.chunk_rows()
    }

    pub fn chunk_count(&self) -> u64 {
        self.total_rows().div_ceil(self.chunk_rows())
    }

    /// Position the stream so the next chunk returned is `index`.
    pub fn seek_chunk(&mut self, index: u64) {
        self.next = index;
    }

    pub fn chunk(&self, index: u64) -> Result<Vec<Row>, GenError> {
        self.source.chunk(index)
    }

    pub fn rows(self) -> impl Iterator<Item = Result<Row, GenError>> {
        self.flat_map(|chunk| match chunk {
            Ok(rows) => rows.into_iter().map(Ok).collect::<Vec<_>>(),
            Err(e) => vec![Err(e)],
        })
    }
}

impl Iterator for TableStream {
    type Item = Result<Vec<Row>, GenError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.chunk_count() {
            return None;
        }
        let c = self.next;
        self.next += 1;
        Some(self.source.chunk(c))
    }
}

/// Stream for one SSB table.
pub fn generate_table(spec: &GenSpec, table: &str) -> Result<TableStream, GenError> {
    spec.validate()?;
    let name = table.to_ascii_uppercase();
    let sizes = ssb::SsbSizes::for_spec(spec)?;
    let (seed, chunk_rows) = (spec.seed, spec.chunk_rows);
    let source: Box<dyn ChunkSource> = match name.as_str() {
        "LINEORDER" => Box::new(ssb::LineorderSource {
            seed,
            sizes,
            calendar: spec.calendar,
            chunk_rows: spec.fact_chunk_rows(),
            materialize_profit: spec.materialize_profit,
        }),
        "CUSTOMER" => Box::new(ssb::CustomerSource {
            seed,
            rows: sizes.customers,
            chunk_rows,
        }),
        "SUPPLIER" => Box::new(ssb::SupplierSource {
            seed,
            rows: sizes.suppliers,
            chunk_rows,
        }),
        "PART" => Box::new(ssb::PartSource {
            seed,
            rows: sizes.parts,
            chunk_rows,
            hierarchy: hierarchy::HierarchySpec::part(),
        }),
        n if n == spec.date_table => Box::new(ssb::DateSource {
            calendar: spec.calendar,
            chunk_rows,
        }),
        _ => return Err(GenError::UnknownTable(table.to_string())),
    };
    Ok(TableStream {
        table: name,
        source,
        next: 0,
    })
}

/// Stream for one reference TPC-H table.
pub fn generate_reference_table(spec: &GenSpec, table: &str) -> Result<TableStream, GenError> {
    spec.validate()?;
    let name = table.to_ascii_uppercase();
    let card = |t: &str| spec.reference_cardinality(t);
    let seed = spec.seed;
    let chunk_rows = spec.fact_chunk_rows();
    if card("SUPPLIER")? < tpch::SUPPLIERS_PER_PART {
        return Err(GenError::InvalidSpec(format!(
            "scale factor {} is too small for the reference schema",
            spec.scale_factor
        )));
    }
    let blocks = || -> Result<tpch::OrderBlocks, GenError> {
        Ok(tpch::OrderBlocks {
            seed,
            orders: card("ORDERS")?,
            customers: card("CUSTOMER")?,
            parts: card("PART")?,
            suppliers: card("SUPPLIER")?,
            calendar: spec.calendar,
            orders_per_chunk: chunk_rows / tpch::LINES_PER_ORDER,
        })
    };
    let source: Box<dyn ChunkSource> = match name.as_str() {
        "REGION" => Box::new(tpch::RegionSource),
        "NATION" => Box::new(tpch::NationSource),
        "PART" => Box::new(tpch::PartSource {
            seed,
            rows: card("PART")?,
            chunk_rows,
        }),
        "SUPPLIER" => Box::new(tpch::SupplierSource {
            seed,
            rows: card("SUPPLIER")?,
            chunk_rows,
        }),
        "PARTSUPP" => Box::new(tpch::PartsuppSource {
            seed,
            parts: card("PART")?,
            suppliers: card("SUPPLIER")?,
            chunk_rows,
        }),
        "CUSTOMER" => Box::new(tpch::CustomerSource {
            seed,
            rows: card("CUSTOMER")?,
            chunk_rows,
        }),
        "ORDERS" => Box::new(tpch::OrdersSource(blocks()?)),
        "LINEITEM" => Box::new(tpch::LineitemSource(blocks()?)),
        _ => return Err(GenError::UnknownTable(table.to_string())),
    };
    Ok(TableStream {
        table: name,
        source,
        next: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableManifest {
    pub benchmark: Benchmark,
    pub table: String,
    /// Relative to the output directory.
    pub file: String,
    pub rows: u64,
    pub sha256: String,
}

/// Written as `manifest.json`; byte-identical for identical specs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub spec: GenSpec,
    pub spec_hash: String,
    pub tables: Vec<TableManifest>,
}

impl Manifest {
    pub const FILE_NAME: &'static str = "manifest.json";

    pub fn read(dir: &Path) -> Result<Self, GenError> {
        let path = dir.join(Self::FILE_NAME);
        let bytes = fs::read(&path).map_err(|source| GenError::Io {
            path: path.clone(),
            source,
        })?;
        serde_json::from_slice(&bytes).map_err(|e| GenError::Io {
            path,
            source: io::Error::new(io::ErrorKind::InvalidData, e),
        })
    }

    pub fn table(&self, benchmark: Benchmark, table: &str) -> Option<&TableManifest> {
        self.tables
            .iter()
            .find(|t| t.benchmark == benchmark && t.table.eq_ignore_ascii_case(table))
    }
}

/// Subdirectory holding the reference TPC-H files.
pub const REFERENCE_DIR: &str = "tpch";

/// Which tables [`generate_all`] writes.
#[derive(Debug, Clone, Default)]
pub struct Selection {
    pub benchmarks: Vec<Benchmark>,
    /// Empty means every table.
    pub tables: Vec<String>,
}

impl Selection {
    pub fn all() -> Self {
        Self {
            benchmarks: vec![Benchmark::Ssb, Benchmark::Tpch],
            tables: Vec::new(),
        }
    }

    pub fn ssb() -> Self {
        Self {
            benchmarks: vec![Benchmark::Ssb],
            tables: Vec::new(),
        }
    }

    fn wants(&self, table: &str) -> bool {
        self.tables.is_empty() || self.tables.iter().any(|t| t.eq_ignore_ascii_case(table))
    }
}

struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn worker_count() -> u64 {
    std::thread::available_parallelism().map_or(1, |n| n.get() as u64)
}

/// Writes one table, rendering chunks in parallel and appending them in order.
pub fn write_table(stream: &TableStream, path: &Path) -> Result<(u64, String), GenError> {
    let io_err = |source| GenError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut out = HashingWriter {
        inner: BufWriter::with_capacity(1 << 20, file),
        hasher: Sha256::new(),
    };
    let workers = worker_count();
    let chunks = stream.chunk_count();
    let mut rows = 0u64;
    let mut first = 0;
    while first < chunks {
        let last = (first + workers).min(chunks);
        let rendered: Vec<Result<(u64, String), GenError>> = std::thread::scope(|s| {
            let handles: Vec<_> = (first..last)
                .map(|c| {
                    s.spawn(move || {
                        let chunk = stream.chunk(c)?;
                        let mut text = String::with_capacity(chunk.len() * 128);
                        for row in &chunk {
                            tbl::render_row(row, &mut text);
                        }
                        Ok((chunk.len() as u64, text))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("generator thread panicked"))
                .collect()
        });
        for r in rendered {
            let (n, text) = r?;
            out.write_all(text.as_bytes()).map_err(io_err)?;
            rows += n;
        }
        first = last;
    }
    out.flush().map_err(io_err)?;
    Ok((rows, hex::encode(out.hasher.finalize())))
}

/// Generates the selected tables under `dir` and writes the manifest.
pub fn generate_all(spec: &GenSpec, dir: &Path, selection: &Selection) -> Result<Manifest, GenError> {
    spec.validate()?;
    let mkdir = |d: &Path| {
        fs::create_dir_all(d).map_err(|source| GenError::Io {
            path: d.to_path_buf(),
            source,
        })
    };
    mkdir(dir)?;
    let mut tables = Vec::new();
    for &benchmark in &selection.benchmarks {
        let (catalog, sub) = match benchmark {
            Benchmark::Ssb => (spec.catalog(), None),
            Benchmark::Tpch => (build_tpch_reference_catalog(), Some(REFERENCE_DIR)),
        };
        let base = match sub {
            Some(s) => dir.join(s),
            None => dir.to_path_buf(),
        };
        mkdir(&base)?;
        for def in &catalog.tables {
            if !selection.wants(&def.name) {
                continue;
            }
            let stream = match benchmark {
                Benchmark::Ssb => generate_table(spec, &def.name)?,
                Benchmark::Tpch => generate_reference_table(spec, &def.name)?,
            };
            let file = def.file_name();
            let (rows, sha256) = write_table(&stream, &base.join(&file))?;
            tables.push(TableManifest {
                benchmark,
                table: def.name.clone(),
                file: match sub {
                    Some(s) => format!("{s}/{file}"),
                    None => file,
                },
                rows,
                sha256,
            });
        }
    }
    let manifest = Manifest {
        generator: GENERATOR_ID.to_string(),
        spec: spec.clone(),
        spec_hash: spec.spec_hash(),
        tables,
    };
    let path = dir.join(Manifest::FILE_NAME);
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json).map_err(|source| GenError::Io { path, source })?;
    Ok(manifest)
}
