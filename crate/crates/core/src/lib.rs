//! Star Schema Benchmark toolkit.
//!
//! The crate is split along the life cycle of a benchmark run:
//!
//! * [`catalog`] describes the SSB star schema and the TPC-H reference
//!   schema it was derived from, and renders DDL.
//! * [`datagen`] produces deterministic, scaled `.tbl` files.
//! * [`workload`] holds the query flights, their parameter domains and
//!   filter-factor estimation.
//! * [`harness`] loads data into an engine, advises indices and times
//!   query execution.
//! * [`compression`] implements the column codecs and the compression
//!   experiments.
//! * [`report`] turns run records into aggregate tables and plot data.
//!
//! [`sql`] contains the expression compiler and the in-memory reference
//! evaluator shared by the workload and harness modules.

pub mod catalog;
pub mod compression;
pub mod datagen;
pub mod harness;
pub mod report;
pub mod scale;
pub mod sql;
pub mod value;
pub mod workload;

pub use catalog::{
    build_ssb_catalog, build_tpch_reference_catalog, diff_catalogs, emit_ddl, ColumnDef,
    DdlOptions, KeyClauses, LogicalType, SchemaCatalog, TableDef, TableKind,
    TransformationRecord,
};
pub use datagen::{cardinality, generate_all, generate_table, GenSpec, Manifest};
pub use compression::{ColumnVector, EncodedColumn};
pub use report::{aggregate, paired_report, AggregateRow, PairedComparison};
pub use harness::{advise_indices, build_plan, execute, EngineAdapter, RunRecord, SqliteAdapter};
pub use workload::{flight_catalog, instantiate, QueryInstance, QueryTemplate};
pub use scale::ScaleFactor;
pub use value::{Cell, Decimal, Value};

/// Hex-encoded SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
