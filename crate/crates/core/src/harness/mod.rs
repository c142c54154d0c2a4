//! Loading generated data into engines, planning and timing runs.

pub mod advise;
pub mod engine;
pub mod plan;
pub mod run;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::catalog::{emit_ddl, DdlError, DdlOptions, KeyClauses};
use crate::catalog::SchemaCatalog;
use crate::datagen::tbl::{count_lines, TblError, TblReader};

pub use advise::{advise_indices, IndexAdvice};
pub use engine::{CommandAdapter, CommandSpec, EngineAdapter, SqliteAdapter};
pub use plan::{build_plan, Configuration, OrderingPolicy, RunPlan};
pub use run::{execute, Execution, RunManifest, RunRecord, RunStatus};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("engine: {0}")]
    Engine(String),
    #[error(transparent)]
    Tbl(#[from] TblError),
    #[error(transparent)]
    Ddl(#[from] DdlError),
    #[error("missing data files: {}", .0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    MissingFiles(Vec<PathBuf>),
    #[error("{table}: file has {expected} lines but {loaded} rows were loaded")]
    CountMismatch { table: String, expected: u64, loaded: u64 },
    #[error("table {0} is not in the catalog")]
    UnknownTable(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("format: {0}")]
    Format(String),
    #[error("config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableLoad {
    pub table: String,
    pub rows: u64,
    pub duration_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadReport {
    pub tables: Vec<TableLoad>,
    pub duration_ms: f64,
}

impl LoadReport {
    pub fn rows(&self, table: &str) -> Option<u64> {
        self.tables.iter().find(|t| t.table.eq_ignore_ascii_case(table)).map(|t| t.rows)
    }
}

/// Creates the out-of-box schema (primary keys only) for `catalog`.
pub fn create_schema(adapter: &mut dyn EngineAdapter, catalog: &SchemaCatalog) -> Result<(), HarnessError> {
    let ddl = emit_ddl(
        catalog,
        &DdlOptions {
            keys: KeyClauses::PrimaryOnly,
            types: adapter.type_map(),
        },
    )?;
    adapter.execute_ddl(&ddl)
}

/// The `.tbl` file for every catalog table under `dir`; errors listing
/// every missing file.
pub fn table_files(catalog: &SchemaCatalog, dir: &Path) -> Result<Vec<(String, PathBuf)>, HarnessError> {
    let files: Vec<(String, PathBuf)> = catalog
        .tables
        .iter()
        .map(|t| (t.name.clone(), dir.join(t.file_name())))
        .collect();
    let missing: Vec<PathBuf> = files.iter().filter(|(_, p)| !p.is_file()).map(|(_, p)| p.clone()).collect();
    if missing.is_empty() {
        Ok(files)
    } else {
        Err(HarnessError::MissingFiles(missing))
    }
}

/// Streams each file into its table and checks the loaded count against
/// the file's line count.
pub fn load(
    adapter: &mut dyn EngineAdapter,
    catalog: &SchemaCatalog,
    files: &[(String, PathBuf)],
) -> Result<LoadReport, HarnessError> {
    let started = Instant::now();
    let mut report = LoadReport::default();
    for (table, path) in files {
        let def = catalog
            .table(table)
            .ok_or_else(|| HarnessError::UnknownTable(table.clone()))?;
        let clock = Instant::now();
        let mut rows = TblReader::open(path, def)?.map(|r| r.map_err(HarnessError::from));
        let loaded = adapter.bulk_load(def, &mut rows)?;
        let expected = count_lines(path)?;
        if loaded != expected {
            return Err(HarnessError::CountMismatch {
                table: def.name.clone(),
                expected,
                loaded,
            });
        }
        report.tables.push(TableLoad {
            table: def.name.clone(),
            rows: loaded,
            duration_ms: clock.elapsed().as_secs_f64() * 1e3,
        });
    }
    report.duration_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Creates every advised index.
pub fn apply_indices(adapter: &mut dyn EngineAdapter, advice: &[IndexAdvice]) -> Result<(), HarnessError> {
    for a in advice {
        adapter.execute_ddl(&a.create_statement())?;
    }
    Ok(())
}
