//! Plan execution and run-record persistence.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::advise::IndexAdvice;
use super::engine::EngineAdapter;
use super::plan::{Configuration, RunPlan};
use super::HarnessError;
use crate::datagen::Benchmark;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

/// One retained, timed execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub plan_id: String,
    pub engine: String,
    pub configuration: Configuration,
    pub benchmark: Benchmark,
    pub query: String,
    /// 1-based among retained repetitions.
    pub repetition: u32,
    pub wall_time_ms: f64,
    pub row_count: u64,
    /// RFC 3339, UTC, microsecond precision.
    pub started_at: String,
    pub finished_at: String,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Order-insensitive digest of the result multiset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result_digest: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explain {
    pub query: String,
    pub plan: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub records: Vec<RunRecord>,
    pub explains: Vec<Explain>,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true)
}

/// Runs every instance `cold_runs_discarded + repetitions` times in plan
/// order on one connection, keeping the last `repetitions`. Engine errors
/// become failed records; the plan carries on.
///
/// For the indexed configuration the advised indices must already exist.
pub fn execute(adapter: &mut dyn EngineAdapter, plan: &RunPlan) -> Execution {
    let plan_id = plan.plan_id();
    let mut records = Vec::new();
    let mut explains = Vec::new();
    for inst in &plan.instances {
        let text = adapter
            .explain(&inst.rendered_sql)
            .unwrap_or_else(|e| format!("explain failed: {e}"));
        explains.push(Explain {
            query: inst.template_id.clone(),
            plan: text,
        });
        for run in 0..plan.cold_runs_discarded + plan.repetitions {
            if plan.flush_caches {
                let _ = adapter.flush_caches();
            }
            let started_at = now();
            let clock = Instant::now();
            let result = adapter.query(&inst.rendered_sql);
            let wall_time_ms = clock.elapsed().as_secs_f64() * 1e3;
            let finished_at = now();
            if run < plan.cold_runs_discarded {
                continue;
            }
            let mut rec = RunRecord {
                plan_id: plan_id.clone(),
                engine: adapter.engine_id().to_string(),
                configuration: plan.configuration,
                benchmark: inst.benchmark,
                query: inst.template_id.clone(),
                repetition: run - plan.cold_runs_discarded + 1,
                wall_time_ms,
                row_count: 0,
                started_at,
                finished_at,
                status: RunStatus::Ok,
                error: None,
                result_digest: None,
            };
            match result {
                Ok(rs) => {
                    rec.row_count = rs.len() as u64;
                    rec.result_digest = Some(rs.digest());
                }
                Err(e) => {
                    rec.status = RunStatus::Failed;
                    rec.error = Some(e.to_string());
                }
            }
            records.push(rec);
        }
    }
    Execution { records, explains }
}

/// Provenance of the data a plan ran against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataProvenance {
    /// SHA-256 of the generation manifest file.
    pub manifest_sha256: String,
    pub spec_hash: String,
    pub tables: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub plan_id: String,
    pub plan: RunPlan,
    pub engine_version: String,
    pub data: Option<DataProvenance>,
    pub indices: Vec<IndexAdvice>,
    pub explains: Vec<Explain>,
    pub records_file: String,
}

impl RunManifest {
    pub const FILE_NAME: &'static str = "run_manifest.json";
    pub const RECORDS_FILE: &'static str = "records.jsonl";
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes one JSON object per line.
pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| HarnessError::Format(e.to_string()))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>, HarnessError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| HarnessError::Format(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

/// Writes `records.jsonl` and `run_manifest.json` into `dir`.
pub fn persist(dir: &Path, manifest: &RunManifest, records: &[RunRecord]) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_records(&dir.join(&manifest.records_file), records)?;
    let path = dir.join(RunManifest::FILE_NAME);
    let mut json = serde_json::to_string_pretty(manifest).map_err(|e| HarnessError::Format(e.to_string()))?;
    json.push('\n');
    fs::write(&path, json).map_err(io_err(&path))
}
