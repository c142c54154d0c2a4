//! Aggregates run records into per-query averages, the ten TPC-H/SSB pairs
//! and per-figure plot data.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::datagen::Benchmark;
use crate::harness::run::{read_records, RunManifest};
use crate::harness::{Configuration, RunRecord, RunStatus};
use crate::workload::MappingEntry;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no run directories given")]
    NoRuns,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub benchmark: Benchmark,
    pub query: String,
    pub engine: String,
    pub configuration: Configuration,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    /// Successful repetitions averaged.
    pub count: u32,
    /// Failed repetitions, excluded from the statistics.
    pub failed: u32,
}

type GroupKey = (Benchmark, String, String, Configuration);

/// Mean, median, min and max of successful wall times per (benchmark,
/// query, engine, configuration). Groups without a success are omitted.
/// Output order and values do not depend on input order.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<GroupKey, (Vec<f64>, u32)> = BTreeMap::new();
    for r in records {
        let g = groups
            .entry((r.benchmark, r.query.clone(), r.engine.clone(), r.configuration))
            .or_default();
        match r.status {
            RunStatus::Ok => g.0.push(r.wall_time_ms),
            RunStatus::Failed => g.1 += 1,
        }
    }
    groups
        .into_iter()
        .filter(|(_, (times, _))| !times.is_empty())
        .map(|((benchmark, query, engine, configuration), (mut times, failed))| {
            // sorted before summing so the mean is order-independent
            times.sort_by(f64::total_cmp);
            let n = times.len();
            let mean = times.iter().sum::<f64>() / n as f64;
            let median = if n % 2 == 1 {
                times[n / 2]
            } else {
                (times[n / 2 - 1] + times[n / 2]) / 2.0
            };
            AggregateRow {
                benchmark,
                query,
                engine,
                configuration,
                // clamp rounding so min <= mean <= max always holds
                mean_ms: mean.clamp(times[0], times[n - 1]),
                median_ms: median,
                min_ms: times[0],
                max_ms: times[n - 1],
                count: n as u32,
                failed,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub index: u8,
    pub engine: String,
    pub configuration: Configuration,
    pub tpch_query: String,
    pub ssb_query: String,
    pub original_label: String,
    pub tpch: Option<AggregateRow>,
    pub ssb: Option<AggregateRow>,
    /// tpch mean / ssb mean; `None` when a side is missing.
    pub ratio: Option<f64>,
    pub note: String,
}

fn shared_counterparts(mapping: &[MappingEntry]) -> BTreeMap<&str, usize> {
    let mut n: BTreeMap<&str, usize> = BTreeMap::new();
    for e in mapping {
        *n.entry(e.tpch).or_default() += 1;
    }
    n
}

/// One comparison per mapping entry for every (engine, configuration)
/// seen in either input, in mapping order. A missing side yields a gap
/// entry with no ratio.
pub fn paired_report(
    tpch_rows: &[AggregateRow],
    ssb_rows: &[AggregateRow],
    mapping: &[MappingEntry],
) -> Vec<PairedComparison> {
    let mut setups: Vec<(String, Configuration)> = tpch_rows
        .iter()
        .chain(ssb_rows)
        .map(|r| (r.engine.clone(), r.configuration))
        .collect();
    setups.sort();
    setups.dedup();
    let shared = shared_counterparts(mapping);
    let find = |rows: &[AggregateRow], bench: Benchmark, q: &str, engine: &str, cfg: Configuration| {
        rows.iter()
            .find(|r| r.benchmark == bench && r.query == q && r.engine == engine && r.configuration == cfg)
            .cloned()
    };
    let mut out = Vec::new();
    for (engine, cfg) in &setups {
        for e in mapping {
            let tpch = find(tpch_rows, Benchmark::Tpch, e.tpch, engine, *cfg);
            let ssb = find(ssb_rows, Benchmark::Ssb, e.ssb, engine, *cfg);
            let ratio = match (&tpch, &ssb) {
                (Some(t), Some(s)) if s.mean_ms > 0.0 => Some(t.mean_ms / s.mean_ms),
                _ => None,
            };
            let mut notes = Vec::new();
            if tpch.is_none() {
                notes.push(format!("missing TPC-H {}", e.tpch));
            }
            if ssb.is_none() {
                notes.push(format!("missing SSB {}", e.ssb));
            }
            if shared.get(e.tpch).copied().unwrap_or(0) > 1 {
                notes.push(format!("same {} instance reused across pairs", e.tpch));
            }
            out.push(PairedComparison {
                index: e.index,
                engine: engine.clone(),
                configuration: *cfg,
                tpch_query: e.tpch.to_string(),
                ssb_query: e.ssb.to_string(),
                original_label: e.original_label.to_string(),
                tpch,
                ssb,
                ratio,
                note: notes.join("; "),
            });
        }
    }
    out
}

/// Figure layout: id, benchmark and configuration plotted.
pub const FIGURES: [(&str, Benchmark, Configuration); 4] = [
    ("fig4", Benchmark::Tpch, Configuration::OutOfBox),
    ("fig5", Benchmark::Ssb, Configuration::OutOfBox),
    ("fig6", Benchmark::Tpch, Configuration::Indexed),
    ("fig7", Benchmark::Ssb, Configuration::Indexed),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub engine: String,
    /// Mean ms per query index; `None` for a gap.
    pub mean_ms: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureData {
    pub id: String,
    pub benchmark: Benchmark,
    pub configuration: Configuration,
    pub query_index: Vec<u8>,
    pub query: Vec<String>,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotData {
    pub provenance: String,
    pub figures: Vec<FigureData>,
}

pub fn figure_data(paired: &[PairedComparison], mapping: &[MappingEntry]) -> Vec<FigureData> {
    let mut engines: Vec<&str> = paired.iter().map(|p| p.engine.as_str()).collect();
    engines.sort();
    engines.dedup();
    FIGURES
        .iter()
        .map(|&(id, bench, cfg)| FigureData {
            id: id.to_string(),
            benchmark: bench,
            configuration: cfg,
            query_index: mapping.iter().map(|e| e.index).collect(),
            query: mapping
                .iter()
                .map(|e| match bench {
                    Benchmark::Tpch => e.tpch.to_string(),
                    Benchmark::Ssb => e.ssb.to_string(),
                })
                .collect(),
            series: engines
                .iter()
                .map(|engine| Series {
                    engine: engine.to_string(),
                    mean_ms: mapping
                        .iter()
                        .map(|e| {
                            paired
                                .iter()
                                .find(|p| p.index == e.index && p.engine == *engine && p.configuration == cfg)
                                .and_then(|p| match bench {
                                    Benchmark::Tpch => p.tpch.as_ref(),
                                    Benchmark::Ssb => p.ssb.as_ref(),
                                })
                                .map(|r| r.mean_ms)
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect()
}

/// SHA-256 over the run manifests, ordered by plan id, so it covers both
/// the plans and the data checksums they record.
pub fn provenance_hash(manifests: &[RunManifest]) -> String {
    let mut sorted: Vec<&RunManifest> = manifests.iter().collect();
    sorted.sort_by(|a, b| a.plan_id.cmp(&b.plan_id));
    let mut h = Sha256::new();
    for m in sorted {
        h.update(serde_json::to_vec(m).expect("manifest serializes"));
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn aggregate_csv(rows: &[AggregateRow], provenance: &str) -> Vec<u8> {
    csv_bytes(
        &[
            "benchmark", "query", "engine", "configuration", "mean_ms", "median_ms", "min_ms", "max_ms", "count",
            "failed", "provenance",
        ],
        rows.iter()
            .map(|r| {
                vec![
                    r.benchmark.name().to_string(),
                    r.query.clone(),
                    r.engine.clone(),
                    r.configuration.name().to_string(),
                    num(r.mean_ms),
                    num(r.median_ms),
                    num(r.min_ms),
                    num(r.max_ms),
                    r.count.to_string(),
                    r.failed.to_string(),
                    provenance.to_string(),
                ]
            })
            .collect(),
    )
}

pub fn paired_csv(rows: &[PairedComparison], provenance: &str) -> Vec<u8> {
    csv_bytes(
        &[
            "index", "engine", "configuration", "tpch_query", "ssb_query", "original_label", "tpch_mean_ms",
            "ssb_mean_ms", "ratio", "note", "provenance",
        ],
        rows.iter()
            .map(|p| {
                vec![
                    p.index.to_string(),
                    p.engine.clone(),
                    p.configuration.name().to_string(),
                    p.tpch_query.clone(),
                    p.ssb_query.clone(),
                    p.original_label.clone(),
                    opt(p.tpch.as_ref().map(|r| r.mean_ms)),
                    opt(p.ssb.as_ref().map(|r| r.mean_ms)),
                    opt(p.ratio),
                    p.note.clone(),
                    provenance.to_string(),
                ]
            })
            .collect(),
    )
}

pub fn figure_csv(fig: &FigureData, provenance: &str) -> Vec<u8> {
    let mut rows = Vec::new();
    for s in &fig.series {
        for ((idx, q), m) in fig.query_index.iter().zip(&fig.query).zip(&s.mean_ms) {
            rows.push(vec![idx.to_string(), q.clone(), s.engine.clone(), opt(*m), provenance.to_string()]);
        }
    }
    csv_bytes(&["query_index", "query", "engine", "mean_ms", "provenance"], rows)
}

/// Files written by [`generate_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub provenance: String,
    pub files: Vec<PathBuf>,
    pub aggregate_rows: usize,
    pub paired_rows: usize,
}

fn read_run(dir: &Path) -> Result<(RunManifest, Vec<RunRecord>), ReportError> {
    let path = dir.join(RunManifest::FILE_NAME);
    let err = |path: &Path, message: String| ReportError::Read {
        path: path.to_path_buf(),
        message,
    };
    let text = fs::read_to_string(&path).map_err(|e| err(&path, e.to_string()))?;
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| err(&path, e.to_string()))?;
    let records_path = dir.join(&manifest.records_file);
    let records = read_records(&records_path).map_err(|e| err(&records_path, e.to_string()))?;
    Ok((manifest, records))
}

/// Reads run directories and writes `aggregate.csv`, one
/// `paired_<configuration>.csv` per configuration present, `fig4.csv` to
/// `fig7.csv`, and `plot_data.json`, all stamped with the provenance hash.
/// An optional compression CSV is copied to `fig1.csv` with the hash
/// appended as a column. Inputs are only read.
pub fn generate_report(
    run_dirs: &[PathBuf],
    mapping: &[MappingEntry],
    compression_csv: Option<&Path>,
    out: &Path,
) -> Result<ReportSummary, ReportError> {
    if run_dirs.is_empty() {
        return Err(ReportError::NoRuns);
    }
    let mut manifests = Vec::new();
    let mut records = Vec::new();
    for d in run_dirs {
        let (m, r) = read_run(d)?;
        manifests.push(m);
        records.extend(r);
    }
    let provenance = provenance_hash(&manifests);
    let rows = aggregate(&records);
    let (tpch, ssb): (Vec<AggregateRow>, Vec<AggregateRow>) =
        rows.iter().cloned().partition(|r| r.benchmark == Benchmark::Tpch);
    let paired = paired_report(&tpch, &ssb, mapping);

    fs::create_dir_all(out).map_err(|source| ReportError::Write {
        path: out.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    let mut write = |name: &str, bytes: Vec<u8>| -> Result<(), ReportError> {
        let path = out.join(name);
        fs::write(&path, bytes).map_err(|source| ReportError::Write {
            path: path.clone(),
            source,
        })?;
        files.push(path);
        Ok(())
    };
    write("aggregate.csv", aggregate_csv(&rows, &provenance))?;
    let mut configs: Vec<Configuration> = paired.iter().map(|p| p.configuration).collect();
    configs.sort();
    configs.dedup();
    for cfg in configs {
        let part: Vec<PairedComparison> = paired.iter().filter(|p| p.configuration == cfg).cloned().collect();
        write(&format!("paired_{}.csv", cfg.name()), paired_csv(&part, &provenance))?;
    }
    let figures = figure_data(&paired, mapping);
    for f in &figures {
        write(&format!("{}.csv", f.id), figure_csv(f, &provenance))?;
    }
    if let Some(path) = compression_csv {
        let text = fs::read_to_string(path).map_err(|e| ReportError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut lines = text.lines();
        let mut body = String::new();
        if let Some(header) = lines.next() {
            body.push_str(&format!("{header},provenance\n"));
        }
        for l in lines.filter(|l| !l.is_empty()) {
            body.push_str(&format!("{l},{provenance}\n"));
        }
        write("fig1.csv", body.into_bytes())?;
    }
    let plot = PlotData {
        provenance: provenance.clone(),
        figures,
    };
    let mut json = serde_json::to_string_pretty(&plot).expect("plot data serializes");
    json.push('\n');
    write("plot_data.json", json.into_bytes())?;
    Ok(ReportSummary {
        provenance,
        files,
        aggregate_rows: rows.len(),
        paired_rows: paired.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::MAPPING;

    fn rec(query: &str, bench: Benchmark, ms: f64, ok: bool) -> RunRecord {
        RunRecord {
            plan_id: "p".into(),
            engine: "sqlite".into(),
            configuration: Configuration::OutOfBox,
            benchmark: bench,
            query: query.into(),
            repetition: 1,
            wall_time_ms: ms,
            row_count: 1,
            started_at: String::new(),
            finished_at: String::new(),
            status: if ok { RunStatus::Ok } else { RunStatus::Failed },
            error: None,
            result_digest: None,
        }
    }

    #[test]
    fn mean_of_three() {
        let rows = aggregate(&[
            rec("Q1.1", Benchmark::Ssb, 3.0, true),
            rec("Q1.1", Benchmark::Ssb, 5.0, true),
            rec("Q1.1", Benchmark::Ssb, 4.0, true),
            rec("Q1.1", Benchmark::Ssb, 99.0, false),
        ]);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].mean_ms, 4.0);
        assert_eq!(rows[0].median_ms, 4.0);
        assert_eq!((rows[0].count, rows[0].failed), (3, 1));
        assert!(aggregate(&[]).is_empty());
    }

    #[test]
    fn pairs_follow_mapping_with_gaps() {
        let rows = aggregate(&[rec("Q6", Benchmark::Tpch, 2.0, true), rec("Q1.1", Benchmark::Ssb, 2.0, true)]);
        let (t, s): (Vec<_>, Vec<_>) = rows.into_iter().partition(|r| r.benchmark == Benchmark::Tpch);
        let p = paired_report(&t, &s, &MAPPING);
        assert_eq!(p.len(), 10);
        assert_eq!((p[0].tpch_query.as_str(), p[0].ssb_query.as_str()), ("Q6", "Q1.1"));
        assert_eq!(p[0].ratio, Some(1.0));
        assert_eq!(p[1].ratio, None);
        assert!(p[1].note.contains("missing SSB Q1.2"));
        assert!(p[3].note.contains("missing TPC-H Q3"));
    }
}
