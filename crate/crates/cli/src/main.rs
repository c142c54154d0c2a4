//! `ssbkit`: schema, data generation, workload, harness, compression and
//! reporting from one binary.
//!
//! Failures print exactly one line, `error: <kind>: <message>`, to stderr.
//! Usage errors exit 2, everything else exits 1.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ssbkit_core::catalog::{build_ssb_catalog, build_tpch_reference_catalog, emit_ddl, DdlOptions, KeyClauses, TypeMap};
use ssbkit_core::compression::bench::{compression_benchmark, to_csv, DEFAULT_COLUMNS};
use ssbkit_core::datagen::{Benchmark, Selection, REFERENCE_DIR};
use ssbkit_core::harness::engine::{CommandAdapter, CommandSpec};
use ssbkit_core::harness::plan::{DEFAULT_DISCARDED, DEFAULT_REPETITIONS};
use ssbkit_core::harness::run::{persist, DataProvenance};
use ssbkit_core::harness::{
    apply_indices, create_schema, load, table_files, Configuration, HarnessError, OrderingPolicy, RunManifest,
    RunStatus,
};
use ssbkit_core::report::generate_report;
use ssbkit_core::workload::{
    coverage_report, instantiate_default, reference_catalog, validate_template, QueryInstance, QueryTemplate, MAPPING,
};
use ssbkit_core::{
    advise_indices, build_plan, execute, flight_catalog, generate_all, instantiate, sha256_hex, EngineAdapter, GenSpec,
    Manifest, ScaleFactor, SqliteAdapter,
};

/// Environment variable naming the default output root.
const OUT_ENV: &str = "SSBKIT_OUT";

#[derive(Parser)]
#[command(name = "ssbkit", version, about = "Star Schema Benchmark toolkit")]
struct Cli {
    /// Root for default output locations (data, queries, runs, report).
    #[arg(long, global = true, env = OUT_ENV, default_value = "ssbkit-out")]
    out_root: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print CREATE TABLE statements for a schema variant.
    Ddl(DdlArgs),
    /// Generate .tbl files and a manifest.
    Gen(GenArgs),
    /// Instantiate query templates and write the SQL.
    Queries(QueriesArgs),
    /// Load generated data into an engine and time the workload.
    Run(RunArgs),
    /// Measure codecs on generated columns and write a CSV.
    Compress(CompressArgs),
    /// Aggregate run directories into CSV and plot-data files.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Ssb,
    Tpch,
}

#[derive(Clone, Copy, ValueEnum)]
enum Keys {
    None,
    Primary,
    PrimaryAndForeign,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Bench {
    Ssb,
    Tpch,
    All,
}

impl Bench {
    fn benchmarks(self) -> Vec<Benchmark> {
        match self {
            Bench::Ssb => vec![Benchmark::Ssb],
            Bench::Tpch => vec![Benchmark::Tpch],
            Bench::All => vec![Benchmark::Ssb, Benchmark::Tpch],
        }
    }
}

#[derive(Args)]
struct DdlArgs {
    /// Schema to emit.
    #[arg(long, value_enum, default_value = "ssb")]
    variant: Variant,
    /// Key clauses to include.
    #[arg(long, value_enum, default_value = "primary")]
    keys: Keys,
    /// Type map: neutral, sqlite, postgres or mysql.
    #[arg(long, default_value = "neutral")]
    types: String,
}

#[derive(Args)]
struct GenArgs {
    /// Scale factor, decimal (0.01) or fraction (1/3).
    #[arg(long)]
    sf: ScaleFactor,
    /// Seed for every generated value.
    #[arg(long)]
    seed: u64,
    /// Output directory [default: <out-root>/data/sf<sf>-seed<seed>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated table names; all tables when omitted.
    #[arg(long, value_delimiter = ',')]
    tables: Vec<String>,
    /// Which benchmark's tables to generate.
    #[arg(long, value_enum, default_value = "all")]
    benchmark: Bench,
}

#[derive(Args)]
struct QueriesArgs {
    /// Flight number 1-4; every flight when omitted.
    #[arg(long)]
    flight: Option<u8>,
    /// Seed for parameter draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bind each template's default parameters instead of drawing.
    #[arg(long)]
    default_params: bool,
    /// Also instantiate the TPC-H counterpart queries.
    #[arg(long)]
    reference: bool,
    /// Directory for <id>.sql files and instances.json; print only when omitted.
    #[arg(long)]
    emit: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Engine id: `sqlite`, or the engine_id of the --engine-spec file.
    #[arg(long, default_value = "sqlite")]
    engine: String,
    /// JSON connector description for an external engine client.
    #[arg(long)]
    engine_spec: Option<PathBuf>,
    /// out_of_box or indexed.
    #[arg(long, default_value = "out_of_box")]
    config: String,
    /// Scale factor the data was generated at.
    #[arg(long)]
    sf: ScaleFactor,
    /// Generation seed; also drives parameter draws and shuffles.
    #[arg(long)]
    seed: u64,
    /// Retained repetitions per query.
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    reps: u32,
    /// Cold runs executed and discarded before the retained ones.
    #[arg(long, default_value_t = DEFAULT_DISCARDED)]
    discard: u32,
    /// sequential, overlap_minimizing or seeded_shuffle.
    #[arg(long, default_value = "sequential")]
    order: String,
    /// Call the engine's cache-flush hook before every execution.
    #[arg(long)]
    flush_caches: bool,
    /// Bind default parameters instead of drawing them from --seed.
    #[arg(long)]
    default_params: bool,
    /// Which workloads to run.
    #[arg(long, value_enum, default_value = "all")]
    benchmark: Bench,
    /// Data directory [default: <out-root>/data/sf<sf>-seed<seed>].
    #[arg(long)]
    data: Option<PathBuf>,
    /// Output directory [default: <out-root>/runs/<engine>-<config>-sf<sf>-seed<seed>].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompressArgs {
    /// Data directory holding the SSB .tbl files.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated columns, optionally TABLE.COLUMN.
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Comma-separated sort keys for the sorted variant.
    #[arg(long, value_delimiter = ',')]
    sort_keys: Vec<String>,
    /// CSV path [default: <out-root>/compression.csv].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directories, or parents searched for run manifests [default: <out-root>/runs].
    #[arg(long, num_args = 1..)]
    runs: Vec<PathBuf>,
    /// CSV written by `compress`, copied to fig1.csv.
    #[arg(long)]
    compression: Option<PathBuf>,
    /// Output directory [default: <out-root>/report].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl fmt::Display) -> Self {
        Self {
            kind,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat = self.message.split_whitespace().collect::<Vec<_>>().join(" ");
        write!(f, "error: {}: {flat}", self.kind)
    }
}

fn fail<E: fmt::Display>(kind: &'static str) -> impl Fn(E) -> Failure {
    move |e| Failure::new(kind, e)
}

fn harness_failure(e: HarnessError) -> Failure {
    let kind = match e {
        HarnessError::MissingFiles(_) => "missing_files",
        HarnessError::Engine(_) => "engine",
        HarnessError::Config(_) => "config",
        _ => "harness",
    };
    Failure::new(kind, e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", Failure::new("usage", first));
            return ExitCode::from(2);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(if f.kind == "usage" { 2 } else { 1 })
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Ddl(a) => ddl(a),
        Command::Gen(a) => gen(&cli.out_root, a),
        Command::Queries(a) => queries(a),
        Command::Run(a) => run(&cli.out_root, a),
        Command::Compress(a) => compress(&cli.out_root, a),
        Command::Report(a) => report(&cli.out_root, a),
    }
}

fn sf_label(sf: ScaleFactor) -> String {
    sf.to_string().replace('/', "_")
}

fn data_dir(root: &Path, sf: ScaleFactor, seed: u64) -> PathBuf {
    root.join("data").join(format!("sf{}-seed{seed}", sf_label(sf)))
}

fn ddl(a: &DdlArgs) -> Result<(), Failure> {
    let catalog = match a.variant {
        Variant::Ssb => build_ssb_catalog(),
        Variant::Tpch => build_tpch_reference_catalog(),
    };
    let types = TypeMap::by_name(&a.types).ok_or_else(|| Failure::new("usage", format!("unknown type map {}", a.types)))?;
    let keys = match a.keys {
        Keys::None => KeyClauses::None,
        Keys::Primary => KeyClauses::PrimaryOnly,
        Keys::PrimaryAndForeign => KeyClauses::PrimaryAndForeign,
    };
    let sql = emit_ddl(&catalog, &DdlOptions { keys, types }).map_err(fail("ddl"))?;
    print!("{sql}");
    Ok(())
}

fn gen(root: &Path, a: &GenArgs) -> Result<(), Failure> {
    let spec = GenSpec::new(a.sf, a.seed);
    let out = a.out.clone().unwrap_or_else(|| data_dir(root, a.sf, a.seed));
    let selection = Selection {
        benchmarks: a.benchmark.benchmarks(),
        tables: a.tables.clone(),
    };
    for t in &a.tables {
        let known = selection.benchmarks.iter().any(|b| match b {
            Benchmark::Ssb => spec.catalog().contains(t),
            Benchmark::Tpch => build_tpch_reference_catalog().contains(t),
        });
        if !known {
            return Err(Failure::new("usage", format!("unknown table {t}")));
        }
    }
    let manifest = generate_all(&spec, &out, &selection).map_err(fail("gen"))?;
    for t in &manifest.tables {
        println!("{}\t{}\t{}\t{}", t.file, t.rows, t.sha256, t.benchmark.name());
    }
    println!("manifest\t{}", out.join(Manifest::FILE_NAME).display());
    Ok(())
}

fn select_templates(flight: Option<u8>, reference: bool) -> Result<Vec<QueryTemplate>, Failure> {
    let mut templates: Vec<QueryTemplate> = flight_catalog()
        .into_iter()
        .filter(|t| flight.is_none_or(|f| t.flight == Some(f)))
        .collect();
    if templates.is_empty() {
        return Err(Failure::new("usage", format!("no flight {}", flight.unwrap_or(0))));
    }
    if reference {
        let wanted: Vec<String> = templates.iter().filter_map(|t| t.counterpart.clone()).collect();
        templates.extend(reference_catalog().into_iter().filter(|r| wanted.contains(&r.id)));
    }
    Ok(templates)
}

fn bind_all(templates: &[QueryTemplate], seed: u64, defaults: bool) -> Result<Vec<QueryInstance>, Failure> {
    templates
        .iter()
        .map(|t| if defaults { instantiate_default(t) } else { instantiate(t, seed) })
        .collect::<Result<_, _>>()
        .map_err(fail("workload"))
}

fn queries(a: &QueriesArgs) -> Result<(), Failure> {
    let templates = select_templates(a.flight, a.reference)?;
    let ssb = build_ssb_catalog();
    for t in templates.iter().filter(|t| t.benchmark == Benchmark::Ssb) {
        let v = validate_template(t, &ssb);
        if !v.is_empty() {
            return Err(Failure::new("workload", format!("{} is invalid: {v:?}", t.id)));
        }
    }
    let instances = bind_all(&templates, a.seed, a.default_params)?;
    if let Some(dir) = &a.emit {
        fs::create_dir_all(dir).map_err(|e| Failure::new("io", format!("{}: {e}", dir.display())))?;
        for i in &instances {
            let path = dir.join(format!("{}.sql", i.template_id));
            fs::write(&path, format!("{}\n", i.rendered_sql.trim_end()))
                .map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
        }
        let path = dir.join("instances.json");
        let json = serde_json::to_string_pretty(&instances).map_err(fail("io"))?;
        fs::write(&path, json + "\n").map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
    }
    for i in &instances {
        let ff = i.estimated_filter_factor.map_or("-".to_string(), |f| format!("{f:.9}"));
        println!("{}\t{}\t{ff}", i.template_id, i.benchmark.name());
    }
    let ssb_templates: Vec<QueryTemplate> = templates.into_iter().filter(|t| t.benchmark == Benchmark::Ssb).collect();
    for c in coverage_report(&ssb_templates).map_err(fail("workload"))? {
        println!(
            "flight {}\tmin {:.9}\tmax {:.9}\tstrictly_decreasing {}",
            c.flight, c.min_filter_factor, c.max_filter_factor, c.strictly_decreasing
        );
    }
    Ok(())
}

fn adapter_for(a: &RunArgs) -> Result<Box<dyn EngineAdapter>, Failure> {
    match &a.engine_spec {
        None if a.engine == SqliteAdapter::ENGINE_ID => {
            Ok(Box::new(SqliteAdapter::in_memory().map_err(harness_failure)?))
        }
        None => Err(Failure::new(
            "usage",
            format!("engine {} needs --engine-spec", a.engine),
        )),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{}: {e}", path.display())))?;
            let spec: CommandSpec =
                serde_json::from_str(&text).map_err(|e| Failure::new("config", format!("{}: {e}", path.display())))?;
            if spec.engine_id != a.engine {
                return Err(Failure::new(
                    "config",
                    format!("--engine {} does not match engine_id {}", a.engine, spec.engine_id),
                ));
            }
            Ok(Box::new(CommandAdapter::new(spec).map_err(harness_failure)?))
        }
    }
}

fn run(root: &Path, a: &RunArgs) -> Result<(), Failure> {
    let configuration =
        Configuration::parse(&a.config).ok_or_else(|| Failure::new("usage", format!("unknown config {}", a.config)))?;
    let policy = OrderingPolicy::parse(&a.order).ok_or_else(|| Failure::new("usage", format!("unknown order {}", a.order)))?;
    if a.reps == 0 {
        return Err(Failure::new("usage", "--reps must be at least 1"));
    }
    let data = a.data.clone().unwrap_or_else(|| data_dir(root, a.sf, a.seed));
    let benchmarks = a.benchmark.benchmarks();
    let spec = GenSpec::new(a.sf, a.seed);
    let catalog_of = |b: Benchmark| match b {
        Benchmark::Ssb => (spec.catalog(), data.clone()),
        Benchmark::Tpch => (build_tpch_reference_catalog(), data.join(REFERENCE_DIR)),
    };

    let mut missing = Vec::new();
    let manifest_path = data.join(Manifest::FILE_NAME);
    if !manifest_path.is_file() {
        missing.push(manifest_path.clone());
    }
    let mut files = Vec::new();
    for &b in &benchmarks {
        let (catalog, dir) = catalog_of(b);
        match table_files(&catalog, &dir) {
            Ok(f) => files.push(f),
            Err(HarnessError::MissingFiles(m)) => missing.extend(m),
            Err(e) => return Err(harness_failure(e)),
        }
    }
    if !missing.is_empty() {
        return Err(harness_failure(HarnessError::MissingFiles(missing)));
    }
    let manifest_bytes =
        fs::read(&manifest_path).map_err(|e| Failure::new("io", format!("{}: {e}", manifest_path.display())))?;
    let manifest = Manifest::read(&data).map_err(fail("gen"))?;
    if manifest.spec.scale_factor != a.sf || manifest.spec.seed != a.seed {
        return Err(Failure::new(
            "mismatch",
            format!(
                "{} holds sf {} seed {}, not sf {} seed {}",
                data.display(),
                manifest.spec.scale_factor,
                manifest.spec.seed,
                a.sf,
                a.seed
            ),
        ));
    }

    let out = a.out.clone().unwrap_or_else(|| {
        root.join("runs")
            .join(format!("{}-{}-sf{}-seed{}", a.engine, configuration.name(), sf_label(a.sf), a.seed))
    });
    for (&b, files) in benchmarks.iter().zip(&files) {
        let (catalog, _) = catalog_of(b);
        let templates = match b {
            Benchmark::Ssb => flight_catalog(),
            Benchmark::Tpch => reference_catalog(),
        };
        let instances = bind_all(&templates, a.seed, a.default_params)?;
        let mut adapter = adapter_for(a)?;
        create_schema(adapter.as_mut(), &catalog).map_err(harness_failure)?;
        let loaded = load(adapter.as_mut(), &catalog, files).map_err(harness_failure)?;
        let indices = match configuration {
            Configuration::OutOfBox => Vec::new(),
            Configuration::Indexed => {
                let advice = advise_indices(&instances, &catalog);
                apply_indices(adapter.as_mut(), &advice).map_err(harness_failure)?;
                advice
            }
        };
        let mut plan = build_plan(instances, &a.engine, configuration, policy, a.seed);
        plan.repetitions = a.reps;
        plan.cold_runs_discarded = a.discard;
        plan.flush_caches = a.flush_caches;
        let execution = execute(adapter.as_mut(), &plan);
        let provenance = DataProvenance {
            manifest_sha256: sha256_hex(&manifest_bytes),
            spec_hash: manifest.spec_hash.clone(),
            tables: manifest
                .tables
                .iter()
                .filter(|t| t.benchmark == b)
                .map(|t| (t.file.clone(), t.sha256.clone()))
                .collect(),
        };
        let run_manifest = RunManifest {
            plan_id: plan.plan_id(),
            engine_version: adapter.version(),
            plan,
            data: Some(provenance),
            indices,
            explains: execution.explains,
            records_file: RunManifest::RECORDS_FILE.to_string(),
        };
        let dir = out.join(b.name());
        persist(&dir, &run_manifest, &execution.records).map_err(harness_failure)?;
        let failed = execution.records.iter().filter(|r| r.status == RunStatus::Failed).count();
        println!(
            "{}\t{}\tplan {}\tloaded {} rows in {:.1} ms\t{} records\t{failed} failed",
            b.name(),
            dir.display(),
            run_manifest.plan_id,
            loaded.tables.iter().map(|t| t.rows).sum::<u64>(),
            loaded.duration_ms,
            execution.records.len(),
        );
    }
    Ok(())
}

fn compress(root: &Path, a: &CompressArgs) -> Result<(), Failure> {
    let columns: Vec<String> = if a.columns.is_empty() {
        DEFAULT_COLUMNS.iter().map(|c| c.to_string()).collect()
    } else {
        a.columns.clone()
    };
    let rows = compression_benchmark(&a.data, &columns, &a.sort_keys).map_err(|e| {
        use ssbkit_core::compression::bench::BenchError;
        match e {
            BenchError::MissingFile(_) => Failure::new("missing_files", e),
            BenchError::UnknownColumn(_) | BenchError::BadSortKey { .. } | BenchError::NotNumeric(_) => {
                Failure::new("usage", e)
            }
            _ => Failure::new("compress", e),
        }
    })?;
    let out = a.out.clone().unwrap_or_else(|| root.join("compression.csv"));
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Failure::new("io", format!("{}: {e}", parent.display())))?;
    }
    let csv = to_csv(&rows);
    fs::write(&out, &csv).map_err(|e| Failure::new("io", format!("{}: {e}", out.display())))?;
    print!("{csv}");
    Ok(())
}

/// `dir` itself if it holds a run manifest, else every run directory below it.
fn find_runs(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), Failure> {
    if dir.join(RunManifest::FILE_NAME).is_file() {
        out.push(dir.to_path_buf());
        return Ok(());
    }
    let entries = fs::read_dir(dir).map_err(|e| Failure::new("missing_files", format!("{}: {e}", dir.display())))?;
    let mut subdirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    for d in subdirs {
        find_runs(&d, out)?;
    }
    Ok(())
}

fn report(root: &Path, a: &ReportArgs) -> Result<(), Failure> {
    let roots = if a.runs.is_empty() {
        vec![root.join("runs")]
    } else {
        a.runs.clone()
    };
    let mut dirs = Vec::new();
    for r in &roots {
        find_runs(r, &mut dirs)?;
    }
    if dirs.is_empty() {
        return Err(Failure::new(
            "missing_files",
            format!("no {} under {}", RunManifest::FILE_NAME, roots.iter().map(|r| r.display().to_string()).collect::<Vec<_>>().join(", ")),
        ));
    }
    let out = a.out.clone().unwrap_or_else(|| root.join("report"));
    let summary = generate_report(&dirs, &MAPPING, a.compression.as_deref(), &out).map_err(fail("report"))?;
    for f in &summary.files {
        println!("{}", f.display());
    }
    println!(
        "provenance\t{}\taggregate_rows {}\tpaired_rows {}",
        summary.provenance, summary.aggregate_rows, summary.paired_rows
    );
    Ok(())
}
