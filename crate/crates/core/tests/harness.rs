use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use ssbkit_core::catalog::{build_ssb_catalog, SchemaCatalog};
use ssbkit_core::datagen::Selection;
use ssbkit_core::harness::run::{read_records, write_records};
use ssbkit_core::harness::{
    apply_indices, create_schema, load, table_files, Configuration, HarnessError, OrderingPolicy, RunStatus,
};
use ssbkit_core::harness::plan::disjoint_adjacencies;
use ssbkit_core::sql::MemDatabase;
use ssbkit_core::workload::{instantiate_default, template};
use ssbkit_core::{
    advise_indices, build_plan, execute, flight_catalog, generate_all, instantiate, EngineAdapter, GenSpec,
    QueryInstance, ScaleFactor, SqliteAdapter,
};

fn spec() -> GenSpec {
    GenSpec::new(ScaleFactor::new(1, 100).unwrap(), 42)
}

fn loaded(dir: &Path, catalog: &SchemaCatalog) -> SqliteAdapter {
    let mut db = SqliteAdapter::in_memory().unwrap();
    create_schema(&mut db, catalog).unwrap();
    load(&mut db, catalog, &table_files(catalog, dir).unwrap()).unwrap();
    db
}

fn instances() -> Vec<QueryInstance> {
    let mut out = Vec::new();
    for t in flight_catalog() {
        out.push(instantiate_default(&t).unwrap());
        out.push(instantiate(&t, 7).unwrap());
    }
    out
}

/// Column names appearing after WHERE, found by plain token scanning.
fn where_columns(sql: &str, catalog: &SchemaCatalog) -> BTreeSet<String> {
    let lower = sql.to_ascii_lowercase().split_whitespace().collect::<Vec<_>>().join(" ");
    let start = lower.find(" where ").map_or(lower.len(), |i| i + 7);
    let end = ["group by", "order by", "limit"]
        .iter()
        .filter_map(|k| lower[start..].find(k).map(|i| start + i))
        .min()
        .unwrap_or(lower.len());
    let mut in_string = false;
    let mut cleaned = String::new();
    for ch in lower[start..end].chars() {
        if ch == '\'' {
            in_string = !in_string;
            cleaned.push(' ');
        } else {
            cleaned.push(if in_string { ' ' } else { ch });
        }
    }
    cleaned
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .map(str::to_ascii_uppercase)
        .filter(|tok| catalog.tables.iter().any(|t| t.column(tok).is_some()))
        .collect()
}

#[test]
fn sqlite_matches_reference_in_both_configurations() {
    let dir = tempfile::tempdir().unwrap();
    let spec = spec();
    generate_all(&spec, dir.path(), &Selection::ssb()).unwrap();
    let catalog = build_ssb_catalog();
    let mut db = loaded(dir.path(), &catalog);
    let reference = MemDatabase::load_dir(catalog.clone(), dir.path()).unwrap();
    let from_gen = MemDatabase::from_generator(&spec).unwrap();
    let insts = instances();
    let mut out_of_box = Vec::new();
    for q in &insts {
        let engine = db.query(&q.rendered_sql).unwrap();
        let expected = reference.evaluator().evaluate(&q.rendered_sql).unwrap();
        assert!(
            engine.same_multiset(&expected),
            "{}: {:?}",
            q.template_id,
            engine.first_difference(&expected)
        );
        assert_eq!(expected.digest(), from_gen.evaluator().evaluate(&q.rendered_sql).unwrap().digest());
        out_of_box.push(engine.digest());
    }
    let advice = advise_indices(&insts, &catalog);
    apply_indices(&mut db, &advice).unwrap();
    let indexes = db
        .query("select count(*) from sqlite_master where type = 'index' and name like 'idx_%'")
        .unwrap();
    assert_eq!(indexes.rows[0][0], ssbkit_core::Value::Int(advice.len() as i64).canonical());
    for (q, before) in insts.iter().zip(&out_of_box) {
        assert_eq!(&db.query(&q.rendered_sql).unwrap().digest(), before, "{}", q.template_id);
    }
}

#[test]
fn advice_covers_every_where_column() {
    let catalog = build_ssb_catalog();
    let insts: Vec<QueryInstance> = flight_catalog().iter().map(|t| instantiate_default(t).unwrap()).collect();
    let advice = advise_indices(&insts, &catalog);
    for q in &insts {
        let wanted = where_columns(&q.rendered_sql, &catalog);
        assert!(!wanted.is_empty());
        for col in wanted {
            assert!(
                advice.iter().any(|a| a.columns.contains(&col) && a.origins.contains(&q.template_id)),
                "{} {col}",
                q.template_id
            );
        }
    }
    for a in &advice {
        let t = catalog.table(&a.table).unwrap();
        assert!(a.columns.iter().all(|c| t.column(c).is_some()));
    }
    assert_eq!(advice, advise_indices(&insts, &catalog));
}

#[test]
fn load_checks_files() {
    let catalog = build_ssb_catalog();
    let dir = tempfile::tempdir().unwrap();
    let mut db = SqliteAdapter::in_memory().unwrap();
    create_schema(&mut db, &catalog).unwrap();
    assert!(load(&mut db, &catalog, &[]).unwrap().tables.is_empty());
    match table_files(&catalog, dir.path()) {
        Err(HarnessError::MissingFiles(files)) => {
            assert_eq!(files.len(), 5);
            assert!(files.iter().any(|p| p.ends_with("lineorder.tbl")));
        }
        other => panic!("{other:?}"),
    }
    let path = dir.path().join("supplier.tbl");
    fs::write(
        &path,
        "1|Supplier#000000001|addr|ALGERIA  3|ALGERIA|AFRICA|10-100-100-1000|\n2|Supplier#000000002|addr|\n",
    )
    .unwrap();
    let err = load(&mut db, &catalog, &[("SUPPLIER".into(), path)]).unwrap_err();
    assert!(err.to_string().contains("supplier.tbl:2"), "{err}");
}

#[test]
fn loads_sf_001_counts() {
    let dir = tempfile::tempdir().unwrap();
    generate_all(&spec(), dir.path(), &Selection::ssb()).unwrap();
    let catalog = build_ssb_catalog();
    let mut db = SqliteAdapter::in_memory().unwrap();
    create_schema(&mut db, &catalog).unwrap();
    let report = load(&mut db, &catalog, &table_files(&catalog, dir.path()).unwrap()).unwrap();
    assert_eq!(report.rows("LINEORDER"), Some(60_000));
    assert_eq!(report.rows("CUSTOMER"), Some(300));
    assert_eq!(report.rows("DIM_DATE"), Some(2557));
}

fn q(id: &str) -> QueryInstance {
    instantiate_default(&template(id).unwrap()).unwrap()
}

#[test]
fn overlap_minimizing_is_optimal_on_three() {
    let items = vec![q("Q1.1"), q("Q1.2"), q("Q2.1")];
    let plan = build_plan(items.clone(), "sqlite", Configuration::OutOfBox, OrderingPolicy::OverlapMinimizing, 0);
    // exhaustive oracle over all permutations
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let best = perms
        .iter()
        .map(|p| disjoint_adjacencies(&p.map(|i| items[i].clone())))
        .max()
        .unwrap();
    assert_eq!(disjoint_adjacencies(&plan.instances), best);
    let ids: Vec<&str> = plan.instances.iter().map(|i| i.template_id.as_str()).collect();
    assert!(ids.windows(2).all(|w| !(w[0].starts_with("Q1") && w[1].starts_with("Q1"))), "{ids:?}");
}

#[test]
fn plan_policies() {
    let one = vec![q("Q3.1")];
    for p in [OrderingPolicy::Sequential, OrderingPolicy::OverlapMinimizing, OrderingPolicy::SeededShuffle] {
        assert_eq!(build_plan(one.clone(), "sqlite", Configuration::OutOfBox, p, 3).instances, one);
    }
    let all: Vec<QueryInstance> = flight_catalog().iter().map(|t| instantiate_default(t).unwrap()).collect();
    let a = build_plan(all.clone(), "sqlite", Configuration::OutOfBox, OrderingPolicy::SeededShuffle, 5);
    let b = build_plan(all.clone(), "sqlite", Configuration::OutOfBox, OrderingPolicy::SeededShuffle, 5);
    assert_eq!(a.instances, b.instances);
    let mut ids: Vec<String> = a.instances.iter().map(|i| i.template_id.clone()).collect();
    ids.sort();
    let mut orig: Vec<String> = all.iter().map(|i| i.template_id.clone()).collect();
    orig.sort();
    assert_eq!(ids, orig);
    assert_eq!(a.repetitions, 3);
    assert_eq!(a.cold_runs_discarded, 1);
    assert!(!a.flush_caches);
}

fn tiny_db() -> SqliteAdapter {
    let mut db = SqliteAdapter::in_memory().unwrap();
    create_schema(&mut db, &build_ssb_catalog()).unwrap();
    db
}

#[test]
fn execute_counts_and_failures() {
    let mut db = tiny_db();
    let mut broken = q("Q2.1");
    broken.template_id = "BROKEN".into();
    broken.rendered_sql = "select nope from lineorder".into();
    let plan = build_plan(
        vec![q("Q1.1"), broken, q("Q3.1")],
        "sqlite",
        Configuration::OutOfBox,
        OrderingPolicy::Sequential,
        0,
    );
    let run = execute(&mut db, &plan);
    assert_eq!(run.records.len(), 9);
    assert_eq!(run.explains.len(), 3);
    let failed: Vec<_> = run.records.iter().filter(|r| r.status == RunStatus::Failed).collect();
    assert_eq!(failed.len(), 3);
    assert!(failed.iter().all(|r| r.query == "BROKEN" && r.error.is_some()));
    // empty tables: Q1.1 still returns its single aggregate row, Q3.1 none
    let q31: Vec<_> = run.records.iter().filter(|r| r.query == "Q3.1").collect();
    assert!(q31.iter().all(|r| r.status == RunStatus::Ok && r.row_count == 0));
    assert_eq!(q31.iter().map(|r| r.repetition).collect::<Vec<_>>(), [1, 2, 3]);
    for w in run.records.windows(2) {
        assert!(w[0].finished_at <= w[1].started_at);
        assert!(w[0].wall_time_ms >= 0.0);
    }
    let two = build_plan(vec![q("Q1.1"), q("Q1.2")], "sqlite", Configuration::Indexed, OrderingPolicy::Sequential, 0);
    assert_eq!(execute(&mut db, &two).records.len(), 6);
}

#[test]
fn rerun_repeats_row_counts_and_records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    generate_all(&spec(), dir.path(), &Selection::ssb()).unwrap();
    let catalog = build_ssb_catalog();
    let mut db = loaded(dir.path(), &catalog);
    let insts: Vec<QueryInstance> = ["Q2.1", "Q3.2", "Q4.3"].iter().map(|id| q(id)).collect();
    let plan = build_plan(insts, db.engine_id(), Configuration::OutOfBox, OrderingPolicy::Sequential, 0);
    let a = execute(&mut db, &plan).records;
    let b = execute(&mut db, &plan).records;
    let counts = |r: &[ssbkit_core::RunRecord]| r.iter().map(|x| (x.query.clone(), x.row_count)).collect::<Vec<_>>();
    assert_eq!(counts(&a), counts(&b));
    let path = dir.path().join("records.jsonl");
    write_records(&path, &a).unwrap();
    assert_eq!(read_records(&path).unwrap(), a);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), a.len());
}
