use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ssbkit_bench::spec;
use ssbkit_core::harness::{create_schema, EngineAdapter};
use ssbkit_core::sql::reference::MemDatabase;
use ssbkit_core::workload::{instantiate_default, template};
use ssbkit_core::{generate_table, SqliteAdapter};

const QUERIES: [&str; 4] = ["Q1.1", "Q2.1", "Q3.1", "Q4.1"];

fn queries(c: &mut Criterion) {
    let s = spec(1, 1000);
    let db = MemDatabase::from_generator(&s).unwrap();
    let eval = db.evaluator();
    let catalog = s.catalog();
    let mut engine = SqliteAdapter::in_memory().unwrap();
    create_schema(&mut engine, &catalog).unwrap();
    for def in &catalog.tables {
        let mut rows = generate_table(&s, &def.name).unwrap().rows().map(|r| Ok(r.unwrap()));
        engine.bulk_load(def, &mut rows).unwrap();
    }
    let mut g = c.benchmark_group("query");
    for id in QUERIES {
        let sql = instantiate_default(&template(id).unwrap()).unwrap().rendered_sql;
        g.bench_with_input(BenchmarkId::new("reference", id), &sql, |b, sql| {
            b.iter(|| eval.evaluate(black_box(sql)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sqlite", id), &sql, |b, sql| {
            b.iter(|| engine.query(black_box(sql)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, queries);
criterion_main!(benches);
