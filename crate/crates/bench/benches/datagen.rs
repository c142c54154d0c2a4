use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ssbkit_bench::spec;
use ssbkit_core::datagen::tbl::render_row;
use ssbkit_core::generate_table;

fn tables(c: &mut Criterion) {
    let s = spec(1, 100);
    let mut g = c.benchmark_group("generate");
    g.sample_size(10);
    for table in ["LINEORDER", "CUSTOMER", "PART", "DIM_DATE"] {
        let rows = s.cardinality(table).unwrap();
        g.throughput(Throughput::Elements(rows));
        g.bench_function(BenchmarkId::new("rows", table), |b| {
            b.iter(|| generate_table(&s, table).unwrap().rows().map(|r| r.unwrap().len()).sum::<usize>())
        });
    }
    g.finish();
}

fn render(c: &mut Criterion) {
    let s = spec(1, 100);
    let chunk = generate_table(&s, "LINEORDER").unwrap().chunk(0).unwrap();
    let mut g = c.benchmark_group("render");
    g.throughput(Throughput::Elements(chunk.len() as u64));
    g.bench_function("lineorder_chunk", |b| {
        b.iter(|| {
            let mut out = String::new();
            for row in &chunk {
                render_row(black_box(row), &mut out);
            }
            out.len()
        })
    });
    g.finish();
}

criterion_group!(benches, tables, render);
criterion_main!(benches);
