use std::fs;

use proptest::prelude::*;
use ssbkit_core::datagen::Benchmark;
use ssbkit_core::harness::run::persist;
use ssbkit_core::harness::{build_plan, Configuration, OrderingPolicy, RunManifest, RunRecord, RunStatus};
use ssbkit_core::report::generate_report;
use ssbkit_core::workload::{instantiate_default, MAPPING};
use ssbkit_core::{aggregate, flight_catalog};

fn record(query: &str, bench: Benchmark, cfg: Configuration, ms: f64, ok: bool) -> RunRecord {
    RunRecord {
        plan_id: "plan".into(),
        engine: "sqlite".into(),
        configuration: cfg,
        benchmark: bench,
        query: query.into(),
        repetition: 1,
        wall_time_ms: ms,
        row_count: 0,
        started_at: "2020-01-01T00:00:00.000000Z".into(),
        finished_at: "2020-01-01T00:00:00.000001Z".into(),
        status: if ok { RunStatus::Ok } else { RunStatus::Failed },
        error: None,
        result_digest: None,
    }
}

fn records() -> impl Strategy<Value = Vec<RunRecord>> {
    let one = (0usize..4, any::<bool>(), 0.0f64..1e4, prop::bool::weighted(0.9)).prop_map(|(q, idx, ms, ok)| {
        let (label, bench) = [("Q1.1", Benchmark::Ssb), ("Q6", Benchmark::Tpch), ("Q2.1", Benchmark::Ssb), ("Q2", Benchmark::Tpch)][q];
        let cfg = if idx { Configuration::Indexed } else { Configuration::OutOfBox };
        record(label, bench, cfg, ms, ok)
    });
    prop::collection::vec(one, 0..40)
}

proptest! {
    #[test]
    fn aggregate_ignores_record_order(rs in records(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = rs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = aggregate(&rs);
        prop_assert_eq!(&a, &aggregate(&shuffled));
        for row in &a {
            prop_assert!(row.count >= 1);
            prop_assert!(row.min_ms <= row.mean_ms && row.mean_ms <= row.max_ms);
        }
        let ok = rs.iter().filter(|r| r.status == RunStatus::Ok).count() as u32;
        prop_assert_eq!(a.iter().map(|r| r.count).sum::<u32>(), ok);
    }
}

#[test]
fn report_is_pure_and_stamped() {
    let dir = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for cfg in [Configuration::OutOfBox, Configuration::Indexed] {
        let insts = flight_catalog().iter().map(|t| instantiate_default(t).unwrap()).collect();
        let plan = build_plan(insts, "sqlite", cfg, OrderingPolicy::Sequential, 0);
        let mut recs = Vec::new();
        for e in MAPPING {
            recs.push(record(e.ssb, Benchmark::Ssb, cfg, 2.0, true));
            recs.push(record(e.tpch, Benchmark::Tpch, cfg, 6.0, true));
        }
        let manifest = RunManifest {
            plan_id: plan.plan_id(),
            plan,
            engine_version: "SQLite test".into(),
            data: None,
            indices: vec![],
            explains: vec![],
            records_file: RunManifest::RECORDS_FILE.into(),
        };
        let d = dir.path().join(cfg.name());
        persist(&d, &manifest, &recs).unwrap();
        dirs.push(d);
    }
    let before: Vec<Vec<u8>> = dirs.iter().map(|d| fs::read(d.join("records.jsonl")).unwrap()).collect();
    let out = dir.path().join("report");
    let a = generate_report(&dirs, &MAPPING, None, &out).unwrap();
    let first = fs::read(out.join("paired_out_of_box.csv")).unwrap();
    let b = generate_report(&dirs, &MAPPING, None, &out).unwrap();
    assert_eq!(a, b);
    assert_eq!(first, fs::read(out.join("paired_out_of_box.csv")).unwrap());
    let after: Vec<Vec<u8>> = dirs.iter().map(|d| fs::read(d.join("records.jsonl")).unwrap()).collect();
    assert_eq!(before, after);
    let paired = String::from_utf8(first).unwrap();
    assert_eq!(paired.lines().count(), 11);
    assert!(paired.lines().skip(1).all(|l| l.contains(",3.000000,") && l.ends_with(&a.provenance)));
    for f in ["fig4.csv", "fig5.csv", "fig6.csv", "fig7.csv", "aggregate.csv", "paired_indexed.csv"] {
        let text = fs::read_to_string(out.join(f)).unwrap();
        assert!(text.lines().skip(1).all(|l| l.ends_with(&a.provenance)), "{f}");
        assert!(text.lines().count() > 1, "{f}");
    }
    let plot: serde_json::Value = serde_json::from_slice(&fs::read(out.join("plot_data.json")).unwrap()).unwrap();
    assert_eq!(plot["figures"].as_array().unwrap().len(), 4);
    assert_eq!(plot["provenance"], a.provenance.as_str());
}
