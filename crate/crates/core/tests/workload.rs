use std::collections::BTreeSet;

use proptest::prelude::*;
use ssbkit_core::catalog::build_ssb_catalog;
use ssbkit_core::datagen::Benchmark;
use ssbkit_core::sql::{analyze, MemDatabase};
use ssbkit_core::workload::params::placeholders;
use ssbkit_core::workload::{
    coverage_report, instantiate_default, reference_catalog, template, tpch_counterpart,
    validate_sql, validate_template, Dimension, Violation, MAPPING,
};
use ssbkit_core::{cardinality, flight_catalog, generate_table, instantiate, GenSpec, ScaleFactor, Value};

fn sf(n: u64, d: u64) -> ScaleFactor {
    ScaleFactor::new(n, d).unwrap()
}

#[test]
fn thirteen_templates_in_four_flights() {
    let ts = flight_catalog();
    assert_eq!(ts.len(), 13);
    let sizes: Vec<usize> = (1..=4)
        .map(|f| ts.iter().filter(|t| t.flight == Some(f)).count())
        .collect();
    assert_eq!(sizes, vec![3, 3, 4, 3]);
    let catalog = build_ssb_catalog();
    for t in &ts {
        assert_eq!(validate_template(t, &catalog), vec![], "{}", t.id);
        assert_eq!(t.body.to_lowercase().matches("lineorder").count(), 1, "{}", t.id);
        if t.flight == Some(4) {
            assert!(t.body.contains("lo_revenue - lo_supplycost"), "{}", t.id);
        }
    }
    let f4: BTreeSet<Dimension> = ts
        .iter()
        .filter(|t| t.flight == Some(4))
        .flat_map(|t| t.dimensions.iter().copied())
        .collect();
    assert_eq!(f4.len(), 4);
}

#[test]
fn validator_flags_nesting_and_self_joins() {
    let c = build_ssb_catalog();
    assert_eq!(
        validate_sql(
            "select sum(lo_revenue) from lineorder where lo_custkey in (select c_custkey from customer)",
            &c
        ),
        vec![Violation::SubqueryForbidden]
    );
    assert_eq!(
        validate_sql(
            "select count(*) from lineorder a, lineorder b where a.lo_orderkey = b.lo_orderkey",
            &c
        ),
        vec![Violation::SelfJoinForbidden { table: "LINEORDER".into() }]
    );
    assert_eq!(validate_sql("select * from customer", &c), vec![Violation::FactTableMissing]);
    assert!(matches!(
        validate_sql("select sum( from lineorder", &c).as_slice(),
        [Violation::Unparseable { .. }]
    ));
    assert!(validate_sql("select 1 from lineorder, nation", &c)
        .contains(&Violation::UnknownTable { table: "NATION".into() }));
}

#[test]
fn mapping_reproduces_the_ten_pairs() {
    let expected = [
        (1, "Q6", "Q1.1"),
        (2, "Q6", "Q1.2"),
        (3, "Q6", "Q1.3"),
        (4, "Q3", "Q5.1"),
        (5, "Q3", "Q5.2"),
        (6, "Q3", "Q5.3"),
        (7, "Q2", "Q12.1"),
        (8, "Q2", "Q12.2"),
        (9, "Q5", "Q13.1"),
        (10, "Q5", "Q13.2"),
    ];
    let got: Vec<_> = MAPPING.iter().map(|e| (e.index, e.tpch, e.original_label)).collect();
    assert_eq!(got, expected);
    for e in MAPPING {
        let t = template(e.ssb).unwrap();
        assert_eq!(t.counterpart.as_deref(), Some(e.tpch));
        assert!(template(e.tpch).is_ok());
    }
    assert_eq!(tpch_counterpart("Q1.1").unwrap(), "Q6");
    assert_eq!(tpch_counterpart("Q12.1").unwrap(), "Q2");
    assert_eq!(tpch_counterpart("Q13.2").unwrap(), "Q5");
    assert_eq!(tpch_counterpart("Q4.2").unwrap(), "Q5");
    assert!(tpch_counterpart("Q4.3").is_err());
}

#[test]
fn reference_queries_render_without_estimate() {
    let ts = reference_catalog();
    assert_eq!(ts.iter().map(|t| t.id.as_str()).collect::<Vec<_>>(), ["Q2", "Q3", "Q5", "Q6"]);
    for t in &ts {
        assert_eq!(t.benchmark, Benchmark::Tpch);
        let q = instantiate(t, 9).unwrap();
        assert!(placeholders(&q.rendered_sql).is_empty());
        assert_eq!(q.estimated_filter_factor, None);
    }
}

#[test]
fn instantiation_is_deterministic_and_varies_with_seed() {
    for t in flight_catalog() {
        let a = instantiate(&t, 17).unwrap();
        assert_eq!(a, instantiate(&t, 17).unwrap());
        let distinct: BTreeSet<String> = (0..100).map(|s| instantiate(&t, s).unwrap().rendered_sql).collect();
        assert!(distinct.len() > 1, "{} never varies", t.id);
    }
}

#[test]
fn q1_1_default_factor_matches_closed_form() {
    let q = instantiate_default(&template("Q1.1").unwrap()).unwrap();
    // year 1993 over a 7-year calendar, 3 of 11 discounts, quantity 1..24 of 1..50
    let closed = (1.0 / 7.0) * (3.0 / 11.0) * (24.0 / 50.0);
    let ff = q.estimated_filter_factor.unwrap();
    assert!((ff / closed - 1.0).abs() < 0.01, "{ff} vs {closed}");
}

#[test]
fn q1_1_observed_fraction_within_15_percent() {
    let spec = GenSpec::new(sf(1, 100), 42);
    let q = instantiate_default(&template("Q1.1").unwrap()).unwrap();
    let est = q.estimated_filter_factor.unwrap();
    let catalog = spec.catalog();
    let lo = catalog.table("LINEORDER").unwrap();
    let [od, disc, qty] = ["LO_ORDERDATE", "LO_DISCOUNT", "LO_QUANTITY"].map(|c| lo.column_index(c).unwrap());
    // brute-force filter straight over generated rows
    let mut hits = 0u64;
    for r in generate_table(&spec, "LINEORDER").unwrap().rows() {
        let r = r.unwrap();
        let int = |i: usize| r[i].as_int().unwrap();
        if int(od) / 10000 == 1993 && (1..=3).contains(&int(disc)) && int(qty) < 25 {
            hits += 1;
        }
    }
    let total = cardinality("LINEORDER", spec.scale_factor).unwrap();
    let db = MemDatabase::from_generator(&spec).unwrap();
    assert_eq!(db.evaluator().count_matching(&q.rendered_sql).unwrap(), hits);
    let observed = hits as f64 / total as f64;
    assert!((observed / est - 1.0).abs() <= 0.15, "observed {observed} est {est}");
}

#[test]
fn flights_cover_dimensions_with_decreasing_selectivity() {
    let cov = coverage_report(&flight_catalog()).unwrap();
    assert_eq!(cov.len(), 4);
    assert_eq!(cov[3].dimensions.len(), 4);
    for f in &cov {
        assert!(f.strictly_decreasing, "flight {} {:?}", f.flight, f.filter_factors);
        assert!(f.min_filter_factor > 0.0 && f.max_filter_factor <= 1.0);
    }
    let single = coverage_report(&[template("Q2.1").unwrap()]).unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].min_filter_factor, single[0].max_filter_factor);
}

#[test]
fn unrestricted_query_has_unit_factor() {
    let mut t = template("Q1.1").unwrap();
    t.body = "select sum(lo_revenue) as revenue from lineorder".into();
    t.params.clear();
    assert_eq!(instantiate(&t, 1).unwrap().estimated_filter_factor, Some(1.0));
}

#[test]
fn unbound_placeholder_is_an_error() {
    let mut t = template("Q1.1").unwrap();
    t.params.pop();
    assert!(instantiate(&t, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instances_are_bound_and_factors_are_fractions(seed in any::<u64>(), idx in 0usize..13) {
        let t = &flight_catalog()[idx];
        let q = instantiate(t, seed).unwrap();
        prop_assert!(placeholders(&q.rendered_sql).is_empty());
        prop_assert!(validate_sql(&q.rendered_sql, &build_ssb_catalog()).is_empty());
        let ff = q.estimated_filter_factor.unwrap();
        prop_assert!(ff > 0.0 && ff <= 1.0, "{} {}", t.id, ff);
        for (name, v) in &q.params {
            prop_assert!(!matches!(v, Value::Null), "{} bound NULL", name);
        }
    }
}

#[test]
fn declared_dimensions_match_restricted_tables() {
    let catalog = build_ssb_catalog();
    for t in flight_catalog() {
        let q = instantiate_default(&t).unwrap();
        let shape = analyze(&q.rendered_sql, &catalog).unwrap();
        let restricted: BTreeSet<Dimension> = shape
            .local_predicates()
            .into_iter()
            .filter_map(|(table, _)| match table.as_str() {
                "DIM_DATE" => Some(Dimension::Date),
                "PART" => Some(Dimension::Part),
                "SUPPLIER" => Some(Dimension::Supplier),
                "CUSTOMER" => Some(Dimension::Customer),
                _ => None,
            })
            .collect();
        assert_eq!(restricted, t.dimensions, "{}", t.id);
    }
    let counts: BTreeSet<usize> = flight_catalog().iter().map(|t| t.dimensions.len()).collect();
    assert_eq!(counts, BTreeSet::from([1, 2, 3, 4]));
}
