use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssbkit_core::compression::bench::{compression_benchmark, to_csv, CSV_HEADER};
use ssbkit_core::compression::rle::runs;
use ssbkit_core::compression::{
    decode, encode, entropy, null_suppress_encode, read_container, rle_encode, sum_on_compressed, write_container,
    Codec, ColumnData, ColumnVector,
};
use ssbkit_core::datagen::Selection;
use ssbkit_core::{generate_all, generate_table, GenSpec, ScaleFactor};

fn run_list(e: &ssbkit_core::EncodedColumn) -> Vec<(i64, u64)> {
    runs(e).unwrap().map(Result::unwrap).collect()
}

fn lo_column(spec: &GenSpec, name: &str) -> Vec<i64> {
    let idx = spec.catalog().table("LINEORDER").unwrap().column_index(name).unwrap();
    generate_table(spec, "LINEORDER")
        .unwrap()
        .rows()
        .map(|r| r.unwrap()[idx].as_int().unwrap())
        .collect()
}

#[test]
fn sorted_orderdate_runs_equal_distinct_count() {
    let spec = GenSpec::new(ScaleFactor::new(1, 100).unwrap(), 42);
    let mut v = lo_column(&spec, "LO_ORDERDATE");
    let distinct: std::collections::HashSet<i64> = v.iter().copied().collect();
    v.sort_unstable();
    let e = rle_encode(&ColumnVector::ints(v.clone()));
    assert_eq!(e.run_count, Some(distinct.len() as u64));
    let raw = ColumnVector::ints(v.clone()).raw_bytes();
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(1));
    let shuffled = rle_encode(&ColumnVector::ints(v));
    assert!(e.ratio(raw) >= shuffled.ratio(raw));
}

#[test]
fn discount_entropy_near_log2_11() {
    let spec = GenSpec::new(ScaleFactor::new(1, 100).unwrap(), 42);
    let e = entropy("LO_DISCOUNT", &ColumnVector::ints(lo_column(&spec, "LO_DISCOUNT"))).unwrap();
    assert_eq!(e.distinct_count, 11);
    assert!((e.shannon_entropy_bits - 11f64.log2()).abs() < 0.1, "{}", e.shannon_entropy_bits);
}

#[test]
fn null_suppression_size_matches_byte_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let v: Vec<i64> = (0..10_000).map(|_| rng.gen_range(0..=255)).collect();
    // oracle: one tag byte per 4 values, one byte per non-zero value
    let expected = v.len().div_ceil(4) + v.iter().filter(|&&x| x != 0).count();
    let e = null_suppress_encode(&ColumnVector::ints(v.clone())).unwrap();
    assert_eq!(e.payload.len(), expected);
    assert!((e.payload.len() as f64) < 0.4 * (8 * v.len()) as f64);
}

#[test]
fn constant_column_ratio_at_least_half_length() {
    let n = 10_000;
    let v = ColumnVector::ints(vec![42; n]);
    let e = rle_encode(&v);
    assert!(e.ratio(v.raw_bytes()) >= n as f64 / 2.0);
}

#[test]
fn two_value_family_ratio_non_increasing_in_entropy() {
    let n = 1000;
    let mut points: Vec<(f64, f64)> = (0..=n / 2)
        .step_by(25)
        .map(|minority| {
            let mut v = vec![0i64; n - minority];
            v.extend(std::iter::repeat_n(1, minority));
            let col = ColumnVector::ints(v).sorted();
            let h = entropy("c", &col).unwrap().shannon_entropy_bits;
            (h, rle_encode(&col).ratio(col.raw_bytes()))
        })
        .collect();
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    assert!(points.windows(2).all(|w| w[1].1 <= w[0].1), "{points:?}");
}

#[test]
fn benchmark_over_generated_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = GenSpec::new(ScaleFactor::new(1, 1000).unwrap(), 3);
    generate_all(&spec, dir.path(), &Selection::ssb()).unwrap();
    let cols = vec!["LO_ORDERDATE".to_string(), "LINEORDER.LO_EXTENDEDPRICE".to_string()];
    let rows = compression_benchmark(dir.path(), &cols, &[]).unwrap();
    let rle = |sorted: bool| {
        rows.iter()
            .find(|r| r.column == "LO_ORDERDATE" && r.codec == "rle" && r.sorted == sorted)
            .unwrap()
            .ratio
    };
    assert!(rle(true) >= rle(false));
    assert!(rows.iter().all(|r| r.ratio.is_finite() && r.agg_ms >= 0.0));
    let csv = to_csv(&rows);
    assert!(csv.starts_with(CSV_HEADER));
    assert_eq!(csv.lines().count(), rows.len() + 1);
    let empty = tempfile::tempdir().unwrap();
    assert!(compression_benchmark(empty.path(), &cols, &[]).unwrap_err().to_string().contains("lineorder.tbl"));
}

fn ints() -> impl Strategy<Value = Vec<i64>> {
    prop_oneof![
        prop::collection::vec(any::<i64>(), 0..200),
        prop::collection::vec(0i64..4, 0..200),
        prop::collection::vec(-300i64..70_000, 0..200),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn every_codec_is_lossless(v in ints()) {
        let col = ColumnVector::ints(v);
        for codec in [Codec::Rle, Codec::NullSuppress, Codec::Heavy] {
            let e = encode(&col, codec).unwrap();
            prop_assert_eq!(&decode(&e).unwrap(), &col);
            prop_assert_eq!(&read_container(&write_container(&e).unwrap()).unwrap(), &e);
        }
    }

    #[test]
    fn text_codecs_are_lossless(v in prop::collection::vec("[a-c]{0,3}", 0..100)) {
        let col = ColumnVector::texts(v);
        for codec in [Codec::Rle, Codec::Heavy] {
            prop_assert_eq!(&decode(&encode(&col, codec).unwrap()).unwrap(), &col);
        }
    }

    #[test]
    fn runs_are_minimal_and_sum_matches(v in ints()) {
        let col = ColumnVector::ints(v.clone());
        let e = rle_encode(&col);
        let rs = run_list(&e);
        prop_assert!(rs.iter().all(|(_, n)| *n >= 1));
        prop_assert!(rs.windows(2).all(|w| w[0].0 != w[1].0));
        prop_assert_eq!(rs.iter().map(|(_, n)| n).sum::<u64>(), v.len() as u64);
        let decoded = decode(&e).unwrap();
        let ColumnData::Int(d) = &decoded.data else { unreachable!() };
        prop_assert_eq!(sum_on_compressed(&e).unwrap(), d.iter().map(|&x| i128::from(x)).sum::<i128>());
        let sorted = rle_encode(&col.sorted());
        prop_assert!(sorted.run_count <= e.run_count);
    }

    #[test]
    fn entropy_bounds(counts in prop::collection::vec(1usize..20, 1..8)) {
        let mut v = Vec::new();
        for (sym, &c) in counts.iter().enumerate() {
            v.extend(std::iter::repeat_n(sym as i64, c));
        }
        let r = entropy("c", &ColumnVector::ints(v)).unwrap();
        let max = (counts.len() as f64).log2();
        prop_assert!(r.shannon_entropy_bits >= 0.0);
        prop_assert!(r.shannon_entropy_bits <= max + 1e-9);
        let equal = counts.iter().all(|&c| c == counts[0]);
        prop_assert_eq!(equal, (r.shannon_entropy_bits - max).abs() < 1e-9);
    }
}
