//! Shared fixtures for the criterion benches.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssbkit_core::{generate_table, GenSpec, ScaleFactor};

pub const SEED: u64 = 42;

pub fn spec(num: u64, den: u64) -> GenSpec {
    GenSpec::new(ScaleFactor::new(num, den).expect("positive scale"), SEED)
}

/// One integer LINEORDER column in generation order.
pub fn lineorder_ints(spec: &GenSpec, column: &str) -> Vec<i64> {
    let idx = spec
        .catalog()
        .table("LINEORDER")
        .and_then(|t| t.column_index(column))
        .unwrap_or_else(|| panic!("no column {column}"));
    generate_table(spec, "LINEORDER")
        .expect("lineorder stream")
        .rows()
        .map(|r| r.expect("row")[idx].as_int().expect("integer column"))
        .collect()
}

pub fn shuffled(mut v: Vec<i64>) -> Vec<i64> {
    v.shuffle(&mut ChaCha8Rng::seed_from_u64(SEED));
    v
}
