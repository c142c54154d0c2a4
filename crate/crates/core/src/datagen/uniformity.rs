//! Chi-square goodness of fit of generated columns against their declared
//! distributions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::domain::{declared_distribution, Distribution};
use super::{generate_table, GenError, GenSpec};
use crate::value::Cell;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareReport {
    pub n: u64,
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    /// Observations outside the declared domain; any makes `p_value` 0.
    pub out_of_domain: u64,
}

pub fn chi_square(observed: impl IntoIterator<Item = Cell>, dist: &Distribution) -> ChiSquareReport {
    let mut counts: HashMap<Cell, u64> = HashMap::new();
    let mut n = 0u64;
    for c in observed {
        *counts.entry(c).or_default() += 1;
        n += 1;
    }
    let mut statistic = 0.0;
    let mut in_domain = 0u64;
    for (cell, p) in &dist.outcomes {
        let o = counts.get(cell).copied().unwrap_or(0);
        in_domain += o;
        let e = p * n as f64;
        if e > 0.0 {
            statistic += (o as f64 - e).powi(2) / e;
        }
    }
    let out_of_domain = n - in_domain;
    let dof = dist.len().saturating_sub(1) as u64;
    let p_value = if out_of_domain > 0 {
        0.0
    } else if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).map_or(f64::NAN, |d| d.sf(statistic))
    };
    ChiSquareReport {
        n,
        statistic,
        dof,
        p_value,
        out_of_domain,
    }
}

const ORDER_LEVEL: [&str; 3] = ["LO_CUSTKEY", "LO_ORDERDATE", "LO_ORDERPRIORITY"];

/// Generates `table` and tests `column` against its declared distribution.
///
/// Order-level fact columns are drawn once per order and repeated on every
/// line, so they are counted on the first line of each order only.
pub fn uniformity_report(
    spec: &GenSpec,
    table: &str,
    column: &str,
) -> Result<ChiSquareReport, GenError> {
    let dist = declared_distribution(spec, table, column)?.ok_or_else(|| {
        GenError::InvalidSpec(format!("{table}.{column} has no declared distribution"))
    })?;
    let catalog = spec.catalog();
    let def = catalog
        .table(table)
        .ok_or_else(|| GenError::UnknownTable(table.to_string()))?;
    let idx = def
        .column_index(column)
        .ok_or_else(|| GenError::InvalidSpec(format!("unknown column {table}.{column}")))?;
    let per_order = def.name == "LINEORDER"
        && ORDER_LEVEL.iter().any(|c| c.eq_ignore_ascii_case(column));
    let linenumber = def.column_index("LO_LINENUMBER");
    let mut cells = Vec::new();
    for row in generate_table(spec, table)?.rows() {
        let row = row?;
        if per_order && linenumber.and_then(|i| row[i].as_int()) != Some(1) {
            continue;
        }
        cells.push(row[idx].canonical());
    }
    Ok(chi_square(cells, &dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Value;

    #[test]
    fn perfect_fit_has_zero_statistic() {
        let d = Distribution::uniform((1..=4).map(Value::Int));
        let obs = (0..400).map(|i| Value::Int(i % 4 + 1).canonical());
        let r = chi_square(obs, &d);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 3);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn statistic_matches_hand_computation() {
        // observed 30/10 against 1/2,1/2: (10² + 10²)/20 = 10
        let d = Distribution::uniform([Value::Int(0), Value::Int(1)]);
        let obs = (0..40).map(|i| Value::Int(i64::from(i >= 30)).canonical());
        let r = chi_square(obs, &d);
        assert!((r.statistic - 10.0).abs() < 1e-12);
        // 1 dof: sf(10) = erfc(sqrt(5))
        assert!((r.p_value - 0.001_565_4).abs() < 1e-6);
    }

    #[test]
    fn out_of_domain_fails() {
        let d = Distribution::uniform([Value::Int(0)]);
        let r = chi_square([Value::Int(7).canonical()], &d);
        assert_eq!(r.out_of_domain, 1);
        assert_eq!(r.p_value, 0.0);
    }
}
