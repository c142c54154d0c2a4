//! Declared value distributions of the generated columns.

use super::calendar::datekey;
use super::hierarchy::{
    all_cities, part_labels, HierarchySpec, COLORS, NATIONS, PRIORITIES, REGIONS, SEGMENTS,
    SHIP_MODES,
};
use super::ssb::{DISCOUNT_RANGE, QUANTITY_RANGE, TAX_RANGE};
use super::{GenError, GenSpec};
use crate::value::{Cell, Value};

/// Outcomes with their probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub outcomes: Vec<(Cell, f64)>,
}

impl Distribution {
    pub fn uniform(values: impl IntoIterator<Item = Value>) -> Self {
        let cells: Vec<Cell> = values.into_iter().map(|v| v.canonical()).collect();
        let p = 1.0 / cells.len() as f64;
        Self {
            outcomes: cells.into_iter().map(|c| (c, p)).collect(),
        }
    }

    fn ints(lo: i64, hi: i64) -> Self {
        Self::uniform((lo..=hi).map(Value::Int))
    }

    fn texts(xs: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self::uniform(xs.into_iter().map(|s| Value::Text(s.into())))
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn probability(&self, cell: &Cell) -> f64 {
        self.outcomes
            .iter()
            .find(|(c, _)| c == cell)
            .map_or(0.0, |(_, p)| *p)
    }
}

/// The distribution a column is drawn from, for columns drawn at random.
pub fn declared_distribution(
    spec: &GenSpec,
    table: &str,
    column: &str,
) -> Result<Option<Distribution>, GenError> {
    let table = table.to_ascii_uppercase();
    let column = column.to_ascii_uppercase();
    let keys = |t: &str| -> Result<Distribution, GenError> {
        Ok(Distribution::ints(1, spec.cardinality(t)? as i64))
    };
    let parts = || part_labels(&HierarchySpec::part());
    let d = match (table.as_str(), column.as_str()) {
        ("LINEORDER", "LO_QUANTITY") => Distribution::ints(QUANTITY_RANGE.0, QUANTITY_RANGE.1),
        ("LINEORDER", "LO_DISCOUNT") => Distribution::ints(DISCOUNT_RANGE.0, DISCOUNT_RANGE.1),
        ("LINEORDER", "LO_TAX") => Distribution::ints(TAX_RANGE.0, TAX_RANGE.1),
        ("LINEORDER", "LO_SHIPMODE") => Distribution::texts(SHIP_MODES),
        ("LINEORDER", "LO_ORDERPRIORITY") => Distribution::texts(PRIORITIES),
        ("LINEORDER", "LO_SHIPPRIORITY") => Distribution::ints(0, 0),
        ("LINEORDER", "LO_CUSTKEY") => keys("CUSTOMER")?,
        ("LINEORDER", "LO_PARTKEY") => keys("PART")?,
        ("LINEORDER", "LO_SUPPKEY") => keys("SUPPLIER")?,
        ("LINEORDER", "LO_ORDERDATE") => {
            Distribution::uniform(spec.calendar.iter().map(|d| Value::Int(datekey(d))))
        }
        ("CUSTOMER", "C_NATION") | ("SUPPLIER", "S_NATION") => {
            Distribution::texts(NATIONS.iter().map(|(n, _)| *n))
        }
        ("CUSTOMER", "C_REGION") | ("SUPPLIER", "S_REGION") => Distribution::texts(REGIONS),
        ("CUSTOMER", "C_CITY") | ("SUPPLIER", "S_CITY") => Distribution::texts(all_cities()),
        ("CUSTOMER", "C_MKTSEGMENT") => Distribution::texts(SEGMENTS),
        ("PART", "P_MFGR") => {
            let mut m: Vec<String> = parts().into_iter().map(|p| p.0).collect();
            m.dedup();
            Distribution::texts(m)
        }
        ("PART", "P_CATEGORY") => {
            let mut c: Vec<String> = parts().into_iter().map(|p| p.1).collect();
            c.dedup();
            Distribution::texts(c)
        }
        ("PART", "P_BRAND1") => Distribution::texts(parts().into_iter().map(|p| p.2)),
        ("PART", "P_SIZE") => Distribution::ints(1, 50),
        ("PART", "P_COLOR") => Distribution::texts(COLORS),
        _ => return Ok(None),
    };
    Ok(Some(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::ScaleFactor;

    #[test]
    fn distributions_are_normalised() {
        let spec = GenSpec::new(ScaleFactor::new(1, 100).unwrap(), 1);
        for (t, c, n) in [
            ("LINEORDER", "LO_QUANTITY", 50),
            ("LINEORDER", "LO_DISCOUNT", 11),
            ("LINEORDER", "LO_ORDERDATE", 2557),
            ("CUSTOMER", "C_CITY", 250),
            ("PART", "P_MFGR", 5),
            ("PART", "P_CATEGORY", 25),
            ("PART", "P_BRAND1", 1000),
        ] {
            let d = declared_distribution(&spec, t, c).unwrap().unwrap();
            assert_eq!(d.len(), n, "{t}.{c}");
            let total: f64 = d.outcomes.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
        assert!(declared_distribution(&spec, "PART", "P_NAME").unwrap().is_none());
    }
}
