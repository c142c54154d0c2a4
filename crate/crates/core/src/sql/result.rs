use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::value::{Cell, Value};

/// A query result in canonical cells; compared as a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultSet {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultSet {
    pub fn from_values(columns: Vec<String>, rows: Vec<Vec<Value>>) -> Self {
        Self {
            columns,
            rows: rows
                .into_iter()
                .map(|r| r.iter().map(Value::canonical).collect())
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn sorted_rows(&self) -> Vec<Vec<Cell>> {
        let mut rows = self.rows.clone();
        rows.sort();
        rows
    }

    pub fn same_multiset(&self, other: &ResultSet) -> bool {
        self.rows.len() == other.rows.len() && self.sorted_rows() == other.sorted_rows()
    }

    /// First row present in one result and not the other, for diagnostics.
    pub fn first_difference(&self, other: &ResultSet) -> Option<String> {
        let (a, b) = (self.sorted_rows(), other.sorted_rows());
        let show = |r: &[Cell]| r.iter().map(Cell::to_string).collect::<Vec<_>>().join("|");
        for i in 0..a.len().max(b.len()) {
            match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) if x == y => continue,
                (x, y) => {
                    return Some(format!(
                        "row {i}: {} vs {}",
                        x.map_or("<none>".into(), |r| show(r)),
                        y.map_or("<none>".into(), |r| show(r))
                    ))
                }
            }
        }
        None
    }

    /// Hex SHA-256 of the sorted rows; order- and column-name-independent.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for row in self.sorted_rows() {
            for cell in row {
                match cell {
                    Cell::Null => h.update(b"N;"),
                    Cell::Number(n) => h.update(format!("D{n};")),
                    Cell::Text(s) => h.update(format!("T{}:{s};", s.len())),
                }
            }
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}
