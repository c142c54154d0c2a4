//! Index advice mechanized from WHERE and join predicates.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::catalog::SchemaCatalog;
use crate::sql::{analyze, ConjunctKind};
use crate::workload::QueryInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexAdvice {
    pub table: String,
    pub columns: Vec<String>,
    /// Labels of the queries whose predicates produced this entry.
    pub origins: BTreeSet<String>,
}

impl IndexAdvice {
    pub fn index_name(&self) -> String {
        format!("idx_{}_{}", self.table, self.columns.join("_")).to_ascii_lowercase()
    }

    pub fn create_statement(&self) -> String {
        format!(
            "CREATE INDEX IF NOT EXISTS {} ON {} ({})",
            self.index_name(),
            self.table,
            self.columns.join(", ")
        )
    }
}

fn add(out: &mut Vec<IndexAdvice>, table: &str, columns: Vec<String>, origin: &str) {
    match out.iter_mut().find(|a| a.table == table && a.columns == columns) {
        Some(a) => {
            a.origins.insert(origin.to_string());
        }
        None => out.push(IndexAdvice {
            table: table.to_string(),
            columns,
            origins: BTreeSet::from([origin.to_string()]),
        }),
    }
}

/// One entry per (table, column list) restricted or joined on by any
/// instance, plus a composite entry per table when a query restricts
/// several of its columns. Instances whose SQL cannot be resolved against
/// `catalog` contribute nothing.
pub fn advise_indices(instances: &[QueryInstance], catalog: &SchemaCatalog) -> Vec<IndexAdvice> {
    let mut out = Vec::new();
    for inst in instances {
        let Ok(shape) = analyze(&inst.rendered_sql, catalog) else {
            continue;
        };
        let label = inst.template_id.as_str();
        let mut restricted: Vec<(String, Vec<String>)> = Vec::new();
        for c in &shape.conjuncts {
            if let ConjunctKind::EquiJoin { left, right } = &c.kind {
                add(&mut out, &left.table, vec![left.column.clone()], label);
                add(&mut out, &right.table, vec![right.column.clone()], label);
                continue;
            }
            let mut tables: Vec<&str> = Vec::new();
            for u in &c.columns {
                if !tables.contains(&u.table.as_str()) {
                    tables.push(&u.table);
                }
            }
            for t in tables {
                let cols: Vec<String> = c
                    .columns
                    .iter()
                    .filter(|u| u.table == t)
                    .map(|u| u.column.clone())
                    .collect();
                add(&mut out, t, cols.clone(), label);
                if matches!(c.kind, ConjunctKind::Local { .. }) {
                    let entry = match restricted.iter_mut().find(|(name, _)| name == t) {
                        Some(e) => e,
                        None => {
                            restricted.push((t.to_string(), Vec::new()));
                            restricted.last_mut().expect("just pushed")
                        }
                    };
                    for col in cols {
                        if !entry.1.contains(&col) {
                            entry.1.push(col);
                        }
                    }
                }
            }
        }
        for (table, cols) in restricted {
            if cols.len() > 1 {
                add(&mut out, &table, cols, label);
            }
        }
    }
    out
}
