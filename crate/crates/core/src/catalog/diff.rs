use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Provenance, SchemaCatalog, TableDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformationKind {
    TableMerged,
    TableDropped,
    TableDenormalizedInto,
    TableAdded,
    ColumnAdded,
    ColumnDropped,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransformationRecord {
    pub kind: TransformationKind,
    /// Tables of the source schema involved.
    pub from: Vec<String>,
    /// Tables of the target schema involved.
    pub into: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
}

impl TransformationRecord {
    fn tables(kind: TransformationKind, from: Vec<String>, into: Vec<String>) -> Self {
        Self {
            kind,
            from,
            into,
            column: None,
        }
    }
}

impl fmt::Display for TransformationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TransformationKind::*;
        let from = self.from.join("+");
        let into = self.into.join(",");
        let col = self.column.as_deref().unwrap_or("");
        match self.kind {
            TableMerged => write!(f, "merge({from}→{into})"),
            TableDropped => write!(f, "drop({from})"),
            TableDenormalizedInto => write!(f, "denormalize({}→{into})", self.from.join(",")),
            TableAdded => write!(f, "add({into})"),
            ColumnAdded => write!(f, "column_added({into}.{col})"),
            ColumnDropped => write!(f, "column_dropped({from}.{col})"),
        }
    }
}

/// Transformations that turn `source` into `target`.
///
/// Tables are matched by name first and by their recorded provenance
/// otherwise; columns by name within same-named tables and by lineage
/// across renamed or merged ones.
pub fn diff_catalogs(target: &SchemaCatalog, source: &SchemaCatalog) -> Vec<TransformationRecord> {
    use TransformationKind::*;
    let mut out = Vec::new();
    let mut consumed: HashSet<String> = HashSet::new();
    // absorbed source table -> target tables it was folded into
    let mut absorbed: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut column_records = Vec::new();

    for t in &target.tables {
        let primary_sources: Vec<&TableDef> = if let Some(s) = source.table(&t.name) {
            vec![s]
        } else {
            match &t.provenance {
                Provenance::Merged { from } if from.iter().all(|s| source.contains(s)) => {
                    out.push(TransformationRecord::tables(
                        TableMerged,
                        from.clone(),
                        vec![t.name.clone()],
                    ));
                    from.iter().filter_map(|s| source.table(s)).collect()
                }
                Provenance::Carried { from, .. } if source.contains(from) => {
                    source.table(from).into_iter().collect()
                }
                _ => {
                    out.push(TransformationRecord::tables(
                        TableAdded,
                        vec![],
                        vec![t.name.clone()],
                    ));
                    vec![]
                }
            }
        };
        for s in &primary_sources {
            consumed.insert(s.name.to_ascii_uppercase());
        }
        if let Provenance::Carried { denormalized, .. } = &t.provenance {
            for d in denormalized {
                if source.contains(d) && !target.contains(d) {
                    absorbed
                        .entry(d.to_ascii_uppercase())
                        .or_default()
                        .insert(t.name.clone());
                }
            }
        }
        if primary_sources.is_empty() {
            continue;
        }

        let mut used: HashSet<(String, String)> = HashSet::new();
        for c in &t.columns {
            let by_name = source
                .table(&t.name)
                .and_then(|s| s.column(&c.name).map(|sc| (s.name.clone(), sc.name.clone())));
            let by_lineage = c.lineage.as_ref().and_then(|l| {
                source
                    .table(&l.table)
                    .and_then(|s| s.column(&l.column).map(|sc| (s.name.clone(), sc.name.clone())))
            });
            match by_name.or(by_lineage) {
                Some(key) => {
                    used.insert((key.0.to_ascii_uppercase(), key.1.to_ascii_uppercase()));
                }
                None => column_records.push(TransformationRecord {
                    kind: ColumnAdded,
                    from: vec![],
                    into: vec![t.name.clone()],
                    column: Some(c.name.clone()),
                }),
            }
        }
        for s in &primary_sources {
            for sc in &s.columns {
                let key = (s.name.to_ascii_uppercase(), sc.name.to_ascii_uppercase());
                if !used.contains(&key) {
                    column_records.push(TransformationRecord {
                        kind: ColumnDropped,
                        from: vec![s.name.clone()],
                        into: vec![t.name.clone()],
                        column: Some(sc.name.clone()),
                    });
                }
            }
        }
    }

    // Group absorbed tables by the set of targets they were folded into.
    let mut groups: BTreeMap<Vec<String>, Vec<String>> = BTreeMap::new();
    for (table, targets) in &absorbed {
        let name = source.table(table).map(|t| t.name.clone()).unwrap_or_default();
        groups
            .entry(targets.iter().cloned().collect())
            .or_default()
            .push(name);
    }
    for (targets, mut from) in groups {
        from.sort_by_key(|n| source.tables.iter().position(|t| &t.name == n));
        for f in &from {
            consumed.insert(f.to_ascii_uppercase());
        }
        out.push(TransformationRecord::tables(
            TableDenormalizedInto,
            from,
            targets,
        ));
    }

    for s in &source.tables {
        if !consumed.contains(&s.name.to_ascii_uppercase()) && !target.contains(&s.name) {
            out.push(TransformationRecord::tables(
                TableDropped,
                vec![s.name.clone()],
                vec![],
            ));
        }
    }
    out.extend(column_records);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_ssb_catalog, build_tpch_reference_catalog};

    fn has(records: &[TransformationRecord], rendered: &str) -> bool {
        records.iter().any(|r| r.to_string() == rendered)
    }

    #[test]
    fn ssb_from_tpch() {
        let d = diff_catalogs(&build_ssb_catalog(), &build_tpch_reference_catalog());
        assert!(has(&d, "merge(LINEITEM+ORDERS→LINEORDER)"), "{d:#?}");
        assert!(has(&d, "drop(PARTSUPP)"));
        assert!(has(&d, "denormalize(NATION,REGION→CUSTOMER,SUPPLIER)"));
        assert!(has(&d, "add(DIM_DATE)"));
        assert!(has(&d, "column_added(LINEORDER.LO_SUPPLYCOST)"));
        assert!(has(&d, "column_added(LINEORDER.LO_PROFIT)"));
        assert!(has(&d, "column_added(CUSTOMER.C_CITY)"));
        assert!(has(&d, "column_dropped(LINEITEM.L_COMMENT)"));
        assert!(has(&d, "column_dropped(ORDERS.O_COMMENT)"));
        assert!(has(&d, "column_dropped(LINEITEM.L_SHIPINSTRUCT)"));
        assert!(!has(&d, "drop(LINEITEM)"));
        assert!(!has(&d, "drop(NATION)"));
    }

    #[test]
    fn identity_diff_is_empty() {
        let s = build_ssb_catalog();
        assert!(diff_catalogs(&s, &s).is_empty());
        let t = build_tpch_reference_catalog();
        assert!(diff_catalogs(&t, &t).is_empty());
    }

    #[test]
    fn reverse_diff_shows_the_split() {
        let d = diff_catalogs(&build_tpch_reference_catalog(), &build_ssb_catalog());
        assert!(has(&d, "drop(LINEORDER)"), "{d:#?}");
        assert!(has(&d, "add(LINEITEM)"));
        assert!(has(&d, "add(ORDERS)"));
        assert!(has(&d, "add(PARTSUPP)"));
        assert!(!d.iter().any(|r| r.kind == TransformationKind::TableMerged));
    }
}
