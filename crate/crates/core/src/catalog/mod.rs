//! Schema catalogs for the SSB star schema and the TPC-H reference schema.

mod ddl;
mod diff;
mod ssb;
mod tpch;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use ddl::{emit_ddl, DdlError, DdlOptions, KeyClauses, TypeMap};
pub use diff::{diff_catalogs, TransformationKind, TransformationRecord};
pub use ssb::{build_ssb_catalog, build_ssb_catalog_with, SsbOptions, DEFAULT_DATE_TABLE};
pub use tpch::build_tpch_reference_catalog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalType {
    Integer,
    Decimal { precision: u8, scale: u8 },
    FixedText(u16),
    VarText(u16),
    CalendarDate,
}

impl LogicalType {
    pub const MONEY: LogicalType = LogicalType::Decimal {
        precision: 15,
        scale: 2,
    };

    /// Width of the fixed-size raw representation used as the denominator
    /// of compression ratios.
    pub fn fixed_width(&self) -> usize {
        match self {
            LogicalType::Integer | LogicalType::Decimal { .. } => 8,
            LogicalType::CalendarDate => 4,
            LogicalType::FixedText(n) | LogicalType::VarText(n) => usize::from(*n),
        }
    }

    pub fn is_textual(&self) -> bool {
        matches!(self, LogicalType::FixedText(_) | LogicalType::VarText(_))
    }
}

/// A column reference `TABLE.COLUMN`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnRef {
    pub table: String,
    pub column: String,
}

impl ColumnRef {
    pub fn new(table: &str, column: &str) -> Self {
        Self {
            table: table.to_string(),
            column: column.to_string(),
        }
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.table, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    pub logical_type: LogicalType,
    pub nullable: bool,
    /// Source column in the schema this table was derived from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lineage: Option<ColumnRef>,
    /// Defining expression of a virtual (computed, not stored) column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
}

impl ColumnDef {
    pub fn new(name: &str, logical_type: LogicalType) -> Self {
        Self {
            name: name.to_string(),
            logical_type,
            nullable: false,
            lineage: None,
            expression: None,
        }
    }

    pub fn from_source(mut self, table: &str, column: &str) -> Self {
        self.lineage = Some(ColumnRef::new(table, column));
        self
    }

    pub fn is_virtual(&self) -> bool {
        self.expression.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Fact,
    Dimension,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignKey {
    pub columns: Vec<String>,
    pub references_table: String,
    pub references_columns: Vec<String>,
}

/// How a table came to exist relative to the schema it was derived from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// A table of the source schema, unchanged in role.
    Original,
    /// Carried over from `from`, with the listed tables folded into it.
    Carried { from: String, denormalized: Vec<String> },
    /// Several source tables combined into one.
    Merged { from: Vec<String> },
    /// New in this schema.
    Added,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableDef {
    pub name: String,
    pub kind: TableKind,
    pub columns: Vec<ColumnDef>,
    pub primary_key: Vec<String>,
    pub foreign_keys: Vec<ForeignKey>,
    pub provenance: Provenance,
    pub note: String,
}

impl TableDef {
    pub fn column(&self, name: &str) -> Option<&ColumnDef> {
        self.columns
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns
            .iter()
            .position(|c| c.name.eq_ignore_ascii_case(name))
    }

    /// Columns physically stored (and present in `.tbl` files).
    pub fn stored_columns(&self) -> impl Iterator<Item = &ColumnDef> {
        self.columns.iter().filter(|c| !c.is_virtual())
    }

    /// Lower-case file stem used for the table's `.tbl` file.
    pub fn file_name(&self) -> String {
        format!("{}.tbl", self.name.to_ascii_lowercase())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogVariant {
    Ssb,
    TpchReference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaCatalog {
    pub name: String,
    pub variant: CatalogVariant,
    pub tables: Vec<TableDef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogViolation {
    DuplicateColumn { table: String, column: String },
    EmptyColumnName { table: String },
    NullableSsbColumn { table: String, column: String },
    UnknownKeyColumn { table: String, column: String },
    DanglingForeignKey { table: String, target: String },
    FactCount(usize),
    FactReferencesFact { table: String, target: String },
    ForbiddenTable(String),
    TableCount { expected: usize, found: usize },
}

impl SchemaCatalog {
    pub fn empty(name: &str, variant: CatalogVariant) -> Self {
        Self {
            name: name.to_string(),
            variant,
            tables: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&TableDef> {
        self.tables
            .iter()
            .find(|t| t.name.eq_ignore_ascii_case(name))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.table(name).is_some()
    }

    pub fn fact_tables(&self) -> impl Iterator<Item = &TableDef> {
        self.tables.iter().filter(|t| t.kind == TableKind::Fact)
    }

    /// Tables owning a column with this name; SSB and TPC-H column names
    /// carry a table prefix, so this is normally unique.
    pub fn tables_with_column(&self, column: &str) -> Vec<&TableDef> {
        self.tables
            .iter()
            .filter(|t| t.column(column).is_some())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }

    pub fn validate(&self) -> Vec<CatalogViolation> {
        let mut out = Vec::new();
        for t in &self.tables {
            let mut seen = std::collections::HashSet::new();
            for c in &t.columns {
                if c.name.is_empty() {
                    out.push(CatalogViolation::EmptyColumnName {
                        table: t.name.clone(),
                    });
                }
                if !seen.insert(c.name.to_ascii_uppercase()) {
                    out.push(CatalogViolation::DuplicateColumn {
                        table: t.name.clone(),
                        column: c.name.clone(),
                    });
                }
                if self.variant == CatalogVariant::Ssb && c.nullable {
                    out.push(CatalogViolation::NullableSsbColumn {
                        table: t.name.clone(),
                        column: c.name.clone(),
                    });
                }
            }
            let fk_cols = t.foreign_keys.iter().flat_map(|fk| fk.columns.iter());
            for k in t.primary_key.iter().chain(fk_cols) {
                if t.column(k).is_none() {
                    out.push(CatalogViolation::UnknownKeyColumn {
                        table: t.name.clone(),
                        column: k.clone(),
                    });
                }
            }
            for fk in &t.foreign_keys {
                let ok = self.table(&fk.references_table).is_some_and(|target| {
                    fk.references_columns.iter().all(|c| target.column(c).is_some())
                });
                if !ok {
                    out.push(CatalogViolation::DanglingForeignKey {
                        table: t.name.clone(),
                        target: fk.references_table.clone(),
                    });
                }
            }
        }
        if self.variant == CatalogVariant::Ssb {
            let facts: Vec<_> = self.fact_tables().collect();
            if facts.len() != 1 {
                out.push(CatalogViolation::FactCount(facts.len()));
            }
            for f in facts {
                for fk in &f.foreign_keys {
                    if self
                        .table(&fk.references_table)
                        .is_some_and(|t| t.kind == TableKind::Fact)
                    {
                        out.push(CatalogViolation::FactReferencesFact {
                            table: f.name.clone(),
                            target: fk.references_table.clone(),
                        });
                    }
                }
            }
            for forbidden in ["PARTSUPP", "NATION", "REGION"] {
                if self.contains(forbidden) {
                    out.push(CatalogViolation::ForbiddenTable(forbidden.to_string()));
                }
            }
            if self.tables.len() != 5 {
                out.push(CatalogViolation::TableCount {
                    expected: 5,
                    found: self.tables.len(),
                });
            }
        } else if self.tables.len() != 8 {
            out.push(CatalogViolation::TableCount {
                expected: 8,
                found: self.tables.len(),
            });
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ssb_catalog_is_valid() {
        let c = build_ssb_catalog();
        assert_eq!(c.validate(), vec![]);
        assert_eq!(c.tables.len(), 5);
        assert_eq!(c.fact_tables().count(), 1);
        assert_eq!(c.fact_tables().next().unwrap().name, "LINEORDER");
    }

    #[test]
    fn ssb_catalog_shape() {
        let c = build_ssb_catalog();
        let lo = c.table("LINEORDER").unwrap();
        assert!(lo.column("LO_PROFIT").is_some());
        assert!(lo.column("LO_SUPPLYCOST").is_some());
        assert_eq!(lo.primary_key, vec!["LO_ORDERKEY", "LO_LINENUMBER"]);
        let cust = c.table("customer").unwrap();
        for col in ["C_CITY", "C_NATION", "C_REGION"] {
            assert!(cust.column(col).is_some(), "{col}");
        }
        assert!(c.table("SUPPLIER").unwrap().column("S_CITY").is_some());
        for absent in ["NATION", "REGION", "PARTSUPP", "LINEITEM", "ORDERS"] {
            assert!(!c.contains(absent), "{absent}");
        }
        assert!(c.contains(DEFAULT_DATE_TABLE));
    }

    #[test]
    fn fact_references_every_dimension() {
        let c = build_ssb_catalog();
        let lo = c.table("LINEORDER").unwrap();
        for dim in c.tables.iter().filter(|t| t.kind == TableKind::Dimension) {
            assert!(
                lo.foreign_keys.iter().any(|fk| fk.references_table == dim.name),
                "{}",
                dim.name
            );
        }
        let date_refs = lo
            .foreign_keys
            .iter()
            .filter(|fk| fk.references_table == DEFAULT_DATE_TABLE)
            .count();
        assert_eq!(date_refs, 2);
    }

    #[test]
    fn tpch_catalog_is_valid() {
        let c = build_tpch_reference_catalog();
        assert_eq!(c.validate(), vec![]);
        assert_eq!(c.tables.len(), 8);
        for t in ["PARTSUPP", "LINEITEM", "ORDERS", "NATION", "REGION"] {
            assert!(c.contains(t), "{t}");
        }
    }

    #[test]
    fn date_table_name_is_configurable() {
        let c = build_ssb_catalog_with(&SsbOptions {
            date_table: "DATES".into(),
            ..SsbOptions::default()
        });
        assert_eq!(c.validate(), vec![]);
        assert!(c.contains("DATES"));
        assert!(!c.contains(DEFAULT_DATE_TABLE));
    }

    #[test]
    fn validation_catches_broken_catalogs() {
        let mut c = build_ssb_catalog();
        c.tables[1].columns[0].nullable = true;
        c.tables[0].foreign_keys[0].references_table = "NOPE".into();
        let v = c.validate();
        assert!(v.iter().any(|e| matches!(e, CatalogViolation::NullableSsbColumn { .. })));
        assert!(v.iter().any(|e| matches!(e, CatalogViolation::DanglingForeignKey { .. })));
    }

    #[test]
    fn json_export_round_trips() {
        let c = build_ssb_catalog();
        let back: SchemaCatalog = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }
}
