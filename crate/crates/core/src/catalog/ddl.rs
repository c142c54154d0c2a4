use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{LogicalType, SchemaCatalog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeyClauses {
    None,
    /// Out-of-box configuration: only what the engine builds for primary keys.
    #[default]
    PrimaryOnly,
    PrimaryAndForeign,
}

/// Logical → SQL type names for one engine. `{p}`, `{s}` and `{n}` are
/// substituted with precision, scale and length. A `None` entry means the
/// engine has no mapping for that logical type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeMap {
    pub integer: Option<String>,
    pub decimal: Option<String>,
    pub fixed_text: Option<String>,
    pub var_text: Option<String>,
    pub date: Option<String>,
    /// Whether computed columns are emitted as `GENERATED ALWAYS AS`; when
    /// false they are left out of the DDL.
    pub generated_columns: bool,
}

impl TypeMap {
    fn full(integer: &str, decimal: &str, fixed: &str, var: &str, date: &str) -> Self {
        Self {
            integer: Some(integer.into()),
            decimal: Some(decimal.into()),
            fixed_text: Some(fixed.into()),
            var_text: Some(var.into()),
            date: Some(date.into()),
            generated_columns: true,
        }
    }

    pub fn neutral() -> Self {
        Self::full("INTEGER", "DECIMAL({p},{s})", "CHAR({n})", "VARCHAR({n})", "DATE")
    }

    pub fn sqlite() -> Self {
        Self::full("INTEGER", "REAL", "TEXT", "TEXT", "TEXT")
    }

    pub fn postgres() -> Self {
        let mut m = Self::full("BIGINT", "NUMERIC({p},{s})", "CHAR({n})", "VARCHAR({n})", "DATE");
        // PostgreSQL only has STORED generated columns.
        m.generated_columns = false;
        m
    }

    pub fn mysql() -> Self {
        Self::full("BIGINT", "DECIMAL({p},{s})", "CHAR({n})", "VARCHAR({n})", "DATE")
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "neutral" => Some(Self::neutral()),
            "sqlite" | "embedded" => Some(Self::sqlite()),
            "postgres" | "postgresql" => Some(Self::postgres()),
            "mysql" => Some(Self::mysql()),
            _ => None,
        }
    }

    fn render(&self, ty: LogicalType) -> Option<String> {
        let (tpl, p, s, n) = match ty {
            LogicalType::Integer => (self.integer.as_ref()?, 0, 0, 0),
            LogicalType::Decimal { precision, scale } => {
                (self.decimal.as_ref()?, precision, scale, 0)
            }
            LogicalType::FixedText(n) => (self.fixed_text.as_ref()?, 0, 0, n),
            LogicalType::VarText(n) => (self.var_text.as_ref()?, 0, 0, n),
            LogicalType::CalendarDate => (self.date.as_ref()?, 0, 0, 0),
        };
        Some(
            tpl.replace("{p}", &p.to_string())
                .replace("{s}", &s.to_string())
                .replace("{n}", &n.to_string()),
        )
    }
}

impl Default for TypeMap {
    fn default() -> Self {
        Self::neutral()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DdlOptions {
    pub keys: KeyClauses,
    pub types: TypeMap,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DdlError {
    #[error("no SQL type for {logical:?} (column {table}.{column})")]
    UnsupportedType {
        table: String,
        column: String,
        logical: LogicalType,
    },
}

/// One `CREATE TABLE` per table in catalog order, each terminated by `;`
/// and followed by a blank line.
pub fn emit_ddl(catalog: &SchemaCatalog, options: &DdlOptions) -> Result<String, DdlError> {
    let mut out = String::new();
    for t in &catalog.tables {
        let mut lines = Vec::new();
        for c in &t.columns {
            if c.is_virtual() && !options.types.generated_columns {
                continue;
            }
            let ty = options
                .types
                .render(c.logical_type)
                .ok_or_else(|| DdlError::UnsupportedType {
                    table: t.name.clone(),
                    column: c.name.clone(),
                    logical: c.logical_type,
                })?;
            let mut line = format!("  {} {}", c.name, ty);
            if let Some(expr) = &c.expression {
                let _ = write!(line, " GENERATED ALWAYS AS ({expr}) VIRTUAL");
            }
            if !c.nullable {
                line.push_str(" NOT NULL");
            }
            lines.push(line);
        }
        if options.keys != KeyClauses::None && !t.primary_key.is_empty() {
            lines.push(format!("  PRIMARY KEY ({})", t.primary_key.join(", ")));
        }
        if options.keys == KeyClauses::PrimaryAndForeign {
            for fk in &t.foreign_keys {
                lines.push(format!(
                    "  FOREIGN KEY ({}) REFERENCES {} ({})",
                    fk.columns.join(", "),
                    fk.references_table,
                    fk.references_columns.join(", ")
                ));
            }
        }
        let _ = write!(out, "CREATE TABLE {} (\n{}\n);\n\n", t.name, lines.join(",\n"));
    }
    Ok(out)
}
