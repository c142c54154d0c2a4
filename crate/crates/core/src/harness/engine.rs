//! Engine adapters: the embedded SQLite engine and a generic command-line
//! connector for external engines.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use rusqlite::types::{Value as SqlValue, ValueRef};
use rusqlite::Connection;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::catalog::TypeMap;
use crate::catalog::TableDef;
use crate::datagen::tbl::Row;
use crate::sql::ResultSet;
use crate::value::{Decimal, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    /// Engine has a native bulk path (otherwise rows go through INSERTs).
    pub bulk_load: bool,
    /// Prefix turning a query into its plan description.
    pub explain_prefix: String,
}

pub trait EngineAdapter {
    fn engine_id(&self) -> &str;
    fn version(&self) -> String;
    fn capabilities(&self) -> Capabilities;
    /// Type names used when emitting DDL for this engine.
    fn type_map(&self) -> TypeMap;
    fn execute_ddl(&mut self, sql: &str) -> Result<(), HarnessError>;
    /// Loads rows into the stored columns of `table`; returns rows loaded.
    fn bulk_load(
        &mut self,
        table: &TableDef,
        rows: &mut dyn Iterator<Item = Result<Row, HarnessError>>,
    ) -> Result<u64, HarnessError>;
    /// Runs a query and drains the full result.
    fn query(&mut self, sql: &str) -> Result<ResultSet, HarnessError>;
    fn explain(&mut self, sql: &str) -> Result<String, HarnessError> {
        let plan = self.query(&format!("{} {sql}", self.capabilities().explain_prefix))?;
        Ok(plan
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" | "))
            .collect::<Vec<_>>()
            .join("\n"))
    }
    /// Hook for dropping engine caches between queries. No-op by default.
    fn flush_caches(&mut self) -> Result<(), HarnessError> {
        Ok(())
    }
}

fn engine_err(e: rusqlite::Error) -> HarnessError {
    HarnessError::Engine(e.to_string())
}

pub struct SqliteAdapter {
    conn: Connection,
}

impl SqliteAdapter {
    pub const ENGINE_ID: &'static str = "sqlite";

    pub fn in_memory() -> Result<Self, HarnessError> {
        Ok(Self {
            conn: Connection::open_in_memory().map_err(engine_err)?,
        })
    }

    pub fn open(path: &Path) -> Result<Self, HarnessError> {
        Ok(Self {
            conn: Connection::open(path).map_err(engine_err)?,
        })
    }
}

fn to_sql(v: &Value) -> SqlValue {
    match v {
        Value::Null => SqlValue::Null,
        Value::Int(i) => SqlValue::Integer(*i),
        Value::Decimal(d) => SqlValue::Real(d.to_f64()),
        Value::Real(r) => SqlValue::Real(*r),
        Value::Text(s) => SqlValue::Text(s.clone()),
        Value::Date(d) => SqlValue::Text(d.format("%Y-%m-%d").to_string()),
    }
}

fn from_sql(v: ValueRef<'_>) -> Value {
    match v {
        ValueRef::Null => Value::Null,
        ValueRef::Integer(i) => Value::Int(i),
        ValueRef::Real(r) => Value::Real(r),
        ValueRef::Text(t) => Value::Text(String::from_utf8_lossy(t).into_owned()),
        ValueRef::Blob(b) => Value::Text(hex::encode(b)),
    }
}

impl EngineAdapter for SqliteAdapter {
    fn engine_id(&self) -> &str {
        Self::ENGINE_ID
    }

    fn version(&self) -> String {
        format!("SQLite {}", rusqlite::version())
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            bulk_load: true,
            explain_prefix: "EXPLAIN QUERY PLAN".into(),
        }
    }

    fn type_map(&self) -> TypeMap {
        TypeMap::sqlite()
    }

    fn execute_ddl(&mut self, sql: &str) -> Result<(), HarnessError> {
        self.conn.execute_batch(sql).map_err(engine_err)
    }

    fn bulk_load(
        &mut self,
        table: &TableDef,
        rows: &mut dyn Iterator<Item = Result<Row, HarnessError>>,
    ) -> Result<u64, HarnessError> {
        let cols: Vec<&str> = table.stored_columns().map(|c| c.name.as_str()).collect();
        let sql = format!(
            "INSERT INTO {} ({}) VALUES ({})",
            table.name,
            cols.join(", "),
            vec!["?"; cols.len()].join(", ")
        );
        let tx = self.conn.transaction().map_err(engine_err)?;
        let mut n = 0u64;
        {
            let mut stmt = tx.prepare(&sql).map_err(engine_err)?;
            for row in rows {
                let row = row?;
                stmt.execute(rusqlite::params_from_iter(row.iter().map(to_sql)))
                    .map_err(engine_err)?;
                n += 1;
            }
        }
        tx.commit().map_err(engine_err)?;
        Ok(n)
    }

    fn query(&mut self, sql: &str) -> Result<ResultSet, HarnessError> {
        let mut stmt = self.conn.prepare(sql).map_err(engine_err)?;
        let columns: Vec<String> = stmt.column_names().iter().map(|s| s.to_string()).collect();
        let width = columns.len();
        let mut rows = Vec::new();
        let mut cursor = stmt.query([]).map_err(engine_err)?;
        while let Some(r) = cursor.next().map_err(engine_err)? {
            let mut out = Vec::with_capacity(width);
            for i in 0..width {
                out.push(from_sql(r.get_ref(i).map_err(engine_err)?));
            }
            rows.push(out);
        }
        Ok(ResultSet::from_values(columns, rows))
    }
}

/// How to reach an external engine through its command-line client.
///
/// The client must read SQL from stdin and print one row per line with
/// fields separated by `separator` and no header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandSpec {
    pub engine_id: String,
    pub program: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_separator")]
    pub separator: String,
    #[serde(default = "default_explain")]
    pub explain_prefix: String,
    /// Name accepted by [`TypeMap::by_name`].
    #[serde(default = "default_types")]
    pub types: String,
    #[serde(default = "default_batch")]
    pub insert_batch: usize,
    /// Statement printing the engine version, if any.
    #[serde(default)]
    pub version_query: Option<String>,
}

fn default_separator() -> String {
    "|".into()
}
fn default_explain() -> String {
    "EXPLAIN".into()
}
fn default_types() -> String {
    "neutral".into()
}
fn default_batch() -> usize {
    500
}

pub struct CommandAdapter {
    spec: CommandSpec,
}

impl CommandAdapter {
    pub fn new(spec: CommandSpec) -> Result<Self, HarnessError> {
        if TypeMap::by_name(&spec.types).is_none() {
            return Err(HarnessError::Config(format!("unknown type map {}", spec.types)));
        }
        if spec.separator.is_empty() || spec.insert_batch == 0 {
            return Err(HarnessError::Config("separator and insert_batch must be non-empty".into()));
        }
        Ok(Self { spec })
    }

    fn run(&self, sql: &str) -> Result<String, HarnessError> {
        let mut child = Command::new(&self.spec.program)
            .args(&self.spec.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| HarnessError::Engine(format!("{}: {e}", self.spec.program)))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let body = sql.to_string();
        // write on a thread so large outputs cannot deadlock against our read
        let writer = std::thread::spawn(move || {
            let _ = stdin.write_all(body.as_bytes());
            let _ = stdin.write_all(b"\n");
        });
        let out = child
            .wait_with_output()
            .map_err(|e| HarnessError::Engine(format!("{}: {e}", self.spec.program)))?;
        let _ = writer.join();
        if !out.status.success() {
            let msg = String::from_utf8_lossy(&out.stderr);
            return Err(HarnessError::Engine(msg.lines().next().unwrap_or("engine failed").to_string()));
        }
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    }
}

fn parse_field(s: &str) -> Value {
    if s.is_empty() {
        return Value::Null;
    }
    if let Ok(i) = s.parse::<i64>() {
        return Value::Int(i);
    }
    if let Some((_, frac)) = s.split_once('.') {
        if let Ok(d) = Decimal::parse(s, frac.len().min(18) as u8) {
            return Value::Decimal(d);
        }
    }
    match s.parse::<f64>() {
        Ok(r) if s.contains(['e', 'E']) => Value::Real(r),
        _ => Value::Text(s.to_string()),
    }
}

fn sql_literal(v: &Value) -> String {
    match v {
        Value::Null => "NULL".into(),
        Value::Text(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Date(d) => format!("'{}'", d.format("%Y-%m-%d")),
        other => other.to_string(),
    }
}

impl EngineAdapter for CommandAdapter {
    fn engine_id(&self) -> &str {
        &self.spec.engine_id
    }

    fn version(&self) -> String {
        let probe = self.spec.version_query.as_deref().and_then(|q| self.run(q).ok());
        match probe {
            Some(v) => v.trim().to_string(),
            None => format!("{} (version unknown)", self.spec.program),
        }
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            bulk_load: false,
            explain_prefix: self.spec.explain_prefix.clone(),
        }
    }

    fn type_map(&self) -> TypeMap {
        TypeMap::by_name(&self.spec.types).expect("checked in new")
    }

    fn execute_ddl(&mut self, sql: &str) -> Result<(), HarnessError> {
        self.run(sql).map(|_| ())
    }

    fn bulk_load(
        &mut self,
        table: &TableDef,
        rows: &mut dyn Iterator<Item = Result<Row, HarnessError>>,
    ) -> Result<u64, HarnessError> {
        let cols: Vec<&str> = table.stored_columns().map(|c| c.name.as_str()).collect();
        let head = format!("INSERT INTO {} ({}) VALUES\n", table.name, cols.join(", "));
        let mut n = 0u64;
        let mut batch = Vec::new();
        let flush = |batch: &mut Vec<String>| -> Result<(), HarnessError> {
            if !batch.is_empty() {
                self.run(&format!("{head}{};", batch.join(",\n")))?;
                batch.clear();
            }
            Ok(())
        };
        for row in rows {
            let row = row?;
            batch.push(format!("({})", row.iter().map(sql_literal).collect::<Vec<_>>().join(", ")));
            n += 1;
            if batch.len() == self.spec.insert_batch {
                flush(&mut batch)?;
            }
        }
        flush(&mut batch)?;
        Ok(n)
    }

    fn query(&mut self, sql: &str) -> Result<ResultSet, HarnessError> {
        let text = self.run(&format!("{};", sql.trim_end().trim_end_matches(';')))?;
        let rows: Vec<Vec<Value>> = text
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.split(self.spec.separator.as_str()).map(parse_field).collect())
            .collect();
        let width = rows.first().map_or(0, Vec::len);
        Ok(ResultSet::from_values((1..=width).map(|i| format!("c{i}")).collect(), rows))
    }
}
