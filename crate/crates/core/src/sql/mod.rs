//! SQL front end shared by the workload and harness modules, plus a naive
//! in-memory evaluator used as the correctness oracle for engines.

pub mod analyze;
pub mod eval;
pub mod reference;
pub mod result;

use sqlparser::ast::{Query, Statement};
use sqlparser::dialect::GenericDialect;
use sqlparser::parser::Parser;

pub use analyze::{analyze, ColumnUse, Conjunct, ConjunctKind, QueryShape, TableRef};
pub use reference::{MemDatabase, ReferenceEvaluator};
pub use result::ResultSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SqlError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported SQL: {0}")]
    Unsupported(String),
    #[error("unknown table {0}")]
    UnknownTable(String),
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("ambiguous column {0}")]
    AmbiguousColumn(String),
    #[error("evaluation error: {0}")]
    Eval(String),
}

pub fn parse_statement(sql: &str) -> Result<Statement, SqlError> {
    let mut statements =
        Parser::parse_sql(&GenericDialect {}, sql).map_err(|e| SqlError::Parse(e.to_string()))?;
    match statements.len() {
        1 => Ok(statements.remove(0)),
        n => Err(SqlError::Parse(format!("expected one statement, found {n}"))),
    }
}

pub fn parse_query(sql: &str) -> Result<Query, SqlError> {
    match parse_statement(sql)? {
        Statement::Query(q) => Ok(*q),
        other => Err(SqlError::Unsupported(format!("not a query: {other}"))),
    }
}
