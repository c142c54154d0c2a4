//! Filter-factor estimation from declared value distributions.
//!
//! Each restriction is scored against the distribution its column is drawn
//! from; restrictions on the date dimension are scored against the calendar
//! itself, since fact rows pick order dates uniformly from it. The estimate
//! is the product over restrictions (independence holds by construction of
//! the generator).

use super::WorkloadError;
use crate::datagen::calendar::date_row;
use crate::datagen::domain::declared_distribution;
use crate::datagen::GenSpec;
use crate::sql::analyze::{analyze, Conjunct, ConjunctKind};
use crate::sql::eval::{is_true, CExpr, Compiler, Resolve};
use crate::sql::reference::column_expr;
use crate::sql::SqlError;
use crate::catalog::TableDef;
use crate::value::{Cell, Decimal, Value};

struct TableOnly<'a> {
    def: &'a TableDef,
}

impl Resolve for TableOnly<'_> {
    fn resolve(&self, _: Option<&str>, column: &str) -> Result<CExpr, SqlError> {
        column_expr(self.def, 0, column)
    }
}

fn cell_value(c: &Cell) -> Value {
    match c {
        Cell::Null => Value::Null,
        Cell::Number(n) => Value::Decimal(Decimal::new(*n as i64, Cell::NUMBER_SCALE)),
        Cell::Text(s) => Value::Text(s.clone()),
    }
}

fn estimate_error(c: &Conjunct, why: &str) -> WorkloadError {
    WorkloadError::Estimate(format!("{}: {why}", c.expr))
}

/// Fraction of fact rows passing one restriction.
pub fn conjunct_fraction(c: &Conjunct, spec: &GenSpec) -> Result<f64, WorkloadError> {
    let catalog = spec.catalog();
    let table = match &c.kind {
        ConjunctKind::EquiJoin { .. } => return Ok(1.0),
        ConjunctKind::Local { table } => table,
        ConjunctKind::Other => return Err(estimate_error(c, "spans several tables")),
    };
    let def = catalog.table(table).ok_or_else(|| WorkloadError::Sql(SqlError::UnknownTable(table.clone())))?;
    let pred = Compiler {
        resolver: &TableOnly { def },
        aggregates: None,
    }
    .compile(&c.expr)?;
    if def.name.eq_ignore_ascii_case(&spec.date_table) {
        let mut hits = 0u64;
        for d in spec.calendar.iter() {
            let row = date_row(d);
            if is_true(&pred, &[&row])? {
                hits += 1;
            }
        }
        return Ok(hits as f64 / spec.calendar.days() as f64);
    }
    let [column] = c.columns.as_slice() else {
        return Err(estimate_error(c, "restricts more than one column"));
    };
    let dist = declared_distribution(spec, table, &column.column)?
        .ok_or_else(|| estimate_error(c, "column has no declared distribution"))?;
    let idx = def
        .stored_columns()
        .position(|col| col.name == column.column)
        .ok_or_else(|| estimate_error(c, "column is not stored"))?;
    let mut row = vec![Value::Null; def.stored_columns().count()];
    let mut fraction = 0.0;
    for (cell, p) in &dist.outcomes {
        row[idx] = cell_value(cell);
        if is_true(&pred, &[&row])? {
            fraction += p;
        }
    }
    Ok(fraction)
}

/// Product of per-restriction fractions; 1.0 when nothing is restricted.
pub fn estimate_filter_factor(sql: &str, spec: &GenSpec) -> Result<f64, WorkloadError> {
    let shape = analyze(sql, &spec.catalog())?;
    let mut ff = 1.0;
    for c in &shape.conjuncts {
        ff *= conjunct_fraction(c, spec)?;
    }
    Ok(ff)
}
