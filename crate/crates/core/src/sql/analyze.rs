//! Structural analysis of select-project-join-aggregate queries: which
//! tables are referenced, how they are joined and which columns are
//! restricted.

use sqlparser::ast::{
    BinaryOperator, Expr, JoinConstraint, JoinOperator, ObjectName, ObjectNamePart, Query,
    Select, SetExpr, TableFactor,
};

use super::{parse_query, SqlError};
use crate::catalog::SchemaCatalog;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRef {
    /// Catalog table name, upper case.
    pub name: String,
    /// Alias, upper case; the table name when none is given.
    pub alias: String,
}

/// A resolved column reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnUse {
    pub table: String,
    pub column: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConjunctKind {
    /// `a.x = b.y` between two different tables.
    EquiJoin { left: ColumnUse, right: ColumnUse },
    /// Every referenced column belongs to one table.
    Local { table: String },
    /// No columns, or columns of several tables in a non-join predicate.
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conjunct {
    pub expr: Expr,
    pub kind: ConjunctKind,
    /// Distinct referenced columns in first-use order.
    pub columns: Vec<ColumnUse>,
}

#[derive(Debug, Clone)]
pub struct QueryShape {
    pub query: Query,
    pub tables: Vec<TableRef>,
    /// Top-level conjuncts of WHERE and of every `JOIN ... ON`.
    pub conjuncts: Vec<Conjunct>,
}

pub(crate) fn object_name(name: &ObjectName) -> String {
    name.0
        .iter()
        .filter_map(|p| match p {
            ObjectNamePart::Identifier(i) => Some(i.value.to_ascii_uppercase()),
            _ => None,
        })
        .next_back()
        .unwrap_or_default()
}

pub(crate) fn select_of(query: &Query) -> Result<&Select, SqlError> {
    match query.body.as_ref() {
        SetExpr::Select(s) => Ok(s),
        other => Err(SqlError::Unsupported(format!("query body {other}"))),
    }
}

/// Splits a predicate on top-level `AND`.
pub fn split_conjuncts(expr: &Expr, out: &mut Vec<Expr>) {
    match expr {
        Expr::BinaryOp {
            left,
            op: BinaryOperator::And,
            right,
        } => {
            split_conjuncts(left, out);
            split_conjuncts(right, out);
        }
        Expr::Nested(inner) if matches!(inner.as_ref(), Expr::BinaryOp { op: BinaryOperator::And, .. }) => {
            split_conjuncts(inner, out)
        }
        e => out.push(e.clone()),
    }
}

/// Base tables of a FROM clause, in order.
pub(crate) fn from_tables(select: &Select) -> Result<(Vec<TableRef>, Vec<Expr>), SqlError> {
    let mut tables = Vec::new();
    let mut on = Vec::new();
    let mut push = |factor: &TableFactor| -> Result<(), SqlError> {
        match factor {
            TableFactor::Table { name, alias, .. } => {
                let name = object_name(name);
                let alias = alias
                    .as_ref()
                    .map_or_else(|| name.clone(), |a| a.name.value.to_ascii_uppercase());
                tables.push(TableRef { name, alias });
                Ok(())
            }
            other => Err(SqlError::Unsupported(format!("table factor {other}"))),
        }
    };
    for twj in &select.from {
        push(&twj.relation)?;
        for join in &twj.joins {
            push(&join.relation)?;
            match &join.join_operator {
                JoinOperator::Join(c) | JoinOperator::Inner(c) => match c {
                    JoinConstraint::On(e) => on.push(e.clone()),
                    JoinConstraint::None => {}
                    other => return Err(SqlError::Unsupported(format!("join constraint {other:?}"))),
                },
                JoinOperator::CrossJoin(_) => {}
                other => return Err(SqlError::Unsupported(format!("join {other:?}"))),
            }
        }
    }
    Ok((tables, on))
}

/// Resolves column names against the FROM list and the catalog.
pub struct Scope<'a> {
    pub catalog: &'a SchemaCatalog,
    pub tables: &'a [TableRef],
}

impl Scope<'_> {
    /// Slot index and upper-cased column name.
    pub fn resolve(&self, qualifier: Option<&str>, column: &str) -> Result<(usize, String), SqlError> {
        let column = column.to_ascii_uppercase();
        let has = |t: &TableRef| {
            self.catalog
                .table(&t.name)
                .is_some_and(|d| d.column(&column).is_some())
        };
        if let Some(q) = qualifier {
            let q = q.to_ascii_uppercase();
            let slot = self
                .tables
                .iter()
                .position(|t| t.alias == q)
                .ok_or_else(|| SqlError::UnknownTable(q.clone()))?;
            if !has(&self.tables[slot]) {
                return Err(SqlError::UnknownColumn(format!("{q}.{column}")));
            }
            return Ok((slot, column));
        }
        let mut found = self.tables.iter().enumerate().filter(|(_, t)| has(t));
        match (found.next(), found.next()) {
            (Some((slot, _)), None) => Ok((slot, column)),
            (Some(_), Some(_)) => Err(SqlError::AmbiguousColumn(column)),
            (None, _) => Err(SqlError::UnknownColumn(column)),
        }
    }

    pub fn resolve_expr(&self, expr: &Expr) -> Result<Option<(usize, String)>, SqlError> {
        match expr {
            Expr::Identifier(i) => self.resolve(None, &i.value).map(Some),
            Expr::CompoundIdentifier(parts) if parts.len() >= 2 => {
                let n = parts.len();
                self.resolve(Some(&parts[n - 2].value), &parts[n - 1].value).map(Some)
            }
            Expr::Nested(inner) => self.resolve_expr(inner),
            _ => Ok(None),
        }
    }

    /// Every column referenced by `expr`, resolved, in first-use order.
    pub fn columns_of(&self, expr: &Expr) -> Result<Vec<(usize, String)>, SqlError> {
        let mut out = Vec::new();
        let mut err = None;
        let _ = sqlparser::ast::visit_expressions(expr, |e| {
            let r = match e {
                Expr::Identifier(_) | Expr::CompoundIdentifier(_) => self.resolve_expr(e),
                _ => Ok(None),
            };
            match r {
                Ok(Some(c)) => {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
                Ok(None) => {}
                Err(e) => {
                    err.get_or_insert(e);
                }
            }
            std::ops::ControlFlow::<()>::Continue(())
        });
        match err {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }
}

pub fn analyze(sql: &str, catalog: &SchemaCatalog) -> Result<QueryShape, SqlError> {
    let query = parse_query(sql)?;
    let select = select_of(&query)?;
    let (tables, on) = from_tables(select)?;
    for t in &tables {
        if catalog.table(&t.name).is_none() {
            return Err(SqlError::UnknownTable(t.name.clone()));
        }
    }
    let scope = Scope {
        catalog,
        tables: &tables,
    };
    let mut raw = Vec::new();
    for e in on.iter().chain(select.selection.iter()) {
        split_conjuncts(e, &mut raw);
    }
    let use_of = |(slot, column): &(usize, String)| ColumnUse {
        table: tables[*slot].name.clone(),
        column: column.clone(),
    };
    let mut conjuncts = Vec::new();
    for expr in raw {
        let cols = scope.columns_of(&expr)?;
        let kind = match &expr {
            Expr::BinaryOp {
                left,
                op: BinaryOperator::Eq,
                right,
            } => match (scope.resolve_expr(left)?, scope.resolve_expr(right)?) {
                (Some(l), Some(r)) if l.0 != r.0 => ConjunctKind::EquiJoin {
                    left: use_of(&l),
                    right: use_of(&r),
                },
                _ => local_or_other(&cols, &tables),
            },
            _ => local_or_other(&cols, &tables),
        };
        conjuncts.push(Conjunct {
            expr,
            kind,
            columns: cols.iter().map(use_of).collect(),
        });
    }
    Ok(QueryShape {
        query,
        tables,
        conjuncts,
    })
}

fn local_or_other(cols: &[(usize, String)], tables: &[TableRef]) -> ConjunctKind {
    match cols.first() {
        Some((slot, _)) if cols.iter().all(|(s, _)| s == slot) => ConjunctKind::Local {
            table: tables[*slot].name.clone(),
        },
        _ => ConjunctKind::Other,
    }
}

impl QueryShape {
    /// Local restrictions grouped per table, in FROM order.
    pub fn local_predicates(&self) -> Vec<(String, Vec<&Conjunct>)> {
        let mut out: Vec<(String, Vec<&Conjunct>)> = Vec::new();
        for c in &self.conjuncts {
            if let ConjunctKind::Local { table } = &c.kind {
                match out.iter_mut().find(|(t, _)| t == table) {
                    Some((_, v)) => v.push(c),
                    None => out.push((table.clone(), vec![c])),
                }
            }
        }
        out
    }

    pub fn join_edges(&self) -> Vec<(&ColumnUse, &ColumnUse)> {
        self.conjuncts
            .iter()
            .filter_map(|c| match &c.kind {
                ConjunctKind::EquiJoin { left, right } => Some((left, right)),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_ssb_catalog;

    #[test]
    fn classifies_conjuncts() {
        let cat = build_ssb_catalog();
        let shape = analyze(
            "select sum(lo_revenue) from lineorder l join dim_date d on l.lo_orderdate = d.d_datekey \
             where d_year = 1993 and lo_discount between 1 and 3 and (lo_quantity < 25 or lo_tax > d_year)",
            &cat,
        )
        .unwrap();
        assert_eq!(shape.tables.len(), 2);
        assert_eq!(shape.tables[0].alias, "L");
        let kinds: Vec<_> = shape.conjuncts.iter().map(|c| c.kind.clone()).collect();
        assert!(matches!(kinds[0], ConjunctKind::EquiJoin { .. }));
        assert_eq!(kinds[1], ConjunctKind::Local { table: "DIM_DATE".into() });
        assert_eq!(kinds[2], ConjunctKind::Local { table: "LINEORDER".into() });
        assert_eq!(kinds[3], ConjunctKind::Other);
        assert_eq!(shape.local_predicates().len(), 2);
    }

    #[test]
    fn resolution_errors() {
        let cat = build_ssb_catalog();
        assert!(matches!(
            analyze("select x from lineorder where nope = 1", &cat),
            Err(SqlError::UnknownColumn(_))
        ));
        assert!(matches!(
            analyze("select 1 from lineorder, orders", &cat),
            Err(SqlError::UnknownTable(_))
        ));
        assert!(matches!(
            analyze("select 1 from lineorder a, lineorder b where lo_tax = 1", &cat),
            Err(SqlError::AmbiguousColumn(_))
        ));
    }
}
