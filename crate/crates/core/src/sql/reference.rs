//! Naive in-memory evaluator: filter each table, hash-join outward from the
//! largest table, then group and aggregate. Slow and simple on purpose; it
//! is the oracle engines are checked against.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use sqlparser::ast::{
    Expr, GroupByExpr, LimitClause, OrderByKind, OrderBySort, SelectItem, Value as AstValue,
};

use super::analyze::{from_tables, select_of, split_conjuncts, Scope, TableRef};
use super::eval::{eval, is_true, Accumulator, AggSpec, CExpr, Compiler, Resolve};
use super::{parse_query, ResultSet, SqlError};
use crate::catalog::{SchemaCatalog, TableDef};
use crate::datagen::tbl::{read_tbl, Row, TblError};
use crate::datagen::{generate_table, GenError, GenSpec};
use crate::value::{Cell, Value};

pub struct MemTable {
    pub def: TableDef,
    /// Stored columns only.
    pub rows: Vec<Row>,
}

pub struct MemDatabase {
    pub catalog: SchemaCatalog,
    tables: BTreeMap<String, MemTable>,
}

impl MemDatabase {
    pub fn new(catalog: SchemaCatalog) -> Self {
        Self {
            catalog,
            tables: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, table: &str, rows: Vec<Row>) -> Result<(), SqlError> {
        let def = self
            .catalog
            .table(table)
            .ok_or_else(|| SqlError::UnknownTable(table.to_string()))?
            .clone();
        self.tables.insert(def.name.clone(), MemTable { def, rows });
        Ok(())
    }

    /// Every SSB table of `spec`, generated straight into memory.
    pub fn from_generator(spec: &GenSpec) -> Result<Self, GenError> {
        let catalog = spec.catalog();
        let mut db = Self::new(catalog.clone());
        for def in &catalog.tables {
            let rows = generate_table(spec, &def.name)?
                .rows()
                .collect::<Result<Vec<_>, _>>()?;
            db.tables.insert(
                def.name.clone(),
                MemTable {
                    def: def.clone(),
                    rows,
                },
            );
        }
        Ok(db)
    }

    /// Reads `<dir>/<table>.tbl` for every catalog table.
    pub fn load_dir(catalog: SchemaCatalog, dir: &Path) -> Result<Self, TblError> {
        let mut db = Self::new(catalog.clone());
        for def in &catalog.tables {
            let rows = read_tbl(&dir.join(def.file_name()), def)?;
            db.tables.insert(
                def.name.clone(),
                MemTable {
                    def: def.clone(),
                    rows,
                },
            );
        }
        Ok(db)
    }

    pub fn table(&self, name: &str) -> Option<&MemTable> {
        self.tables.get(&name.to_ascii_uppercase())
    }

    pub fn evaluator(&self) -> ReferenceEvaluator<'_> {
        ReferenceEvaluator { db: self }
    }
}

fn stored_index(def: &TableDef, column: &str) -> Option<usize> {
    def.stored_columns()
        .position(|c| c.name.eq_ignore_ascii_case(column))
}

struct SlotResolver<'a> {
    scope: Scope<'a>,
}

impl Resolve for SlotResolver<'_> {
    fn resolve(&self, qualifier: Option<&str>, column: &str) -> Result<CExpr, SqlError> {
        let (slot, column) = self.scope.resolve(qualifier, column)?;
        let def = self
            .scope
            .catalog
            .table(&self.scope.tables[slot].name)
            .ok_or_else(|| SqlError::UnknownTable(self.scope.tables[slot].name.clone()))?;
        column_expr(def, slot, &column)
    }
}

/// A stored column, or the compiled definition of a virtual one.
pub(crate) fn column_expr(def: &TableDef, slot: usize, column: &str) -> Result<CExpr, SqlError> {
    let col = def
        .column(column)
        .ok_or_else(|| SqlError::UnknownColumn(format!("{}.{column}", def.name)))?;
    match &col.expression {
        None => Ok(CExpr::Column {
            slot,
            col: stored_index(def, column).expect("stored column"),
        }),
        Some(text) => {
            let expr = sqlparser::parser::Parser::new(&sqlparser::dialect::GenericDialect {})
                .try_with_sql(text)
                .and_then(|mut p| p.parse_expr())
                .map_err(|e| SqlError::Parse(format!("{}.{column}: {e}", def.name)))?;
            let inner = OneTable { def, slot };
            Compiler {
                resolver: &inner,
                aggregates: None,
            }
            .compile(&expr)
        }
    }
}

struct OneTable<'a> {
    def: &'a TableDef,
    slot: usize,
}

impl Resolve for OneTable<'_> {
    fn resolve(&self, _: Option<&str>, column: &str) -> Result<CExpr, SqlError> {
        column_expr(self.def, self.slot, column)
    }
}

struct Step {
    slot: usize,
    /// Evaluated on already bound slots; `None` is a cross product.
    probe: Option<CExpr>,
    index: HashMap<Cell, Vec<usize>>,
    all: Vec<usize>,
}

struct JoinPlan<'a> {
    tables: Vec<&'a [Row]>,
    driver: usize,
    driver_filters: Vec<CExpr>,
    steps: Vec<Step>,
    residual: Vec<CExpr>,
    widths: Vec<usize>,
}

impl JoinPlan<'_> {
    fn run(
        &self,
        mut emit: impl FnMut(&[&[Value]], &[usize]) -> Result<(), SqlError>,
    ) -> Result<(), SqlError> {
        let n = self.tables.len();
        let empty: Vec<Value> = Vec::new();
        let mut refs: Vec<&[Value]> = vec![empty.as_slice(); n];
        let mut assign = vec![0usize; n];
        for (i, row) in self.tables[self.driver].iter().enumerate() {
            refs[self.driver] = row;
            if !self.passes(&self.driver_filters, &refs)? {
                continue;
            }
            assign[self.driver] = i;
            self.expand(0, &mut refs, &mut assign, &mut emit)?;
        }
        Ok(())
    }

    fn passes(&self, filters: &[CExpr], refs: &[&[Value]]) -> Result<bool, SqlError> {
        for f in filters {
            if !is_true(f, refs)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn expand<'r>(
        &'r self,
        depth: usize,
        refs: &mut Vec<&'r [Value]>,
        assign: &mut Vec<usize>,
        emit: &mut impl FnMut(&[&[Value]], &[usize]) -> Result<(), SqlError>,
    ) -> Result<(), SqlError> {
        let Some(step) = self.steps.get(depth) else {
            if self.passes(&self.residual, refs)? {
                emit(refs, assign)?;
            }
            return Ok(());
        };
        let matches: &[usize] = match &step.probe {
            None => &step.all,
            Some(p) => match step.index.get(&eval(p, refs, &[])?.canonical()) {
                Some(m) => m,
                None => return Ok(()),
            },
        };
        for &m in matches {
            refs[step.slot] = &self.tables[step.slot][m];
            assign[step.slot] = m;
            self.expand(depth + 1, refs, assign, emit)?;
        }
        Ok(())
    }
}

enum SortKey {
    Output(usize),
    Expr(CExpr),
}

pub struct ReferenceEvaluator<'a> {
    db: &'a MemDatabase,
}

struct Prepared<'a> {
    plan: JoinPlan<'a>,
    tables: Vec<TableRef>,
}

impl<'a> ReferenceEvaluator<'a> {
    fn prepare(&self, select: &sqlparser::ast::Select) -> Result<(Prepared<'a>, Vec<Expr>), SqlError> {
        let (tables, on) = from_tables(select)?;
        let mut data = Vec::new();
        for t in &tables {
            let mt = self
                .db
                .table(&t.name)
                .ok_or_else(|| SqlError::UnknownTable(t.name.clone()))?;
            data.push(mt);
        }
        let scope = Scope {
            catalog: &self.db.catalog,
            tables: &tables,
        };
        let resolver = SlotResolver {
            scope: Scope {
                catalog: &self.db.catalog,
                tables: &tables,
            },
        };
        let mut conjuncts = Vec::new();
        for e in on.iter().chain(select.selection.iter()) {
            split_conjuncts(e, &mut conjuncts);
        }
        let n = tables.len();
        let mut local: Vec<Vec<CExpr>> = vec![Vec::new(); n];
        let mut edges: Vec<(usize, CExpr, usize, usize)> = Vec::new();
        let mut residual = Vec::new();
        for c in &conjuncts {
            let compiled = Compiler {
                resolver: &resolver,
                aggregates: None,
            }
            .compile(c)?;
            let slots: Vec<usize> = {
                let mut s: Vec<usize> = scope.columns_of(c)?.into_iter().map(|(s, _)| s).collect();
                s.sort_unstable();
                s.dedup();
                s
            };
            if slots.len() == 1 {
                local[slots[0]].push(compiled);
                continue;
            }
            if let CExpr::Binary {
                op: super::eval::BinOp::Eq,
                left,
                right,
            } = &compiled
            {
                if let (CExpr::Column { slot: a, col: ca }, CExpr::Column { slot: b, col: cb }) =
                    (left.as_ref(), right.as_ref())
                {
                    if a != b {
                        edges.push((*a, (**left).clone(), *b, *cb));
                        edges.push((*b, (**right).clone(), *a, *ca));
                        continue;
                    }
                }
            }
            residual.push(compiled);
        }
        let driver = (0..n).max_by_key(|&i| (data[i].rows.len(), std::cmp::Reverse(i))).unwrap_or(0);
        let mut bound = vec![false; n];
        if n > 0 {
            bound[driver] = true;
        }
        // each undirected edge appears twice; track usage by pair
        let mut used = vec![false; edges.len()];
        let mut steps = Vec::new();
        let filtered = |slot: usize, filters: &[CExpr]| -> Result<Vec<usize>, SqlError> {
            let mut keep = Vec::new();
            let empty: Vec<Value> = Vec::new();
            let mut refs: Vec<&[Value]> = vec![empty.as_slice(); n];
            'rows: for (i, row) in data[slot].rows.iter().enumerate() {
                refs[slot] = row;
                for f in filters {
                    if !is_true(f, &refs)? {
                        continue 'rows;
                    }
                }
                keep.push(i);
            }
            Ok(keep)
        };
        while bound.iter().any(|b| !b) {
            let next = edges
                .iter()
                .enumerate()
                .find(|(i, (from, _, to, _))| !used[*i] && bound[*from] && !bound[*to]);
            let step = match next {
                Some((i, (_, probe, to, build_col))) => {
                    used[i] = true;
                    used[i ^ 1] = true;
                    let keep = filtered(*to, &local[*to])?;
                    let mut index: HashMap<Cell, Vec<usize>> = HashMap::new();
                    for &r in &keep {
                        let key = data[*to].rows[r][*build_col].canonical();
                        if key != Cell::Null {
                            index.entry(key).or_default().push(r);
                        }
                    }
                    Step {
                        slot: *to,
                        probe: Some(probe.clone()),
                        index,
                        all: Vec::new(),
                    }
                }
                None => {
                    let slot = bound.iter().position(|b| !b).expect("unbound slot");
                    Step {
                        slot,
                        probe: None,
                        index: HashMap::new(),
                        all: filtered(slot, &local[slot])?,
                    }
                }
            };
            bound[step.slot] = true;
            steps.push(step);
        }
        // edges not used for a hash step are checked after the join
        for (i, (_, probe, b, col)) in edges.iter().enumerate() {
            if !used[i] && i % 2 == 0 {
                used[i + 1] = true;
                residual.push(CExpr::Binary {
                    op: super::eval::BinOp::Eq,
                    left: Box::new(probe.clone()),
                    right: Box::new(CExpr::Column { slot: *b, col: *col }),
                });
            }
        }
        let driver_filters = if n > 0 { std::mem::take(&mut local[driver]) } else { Vec::new() };
        Ok((
            Prepared {
                plan: JoinPlan {
                    tables: data.iter().map(|t| t.rows.as_slice()).collect(),
                    driver,
                    driver_filters,
                    steps,
                    residual,
                    widths: data.iter().map(|t| t.def.stored_columns().count()).collect(),
                },
                tables,
            },
            conjuncts,
        ))
    }

    /// Number of joined rows passing every predicate, before grouping.
    pub fn count_matching(&self, sql: &str) -> Result<u64, SqlError> {
        let query = parse_query(sql)?;
        let (prepared, _) = self.prepare(select_of(&query)?)?;
        let mut n = 0u64;
        prepared.plan.run(|_, _| {
            n += 1;
            Ok(())
        })?;
        Ok(n)
    }

    pub fn evaluate(&self, sql: &str) -> Result<ResultSet, SqlError> {
        let query = parse_query(sql)?;
        let select = select_of(&query)?;
        if select.distinct.is_some() {
            return Err(SqlError::Unsupported("DISTINCT".into()));
        }
        let (prepared, _) = self.prepare(select)?;
        let resolver = SlotResolver {
            scope: Scope {
                catalog: &self.db.catalog,
                tables: &prepared.tables,
            },
        };
        let mut compiler = Compiler {
            resolver: &resolver,
            aggregates: Some(Vec::new()),
        };
        let mut columns = Vec::new();
        let mut projection = Vec::new();
        let mut projection_text = Vec::new();
        for item in &select.projection {
            let (expr, name) = match item {
                SelectItem::UnnamedExpr(e) => (e, e.to_string()),
                SelectItem::ExprWithAlias { expr, alias } => (expr, alias.value.clone()),
                other => return Err(SqlError::Unsupported(format!("select item {other}"))),
            };
            projection.push(compiler.compile(expr)?);
            projection_text.push(expr.to_string().to_ascii_uppercase());
            columns.push(name);
        }
        let group_exprs = match &select.group_by {
            GroupByExpr::Expressions(exprs, mods) if mods.is_empty() => exprs
                .iter()
                .map(|e| {
                    Compiler {
                        resolver: &resolver,
                        aggregates: None,
                    }
                    .compile(e)
                })
                .collect::<Result<Vec<_>, _>>()?,
            other => return Err(SqlError::Unsupported(format!("{other}"))),
        };
        let having = select
            .having
            .as_ref()
            .map(|h| compiler.compile(h))
            .transpose()?;
        let mut sort = Vec::new();
        if let Some(ob) = &query.order_by {
            let OrderByKind::Expressions(items) = &ob.kind else {
                return Err(SqlError::Unsupported("ORDER BY ALL".into()));
            };
            for item in items {
                let desc = matches!(item.options.sort, Some(OrderBySort::Desc));
                let text = item.expr.to_string().to_ascii_uppercase();
                let key = if let Some(i) = columns.iter().position(|c| c.eq_ignore_ascii_case(&text)) {
                    SortKey::Output(i)
                } else if let Some(i) = projection_text.iter().position(|p| *p == text) {
                    SortKey::Output(i)
                } else if let Expr::Value(v) = &item.expr {
                    match &v.value {
                        AstValue::Number(n, _) => SortKey::Output(
                            n.parse::<usize>()
                                .ok()
                                .and_then(|k| k.checked_sub(1))
                                .filter(|k| *k < columns.len())
                                .ok_or_else(|| SqlError::Unsupported(format!("ORDER BY {n}")))?,
                        ),
                        _ => SortKey::Expr(compiler.compile(&item.expr)?),
                    }
                } else {
                    SortKey::Expr(compiler.compile(&item.expr)?)
                };
                sort.push((key, desc));
            }
        }
        let limit = match &query.limit_clause {
            None => None,
            Some(LimitClause::LimitOffset {
                limit: Some(Expr::Value(v)),
                offset: None,
                limit_by,
            }) if limit_by.is_empty() => match &v.value {
                AstValue::Number(n, _) => n.parse::<usize>().ok(),
                _ => None,
            },
            Some(other) => return Err(SqlError::Unsupported(format!("{other}"))),
        };
        let aggs: Vec<AggSpec> = compiler.aggregates.take().unwrap_or_default();
        let grouped = !group_exprs.is_empty() || !aggs.is_empty();
        let plan = &prepared.plan;

        // (output values, sort-key values)
        let mut out: Vec<(Vec<Value>, Vec<Value>)> = Vec::new();
        let sort_values = |row: &[&[Value]], agg_vals: &[Value], output: &[Value]| {
            sort.iter()
                .map(|(k, _)| match k {
                    SortKey::Output(i) => Ok(output[*i].clone()),
                    SortKey::Expr(e) => eval(e, row, agg_vals),
                })
                .collect::<Result<Vec<_>, SqlError>>()
        };
        if grouped {
            let mut groups: HashMap<Vec<Cell>, usize> = HashMap::new();
            let mut states: Vec<(Vec<usize>, Vec<Accumulator>)> = Vec::new();
            plan.run(|row, assign| {
                let key = group_exprs
                    .iter()
                    .map(|g| eval(g, row, &[]).map(|v| v.canonical()))
                    .collect::<Result<Vec<_>, _>>()?;
                let idx = *groups.entry(key).or_insert_with(|| {
                    states.push((
                        assign.to_vec(),
                        aggs.iter().map(|a| Accumulator::new(a.func)).collect(),
                    ));
                    states.len() - 1
                });
                for (acc, spec) in states[idx].1.iter_mut().zip(&aggs) {
                    let v = spec.arg.as_ref().map(|a| eval(a, row, &[])).transpose()?;
                    acc.update(v)?;
                }
                Ok(())
            })?;
            let null_rows: Vec<Vec<Value>> = plan.widths.iter().map(|w| vec![Value::Null; *w]).collect();
            if states.is_empty() && group_exprs.is_empty() {
                states.push((Vec::new(), aggs.iter().map(|a| Accumulator::new(a.func)).collect()));
            }
            for (assign, accs) in &states {
                let refs: Vec<&[Value]> = if assign.is_empty() {
                    null_rows.iter().map(Vec::as_slice).collect()
                } else {
                    assign
                        .iter()
                        .enumerate()
                        .map(|(slot, &r)| plan.tables[slot][r].as_slice())
                        .collect()
                };
                let agg_vals: Vec<Value> = accs.iter().map(Accumulator::finish).collect();
                if let Some(h) = &having {
                    if !matches!(eval(h, &refs, &agg_vals)?, Value::Int(1)) {
                        continue;
                    }
                }
                let output = projection
                    .iter()
                    .map(|p| eval(p, &refs, &agg_vals))
                    .collect::<Result<Vec<_>, _>>()?;
                let keys = sort_values(&refs, &agg_vals, &output)?;
                out.push((output, keys));
            }
        } else {
            plan.run(|row, _| {
                let output = projection
                    .iter()
                    .map(|p| eval(p, row, &[]))
                    .collect::<Result<Vec<_>, _>>()?;
                let keys = sort_values(row, &[], &output)?;
                out.push((output, keys));
                Ok(())
            })?;
        }
        if !sort.is_empty() {
            out.sort_by(|a, b| {
                for (i, (_, desc)) in sort.iter().enumerate() {
                    let o = null_first(&a.1[i], &b.1[i]);
                    let o = if *desc { o.reverse() } else { o };
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            });
        }
        if let Some(l) = limit {
            out.truncate(l);
        }
        Ok(ResultSet::from_values(
            columns,
            out.into_iter().map(|(o, _)| o).collect(),
        ))
    }
}

fn null_first(a: &Value, b: &Value) -> Ordering {
    match (a.is_null(), b.is_null()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => a.compare(b).unwrap_or(Ordering::Equal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_ssb_catalog;

    fn tiny() -> MemDatabase {
        let mut db = MemDatabase::new(build_ssb_catalog());
        let lo = |ok: i64, ck: i64, date: i64, qty: i64, disc: i64, rev: i64, cost: i64| {
            vec![
                Value::Int(ok),
                Value::Int(1),
                Value::Int(ck),
                Value::Int(1),
                Value::Int(1),
                Value::Int(date),
                Value::text("1-URGENT"),
                Value::Int(0),
                Value::Int(qty),
                Value::money(rev),
                Value::money(rev),
                Value::Int(disc),
                Value::money(rev),
                Value::money(cost),
                Value::Int(0),
                Value::Int(date),
                Value::text("AIR"),
            ]
        };
        db.insert(
            "LINEORDER",
            vec![
                lo(1, 1, 19930101, 10, 2, 1000, 600),
                lo(2, 2, 19930101, 30, 2, 2000, 600),
                lo(3, 1, 19940101, 10, 1, 4000, 600),
                lo(4, 9, 19930101, 10, 1, 8000, 600),
            ],
        )
        .unwrap();
        let date = |k: i64, y: i64| {
            let d = chrono::NaiveDate::from_ymd_opt(y as i32, 1, 1).unwrap();
            let mut r = crate::datagen::calendar::date_row(d);
            r[0] = Value::Int(k);
            r
        };
        db.insert("DIM_DATE", vec![date(19930101, 1993), date(19940101, 1994)]).unwrap();
        let cust = |k: i64, nation: &str| {
            vec![
                Value::Int(k),
                Value::text("c"),
                Value::text("a"),
                Value::text("x"),
                Value::text(nation),
                Value::text("r"),
                Value::text("p"),
                Value::text("s"),
            ]
        };
        db.insert("CUSTOMER", vec![cust(1, "PERU"), cust(2, "CHINA")]).unwrap();
        db
    }

    #[test]
    fn filter_join_aggregate() {
        let db = tiny();
        let ev = db.evaluator();
        let r = ev
            .evaluate(
                "select sum(lo_extendedprice * lo_discount) as revenue from lineorder, dim_date \
                 where lo_orderdate = d_datekey and d_year = 1993 and lo_discount between 1 and 3 \
                 and lo_quantity < 25",
            )
            .unwrap();
        // rows 1 and 4: 10.00*2 + 80.00*1
        assert_eq!(r.rows, vec![vec![Cell::Number(10_000)]]);
        assert_eq!(
            ev.count_matching("select 1 from lineorder, dim_date where lo_orderdate = d_datekey and d_year = 1993")
                .unwrap(),
            3
        );
    }

    #[test]
    fn inner_join_drops_dangling_keys_and_groups() {
        let db = tiny();
        let r = db
            .evaluator()
            .evaluate(
                "select c_nation, sum(lo_profit) as profit, count(*) from lineorder join customer \
                 on lo_custkey = c_custkey group by c_nation order by profit desc",
            )
            .unwrap();
        assert_eq!(r.columns, ["c_nation", "profit", "count(*)"]);
        assert_eq!(
            r.rows,
            vec![
                vec![Cell::Text("PERU".into()), Cell::Number(3800), Cell::Number(200)],
                vec![Cell::Text("CHINA".into()), Cell::Number(1400), Cell::Number(100)],
            ]
        );
    }

    #[test]
    fn empty_input_aggregates() {
        let db = tiny();
        let ev = db.evaluator();
        let r = ev
            .evaluate("select sum(lo_revenue), count(*) from lineorder where lo_tax > 100")
            .unwrap();
        assert_eq!(r.rows, vec![vec![Cell::Null, Cell::Number(0)]]);
        let g = ev
            .evaluate("select lo_tax, sum(lo_revenue) from lineorder where lo_tax > 100 group by lo_tax")
            .unwrap();
        assert!(g.is_empty());
    }
}
