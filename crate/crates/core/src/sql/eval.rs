//! Compiled scalar and aggregate expressions over joined rows.
//!
//! Booleans are `Int(1)`/`Int(0)`, unknown is `Null` (Kleene logic).
//! Integer and decimal arithmetic is exact; anything touching a `Real`
//! is computed in floating point.

use std::cmp::Ordering;

use sqlparser::ast::{
    BinaryOperator, Expr, FunctionArg, FunctionArgExpr, FunctionArguments, UnaryOperator,
    Value as AstValue,
};

use super::analyze::object_name;
use super::SqlError;
use crate::value::{Decimal, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    NotEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CExpr {
    /// Stored column `col` of the row bound to `slot`.
    Column { slot: usize, col: usize },
    Literal(Value),
    Neg(Box<CExpr>),
    Not(Box<CExpr>),
    Binary { op: BinOp, left: Box<CExpr>, right: Box<CExpr> },
    And(Box<CExpr>, Box<CExpr>),
    Or(Box<CExpr>, Box<CExpr>),
    Between { expr: Box<CExpr>, low: Box<CExpr>, high: Box<CExpr>, negated: bool },
    InList { expr: Box<CExpr>, list: Vec<CExpr>, negated: bool },
    IsNull { expr: Box<CExpr>, negated: bool },
    /// Result of the `n`-th aggregate of the query.
    Aggregate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggFunc {
    Sum,
    Count,
    CountStar,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggSpec {
    pub func: AggFunc,
    pub arg: Option<CExpr>,
}

/// Maps a (qualifier, column) reference to a compiled expression.
pub trait Resolve {
    fn resolve(&self, qualifier: Option<&str>, column: &str) -> Result<CExpr, SqlError>;
}

pub struct Compiler<'r, R: Resolve> {
    pub resolver: &'r R,
    /// Aggregates found so far; `None` forbids aggregates.
    pub aggregates: Option<Vec<AggSpec>>,
}

fn unsupported(e: &Expr) -> SqlError {
    SqlError::Unsupported(e.to_string())
}

pub fn literal(v: &AstValue) -> Result<Value, SqlError> {
    match v {
        AstValue::Number(n, _) => parse_number(n),
        AstValue::SingleQuotedString(s) => Ok(Value::Text(s.clone())),
        AstValue::Null => Ok(Value::Null),
        AstValue::Boolean(b) => Ok(Value::Int(i64::from(*b))),
        other => Err(SqlError::Unsupported(format!("literal {other}"))),
    }
}

fn parse_number(n: &str) -> Result<Value, SqlError> {
    if let Ok(i) = n.parse::<i64>() {
        return Ok(Value::Int(i));
    }
    match n.split_once('.') {
        Some((_, frac)) if frac.len() <= 18 && !n.contains(['e', 'E']) => {
            Decimal::parse(n, frac.len() as u8)
                .map(Value::Decimal)
                .map_err(|e| SqlError::Parse(format!("{n}: {e:?}")))
        }
        _ => n
            .parse::<f64>()
            .map(Value::Real)
            .map_err(|_| SqlError::Parse(format!("bad number {n}"))),
    }
}

impl<R: Resolve> Compiler<'_, R> {
    pub fn compile(&mut self, e: &Expr) -> Result<CExpr, SqlError> {
        let b = |x: CExpr| Box::new(x);
        Ok(match e {
            Expr::Identifier(i) => self.resolver.resolve(None, &i.value)?,
            Expr::CompoundIdentifier(parts) if parts.len() >= 2 => {
                let n = parts.len();
                self.resolver
                    .resolve(Some(&parts[n - 2].value), &parts[n - 1].value)?
            }
            Expr::Value(v) => CExpr::Literal(literal(&v.value)?),
            Expr::Nested(inner) => self.compile(inner)?,
            Expr::UnaryOp { op, expr } => match op {
                UnaryOperator::Minus => CExpr::Neg(b(self.compile(expr)?)),
                UnaryOperator::Plus => self.compile(expr)?,
                UnaryOperator::Not => CExpr::Not(b(self.compile(expr)?)),
                _ => return Err(unsupported(e)),
            },
            Expr::BinaryOp { left, op, right } => {
                let (l, r) = (self.compile(left)?, self.compile(right)?);
                let op = match op {
                    BinaryOperator::And => return Ok(CExpr::And(b(l), b(r))),
                    BinaryOperator::Or => return Ok(CExpr::Or(b(l), b(r))),
                    BinaryOperator::Plus => BinOp::Add,
                    BinaryOperator::Minus => BinOp::Sub,
                    BinaryOperator::Multiply => BinOp::Mul,
                    BinaryOperator::Divide => BinOp::Div,
                    BinaryOperator::Eq => BinOp::Eq,
                    BinaryOperator::NotEq => BinOp::NotEq,
                    BinaryOperator::Lt => BinOp::Lt,
                    BinaryOperator::LtEq => BinOp::LtEq,
                    BinaryOperator::Gt => BinOp::Gt,
                    BinaryOperator::GtEq => BinOp::GtEq,
                    _ => return Err(unsupported(e)),
                };
                CExpr::Binary {
                    op,
                    left: b(l),
                    right: b(r),
                }
            }
            Expr::Between {
                expr,
                negated,
                low,
                high,
            } => CExpr::Between {
                expr: b(self.compile(expr)?),
                low: b(self.compile(low)?),
                high: b(self.compile(high)?),
                negated: *negated,
            },
            Expr::InList {
                expr,
                list,
                negated,
            } => CExpr::InList {
                expr: b(self.compile(expr)?),
                list: list.iter().map(|x| self.compile(x)).collect::<Result<_, _>>()?,
                negated: *negated,
            },
            Expr::IsNull(x) => CExpr::IsNull {
                expr: b(self.compile(x)?),
                negated: false,
            },
            Expr::IsNotNull(x) => CExpr::IsNull {
                expr: b(self.compile(x)?),
                negated: true,
            },
            Expr::Function(f) => {
                let name = object_name(&f.name);
                let func = match name.as_str() {
                    "SUM" => AggFunc::Sum,
                    "COUNT" => AggFunc::Count,
                    "MIN" => AggFunc::Min,
                    "MAX" => AggFunc::Max,
                    _ => return Err(unsupported(e)),
                };
                let args = match &f.args {
                    FunctionArguments::List(l) if l.duplicate_treatment.is_none() => &l.args,
                    _ => return Err(unsupported(e)),
                };
                let (func, arg) = match args.as_slice() {
                    [FunctionArg::Unnamed(FunctionArgExpr::Wildcard)] if func == AggFunc::Count => {
                        (AggFunc::CountStar, None)
                    }
                    [FunctionArg::Unnamed(FunctionArgExpr::Expr(x))] => {
                        // aggregates do not nest
                        let saved = self.aggregates.take();
                        let arg = self.compile(x);
                        self.aggregates = saved;
                        (func, Some(arg?))
                    }
                    _ => return Err(unsupported(e)),
                };
                let aggs = self
                    .aggregates
                    .as_mut()
                    .ok_or_else(|| SqlError::Unsupported(format!("aggregate here: {e}")))?;
                let spec = AggSpec { func, arg };
                let idx = match aggs.iter().position(|a| *a == spec) {
                    Some(i) => i,
                    None => {
                        aggs.push(spec);
                        aggs.len() - 1
                    }
                };
                CExpr::Aggregate(idx)
            }
            _ => return Err(unsupported(e)),
        })
    }
}

fn truth(v: &Value) -> Option<bool> {
    match v {
        Value::Null => None,
        other => Some(other.as_f64().is_some_and(|x| x != 0.0)),
    }
}

fn boolean(b: Option<bool>) -> Value {
    b.map_or(Value::Null, |b| Value::Int(i64::from(b)))
}

fn overflow(op: &str) -> SqlError {
    SqlError::Eval(format!("numeric overflow in {op}"))
}

fn decimal_from(units: i128, scale: u8, op: &str) -> Result<Value, SqlError> {
    i64::try_from(units)
        .map(|u| Value::Decimal(Decimal::new(u, scale)))
        .map_err(|_| overflow(op))
}

pub fn arithmetic(op: BinOp, a: &Value, b: &Value) -> Result<Value, SqlError> {
    use Value::*;
    if a.is_null() || b.is_null() {
        return Ok(Null);
    }
    let name = format!("{op:?}");
    match (a, b) {
        (Int(x), Int(y)) => {
            let r = match op {
                BinOp::Add => x.checked_add(*y),
                BinOp::Sub => x.checked_sub(*y),
                BinOp::Mul => x.checked_mul(*y),
                BinOp::Div => {
                    if *y == 0 {
                        return Ok(Null);
                    }
                    x.checked_div(*y)
                }
                _ => unreachable!("comparison handled by caller"),
            };
            r.map(Int).ok_or_else(|| overflow(&name))
        }
        (Real(_), _) | (_, Real(_)) => {
            let (x, y) = match (a.as_f64(), b.as_f64()) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(SqlError::Eval(format!("non-numeric operand for {name}"))),
            };
            Ok(Real(match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div if y == 0.0 => return Ok(Null),
                BinOp::Div => x / y,
                _ => unreachable!("comparison handled by caller"),
            }))
        }
        _ => {
            let ((ua, sa), (ub, sb)) = match (a.as_scaled(), b.as_scaled()) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(SqlError::Eval(format!("non-numeric operand for {name}"))),
            };
            match op {
                BinOp::Add | BinOp::Sub => {
                    let s = sa.max(sb);
                    let ua = ua * 10i128.pow(u32::from(s - sa));
                    let ub = ub * 10i128.pow(u32::from(s - sb));
                    let r = if op == BinOp::Add { ua + ub } else { ua - ub };
                    decimal_from(r, s, &name)
                }
                BinOp::Mul => {
                    let s = sa + sb;
                    let r = ua.checked_mul(ub).ok_or_else(|| overflow(&name))?;
                    decimal_from(r, s, &name)
                }
                BinOp::Div => {
                    let (x, y) = (a.as_f64().unwrap_or(0.0), b.as_f64().unwrap_or(0.0));
                    Ok(if y == 0.0 { Null } else { Real(x / y) })
                }
                _ => unreachable!("comparison handled by caller"),
            }
        }
    }
}

fn comparison(op: BinOp, a: &Value, b: &Value) -> Value {
    boolean(a.compare(b).map(|o| match op {
        BinOp::Eq => o == Ordering::Equal,
        BinOp::NotEq => o != Ordering::Equal,
        BinOp::Lt => o == Ordering::Less,
        BinOp::LtEq => o != Ordering::Greater,
        BinOp::Gt => o == Ordering::Greater,
        BinOp::GtEq => o != Ordering::Less,
        _ => unreachable!("arithmetic handled by caller"),
    }))
}

/// Evaluates `e` against one row per slot and the finished aggregates.
pub fn eval(e: &CExpr, row: &[&[Value]], aggs: &[Value]) -> Result<Value, SqlError> {
    Ok(match e {
        CExpr::Column { slot, col } => row[*slot][*col].clone(),
        CExpr::Literal(v) => v.clone(),
        CExpr::Neg(x) => arithmetic(BinOp::Sub, &Value::Int(0), &eval(x, row, aggs)?)?,
        CExpr::Not(x) => boolean(truth(&eval(x, row, aggs)?).map(|b| !b)),
        CExpr::Binary { op, left, right } => {
            let (l, r) = (eval(left, row, aggs)?, eval(right, row, aggs)?);
            match op {
                BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div => arithmetic(*op, &l, &r)?,
                _ => comparison(*op, &l, &r),
            }
        }
        CExpr::And(l, r) => {
            let a = truth(&eval(l, row, aggs)?);
            if a == Some(false) {
                return Ok(Value::Int(0));
            }
            boolean(match (a, truth(&eval(r, row, aggs)?)) {
                (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            })
        }
        CExpr::Or(l, r) => {
            let a = truth(&eval(l, row, aggs)?);
            if a == Some(true) {
                return Ok(Value::Int(1));
            }
            boolean(match (a, truth(&eval(r, row, aggs)?)) {
                (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            })
        }
        CExpr::Between {
            expr,
            low,
            high,
            negated,
        } => {
            let v = eval(expr, row, aggs)?;
            let lo = comparison(BinOp::GtEq, &v, &eval(low, row, aggs)?);
            let hi = comparison(BinOp::LtEq, &v, &eval(high, row, aggs)?);
            let both = boolean(match (truth(&lo), truth(&hi)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            });
            if *negated {
                boolean(truth(&both).map(|b| !b))
            } else {
                both
            }
        }
        CExpr::InList {
            expr,
            list,
            negated,
        } => {
            let v = eval(expr, row, aggs)?;
            let mut result = Some(false);
            for item in list {
                match v.compare(&eval(item, row, aggs)?) {
                    Some(Ordering::Equal) => {
                        result = Some(true);
                        break;
                    }
                    None => result = None,
                    _ => {}
                }
            }
            boolean(if *negated { result.map(|b| !b) } else { result })
        }
        CExpr::IsNull { expr, negated } => {
            Value::Int(i64::from(eval(expr, row, aggs)?.is_null() != *negated))
        }
        CExpr::Aggregate(i) => aggs[*i].clone(),
    })
}

pub fn is_true(e: &CExpr, row: &[&[Value]]) -> Result<bool, SqlError> {
    Ok(truth(&eval(e, row, &[])?) == Some(true))
}

/// Running state of one aggregate.
#[derive(Debug, Clone)]
pub struct Accumulator {
    func: AggFunc,
    value: Value,
    count: i64,
}

impl Accumulator {
    pub fn new(func: AggFunc) -> Self {
        Self {
            func,
            value: Value::Null,
            count: 0,
        }
    }

    pub fn update(&mut self, v: Option<Value>) -> Result<(), SqlError> {
        let v = match (self.func, v) {
            (AggFunc::CountStar, _) => {
                self.count += 1;
                return Ok(());
            }
            (_, None) | (_, Some(Value::Null)) => return Ok(()),
            (_, Some(v)) => v,
        };
        self.count += 1;
        self.value = match (self.func, &self.value) {
            (_, Value::Null) => v,
            (AggFunc::Sum, acc) => arithmetic(BinOp::Add, acc, &v)?,
            (AggFunc::Min, acc) if v.compare(acc) == Some(Ordering::Less) => v,
            (AggFunc::Max, acc) if v.compare(acc) == Some(Ordering::Greater) => v,
            (_, acc) => acc.clone(),
        };
        Ok(())
    }

    pub fn finish(&self) -> Value {
        match self.func {
            AggFunc::Count | AggFunc::CountStar => Value::Int(self.count),
            _ => self.value.clone(),
        }
    }
}
