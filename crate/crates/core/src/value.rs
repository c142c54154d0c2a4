//! Scalar values shared by the generator, the engines and the evaluator.

use std::cmp::Ordering;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Fixed-point decimal stored as an integer count of `10^-scale` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Decimal {
    pub units: i64,
    pub scale: u8,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DecimalParseError {
    #[error("empty decimal literal")]
    Empty,
    #[error("invalid decimal literal `{0}`")]
    Invalid(String),
    #[error("decimal literal `{0}` has more than {1} fractional digits")]
    TooPrecise(String, u8),
    #[error("decimal literal `{0}` overflows 64-bit units")]
    Overflow(String),
}

impl Decimal {
    pub const fn new(units: i64, scale: u8) -> Self {
        Self { units, scale }
    }

    /// Parses `text` exactly at the given scale; fewer fractional digits are
    /// zero-padded, more are rejected.
    pub fn parse(text: &str, scale: u8) -> Result<Self, DecimalParseError> {
        let t = text.trim();
        if t.is_empty() {
            return Err(DecimalParseError::Empty);
        }
        let (negative, body) = match t.as_bytes()[0] {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if (int_part.is_empty() && frac_part.is_empty())
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(DecimalParseError::Invalid(text.to_string()));
        }
        if frac_part.len() > scale as usize {
            return Err(DecimalParseError::TooPrecise(text.to_string(), scale));
        }
        let overflow = || DecimalParseError::Overflow(text.to_string());
        let mut units: i64 = 0;
        for b in int_part.bytes().chain(frac_part.bytes()) {
            units = units
                .checked_mul(10)
                .and_then(|u| u.checked_add(i64::from(b - b'0')))
                .ok_or_else(overflow)?;
        }
        for _ in frac_part.len()..scale as usize {
            units = units.checked_mul(10).ok_or_else(overflow)?;
        }
        Ok(Self {
            units: if negative { -units } else { units },
            scale,
        })
    }

    /// Units expressed at `scale`, rounding half away from zero when the
    /// target scale is coarser.
    pub fn rescaled(&self, scale: u8) -> i128 {
        let units = i128::from(self.units);
        match scale.cmp(&self.scale) {
            Ordering::Equal => units,
            Ordering::Greater => units * 10i128.pow(u32::from(scale - self.scale)),
            Ordering::Less => {
                let div = 10i128.pow(u32::from(self.scale - scale));
                let q = units / div;
                let r = units % div;
                if r.abs() * 2 >= div {
                    q + units.signum()
                } else {
                    q
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.units as f64 / 10f64.powi(i32::from(self.scale))
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 0 {
            return write!(f, "{}", self.units);
        }
        let div = 10u64.pow(u32::from(self.scale));
        let abs = self.units.unsigned_abs();
        let sign = if self.units < 0 { "-" } else { "" };
        write!(
            f,
            "{sign}{}.{:0width$}",
            abs / div,
            abs % div,
            width = self.scale as usize
        )
    }
}

/// A single field value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Null,
    Int(i64),
    Decimal(Decimal),
    Real(f64),
    Text(String),
    Date(NaiveDate),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn money(cents: i64) -> Self {
        Value::Decimal(Decimal::new(cents, 2))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Exact numeric view as `(units, scale)`; `None` for reals and non-numerics.
    pub fn as_scaled(&self) -> Option<(i128, u8)> {
        match self {
            Value::Int(i) => Some((i128::from(*i), 0)),
            Value::Decimal(d) => Some((i128::from(d.units), d.scale)),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Decimal(d) => Some(d.to_f64()),
            Value::Real(r) => Some(*r),
            _ => None,
        }
    }

    /// Canonical comparison key, see [`Cell`].
    pub fn canonical(&self) -> Cell {
        match self {
            Value::Null => Cell::Null,
            Value::Int(i) => Cell::Number(i128::from(*i) * 100),
            Value::Decimal(d) => Cell::Number(d.rescaled(Cell::NUMBER_SCALE)),
            Value::Real(r) => Cell::Number((r * 100.0).round() as i128),
            Value::Text(s) => Cell::Text(s.clone()),
            Value::Date(d) => Cell::Text(d.format("%Y-%m-%d").to_string()),
        }
    }

    /// SQL three-valued comparison; `None` when either side is NULL or the
    /// types are incomparable.
    pub fn compare(&self, other: &Value) -> Option<Ordering> {
        use Value::*;
        match (self, other) {
            (Null, _) | (_, Null) => None,
            (Text(a), Text(b)) => Some(a.cmp(b)),
            (Date(a), Date(b)) => Some(a.cmp(b)),
            (Date(a), Text(b)) => Some(a.format("%Y-%m-%d").to_string().as_str().cmp(b.as_str())),
            (Text(a), Date(b)) => Some(a.as_str().cmp(b.format("%Y-%m-%d").to_string().as_str())),
            (a, b) => match (a.as_scaled(), b.as_scaled()) {
                (Some((ua, sa)), Some((ub, sb))) => {
                    let s = sa.max(sb);
                    let ua = ua * 10i128.pow(u32::from(s - sa));
                    let ub = ub * 10i128.pow(u32::from(s - sb));
                    Some(ua.cmp(&ub))
                }
                _ => a.as_f64()?.partial_cmp(&b.as_f64()?),
            },
        }
    }
}

impl fmt::Display for Value {
    /// Renders the value the way it appears in a `.tbl` field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Int(i) => write!(f, "{i}"),
            Value::Decimal(d) => write!(f, "{d}"),
            Value::Real(r) => write!(f, "{r}"),
            Value::Text(s) => f.write_str(s),
            Value::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

/// Type-agnostic comparison key for result cells.
///
/// Numbers from different engines come back as integers, fixed-point
/// decimals or doubles; they are all normalised to hundredths so that a
/// SQLite `REAL` sum and an exact decimal sum compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cell {
    Null,
    Number(i128),
    Text(String),
}

impl Cell {
    pub const NUMBER_SCALE: u8 = 2;
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Null => f.write_str("NULL"),
            Cell::Number(n) => {
                let sign = if *n < 0 { "-" } else { "" };
                write!(f, "{sign}{}.{:02}", n.abs() / 100, n.abs() % 100)
            }
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_parse_and_render() {
        assert_eq!(Decimal::parse("3.50", 2).unwrap(), Decimal::new(350, 2));
        assert_eq!(Decimal::parse("3.5", 2).unwrap(), Decimal::new(350, 2));
        assert_eq!(Decimal::parse("-0.07", 2).unwrap(), Decimal::new(-7, 2));
        assert_eq!(Decimal::parse("12", 2).unwrap().to_string(), "12.00");
        assert_eq!(Decimal::new(-5, 2).to_string(), "-0.05");
        assert!(matches!(
            Decimal::parse("1.234", 2),
            Err(DecimalParseError::TooPrecise(..))
        ));
        assert!(Decimal::parse("1.2.3", 2).is_err());
        assert!(Decimal::parse("", 2).is_err());
    }

    #[test]
    fn rescale_rounds_half_away_from_zero() {
        assert_eq!(Decimal::new(12345, 4).rescaled(2), 123);
        assert_eq!(Decimal::new(12350, 4).rescaled(2), 124);
        assert_eq!(Decimal::new(-12350, 4).rescaled(2), -124);
        assert_eq!(Decimal::new(7, 0).rescaled(2), 700);
    }

    #[test]
    fn canonical_cells_agree_across_representations() {
        assert_eq!(Value::Int(3).canonical(), Value::money(300).canonical());
        assert_eq!(Value::Real(3.5).canonical(), Value::money(350).canonical());
        assert_eq!(
            Value::Real(1234567.89).canonical(),
            Value::money(123456789).canonical()
        );
    }

    #[test]
    fn mixed_numeric_comparison() {
        assert_eq!(
            Value::Int(2).compare(&Value::money(199)),
            Some(Ordering::Greater)
        );
        assert_eq!(Value::Int(2).compare(&Value::Null), None);
        assert_eq!(
            Value::Real(0.05).compare(&Value::money(5)),
            Some(Ordering::Equal)
        );
    }
}
