//! Parameter domains, deterministic drawing and SQL rendering.

use chrono::{Datelike, Duration, Months, NaiveDate};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::WorkloadError;
use crate::datagen::calendar::{year_month_label, Calendar};
use crate::datagen::hierarchy::{
    brand_label, category_label, city_label, mfgr_label, CITIES_PER_NATION, NATIONS, REGIONS,
    SEGMENTS,
};
use crate::value::{Decimal, Value};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    /// Uniform integer; with `scale > 0` the value is a decimal with that
    /// many fraction digits (`6` at scale 2 is `0.06`).
    IntRange {
        min: i64,
        max: i64,
        #[serde(default)]
        scale: u8,
    },
    Choice { values: Vec<serde_json::Value> },
    /// Named vocabulary of the generated data; `ordinal_max` caps the
    /// trailing ordinal (city digit, brand number, ...).
    Vocabulary {
        name: String,
        #[serde(default)]
        ordinal_max: Option<u32>,
    },
    /// Another parameter plus `by`; for text, the trailing digits are
    /// incremented keeping their width.
    Offset { of: String, by: i64 },
    DateRange { start: NaiveDate, end: NaiveDate },
    /// January 1st of a uniformly drawn year.
    YearStart { min: i32, max: i32 },
    DateOffset {
        of: String,
        #[serde(default)]
        years: u32,
        #[serde(default)]
        months: u32,
        #[serde(default)]
        days: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub domain: Domain,
    pub default: serde_json::Value,
}

/// Values of a named vocabulary, in a fixed order.
pub fn vocabulary(name: &str, ordinal_max: Option<u32>) -> Option<Vec<Value>> {
    let cap = move |n: u32| ordinal_max.is_none_or(|m| n <= m);
    let texts = |v: Vec<String>| Some(v.into_iter().map(Value::Text).collect());
    match name {
        "region" => texts(REGIONS.iter().map(|s| s.to_string()).collect()),
        "nation" => texts(NATIONS.iter().map(|(n, _)| n.to_string()).collect()),
        "segment" => texts(SEGMENTS.iter().map(|s| s.to_string()).collect()),
        "city" => texts(
            (0..NATIONS.len())
                .flat_map(|n| (0..CITIES_PER_NATION).filter(|d| cap(*d)).map(move |d| city_label(n, d)))
                .collect(),
        ),
        "mfgr" => texts((1..=5).filter(|m| cap(*m)).map(mfgr_label).collect()),
        "category" => texts(
            (1..=5)
                .flat_map(|m| (1..=5).filter(|c| cap(*c)).map(move |c| category_label(m, c)))
                .collect(),
        ),
        "brand" => texts(
            (1..=5)
                .flat_map(|m| {
                    (1..=5).flat_map(move |c| (1..=40).filter(move |b| cap(*b)).map(move |b| brand_label(m, c, b)))
                })
                .collect(),
        ),
        "yearmonth" | "yearmonthnum" => {
            let cal = Calendar::default();
            let firsts = cal.iter().filter(|d| d.day() == 1);
            Some(if name == "yearmonth" {
                firsts.map(|d| Value::Text(year_month_label(d))).collect()
            } else {
                firsts
                    .map(|d| Value::Int(i64::from(d.year()) * 100 + i64::from(d.month())))
                    .collect()
            })
        }
        _ => None,
    }
}

fn json_value(v: &serde_json::Value) -> Option<Value> {
    match v {
        serde_json::Value::Number(n) => n.as_i64().map(Value::Int),
        serde_json::Value::String(s) => Some(Value::Text(s.clone())),
        _ => None,
    }
}

fn offset_text(s: &str, by: i64) -> Option<String> {
    let digits = s.bytes().rev().take_while(u8::is_ascii_digit).count();
    if digits == 0 {
        return None;
    }
    let (head, tail) = s.split_at(s.len() - digits);
    let n = tail.parse::<i64>().ok()? + by;
    let rendered = format!("{n:0digits$}");
    (n >= 0 && rendered.len() == digits).then(|| format!("{head}{rendered}"))
}

fn offset_date(d: NaiveDate, years: u32, months: u32, days: i64) -> Option<NaiveDate> {
    d.checked_add_months(Months::new(years * 12 + months))?
        .checked_add_signed(Duration::days(days))
}

fn lookup<'a>(bound: &'a [(String, Value)], name: &str, param: &str) -> Result<&'a Value, WorkloadError> {
    bound
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v)
        .ok_or_else(|| WorkloadError::UnknownParam {
            param: param.to_string(),
            reference: name.to_string(),
        })
}

impl ParamSpec {
    fn empty(&self) -> WorkloadError {
        WorkloadError::EmptyDomain(self.name.clone())
    }

    /// Derived from earlier parameters rather than drawn.
    fn derived(&self, bound: &[(String, Value)]) -> Result<Option<Value>, WorkloadError> {
        Ok(match &self.domain {
            Domain::Offset { of, by } => Some(match lookup(bound, of, &self.name)? {
                Value::Int(i) => Value::Int(i + by),
                Value::Decimal(d) => Value::Decimal(Decimal::new(d.units + by, d.scale)),
                Value::Text(s) => Value::Text(offset_text(s, *by).ok_or_else(|| self.empty())?),
                _ => return Err(self.empty()),
            }),
            Domain::DateOffset {
                of,
                years,
                months,
                days,
            } => match lookup(bound, of, &self.name)? {
                Value::Date(d) => {
                    Some(Value::Date(offset_date(*d, *years, *months, *days).ok_or_else(|| self.empty())?))
                }
                _ => return Err(self.empty()),
            },
            _ => None,
        })
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng, bound: &[(String, Value)]) -> Result<Value, WorkloadError> {
        if let Some(v) = self.derived(bound)? {
            return Ok(v);
        }
        Ok(match &self.domain {
            Domain::IntRange { min, max, scale } => {
                if min > max {
                    return Err(self.empty());
                }
                let i = rng.gen_range(*min..=*max);
                if *scale == 0 {
                    Value::Int(i)
                } else {
                    Value::Decimal(Decimal::new(i, *scale))
                }
            }
            Domain::Choice { values } => {
                if values.is_empty() {
                    return Err(self.empty());
                }
                json_value(&values[rng.gen_range(0..values.len())]).ok_or_else(|| self.empty())?
            }
            Domain::Vocabulary { name, ordinal_max } => {
                let vocab = vocabulary(name, *ordinal_max).unwrap_or_default();
                if vocab.is_empty() {
                    return Err(self.empty());
                }
                vocab[rng.gen_range(0..vocab.len())].clone()
            }
            Domain::DateRange { start, end } => {
                let span = (*end - *start).num_days();
                if span < 0 {
                    return Err(self.empty());
                }
                Value::Date(*start + Duration::days(rng.gen_range(0..=span)))
            }
            Domain::YearStart { min, max } => {
                if min > max {
                    return Err(self.empty());
                }
                let y = rng.gen_range(*min..=*max);
                Value::Date(NaiveDate::from_ymd_opt(y, 1, 1).ok_or_else(|| self.empty())?)
            }
            Domain::Offset { .. } | Domain::DateOffset { .. } => unreachable!("derived above"),
        })
    }

    /// The declared default, typed by the domain.
    pub fn default_value(&self) -> Result<Value, WorkloadError> {
        let bad = |reason: &str| WorkloadError::BadDefault {
            param: self.name.clone(),
            reason: reason.to_string(),
        };
        let raw = json_value(&self.default).ok_or_else(|| bad("not a number or string"))?;
        let date = |v: &Value| match v {
            Value::Text(s) => s.parse::<NaiveDate>().map(Value::Date).map_err(|_| bad("not a date")),
            _ => Err(bad("dates are strings")),
        };
        match &self.domain {
            Domain::IntRange { scale, .. } if *scale > 0 => match raw {
                Value::Int(i) => Ok(Value::Decimal(Decimal::new(i, *scale))),
                _ => Err(bad("expected an integer")),
            },
            Domain::DateRange { .. } | Domain::YearStart { .. } | Domain::DateOffset { .. } => date(&raw),
            _ => Ok(raw),
        }
    }
}

/// SQL literal for a bound value.
pub fn render_literal(v: &Value) -> String {
    match v {
        Value::Null => "NULL".into(),
        Value::Text(s) => format!("'{}'", s.replace('\'', "''")),
        Value::Date(d) => format!("'{}'", d.format("%Y-%m-%d")),
        other => other.to_string(),
    }
}

/// Replaces `:name` placeholders outside string literals.
pub fn render(body: &str, mut lookup: impl FnMut(&str) -> Option<String>) -> Result<String, WorkloadError> {
    let mut out = String::with_capacity(body.len());
    let mut chars = body.char_indices().peekable();
    let mut in_string = false;
    while let Some((i, c)) = chars.next() {
        if c == '\'' {
            in_string = !in_string;
            out.push(c);
            continue;
        }
        let starts_name = chars
            .peek()
            .is_some_and(|(_, n)| n.is_ascii_alphabetic() || *n == '_');
        if c != ':' || in_string || !starts_name || body[..i].ends_with(':') {
            out.push(c);
            continue;
        }
        let start = i + 1;
        let mut end = start;
        while let Some((j, n)) = chars.peek() {
            if n.is_ascii_alphanumeric() || *n == '_' {
                end = j + n.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let name = &body[start..end];
        out.push_str(&lookup(name).ok_or_else(|| WorkloadError::UnboundPlaceholder(name.to_string()))?);
    }
    Ok(out)
}

/// Placeholder names in first-use order.
pub fn placeholders(body: &str) -> Vec<String> {
    let mut names = Vec::new();
    let _ = render(body, |n| {
        if !names.iter().any(|x: &String| x == n) {
            names.push(n.to_string());
        }
        Some(String::new())
    });
    names
}
