//! Query flights, their parameter domains, the TPC-H pairing and
//! filter-factor estimation.

pub mod estimate;
pub mod params;

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use sqlparser::ast::{visit_expressions, visit_relations, Expr, SetExpr, Statement};

use crate::catalog::SchemaCatalog;
use crate::datagen::rng::substream;
use crate::datagen::{Benchmark, GenError, GenSpec};
use crate::sql::analyze::{analyze, object_name};
use crate::sql::{parse_statement, SqlError};
use crate::value::Value;

pub use estimate::estimate_filter_factor;
pub use params::{Domain, ParamSpec};

#[derive(Debug, thiserror::Error)]
pub enum WorkloadError {
    #[error("parameter {0} has an empty domain")]
    EmptyDomain(String),
    #[error("parameter {param} refers to unknown parameter {reference}")]
    UnknownParam { param: String, reference: String },
    #[error("placeholder :{0} has no value")]
    UnboundPlaceholder(String),
    #[error("parameter {param}: bad default ({reason})")]
    BadDefault { param: String, reason: String },
    #[error("label {0} is not in the mapping table")]
    Unmapped(String),
    #[error("unknown template {0}")]
    UnknownTemplate(String),
    #[error("cannot estimate filter factor: {0}")]
    Estimate(String),
    #[error(transparent)]
    Sql(#[from] SqlError),
    #[error(transparent)]
    Gen(#[from] GenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Date,
    Part,
    Supplier,
    Customer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTemplate {
    pub id: String,
    pub benchmark: Benchmark,
    pub flight: Option<u8>,
    pub body: String,
    /// Restricted dimensions; also the overlap hint for plan ordering.
    pub dimensions: BTreeSet<Dimension>,
    pub params: Vec<ParamSpec>,
    /// Paired TPC-H query id.
    pub counterpart: Option<String>,
}

#[derive(Deserialize)]
struct Sidecar {
    id: String,
    #[serde(default)]
    flight: Option<u8>,
    #[serde(default)]
    dimensions: BTreeSet<Dimension>,
    #[serde(default)]
    counterpart: Option<String>,
    params: Vec<ParamSpec>,
}

macro_rules! query_files {
    ($dir:literal: $($name:literal),*) => {
        [$((
            include_str!(concat!("../../queries/", $dir, "/", $name, ".sql")),
            include_str!(concat!("../../queries/", $dir, "/", $name, ".json")),
        )),*]
    };
}

const SSB_FILES: [(&str, &str); 13] = query_files!("ssb":
    "q1.1", "q1.2", "q1.3", "q2.1", "q2.2", "q2.3", "q3.1", "q3.2", "q3.3", "q3.4", "q4.1", "q4.2", "q4.3");
const TPCH_FILES: [(&str, &str); 4] = query_files!("tpch": "q2", "q3", "q5", "q6");

fn load(files: &[(&str, &str)], benchmark: Benchmark) -> Vec<QueryTemplate> {
    files
        .iter()
        .map(|(sql, json)| {
            let side: Sidecar = serde_json::from_str(json).expect("shipped sidecar parses");
            QueryTemplate {
                id: side.id,
                benchmark,
                flight: side.flight,
                body: sql.trim().trim_end_matches(';').to_string(),
                dimensions: side.dimensions,
                params: side.params,
                counterpart: side.counterpart,
            }
        })
        .collect()
}

/// The 13 SSB templates in flight order.
pub fn flight_catalog() -> Vec<QueryTemplate> {
    load(&SSB_FILES, Benchmark::Ssb)
}

/// The TPC-H queries paired with SSB queries (Q2, Q3, Q5, Q6).
pub fn reference_catalog() -> Vec<QueryTemplate> {
    load(&TPCH_FILES, Benchmark::Tpch)
}

pub fn template(id: &str) -> Result<QueryTemplate, WorkloadError> {
    flight_catalog()
        .into_iter()
        .chain(reference_catalog())
        .find(|t| t.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| WorkloadError::UnknownTemplate(id.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryInstance {
    pub template_id: String,
    pub benchmark: Benchmark,
    pub params: Vec<(String, Value)>,
    pub rendered_sql: String,
    /// Estimated fraction of fact rows retrieved; SSB only.
    pub estimated_filter_factor: Option<f64>,
    pub dimensions: BTreeSet<Dimension>,
}

fn bind(t: &QueryTemplate, params: Vec<(String, Value)>) -> Result<QueryInstance, WorkloadError> {
    let rendered_sql = params::render(&t.body, |name| {
        params
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| params::render_literal(v))
    })?;
    let estimated_filter_factor = match t.benchmark {
        Benchmark::Ssb => Some(estimate_filter_factor(
            &rendered_sql,
            &GenSpec::new(crate::scale::ScaleFactor::ONE, 0),
        )?),
        Benchmark::Tpch => {
            parse_statement(&rendered_sql)?;
            None
        }
    };
    Ok(QueryInstance {
        template_id: t.id.clone(),
        benchmark: t.benchmark,
        params,
        rendered_sql,
        estimated_filter_factor,
        dimensions: t.dimensions.clone(),
    })
}

/// Draws every parameter from its domain; deterministic in `(template, seed)`.
pub fn instantiate(t: &QueryTemplate, seed: u64) -> Result<QueryInstance, WorkloadError> {
    let mut rng = substream(seed, "WORKLOAD", &t.id, 0);
    let mut bound = Vec::new();
    for p in &t.params {
        let v = p.draw(&mut rng, &bound)?;
        bound.push((p.name.clone(), v));
    }
    bind(t, bound)
}

/// Binds the declared defaults, which reproduce the canonical selectivities.
pub fn instantiate_default(t: &QueryTemplate) -> Result<QueryInstance, WorkloadError> {
    let bound = t
        .params
        .iter()
        .map(|p| Ok((p.name.clone(), p.default_value()?)))
        .collect::<Result<Vec<_>, WorkloadError>>()?;
    bind(t, bound)
}

/// One row of the TPC-H to SSB pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MappingEntry {
    pub index: u8,
    pub tpch: &'static str,
    /// Label as printed in the original pairing table.
    pub original_label: &'static str,
    /// Canonical flight label.
    pub ssb: &'static str,
}

const fn entry(index: u8, tpch: &'static str, original_label: &'static str, ssb: &'static str) -> MappingEntry {
    MappingEntry {
        index,
        tpch,
        original_label,
        ssb,
    }
}

pub const MAPPING: [MappingEntry; 10] = [
    entry(1, "Q6", "Q1.1", "Q1.1"),
    entry(2, "Q6", "Q1.2", "Q1.2"),
    entry(3, "Q6", "Q1.3", "Q1.3"),
    entry(4, "Q3", "Q5.1", "Q3.1"),
    entry(5, "Q3", "Q5.2", "Q3.2"),
    entry(6, "Q3", "Q5.3", "Q3.3"),
    entry(7, "Q2", "Q12.1", "Q2.1"),
    entry(8, "Q2", "Q12.2", "Q2.2"),
    entry(9, "Q5", "Q13.1", "Q4.1"),
    entry(10, "Q5", "Q13.2", "Q4.2"),
];

/// Accepts either the canonical or the original label.
pub fn tpch_counterpart(label: &str) -> Result<&'static str, WorkloadError> {
    MAPPING
        .iter()
        .find(|e| e.ssb.eq_ignore_ascii_case(label) || e.original_label.eq_ignore_ascii_case(label))
        .map(|e| e.tpch)
        .ok_or_else(|| WorkloadError::Unmapped(label.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    Unparseable { message: String },
    NotASelect,
    SubqueryForbidden,
    SelfJoinForbidden { table: String },
    FactTableMissing,
    UnknownTable { table: String },
}

/// Structural checks on a query: one fact-table reference, no nesting,
/// only catalog tables.
pub fn validate_sql(sql: &str, catalog: &SchemaCatalog) -> Vec<Violation> {
    let stmt = match parse_statement(sql) {
        Ok(s) => s,
        Err(e) => {
            return vec![Violation::Unparseable {
                message: e.to_string(),
            }]
        }
    };
    let mut out = Vec::new();
    let query = match &stmt {
        Statement::Query(q) => q,
        _ => return vec![Violation::NotASelect],
    };
    if !matches!(query.body.as_ref(), SetExpr::Select(_)) || query.with.is_some() {
        out.push(Violation::NotASelect);
    }
    let mut nested = false;
    let _ = visit_expressions(&stmt, |e: &Expr| {
        if matches!(e, Expr::Subquery(_) | Expr::InSubquery { .. } | Expr::Exists { .. }) {
            nested = true;
        }
        ControlFlow::<()>::Continue(())
    });
    if let SetExpr::Select(s) = query.body.as_ref() {
        for twj in &s.from {
            let factors = std::iter::once(&twj.relation).chain(twj.joins.iter().map(|j| &j.relation));
            if factors.into_iter().any(|f| !matches!(f, sqlparser::ast::TableFactor::Table { .. })) {
                nested = true;
            }
        }
    }
    if nested {
        out.push(Violation::SubqueryForbidden);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let _ = visit_relations(&stmt, |name| {
        *counts.entry(object_name(name)).or_default() += 1;
        ControlFlow::<()>::Continue(())
    });
    if !counts.keys().any(|t| catalog.fact_tables().any(|f| f.name == *t)) {
        out.push(Violation::FactTableMissing);
    }
    for (table, n) in &counts {
        if *n > 1 {
            out.push(Violation::SelfJoinForbidden { table: table.clone() });
        }
        if !catalog.contains(table) {
            out.push(Violation::UnknownTable { table: table.clone() });
        }
    }
    out
}

/// Validates the body with every placeholder bound to NULL.
pub fn validate_template(t: &QueryTemplate, catalog: &SchemaCatalog) -> Vec<Violation> {
    match params::render(&t.body, |_| Some("NULL".into())) {
        Ok(sql) => validate_sql(&sql, catalog),
        Err(e) => vec![Violation::Unparseable {
            message: e.to_string(),
        }],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightCoverage {
    pub flight: u8,
    pub templates: Vec<String>,
    /// Union of restricted dimensions (functional coverage).
    pub dimensions: BTreeSet<Dimension>,
    pub min_filter_factor: f64,
    pub max_filter_factor: f64,
    /// Default filter factors in template order.
    pub filter_factors: Vec<f64>,
    pub strictly_decreasing: bool,
}

/// Functional and selectivity coverage per flight, from default instances.
pub fn coverage_report(templates: &[QueryTemplate]) -> Result<Vec<FlightCoverage>, WorkloadError> {
    let mut flights: BTreeMap<u8, Vec<&QueryTemplate>> = BTreeMap::new();
    for t in templates.iter().filter(|t| t.benchmark == Benchmark::Ssb) {
        flights.entry(t.flight.unwrap_or(0)).or_default().push(t);
    }
    let mut out = Vec::new();
    for (flight, ts) in flights {
        let mut ffs = Vec::new();
        for t in &ts {
            ffs.push(instantiate_default(t)?.estimated_filter_factor.unwrap_or(1.0));
        }
        out.push(FlightCoverage {
            flight,
            templates: ts.iter().map(|t| t.id.clone()).collect(),
            dimensions: ts.iter().flat_map(|t| t.dimensions.iter().copied()).collect(),
            min_filter_factor: ffs.iter().copied().fold(f64::INFINITY, f64::min),
            max_filter_factor: ffs.iter().copied().fold(0.0, f64::max),
            strictly_decreasing: ffs.windows(2).all(|w| w[1] < w[0]),
            filter_factors: ffs,
        });
    }
    Ok(out)
}

/// Columns that `sql` reads, resolved against `catalog`; used by tests and
/// the index advisor.
pub fn referenced_tables(sql: &str, catalog: &SchemaCatalog) -> Result<Vec<String>, WorkloadError> {
    Ok(analyze(sql, catalog)?.tables.into_iter().map(|t| t.name).collect())
}
