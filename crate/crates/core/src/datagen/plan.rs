use serde::{Deserialize, Serialize};

use super::calendar::Calendar;
use crate::scale::ScaleFactor;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ScalingRule {
    /// `ceil(base × SF)`.
    Linear { base: u64 },
    /// `base × (1 + floor(log2 SF))` for `SF ≥ 1`, `ceil(base × SF)` below.
    Logarithmic { base: u64 },
    /// One row per calendar day.
    Calendar,
    /// Independent of the scale factor.
    Fixed { rows: u64 },
    /// `per_parent ×` the cardinality of another table.
    PerParent { parent: String, per_parent: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CardinalityPlan {
    pub rules: Vec<(String, ScalingRule)>,
}

impl CardinalityPlan {
    pub fn ssb(date_table: &str) -> Self {
        Self {
            rules: vec![
                ("LINEORDER".into(), ScalingRule::Linear { base: 6_000_000 }),
                ("CUSTOMER".into(), ScalingRule::Linear { base: 30_000 }),
                ("SUPPLIER".into(), ScalingRule::Linear { base: 2_000 }),
                ("PART".into(), ScalingRule::Logarithmic { base: 200_000 }),
                (date_table.to_string(), ScalingRule::Calendar),
            ],
        }
    }

    /// Reference TPC-H sizes (four lines per order).
    pub fn tpch() -> Self {
        Self {
            rules: vec![
                ("PART".into(), ScalingRule::Linear { base: 200_000 }),
                ("SUPPLIER".into(), ScalingRule::Linear { base: 10_000 }),
                (
                    "PARTSUPP".into(),
                    ScalingRule::PerParent {
                        parent: "PART".into(),
                        per_parent: 4,
                    },
                ),
                ("CUSTOMER".into(), ScalingRule::Linear { base: 150_000 }),
                ("ORDERS".into(), ScalingRule::Linear { base: 1_500_000 }),
                (
                    "LINEITEM".into(),
                    ScalingRule::PerParent {
                        parent: "ORDERS".into(),
                        per_parent: 4,
                    },
                ),
                ("NATION".into(), ScalingRule::Fixed { rows: 25 }),
                ("REGION".into(), ScalingRule::Fixed { rows: 5 }),
            ],
        }
    }

    pub fn rule(&self, table: &str) -> Option<&ScalingRule> {
        self.rules
            .iter()
            .find(|(t, _)| t.eq_ignore_ascii_case(table))
            .map(|(_, r)| r)
    }

    pub fn cardinality(&self, table: &str, sf: ScaleFactor, calendar: &Calendar) -> Option<u64> {
        let rows = match self.rule(table)? {
            ScalingRule::Linear { base } => sf.scale_ceil(*base),
            ScalingRule::Logarithmic { base } => match sf.floor_log2() {
                Some(k) => base * (1 + u64::from(k)),
                None => sf.scale_ceil(*base),
            },
            ScalingRule::Calendar => calendar.days(),
            ScalingRule::Fixed { rows } => *rows,
            ScalingRule::PerParent { parent, per_parent } => {
                self.cardinality(parent, sf, calendar)? * per_parent
            }
        };
        Some(rows.max(1))
    }
}
