//! Run plans and query ordering.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::datagen::rng::substream;
use crate::workload::QueryInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Configuration {
    /// Primary-key structures only.
    OutOfBox,
    /// Out-of-box plus advised indices.
    Indexed,
}

impl Configuration {
    pub fn name(self) -> &'static str {
        match self {
            Configuration::OutOfBox => "out_of_box",
            Configuration::Indexed => "indexed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "out_of_box" => Some(Configuration::OutOfBox),
            "indexed" => Some(Configuration::Indexed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingPolicy {
    Sequential,
    OverlapMinimizing,
    SeededShuffle,
}

impl OrderingPolicy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sequential" => Some(OrderingPolicy::Sequential),
            "overlap_minimizing" => Some(OrderingPolicy::OverlapMinimizing),
            "seeded_shuffle" => Some(OrderingPolicy::SeededShuffle),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub engine: String,
    pub configuration: Configuration,
    pub policy: OrderingPolicy,
    pub seed: u64,
    /// Instances in execution order.
    pub instances: Vec<QueryInstance>,
    pub repetitions: u32,
    pub cold_runs_discarded: u32,
    pub flush_caches: bool,
}

pub const DEFAULT_REPETITIONS: u32 = 3;
pub const DEFAULT_DISCARDED: u32 = 1;

impl RunPlan {
    /// Short content hash identifying the plan in records.
    pub fn plan_id(&self) -> String {
        let json = serde_json::to_vec(self).expect("plan serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}

fn disjoint(a: &QueryInstance, b: &QueryInstance) -> bool {
    a.dimensions.is_disjoint(&b.dimensions)
}

/// Number of adjacent pairs with disjoint dimension sets.
pub fn disjoint_adjacencies(order: &[QueryInstance]) -> usize {
    order.windows(2).filter(|w| disjoint(&w[0], &w[1])).count()
}

fn greedy_from(items: &[QueryInstance], start: usize) -> Vec<usize> {
    let mut left: Vec<usize> = (0..items.len()).filter(|&i| i != start).collect();
    let mut order = vec![start];
    while !left.is_empty() {
        let last = &items[*order.last().expect("non-empty")];
        let pick = left
            .iter()
            .position(|&i| disjoint(last, &items[i]))
            .or_else(|| {
                // least overlap, then input order
                left.iter()
                    .enumerate()
                    .min_by_key(|(_, &i)| last.dimensions.intersection(&items[i].dimensions).count())
                    .map(|(p, _)| p)
            })
            .expect("non-empty");
        order.push(left.remove(pick));
    }
    order
}

/// (disjoint adjacencies, reversed total overlap); larger is better.
type OrderScore = (usize, std::cmp::Reverse<usize>);

fn overlap_minimizing(items: Vec<QueryInstance>) -> Vec<QueryInstance> {
    if items.len() < 2 {
        return items;
    }
    let overlap = |a: usize, b: usize| items[a].dimensions.intersection(&items[b].dimensions).count();
    // most disjoint adjacencies, then least total overlap, then earliest start
    let mut best: Option<(OrderScore, Vec<usize>)> = None;
    for start in 0..items.len() {
        let order = greedy_from(&items, start);
        let disjoint = order.windows(2).filter(|w| overlap(w[0], w[1]) == 0).count();
        let total: usize = order.windows(2).map(|w| overlap(w[0], w[1])).sum();
        let score = (disjoint, std::cmp::Reverse(total));
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, order));
        }
    }
    let (_, order) = best.expect("at least one start");
    order.into_iter().map(|i| items[i].clone()).collect()
}

/// Orders `instances` by `policy`, with default repetition counts.
pub fn build_plan(
    instances: Vec<QueryInstance>,
    engine: &str,
    configuration: Configuration,
    policy: OrderingPolicy,
    seed: u64,
) -> RunPlan {
    let instances = match policy {
        OrderingPolicy::Sequential => instances,
        OrderingPolicy::OverlapMinimizing => overlap_minimizing(instances),
        OrderingPolicy::SeededShuffle => {
            let mut v = instances;
            v.shuffle(&mut substream(seed, "PLAN", "ORDER", 0));
            v
        }
    };
    RunPlan {
        engine: engine.to_string(),
        configuration,
        policy,
        seed,
        instances,
        repetitions: DEFAULT_REPETITIONS,
        cold_runs_discarded: DEFAULT_DISCARDED,
        flush_caches: false,
    }
}
