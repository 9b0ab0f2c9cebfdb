//! Hierarchical grouping: repeatedly pair up clusters of groups by a
//! minimum-weight perfect matching, merging the witness groups of a matched
//! pair when that is cheaper than serving them separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{bucketed_greedy_matching, exact_min_perfect_matching, WeightedCompleteGraph};
use crate::model::{Metric, Request};
use crate::spanning::{cluster_cost_unchecked, min_ride, mst_st, CostMode, Group, GroupCache, MergeKind};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Matcher {
    Exact,
    Bucketed { delta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupingConfig {
    pub cost_mode: CostMode,
    pub matcher: Matcher,
    pub capacity: usize,
    pub record_trace: bool,
}

impl GroupingConfig {
    pub fn exact(capacity: usize) -> Self {
        GroupingConfig { cost_mode: CostMode::ExactW1, matcher: Matcher::Exact, capacity, record_trace: false }
    }
}

/// A set of disjoint groups, kept sorted by group id.
pub type Cluster = Vec<Group>;

/// One matched pair of clusters and what was done with it.
#[derive(Clone, Debug, PartialEq)]
pub struct PairDecision {
    pub left: Cluster,
    pub right: Cluster,
    pub witness: (Group, Group),
    pub kind: MergeKind,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationTrace {
    pub level: usize,
    pub pairs: Vec<PairDecision>,
    /// Cluster left out of an odd-sized matching round.
    pub carried: Option<Cluster>,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupingResult {
    /// Final groups sorted by id.
    pub partition: Vec<Group>,
    /// Final clusters sorted by smallest request.
    pub clusters: Vec<Cluster>,
    /// Matching weight of each executed iteration.
    pub iteration_weights: Vec<f64>,
    /// Empty unless `record_trace` was set.
    pub trace: Vec<IterationTrace>,
}

/// Number of matching rounds for capacity `lambda`: floor(log2 lambda).
pub fn grouping_levels(capacity: usize) -> usize {
    if capacity == 0 {
        0
    } else {
        capacity.ilog2() as usize
    }
}

fn cluster_key(c: &Cluster) -> usize {
    c[0].id()
}

/// Groups `requests` into a capacity-bounded partition.
pub fn hierarchical_grouping(requests: &[Request], metric: &Metric, cfg: &GroupingConfig) -> Result<GroupingResult> {
    if requests.is_empty() {
        return Err(Error::InvalidInstance("grouping needs at least one request".into()));
    }
    if cfg.capacity == 0 {
        return Err(Error::Parameter("capacity must be at least 1".into()));
    }
    if let Matcher::Bucketed { delta } = cfg.matcher {
        if delta <= 0.0 || !delta.is_finite() {
            return Err(Error::Parameter(format!("bucket ratio delta must be positive, got {delta}")));
        }
    }
    let cache = GroupCache::new();
    let mut collection: Vec<Cluster> = (0..requests.len()).map(|i| vec![Group::singleton(i)]).collect();
    let mut iteration_weights = Vec::new();
    let mut trace = Vec::new();

    for level in 1..=grouping_levels(cfg.capacity) {
        if collection.len() < 2 {
            break;
        }
        let k = collection.len();
        let mut cost = vec![0.0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                let c = cluster_cost_unchecked(&collection[i], &collection[j], requests, metric, cfg.cost_mode, &cache).cost;
                cost[i * k + j] = c;
                cost[j * k + i] = c;
            }
        }

        // With an odd count, sit out the cluster whose cheapest partner is
        // the most expensive.
        let carried = if k % 2 == 1 {
            let mut best: Option<(f64, usize)> = None;
            for i in 0..k {
                let cheapest = (0..k).filter(|&j| j != i).map(|j| cost[i * k + j]).fold(f64::INFINITY, f64::min);
                if best.is_none_or(|(b, _)| cheapest > b) {
                    best = Some((cheapest, i));
                }
            }
            best.map(|(_, i)| i)
        } else {
            None
        };
        let active: Vec<usize> = (0..k).filter(|&i| Some(i) != carried).collect();
        let graph = WeightedCompleteGraph::from_fn(active.len(), |a, b| cost[active[a] * k + active[b]])?;
        let matching = match cfg.matcher {
            Matcher::Exact => exact_min_perfect_matching(&graph)?,
            Matcher::Bucketed { delta } => bucketed_greedy_matching(&graph, delta)?,
        };
        iteration_weights.push(matching.total_weight);

        let mut next: Vec<Cluster> = Vec::with_capacity(k / 2 + 1);
        let mut pairs = Vec::new();
        for &(a, b) in &matching.pairs {
            let (left, right) = (&collection[active[a]], &collection[active[b]]);
            let cc = cluster_cost_unchecked(left, right, requests, metric, cfg.cost_mode, &cache);
            let (x, y) = (&left[cc.witness.0], &right[cc.witness.1]);
            let mut merged: Cluster = Vec::with_capacity(left.len() + right.len());
            match cc.kind {
                MergeKind::Merge => {
                    merged.extend(left.iter().filter(|g| *g != x).cloned());
                    merged.extend(right.iter().filter(|g| *g != y).cloned());
                    merged.push(x.union(y));
                }
                MergeKind::Separate => {
                    merged.extend(left.iter().cloned());
                    merged.extend(right.iter().cloned());
                }
            }
            merged.sort_unstable_by_key(Group::id);
            if cfg.record_trace {
                pairs.push(PairDecision {
                    left: left.clone(),
                    right: right.clone(),
                    witness: (x.clone(), y.clone()),
                    kind: cc.kind,
                    cost: cc.cost,
                });
            }
            next.push(merged);
        }
        if let Some(c) = carried {
            next.push(collection[c].clone());
        }
        next.sort_unstable_by_key(cluster_key);
        if cfg.record_trace {
            trace.push(IterationTrace {
                level,
                pairs,
                carried: carried.map(|c| collection[c].clone()),
                weight: matching.total_weight,
            });
        }
        collection = next;
    }

    let mut partition: Vec<Group> = collection.iter().flatten().cloned().collect();
    partition.sort_unstable_by_key(Group::id);
    debug_assert!(partition.iter().all(|g| g.len() <= cfg.capacity));
    Ok(GroupingResult { partition, clusters: collection, iteration_weights, trace })
}

/// Both sides of the telescoping bound on the final partition:
/// `sum_P (mst_st(P) + min_ride(P))` against the total matching weight plus
/// the min ride of every group that is alone in its final cluster.
pub fn telescope_sides(result: &GroupingResult, requests: &[Request], metric: &Metric) -> (f64, f64) {
    let lhs = result
        .partition
        .iter()
        .map(|p| mst_st(p, requests, metric) + min_ride(p, requests, metric))
        .sum();
    let sole: f64 = result
        .clusters
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| min_ride(&c[0], requests, metric))
        .sum();
    (lhs, result.iteration_weights.iter().sum::<f64>() + sole)
}

/// Whether the telescoping bound holds within a relative tolerance of 1e-6.
/// Meaningful for runs with the exact merge cost and the exact matcher.
pub fn check_telescope_inequality(result: &GroupingResult, requests: &[Request], metric: &Metric) -> bool {
    let (lhs, rhs) = telescope_sides(result, requests, metric);
    lhs <= rhs + 1e-6 * rhs.abs().max(1.0)
}
