//! MST kernels and the group/cluster cost functions that drive grouping.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LocId, Metric, Request, TOL};

/// A non-empty set of request indices, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Group(Vec<usize>);

impl Group {
    pub fn new(mut requests: Vec<usize>) -> Result<Self> {
        if requests.is_empty() {
            return Err(Error::Domain("a group holds at least one request".into()));
        }
        requests.sort_unstable();
        if requests.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Domain("a group lists a request twice".into()));
        }
        Ok(Group(requests))
    }

    pub fn singleton(request: usize) -> Self {
        Group(vec![request])
    }

    pub fn requests(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Smallest request index; unique among disjoint groups.
    pub fn id(&self) -> usize {
        self.0[0]
    }

    pub fn is_disjoint(&self, other: &Group) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            match self.0[a].cmp(&other.0[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    /// Union of two disjoint groups.
    pub fn union(&self, other: &Group) -> Group {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() || b < other.0.len() {
            if b == other.0.len() || (a < self.0.len() && self.0[a] < other.0[b]) {
                v.push(self.0[a]);
                a += 1;
            } else {
                v.push(other.0[b]);
                b += 1;
            }
        }
        Group(v)
    }

    pub fn pickups(&self, requests: &[Request]) -> Vec<LocId> {
        self.0.iter().map(|&i| requests[i].pickup).collect()
    }

    pub fn dropoffs(&self, requests: &[Request]) -> Vec<LocId> {
        self.0.iter().map(|&i| requests[i].dropoff).collect()
    }
}

/// Prim's algorithm over the complete graph on `points`. Returns the tree
/// weight and the parent of every position (the first position is the root).
pub fn prim(points: &[LocId], metric: &Metric) -> (f64, Vec<Option<usize>>) {
    let k = points.len();
    let mut parent = vec![None; k];
    if k <= 1 {
        return (0.0, parent);
    }
    let mut in_tree = vec![false; k];
    let mut best = vec![f64::INFINITY; k];
    in_tree[0] = true;
    for j in 1..k {
        best[j] = metric.dist(points[0], points[j]);
        parent[j] = Some(0);
    }
    let mut total = 0.0;
    for _ in 1..k {
        let mut next = usize::MAX;
        let mut next_cost = f64::INFINITY;
        for j in 0..k {
            if !in_tree[j] && best[j] < next_cost {
                next = j;
                next_cost = best[j];
            }
        }
        in_tree[next] = true;
        total += next_cost;
        for j in 0..k {
            if !in_tree[j] {
                let d = metric.dist(points[next], points[j]);
                if d < best[j] {
                    best[j] = d;
                    parent[j] = Some(next);
                }
            }
        }
    }
    (total, parent)
}

/// Weight of a minimum spanning tree over `points`.
pub fn mst_cost(points: &[LocId], metric: &Metric) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Domain("MST over an empty point set".into()));
    }
    Ok(prim(points, metric).0)
}

fn mst_unchecked(points: &[LocId], metric: &Metric) -> f64 {
    prim(points, metric).0
}

/// MST over the pickups plus MST over the dropoffs of `group`.
pub fn mst_st(group: &Group, requests: &[Request], metric: &Metric) -> f64 {
    mst_unchecked(&group.pickups(requests), metric) + mst_unchecked(&group.dropoffs(requests), metric)
}

/// Shortest direct ride within a group.
pub fn min_ride(group: &Group, requests: &[Request], metric: &Metric) -> f64 {
    group
        .requests()
        .iter()
        .map(|&i| metric.dist(requests[i].pickup, requests[i].dropoff))
        .fold(f64::INFINITY, f64::min)
}

fn ensure_disjoint(x: &Group, y: &Group) -> Result<()> {
    if x.is_disjoint(y) {
        Ok(())
    } else {
        Err(Error::Domain(format!("groups {:?} and {:?} overlap", x.requests(), y.requests())))
    }
}

/// Incremental MST cost of serving two groups together.
pub fn w1(x: &Group, y: &Group, requests: &[Request], metric: &Metric) -> Result<f64> {
    ensure_disjoint(x, y)?;
    let joint = mst_st(&x.union(y), requests, metric);
    Ok((joint - mst_st(x, requests, metric) - mst_st(y, requests, metric)).max(0.0))
}

/// Cost of serving two groups separately.
pub fn w2(x: &Group, y: &Group, requests: &[Request], metric: &Metric) -> Result<f64> {
    ensure_disjoint(x, y)?;
    Ok(min_ride(x, requests, metric) + min_ride(y, requests, metric))
}

/// Closest pickup pair plus closest dropoff pair.
pub fn w1_prime(x: &Group, y: &Group, requests: &[Request], metric: &Metric) -> Result<f64> {
    ensure_disjoint(x, y)?;
    Ok(closest_pairs(x, y, requests, metric))
}

fn closest_pairs(x: &Group, y: &Group, requests: &[Request], metric: &Metric) -> f64 {
    let mut ds = f64::INFINITY;
    let mut dt = f64::INFINITY;
    for &i in x.requests() {
        for &j in y.requests() {
            ds = ds.min(metric.dist(requests[i].pickup, requests[j].pickup));
            dt = dt.min(metric.dist(requests[i].dropoff, requests[j].dropoff));
        }
    }
    ds + dt
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    /// Incremental MST merge cost.
    ExactW1,
    /// Closest-pair merge cost.
    ApproxW1Prime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeKind {
    Merge,
    Separate,
}

/// Value of the cluster cost and the group pair attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClusterCost {
    pub cost: f64,
    /// Positions of the witness groups inside the first and second cluster.
    pub witness: (usize, usize),
    pub kind: MergeKind,
}

#[derive(Clone, Copy, Debug)]
struct GroupStats {
    mst_st: f64,
    min_ride: f64,
}

/// Per-group MST and min-ride values keyed by the sorted request list.
/// Reads are shared, inserts take the write lock.
#[derive(Debug, Default)]
pub struct GroupCache {
    stats: RwLock<HashMap<Vec<usize>, GroupStats>>,
}

impl GroupCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn stats(&self, g: &Group, requests: &[Request], metric: &Metric) -> GroupStats {
        if let Some(s) = self.stats.read().expect("group cache poisoned").get(g.requests()) {
            return *s;
        }
        let s = GroupStats { mst_st: mst_st(g, requests, metric), min_ride: min_ride(g, requests, metric) };
        self.stats.write().expect("group cache poisoned").insert(g.requests().to_vec(), s);
        s
    }

    pub fn mst_st(&self, g: &Group, requests: &[Request], metric: &Metric) -> f64 {
        self.stats(g, requests, metric).mst_st
    }

    pub fn min_ride(&self, g: &Group, requests: &[Request], metric: &Metric) -> f64 {
        self.stats(g, requests, metric).min_ride
    }

    pub fn len(&self) -> usize {
        self.stats.read().expect("group cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Drops every entry whose key is not in `keep`.
    pub fn retain(&self, keep: impl Fn(&[usize]) -> bool) {
        self.stats.write().expect("group cache poisoned").retain(|k, _| keep(k));
    }
}

/// Cluster cost: the minimum over group pairs of `min(merge, separate)`.
///
/// Ties between merging and separating go to separating. Ties between
/// group pairs go to the lexicographically smallest (sorted) pair of
/// request lists, so the result does not depend on argument order.
pub fn cluster_cost(
    a: &[Group],
    b: &[Group],
    requests: &[Request],
    metric: &Metric,
    mode: CostMode,
    cache: &GroupCache,
) -> Result<ClusterCost> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("cluster cost over an empty cluster".into()));
    }
    for x in a {
        for y in b {
            ensure_disjoint(x, y)?;
        }
    }
    Ok(cluster_cost_unchecked(a, b, requests, metric, mode, cache))
}

pub(crate) fn cluster_cost_unchecked(
    a: &[Group],
    b: &[Group],
    requests: &[Request],
    metric: &Metric,
    mode: CostMode,
    cache: &GroupCache,
) -> ClusterCost {
    let mut best: Option<(ClusterCost, (&Group, &Group))> = None;
    for (ia, x) in a.iter().enumerate() {
        let sx = cache.stats(x, requests, metric);
        for (ib, y) in b.iter().enumerate() {
            let sy = cache.stats(y, requests, metric);
            let separate = sx.min_ride + sy.min_ride;
            let merge = match mode {
                ExactW1 => (mst_st(&x.union(y), requests, metric) - sx.mst_st - sy.mst_st).max(0.0),
                ApproxW1Prime => closest_pairs(x, y, requests, metric),
            };
            let (cost, kind) = if merge < separate - TOL {
                (merge, MergeKind::Merge)
            } else {
                (separate, MergeKind::Separate)
            };
            let key = if x <= y { (x, y) } else { (y, x) };
            let better = match &best {
                None => true,
                Some((cur, cur_key)) => {
                    cost < cur.cost - TOL || (cost <= cur.cost + TOL && key < *cur_key)
                }
            };
            if better {
                best = Some((ClusterCost { cost, witness: (ia, ib), kind }, key));
            }
        }
    }
    best.expect("clusters are non-empty").0
}

use CostMode::{ApproxW1Prime, ExactW1};
