//! Minimum rooted spanning forest over depots and groups, depth-first route
//! assembly along each tree, and the end-to-end solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group_walk::{group_walk, GroupWalk};
use crate::grouping::{hierarchical_grouping, GroupingConfig, GroupingResult, Matcher};
use crate::model::{Assignment, Instance, LocId, Stop, StopKind, Walk};
use crate::spanning::{CostMode, Group};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ForestNode {
    /// Vehicle index.
    Depot(usize),
    /// Index into the partition.
    Group(usize),
}

/// One end of a forest edge: a depot location, or a pickup of a group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Portal {
    pub loc: LocId,
    pub request: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeCost {
    pub cost: f64,
    /// Realizing location on the first node's side.
    pub a: Portal,
    /// Realizing location on the second node's side.
    pub b: Portal,
}

fn portals(node: ForestNode, instance: &Instance, partition: &[Group]) -> Result<Vec<Portal>> {
    match node {
        ForestNode::Depot(k) if k < instance.m() => Ok(vec![Portal { loc: instance.depot(k), request: None }]),
        ForestNode::Group(g) if g < partition.len() => Ok(partition[g]
            .requests()
            .iter()
            .map(|&r| Portal { loc: instance.request(r).pickup, request: Some(r) })
            .collect()),
        _ => Err(Error::Domain(format!("unknown forest node {node:?}"))),
    }
}

/// Cheapest connection between two nodes through depot locations and
/// pickups. Ties go to the first realizing pair in (a, b) order.
pub fn rsf_edge_cost(a: ForestNode, b: ForestNode, instance: &Instance, partition: &[Group]) -> Result<EdgeCost> {
    if a == b {
        return Err(Error::Domain(format!("forest edge from {a:?} to itself")));
    }
    let (pa, pb) = (portals(a, instance, partition)?, portals(b, instance, partition)?);
    Ok(closest(&pa, &pb, instance))
}

fn closest(pa: &[Portal], pb: &[Portal], instance: &Instance) -> EdgeCost {
    let mut best = EdgeCost { cost: f64::INFINITY, a: pa[0], b: pb[0] };
    for x in pa {
        for y in pb {
            let d = instance.d(x.loc, y.loc);
            if d < best.cost {
                best = EdgeCost { cost: d, a: *x, b: *y };
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestEdge {
    pub parent: ForestNode,
    pub cost: f64,
    pub parent_portal: Portal,
    /// The child's entry pickup.
    pub child_portal: Portal,
}

/// Spanning forest over depots and groups, one tree per used depot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootedForest {
    /// Edge to the parent of every group, indexed like the partition.
    pub parent: Vec<ForestEdge>,
    /// Root depot of every group.
    pub root: Vec<usize>,
}

impl RootedForest {
    pub fn cost(&self) -> f64 {
        self.parent.iter().map(|e| e.cost).sum()
    }

    /// Children of `node`, ascending by group index.
    pub fn children(&self, node: ForestNode) -> Vec<usize> {
        (0..self.parent.len()).filter(|&g| self.parent[g].parent == node).collect()
    }

    /// Depots that root at least one group, ascending.
    pub fn used_depots(&self) -> Vec<usize> {
        let mut d = self.root.clone();
        d.sort_unstable();
        d.dedup();
        d
    }
}

/// Minimum rooted spanning forest: all depots are contracted into a single
/// root, a minimum spanning tree is grown from it by Prim, and every group
/// hanging off the root is attached to its closest depot.
pub fn mrsf(instance: &Instance, partition: &[Group]) -> Result<RootedForest> {
    if partition.is_empty() {
        return Err(Error::Domain("spanning forest over an empty partition".into()));
    }
    let g = partition.len();
    let depot_portals: Vec<Portal> = portals(ForestNode::Depot(0), instance, partition)?
        .into_iter()
        .chain((1..instance.m()).map(|k| Portal { loc: instance.depot(k), request: None }))
        .collect();
    let group_portals: Vec<Vec<Portal>> =
        (0..g).map(|i| portals(ForestNode::Group(i), instance, partition)).collect::<Result<_>>()?;

    let mut edge: Vec<ForestEdge> = (0..g)
        .map(|v| {
            let e = closest(&depot_portals, &group_portals[v], instance);
            let k = (0..instance.m()).find(|&k| instance.depot(k) == e.a.loc).expect("depot portal");
            ForestEdge { parent: ForestNode::Depot(k), cost: e.cost, parent_portal: e.a, child_portal: e.b }
        })
        .collect();
    let mut in_tree = vec![false; g];
    let mut root = vec![usize::MAX; g];
    for _ in 0..g {
        let mut u = usize::MAX;
        for v in 0..g {
            if !in_tree[v] && (u == usize::MAX || edge[v].cost < edge[u].cost) {
                u = v;
            }
        }
        in_tree[u] = true;
        root[u] = match edge[u].parent {
            ForestNode::Depot(k) => k,
            ForestNode::Group(p) => root[p],
        };
        for v in 0..g {
            if !in_tree[v] {
                let e = closest(&group_portals[u], &group_portals[v], instance);
                if e.cost < edge[v].cost {
                    edge[v] = ForestEdge { parent: ForestNode::Group(u), cost: e.cost, parent_portal: e.a, child_portal: e.b };
                }
            }
        }
    }
    Ok(RootedForest { parent: edge, root })
}

/// How the depth-first traversal is turned into a vehicle walk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteStyle {
    /// Every move of the traversal, including portal revisits and the
    /// final return to the depot, with consecutive repeats removed.
    Literal,
    /// Only the depot start and the service stops of the traversal, in the
    /// same order. Never longer than `Literal` under the triangle inequality.
    #[default]
    ServiceOnly,
}

/// Full depth-first traversal of the tree rooted at depot `k`, as a list of
/// stops before any cleanup. Group walks are indexed like the partition.
pub fn dfs_trace(k: usize, forest: &RootedForest, walks: &[GroupWalk], instance: &Instance) -> Result<Vec<Stop>> {
    if walks.len() != forest.parent.len() {
        return Err(Error::Internal(format!(
            "{} group walks for {} forest groups",
            walks.len(),
            forest.parent.len()
        )));
    }
    if k >= instance.m() {
        return Err(Error::Domain(format!("unknown vehicle {k}")));
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); forest.parent.len()];
    let mut depot_children = Vec::new();
    for (g, e) in forest.parent.iter().enumerate() {
        match e.parent {
            ForestNode::Depot(d) if d == k => depot_children.push(g),
            ForestNode::Depot(_) => {}
            ForestNode::Group(p) => children[p].push(g),
        }
    }
    let p = instance.depot(k);
    let mut out = vec![Stop::new(p, StopKind::DepotStart), Stop::new(p, StopKind::Transit)];
    for &c in &depot_children {
        out.push(Stop::new(p, StopKind::Transit));
        visit_group(c, forest, walks, &children, &mut out);
    }
    out.push(Stop::new(p, StopKind::Transit));
    out.push(Stop::new(p, StopKind::Transit));
    Ok(out)
}

fn visit_group(g: usize, forest: &RootedForest, walks: &[GroupWalk], children: &[Vec<usize>], out: &mut Vec<Stop>) {
    let s0 = forest.parent[g].child_portal.loc;
    out.push(Stop::new(s0, StopKind::Transit));
    out.extend(walks[g].stops.iter().copied());
    for (r, s) in walks[g].pickup_stops() {
        for &c in &children[g] {
            if forest.parent[c].parent_portal.request == Some(r) {
                out.push(Stop::new(s, StopKind::Transit));
                visit_group(c, forest, walks, children, out);
            }
        }
        out.push(Stop::new(s, StopKind::Transit));
    }
    out.push(Stop::new(s0, StopKind::Transit));
}

/// Drops transit stops that repeat the location of an adjacent stop.
pub fn dedup_trace(trace: &[Stop]) -> Vec<Stop> {
    let mut out: Vec<Stop> = Vec::with_capacity(trace.len());
    for &s in trace {
        if let Some(last) = out.last_mut() {
            if last.loc == s.loc {
                if s.kind == StopKind::Transit {
                    continue;
                }
                if last.kind == StopKind::Transit {
                    *last = s;
                    continue;
                }
            }
        }
        out.push(s);
    }
    out
}

/// Walk for the tree rooted at depot `k`, or `None` if the tree is empty.
pub fn dfs_route(
    k: usize,
    forest: &RootedForest,
    walks: &[GroupWalk],
    instance: &Instance,
    style: RouteStyle,
) -> Result<Option<Walk>> {
    if !forest.root.contains(&k) {
        return Ok(None);
    }
    let trace = dfs_trace(k, forest, walks, instance)?;
    let stops = match style {
        RouteStyle::Literal => dedup_trace(&trace),
        RouteStyle::ServiceOnly => trace.into_iter().filter(|s| s.kind != StopKind::Transit).collect(),
    };
    Ok(Some(Walk { vehicle: k, stops }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum Variant {
    /// Incremental-MST merge cost, exact matching.
    Hgr,
    /// Closest-pair merge cost, exact matching.
    HgrW1,
    /// Closest-pair merge cost, bucketed greedy matching.
    HgrApprox { delta: f64 },
}

pub const DEFAULT_DELTA: f64 = 0.5;

impl Variant {
    pub fn grouping_config(&self, capacity: usize) -> GroupingConfig {
        let (cost_mode, matcher) = match *self {
            Variant::Hgr => (CostMode::ExactW1, Matcher::Exact),
            Variant::HgrW1 => (CostMode::ApproxW1Prime, Matcher::Exact),
            Variant::HgrApprox { delta } => (CostMode::ApproxW1Prime, Matcher::Bucketed { delta }),
        };
        GroupingConfig { cost_mode, matcher, capacity, record_trace: false }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Hgr => "hgr",
            Variant::HgrW1 => "hgr-w1",
            Variant::HgrApprox { .. } => "hgr-approx",
        }
    }
}

/// Every intermediate product of one solver run.
#[derive(Clone, Debug)]
pub struct HgrSolution {
    pub assignment: Assignment,
    pub grouping: GroupingResult,
    pub forest: RootedForest,
    /// Indexed like `grouping.partition`.
    pub walks: Vec<GroupWalk>,
}

/// Groups the requests, spans the groups from the depots, and routes one
/// vehicle along each tree.
pub fn hgr_solve(instance: &Instance, variant: Variant) -> Result<Assignment> {
    Ok(hgr_solve_with(instance, variant, RouteStyle::default())?.assignment)
}

pub fn hgr_solve_with(instance: &Instance, variant: Variant, style: RouteStyle) -> Result<HgrSolution> {
    let cfg = variant.grouping_config(instance.capacity());
    let grouping = hierarchical_grouping(instance.requests(), instance.metric(), &cfg)?;
    let partition = &grouping.partition;
    let walks: Vec<GroupWalk> = partition
        .iter()
        .map(|g| group_walk(g, instance.requests(), instance.metric()))
        .collect::<Result<_>>()?;
    let forest = mrsf(instance, partition)?;
    let mut vehicle_walks = Vec::new();
    for k in forest.used_depots() {
        if let Some(w) = dfs_route(k, &forest, &walks, instance, style)? {
            vehicle_walks.push(w);
        }
    }
    let assignment = Assignment::from_walks(vehicle_walks);
    let report = assignment.validate(instance);
    if !report.is_ok() {
        return Err(Error::Internal(format!("solver produced an infeasible assignment: {report}")));
    }
    Ok(HgrSolution { assignment, grouping, forest, walks })
}
