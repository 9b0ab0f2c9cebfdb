//! Comparison and ground-truth solvers: cheapest-insertion baseline, exact
//! search for tiny instances, and exact capacitated grouping.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, LocId, Metric, Request, Stop, StopKind, Walk};
use crate::spanning::Group;

/// Insertion order `0..n` shuffled by a seeded generator.
pub fn shuffled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut Xoshiro256StarStar::seed_from_u64(seed));
    order
}

/// Best insertion of one request into one walk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Insertion {
    pub delta: f64,
    /// The pickup goes right after stop `i`.
    pub i: usize,
    /// The dropoff goes right after stop `j` of the original walk (`j >= i`;
    /// with `j == i` it directly follows the pickup).
    pub j: usize,
}

/// Onboard count after every stop of a walk.
fn loads(stops: &[Stop]) -> Vec<usize> {
    let mut load = 0usize;
    stops
        .iter()
        .map(|s| {
            match s.kind {
                StopKind::Pickup(_) => load += 1,
                StopKind::Dropoff(_) => load -= 1,
                _ => {}
            }
            load
        })
        .collect()
}

/// Cheapest feasible insertion of `req` into `stops` in one pass.
///
/// For every dropoff slot `j` the best pickup slot `i <= j` is kept
/// incrementally; the window of admissible `i` restarts after any stop
/// already at capacity. Ties go to the smallest `(i, j)`.
pub fn best_insertion(stops: &[Stop], req: Request, capacity: usize, metric: &Metric) -> Option<Insertion> {
    let load = loads(stops);
    let (s, t) = (req.pickup, req.dropoff);
    let len = stops.len();
    let detour = |k: usize, x: LocId| -> f64 {
        let a = stops[k].loc;
        match stops.get(k + 1) {
            Some(b) => metric.dist(a, x) + metric.dist(x, b.loc) - metric.dist(a, b.loc),
            None => metric.dist(a, x),
        }
    };
    let ride = metric.dist(s, t);
    let mut best: Option<Insertion> = None;
    let mut open: Option<(f64, usize)> = None;
    for j in 0..len {
        if load[j] >= capacity {
            open = None;
            continue;
        }
        let a = stops[j].loc;
        let both = match stops.get(j + 1) {
            Some(b) => metric.dist(a, s) + ride + metric.dist(t, b.loc) - metric.dist(a, b.loc),
            None => metric.dist(a, s) + ride,
        };
        let mut consider = |c: Insertion| {
            let better = match best {
                None => true,
                Some(b) => c.delta < b.delta || (c.delta == b.delta && (c.i, c.j) < (b.i, b.j)),
            };
            if better {
                best = Some(c);
            }
        };
        if let Some((dp, i)) = open {
            consider(Insertion { delta: dp + detour(j, t), i, j });
        }
        consider(Insertion { delta: both, i: j, j });
        let dp = detour(j, s);
        if open.is_none_or(|(b, _)| dp < b) {
            open = Some((dp, j));
        }
    }
    best
}

fn apply_insertion(stops: &mut Vec<Stop>, r: usize, req: Request, ins: Insertion) {
    let pickup = Stop::new(req.pickup, StopKind::Pickup(r));
    let dropoff = Stop::new(req.dropoff, StopKind::Dropoff(r));
    stops.insert(ins.j + 1, dropoff);
    stops.insert(ins.i + 1, pickup);
}

/// Serves requests one at a time in `order`, each at the globally cheapest
/// feasible position over all vehicles. Ties go to the smallest vehicle.
pub fn insertion_baseline(instance: &Instance, order: &[usize]) -> Result<Assignment> {
    let n = instance.n();
    let mut seen = vec![false; n];
    for &r in order {
        if r >= n || std::mem::replace(&mut seen[r], true) {
            return Err(Error::Parameter(format!("insertion order is not a permutation of 0..{n}")));
        }
    }
    if order.len() != n {
        return Err(Error::Parameter(format!("insertion order is not a permutation of 0..{n}")));
    }
    let metric = instance.metric();
    let cap = instance.capacity();
    let mut walks: Vec<Vec<Stop>> =
        (0..instance.m()).map(|k| vec![Stop::new(instance.depot(k), StopKind::DepotStart)]).collect();
    for &r in order {
        let req = instance.request(r);
        let mut best: Option<(usize, Insertion)> = None;
        for (k, stops) in walks.iter().enumerate() {
            if let Some(ins) = best_insertion(stops, req, cap, metric) {
                if best.is_none_or(|(_, b)| ins.delta < b.delta) {
                    best = Some((k, ins));
                }
            }
        }
        // Appending to a walk always fits, so some vehicle always qualifies.
        let (k, ins) = best.ok_or_else(|| Error::Internal("no feasible insertion".into()))?;
        apply_insertion(&mut walks[k], r, req, ins);
    }
    Ok(Assignment::from_walks(
        walks
            .into_iter()
            .enumerate()
            .filter(|(_, s)| s.len() > 1)
            .map(|(vehicle, stops)| Walk { vehicle, stops })
            .collect(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleBudget {
    pub max_requests: usize,
    pub max_vehicles: usize,
    /// Cap on search nodes summed over all subproblems.
    pub max_states: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget { max_requests: 6, max_vehicles: 2, max_states: 20_000_000 }
    }
}

struct Search<'a> {
    requests: &'a [Request],
    metric: &'a Metric,
    capacity: usize,
    members: &'a [usize],
    states: &'a mut u64,
    max_states: u64,
    best: f64,
    best_seq: Vec<Stop>,
    seq: Vec<Stop>,
}

impl Search<'_> {
    fn run(&mut self, at: Option<LocId>, picked: u32, dropped: u32, onboard: usize, cost: f64) -> Result<()> {
        *self.states += 1;
        if *self.states > self.max_states {
            return Err(Error::BudgetExceeded(format!("more than {} search states", self.max_states)));
        }
        let full = (1u32 << self.members.len()) - 1;
        if dropped == full {
            if cost < self.best {
                self.best = cost;
                self.best_seq = self.seq.clone();
            }
            return Ok(());
        }
        // Admissible bound: the nearest outstanding event must be reached.
        if let Some(a) = at {
            let mut nearest = f64::INFINITY;
            for (b, &r) in self.members.iter().enumerate() {
                let bit = 1u32 << b;
                if picked & bit == 0 {
                    nearest = nearest.min(self.metric.dist(a, self.requests[r].pickup));
                } else if dropped & bit == 0 {
                    nearest = nearest.min(self.metric.dist(a, self.requests[r].dropoff));
                }
            }
            if cost + nearest >= self.best {
                return Ok(());
            }
        }
        for (b, &r) in self.members.iter().enumerate() {
            let bit = 1u32 << b;
            let step = |loc: LocId| at.map_or(0.0, |a| self.metric.dist(a, loc));
            if picked & bit == 0 {
                if onboard < self.capacity {
                    let loc = self.requests[r].pickup;
                    self.seq.push(Stop::new(loc, StopKind::Pickup(r)));
                    self.run(Some(loc), picked | bit, dropped, onboard + 1, cost + step(loc))?;
                    self.seq.pop();
                }
            } else if dropped & bit == 0 {
                let loc = self.requests[r].dropoff;
                self.seq.push(Stop::new(loc, StopKind::Dropoff(r)));
                self.run(Some(loc), picked, dropped | bit, onboard - 1, cost + step(loc))?;
                self.seq.pop();
            }
        }
        Ok(())
    }
}

/// Cheapest feasible service order of `members`, starting at `start` (or at
/// the first pickup when `None`). Returns the cost and the stops.
fn best_order(
    members: &[usize],
    start: Option<LocId>,
    requests: &[Request],
    metric: &Metric,
    capacity: usize,
    states: &mut u64,
    max_states: u64,
) -> Result<(f64, Vec<Stop>)> {
    if members.is_empty() {
        return Ok((0.0, Vec::new()));
    }
    let mut search = Search {
        requests,
        metric,
        capacity,
        members,
        states,
        max_states,
        best: f64::INFINITY,
        best_seq: Vec::new(),
        seq: Vec::new(),
    };
    search.run(start, 0, 0, 0, 0.0)?;
    Ok((search.best, search.best_seq))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactSolution {
    pub assignment: Assignment,
    pub cost: f64,
}

fn check_budget(instance: &Instance, budget: &OracleBudget) -> Result<()> {
    if instance.n() > budget.max_requests.min(31) {
        return Err(Error::BudgetExceeded(format!(
            "{} requests, budget allows {}",
            instance.n(),
            budget.max_requests
        )));
    }
    if instance.m() > budget.max_vehicles {
        return Err(Error::BudgetExceeded(format!(
            "{} vehicles, budget allows {}",
            instance.m(),
            budget.max_vehicles
        )));
    }
    Ok(())
}

/// Optimal assignment by enumerating every request-to-vehicle assignment and
/// solving each vehicle's subset by branch and bound.
pub fn exact_darp(instance: &Instance, budget: &OracleBudget) -> Result<ExactSolution> {
    check_budget(instance, budget)?;
    let (n, m) = (instance.n(), instance.m());
    let mut states = 0u64;
    let mut memo: HashMap<(usize, u32), (f64, Vec<Stop>)> = HashMap::new();
    let mut best: Option<(f64, Vec<u32>)> = None;
    let total = (m as u64).pow(n as u32);
    for code in 0..total {
        let mut masks = vec![0u32; m];
        let mut c = code;
        for r in 0..n {
            masks[(c % m as u64) as usize] |= 1 << r;
            c /= m as u64;
        }
        let mut cost = 0.0;
        for (k, &mask) in masks.iter().enumerate() {
            if mask == 0 {
                continue;
            }
            if !memo.contains_key(&(k, mask)) {
                let members: Vec<usize> = (0..n).filter(|r| mask & (1 << r) != 0).collect();
                let sol = best_order(
                    &members,
                    Some(instance.depot(k)),
                    instance.requests(),
                    instance.metric(),
                    instance.capacity(),
                    &mut states,
                    budget.max_states,
                )?;
                memo.insert((k, mask), sol);
            }
            cost += memo[&(k, mask)].0;
        }
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, masks));
        }
    }
    let (cost, masks) = best.expect("at least one assignment");
    let walks = masks
        .iter()
        .enumerate()
        .filter(|(_, &mask)| mask != 0)
        .map(|(k, &mask)| {
            let mut w = Walk::start(k, instance.depot(k));
            w.stops.extend(memo[&(k, mask)].1.iter().copied());
            w
        })
        .collect();
    Ok(ExactSolution { assignment: Assignment::from_walks(walks), cost })
}

/// Cheapest walk over a single group without a depot: it may start at any
/// pickup. Capacity is not binding since a group never exceeds it.
pub fn optimal_group_cost(group: &Group, requests: &[Request], metric: &Metric, budget: &OracleBudget) -> Result<f64> {
    let mut states = 0;
    if group.len() > budget.max_requests.min(31) {
        return Err(Error::BudgetExceeded(format!("group of {} requests", group.len())));
    }
    Ok(best_order(group.requests(), None, requests, metric, group.len(), &mut states, budget.max_states)?.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactGrouping {
    pub partition: Vec<Group>,
    pub cost: f64,
}

/// Minimum over all partitions into parts of size at most `capacity` of the
/// summed optimal per-part walk costs.
pub fn exact_grouping(
    requests: &[Request],
    capacity: usize,
    metric: &Metric,
    budget: &OracleBudget,
) -> Result<ExactGrouping> {
    let n = requests.len();
    if n == 0 {
        return Err(Error::InvalidInstance("grouping needs at least one request".into()));
    }
    if capacity == 0 {
        return Err(Error::Parameter("capacity must be at least 1".into()));
    }
    if n > budget.max_requests.min(31) {
        return Err(Error::BudgetExceeded(format!("{n} requests, budget allows {}", budget.max_requests)));
    }
    let mut states = 0u64;
    let mut part_cost: HashMap<u32, f64> = HashMap::new();
    let mut best: Option<(f64, Vec<u32>)> = None;
    // Restricted growth strings enumerate each set partition once.
    let mut label = vec![0usize; n];
    loop {
        let parts = label.iter().max().map_or(0, |&x| x + 1);
        let mut masks = vec![0u32; parts];
        for (r, &l) in label.iter().enumerate() {
            masks[l] |= 1 << r;
        }
        if masks.iter().all(|m| m.count_ones() as usize <= capacity) {
            let mut cost = 0.0;
            for &mask in &masks {
                if !part_cost.contains_key(&mask) {
                    let members: Vec<usize> = (0..n).filter(|r| mask & (1 << r) != 0).collect();
                    let c = best_order(&members, None, requests, metric, members.len(), &mut states, budget.max_states)?.0;
                    part_cost.insert(mask, c);
                }
                cost += part_cost[&mask];
            }
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, masks));
            }
        }
        // Next restricted growth string.
        let mut i = n;
        loop {
            if i == 1 {
                let (cost, masks) = best.expect("singletons always fit");
                let mut partition: Vec<Group> = masks
                    .iter()
                    .map(|&mask| Group::new((0..n).filter(|r| mask & (1 << r) != 0).collect()))
                    .collect::<Result<_>>()?;
                partition.sort_unstable_by_key(Group::id);
                return Ok(ExactGrouping { partition, cost });
            }
            i -= 1;
            let prefix_max = label[..i].iter().copied().max().unwrap_or(0);
            if label[i] <= prefix_max {
                label[i] += 1;
                for l in label.iter_mut().skip(i + 1) {
                    *l = 0;
                }
                break;
            }
        }
    }
}
