//! Independent reference computations for integration and acceptance tests.
//! Nothing here calls into the solver modules they check.
#![allow(dead_code)]

use std::collections::HashMap;

use hgr_core::model::{Instance, Metric, Point, Request};
use hgr_core::spanning::Group;
use rand::rngs::StdRng;
use rand::Rng;

/// Minimum perfect matching by recursion on the lowest free vertex.
pub fn brute_matching(w: &[Vec<f64>]) -> f64 {
    fn rec(w: &[Vec<f64>], free: u32, memo: &mut HashMap<u32, f64>) -> f64 {
        if free == 0 {
            return 0.0;
        }
        if let Some(&v) = memo.get(&free) {
            return v;
        }
        let i = free.trailing_zeros() as usize;
        let rest = free & !(1 << i);
        let mut best = f64::INFINITY;
        for j in 0..w.len() {
            if rest & (1 << j) != 0 {
                best = best.min(w[i][j] + rec(w, rest & !(1 << j), memo));
            }
        }
        memo.insert(free, best);
        best
    }
    rec(w, (1u32 << w.len()) - 1, &mut HashMap::new())
}

/// Kruskal with a union-find; `O(k^2 log k)`.
pub fn kruskal(points: &[usize], metric: &Metric) -> f64 {
    let k = points.len();
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            edges.push((metric.dist(points[a], points[b]), a, b));
        }
    }
    edges.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut total = 0.0;
    for (d, a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            total += d;
        }
    }
    total
}

pub fn mst_pickups_dropoffs(group: &[usize], requests: &[Request], metric: &Metric) -> f64 {
    let s: Vec<usize> = group.iter().map(|&r| requests[r].pickup).collect();
    let t: Vec<usize> = group.iter().map(|&r| requests[r].dropoff).collect();
    kruskal(&s, metric) + kruskal(&t, metric)
}

fn portal_gap(a: &[usize], b: &[usize], metric: &Metric) -> f64 {
    a.iter().flat_map(|&x| b.iter().map(move |&y| metric.dist(x, y))).fold(f64::INFINITY, f64::min)
}

/// Minimum over every parent function (each group picks a depot or another
/// group) that is acyclic.
pub fn brute_forest(instance: &Instance, partition: &[Group]) -> f64 {
    let (m, g) = (instance.m(), partition.len());
    let portals: Vec<Vec<usize>> = (0..m)
        .map(|k| vec![instance.depot(k)])
        .chain(partition.iter().map(|p| p.requests().iter().map(|&r| instance.request(r).pickup).collect()))
        .collect();
    let choices = m + g;
    let mut best = f64::INFINITY;
    let mut parent = vec![0usize; g];
    let total = (choices as u64).pow(g as u32);
    'outer: for code in 0..total {
        let mut c = code;
        for p in parent.iter_mut() {
            *p = (c % choices as u64) as usize;
            c /= choices as u64;
        }
        let mut cost = 0.0;
        for v in 0..g {
            // node ids: depots 0..m, group v is m + v
            if parent[v] == m + v {
                continue 'outer;
            }
            let mut x = v;
            let mut steps = 0;
            while parent[x] >= m {
                x = parent[x] - m;
                steps += 1;
                if steps > g {
                    continue 'outer;
                }
            }
            cost += portal_gap(&portals[parent[v]], &portals[m + v], instance.metric());
        }
        best = best.min(cost);
    }
    best
}

/// Cheapest feasible event order over `members`, by plain depth-first
/// enumeration of every order. `start = None` starts at the first stop.
pub fn brute_order(members: &[usize], start: Option<usize>, requests: &[Request], metric: &Metric, cap: usize) -> f64 {
    fn rec(
        members: &[usize],
        at: Option<usize>,
        state: &mut [u8],
        onboard: usize,
        left: usize,
        requests: &[Request],
        metric: &Metric,
        cap: usize,
    ) -> f64 {
        if left == 0 {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for i in 0..members.len() {
            let r = requests[members[i]];
            let (loc, next, delta) = match state[i] {
                0 if onboard < cap => (r.pickup, 1u8, 1isize),
                1 => (r.dropoff, 2u8, -1),
                _ => continue,
            };
            let step = at.map_or(0.0, |a| metric.dist(a, loc));
            let prev = state[i];
            state[i] = next;
            let sub = rec(members, Some(loc), state, (onboard as isize + delta) as usize, left - 1, requests, metric, cap);
            state[i] = prev;
            best = best.min(step + sub);
        }
        best
    }
    let mut state = vec![0u8; members.len()];
    rec(members, start, &mut state, 0, 2 * members.len(), requests, metric, cap)
}

/// Optimal multi-vehicle cost: best split of the requests over vehicles,
/// each vehicle serving its subset in its cheapest order.
pub fn brute_darp(instance: &Instance) -> f64 {
    let (n, m) = (instance.n(), instance.m());
    let full = (1usize << n) - 1;
    let cost: Vec<Vec<f64>> = (0..m)
        .map(|k| {
            (0..=full)
                .map(|mask| {
                    let members: Vec<usize> = (0..n).filter(|r| mask & (1 << r) != 0).collect();
                    brute_order(&members, Some(instance.depot(k)), instance.requests(), instance.metric(), instance.capacity())
                })
                .collect()
        })
        .collect();
    // best[k][mask]: vehicles 0..k serve exactly `mask`
    let mut best = vec![f64::INFINITY; full + 1];
    best[0] = 0.0;
    for k in 0..m {
        let mut next = vec![f64::INFINITY; full + 1];
        for mask in 0..=full {
            let mut sub = mask;
            loop {
                next[mask] = next[mask].min(best[mask ^ sub] + cost[k][sub]);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
        best = next;
    }
    best[full]
}

/// Optimal capacitated grouping: the lowest remaining request joins each
/// admissible subset of the others.
pub fn brute_grouping(requests: &[Request], cap: usize, metric: &Metric) -> f64 {
    let n = requests.len();
    let part = |mask: usize| -> f64 {
        let members: Vec<usize> = (0..n).filter(|r| mask & (1 << r) != 0).collect();
        brute_order(&members, None, requests, metric, members.len())
    };
    fn rec(rest: usize, cap: usize, part: &dyn Fn(usize) -> f64, memo: &mut HashMap<usize, f64>) -> f64 {
        if rest == 0 {
            return 0.0;
        }
        if let Some(&v) = memo.get(&rest) {
            return v;
        }
        let low = rest & rest.wrapping_neg();
        let others = rest ^ low;
        let mut best = f64::INFINITY;
        let mut sub = others;
        loop {
            if (sub.count_ones() as usize) < cap {
                best = best.min(part(sub | low) + rec(others ^ sub, cap, part, memo));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
        memo.insert(rest, best);
        best
    }
    rec((1 << n) - 1, cap, &part, &mut HashMap::new())
}

pub fn random_points(rng: &mut StdRng, k: usize, side: f64) -> Vec<Point> {
    (0..k).map(|_| Point::new(rng.gen::<f64>() * side, rng.gen::<f64>() * side)).collect()
}

pub fn random_instance(rng: &mut StdRng, n: usize, m: usize, cap: usize, side: f64) -> Instance {
    let depots = random_points(rng, m, side);
    let pts = random_points(rng, 2 * n, side);
    let reqs: Vec<(Point, Point)> = pts.chunks(2).map(|c| (c[0], c[1])).collect();
    Instance::euclidean(&depots, &reqs, cap).unwrap()
}

/// Random partition of `0..n` into parts of at most `cap`, sorted by min.
pub fn random_partition(rng: &mut StdRng, n: usize, cap: usize) -> Vec<Group> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < n {
        let len = rng.gen_range(1..=cap.min(n - i));
        parts.push(Group::new(order[i..i + len].to_vec()).unwrap());
        i += len;
    }
    parts.sort_by_key(|g| g.requests()[0]);
    parts
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
