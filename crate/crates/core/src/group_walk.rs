//! Feasible walk through one group: every pickup, then every dropoff,
//! joined through the request with the shortest direct ride.

use crate::error::{Error, Result};
use crate::model::{Metric, Request, Stop, StopKind};
use crate::spanning::{prim, Group};

/// Hamiltonian path over `points` that ends at the first occurrence of
/// `anchor`, returned as positions into `points`.
///
/// The path is the reversed depth-first preorder of an MST rooted at the
/// anchor. At every node the child leading to the farthest leaf (tree
/// distance) is visited last, so the reversed order starts at that leaf.
/// Cost is at most twice the MST.
pub fn tsp_path_ending_at(points: &[usize], anchor: usize, metric: &Metric) -> Result<Vec<usize>> {
    let Some(a) = points.iter().position(|&p| p == anchor) else {
        return Err(Error::Domain(format!("anchor location {anchor} is not among the path points")));
    };
    let k = points.len();
    // Prim roots at position 0, so put the anchor there.
    let mut order: Vec<usize> = Vec::with_capacity(k);
    order.push(a);
    order.extend((0..k).filter(|&i| i != a));
    let locs: Vec<usize> = order.iter().map(|&i| points[i]).collect();
    let (_, parent) = prim(&locs, metric);

    let mut children = vec![Vec::new(); k];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(v);
        }
    }
    // Tree distance from the anchor.
    let mut depth = vec![0.0; k];
    let mut bfs = vec![0usize];
    let mut head = 0;
    while head < bfs.len() {
        let u = bfs[head];
        head += 1;
        for &c in &children[u] {
            depth[c] = depth[u] + metric.dist(locs[u], locs[c]);
            bfs.push(c);
        }
    }
    let mut far = 0;
    for v in 0..k {
        if children[v].is_empty() && (depth[v] > depth[far] || (depth[v] == depth[far] && order[v] < order[far])) {
            far = v;
        }
    }
    let mut on_path = vec![false; k];
    let mut v = far;
    on_path[v] = true;
    while let Some(p) = parent[v] {
        on_path[p] = true;
        v = p;
    }

    let mut preorder = Vec::with_capacity(k);
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        preorder.push(order[u]);
        let mut kids = children[u].clone();
        // Popped in ascending original position, path child last.
        kids.sort_by_key(|&c| (on_path[c], order[c]));
        stack.extend(kids.into_iter().rev());
    }
    preorder.reverse();
    Ok(preorder)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupWalk {
    pub group: Group,
    /// Pickups of the group, then its dropoffs.
    pub stops: Vec<Stop>,
    /// Request with the shortest direct ride; its pickup is the last pickup
    /// and its dropoff the first dropoff.
    pub glue: usize,
}

impl GroupWalk {
    pub fn cost(&self, metric: &Metric) -> f64 {
        self.stops.windows(2).map(|w| metric.dist(w[0].loc, w[1].loc)).sum()
    }

    pub fn first_loc(&self) -> usize {
        self.stops[0].loc
    }

    pub fn last_loc(&self) -> usize {
        self.stops[self.stops.len() - 1].loc
    }

    /// Pickup stops in walk order.
    pub fn pickup_stops(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.stops.iter().filter_map(|s| match s.kind {
            StopKind::Pickup(r) => Some((r, s.loc)),
            _ => None,
        })
    }
}

/// Request of `group` with the shortest direct ride, smallest index on ties.
pub fn glue_request(group: &Group, requests: &[Request], metric: &Metric) -> usize {
    let mut best = group.requests()[0];
    let mut best_d = f64::INFINITY;
    for &r in group.requests() {
        let d = metric.dist(requests[r].pickup, requests[r].dropoff);
        if d < best_d {
            best = r;
            best_d = d;
        }
    }
    best
}

pub fn group_walk(group: &Group, requests: &[Request], metric: &Metric) -> Result<GroupWalk> {
    if group.is_empty() {
        return Err(Error::Domain("group walk over an empty group".into()));
    }
    let members = group.requests();
    if let Some(&r) = members.iter().find(|&&r| r >= requests.len()) {
        return Err(Error::Domain(format!("group references unknown request {r}")));
    }
    let glue = glue_request(group, requests, metric);
    if members.len() == 1 {
        let r = requests[glue];
        return Ok(GroupWalk {
            group: group.clone(),
            stops: vec![Stop::new(r.pickup, StopKind::Pickup(glue)), Stop::new(r.dropoff, StopKind::Dropoff(glue))],
            glue,
        });
    }
    // The glue request goes first so that it is the anchor even when
    // another member shares its location.
    let mut ordered = vec![glue];
    ordered.extend(members.iter().copied().filter(|&r| r != glue));
    let pickups: Vec<usize> = ordered.iter().map(|&r| requests[r].pickup).collect();
    let dropoffs: Vec<usize> = ordered.iter().map(|&r| requests[r].dropoff).collect();

    let mut stops = Vec::with_capacity(2 * members.len());
    for pos in tsp_path_ending_at(&pickups, pickups[0], metric)? {
        stops.push(Stop::new(pickups[pos], StopKind::Pickup(ordered[pos])));
    }
    let mut drop_path = tsp_path_ending_at(&dropoffs, dropoffs[0], metric)?;
    drop_path.reverse();
    for pos in drop_path {
        stops.push(Stop::new(dropoffs[pos], StopKind::Dropoff(ordered[pos])));
    }
    Ok(GroupWalk { group: group.clone(), stops, glue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_walk, Instance, Point, Walk};
    use crate::spanning::{mst_cost, mst_st};
    use rand_core::{RngCore, SeedableRng};
    use rand_xoshiro::Xoshiro256StarStar;

    fn unif(rng: &mut Xoshiro256StarStar) -> f64 {
        (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 100.0
    }

    #[test]
    fn small_paths() {
        let m = Metric::euclidean(vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0), Point::new(6.0, 8.0)]).unwrap();
        assert_eq!(tsp_path_ending_at(&[1], 1, &m).unwrap(), vec![0]);
        assert_eq!(tsp_path_ending_at(&[0, 1], 0, &m).unwrap(), vec![1, 0]);
        assert_eq!(tsp_path_ending_at(&[0, 1, 2], 1, &m).unwrap().last(), Some(&1));
        assert_eq!(tsp_path_ending_at(&[0, 1, 2], 0, &m).unwrap(), vec![2, 1, 0]);
        assert!(tsp_path_ending_at(&[0, 1], 2, &m).is_err());
    }

    #[test]
    fn path_is_hamiltonian_and_within_twice_mst() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(42);
        for trial in 0..200 {
            let k = 1 + trial % 9;
            let pts: Vec<Point> = (0..k).map(|_| Point::new(unif(&mut rng), unif(&mut rng))).collect();
            let m = Metric::euclidean(pts).unwrap();
            let ids: Vec<usize> = (0..k).collect();
            let anchor = (rng.next_u64() % k as u64) as usize;
            let path = tsp_path_ending_at(&ids, anchor, &m).unwrap();
            let mut seen = path.clone();
            seen.sort();
            assert_eq!(seen, ids);
            assert_eq!(*path.last().unwrap(), anchor);
            let cost: f64 = path.windows(2).map(|w| m.dist(w[0], w[1])).sum();
            assert!(cost <= 2.0 * mst_cost(&ids, &m).unwrap() + 1e-9);
        }
    }

    #[test]
    fn singleton_walk() {
        let i = Instance::euclidean(&[Point::new(0.0, 0.0)], &[(Point::new(1.0, 0.0), Point::new(4.0, 4.0))], 1).unwrap();
        let w = group_walk(&Group::singleton(0), i.requests(), i.metric()).unwrap();
        assert_eq!(w.stops, vec![Stop::new(1, StopKind::Pickup(0)), Stop::new(2, StopKind::Dropoff(0))]);
        assert_eq!(w.cost(i.metric()), 5.0);
    }

    #[test]
    fn walks_are_feasible_and_bounded() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(9);
        for trial in 0..100 {
            let n = 1 + trial % 8;
            let pairs: Vec<(Point, Point)> = (0..n)
                .map(|_| {
                    (Point::new(unif(&mut rng), unif(&mut rng)), Point::new(unif(&mut rng), unif(&mut rng)))
                })
                .collect();
            let i = Instance::euclidean(&[Point::new(0.0, 0.0)], &pairs, n).unwrap();
            let g = Group::new((0..n).collect()).unwrap();
            let w = group_walk(&g, i.requests(), i.metric()).unwrap();
            let glue = i.request(w.glue);
            let pickups = w.pickup_stops().count();
            assert_eq!(pickups, n);
            assert_eq!(w.stops[n - 1].loc, glue.pickup);
            assert_eq!(w.stops[n].loc, glue.dropoff);
            let mut walk = Walk::start(0, i.depot(0));
            walk.stops.extend(w.stops.iter().copied());
            assert!(validate_walk(&walk, n).is_ok());
            let bound = 2.0 * mst_st(&g, i.requests(), i.metric()) + i.ride(w.glue);
            assert!(w.cost(i.metric()) <= bound + 1e-9);
        }
    }

    #[test]
    fn glue_ties_to_smallest_request() {
        let pairs = [(Point::new(0.0, 0.0), Point::new(1.0, 0.0)), (Point::new(5.0, 0.0), Point::new(6.0, 0.0))];
        let i = Instance::euclidean(&[Point::new(0.0, 0.0)], &pairs, 2).unwrap();
        assert_eq!(glue_request(&Group::new(vec![0, 1]).unwrap(), i.requests(), i.metric()), 0);
    }
}
