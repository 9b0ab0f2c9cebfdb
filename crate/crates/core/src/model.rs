//! Instances, vehicle walks, feasibility and the two objective metrics.
//!
//! Locations are dense indices into a [`Metric`]. A request is a pair of
//! location ids; a vehicle walk is a sequence of [`Stop`]s that starts at
//! the vehicle's depot.

use std::collections::BTreeMap;
use std::fmt;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for every distance comparison in the crate.
pub const TOL: f64 = 1e-9;

/// Location identifier: an index into the instance's metric.
pub type LocId = usize;

/// A planar point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Distance backend.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Euclidean(Vec<Point>),
    /// Dense symmetric matrix stored row-major.
    Matrix { size: usize, data: Vec<f64> },
}

impl Metric {
    pub fn euclidean(points: Vec<Point>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidInstance(format!("non-finite coordinate {p:?}")));
        }
        Ok(Metric::Euclidean(points))
    }

    /// Builds an explicit metric. Rejects non-square, asymmetric, negative,
    /// non-finite or non-zero-diagonal input.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::InvalidInstance(format!(
                    "matrix row {i} has {} entries, expected {size}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        for i in 0..size {
            if data[i * size + i] != 0.0 {
                return Err(Error::InvalidInstance(format!("d({i},{i}) must be 0")));
            }
            for j in 0..size {
                let v = data[i * size + j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInstance(format!("d({i},{j}) = {v} is not a distance")));
                }
                if v != data[j * size + i] {
                    return Err(Error::InvalidInstance(format!("matrix is asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Metric::Matrix { size, data })
    }

    pub fn len(&self) -> usize {
        match self {
            Metric::Euclidean(p) => p.len(),
            Metric::Matrix { size, .. } => *size,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self) -> Option<&[Point]> {
        match self {
            Metric::Euclidean(p) => Some(p),
            Metric::Matrix { .. } => None,
        }
    }

    /// Distance between two known-valid ids. Panics on out-of-range ids;
    /// use [`Metric::try_dist`] on untrusted input.
    #[inline]
    pub fn dist(&self, a: LocId, b: LocId) -> f64 {
        match self {
            Metric::Euclidean(p) => p[a].dist(&p[b]),
            Metric::Matrix { size, data } => data[a * size + b],
        }
    }

    pub fn try_dist(&self, a: LocId, b: LocId) -> Result<f64> {
        let size = self.len();
        for id in [a, b] {
            if id >= size {
                return Err(Error::UnknownLocation { id, size });
            }
        }
        Ok(self.dist(a, b))
    }

    /// Checks the triangle inequality, exhaustively for up to 200 locations
    /// and on `samples` seeded random triples otherwise.
    pub fn check_triangle(&self, samples: usize, seed: u64) -> Result<()> {
        let n = self.len();
        let check = |a: usize, b: usize, c: usize| -> Result<()> {
            let direct = self.dist(a, c);
            let detour = self.dist(a, b) + self.dist(b, c);
            if direct > detour + TOL * (1.0 + direct.abs()) {
                return Err(Error::InvalidInstance(format!(
                    "triangle inequality fails: d({a},{c}) = {direct} > d({a},{b}) + d({b},{c}) = {detour}"
                )));
            }
            Ok(())
        };
        if n <= 200 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
            for _ in 0..samples {
                let a = (rng.next_u64() % n as u64) as usize;
                let b = (rng.next_u64() % n as u64) as usize;
                let c = (rng.next_u64() % n as u64) as usize;
                check(a, b, c)?;
            }
        }
        Ok(())
    }
}

/// A ride request from `pickup` to `dropoff`. The two may coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub pickup: LocId,
    pub dropoff: LocId,
}

impl Request {
    pub fn new(pickup: LocId, dropoff: LocId) -> Self {
        Request { pickup, dropoff }
    }
}

/// Depots (one per vehicle, repeats allowed) and the uniform capacity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fleet {
    pub depots: Vec<LocId>,
    pub capacity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    metric: Metric,
    requests: Vec<Request>,
    fleet: Fleet,
}

impl Instance {
    pub fn new(metric: Metric, requests: Vec<Request>, fleet: Fleet) -> Result<Self> {
        if requests.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one request".into()));
        }
        if fleet.depots.is_empty() {
            return Err(Error::InvalidInstance("an instance needs at least one vehicle".into()));
        }
        if fleet.capacity == 0 {
            return Err(Error::InvalidInstance("capacity must be at least 1".into()));
        }
        let size = metric.len();
        let ids = requests
            .iter()
            .flat_map(|r| [r.pickup, r.dropoff])
            .chain(fleet.depots.iter().copied());
        for id in ids {
            if id >= size {
                return Err(Error::UnknownLocation { id, size });
            }
        }
        Ok(Instance { metric, requests, fleet })
    }

    /// Euclidean instance: depots take ids `0..m`, request `i` takes pickup
    /// id `m + 2i` and dropoff id `m + 2i + 1`.
    pub fn euclidean(depots: &[Point], requests: &[(Point, Point)], capacity: usize) -> Result<Self> {
        let m = depots.len();
        let mut points = depots.to_vec();
        let mut reqs = Vec::with_capacity(requests.len());
        for (i, (s, t)) in requests.iter().enumerate() {
            points.push(*s);
            points.push(*t);
            reqs.push(Request::new(m + 2 * i, m + 2 * i + 1));
        }
        let fleet = Fleet { depots: (0..m).collect(), capacity };
        Instance::new(Metric::euclidean(points)?, reqs, fleet)
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn fleet(&self) -> &Fleet {
        &self.fleet
    }

    pub fn n(&self) -> usize {
        self.requests.len()
    }

    pub fn m(&self) -> usize {
        self.fleet.depots.len()
    }

    pub fn capacity(&self) -> usize {
        self.fleet.capacity
    }

    pub fn depot(&self, k: usize) -> LocId {
        self.fleet.depots[k]
    }

    pub fn request(&self, i: usize) -> Request {
        self.requests[i]
    }

    #[inline]
    pub fn d(&self, a: LocId, b: LocId) -> f64 {
        self.metric.dist(a, b)
    }

    /// Length of the direct ride of request `i`.
    pub fn ride(&self, i: usize) -> f64 {
        let r = self.requests[i];
        self.metric.dist(r.pickup, r.dropoff)
    }

    /// Same instance with a different capacity.
    pub fn with_capacity(&self, capacity: usize) -> Result<Self> {
        let fleet = Fleet { depots: self.fleet.depots.clone(), capacity };
        Instance::new(self.metric.clone(), self.requests.clone(), fleet)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "request", rename_all = "snake_case")]
pub enum StopKind {
    DepotStart,
    Pickup(usize),
    Dropoff(usize),
    Transit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stop {
    pub loc: LocId,
    #[serde(flatten)]
    pub kind: StopKind,
}

impl Stop {
    pub fn new(loc: LocId, kind: StopKind) -> Self {
        Stop { loc, kind }
    }

    pub fn is_service(&self) -> bool {
        matches!(self.kind, StopKind::Pickup(_) | StopKind::Dropoff(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Walk {
    pub vehicle: usize,
    pub stops: Vec<Stop>,
}

impl Walk {
    /// A walk holding only the depot start.
    pub fn start(vehicle: usize, depot: LocId) -> Self {
        Walk { vehicle, stops: vec![Stop::new(depot, StopKind::DepotStart)] }
    }

    /// Requests picked up on this walk, in pickup order.
    pub fn requests(&self) -> Vec<usize> {
        self.stops
            .iter()
            .filter_map(|s| match s.kind {
                StopKind::Pickup(i) => Some(i),
                _ => None,
            })
            .collect()
    }

    pub fn locations(&self) -> impl Iterator<Item = LocId> + '_ {
        self.stops.iter().map(|s| s.loc)
    }
}

/// Sum of metric distances between consecutive stops.
pub fn walk_cost(walk: &Walk, metric: &Metric) -> Result<f64> {
    if walk.stops.is_empty() {
        return Err(Error::Domain("a walk has at least one stop".into()));
    }
    walk.stops
        .windows(2)
        .try_fold(0.0, |acc, w| Ok(acc + metric.try_dist(w[0].loc, w[1].loc)?))
}

/// Cost of a bare location sequence.
pub fn path_cost(locs: &[LocId], metric: &Metric) -> f64 {
    locs.windows(2).map(|w| metric.dist(w[0], w[1])).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    Precedence { request: usize, position: usize },
    Capacity { position: usize, onboard: usize },
    MissingPickup { request: usize },
    MissingDropoff { request: usize },
    DuplicatePickup { request: usize, position: usize },
    DuplicateDropoff { request: usize, position: usize },
    BadStart { vehicle: usize },
    LocationMismatch { position: usize, expected: LocId, found: LocId },
    UnknownVehicle { vehicle: usize },
    UnknownRequest { request: usize },
    DuplicateVehicle { vehicle: usize },
    Unserved { request: usize },
    ServedTwice { request: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Precedence { request, position } => {
                write!(f, "dropoff of request {request} at stop {position} precedes its pickup")
            }
            Violation::Capacity { position, onboard } => {
                write!(f, "{onboard} riders on board after stop {position}")
            }
            Violation::MissingPickup { request } => write!(f, "request {request} is never picked up"),
            Violation::MissingDropoff { request } => write!(f, "request {request} is never dropped off"),
            Violation::DuplicatePickup { request, position } => {
                write!(f, "request {request} picked up again at stop {position}")
            }
            Violation::DuplicateDropoff { request, position } => {
                write!(f, "request {request} dropped off again at stop {position}")
            }
            Violation::BadStart { vehicle } => write!(f, "walk of vehicle {vehicle} does not start at its depot"),
            Violation::LocationMismatch { position, expected, found } => {
                write!(f, "stop {position} is at location {found}, expected {expected}")
            }
            Violation::UnknownVehicle { vehicle } => write!(f, "vehicle {vehicle} does not exist"),
            Violation::UnknownRequest { request } => write!(f, "request {request} does not exist"),
            Violation::DuplicateVehicle { vehicle } => write!(f, "vehicle {vehicle} has more than one walk"),
            Violation::Unserved { request } => write!(f, "request {request} is not served"),
            Violation::ServedTwice { request } => write!(f, "request {request} appears in more than one walk"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks precedence, capacity and event multiplicity along one walk.
///
/// Capacity is checked after every stop; a request whose pickup and
/// dropoff are adjacent still occupies a seat between them.
pub fn validate_walk(walk: &Walk, capacity: usize) -> FeasibilityReport {
    let mut violations = Vec::new();
    let mut picked: BTreeMap<usize, usize> = BTreeMap::new();
    let mut dropped: BTreeMap<usize, usize> = BTreeMap::new();
    let mut onboard = 0usize;
    for (pos, stop) in walk.stops.iter().enumerate() {
        match stop.kind {
            StopKind::Pickup(i) => {
                if picked.insert(i, pos).is_some() {
                    violations.push(Violation::DuplicatePickup { request: i, position: pos });
                } else if dropped.contains_key(&i) {
                    // already counted as a precedence violation at its dropoff
                } else {
                    onboard += 1;
                    if onboard > capacity {
                        violations.push(Violation::Capacity { position: pos, onboard });
                    }
                }
            }
            StopKind::Dropoff(i) => {
                if dropped.insert(i, pos).is_some() {
                    violations.push(Violation::DuplicateDropoff { request: i, position: pos });
                } else if !picked.contains_key(&i) {
                    violations.push(Violation::Precedence { request: i, position: pos });
                } else {
                    onboard -= 1;
                }
            }
            StopKind::DepotStart | StopKind::Transit => {}
        }
    }
    for &i in picked.keys() {
        if !dropped.contains_key(&i) {
            violations.push(Violation::MissingDropoff { request: i });
        }
    }
    for &i in dropped.keys() {
        if !picked.contains_key(&i) {
            violations.push(Violation::MissingPickup { request: i });
        }
    }
    FeasibilityReport { violations }
}

/// One walk per used vehicle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub walks: Vec<Walk>,
    /// Request index to serving vehicle, from the first pickup seen.
    pub request_owner: BTreeMap<usize, usize>,
}

impl Assignment {
    pub fn from_walks(walks: Vec<Walk>) -> Self {
        let mut request_owner = BTreeMap::new();
        for w in &walks {
            for i in w.requests() {
                request_owner.entry(i).or_insert(w.vehicle);
            }
        }
        Assignment { walks, request_owner }
    }

    /// Full check against an instance: per-walk feasibility, depot starts,
    /// stop locations, and that every request is served exactly once.
    pub fn validate(&self, instance: &Instance) -> FeasibilityReport {
        let mut violations = Vec::new();
        let mut served_by: Vec<Vec<usize>> = vec![Vec::new(); instance.n()];
        let mut seen_vehicle = vec![false; instance.m()];
        for walk in &self.walks {
            if walk.vehicle >= instance.m() {
                violations.push(Violation::UnknownVehicle { vehicle: walk.vehicle });
                continue;
            }
            if std::mem::replace(&mut seen_vehicle[walk.vehicle], true) {
                violations.push(Violation::DuplicateVehicle { vehicle: walk.vehicle });
            }
            let depot = instance.depot(walk.vehicle);
            match walk.stops.first() {
                Some(s) if s.kind == StopKind::DepotStart && s.loc == depot => {}
                _ => violations.push(Violation::BadStart { vehicle: walk.vehicle }),
            }
            for (pos, stop) in walk.stops.iter().enumerate() {
                let expected = match stop.kind {
                    StopKind::Pickup(i) | StopKind::Dropoff(i) if i >= instance.n() => {
                        violations.push(Violation::UnknownRequest { request: i });
                        continue;
                    }
                    StopKind::Pickup(i) => instance.request(i).pickup,
                    StopKind::Dropoff(i) => instance.request(i).dropoff,
                    StopKind::DepotStart if pos > 0 => {
                        violations.push(Violation::BadStart { vehicle: walk.vehicle });
                        continue;
                    }
                    StopKind::DepotStart => depot,
                    StopKind::Transit => {
                        if stop.loc >= instance.metric().len() {
                            violations.push(Violation::LocationMismatch {
                                position: pos,
                                expected: stop.loc,
                                found: stop.loc,
                            });
                        }
                        continue;
                    }
                };
                if stop.loc != expected {
                    violations.push(Violation::LocationMismatch { position: pos, expected, found: stop.loc });
                }
            }
            violations.extend(validate_walk(walk, instance.capacity()).violations);
            for i in walk.requests() {
                if i < instance.n() {
                    served_by[i].push(walk.vehicle);
                }
            }
        }
        for (i, owners) in served_by.iter().enumerate() {
            match owners.len() {
                0 => violations.push(Violation::Unserved { request: i }),
                1 => {}
                _ => violations.push(Violation::ServedTwice { request: i }),
            }
        }
        FeasibilityReport { violations }
    }

    fn ensure_valid(&self, instance: &Instance) -> Result<()> {
        let report = self.validate(instance);
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::Infeasible(report))
        }
    }
}

/// Total travel distance of a feasible assignment.
pub fn assignment_cost(a: &Assignment, instance: &Instance) -> Result<f64> {
    a.ensure_valid(instance)?;
    a.walks.iter().try_fold(0.0, |acc, w| Ok(acc + walk_cost(w, instance.metric())?))
}

/// Per-request on-board distance, indexed by request.
pub fn rider_latencies(a: &Assignment, instance: &Instance) -> Result<Vec<f64>> {
    a.ensure_valid(instance)?;
    let mut out = vec![0.0; instance.n()];
    for walk in &a.walks {
        // distance travelled from the start of the walk to each stop
        let mut odometer = Vec::with_capacity(walk.stops.len());
        let mut acc = 0.0;
        for (k, stop) in walk.stops.iter().enumerate() {
            if k > 0 {
                acc += instance.d(walk.stops[k - 1].loc, stop.loc);
            }
            odometer.push(acc);
        }
        let mut pickup_at = BTreeMap::new();
        for (k, stop) in walk.stops.iter().enumerate() {
            match stop.kind {
                StopKind::Pickup(i) => {
                    pickup_at.insert(i, odometer[k]);
                }
                StopKind::Dropoff(i) => out[i] = odometer[k] - pickup_at[&i],
                _ => {}
            }
        }
    }
    Ok(out)
}

/// Sum over riders of the distance travelled while on board.
pub fn in_transit_latency(a: &Assignment, instance: &Instance) -> Result<f64> {
    Ok(rider_latencies(a, instance)?.iter().sum())
}

/// Number of feasible orders of the pickup/dropoff events of `requests`
/// requests under capacity `capacity`. Enumerative; at most 4 requests.
pub fn count_feasible_orders(requests: usize, capacity: usize) -> Result<u64> {
    if requests > 4 {
        return Err(Error::TooLarge(format!("count_feasible_orders enumerates at most 4 requests, got {requests}")));
    }
    fn rec(picked: u32, dropped: u32, onboard: usize, n: usize, cap: usize) -> u64 {
        if dropped.count_ones() as usize == n {
            return 1;
        }
        let mut total = 0;
        for i in 0..n {
            let bit = 1 << i;
            if picked & bit == 0 && onboard < cap {
                total += rec(picked | bit, dropped, onboard + 1, n, cap);
            } else if picked & bit != 0 && dropped & bit == 0 {
                total += rec(picked, dropped | bit, onboard - 1, n, cap);
            }
        }
        total
    }
    Ok(rec(0, 0, 0, requests, capacity))
}
