//! Synthetic instance generators.
//!
//! Randomness comes from xoshiro256** seeded by `seed_from_u64` (SplitMix64
//! expansion of the 64-bit seed). A uniform draw is `(next_u64 >> 11) * 2^-53`
//! scaled to the grid. A normal draw takes two uniforms `u1, u2`, replaces
//! `u1` by `1 - u1` so it is never zero, and returns
//! `sqrt(-2 ln u1) * cos(2 pi u2)` (the sine half is discarded).

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Point};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyUniformParams {
    pub n: usize,
    pub m: usize,
    pub capacity: usize,
    pub grid: f64,
    pub seed: u64,
}

impl SyUniformParams {
    pub fn new(n: usize, m: usize, capacity: usize, seed: u64) -> Self {
        SyUniformParams { n, m, capacity, grid: 100.0, seed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyGmmParams {
    pub n: usize,
    pub m: usize,
    pub capacity: usize,
    pub clusters: usize,
    pub sigma: f64,
    pub grid: f64,
    pub seed: u64,
}

impl SyGmmParams {
    pub fn new(n: usize, m: usize, capacity: usize, clusters: usize, sigma: f64, seed: u64) -> Self {
        SyGmmParams { n, m, capacity, clusters, sigma, grid: 1000.0, seed }
    }
}

fn check_sizes(n: usize, m: usize, capacity: usize, grid: f64) -> Result<()> {
    if n == 0 || m == 0 || capacity == 0 {
        return Err(Error::Parameter(format!("n, m and capacity must be positive (got {n}, {m}, {capacity})")));
    }
    if grid <= 0.0 || !grid.is_finite() {
        return Err(Error::Parameter(format!("grid side must be positive, got {grid}")));
    }
    Ok(())
}

pub(crate) fn uniform(rng: &mut Xoshiro256StarStar) -> f64 {
    rng.gen::<f64>()
}

pub(crate) fn normal(rng: &mut Xoshiro256StarStar) -> f64 {
    let u1 = 1.0 - uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Every location i.i.d. uniform on `[0, grid]^2`: depots first, then
/// each request's pickup and dropoff.
pub fn gen_sy_u(p: &SyUniformParams) -> Result<Instance> {
    check_sizes(p.n, p.m, p.capacity, p.grid)?;
    let mut rng = Xoshiro256StarStar::seed_from_u64(p.seed);
    let mut point = || {
        let x = uniform(&mut rng) * p.grid;
        let y = uniform(&mut rng) * p.grid;
        Point::new(x, y)
    };
    let depots: Vec<Point> = (0..p.m).map(|_| point()).collect();
    let requests: Vec<(Point, Point)> = (0..p.n).map(|_| (point(), point())).collect();
    Instance::euclidean(&depots, &requests, p.capacity)
}

/// Gaussian mixture: `clusters` centers uniform on `[0, grid]^2`, then every
/// location (same order as [`gen_sy_u`]) picks a center uniformly and adds
/// isotropic normal noise with standard deviation `sigma`.
pub fn gen_sy_g(p: &SyGmmParams) -> Result<Instance> {
    check_sizes(p.n, p.m, p.capacity, p.grid)?;
    if p.clusters == 0 {
        return Err(Error::Parameter("cluster count must be at least 1".into()));
    }
    if p.sigma <= 0.0 || !p.sigma.is_finite() {
        return Err(Error::Parameter(format!("sigma must be positive, got {}", p.sigma)));
    }
    let mut rng = Xoshiro256StarStar::seed_from_u64(p.seed);
    let centers: Vec<Point> = (0..p.clusters)
        .map(|_| {
            let x = uniform(&mut rng) * p.grid;
            let y = uniform(&mut rng) * p.grid;
            Point::new(x, y)
        })
        .collect();
    let mut point = || {
        let c = centers[((uniform(&mut rng) * p.clusters as f64) as usize).min(p.clusters - 1)];
        let x = c.x + p.sigma * normal(&mut rng);
        let y = c.y + p.sigma * normal(&mut rng);
        Point::new(x, y)
    };
    let depots: Vec<Point> = (0..p.m).map(|_| point()).collect();
    let requests: Vec<(Point, Point)> = (0..p.n).map(|_| (point(), point())).collect();
    Instance::euclidean(&depots, &requests, p.capacity)
}
