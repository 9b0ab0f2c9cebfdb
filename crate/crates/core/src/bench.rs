//! Benchmark grid, per-cell runner and CSV output.

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::{gen_sy_g, gen_sy_u, SyGmmParams, SyUniformParams};
use crate::error::{Error, Result};
use crate::model::{assignment_cost, in_transit_latency, Assignment, Instance};
use crate::oracles::{exact_darp, insertion_baseline, OracleBudget};
use crate::routing::{hgr_solve, Variant, DEFAULT_DELTA};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Dataset {
    SyU,
    SyG { clusters: usize, sigma: f64 },
}

impl Dataset {
    /// Label used in CSV rows, e.g. `sy-u` or `sy-g:z=10:sigma=50`.
    pub fn label(&self) -> String {
        match self {
            Dataset::SyU => "sy-u".into(),
            Dataset::SyG { clusters, sigma } => format!("sy-g:z={clusters}:sigma={sigma}"),
        }
    }

    pub fn generate(&self, n: usize, m: usize, capacity: usize, seed: u64) -> Result<Instance> {
        match *self {
            Dataset::SyU => gen_sy_u(&SyUniformParams::new(n, m, capacity, seed)),
            Dataset::SyG { clusters, sigma } => gen_sy_g(&SyGmmParams::new(n, m, capacity, clusters, sigma, seed)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Solver {
    Hgr(Variant),
    Insertion,
    Exact,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Hgr(v) => v.name(),
            Solver::Insertion => "insertion",
            Solver::Exact => "exact",
        }
    }

    /// Parses `hgr`, `hgr-w1`, `hgr-approx`, `insertion` or `exact`.
    pub fn parse(name: &str, delta: f64) -> Result<Self> {
        Ok(match name {
            "hgr" => Solver::Hgr(Variant::Hgr),
            "hgr-w1" => Solver::Hgr(Variant::HgrW1),
            "hgr-approx" => Solver::Hgr(Variant::HgrApprox { delta }),
            "insertion" => Solver::Insertion,
            "exact" => Solver::Exact,
            other => return Err(Error::Parameter(format!("unknown variant `{other}`"))),
        })
    }

    pub fn solve(&self, instance: &Instance) -> Result<Assignment> {
        match *self {
            Solver::Hgr(v) => hgr_solve(instance, v),
            Solver::Insertion => insertion_baseline(instance, &(0..instance.n()).collect::<Vec<_>>()),
            Solver::Exact => Ok(exact_darp(instance, &OracleBudget::default())?.assignment),
        }
    }
}

/// The four heuristic solvers compared in benchmarks.
pub fn default_solvers() -> Vec<Solver> {
    vec![
        Solver::Hgr(Variant::Hgr),
        Solver::Hgr(Variant::HgrW1),
        Solver::Hgr(Variant::HgrApprox { delta: DEFAULT_DELTA }),
        Solver::Insertion,
    ]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchCell {
    pub dataset: Dataset,
    pub solver: Solver,
    pub n: usize,
    pub m: usize,
    pub capacity: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub dataset: String,
    pub variant: String,
    pub n: usize,
    pub m: usize,
    pub lambda: usize,
    pub seed: u64,
    pub total_distance: f64,
    pub in_transit_latency: f64,
    pub wall_time_ms: f64,
}

/// Generates the cell's instance and solves it. With `timing` off the wall
/// time is reported as 0 so that repeated runs give identical rows.
pub fn run_cell(cell: &BenchCell, timing: bool) -> Result<BenchRow> {
    let instance = cell.dataset.generate(cell.n, cell.m, cell.capacity, cell.seed)?;
    let start = Instant::now();
    let assignment = cell.solver.solve(&instance)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(BenchRow {
        dataset: cell.dataset.label(),
        variant: cell.solver.name().into(),
        n: cell.n,
        m: cell.m,
        lambda: cell.capacity,
        seed: cell.seed,
        total_distance: assignment_cost(&assignment, &instance)?,
        in_transit_latency: in_transit_latency(&assignment, &instance)?,
        wall_time_ms: if timing { elapsed } else { 0.0 },
    })
}

/// Runs every cell on `jobs` worker threads; rows come back in cell order.
pub fn run_grid(cells: &[BenchCell], jobs: usize, timing: bool) -> Result<Vec<BenchRow>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<BenchRow>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() {
                    break;
                }
                let row = run_cell(&cells[i], timing);
                results.lock().expect("bench results poisoned")[i] = Some(row);
            });
        }
    });
    results
        .into_inner()
        .expect("bench results poisoned")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect()
}

pub fn write_rows<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

const SYU_N: [usize; 5] = [2000, 4000, 6000, 8000, 10000];
const SYU_M: [usize; 5] = [30, 60, 90, 120, 150];
const SYU_LAMBDA: [usize; 6] = [2, 4, 8, 16, 32, 64];
const SYG_N: [usize; 3] = [2000, 4000, 6000];
const SYG_M: [usize; 3] = [30, 60, 90];
const SYG_LAMBDA: [usize; 3] = [4, 8, 16];
const SYG_Z: [usize; 5] = [5, 10, 20, 50, 100];
const SYG_SIGMA: [f64; 6] = [5.0, 10.0, 25.0, 50.0, 100.0, 250.0];

/// Instance configuration of one grid point, before solver and seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub dataset: Dataset,
    pub n: usize,
    pub m: usize,
    pub capacity: usize,
}

/// One-at-a-time sensitivity sweep around the default configuration of
/// each dataset, request counts multiplied by `scale` (at least 1).
pub fn sensitivity_grid(scale: f64) -> Vec<GridPoint> {
    let sn = |n: usize| ((n as f64 * scale).round() as usize).max(1);
    let mut pts: Vec<GridPoint> = Vec::new();
    let mut push = |p: GridPoint| {
        if !pts.contains(&p) {
            pts.push(p);
        }
    };
    let u = |n, m, capacity| GridPoint { dataset: Dataset::SyU, n: sn(n), m, capacity };
    for n in SYU_N {
        push(u(n, 90, 32));
    }
    for m in SYU_M {
        push(u(8000, m, 32));
    }
    for l in SYU_LAMBDA {
        push(u(8000, 90, l));
    }
    let g = |n, m, capacity, clusters, sigma| GridPoint {
        dataset: Dataset::SyG { clusters, sigma },
        n: sn(n),
        m,
        capacity,
    };
    for n in SYG_N {
        push(g(n, 90, 16, 10, 50.0));
    }
    for m in SYG_M {
        push(g(6000, m, 16, 10, 50.0));
    }
    for l in SYG_LAMBDA {
        push(g(6000, 90, l, 10, 50.0));
    }
    for z in SYG_Z {
        push(g(6000, 90, 16, z, 50.0));
    }
    for s in SYG_SIGMA {
        push(g(6000, 90, 16, 10, s));
    }
    pts
}

/// Cross product of grid points, solvers and seeds, in that nesting order.
pub fn expand_grid(points: &[GridPoint], solvers: &[Solver], seeds: &[u64]) -> Vec<BenchCell> {
    let mut cells = Vec::with_capacity(points.len() * solvers.len() * seeds.len());
    for p in points {
        for &seed in seeds {
            for &solver in solvers {
                cells.push(BenchCell { dataset: p.dataset, solver, n: p.n, m: p.m, capacity: p.capacity, seed });
            }
        }
    }
    cells
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub lambda: usize,
    pub variant: String,
    pub cost: f64,
    pub optimum: f64,
    pub ratio: f64,
}

/// Tiny SY-U instances solved by every heuristic and by exact search.
/// Sizes cycle through `n` in 1..=5, `m` in 1..=2, capacity in {2, 3}.
pub fn oracle_compare(count: usize, first_seed: u64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for k in 0..count {
        let seed = first_seed + k as u64;
        let (n, m, capacity) = (1 + k % 5, 1 + (k / 5) % 2, 2 + (k / 10) % 2);
        let instance = Dataset::SyU.generate(n, m, capacity, seed)?;
        let optimum = exact_darp(&instance, &OracleBudget::default())?.cost;
        for solver in default_solvers() {
            let cost = assignment_cost(&solver.solve(&instance)?, &instance)?;
            let ratio = if optimum > 0.0 { cost / optimum } else { 1.0 };
            rows.push(OracleRow { seed, n, m, lambda: capacity, variant: solver.name().into(), cost, optimum, ratio });
        }
    }
    Ok(rows)
}

pub fn write_oracle_rows<W: Write>(rows: &[OracleRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
