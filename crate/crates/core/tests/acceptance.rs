//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::time::Instant;

use common::*;
use hgr_core::bench::{run_cell, write_rows, BenchCell, BenchRow, Dataset, Solver};
use hgr_core::group_walk::group_walk;
use hgr_core::grouping::{check_telescope_inequality, hierarchical_grouping, telescope_sides, GroupingConfig};
use hgr_core::matching::{exact_min_perfect_matching, WeightedCompleteGraph};
use hgr_core::model::{assignment_cost, validate_walk, Instance, StopKind};
use hgr_core::oracles::{exact_darp, OracleBudget};
use hgr_core::routing::{hgr_solve_with, mrsf, RouteStyle, Variant, DEFAULT_DELTA};
use hgr_core::spanning::Group;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, k: usize, ok: bool, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} criterion {k}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

const VARIANTS: [Solver; 4] = [
    Solver::Hgr(Variant::Hgr),
    Solver::Hgr(Variant::HgrW1),
    Solver::Hgr(Variant::HgrApprox { delta: DEFAULT_DELTA }),
    Solver::Insertion,
];

/// Checks walks one by one and counts how often every request is served,
/// without going through `Assignment::validate`.
fn violations(inst: &Instance, a: &hgr_core::model::Assignment) -> usize {
    let mut bad = 0;
    let mut picks = vec![0usize; inst.n()];
    let mut drops = vec![0usize; inst.n()];
    let mut vehicles = vec![0usize; inst.m()];
    for w in &a.walks {
        bad += validate_walk(w, inst.capacity()).violations.len();
        if w.vehicle >= inst.m() || w.stops.first().map(|s| s.loc) != Some(inst.depot(w.vehicle)) {
            bad += 1;
            continue;
        }
        vehicles[w.vehicle] += 1;
        for s in &w.stops {
            match s.kind {
                StopKind::Pickup(r) if r < inst.n() && s.loc == inst.request(r).pickup => picks[r] += 1,
                StopKind::Dropoff(r) if r < inst.n() && s.loc == inst.request(r).dropoff => drops[r] += 1,
                StopKind::Pickup(_) | StopKind::Dropoff(_) => bad += 1,
                _ => {}
            }
        }
    }
    bad += picks.iter().chain(&drops).filter(|&&c| c != 1).count();
    bad + vehicles.iter().filter(|&&c| c > 1).count()
}

fn c1(rep: &mut Report) {
    let mut rng = StdRng::seed_from_u64(101);
    let mut bad = 0;
    let mut runs = 0;
    for i in 0..1000u64 {
        let n = rng.gen_range(1..=64);
        let m = rng.gen_range(1..=8);
        let cap = [1, 2, 4, 8][rng.gen_range(0..4)];
        let ds = if i % 2 == 0 { Dataset::SyU } else { Dataset::SyG { clusters: rng.gen_range(1..=10), sigma: 50.0 } };
        let inst = ds.generate(n, m, cap, i).unwrap();
        for s in VARIANTS {
            runs += 1;
            match s.solve(&inst) {
                Ok(a) => bad += violations(&inst, &a),
                Err(e) => {
                    eprintln!("instance {i} {}: {e}", s.name());
                    bad += 1;
                }
            }
        }
    }
    rep.line(1, bad == 0, format!("{runs} solver runs on 1000 instances, {bad} violations"));
}

fn c2(rep: &mut Report) {
    let mut rng = StdRng::seed_from_u64(102);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let n = 2 * (1 + i % 5);
        let mut rows = vec![vec![0.0; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                rows[a][b] = rng.gen::<f64>() * 100.0;
                rows[b][a] = rows[a][b];
            }
        }
        let g = WeightedCompleteGraph::from_rows(&rows).unwrap();
        let got = exact_min_perfect_matching(&g).unwrap();
        let err = if got.is_perfect(n) { (got.total_weight - brute_matching(&rows)).abs() } else { f64::INFINITY };
        worst = worst.max(err);
    }
    rep.line(2, worst <= 1e-9, format!("200 graphs, max |blossom - enumeration| = {worst:.2e}"));
}

fn c3(rep: &mut Report) {
    let mut rng = StdRng::seed_from_u64(103);
    let (mut done, mut worst) = (0, 0.0f64);
    while done < 100 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=8);
        let inst = random_instance(&mut rng, n, m, 3, 100.0);
        let part = random_partition(&mut rng, n, 3);
        if m + part.len() > 7 {
            continue;
        }
        let got = mrsf(&inst, &part).unwrap().cost();
        worst = worst.max((got - brute_forest(&inst, &part)).abs());
        done += 1;
    }
    rep.line(3, worst <= 1e-9, format!("100 forests, max |mrsf - enumeration| = {worst:.2e}"));
}

fn c4(rep: &mut Report) {
    let mut rng = StdRng::seed_from_u64(104);
    let (mut ok, mut lhs_err) = (0, 0.0f64);
    for _ in 0..100 {
        let n = rng.gen_range(1..=64);
        let cap = rng.gen_range(1..=8);
        let inst = random_instance(&mut rng, n, 1, cap, 100.0);
        let res = hierarchical_grouping(inst.requests(), inst.metric(), &GroupingConfig::exact(cap)).unwrap();
        ok += check_telescope_inequality(&res, inst.requests(), inst.metric()) as usize;
        let lhs: f64 = res
            .partition
            .iter()
            .map(|g| {
                mst_pickups_dropoffs(g.requests(), inst.requests(), inst.metric())
                    + g.requests().iter().map(|&r| inst.ride(r)).fold(f64::INFINITY, f64::min)
            })
            .sum();
        let (l, _) = telescope_sides(&res, inst.requests(), inst.metric());
        lhs_err = lhs_err.max((lhs - l).abs() / lhs.max(1.0));
    }
    rep.line(4, ok == 100 && lhs_err <= 1e-9, format!("{ok}/100 runs satisfy the bound, max left-side drift {lhs_err:.2e}"));
}

fn c5(rep: &mut Report) {
    let mut rng = StdRng::seed_from_u64(105);
    let (mut ok, mut tight) = (0, 0.0f64);
    for _ in 0..500 {
        let n = rng.gen_range(1..=16);
        let inst = random_instance(&mut rng, n, 1, n, 100.0);
        let g = Group::new((0..n).collect()).unwrap();
        let w = group_walk(&g, inst.requests(), inst.metric()).unwrap();
        let min_ride = (0..n).map(|r| inst.ride(r)).fold(f64::INFINITY, f64::min);
        let bound = 2.0 * mst_pickups_dropoffs(g.requests(), inst.requests(), inst.metric()) + min_ride;
        let cost = w.cost(inst.metric());
        ok += (cost <= bound * (1.0 + 1e-9)) as usize;
        tight = tight.max(cost / bound);
    }
    rep.line(5, ok == 500, format!("{ok}/500 group walks within bound, max walk/bound = {tight:.3}"));
}

fn c6(rep: &mut Report) {
    let mut rng = StdRng::seed_from_u64(106);
    let (mut ok, mut max_ratio) = (0, 0.0f64);
    for _ in 0..100 {
        let (n, m, cap) = (rng.gen_range(1..=5), rng.gen_range(1..=2), rng.gen_range(1..=3));
        let inst = random_instance(&mut rng, n, m, cap, 100.0);
        let forest = hgr_solve_with(&inst, Variant::Hgr, RouteStyle::ServiceOnly).unwrap().forest.cost();
        let opt = brute_darp(&inst);
        ok += (forest <= opt * (1.0 + 1e-9) + 1e-9) as usize;
        max_ratio = max_ratio.max(forest / opt);
    }
    rep.line(6, ok == 100, format!("{ok}/100 forests cost at most the optimum, max forest/optimum = {max_ratio:.3}"));
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn c7(rep: &mut Report) {
    let mut rng = StdRng::seed_from_u64(107);
    let mut ratios = vec![Vec::new(); VARIANTS.len()];
    let mut oracle_gap = 0.0f64;
    for seed in 0..200u64 {
        let (n, m, cap) = (rng.gen_range(1..=5), rng.gen_range(1..=2), rng.gen_range(2..=3));
        let inst = Dataset::SyU.generate(n, m, cap, seed).unwrap();
        let opt = brute_darp(&inst);
        oracle_gap = oracle_gap.max((exact_darp(&inst, &OracleBudget::default()).unwrap().cost - opt).abs());
        for (i, s) in VARIANTS.iter().enumerate() {
            ratios[i].push(assignment_cost(&s.solve(&inst).unwrap(), &inst).unwrap() / opt);
        }
    }
    let mut ok = oracle_gap <= 1e-9;
    let mut parts = Vec::new();
    for (i, s) in VARIANTS.iter().enumerate() {
        let min = ratios[i].iter().copied().fold(f64::INFINITY, f64::min);
        let max = ratios[i].iter().copied().fold(0.0, f64::max);
        let med = median(&mut ratios[i]);
        ok &= min >= 1.0 - 1e-9;
        if i == 0 {
            ok &= med <= 3.0;
        }
        parts.push(format!("{} median {med:.3} max {max:.3}", s.name()));
    }
    rep.line(7, ok, format!("200 instances, ratio to optimum: {}", parts.join("; ")));
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn c8_to_11(rep: &mut Report) {
    let (n, m, cap) = (2000, 30, 8);
    let cell = |solver, seed| BenchCell { dataset: Dataset::SyU, solver, n, m, capacity: cap, seed };
    let mut rows: Vec<Vec<BenchRow>> = vec![Vec::new(); VARIANTS.len()];
    let mut literal = Vec::new();
    for seed in 0..20 {
        for (i, s) in VARIANTS.iter().enumerate() {
            rows[i].push(run_cell(&cell(*s, seed), true).unwrap());
        }
        let inst = Dataset::SyU.generate(n, m, cap, seed).unwrap();
        let sol = hgr_solve_with(&inst, Variant::HgrApprox { delta: DEFAULT_DELTA }, RouteStyle::Literal).unwrap();
        literal.push(assignment_cost(&sol.assignment, &inst).unwrap());
    }
    let dist = |i: usize| rows[i].iter().map(|r| r.total_distance).collect::<Vec<_>>();
    let (hgr, w1, approx, ins) = (dist(0), dist(1), dist(2), dist(3));
    let wins = hgr.iter().zip(&ins).filter(|(h, b)| h < b).count();
    rep.line(
        8,
        mean(&approx) <= mean(&ins) && wins >= 14,
        format!(
            "mean distance hgr-approx {:.1} vs insertion {:.1}; hgr beats insertion on {wins}/20 seeds \
             (hgr-approx with literal depth-first routes: {:.1})",
            mean(&approx),
            mean(&ins),
            mean(&literal)
        ),
    );
    rep.line(
        9,
        mean(&hgr) <= mean(&w1) * 1.05 && mean(&w1) <= mean(&approx) * 1.05,
        format!("mean distance hgr {:.1}, hgr-w1 {:.1}, hgr-approx {:.1}", mean(&hgr), mean(&w1), mean(&approx)),
    );
    let secs = |i: usize| rows[i].iter().map(|r| r.wall_time_ms / 1e3).fold(0.0, f64::max);
    rep.line(
        10,
        secs(0) < 120.0 && secs(2) < 20.0,
        format!("slowest run: hgr {:.1} s, hgr-approx {:.1} s (hgr-w1 {:.1} s, insertion {:.1} s)", secs(0), secs(2), secs(1), secs(3)),
    );

    let csv = |timing_rows: &[BenchRow]| {
        let mut buf = Vec::new();
        write_rows(timing_rows, &mut buf).unwrap();
        buf
    };
    let cells: Vec<BenchCell> = VARIANTS
        .iter()
        .flat_map(|&s| [cell(s, 0), cell(s, 7), BenchCell { dataset: Dataset::SyG { clusters: 10, sigma: 50.0 }, ..cell(s, 3) }])
        .collect();
    let first: Vec<BenchRow> = cells.iter().map(|c| run_cell(c, false).unwrap()).collect();
    let second: Vec<BenchRow> = cells.iter().map(|c| run_cell(c, false).unwrap()).collect();
    // The timed runs above must agree with the untimed ones on every metric.
    let agree = cells.iter().zip(&first).all(|(c, r)| {
        if c.dataset != Dataset::SyU {
            return true;
        }
        let i = VARIANTS.iter().position(|s| *s == c.solver).unwrap();
        let t = &rows[i][c.seed as usize];
        t.total_distance.to_bits() == r.total_distance.to_bits() && t.in_transit_latency.to_bits() == r.in_transit_latency.to_bits()
    });
    let same = csv(&first) == csv(&second);
    rep.line(11, same && agree, format!("{} cells run twice with timing off: rows byte-identical = {same}, timed rows agree = {agree}", cells.len()));
}

fn main() {
    let mut rep = Report { failed: 0 };
    let start = Instant::now();
    c1(&mut rep);
    c2(&mut rep);
    c3(&mut rep);
    c4(&mut rep);
    c5(&mut rep);
    c6(&mut rep);
    c7(&mut rep);
    c8_to_11(&mut rep);
    println!("acceptance: {} of 11 criteria failed ({:.0} s)", rep.failed, start.elapsed().as_secs_f64());
    if rep.failed > 0 {
        std::process::exit(1);
    }
}
