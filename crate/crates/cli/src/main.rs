use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use hgr_core::bench::{
    default_solvers, expand_grid, oracle_compare, run_grid, sensitivity_grid, write_oracle_rows, write_rows, Dataset,
    GridPoint, Solver,
};
use hgr_core::io::{read_assignment, read_instance, write_assignment, write_instance};
use hgr_core::model::{assignment_cost, in_transit_latency, Assignment, Instance};
use hgr_core::oracles::{exact_darp, insertion_baseline, shuffled_order, OracleBudget};
use hgr_core::routing::{hgr_solve_with, RouteStyle, DEFAULT_DELTA};
use hgr_core::Error;

#[derive(Parser)]
#[command(name = "hgr", version, about = "Dial-a-ride solvers: hierarchical grouping, insertion, exact search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetArg {
    SyU,
    SyG,
}

#[derive(Clone, Copy, ValueEnum)]
enum StyleArg {
    ServiceOnly,
    Literal,
}

impl From<StyleArg> for RouteStyle {
    fn from(s: StyleArg) -> Self {
        match s {
            StyleArg::ServiceOnly => RouteStyle::ServiceOnly,
            StyleArg::Literal => RouteStyle::Literal,
        }
    }
}

#[derive(clap::Args)]
struct DatasetOpts {
    #[arg(long, value_enum, default_value = "sy-u")]
    dataset: DatasetArg,
    /// Gaussian cluster count (sy-g).
    #[arg(long = "Z", default_value_t = 10)]
    z: usize,
    /// Gaussian standard deviation (sy-g).
    #[arg(long, default_value_t = 50.0)]
    sigma: f64,
}

impl DatasetOpts {
    fn dataset(&self) -> Dataset {
        match self.dataset {
            DatasetArg::SyU => Dataset::SyU,
            DatasetArg::SyG => Dataset::SyG { clusters: self.z, sigma: self.sigma },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic instance file.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        lambda: usize,
        #[command(flatten)]
        data: DatasetOpts,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance and print its metrics as JSON.
    Solve {
        instance: PathBuf,
        /// hgr, hgr-w1, hgr-approx, insertion or exact.
        #[arg(long, default_value = "hgr")]
        variant: String,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, value_enum, default_value = "service-only")]
        route_style: StyleArg,
        /// Shuffle the insertion order with this seed.
        #[arg(long)]
        order_seed: Option<u64>,
        /// Assignment JSON output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an assignment against an instance and print its metrics.
    Evaluate { instance: PathBuf, assignment: PathBuf },
    /// Run a benchmark grid and write one CSV row per cell.
    Bench {
        /// Request counts (comma separated). Any of --n/--m/--lambda
        /// replaces the default sensitivity sweep by their cross product.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        m: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<usize>,
        #[command(flatten)]
        data: DatasetOpts,
        /// Multiplier on request counts of the default sweep.
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seed: Vec<u64>,
        #[arg(long, value_delimiter = ',')]
        variant: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Report wall time as 0 so that reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare heuristics with exact optima on tiny instances (CSV).
    OracleCompare {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) | Error::Internal(_) => 1,
        Error::BudgetExceeded(_) | Error::TooLarge(_) => 3,
        _ => 2,
    }
}

fn output(path: &Option<PathBuf>) -> hgr_core::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn metrics(instance: &Instance, a: &Assignment) -> hgr_core::Result<serde_json::Value> {
    Ok(serde_json::json!({
        "total_distance": assignment_cost(a, instance)?,
        "in_transit_latency": in_transit_latency(a, instance)?,
        "vehicles_used": a.walks.len(),
    }))
}

fn run(cli: Cli) -> hgr_core::Result<u8> {
    match cli.command {
        Command::Generate { n, m, lambda, data, seed, out } => {
            let instance = data.dataset().generate(n, m, lambda, seed)?;
            write_instance(&instance, out)?;
        }
        Command::Solve { instance, variant, delta, route_style, order_seed, out } => {
            let instance = read_instance(instance)?;
            let solver = Solver::parse(&variant, delta)?;
            let start = Instant::now();
            let assignment = match solver {
                Solver::Hgr(v) => hgr_solve_with(&instance, v, route_style.into())?.assignment,
                Solver::Insertion => {
                    let order = match order_seed {
                        Some(s) => shuffled_order(instance.n(), s),
                        None => (0..instance.n()).collect(),
                    };
                    insertion_baseline(&instance, &order)?
                }
                Solver::Exact => exact_darp(&instance, &OracleBudget::default())?.assignment,
            };
            let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
            let report = assignment.validate(&instance);
            if !report.is_ok() {
                return Err(Error::Infeasible(report));
            }
            let mut m = metrics(&instance, &assignment)?;
            m["variant"] = solver.name().into();
            m["wall_time_ms"] = wall_time_ms.into();
            println!("{}", serde_json::to_string_pretty(&m)?);
            if let Some(path) = out {
                write_assignment(&assignment, path)?;
            }
        }
        Command::Evaluate { instance, assignment } => {
            let instance = read_instance(instance)?;
            let assignment = read_assignment(assignment)?;
            let report = assignment.validate(&instance);
            if !report.is_ok() {
                println!("infeasible assignment:");
                for v in &report.violations {
                    println!("  {v}");
                }
                return Ok(1);
            }
            println!("{}", serde_json::to_string_pretty(&metrics(&instance, &assignment)?)?);
        }
        Command::Bench { n, m, lambda, data, scale, seed, variant, delta, jobs, no_timing, out } => {
            let solvers = if variant.is_empty() {
                default_solvers()
                    .into_iter()
                    .map(|s| Solver::parse(s.name(), delta))
                    .collect::<hgr_core::Result<Vec<_>>>()?
            } else {
                variant.iter().map(|v| Solver::parse(v, delta)).collect::<hgr_core::Result<Vec<_>>>()?
            };
            let points = if n.is_empty() && m.is_empty() && lambda.is_empty() {
                sensitivity_grid(scale)
            } else {
                let dataset = data.dataset();
                let (dn, dm, dl) = match dataset {
                    Dataset::SyU => (8000, 90, 32),
                    Dataset::SyG { .. } => (6000, 90, 16),
                };
                let pick = |v: Vec<usize>, d: usize| if v.is_empty() { vec![d] } else { v };
                let (ns, ms, ls) = (pick(n, dn), pick(m, dm), pick(lambda, dl));
                let mut pts = Vec::new();
                for &n in &ns {
                    for &m in &ms {
                        for &capacity in &ls {
                            pts.push(GridPoint { dataset, n, m, capacity });
                        }
                    }
                }
                pts
            };
            let cells = expand_grid(&points, &solvers, &seed);
            let rows = run_grid(&cells, jobs, !no_timing)?;
            write_rows(&rows, output(&out)?)?;
        }
        Command::OracleCompare { count, seed, out } => {
            let rows = oracle_compare(count, seed)?;
            write_oracle_rows(&rows, output(&out)?)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
