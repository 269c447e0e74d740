use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use codedcache::acceptance::run_all;
use codedcache::bounds::{lb_genie_detail, lb_uniform_terms};
use codedcache::config::{read_partition, Config};
use codedcache::evaluator::{avg_load_bruteforce, avg_load_monotone, avg_load_symmetric, avg_load_uniform};
use codedcache::exec::with_jobs;
use codedcache::optimizer::{
    baseline_mn_centralized, closed_form_uniform, solve_problem1_oracle, solve_problem2_oracle, solve_problem3,
    solve_problem4,
};
use codedcache::simulator::{quantize, simulate, DeliveryMode};
use codedcache::sweep::{sweep, write_csv, SweepVar};
use codedcache::{DemandVector, Error, Execution, Instance, Partition};

/// Largest exhaustive demand set `simulate --demands all` will enumerate.
const MAX_SIMULATED_DEMANDS: u64 = 100_000;

#[derive(Parser)]
#[command(name = "codedcache", version, about = "Cache placement optimization for coded multicast delivery")]
struct Cli {
    /// Worker threads for data-parallel work (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a placement program and print the result as JSON.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Program::Ordered)]
        program: Program,
    },
    /// Average load of a partition under the configured popularity.
    Evaluate {
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Converse bounds as JSON.
    Bound {
        #[arg(long)]
        config: PathBuf,
    },
    /// Realize a partition at F units per file and simulate delivery.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long = "F")]
        f: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// "all", or 1-based demand vectors separated by ';' (e.g. "1,2;2,2").
        #[arg(long, default_value = "all")]
        demands: String,
        #[arg(long, value_enum, default_value_t = Delivery::ZeroPad)]
        delivery: Delivery,
    },
    /// Load and bound curves over one parameter, as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_var)]
        var: SweepVar,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        /// Number of evenly spaced points, endpoints included.
        #[arg(long)]
        steps: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria.
    Selftest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Program {
    /// Per-type placement with popularity ordering (polynomial size).
    Ordered,
    /// Per-type placement for uniform popularity.
    Uniform,
    /// Closed form for uniform popularity at integer K M / N.
    ClosedForm,
    /// Full-granularity epigraph program (exponential, small instances).
    Full,
    /// Per-type epigraph program without ordering (exponential, small instances).
    Symmetric,
    /// Memory-sharing baseline.
    Baseline,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Bruteforce,
    Symmetric,
    Monotone,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum Delivery {
    ZeroPad,
    Hcd,
}

fn parse_var(s: &str) -> std::result::Result<SweepVar, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_capacity() => 3,
        _ => 2,
    }
}

fn instance(path: &PathBuf) -> Result<Instance> {
    Ok(Config::from_path(path)?.instance()?)
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn optimize(config: &PathBuf, program: Program) -> Result<u8> {
    let inst = instance(config)?;
    let (k, n, m) = (inst.k(), inst.n(), inst.m());
    let uniform_only = |name: &str| -> Result<()> {
        if inst.pop().is_uniform() {
            Ok(())
        } else {
            Err(Error::Precondition(format!("the {name} program assumes uniform popularity")).into())
        }
    };
    let result = match program {
        Program::Ordered => solve_problem3(&inst)?,
        Program::Uniform => {
            uniform_only("uniform")?;
            solve_problem4(k, n, m)?
        }
        Program::ClosedForm => {
            uniform_only("closed-form")?;
            closed_form_uniform(k, n, m)?
        }
        Program::Full => solve_problem1_oracle(&inst)?,
        Program::Symmetric => solve_problem2_oracle(&inst)?,
        Program::Baseline => baseline_mn_centralized(&inst)?,
    };
    print_json(&result)?;
    Ok(0)
}

fn evaluate(partition: &PathBuf, config: &PathBuf, method: Method) -> Result<u8> {
    let inst = instance(config)?;
    let p = read_partition(partition)?;
    let symmetric = || {
        p.to_symmetric(inst.n())
            .ok_or_else(|| Error::Precondition("this method needs a symmetric or uniform partition".into()))
    };
    let load = match method {
        Method::Bruteforce => avg_load_bruteforce(&p.to_full(inst.n())?, &inst)?,
        Method::Symmetric => avg_load_symmetric(&symmetric()?, &inst)?,
        Method::Monotone => avg_load_monotone(&symmetric()?, &inst)?,
        Method::Uniform => match &p {
            Partition::Uniform(z) if inst.pop().is_uniform() => {
                if z.users() != inst.k() {
                    return Err(Error::Shape(format!("z has {} types, K + 1 = {}", z.users() + 1, inst.k() + 1)).into());
                }
                avg_load_uniform(z)
            }
            Partition::Uniform(_) => {
                return Err(Error::Precondition("the uniform formula assumes uniform popularity".into()).into());
            }
            _ => return Err(Error::Precondition("the uniform formula needs a uniform partition".into()).into()),
        },
    };
    println!("{load}");
    Ok(0)
}

fn bound(config: &PathBuf) -> Result<u8> {
    let inst = instance(config)?;
    let uniform = lb_uniform_terms(inst.k(), inst.n(), inst.m());
    let genie = lb_genie_detail(&inst);
    print_json(&json!({
        "lb_uniform": uniform.value,
        "lb_uniform_terms": uniform.terms,
        "lb_genie": genie.value,
        "argmax_n": genie.argmax_n,
        "lb_genie_per_n": genie.per_n,
    }))?;
    Ok(0)
}

fn parse_demands(spec: &str, inst: &Instance) -> Result<Vec<DemandVector>> {
    if spec.trim() == "all" {
        let count = (inst.n() as u64).checked_pow(inst.k() as u32).filter(|c| *c <= MAX_SIMULATED_DEMANDS);
        if count.is_none() {
            return Err(Error::Capacity {
                what: "simulated demand vectors N^K",
                required: (inst.n() as u128).saturating_pow(inst.k() as u32),
                cap: MAX_SIMULATED_DEMANDS as u128,
            }
            .into());
        }
        return Ok(DemandVector::all(inst.k(), inst.n()).collect());
    }
    spec.split(';')
        .map(|one| {
            let files = one
                .split(',')
                .map(|v| v.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("demand {one:?}: {e}")))?;
            let d = DemandVector::from_one_based(&files, inst.n())?;
            d.check_shape(inst.k(), inst.n())?;
            Ok(d)
        })
        .collect()
}

fn simulate_cmd(config: &PathBuf, partition: &PathBuf, f: u64, seed: u64, demands: &str, delivery: Delivery) -> Result<u8> {
    let inst = instance(config)?;
    let x = read_partition(partition)?.to_full(inst.n())?;
    let demands = parse_demands(demands, &inst)?;
    let real = quantize(&x, f, &inst, seed)?;
    let mode = match delivery {
        Delivery::ZeroPad => DeliveryMode::ZeroPad,
        Delivery::Hcd => DeliveryMode::Hcd,
    };
    let runs = simulate(&real, &demands, mode, Execution::Parallel)?;
    let mut per_s = vec![0u64; inst.k()];
    for r in &runs {
        for (acc, v) in per_s.iter_mut().zip(&r.per_s_totals) {
            *acc += v;
        }
    }
    let decoded = runs.iter().all(|r| r.decoded);
    print_json(&json!({
        "F": f,
        "seed": seed,
        "delivery": mode,
        "per_s_totals": per_s,
        "total_units": per_s.iter().sum::<u64>(),
        "decoded": decoded,
        "coloring_proper": runs.iter().all(|r| r.coloring_proper),
        "demands": runs,
    }))?;
    Ok(if decoded { 0 } else { 1 })
}

fn sweep_cmd(config: &PathBuf, var: SweepVar, from: f64, to: f64, steps: usize, out: Option<&PathBuf>) -> Result<u8> {
    let config = Config::from_path(config)?;
    config.instance()?;
    let rows = sweep(&config, var, from, to, steps, Execution::Parallel)?;
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write_csv(&rows, &mut w)?;
            w.flush()?;
        }
        None => write_csv(&rows, io::stdout().lock())?,
    }
    Ok(0)
}

fn selftest() -> Result<u8> {
    let reports = run_all(Execution::Parallel);
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("\nacceptance: {} passed, {failed} failed", reports.len() - failed);
    Ok(if failed == 0 { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Optimize { config, program } => optimize(config, *program),
        Command::Evaluate { partition, config, method } => evaluate(partition, config, *method),
        Command::Bound { config } => bound(config),
        Command::Simulate { config, partition, f, seed, demands, delivery } => {
            simulate_cmd(config, partition, *f, *seed, demands, *delivery)
        }
        Command::Sweep { config, var, from, to, steps, out } => sweep_cmd(config, *var, *from, *to, *steps, out.as_ref()),
        Command::Selftest => selftest(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    match with_jobs(jobs, || run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
