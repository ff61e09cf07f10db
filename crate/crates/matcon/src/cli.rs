//! Command-line front end: solve, check, certify, generate, bench.
//!
//! Exit codes are a stable contract: 0 success / feasible verdict, 1 negative
//! verdict, 2 input error, 3 resource cap exceeded. Results go to stdout,
//! diagnostics to stderr. Caps can be overridden with `MATCON_*` environment
//! variables.

use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::domination::{weak_order, WeakOrderSolver};
use crate::gapless::{solve_cmax, SolveResult};
use crate::io::{self, InstanceFile, SolveOutput};
use crate::model::{check_feasible, normalize, Instance, NormalizationOutcome, Schedule, Time};
use crate::oracle::{self, Caps, OracleError, PrefixSearchSolver};
use crate::phase_model::{
    build_certificate, state_space_estimate, verify_certificate, PhaseCertificate, PhaseDpSolver,
    PhaseError, DEFAULT_STATE_CAP,
};
use crate::reductions::{
    self, BinPackingInstance, GeneratedInstance, GraphInstance, RandomParams, ReductionError,
};
use crate::umax_fpt::SubsetSolver;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

const DEFAULT_UMAX_THRESHOLD: Time = 20;

#[derive(Debug, Parser)]
#[command(name = "matcon", version, about = "Exact makespan minimization under non-renewable resource supplies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize the makespan of an instance.
    Solve {
        /// Instance file path, or inline JSON starting with '{'.
        input: String,
        #[arg(long, value_enum, default_value_t = Algo::Auto)]
        algo: Algo,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check a schedule against an instance.
    Check {
        instance: String,
        schedule: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Build and verify a phase certificate for a gapless schedule.
    Certify {
        instance: String,
        /// Schedule file; required unless --from-solver or --verify-only.
        #[arg(long)]
        schedule: Option<String>,
        /// Compute a gapless schedule instead of reading one.
        #[arg(long, conflicts_with = "schedule")]
        from_solver: bool,
        /// Verify an existing certificate file instead of building one.
        #[arg(long, conflicts_with_all = ["schedule", "from_solver"])]
        verify_only: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Generate a benchmark instance from a base problem.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Time every solver on a directory of instance files.
    Bench {
        /// Directory containing *.json instance files.
        dir: String,
        /// Comma-separated subset of algorithms to run.
        #[arg(long, value_enum, value_delimiter = ',')]
        algos: Vec<Algo>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Auto,
    Oracle,
    Timepoints,
    Prefix,
    Domination,
    UmaxFpt,
    PhaseDp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Family {
    /// Unary Bin Packing via unit supplies and one short special job.
    BpBmax(BinPackingArgs),
    /// Unary Bin Packing via one bulk supply per bin.
    BpQ(BinPackingArgs),
    /// Unary Bin Packing via unit jobs over two resources.
    Bp2r(BinPackingArgs),
    /// Independent Set via one resource per edge.
    Indepset {
        /// Graph file: {"vertices": n, "edges": [[a, b], ...]}.
        #[arg(long)]
        graph: String,
        /// Independent-set size to test for.
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Seeded random instance, possibly violating the normal form.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        max_p: Time,
        #[arg(long, default_value_t = 3)]
        max_a: u64,
        #[arg(long, default_value_t = 3)]
        q: usize,
        #[arg(long, default_value_t = 3)]
        max_gap: Time,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Debug, clap::Args)]
pub struct BinPackingArgs {
    /// Number of bins.
    #[arg(long = "k")]
    k: u64,
    /// Bin size.
    #[arg(long = "B")]
    bin_size: u64,
    /// Comma-separated object sizes; must sum to k * B.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<u64>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

fn env_u64(name: &str) -> Result<Option<u64>, String> {
    match std::env::var(name) {
        Ok(v) => v
            .parse::<u64>()
            .map(Some)
            .map_err(|_| format!("{name} must be a non-negative integer, got {v:?}")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("{name}: {e}")),
    }
}

#[derive(Debug, Clone, Copy)]
struct Limits {
    caps: Caps,
    umax_threshold: Time,
    state_cap: u64,
}

fn limits_from_env() -> Result<Limits, String> {
    let mut caps = Caps::default();
    if let Some(v) = env_u64("MATCON_PERM_JOBS")? {
        caps.permutation_jobs = v as usize;
    }
    if let Some(v) = env_u64("MATCON_TIMEPOINT_JOBS")? {
        caps.timepoint_jobs = v as usize;
    }
    if let Some(v) = env_u64("MATCON_TIMEPOINT_HORIZON")? {
        caps.timepoint_horizon = v;
    }
    Ok(Limits {
        caps,
        umax_threshold: env_u64("MATCON_UMAX_THRESHOLD")?.unwrap_or(DEFAULT_UMAX_THRESHOLD),
        state_cap: env_u64("MATCON_STATE_CAP")?.unwrap_or(DEFAULT_STATE_CAP),
    })
}

pub fn run(cli: Cli) -> i32 {
    let limits = match limits_from_env() {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match cli.command {
        Command::Solve {
            input,
            algo,
            format,
        } => run_solve(&input, algo, format, &limits),
        Command::Check {
            instance,
            schedule,
            format,
        } => run_check(&instance, &schedule, format),
        Command::Certify {
            instance,
            schedule,
            from_solver,
            verify_only,
            format,
        } => run_certify(
            &instance,
            schedule.as_deref(),
            from_solver,
            verify_only.as_deref(),
            format,
        ),
        Command::Generate { family } => run_generate(family),
        Command::Bench { dir, algos } => run_bench(&dir, &algos, &limits),
    }
}

fn load_instance_or_report(input: &str) -> Result<(Instance, InstanceFile), i32> {
    io::load_instance(input).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_INPUT
    })
}

enum Dispatch {
    Result(SolveResult),
    Exit(i32),
}

/// Solves the normalized instance with the requested algorithm, resolving
/// `auto` by the cheapest applicable solver.
fn dispatch(norm: &Instance, algo: Algo, limits: &Limits) -> Dispatch {
    let chosen = if algo == Algo::Auto {
        if weak_order(norm).is_some() {
            Algo::Domination
        } else if norm.resources() == 1 && norm.u_max() <= limits.umax_threshold {
            Algo::UmaxFpt
        } else if state_space_estimate(norm) <= limits.state_cap {
            Algo::PhaseDp
        } else {
            Algo::Prefix
        }
    } else {
        algo
    };
    let solved = match chosen {
        Algo::Auto => unreachable!("auto resolved above"),
        Algo::Oracle => match oracle::solve_exact_permutations(norm, &limits.caps) {
            Ok(res) => res,
            Err(OracleError::CapExceeded { what }) => {
                eprintln!("error: oracle cap exceeded ({what}); try --algo prefix");
                return Dispatch::Exit(EXIT_CAP);
            }
        },
        Algo::Timepoints => match oracle::solve_exact_timepoints(norm, &limits.caps) {
            Ok(res) => res,
            Err(OracleError::CapExceeded { what }) => {
                eprintln!("error: timepoint cap exceeded ({what}); try --algo prefix");
                return Dispatch::Exit(EXIT_CAP);
            }
        },
        Algo::Prefix => solve_cmax(norm, &PrefixSearchSolver),
        Algo::Domination => {
            if weak_order(norm).is_none() {
                eprintln!("error: domination requires a weakly ordered instance");
                return Dispatch::Exit(EXIT_INPUT);
            }
            solve_cmax(norm, &WeakOrderSolver)
        }
        Algo::UmaxFpt => {
            if norm.resources() != 1 {
                eprintln!("error: umax-fpt requires nr=1, got {}", norm.resources());
                return Dispatch::Exit(EXIT_INPUT);
            }
            solve_cmax(norm, &SubsetSolver)
        }
        Algo::PhaseDp => {
            if state_space_estimate(norm) > limits.state_cap {
                eprintln!(
                    "error: phase-dp state space exceeds cap {}; try --algo prefix",
                    limits.state_cap
                );
                return Dispatch::Exit(EXIT_CAP);
            }
            solve_cmax(
                norm,
                &PhaseDpSolver {
                    state_cap: limits.state_cap,
                },
            )
        }
    };
    match solved {
        Some(res) => Dispatch::Result(res),
        None => {
            eprintln!("infeasible: no schedule exists");
            Dispatch::Exit(EXIT_NEGATIVE)
        }
    }
}

fn denormalized_output(
    inst: &Instance,
    out: &NormalizationOutcome,
    res: SolveResult,
) -> SolveOutput {
    SolveOutput {
        makespan: res.makespan + out.makespan_offset,
        front_idle: res.front_idle,
        algorithm: res.algorithm,
        schedule: out.schedule_for_original(inst, &res.schedule),
    }
}

fn print_schedule_table(sched: &Schedule) {
    let mut starts = sched.starts.clone();
    starts.sort_by_key(|s| s.start);
    for s in starts {
        println!("  job {} @ {}", s.job, s.start);
    }
}

fn run_solve(input: &str, algo: Algo, format: Format, limits: &Limits) -> i32 {
    let (inst, _) = match load_instance_or_report(input) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let out = match normalize(&inst) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("infeasible: {e}");
            return EXIT_NEGATIVE;
        }
    };
    let res = match dispatch(&out.normalized, algo, limits) {
        Dispatch::Result(res) => res,
        Dispatch::Exit(code) => return code,
    };
    let rendered = denormalized_output(&inst, &out, res);
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string(&rendered).expect("output serializes")
        ),
        Format::Table => {
            println!("makespan   {}", rendered.makespan);
            println!("front_idle {}", rendered.front_idle);
            println!("algorithm  {}", rendered.algorithm);
            print_schedule_table(&rendered.schedule);
        }
    }
    EXIT_OK
}

fn run_check(instance: &str, schedule: &str, format: Format) -> i32 {
    let (inst, _) = match load_instance_or_report(instance) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let sched = match io::load_schedule(schedule) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let report = match check_feasible(&inst, &sched) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        ),
        Format::Table => match &report.first_violation {
            None => println!("feasible"),
            Some(v) => println!(
                "infeasible: {:?} job {} at t={}{}",
                v.kind,
                v.job,
                v.time,
                v.resource
                    .map_or(String::new(), |r| format!(" resource {r}"))
            ),
        },
    }
    if report.feasible {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

fn print_certificate_tables(cert: &PhaseCertificate) {
    println!("x       {:?}", cert.x);
    println!("x_sigma {:?}", cert.x_sigma);
    println!("alpha   {:?}", cert.alpha);
    println!("d       {:?}", cert.d);
}

fn run_certify(
    instance: &str,
    schedule: Option<&str>,
    from_solver: bool,
    verify_only: Option<&str>,
    format: Format,
) -> i32 {
    let (inst, _) = match load_instance_or_report(instance) {
        Ok(x) => x,
        Err(code) => return code,
    };

    let cert = if let Some(path) = verify_only {
        let text = match io::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INPUT;
            }
        };
        match serde_json::from_str::<PhaseCertificate>(&text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: invalid certificate JSON: {e}");
                return EXIT_INPUT;
            }
        }
    } else {
        let sched = if from_solver {
            match oracle::solve_ni_prefix_search(&inst) {
                Some(s) => s,
                None => {
                    eprintln!("infeasible: no gapless schedule from 0 exists");
                    return EXIT_NEGATIVE;
                }
            }
        } else {
            let Some(path) = schedule else {
                eprintln!("error: provide --schedule, --from-solver, or --verify-only");
                return EXIT_INPUT;
            };
            match io::load_schedule(path) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            }
        };
        match build_certificate(&inst, &sched) {
            Ok(c) => c,
            Err(PhaseError::ScheduleHasIdle { time }) => {
                eprintln!("error: schedule has interior idle at t={time}");
                return EXIT_INPUT;
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_NEGATIVE;
            }
        }
    };

    let (ok, violations) = verify_certificate(&inst, &cert);
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string(&cert).expect("certificate serializes")
        ),
        Format::Table => print_certificate_tables(&cert),
    }
    if ok {
        eprintln!("certificate verified");
        EXIT_OK
    } else {
        for v in &violations {
            eprintln!(
                "violated: {:?} phase {}{}",
                v.family,
                v.phase,
                v.index.map_or(String::new(), |i| format!(" index {i}"))
            );
        }
        EXIT_NEGATIVE
    }
}

fn emit_generated(gen: GeneratedInstance, out: Option<&str>, verdict: &str) -> i32 {
    let file = InstanceFile {
        resources: gen.instance.resources(),
        jobs: gen.instance.jobs().to_vec(),
        supplies: gen.instance.supplies().to_vec(),
        target_makespan: Some(gen.target_makespan),
        provenance: Some(gen.provenance),
    };
    eprintln!("target_makespan {}; {}", gen.target_makespan, gen.decision_meaning);
    eprintln!("base verdict: {verdict}");
    match out {
        Some(path) => match io::write_json(path, &file) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT
            }
        },
        None => {
            println!(
                "{}",
                serde_json::to_string(&file).expect("instance serializes")
            );
            EXIT_OK
        }
    }
}

fn verdict_str(v: Result<bool, ReductionError>) -> String {
    match v {
        Ok(true) => "YES".to_string(),
        Ok(false) => "NO".to_string(),
        Err(ReductionError::CapExceeded { what }) => format!("skipped ({what})"),
        Err(e) => format!("skipped ({e})"),
    }
}

fn run_generate(family: Family) -> i32 {
    let bp_case = |args: &BinPackingArgs,
                   reduce: fn(&BinPackingInstance) -> Result<GeneratedInstance, ReductionError>|
     -> i32 {
        let bp = BinPackingInstance {
            bins: args.k,
            bin_size: args.bin_size,
            sizes: args.sizes.clone(),
        };
        match reduce(&bp) {
            Ok(gen) => emit_generated(gen, args.out.as_deref(), &verdict_str(reductions::bp_oracle(&bp))),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INPUT
            }
        }
    };
    match family {
        Family::BpBmax(args) => bp_case(&args, reductions::reduce_binpacking_bmax),
        Family::BpQ(args) => bp_case(&args, reductions::reduce_binpacking_q),
        Family::Bp2r(args) => bp_case(&args, reductions::reduce_binpacking_two_resources),
        Family::Indepset { graph, k, out } => {
            let text = match io::read_to_string(&graph) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INPUT;
                }
            };
            let gf: GraphFile = match serde_json::from_str(&text) {
                Ok(g) => g,
                Err(e) => {
                    eprintln!("error: invalid graph JSON: {e}");
                    return EXIT_INPUT;
                }
            };
            let g = GraphInstance {
                vertices: gf.vertices,
                edges: gf.edges,
                k,
            };
            match reductions::reduce_independent_set(&g) {
                Ok(gen) => emit_generated(gen, out.as_deref(), &verdict_str(reductions::is_oracle(&g))),
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Family::Random {
            seed,
            n,
            r,
            max_p,
            max_a,
            q,
            max_gap,
            out,
        } => {
            let params = RandomParams {
                n,
                r,
                max_p,
                max_a,
                q,
                max_gap,
                seed,
            };
            let inst = reductions::random_instance(&params);
            let file = InstanceFile {
                resources: inst.resources(),
                jobs: inst.jobs().to_vec(),
                supplies: inst.supplies().to_vec(),
                target_makespan: None,
                provenance: Some(serde_json::json!({
                    "family": "random",
                    "seed": seed, "n": n, "r": r, "max_p": max_p,
                    "max_a": max_a, "q": q, "max_gap": max_gap,
                })),
            };
            match out {
                Some(path) => match io::write_json(&path, &file) {
                    Ok(()) => EXIT_OK,
                    Err(e) => {
                        eprintln!("error: {e}");
                        EXIT_INPUT
                    }
                },
                None => {
                    println!(
                        "{}",
                        serde_json::to_string(&file).expect("instance serializes")
                    );
                    EXIT_OK
                }
            }
        }
    }
}

const BENCH_ALGOS: [Algo; 6] = [
    Algo::Oracle,
    Algo::Timepoints,
    Algo::Prefix,
    Algo::Domination,
    Algo::UmaxFpt,
    Algo::PhaseDp,
];

fn algo_tag(a: Algo) -> &'static str {
    match a {
        Algo::Auto => "auto",
        Algo::Oracle => "oracle",
        Algo::Timepoints => "timepoints",
        Algo::Prefix => "prefix",
        Algo::Domination => "domination",
        Algo::UmaxFpt => "umax-fpt",
        Algo::PhaseDp => "phase-dp",
    }
}

/// Times every applicable solver on every instance in the directory, in
/// filename order, and compares makespans against the permutation oracle
/// where its cap allows.
fn run_bench(dir: &str, algos: &[Algo], limits: &Limits) -> i32 {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: cannot read {dir}: {e}");
            return EXIT_INPUT;
        }
    };
    let mut files: Vec<std::path::PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        eprintln!("error: no *.json instances in {dir}");
        return EXIT_INPUT;
    }
    let algos: Vec<Algo> = if algos.is_empty() {
        BENCH_ALGOS.to_vec()
    } else {
        algos.iter().copied().filter(|&a| a != Algo::Auto).collect()
    };

    println!(
        "{:<24} {:<12} {:>10} {:>10} {:>6}",
        "instance", "algorithm", "time_ms", "makespan", "agree"
    );
    for path in &files {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let (inst, _) = match io::load_instance(&path.to_string_lossy()) {
            Ok(x) => x,
            Err(e) => {
                eprintln!("error: {name}: {e}");
                return EXIT_INPUT;
            }
        };
        let Ok(out) = normalize(&inst) else {
            eprintln!("{name}: infeasible (total supply short)");
            continue;
        };
        let norm = &out.normalized;
        let reference = oracle::solve_exact_permutations(norm, &limits.caps)
            .ok()
            .flatten()
            .map(|r| r.makespan);
        for &algo in &algos {
            let applicable = match algo {
                Algo::Domination => weak_order(norm).is_some(),
                Algo::UmaxFpt => norm.resources() == 1,
                Algo::PhaseDp => state_space_estimate(norm) <= limits.state_cap,
                _ => true,
            };
            if !applicable {
                println!("{:<24} {:<12} {:>10} {:>10} {:>6}", name, algo_tag(algo), "n/a", "n/a", "n/a");
                continue;
            }
            let started = Instant::now();
            let solved = match algo {
                Algo::Oracle => oracle::solve_exact_permutations(norm, &limits.caps).ok().flatten(),
                Algo::Timepoints => oracle::solve_exact_timepoints(norm, &limits.caps).ok().flatten(),
                Algo::Prefix => solve_cmax(norm, &PrefixSearchSolver),
                Algo::Domination => solve_cmax(norm, &WeakOrderSolver),
                Algo::UmaxFpt => solve_cmax(norm, &SubsetSolver),
                Algo::PhaseDp => solve_cmax(
                    norm,
                    &PhaseDpSolver {
                        state_cap: limits.state_cap,
                    },
                ),
                Algo::Auto => unreachable!("filtered out"),
            };
            let ms = started.elapsed().as_millis();
            match solved {
                Some(res) => {
                    let agree = match reference {
                        Some(m) if m == res.makespan => "=",
                        Some(_) => "!",
                        None => "n/a",
                    };
                    println!(
                        "{:<24} {:<12} {:>10} {:>10} {:>6}",
                        name, algo_tag(algo), ms, res.makespan, agree
                    );
                }
                None => println!(
                    "{:<24} {:<12} {:>10} {:>10} {:>6}",
                    name, algo_tag(algo), ms, "n/a", "n/a"
                ),
            }
        }
    }
    EXIT_OK
}
