//! `replica`: solve, check and export replica placement instances.
//!
//! Exit status is 0 on success, 1 when an instance has no solution or a
//! solution is invalid, 2 on usage, parse and file errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use replica_placement::experiments::{emit_csv, generate_tree, parse_config, run_campaign, CapacityMode, GeneratorParams};
use replica_placement::heuristics::Heuristic;
use replica_placement::lp::{apply_relaxation, build_ilp, naive_lower_bound, read_solution, write_lp_file, RelaxationMode, SolverStatus};
use replica_placement::num::format_rational;
use replica_placement::optimal::{solve_multiple_homogeneous, OptimalError};
use replica_placement::oracle::{exact, OracleOutcome, DEFAULT_CAP};
use replica_placement::solution::{parse_solution, write_solution};
use replica_placement::validate::{placement_cost, validate_all};
use replica_placement::{Assignment, ConstraintProfile, DistributionTree, Placement, Policy};

#[derive(Parser)]
#[command(name = "replica", version, about = "Replica placement on tree networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a heuristic or the optimal Multiple algorithm and write the solution.
    Solve {
        #[command(flatten)]
        tree: TreeArg,
        /// optimal-multiple, or a heuristic: ctda ctdlf cbu utd ubcf mtd mbu mg mb
        #[arg(long)]
        algo: String,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Check a solution file against a tree under a policy and profile.
    Validate {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        solution: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
    },
    /// Exact optimum by enumeration (small trees only).
    Oracle {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long, default_value = "multiple")]
        policy: Policy,
        /// Refuse trees with more internal nodes (or clients, for upwards).
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[command(flatten)]
        output: OutputArg,
    },
    /// ceil(total requests / W) for a homogeneous tree, and optionally the
    /// objective of an imported relaxed solution.
    LowerBound {
        #[command(flatten)]
        tree: TreeArg,
        /// Solver output for the Multiple program of this tree.
        #[arg(long)]
        lp_solution: Option<PathBuf>,
        #[arg(long, default_value = "refined")]
        relaxation: RelaxationMode,
    },
    /// Write the integer program of a tree in CPLEX LP format.
    ExportLp {
        #[command(flatten)]
        tree: TreeArg,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, default_value = "exact")]
        relaxation: RelaxationMode,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Read solver output for an exported program; integral solutions are
    /// validated and written as a solution file.
    ImportSolution {
        #[command(flatten)]
        tree: TreeArg,
        #[arg(long)]
        lp_solution: PathBuf,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, default_value = "exact")]
        relaxation: RelaxationMode,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Generate a random tree with a given load.
    Generate(GenerateArgs),
    /// Run a heuristic comparison campaign and print the CSV summary.
    Campaign {
        /// `key = value` settings file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArg,
    },
}

#[derive(Args)]
struct TreeArg {
    #[arg(long = "tree", id = "tree")]
    path: PathBuf,
}

#[derive(Args)]
struct OutputArg {
    /// Write here instead of standard output.
    #[arg(long = "output", short = 'o', id = "output")]
    path: Option<PathBuf>,
}

#[derive(Args)]
struct PolicyArgs {
    #[arg(long, default_value = "multiple")]
    policy: Policy,
    /// none, qos, bw or qos+bw
    #[arg(long, default_value = "none")]
    profile: ConstraintProfile,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bounds on clients + internal nodes, `min..max`.
    #[arg(long, default_value = "15..400")]
    size: String,
    /// `W` for homogeneous trees or `min..max` for heterogeneous ones.
    #[arg(long, default_value = "100")]
    capacity: String,
    /// Internal children per node, `min..max`.
    #[arg(long, default_value = "1..4")]
    branching: String,
    #[arg(long)]
    max_internal: Option<usize>,
    #[arg(long)]
    max_clients: Option<usize>,
    #[command(flatten)]
    output: OutputArg,
}

/// Input and usage problems (exit 2) versus answers that are negative
/// (exit 1).
enum Failure {
    Usage(anyhow::Error),
    Rejected(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected(message)) => {
            eprintln!("{message}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_tree(arg: &TreeArg) -> Result<DistributionTree> {
    let text = read(&arg.path)?;
    text.parse().with_context(|| format!("parsing {}", arg.path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(output: &OutputArg, text: &str) -> Result<()> {
    match &output.path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary(tree: &DistributionTree, placement: &Placement) -> String {
    format!("{} replicas, cost {}", placement.len(), format_rational(&placement_cost(tree, placement)))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { tree, algo, output } => {
            let tree = load_tree(&tree)?;
            let (placement, assignment) = solve(&tree, &algo)?;
            eprintln!("{algo}: {}", summary(&tree, &placement));
            emit(&output, &write_solution(&tree, &placement, &assignment))?;
        }
        Command::Validate { tree, solution, policy } => {
            let tree = load_tree(&tree)?;
            let (placement, assignment) =
                parse_solution(&read(&solution)?, &tree).with_context(|| format!("parsing {}", solution.display()))?;
            let report = validate_all(&tree, &placement, &assignment, policy.policy, policy.profile);
            if !report.is_ok() {
                print!("{report}");
                return Err(Failure::Rejected(format!("invalid under {} ({})", policy.policy, policy.profile)));
            }
            println!("valid under {} ({}): {}", policy.policy, policy.profile, summary(&tree, &placement));
        }
        Command::Oracle { tree, policy, cap, output } => {
            let tree = load_tree(&tree)?;
            match exact(&tree, policy, cap).map_err(|e| anyhow!(e))? {
                OracleOutcome::Optimal { placement, assignment, .. } => {
                    eprintln!("optimum under {policy}: {}", summary(&tree, &placement));
                    emit(&output, &write_solution(&tree, &placement, &assignment))?;
                }
                OracleOutcome::Infeasible => return Err(Failure::Rejected(format!("no solution under {policy}"))),
            }
        }
        Command::LowerBound { tree, lp_solution, relaxation } => {
            let tree = load_tree(&tree)?;
            match naive_lower_bound(&tree) {
                Ok(bound) => println!("naive {bound}"),
                Err(e) if lp_solution.is_none() => return Err(anyhow!(e).into()),
                Err(e) => eprintln!("naive bound unavailable: {e}"),
            }
            if let Some(path) = lp_solution {
                let model =
                    apply_relaxation(&build_ilp(&tree, Policy::Multiple, ConstraintProfile::NONE), relaxation);
                let sol = read_solution(&read(&path)?, &model, &tree)
                    .with_context(|| format!("reading {}", path.display()))?;
                if sol.status == SolverStatus::Infeasible {
                    return Err(Failure::Rejected("no solution: relaxed program is infeasible".into()));
                }
                println!("{relaxation} {}", sol.objective);
            }
        }
        Command::ExportLp { tree, policy, relaxation, output } => {
            let tree = load_tree(&tree)?;
            let model = apply_relaxation(&build_ilp(&tree, policy.policy, policy.profile), relaxation);
            emit(&output, &write_lp_file(&model))?;
        }
        Command::ImportSolution { tree, lp_solution, policy, relaxation, output } => {
            let tree = load_tree(&tree)?;
            let model = apply_relaxation(&build_ilp(&tree, policy.policy, policy.profile), relaxation);
            let sol = match read_solution(&read(&lp_solution)?, &model, &tree) {
                Ok(sol) => sol,
                Err(e @ replica_placement::lp::ReadError::Invalid(_)) => return Err(Failure::Rejected(e.to_string())),
                Err(e) => return Err(anyhow!(e).context(format!("reading {}", lp_solution.display())).into()),
            };
            if sol.status == SolverStatus::Infeasible {
                return Err(Failure::Rejected("no solution: solver reports the program infeasible".into()));
            }
            eprintln!("objective {}", sol.objective);
            match &sol.integral {
                Some((placement, assignment)) => emit(&output, &write_solution(&tree, placement, assignment))?,
                None => println!("objective {}", sol.objective),
            }
        }
        Command::Generate(args) => {
            let params = generator_params(&args)?;
            let tree = generate_tree(&params).map_err(|e| anyhow!(e))?;
            emit(&args.output, &tree.to_text())?;
        }
        Command::Campaign { config, workers, seed, output } => {
            let mut cfg = parse_config(&read(&config)?).with_context(|| format!("parsing {}", config.display()))?;
            if let Some(w) = workers {
                cfg.workers = w;
            }
            if let Some(s) = seed {
                cfg.generator.seed = s;
            }
            let report = run_campaign(&cfg).map_err(|e| anyhow!(e))?;
            emit(&output, &emit_csv(&report))?;
        }
    }
    Ok(())
}

fn solve(tree: &DistributionTree, algo: &str) -> Result<(Placement, Assignment), Failure> {
    let key = algo.to_ascii_lowercase();
    if key == "optimal-multiple" || key == "optimal" {
        return match solve_multiple_homogeneous(tree) {
            Ok(sol) => Ok((sol.placement, sol.assignment)),
            Err(e @ OptimalError::Infeasible { .. }) => Err(Failure::Rejected(e.to_string())),
            Err(e) => Err(anyhow!(e).into()),
        };
    }
    let heuristic: Heuristic = algo.parse().map_err(|e: String| anyhow!(e))?;
    let r = heuristic.run(tree);
    if !r.success {
        return Err(Failure::Rejected(format!("no solution: residual {} requests at root", r.residual)));
    }
    Ok((r.placement, r.assignment))
}

fn range(text: &str) -> Result<(u64, u64)> {
    let parse = |s: &str| s.trim().parse::<u64>().with_context(|| format!("bad number `{s}`"));
    match text.split_once("..") {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => {
            let v = parse(text)?;
            Ok((v, v))
        }
    }
}

fn generator_params(args: &GenerateArgs) -> Result<GeneratorParams> {
    let (size_min, size_max) = range(&args.size)?;
    let (branching_min, branching_max) = range(&args.branching)?;
    let capacity = match range(&args.capacity)? {
        (w, _) if !args.capacity.contains("..") => CapacityMode::Homogeneous(w),
        (min, max) => CapacityMode::Heterogeneous { min, max },
    };
    if size_min > size_max {
        bail!("empty size range {}", args.size);
    }
    Ok(GeneratorParams {
        lambda: args.lambda,
        size_min: size_min as usize,
        size_max: size_max as usize,
        max_internal: args.max_internal,
        max_clients: args.max_clients,
        capacity,
        branching_min: branching_min as usize,
        branching_max: branching_max as usize,
        seed: args.seed,
    })
}
