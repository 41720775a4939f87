//! `layoutforge`: solve scene specs, run the grid oracle, export camera or
//! object tracks, and drive the asset forge loop.
//!
//! Exit codes: 0 success, 2 solved but infeasible (or forge loop exhausted),
//! 1 on any error including usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};
use layoutforge_core::anneal::{self, SnapGrid, SolvedTree};
use layoutforge_core::forge::{self, LoopOutcome, Manual, TaskFile};
use layoutforge_core::io::{self, SceneSpec};
use layoutforge_core::oracle::{self, GridSpec};
use layoutforge_core::trajectory;

const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(name = "layoutforge", version, about = "Constraint-based 3D scene layout")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Anneal every level of a scene spec.
    Solve(SolveArgs),
    /// Solve every level by exhaustive grid enumeration.
    Oracle(OracleArgs),
    /// Export the keyframes of one trajectory command.
    Traj(TrajArgs),
    /// Asset generate-execute-critique loop.
    #[command(subcommand)]
    Forge(ForgeCommand),
}

#[derive(Args)]
struct SolveArgs {
    spec: PathBuf,
    /// Falls back to LAYOUTFORGE_SEED, then to the spec's solver seed.
    #[arg(long, env = "LAYOUTFORGE_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    full_6dof: bool,
    #[arg(long)]
    max_evals: Option<u64>,
    /// Accepted-move log, levels in solve order.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Restrict moves to the oracle grid (cell centers, quarter-turn yaws).
    #[arg(long)]
    snap_only: bool,
    /// Grid spacing for --snap-only.
    #[arg(long, default_value_t = 0.25)]
    grid_step: f64,
}

#[derive(Args)]
struct OracleArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    grid_step: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct TrajArgs {
    spec: PathBuf,
    /// Index into the spec's trajectory list.
    #[arg(long)]
    command: usize,
    #[arg(long, default_value_t = 24.0)]
    fps: f64,
    #[arg(long)]
    out: PathBuf,
    /// Solved layout to anchor against; the spec's initial poses otherwise.
    #[arg(long)]
    layout: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ForgeCommand {
    Run {
        #[arg(long)]
        task: PathBuf,
        #[arg(long)]
        manual: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_iters: u32,
    },
    Lookup {
        #[arg(long)]
        manual: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = forge::manual::DEFAULT_TOP_K)]
        top_k: usize,
    },
}

fn load_spec(path: &Path) -> Result<SceneSpec> {
    let spec = io::read_spec(path).with_context(|| format!("reading {}", path.display()))?;
    for w in &spec.warnings {
        eprintln!("warning: {w}");
    }
    Ok(spec)
}

/// Writes outputs only after solving finished, then maps feasibility to the
/// exit code.
fn finish(solved: &SolvedTree, spec: &SceneSpec, out: &Path, svg: Option<&Path>) -> Result<ExitCode> {
    io::write_layout(solved, out)?;
    if let Some(svg) = svg {
        io::write_svg(&solved.tree, &spec.domain, svg)?;
    }
    for level in &solved.levels {
        if !level.feasible() {
            eprintln!("level `{}` is infeasible", level.level);
        }
    }
    Ok(if solved.feasible() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_INFEASIBLE)
    })
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let mut spec = load_spec(&args.spec)?;
    let mut config = spec.solver.clone();
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.max_evals {
        config.max_evals = n;
    }
    if args.snap_only {
        config.snap = Some(SnapGrid {
            xy_step: args.grid_step,
            yaw_set: anneal::default_yaw_set(),
        });
    }
    if args.trace.is_some() {
        config.record_trace = true;
    }
    spec.problem.full_6dof |= args.full_6dof;
    let solved = anneal::solve_hierarchical(&spec.tree, &spec.domain, &spec.level_terms(), &spec.problem, &config)?;
    if let Some(path) = &args.trace {
        let records: Vec<_> = solved
            .levels
            .iter()
            .filter_map(|l| l.solution.as_ref())
            .flat_map(|s| s.trace.iter().cloned())
            .collect();
        io::write_trace(&records, path)?;
    }
    finish(&solved, &spec, &args.out, args.svg.as_deref())
}

fn run_oracle(args: OracleArgs) -> Result<ExitCode> {
    let spec = load_spec(&args.spec)?;
    let grid = GridSpec::with_step(args.grid_step);
    let solved = anneal::solve_hierarchical_with(&spec.tree, &spec.domain, &spec.level_terms(), &spec.problem, |p, _| {
        oracle::oracle_solve(p, &grid)
    })?;
    finish(&solved, &spec, &args.out, args.svg.as_deref())
}

fn traj(args: TrajArgs) -> Result<ExitCode> {
    let spec = load_spec(&args.spec)?;
    let Some(command) = spec.trajectories.get(args.command) else {
        bail!(
            "trajectory index {} out of range ({} commands in spec)",
            args.command,
            spec.trajectories.len()
        );
    };
    let world = match &args.layout {
        Some(path) => io::recompose_world(&io::read_layout(path)?),
        None => spec.tree.world_poses(),
    };
    let track = trajectory::plan(command, |id| {
        let node = spec.tree.find(id)?;
        Some((*world.get(id)?, node.extent))
    })?;
    trajectory::export_track(&track.keyframes, track.subject.label(), args.fps, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn forge_cmd(cmd: ForgeCommand) -> Result<ExitCode> {
    match cmd {
        ForgeCommand::Run { task, manual, max_iters } => {
            let text = std::fs::read_to_string(&task).with_context(|| format!("reading {}", task.display()))?;
            let file: TaskFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", task.display()))?;
            let mut m = Manual::load_or_new(&manual)?;
            let mut generator = file.generator.build();
            let outcome = forge::run_loop(&file.task, generator.as_mut(), &mut forge::RuleCritic, max_iters, &mut m)?;
            match outcome {
                LoopOutcome::Success { record, attempts, committed } => {
                    if committed {
                        m.save(&manual)?;
                    }
                    println!(
                        "accepted after {attempts} attempt(s); {} seq {}",
                        if committed { "committed" } else { "already in manual" },
                        record.seq
                    );
                    Ok(ExitCode::SUCCESS)
                }
                LoopOutcome::Failure { attempts, last_report, diagnostic } => {
                    if let Some(d) = diagnostic {
                        bail!("forge loop stopped after {attempts} attempt(s): {d}");
                    }
                    eprintln!("no accepted program after {attempts} attempt(s)");
                    for f in last_report.iter().flat_map(|r| &r.failures) {
                        eprintln!("  failed: {}", f.predicate);
                    }
                    Ok(ExitCode::from(EXIT_INFEASIBLE))
                }
            }
        }
        ForgeCommand::Lookup { manual, query, top_k } => {
            let m = Manual::load(&manual)?;
            for (score, r) in m.lookup(&query, top_k, forge::manual::DEFAULT_MIN_SCORE) {
                let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{score:.3}\t{}\t{}\t{}", r.task, r.category, params.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Traj(a) => traj(a),
        Command::Forge(c) => forge_cmd(c),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
