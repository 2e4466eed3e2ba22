//! The `cgplan` binary. Subcommands check, classify, solve and plan
//! over game files, plan over boolean transition systems, and generate
//! instances for experiments.
//!
//! Exit codes: 0 the run succeeded or certified its goal, 1 a negative
//! verdict (invalid game, infeasible goal, unreachable target), 2 a
//! usage or input problem, 3 a broken internal invariant. Every run
//! with `--report` leaves a JSON summary whose verdict word matches
//! the exit code.

use anyhow::{anyhow, bail, Context, Result};
use cgplan_bool::{boolean_cegar_plan, parse_boolean_system, PlanIteration, Verdict};
use cgplan_cli::{gen_gridworld, gen_random_game, sha256_hex, RunReport};
use cgplan_core::{
    brute_force_values, build_abstraction, counterexample_guided_plan_capped, game_solve,
    game_values, parse_game, parse_partition_blocks, serialize_abstraction, serialize_game,
    serialize_strategy, Game, IterationRecord, Objective, ParseError, PlanVerdict, Player,
    StatePartition,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "cgplan", version, about = "Solvers and planners for stochastic games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write a JSON run report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file against the structural rules.
    Validate {
        game: PathBuf,
    },
    /// Print the structural class of a game.
    Classify {
        game: PathBuf,
    },
    /// Compute exact values and optimal strategies.
    Solve {
        game: PathBuf,
        #[command(flatten)]
        objective: ObjectiveArgs,
        /// Also decide whether player 1 forces at least this value.
        #[arg(long, value_name = "P")]
        goal: Option<f64>,
    },
    /// Compute values by exhaustive strategy enumeration.
    Oracle {
        game: PathBuf,
        #[command(flatten)]
        objective: ObjectiveArgs,
    },
    /// Decide a goal by abstraction refinement; emit a certified strategy.
    Plan {
        game: PathBuf,
        #[command(flatten)]
        objective: ObjectiveArgs,
        /// Target player-1 value at the initial state.
        #[arg(long, value_name = "P")]
        goal: f64,
        /// Write the refinement trace as JSON lines.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Where to write the certified strategy. Defaults to the
        /// input path with extension `plan.json`.
        #[arg(long, value_name = "FILE")]
        plan: Option<PathBuf>,
        /// Give up after this many solve-refine iterations.
        #[arg(long, value_name = "N")]
        max_iters: Option<usize>,
    },
    /// Build the abstract game induced by a partition file.
    Abstract {
        game: PathBuf,
        /// Partition file: {"blocks": [["name", ...], ...]}.
        #[arg(long, value_name = "FILE")]
        partition: PathBuf,
        /// Write the abstraction here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Plan over a boolean transition system by projection refinement.
    Boolplan {
        system: PathBuf,
        /// Write the refinement trace as JSON lines.
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
    },
    /// Generate game instances.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Subcommand)]
enum GenCommand {
    /// A seeded random game.
    Random {
        #[arg(long, default_value_t = 8)]
        states: usize,
        /// Largest out-degree a state may draw.
        #[arg(long, default_value_t = 3)]
        out_degree: usize,
        /// Fraction of states owned by player 1.
        #[arg(long, default_value_t = 0.35)]
        p1_frac: f64,
        /// Fraction of states owned by player 2; the rest are random.
        #[arg(long, default_value_t = 0.35)]
        p2_frac: f64,
        #[arg(long, default_value_t = 0.0)]
        reward_min: f64,
        #[arg(long, default_value_t = 1.0)]
        reward_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the game here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// A grid navigation game with slip chance and optional adversary.
    Gridworld {
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 3)]
        height: usize,
        /// Chance a move drops the robot back on its source cell.
        #[arg(long, default_value_t = 0.0)]
        slip: f64,
        /// Interleave an opponent that may push the robot one cell.
        #[arg(long)]
        adversary: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the game here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ObjectiveArgs {
    #[arg(long, value_enum)]
    objective: ObjectiveKind,
    /// Discount factor in (0,1); discounted objective only.
    #[arg(long, value_name = "BETA")]
    beta: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveKind {
    Discounted,
    Average,
}

/// What a finished run reports: the verdict word, its exit code, and
/// the numbers worth keeping.
struct Outcome {
    verdict: &'static str,
    exit: i32,
    input_sha256: String,
    values: BTreeMap<String, f64>,
    trace: Option<String>,
    seed: Option<u64>,
}

impl Outcome {
    fn new(verdict: &'static str, exit: i32, input_sha256: String) -> Self {
        Outcome { verdict, exit, input_sha256, values: BTreeMap::new(), trace: None, seed: None }
    }
}

fn main() {
    // Rust turns writes to a closed pipe into panics; a terminal tool
    // should die quietly instead, like the rest of the pipeline.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let code = match std::panic::catch_unwind(run) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("cgplan: internal invariant broke, details above");
            3
        }
    };
    std::process::exit(code);
}

fn run() -> i32 {
    let cli = Cli::parse();
    let command_line = std::env::args().collect::<Vec<_>>().join(" ");
    let report_path = cli.report.clone();
    let started = Instant::now();
    match dispatch(cli.command) {
        Ok(outcome) => match write_report(report_path.as_deref(), &command_line, &outcome, started)
        {
            Ok(()) => outcome.exit,
            Err(err) => {
                eprintln!("cgplan: {err:#}");
                2
            }
        },
        Err(err) => {
            eprintln!("cgplan: {err:#}");
            let outcome = Outcome::new("error", 2, String::new());
            let _ = write_report(report_path.as_deref(), &command_line, &outcome, started);
            2
        }
    }
}

fn write_report(
    path: Option<&Path>,
    command_line: &str,
    outcome: &Outcome,
    started: Instant,
) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let report = RunReport {
        command: command_line.to_string(),
        input_sha256: outcome.input_sha256.clone(),
        verdict: outcome.verdict.to_string(),
        exit_code: outcome.exit,
        values: outcome.values.clone(),
        trace: outcome.trace.clone(),
        seed: outcome.seed,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write report {}", path.display()))
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Validate { game } => cmd_validate(&game),
        Command::Classify { game } => cmd_classify(&game),
        Command::Solve { game, objective, goal } => cmd_solve(&game, &objective, goal),
        Command::Oracle { game, objective } => cmd_oracle(&game, &objective),
        Command::Plan { game, objective, goal, trace, plan, max_iters } => {
            cmd_plan(&game, &objective, goal, trace, plan, max_iters)
        }
        Command::Abstract { game, partition, out } => cmd_abstract(&game, &partition, out),
        Command::Boolplan { system, trace } => cmd_boolplan(&system, trace),
        Command::Gen(gen) => cmd_gen(gen),
    }
}

fn read_input(path: &Path) -> Result<(String, String)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read input {}", path.display()))?;
    let digest = sha256_hex(text.as_bytes());
    Ok((text, digest))
}

fn load_game(path: &Path) -> Result<(Game, String)> {
    let (text, digest) = read_input(path)?;
    let game = parse_game::<f64>(&text)
        .with_context(|| format!("{} is not a usable game", path.display()))?;
    Ok((game, digest))
}

fn resolve_objective(args: &ObjectiveArgs) -> Result<Objective<f64>> {
    match args.objective {
        ObjectiveKind::Discounted => {
            let beta =
                args.beta.ok_or_else(|| anyhow!("the discounted objective needs --beta"))?;
            Ok(Objective::discounted(beta)?)
        }
        ObjectiveKind::Average => {
            if args.beta.is_some() {
                bail!("--beta applies only to the discounted objective");
            }
            Ok(Objective::Average)
        }
    }
}

/// Nine digits after the point, matching the golden outputs in the
/// test suites.
fn nine(x: f64) -> String {
    format!("{x:.9}")
}

fn cmd_validate(path: &Path) -> Result<Outcome> {
    let (text, digest) = read_input(path)?;
    match parse_game::<f64>(&text) {
        Ok(game) => {
            println!("VALID");
            let mut outcome = Outcome::new("valid", 0, digest);
            outcome.values.insert("states".into(), game.num_states() as f64);
            Ok(outcome)
        }
        // Text that is not JSON at all is an input problem, not a
        // verdict about a game.
        Err(ParseError::Json(err)) => {
            Err(anyhow!(err).context(format!("{} is not JSON", path.display())))
        }
        Err(ParseError::Invalid(violations)) => {
            for violation in &violations {
                println!("INVALID: {violation}");
            }
            let mut outcome = Outcome::new("invalid", 1, digest);
            outcome.values.insert("violations".into(), violations.len() as f64);
            Ok(outcome)
        }
        Err(other) => {
            println!("INVALID: {other}");
            let mut outcome = Outcome::new("invalid", 1, digest);
            outcome.values.insert("violations".into(), 1.0);
            Ok(outcome)
        }
    }
}

fn cmd_classify(path: &Path) -> Result<Outcome> {
    let (game, digest) = load_game(path)?;
    println!("{}", game.classify());
    let mut outcome = Outcome::new("classified", 0, digest);
    outcome.values.insert("states".into(), game.num_states() as f64);
    Ok(outcome)
}

fn cmd_solve(path: &Path, objective: &ObjectiveArgs, goal: Option<f64>) -> Result<Outcome> {
    let (game, digest) = load_game(path)?;
    let objective = resolve_objective(objective)?;
    match goal {
        None => {
            let solution = game_values(&game, objective)?;
            print_values(&game, |v| solution.val1.get(v));
            print_strategy(&game, "choice1", &solution.opt1.choice);
            print_strategy(&game, "choice2", &solution.opt2.choice);
            let mut outcome = Outcome::new("solved", 0, digest);
            record_values(&mut outcome, &game, |v| solution.val1.get(v));
            Ok(outcome)
        }
        Some(p) => {
            let solved = game_solve(&game, objective, p)?;
            print_values(&game, |v| solved.val1.get(v));
            print_strategy(&game, "choice1", &solved.opt1.choice);
            print_strategy(&game, "choice2", &solved.opt2.choice);
            println!("winner {}", solved.winner.index());
            if solved.boundary {
                println!("boundary: the value meets the goal within tolerance");
            }
            let (verdict, exit) = match solved.winner {
                Player::One => ("feasible", 0),
                Player::Two => ("infeasible", 1),
            };
            let mut outcome = Outcome::new(verdict, exit, digest);
            record_values(&mut outcome, &game, |v| solved.val1.get(v));
            outcome.values.insert("goal".into(), p);
            Ok(outcome)
        }
    }
}

fn cmd_oracle(path: &Path, objective: &ObjectiveArgs) -> Result<Outcome> {
    let (game, digest) = load_game(path)?;
    let objective = resolve_objective(objective)?;
    let values = brute_force_values(&game, objective)?;
    print_values(&game, |v| values.get(v));
    let mut outcome = Outcome::new("solved", 0, digest);
    record_values(&mut outcome, &game, |v| values.get(v));
    Ok(outcome)
}

fn print_values(game: &Game, value: impl Fn(usize) -> f64) {
    println!("val1({}) = {}", game.name(game.initial()), nine(value(game.initial())));
    for v in 0..game.num_states() {
        println!("value {} {}", game.name(v), nine(value(v)));
    }
}

fn print_strategy(game: &Game, label: &str, choice: &BTreeMap<usize, usize>) {
    for (&from, &to) in choice {
        println!("{label} {} {}", game.name(from), game.name(to));
    }
}

fn record_values(outcome: &mut Outcome, game: &Game, value: impl Fn(usize) -> f64) {
    outcome.values.insert("val1_initial".into(), value(game.initial()));
    for v in 0..game.num_states() {
        outcome.values.insert(format!("val1({})", game.name(v)), value(v));
    }
}

fn cmd_plan(
    path: &Path,
    objective: &ObjectiveArgs,
    goal: f64,
    trace: Option<PathBuf>,
    plan: Option<PathBuf>,
    max_iters: Option<usize>,
) -> Result<Outcome> {
    let (game, digest) = load_game(path)?;
    let objective = resolve_objective(objective)?;
    let cap = max_iters.unwrap_or(usize::MAX);
    let run = counterexample_guided_plan_capped(&game, objective, goal, cap)
        .with_context(|| format!("planning failed on {}", path.display()))?;

    let trace_name = match &trace {
        Some(trace_path) => {
            write_game_trace(trace_path, &game, &run.trace, run.feasible())?;
            Some(trace_path.display().to_string())
        }
        None => None,
    };

    let plan_path = plan.unwrap_or_else(|| path.with_extension("plan.json"));
    let (verdict, exit, certified, strategy) = match &run.verdict {
        PlanVerdict::Feasible { plan, certified_value } => {
            ("feasible", 0, *certified_value, plan)
        }
        PlanVerdict::Infeasible { spoiler, certified_value, .. } => {
            ("infeasible", 1, *certified_value, spoiler)
        }
    };
    fs::write(&plan_path, serialize_strategy(&game, strategy))
        .with_context(|| format!("cannot write plan {}", plan_path.display()))?;

    println!(
        "{} certified={} goal={} refinements={}",
        verdict.to_uppercase(),
        nine(certified),
        nine(goal),
        run.refinements(),
    );
    println!("plan written to {}", plan_path.display());

    let mut outcome = Outcome::new(verdict, exit, digest);
    outcome.values.insert("goal".into(), goal);
    outcome.values.insert("certified_value".into(), certified);
    outcome.values.insert("refinements".into(), run.refinements() as f64);
    outcome.trace = trace_name;
    Ok(outcome)
}

/// One JSON line per solve-refine iteration. A line with a split
/// records a spurious abstract counterexample; the last line carries
/// the verdict.
fn write_game_trace(
    path: &Path,
    game: &Game,
    records: &[IterationRecord<f64>],
    feasible: bool,
) -> Result<()> {
    let names = |states: &[usize]| -> Vec<String> {
        states.iter().map(|&v| game.name(v).to_string()).collect()
    };
    let mut text = String::new();
    for record in records {
        let status = match &record.split {
            Some(_) => "SPURIOUS",
            None if feasible => "FEASIBLE",
            None => "INFEASIBLE",
        };
        let split = record.split.as_ref().map(|event| {
            serde_json::json!({
                "operator": event.operator.to_string(),
                "block": names(&event.block_members),
                "subset": names(&event.subset),
            })
        });
        let line = serde_json::json!({
            "iteration": record.iteration,
            "abstract_states": record.abstract_states,
            "winner": record.winner.index(),
            "abstract_val1_initial": record.abstract_val1_initial,
            "status": status,
            "split": split,
        });
        text.push_str(&line.to_string());
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write trace {}", path.display()))
}

fn cmd_abstract(path: &Path, partition: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let (game, digest) = load_game(path)?;
    let (partition_text, _) = read_input(partition)?;
    let blocks = parse_partition_blocks(&partition_text, &game)
        .with_context(|| format!("{} is not a usable partition", partition.display()))?;
    let partition = StatePartition::new(&game, blocks)?;
    let abstraction = build_abstraction(&game, partition)?;
    let text = serialize_abstraction(&game, &abstraction);
    match &out {
        Some(out_path) => fs::write(out_path, text)
            .with_context(|| format!("cannot write abstraction {}", out_path.display()))?,
        None => print!("{text}"),
    }
    let mut outcome = Outcome::new("abstracted", 0, digest);
    outcome.values.insert("abstract_states".into(), abstraction.game.num_states() as f64);
    outcome.values.insert("repairs".into(), abstraction.repairs.len() as f64);
    Ok(outcome)
}

fn cmd_boolplan(path: &Path, trace: Option<PathBuf>) -> Result<Outcome> {
    let (text, digest) = read_input(path)?;
    let system = parse_boolean_system(&text)
        .with_context(|| format!("{} is not a usable system", path.display()))?;
    let run = boolean_cegar_plan(&system)?;

    let trace_name = match &trace {
        Some(trace_path) => {
            write_bool_trace(trace_path, &run.iterations, run.feasible())?;
            Some(trace_path.display().to_string())
        }
        None => None,
    };

    let mut outcome = match &run.verdict {
        Verdict::Feasible { plan, .. } => {
            println!("FEASIBLE steps={}", plan.len());
            println!("plan: {}", plan.join(" "));
            let mut outcome = Outcome::new("feasible", 0, digest);
            outcome.values.insert("steps".into(), plan.len() as f64);
            outcome
        }
        Verdict::Infeasible => {
            println!("INFEASIBLE");
            Outcome::new("unreachable", 1, digest)
        }
    };
    outcome.values.insert("iterations".into(), run.iterations.len() as f64);
    outcome.trace = trace_name;
    Ok(outcome)
}

/// One JSON line per projection round, mirroring the game trace shape.
fn write_bool_trace(path: &Path, rounds: &[PlanIteration], feasible: bool) -> Result<()> {
    let mut text = String::new();
    for round in rounds {
        let status = if !round.added.is_empty() {
            "SPURIOUS"
        } else if feasible {
            "FEASIBLE"
        } else {
            "INFEASIBLE"
        };
        let line = serde_json::json!({
            "iteration": round.iteration,
            "projection": round.projection,
            "abstract_plan": round.abstract_plan,
            "added": round.added,
            "status": status,
        });
        text.push_str(&line.to_string());
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write trace {}", path.display()))
}

fn cmd_gen(command: GenCommand) -> Result<Outcome> {
    let (game, parameter_line, seed, out) = match command {
        GenCommand::Random {
            states,
            out_degree,
            p1_frac,
            p2_frac,
            reward_min,
            reward_max,
            seed,
            out,
        } => {
            let game =
                gen_random_game(states, out_degree, p1_frac, p2_frac, (reward_min, reward_max), seed)?;
            let line = format!(
                "gen random states={states} out-degree={out_degree} p1-frac={p1_frac} \
                 p2-frac={p2_frac} reward=[{reward_min},{reward_max}] seed={seed}"
            );
            (game, line, seed, out)
        }
        GenCommand::Gridworld { width, height, slip, adversary, seed, out } => {
            let game = gen_gridworld(width, height, slip, adversary, seed)?;
            let line = format!(
                "gen gridworld width={width} height={height} slip={slip} \
                 adversary={adversary} seed={seed}"
            );
            (game, line, seed, out)
        }
    };
    let text = serialize_game(&game);
    match &out {
        Some(out_path) => fs::write(out_path, text)
            .with_context(|| format!("cannot write game {}", out_path.display()))?,
        None => print!("{text}"),
    }
    let mut outcome = Outcome::new("generated", 0, sha256_hex(parameter_line.as_bytes()));
    outcome.values.insert("states".into(), game.num_states() as f64);
    outcome.seed = Some(seed);
    Ok(outcome)
}
