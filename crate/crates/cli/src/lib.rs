//! `gapbench` command-line front end.
//!
//! Data goes to stdout, diagnostics and timings to stderr. Exit codes: 0 on
//! success, 1 for a negative domain answer (unsolved trace, unsolvable
//! instance, replay mismatch), 2 for usage or configuration errors.

use std::io::{BufRead, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gapbench_core::adjudicator::adjudicate_text;
use gapbench_core::agents::{AgentConfig, Archetype, Mode};
use gapbench_core::analytics::{emit_model_curves, FailureModel, DEFAULT_P_LIST};
use gapbench_core::harness::{
    compare_to_model, comparison_csv, load_episodes, persist_episodes, replay_verdict, run_sweep, Budgets, SweepSpec,
};
use gapbench_core::puzzle::{format_trace, BlocksSource, PuzzleInstance, PuzzleKind};
use gapbench_core::solvers::{
    reference_solution, solve_blocks, solve_bfs, solve_river_constructive, BlocksStrategy, SolveOutcome,
};
use gapbench_core::tool_server::{serve_stream, ServerConfig, SessionTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gapbench", version, about = "Adjudicated puzzle benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a solution trace for one instance.
    Solve(SolveArgs),
    /// Adjudicate a trace file against an instance.
    Validate(ValidateArgs),
    /// Run scripted agents over a range of sizes and write a report.
    Sweep(SweepArgs),
    /// Emit the token-cost and cumulative-error curve table.
    Model(ModelArgs),
    /// Serve the tool protocol.
    Serve(ServeArgs),
    /// Re-adjudicate stored episodes and compare verdicts.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: PuzzleKind,
    #[arg(long)]
    n: u32,
    /// Boat capacity (river only).
    #[arg(long)]
    k: Option<u32>,
    /// Seed for generated Blocks instances.
    #[arg(long, env = "GAPBENCH_SEED", default_value_t = 0)]
    seed: u64,
}

impl InstanceArgs {
    fn build(&self) -> Result<PuzzleInstance, String> {
        let blocks = (self.kind == PuzzleKind::Blocks).then_some(BlocksSource::Seed(self.seed));
        PuzzleInstance::new(self.kind, self.n, self.k, blocks).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Strategy {
    /// Closed form where one exists, otherwise the reference solver.
    Auto,
    /// Exhaustive breadth-first search.
    Bfs,
    /// Couples-in-pairs schedule for river.
    Constructive,
    /// Exact search for blocks.
    Exact,
    /// Greedy unstack-and-build for blocks.
    Heuristic,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = Strategy::Auto)]
    strategy: Strategy,
    /// State limit for breadth-first search.
    #[arg(long, default_value_t = 10_000_000)]
    max_states: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// File holding the trace; `-` reads standard input.
    #[arg(long)]
    trace_file: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Agent spec such as `noisy:0.999` or `truncating:64000:8`; repeatable.
    #[arg(long = "agent", required = true, value_parser = parse_archetype)]
    agents: Vec<Archetype>,
    #[arg(long, value_parser = parse_kind)]
    kind: PuzzleKind,
    #[arg(long, value_parser = parse_range)]
    n_range: RangeInclusive<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = gapbench_core::harness::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, value_parser = parse_mode, default_value = "text")]
    mode: Mode,
    #[arg(long, env = "GAPBENCH_SEED", default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every available core.
    #[arg(long, env = "GAPBENCH_WORKERS", default_value_t = 0)]
    workers: usize,
    #[arg(long, env = "GAPBENCH_OUT_DIR", default_value = "gapbench-out")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 64_000)]
    token_budget: u64,
    #[arg(long, default_value_t = 8.0)]
    tokens_per_move: f64,
    #[arg(long, default_value_t = 200)]
    tool_calls: u64,
    /// Charge tool responses against the agentic token budget.
    #[arg(long)]
    count_tool_responses: bool,
    /// Also compare Hanoi accuracy with p^m at this per-move fidelity.
    #[arg(long)]
    compare_p: Option<f64>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 64_000)]
    budget: u64,
    #[arg(long, default_value_t = 8.0)]
    tokens_per_move: f64,
    /// Comma-separated per-move fidelities.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_P_LIST)]
    p_list: Vec<f64>,
    #[arg(long, value_parser = parse_range, default_value = "1..20")]
    n_range: RangeInclusive<u32>,
    /// Tokens reserved for reasoning before the answer starts.
    #[arg(long, default_value_t = 0)]
    overhead: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Transport {
    Stdio,
    Tcp,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, value_enum, default_value_t = Transport::Stdio)]
    transport: Transport,
    #[arg(long, default_value = "127.0.0.1:7878")]
    addr: String,
    #[arg(long, default_value_t = gapbench_core::tool_server::DEFAULT_TOOL_CALL_BUDGET)]
    tool_calls: u64,
    #[arg(long, default_value_t = gapbench_core::tool_server::DEFAULT_SCRATCHPAD_CAP)]
    scratchpad_cap: usize,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    #[arg(long)]
    episodes: PathBuf,
}

fn parse_kind(s: &str) -> Result<PuzzleKind, String> {
    s.parse().map_err(|e: gapbench_core::Error| e.to_string())
}

fn parse_archetype(s: &str) -> Result<Archetype, String> {
    s.parse().map_err(|e: gapbench_core::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: gapbench_core::Error| e.to_string())
}

/// Parses `a..b` (inclusive) or a single size `a`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad size `{t}` in range `{s}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            (v, v)
        }
    };
    if lo == 0 || lo > hi {
        return Err(format!("range `{s}` must satisfy 1 <= start <= end"));
    }
    Ok(lo..=hi)
}

/// Runs the CLI with explicit streams and returns the process exit code.
pub fn run_cli<I, T>(argv: I, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => solve(a, stdout),
        Command::Validate(a) => validate(a, stdin, stdout),
        Command::Sweep(a) => sweep(a, stdout, stderr),
        Command::Model(a) => model(a, stdout),
        Command::Serve(a) => serve(a, stdin, stdout, stderr),
        Command::Replay(a) => replay(a, stdout),
    };
    let _ = stdout.flush();
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

type CmdResult = Result<i32, String>;

fn io_err(e: std::io::Error) -> String {
    e.to_string()
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> CmdResult {
    let instance = a.instance.build()?;
    let outcome = match (a.strategy, instance.kind()) {
        (Strategy::Auto, _) => reference_solution(&instance),
        (Strategy::Bfs, _) => solve_bfs(&instance, a.max_states),
        (Strategy::Constructive, PuzzleKind::River) => {
            solve_river_constructive(instance.n(), instance.k().unwrap_or(0)).map_err(|e| e.to_string())?
        }
        (Strategy::Exact, PuzzleKind::Blocks) => {
            solve_blocks(&instance, BlocksStrategy::Exact).map_err(|e| e.to_string())?
        }
        (Strategy::Heuristic, PuzzleKind::Blocks) => {
            solve_blocks(&instance, BlocksStrategy::Heuristic).map_err(|e| e.to_string())?
        }
        (s, kind) => return Err(format!("strategy {s:?} does not apply to {kind}")),
    };
    match outcome {
        SolveOutcome::Solution { trace, .. } => {
            writeln!(out, "{}", format_trace(&trace)).map_err(io_err)?;
            Ok(EXIT_OK)
        }
        SolveOutcome::Unsolvable { states_explored } => {
            writeln!(out, "UNSOLVABLE (states_explored={states_explored})").map_err(io_err)?;
            Ok(EXIT_NEGATIVE)
        }
        SolveOutcome::LimitExceeded { states_explored } => {
            writeln!(out, "LIMIT_EXCEEDED (states_explored={states_explored})").map_err(io_err)?;
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn read_input(path: &Path, stdin: &mut dyn BufRead) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        stdin.read_to_string(&mut text).map_err(io_err)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn validate(a: ValidateArgs, stdin: &mut dyn BufRead, out: &mut dyn Write) -> CmdResult {
    let instance = a.instance.build()?;
    let text = read_input(&a.trace_file, stdin)?;
    let r = adjudicate_text(&instance, &text);
    let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
    writeln!(out, "status: {}", r.status).map_err(io_err)?;
    writeln!(out, "first_failure_index: {}", opt(r.first_failure_index.map(|i| i.to_string()))).map_err(io_err)?;
    writeln!(out, "failure_reason: {}", opt(r.failure_reason.map(|x| x.to_string()))).map_err(io_err)?;
    writeln!(out, "valid_prefix_len: {}", r.valid_prefix_len).map_err(io_err)?;
    writeln!(out, "moves_total: {}", r.moves_total).map_err(io_err)?;
    Ok(if r.is_solved() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let agents = a.agents.iter().enumerate().map(|(i, arch)| AgentConfig::new(arch.clone(), i as u64)).collect();
    let mut spec = SweepSpec::new(agents, a.kind, a.n_range.collect(), a.mode, a.seed);
    spec.k = a.k;
    spec.samples_per_cell = a.samples;
    spec.workers = a.workers;
    spec.budgets = Budgets {
        text_tokens: a.token_budget,
        agentic_tokens: a.token_budget,
        tool_calls: a.tool_calls,
        tokens_per_move: a.tokens_per_move,
        count_tool_responses: a.count_tool_responses,
        ..Budgets::default()
    };
    let start = Instant::now();
    let output = run_sweep(&spec).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&a.out_dir).map_err(|e| format!("{}: {e}", a.out_dir.display()))?;
    let csv = output.report.to_csv();
    std::fs::write(a.out_dir.join("report.csv"), &csv).map_err(io_err)?;
    let episodes = a.out_dir.join("episodes.jsonl");
    persist_episodes(&output.episodes, &episodes).map_err(|e| e.to_string())?;
    out.write_all(csv.as_bytes()).map_err(io_err)?;
    if let Some(p) = a.compare_p {
        let model = FailureModel::new(p, a.tokens_per_move, a.token_budget).map_err(|e| e.to_string())?;
        let rows = compare_to_model(&output.report, &model).map_err(|e| e.to_string())?;
        let table = comparison_csv(&rows);
        std::fs::write(a.out_dir.join("comparison.csv"), &table).map_err(io_err)?;
        out.write_all(table.as_bytes()).map_err(io_err)?;
    }
    let _ = writeln!(
        err,
        "{} episodes in {:.2?}; wrote {}",
        output.episodes.len(),
        start.elapsed(),
        a.out_dir.display()
    );
    Ok(EXIT_OK)
}

fn model(a: ModelArgs, out: &mut dyn Write) -> CmdResult {
    let p = *a.p_list.first().ok_or("p-list is empty")?;
    let mut model = FailureModel::new(p, a.tokens_per_move, a.budget).map_err(|e| e.to_string())?;
    model.overhead_tokens = a.overhead;
    let table = emit_model_curves(&model, a.n_range, &a.p_list).map_err(|e| e.to_string())?;
    out.write_all(table.to_csv().as_bytes()).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn serve(a: ServeArgs, stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let config = ServerConfig { tool_call_budget: a.tool_calls, scratchpad_cap: a.scratchpad_cap };
    match a.transport {
        Transport::Stdio => {
            let mut table = SessionTable::new(config);
            let handled = serve_stream(&mut table, stdin, out).map_err(io_err)?;
            let _ = writeln!(err, "handled {handled} requests");
        }
        Transport::Tcp => {
            let handle = gapbench_core::tool_server::serve_tcp(a.addr.as_str(), config).map_err(io_err)?;
            let _ = writeln!(err, "listening on {}", handle.local_addr());
            handle.wait();
        }
    }
    Ok(EXIT_OK)
}

fn replay(a: ReplayArgs, out: &mut dyn Write) -> CmdResult {
    let records = load_episodes(&a.episodes).map_err(|e| e.to_string())?;
    let mut mismatches = 0;
    for (i, record) in records.iter().enumerate() {
        let recomputed = replay_verdict(record).map_err(|e| e.to_string())?;
        let stored = record.adjudication();
        if recomputed != stored {
            mismatches += 1;
            writeln!(out, "line {}: stored {:?}, recomputed {:?}", i + 1, stored, recomputed).map_err(io_err)?;
        }
    }
    writeln!(out, "replayed {} episodes, {mismatches} mismatches", records.len()).map_err(io_err)?;
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_NEGATIVE })
}
