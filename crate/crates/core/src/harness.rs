//! Episode runner, seeded sweeps, episode logs and report aggregation.

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::adjudicator::{adjudicate_text, episode_metrics, scan_text_for_solutions, AdjudicationResult, Finding, Status};
use crate::agents::{
    estimate_tokens, is_resignation, make_agent, truncate_answer, AgentAction, AgentConfig, Mode, Observation,
    Remaining,
};
use crate::analytics::{bootstrap_ci, hanoi_moves, success_probability, FailureModel, DEFAULT_RESAMPLES};
use crate::error::{Error, Result};
use crate::puzzle::{BlocksConfig, IllegalReason, PuzzleInstance, PuzzleKind};
use crate::tool_server::{ServerConfig, SessionTable, DEFAULT_SCRATCHPAD_CAP};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SAMPLES: usize = 25;
pub const CONFIDENCE: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    pub text_tokens: u64,
    pub agentic_tokens: u64,
    pub tool_calls: u64,
    pub tokens_per_move: f64,
    pub scratchpad_cap: usize,
    /// Also charge tool responses against the agentic token budget.
    pub count_tool_responses: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            text_tokens: 64_000,
            agentic_tokens: 64_000,
            tool_calls: 200,
            tokens_per_move: 8.0,
            scratchpad_cap: DEFAULT_SCRATCHPAD_CAP,
            count_tool_responses: false,
        }
    }
}

impl Budgets {
    fn validate(&self) -> Result<()> {
        if self.text_tokens < 1 || self.agentic_tokens < 1 || self.tool_calls < 1 {
            return Err(Error::Config("budgets must be at least 1".into()));
        }
        if !(self.tokens_per_move > 0.0 && self.tokens_per_move.is_finite()) {
            return Err(Error::Config("tokens_per_move must be positive".into()));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` through splitmix64: `h = splitmix64(h ^ part)` from `h = 0`.
pub fn mix_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0, |h, &p| splitmix64(h ^ p))
}

/// Seed of one sweep cell sample: `mix_seed([sweep_seed, kind, n, sample])`
/// with kinds numbered hanoi 0, checker 1, river 2, blocks 3.
pub fn episode_seed(sweep_seed: u64, kind: PuzzleKind, n: u32, sample: u64) -> u64 {
    mix_seed(&[sweep_seed, kind.index(), n as u64, sample])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exchange {
    pub request: Value,
    pub response: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnswerOrTranscript {
    Answer(String),
    Transcript { transcript: Vec<Exchange>, final_text: String },
}

impl AnswerOrTranscript {
    pub fn final_text(&self) -> &str {
        match self {
            AnswerOrTranscript::Answer(text) => text,
            AnswerOrTranscript::Transcript { final_text, .. } => final_text,
        }
    }

    pub fn transcript(&self) -> &[Exchange] {
        match self {
            AnswerOrTranscript::Answer(_) => &[],
            AnswerOrTranscript::Transcript { transcript, .. } => transcript,
        }
    }
}

/// One line of `episodes.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub schema_version: u32,
    pub kind: PuzzleKind,
    pub n: u32,
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<BlocksConfig>,
    pub agent: AgentConfig,
    pub mode: Mode,
    pub seed: u64,
    #[serde(default)]
    pub sample: u64,
    pub answer_or_transcript: AnswerOrTranscript,
    pub tokens_used: u64,
    pub tool_calls_used: u64,
    pub status: Status,
    pub first_failure_index: Option<usize>,
    #[serde(default)]
    pub failure_reason: Option<IllegalReason>,
    pub valid_prefix_len: usize,
    pub moves_total: usize,
    #[serde(default)]
    pub resigned: bool,
    #[serde(default)]
    pub revisions: u32,
    #[serde(default)]
    pub aux_scan: Vec<Finding>,
    pub wall_time_ms: u64,
}

impl EpisodeRecord {
    pub fn instance(&self) -> Result<PuzzleInstance> {
        let repr = json!({"kind": self.kind, "n": self.n, "k": self.k, "seed": self.instance_seed, "blocks": self.blocks});
        serde_json::from_value(repr).map_err(|e| Error::Config(format!("record instance: {e}")))
    }

    pub fn adjudication(&self) -> AdjudicationResult {
        AdjudicationResult {
            status: self.status,
            first_failure_index: self.first_failure_index,
            failure_reason: self.failure_reason,
            valid_prefix_len: self.valid_prefix_len,
            moves_total: self.moves_total,
        }
    }

    /// `reset` calls in the tool transcript.
    pub fn reset_count(&self) -> usize {
        self.answer_or_transcript
            .transcript()
            .iter()
            .filter(|x| x.request.get("method").and_then(Value::as_str) == Some("reset"))
            .count()
    }

    /// The record with its timing zeroed, for byte-level comparisons.
    pub fn without_timing(&self) -> EpisodeRecord {
        EpisodeRecord { wall_time_ms: 0, ..self.clone() }
    }
}

#[cfg(not(target_arch = "wasm32"))]
fn timer() -> impl FnOnce() -> u64 {
    let start = std::time::Instant::now();
    move || start.elapsed().as_millis() as u64
}

#[cfg(target_arch = "wasm32")]
fn timer() -> impl FnOnce() -> u64 {
    || 0
}

/// Runs one agent on one instance. Agent failures are recorded in the
/// result, never returned as errors.
pub fn run_episode(
    agent_config: &AgentConfig,
    instance: &PuzzleInstance,
    mode: Mode,
    seed: u64,
    budgets: &Budgets,
) -> Result<EpisodeRecord> {
    budgets.validate()?;
    agent_config.archetype.validate().map_err(|e| Error::Config(e.to_string()))?;
    let elapsed = timer();
    let effective = AgentConfig::new(agent_config.archetype.clone(), mix_seed(&[agent_config.seed, seed]));
    let mut agent = make_agent(effective)?;
    let kind = instance.kind();
    let tpm = budgets.tokens_per_move;

    let (answer, tokens_used, tool_calls_used, resigned) = match mode {
        Mode::Text => {
            let raw = agent.text_answer(instance, budgets.text_tokens);
            let resigned = is_resignation(&raw);
            let cost = estimate_tokens(kind, &raw, tpm);
            let text = truncate_answer(kind, &raw, budgets.text_tokens, tpm);
            (AnswerOrTranscript::Answer(text), cost.min(budgets.text_tokens), 0, resigned)
        }
        Mode::Agentic => run_agentic(&mut agent, instance, budgets),
    };

    let final_text = answer.final_text();
    let result = if resigned { AdjudicationResult::parse_error() } else { adjudicate_text(instance, final_text) };
    let aux_scan = if mode == Mode::Text { scan_text_for_solutions(instance, final_text).findings } else { Vec::new() };
    Ok(EpisodeRecord {
        schema_version: SCHEMA_VERSION,
        kind,
        n: instance.n(),
        k: instance.k(),
        instance_seed: instance.seed(),
        blocks: instance.blocks_config().filter(|_| instance.seed().is_none()).cloned(),
        agent: agent_config.clone(),
        mode,
        seed,
        sample: 0,
        answer_or_transcript: answer,
        tokens_used,
        tool_calls_used,
        status: result.status,
        first_failure_index: result.first_failure_index,
        failure_reason: result.failure_reason,
        valid_prefix_len: result.valid_prefix_len,
        moves_total: result.moves_total,
        resigned,
        revisions: agent.revisions(),
        aux_scan,
        wall_time_ms: elapsed(),
    })
}

fn char_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

fn run_agentic(
    agent: &mut crate::agents::Agent,
    instance: &PuzzleInstance,
    budgets: &Budgets,
) -> (AnswerOrTranscript, u64, u64, bool) {
    let kind = instance.kind();
    let tpm = budgets.tokens_per_move;
    let mut table = SessionTable::new(ServerConfig {
        tool_call_budget: budgets.tool_calls,
        scratchpad_cap: budgets.scratchpad_cap,
    });
    let init = json!({"id": 0, "method": "init", "params": instance});
    let init_response = table.handle_request(&init);
    let session_id = init_response.pointer("/result/session_id").and_then(Value::as_str).map(str::to_string);
    let mut transcript = vec![Exchange { request: init, response: init_response }];

    let mut tokens = 0u64;
    let mut calls = 0u64;
    let remaining = |tokens: u64, calls: u64| Remaining {
        tokens: budgets.agentic_tokens.saturating_sub(tokens),
        tool_calls: budgets.tool_calls.saturating_sub(calls),
    };
    let mut observation =
        Observation::Task { instance: instance.clone(), mode: Mode::Agentic, session_id, remaining: remaining(0, 0) };

    loop {
        let exhausted = calls >= budgets.tool_calls || tokens >= budgets.agentic_tokens;
        if exhausted {
            observation = Observation::BudgetExhausted;
        }
        match agent.next_action(&observation) {
            AgentAction::ToolCall { method, params } => {
                if exhausted {
                    // Ignoring exhaustion ends the episode without an answer.
                    return (AnswerOrTranscript::Transcript { transcript, final_text: String::new() }, tokens, calls, false);
                }
                tokens += if method == "apply" { tpm.ceil() as u64 } else { char_tokens(&params.to_string()) };
                calls += 1;
                let request = json!({"id": calls, "method": method, "params": params});
                let response = table.handle_request(&request);
                if budgets.count_tool_responses {
                    tokens += char_tokens(&response.to_string());
                }
                transcript.push(Exchange { request, response: response.clone() });
                observation = Observation::ToolResult { method, response, remaining: remaining(tokens, calls) };
            }
            AgentAction::FinalAnswer { text } => {
                let left = budgets.agentic_tokens.saturating_sub(tokens);
                let cost = estimate_tokens(kind, &text, tpm);
                let text = truncate_answer(kind, &text, left, tpm);
                tokens += cost.min(left);
                return (AnswerOrTranscript::Transcript { transcript, final_text: text }, tokens, calls, false);
            }
            AgentAction::Resign { claim } => {
                tokens += char_tokens(&claim).min(budgets.agentic_tokens.saturating_sub(tokens));
                return (AnswerOrTranscript::Transcript { transcript, final_text: claim }, tokens, calls, true);
            }
        }
    }
}

/// Builds the instance a sweep cell uses; Blocks instances are drawn from
/// the episode seed.
pub fn sweep_instance(kind: PuzzleKind, n: u32, k: Option<u32>, seed: u64) -> Result<PuzzleInstance> {
    let built = match kind {
        PuzzleKind::Hanoi => PuzzleInstance::hanoi(n),
        PuzzleKind::Checker => PuzzleInstance::checker(n),
        PuzzleKind::River => {
            let k = k.ok_or_else(|| Error::Config("river sweeps need a boat capacity".into()))?;
            PuzzleInstance::river(n, k)
        }
        PuzzleKind::Blocks => PuzzleInstance::blocks_seeded(n, seed),
    };
    built.map_err(|e| Error::Config(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub agents: Vec<AgentConfig>,
    pub kind: PuzzleKind,
    pub n_values: Vec<u32>,
    pub k: Option<u32>,
    pub samples_per_cell: usize,
    pub mode: Mode,
    pub seed: u64,
    pub budgets: Budgets,
    /// Worker threads; 0 picks the available parallelism.
    pub workers: usize,
}

impl SweepSpec {
    pub fn new(agents: Vec<AgentConfig>, kind: PuzzleKind, n_values: Vec<u32>, mode: Mode, seed: u64) -> Self {
        SweepSpec {
            agents,
            kind,
            n_values,
            k: None,
            samples_per_cell: DEFAULT_SAMPLES,
            mode,
            seed,
            budgets: Budgets::default(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub agent: String,
    pub kind: PuzzleKind,
    pub n: u32,
    pub samples: usize,
    pub accuracy_mean: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub mean_tokens: f64,
    pub mean_valid_prefix_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: Mode,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "agent,kind,n,samples,accuracy_mean,ci_lower,ci_upper,mean_tokens,mean_valid_prefix_fraction\n",
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                r.agent,
                r.kind,
                r.n,
                r.samples,
                r.accuracy_mean,
                r.ci_lower,
                r.ci_upper,
                r.mean_tokens,
                r.mean_valid_prefix_fraction
            )
            .unwrap();
        }
        out
    }

    pub fn row(&self, agent: &str, n: u32) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.agent == agent && r.n == n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub report: SweepReport,
    /// Sorted by (agent, n, sample).
    pub episodes: Vec<EpisodeRecord>,
}

struct Job {
    agent: usize,
    n: u32,
    sample: u64,
}

/// Runs every (agent, n, sample) episode and aggregates them per cell.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutput> {
    if spec.samples_per_cell < 1 {
        return Err(Error::Config("samples_per_cell must be at least 1".into()));
    }
    if spec.agents.is_empty() || spec.n_values.is_empty() {
        return Err(Error::Config("a sweep needs at least one agent and one n".into()));
    }
    spec.budgets.validate()?;
    for agent in &spec.agents {
        agent.archetype.validate().map_err(|e| Error::Config(e.to_string()))?;
    }
    for &n in &spec.n_values {
        sweep_instance(spec.kind, n, spec.k, 0)?;
    }

    let mut jobs = Vec::new();
    for agent in 0..spec.agents.len() {
        for &n in &spec.n_values {
            for sample in 0..spec.samples_per_cell as u64 {
                jobs.push(Job { agent, n, sample });
            }
        }
    }
    let run = |job: &Job| -> Result<(usize, EpisodeRecord)> {
        let seed = episode_seed(spec.seed, spec.kind, job.n, job.sample);
        let instance = sweep_instance(spec.kind, job.n, spec.k, seed)?;
        let mut record = run_episode(&spec.agents[job.agent], &instance, spec.mode, seed, &spec.budgets)?;
        record.sample = job.sample;
        Ok((job.agent, record))
    };
    let mut results = execute(&jobs, spec.workers, run)?;
    results.sort_by_key(|(agent, r)| (*agent, r.n, r.sample));

    let mut rows = Vec::new();
    for (agent_idx, agent) in spec.agents.iter().enumerate() {
        for &n in &spec.n_values {
            let cell: Vec<&EpisodeRecord> =
                results.iter().filter(|(a, r)| *a == agent_idx && r.n == n).map(|(_, r)| r).collect();
            rows.push(aggregate(&agent.archetype.to_string(), spec, n, agent_idx, &cell)?);
        }
    }
    Ok(SweepOutput {
        report: SweepReport { mode: spec.mode, seed: spec.seed, rows },
        episodes: results.into_iter().map(|(_, r)| r).collect(),
    })
}

fn aggregate(label: &str, spec: &SweepSpec, n: u32, agent_idx: usize, cell: &[&EpisodeRecord]) -> Result<ReportRow> {
    let count = cell.len() as f64;
    let metrics: Vec<_> = cell.iter().map(|r| episode_metrics(&r.adjudication())).collect();
    let accuracy: Vec<f64> = metrics.iter().map(|m| m.accuracy).collect();
    let mean = accuracy.iter().sum::<f64>() / count;
    let ci_seed = mix_seed(&[spec.seed, spec.kind.index(), n as u64, agent_idx as u64, u64::MAX]);
    let (ci_lower, ci_upper) = bootstrap_ci(&accuracy, DEFAULT_RESAMPLES, CONFIDENCE, ci_seed)?;
    Ok(ReportRow {
        agent: label.to_string(),
        kind: spec.kind,
        n,
        samples: cell.len(),
        accuracy_mean: mean,
        ci_lower,
        ci_upper,
        mean_tokens: cell.iter().map(|r| r.tokens_used as f64).sum::<f64>() / count,
        mean_valid_prefix_fraction: metrics.iter().map(|m| m.valid_prefix_fraction).sum::<f64>() / count,
    })
}

#[cfg(not(target_arch = "wasm32"))]
fn execute<T: Send>(jobs: &[Job], workers: usize, run: impl Fn(&Job) -> Result<T> + Sync) -> Result<Vec<T>> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    let workers = match workers {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        w => w,
    }
    .min(jobs.len().max(1));
    if workers == 1 {
        return jobs.iter().map(run).collect();
    }
    let next = AtomicUsize::new(0);
    let chunks: Vec<Result<Vec<T>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(job) = jobs.get(i) else { break };
                        done.push(run(job)?);
                    }
                    Ok(done)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut out = Vec::with_capacity(jobs.len());
    for chunk in chunks {
        out.extend(chunk?);
    }
    Ok(out)
}

#[cfg(target_arch = "wasm32")]
fn execute<T>(jobs: &[Job], _workers: usize, run: impl Fn(&Job) -> Result<T>) -> Result<Vec<T>> {
    jobs.iter().map(run).collect()
}

/// Appends `records` to `path`, one JSON object per line.
pub fn persist_episodes(records: &[EpisodeRecord], path: &Path) -> Result<usize> {
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| Error::Io(e.into()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(records.len())
}

/// Reads every record in `path`; blank lines are skipped and line numbers
/// in errors are 1-based.
pub fn load_episodes(path: &Path) -> Result<Vec<EpisodeRecord>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EpisodeRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Schema { line: i + 1, message: e.to_string() })?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema {
                line: i + 1,
                message: format!("unsupported schema_version {}", record.schema_version),
            });
        }
        records.push(record);
    }
    Ok(records)
}

/// Re-adjudicates a record's stored answer.
pub fn replay_verdict(record: &EpisodeRecord) -> Result<AdjudicationResult> {
    if record.resigned {
        return Ok(AdjudicationResult::parse_error());
    }
    Ok(adjudicate_text(&record.instance()?, record.answer_or_transcript.final_text()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub agent: String,
    pub n: u32,
    pub empirical: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub analytic: f64,
    pub deviation: f64,
    pub over_budget: bool,
    pub analytic_in_ci: bool,
}

/// Sets each Hanoi row against `p^(2^n - 1)` and the model's token budget.
pub fn compare_to_model(report: &SweepReport, model: &FailureModel) -> Result<Vec<ModelComparison>> {
    model.validate()?;
    report
        .rows
        .iter()
        .map(|row| {
            if row.kind != PuzzleKind::Hanoi {
                return Err(Error::KindMismatch { expected: PuzzleKind::Hanoi, found: row.kind });
            }
            let analytic = success_probability(model.p, hanoi_moves(row.n)?)?;
            Ok(ModelComparison {
                agent: row.agent.clone(),
                n: row.n,
                empirical: row.accuracy_mean,
                ci_lower: row.ci_lower,
                ci_upper: row.ci_upper,
                analytic,
                deviation: row.accuracy_mean - analytic,
                over_budget: model.over_budget(row.n),
                analytic_in_ci: row.ci_lower <= analytic && analytic <= row.ci_upper,
            })
        })
        .collect()
}

pub fn comparison_csv(rows: &[ModelComparison]) -> String {
    let mut out = String::from("agent,n,empirical,ci_lower,ci_upper,analytic,deviation,over_budget,analytic_in_ci\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            r.agent, r.n, r.empirical, r.ci_lower, r.ci_upper, r.analytic, r.deviation, r.over_budget, r.analytic_in_ci
        )
        .unwrap();
    }
    out
}
