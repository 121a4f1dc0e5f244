//! Scripted agents and the observation/action contract they share with the
//! harness.
//!
//! Each archetype reproduces one failure mode deterministically from its
//! seed. In text mode an agent writes a single answer; in agentic mode it
//! drives a simulator session through tool calls.

mod scripts;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::puzzle::{format_move, format_trace, parse_trace, Move, PuzzleInstance, PuzzleKind, Trace};
use crate::solvers::{reference_solution, solve_bfs, SolveOutcome};

pub use scripts::IMPOSSIBLE;

/// Instances with more estimated states than this are planned heuristically.
pub const SEARCH_STATE_LIMIT: f64 = 100_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "archetype", rename_all = "snake_case")]
pub enum Archetype {
    Perfect,
    Noisy { p: f64 },
    Truncating { token_budget: u64, tokens_per_move: f64 },
    Forgetful { window_moves: usize },
    GiveUp { move_threshold: u64 },
    Fixated,
    SelfCorrecting,
}

impl Archetype {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Archetype::Noisy { p } if !(p > 0.0 && p <= 1.0) => {
                Err(Error::invalid(format!("noisy p must be in (0, 1], got {p}")))
            }
            Archetype::Truncating { token_budget, tokens_per_move } => {
                if token_budget < 1 {
                    return Err(Error::invalid("truncating token budget must be at least 1"));
                }
                if !(tokens_per_move > 0.0 && tokens_per_move.is_finite()) {
                    return Err(Error::invalid("tokens per move must be positive"));
                }
                Ok(())
            }
            Archetype::Forgetful { window_moves: 0 } => Err(Error::invalid("forgetful window must be at least 1")),
            Archetype::GiveUp { move_threshold: 0 } => Err(Error::invalid("give-up threshold must be at least 1")),
            _ => Ok(()),
        }
    }
}

/// `perfect`, `noisy:0.999`, `truncating:64000:8`, `forgetful:10`,
/// `giveup:100`, `fixated`, `selfcorrecting`.
impl FromStr for Archetype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase().replace(['-', '_'], "");
        let args: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> {
            args.get(i)
                .ok_or_else(|| Error::invalid(format!("agent `{s}` is missing parameter {}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| Error::invalid(format!("agent `{s}`: {e}")))
        };
        let int = |i: usize| -> Result<u64> {
            let v = num(i)?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(Error::invalid(format!("agent `{s}`: parameter {} must be a whole number", i + 1)));
            }
            Ok(v as u64)
        };
        let (archetype, arity) = match name.as_str() {
            "perfect" => (Archetype::Perfect, 0),
            "noisy" => (Archetype::Noisy { p: num(0)? }, 1),
            "truncating" => (
                Archetype::Truncating {
                    token_budget: int(0)?,
                    tokens_per_move: if args.len() > 1 { num(1)? } else { 8.0 },
                },
                2,
            ),
            "forgetful" => (Archetype::Forgetful { window_moves: int(0)? as usize }, 1),
            "giveup" => (Archetype::GiveUp { move_threshold: int(0)? }, 1),
            "fixated" => (Archetype::Fixated, 0),
            "selfcorrecting" => (Archetype::SelfCorrecting, 0),
            _ => return Err(Error::invalid(format!("unknown agent `{s}`"))),
        };
        if args.len() > arity {
            return Err(Error::invalid(format!("agent `{s}` takes at most {arity} parameters")));
        }
        archetype.validate()?;
        Ok(archetype)
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Archetype::Perfect => f.write_str("perfect"),
            Archetype::Noisy { p } => write!(f, "noisy:{p}"),
            Archetype::Truncating { token_budget, tokens_per_move } => {
                write!(f, "truncating:{token_budget}:{tokens_per_move}")
            }
            Archetype::Forgetful { window_moves } => write!(f, "forgetful:{window_moves}"),
            Archetype::GiveUp { move_threshold } => write!(f, "giveup:{move_threshold}"),
            Archetype::Fixated => f.write_str("fixated"),
            Archetype::SelfCorrecting => f.write_str("selfcorrecting"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    #[serde(flatten)]
    pub archetype: Archetype,
    pub seed: u64,
}

impl AgentConfig {
    pub fn new(archetype: Archetype, seed: u64) -> Self {
        AgentConfig { archetype, seed }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Text,
    Agentic,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Text => "text",
            Mode::Agentic => "agentic",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Mode::Text),
            "agentic" => Ok(Mode::Agentic),
            _ => Err(Error::invalid(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Remaining {
    pub tokens: u64,
    pub tool_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Observation {
    Task { instance: PuzzleInstance, mode: Mode, session_id: Option<String>, remaining: Remaining },
    /// `response` is the full protocol response object (`result` or `error`).
    ToolResult { method: String, response: Value, remaining: Remaining },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AgentAction {
    ToolCall { method: String, params: Value },
    FinalAnswer { text: String },
    Resign { claim: String },
}

impl AgentAction {
    pub fn is_terminal(&self) -> bool {
        !matches!(self, AgentAction::ToolCall { .. })
    }
}

/// Text that counts as a resignation rather than an attempted answer.
pub fn is_resignation(text: &str) -> bool {
    text.trim_start().starts_with(IMPOSSIBLE)
}

/// Token estimate for an emitted payload: `moves * tokens_per_move` when it
/// parses as a trace, otherwise one token per four characters.
pub fn estimate_tokens(kind: PuzzleKind, text: &str, tokens_per_move: f64) -> u64 {
    match parse_trace(kind, text) {
        Ok(trace) => (trace.len() as f64 * tokens_per_move).ceil() as u64,
        Err(_) => (text.chars().count() as u64).div_ceil(4),
    }
}

/// Cuts `text` so that it fits `budget` tokens.
///
/// Traces keep the first `floor(budget / tokens_per_move)` moves and lose
/// the closing bracket; other text keeps `4 * budget` characters. Returns
/// the text unchanged when it already fits.
pub fn truncate_answer(kind: PuzzleKind, text: &str, budget: u64, tokens_per_move: f64) -> String {
    if estimate_tokens(kind, text, tokens_per_move) <= budget {
        return text.to_string();
    }
    match parse_trace(kind, text) {
        Ok(trace) => {
            let keep = (budget as f64 / tokens_per_move).floor() as usize;
            truncated_trace(&trace.moves[..keep.min(trace.len())])
        }
        Err(_) => text.chars().take((budget as usize).saturating_mul(4)).collect(),
    }
}

fn truncated_trace(moves: &[Move]) -> String {
    let body: Vec<String> = moves.iter().map(format_move).collect();
    format!("[{}", body.join(","))
}

fn reference_moves(instance: &PuzzleInstance) -> std::result::Result<Vec<Move>, String> {
    match reference_solution(instance) {
        SolveOutcome::Solution { trace, .. } => Ok(trace.moves),
        SolveOutcome::Unsolvable { .. } => Err(scripts::resignation(instance, "exhaustive search")),
        SolveOutcome::LimitExceeded { .. } => Err("UNKNOWN: instance is beyond my solving limits.".to_string()),
    }
}

fn render(kind: PuzzleKind, moves: Vec<Move>) -> String {
    format_trace(&Trace::new(kind, moves))
}

/// Where an agentic episode stands.
#[derive(Debug)]
struct Run {
    kind: PuzzleKind,
    instance: PuzzleInstance,
    session: Option<String>,
    plan: Vec<Move>,
    next: usize,
}

/// One scripted agent. Behaviour depends only on the config, its seed and
/// the observations received.
#[derive(Debug)]
pub struct Agent {
    config: AgentConfig,
    rng: ChaCha8Rng,
    run: Option<Run>,
    revisions: u32,
}

pub fn make_agent(config: AgentConfig) -> Result<Agent> {
    config.archetype.validate()?;
    Ok(Agent { rng: ChaCha8Rng::seed_from_u64(config.seed), config, run: None, revisions: 0 })
}

impl Agent {
    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    /// Strategy switches made so far in agentic mode.
    pub fn revisions(&self) -> u32 {
        self.revisions
    }

    /// One-shot answer with no tool access.
    pub fn text_answer(&mut self, instance: &PuzzleInstance, token_budget: u64) -> String {
        let kind = instance.kind();
        match self.config.archetype.clone() {
            Archetype::Perfect => reference_moves(instance).map_or_else(|e| e, |m| render(kind, m)),
            Archetype::Noisy { p } => match reference_moves(instance) {
                Ok(moves) => render(kind, scripts::noisy_moves(instance, &moves, p, &mut self.rng)),
                Err(e) => e,
            },
            Archetype::Truncating { token_budget: own, tokens_per_move } => match reference_moves(instance) {
                Ok(moves) => {
                    truncate_answer(kind, &render(kind, moves), own.min(token_budget), tokens_per_move)
                }
                Err(e) => e,
            },
            Archetype::Forgetful { window_moves } => match reference_moves(instance) {
                Ok(moves) if !moves.is_empty() => {
                    render(kind, scripts::forgetful_moves(instance, &moves, window_moves))
                }
                Ok(moves) => render(kind, moves),
                Err(e) => e,
            },
            Archetype::GiveUp { move_threshold } => match reference_moves(instance) {
                Ok(moves) => {
                    let load = moves.len() as u64 * scripts::state_size(instance);
                    if load > move_threshold {
                        scripts::resignation(instance, "no consistent sequence of moves could be found")
                    } else {
                        render(kind, moves)
                    }
                }
                Err(e) => e,
            },
            Archetype::Fixated | Archetype::SelfCorrecting => render(kind, scripts::heuristic_plan(instance)),
        }
    }

    /// Next step of an agentic episode.
    pub fn next_action(&mut self, observation: &Observation) -> AgentAction {
        match observation {
            Observation::Task { instance, session_id, remaining, .. } => self.start(instance, session_id, *remaining),
            Observation::ToolResult { method, response, .. } => self.on_result(method, response),
            Observation::BudgetExhausted => self.finish(),
        }
    }

    fn start(&mut self, instance: &PuzzleInstance, session: &Option<String>, remaining: Remaining) -> AgentAction {
        let kind = instance.kind();
        let planner = matches!(self.config.archetype, Archetype::Fixated | Archetype::SelfCorrecting);
        if !planner {
            let text = self.text_answer(instance, remaining.tokens);
            return terminal(text);
        }
        let plan = if scripts::state_space_estimate(instance) <= SEARCH_STATE_LIMIT {
            match solve_bfs(instance, SEARCH_STATE_LIMIT as usize * 2) {
                SolveOutcome::Solution { trace, .. } => trace.moves,
                SolveOutcome::Unsolvable { .. } => {
                    return AgentAction::Resign { claim: scripts::resignation(instance, "exhaustive search") };
                }
                SolveOutcome::LimitExceeded { .. } => scripts::heuristic_plan(instance),
            }
        } else {
            scripts::heuristic_plan(instance)
        };
        self.run = Some(Run { kind, instance: instance.clone(), session: session.clone(), plan, next: 0 });
        self.step()
    }

    fn step(&mut self) -> AgentAction {
        let Some(run) = self.run.as_ref() else {
            return AgentAction::Resign { claim: "no task received".to_string() };
        };
        match (&run.session, run.plan.get(run.next)) {
            (Some(session), Some(mv)) => {
                let mv: Value = serde_json::from_str(&format_move(mv)).expect("moves format as JSON");
                AgentAction::ToolCall { method: "apply".to_string(), params: json!({"session_id": session, "move": mv}) }
            }
            _ => self.finish(),
        }
    }

    fn finish(&mut self) -> AgentAction {
        match self.run.as_ref() {
            Some(run) => AgentAction::FinalAnswer { text: render(run.kind, run.plan.clone()) },
            None => AgentAction::Resign { claim: "no task received".to_string() },
        }
    }

    /// Fixated commits to its answer; SelfCorrecting gets one chance to reset
    /// and switch to a verified strategy.
    fn on_failure(&mut self) -> AgentAction {
        let can_revise = self.config.archetype == Archetype::SelfCorrecting && self.revisions == 0;
        match self.run.as_ref() {
            Some(Run { session: Some(session), .. }) if can_revise => AgentAction::ToolCall {
                method: "reset".to_string(),
                params: json!({"session_id": session}),
            },
            _ => self.finish(),
        }
    }

    fn on_result(&mut self, method: &str, response: &Value) -> AgentAction {
        let error_code = response.pointer("/error/code").and_then(Value::as_str);
        match (method, error_code) {
            (_, Some("BUDGET")) => self.finish(),
            ("apply", Some(_)) => self.on_failure(),
            ("apply", None) => {
                let solved = response.pointer("/result/solved").and_then(Value::as_bool).unwrap_or(false);
                let Some(run) = self.run.as_mut() else { return self.finish() };
                run.next += 1;
                if run.next < run.plan.len() {
                    self.step()
                } else if solved {
                    self.finish()
                } else {
                    self.on_failure()
                }
            }
            ("reset", None) => {
                let Some(run) = self.run.as_mut() else { return self.finish() };
                match scripts::revised_plan(&run.instance) {
                    SolveOutcome::Solution { trace, .. } => {
                        run.plan = trace.moves;
                        run.next = 0;
                        self.revisions += 1;
                        self.step()
                    }
                    SolveOutcome::Unsolvable { .. } => AgentAction::Resign {
                        claim: scripts::resignation(&run.instance, "verified search"),
                    },
                    SolveOutcome::LimitExceeded { .. } => self.finish(),
                }
            }
            _ => self.finish(),
        }
    }
}

fn terminal(text: String) -> AgentAction {
    if is_resignation(&text) {
        AgentAction::Resign { claim: text }
    } else {
        AgentAction::FinalAnswer { text }
    }
}
