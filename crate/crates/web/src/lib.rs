//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON or CSV string; failures come back as
//! `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use gapbench_core::adjudicator::{adjudicate, Status};
use gapbench_core::agents::{AgentConfig, Archetype, Mode};
use gapbench_core::analytics::{emit_model_curves, failure_horizon, FailureModel};
use gapbench_core::harness::{run_sweep, SweepSpec};
use gapbench_core::puzzle::{format_move, parse_trace, BlocksSource, PuzzleInstance, PuzzleKind};
use gapbench_core::solvers::reference_solution;

/// Longest trace the page will animate.
pub const MAX_STEPS: usize = 4096;

fn error(msg: impl ToString) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn instance(kind: &str, n: u32, k: u32, seed: u64) -> Result<PuzzleInstance, String> {
    let kind: PuzzleKind = kind.parse().map_err(|e: gapbench_core::Error| e.to_string())?;
    let k = (kind == PuzzleKind::River).then_some(k);
    let blocks = (kind == PuzzleKind::Blocks).then_some(BlocksSource::Seed(seed));
    PuzzleInstance::new(kind, n, k, blocks).map_err(|e| e.to_string())
}

/// Token cost and p^m for Hanoi sizes 1..=n_max, plus the cliff and horizons.
#[wasm_bindgen]
pub fn model_curves(budget: u64, tokens_per_move: f64, p_list: &str, n_max: u32) -> String {
    let ps: Result<Vec<f64>, _> = p_list.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let Ok(ps) = ps else { return error(format!("bad p list `{p_list}`")) };
    let Some(&first) = ps.first() else { return error("p list is empty") };
    let run = || -> gapbench_core::Result<Value> {
        let model = FailureModel::new(first, tokens_per_move, budget)?;
        let table = emit_model_curves(&model, 1..=n_max.max(1), &ps)?;
        let horizons = ps.iter().map(|&p| failure_horizon(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(json!({
            "cliff": model.cliff()?,
            "p_list": ps,
            "horizons": horizons,
            "rows": table.rows,
        }))
    };
    run().map(|v| v.to_string()).unwrap_or_else(error)
}

/// Replays a trace (or the reference solution when `trace` is blank) and
/// returns every intermediate state up to the first failure.
#[wasm_bindgen]
pub fn play(kind: &str, n: u32, k: u32, seed: u64, trace: &str) -> String {
    let inst = match instance(kind, n, k, seed) {
        Ok(i) => i,
        Err(e) => return error(e),
    };
    let trace = if trace.trim().is_empty() {
        match reference_solution(&inst).into_trace() {
            Some(t) => t,
            None => return json!({ "status": "Unsolvable", "states": [inst.initial_state().to_json()] }).to_string(),
        }
    } else {
        match parse_trace(inst.kind(), trace) {
            Ok(t) => t,
            Err(e) => return json!({ "status": Status::ParseError.as_str(), "detail": e.to_string() }).to_string(),
        }
    };
    if trace.len() > MAX_STEPS {
        return error(format!("{} moves is too many to animate (limit {MAX_STEPS})", trace.len()));
    }
    let verdict = match adjudicate(&inst, &trace) {
        Ok(v) => v,
        Err(e) => return error(e),
    };
    let mut state = inst.initial_state();
    let mut states = vec![state.to_json()];
    for mv in &trace.moves[..verdict.valid_prefix_len] {
        if inst.apply_in_place(&mut state, mv).is_err() {
            break;
        }
        states.push(state.to_json());
    }
    json!({
        "status": verdict.status.as_str(),
        "first_failure_index": verdict.first_failure_index,
        "failure_reason": verdict.failure_reason.map(|r| r.as_str()),
        "moves": trace.moves.iter().map(format_move).collect::<Vec<_>>(),
        "states": states,
        "goal": inst.blocks_config().map(|b| json!(b.goal)),
    })
    .to_string()
}

/// Small seeded sweep; returns the report as CSV.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn sweep(agent: &str, kind: &str, n_lo: u32, n_hi: u32, k: u32, samples: usize, mode: &str, seed: u64) -> String {
    let run = || -> Result<String, String> {
        let archetype: Archetype = agent.parse().map_err(|e: gapbench_core::Error| e.to_string())?;
        let kind: PuzzleKind = kind.parse().map_err(|e: gapbench_core::Error| e.to_string())?;
        let mode: Mode = mode.parse().map_err(|e: gapbench_core::Error| e.to_string())?;
        if n_lo < 1 || n_lo > n_hi || n_hi > 16 || samples > 200 {
            return Err("keep 1 <= n_lo <= n_hi <= 16 and samples <= 200".into());
        }
        let mut spec = SweepSpec::new(vec![AgentConfig::new(archetype, 0)], kind, (n_lo..=n_hi).collect(), mode, seed);
        spec.k = (kind == PuzzleKind::River).then_some(k);
        spec.samples_per_cell = samples;
        spec.workers = 1;
        run_sweep(&spec).map(|o| o.report.to_csv()).map_err(|e| e.to_string())
    };
    run().unwrap_or_else(error)
}
