//! Analytic failure models and bootstrap statistics.
//!
//! Two closed-form baselines for long Hanoi solutions: the output-token
//! resource cliff (`tokens_per_move * (2^n - 1)` against a fixed budget) and
//! cumulative per-move error (`p^m`).

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOKENS_PER_MOVE: f64 = 8.0;
pub const DEFAULT_TOKEN_BUDGET: u64 = 64_000;
pub const DEFAULT_RESAMPLES: usize = 10_000;
/// Per-move fidelities plotted by default.
pub const DEFAULT_P_LIST: [f64; 3] = [0.999, 0.9999, 0.99999];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureModel {
    pub p: f64,
    pub tokens_per_move: f64,
    pub token_budget: u64,
    /// Tokens spent before the answer starts (e.g. hidden reasoning).
    #[serde(default)]
    pub overhead_tokens: u64,
}

impl Default for FailureModel {
    fn default() -> Self {
        FailureModel {
            p: 0.9999,
            tokens_per_move: DEFAULT_TOKENS_PER_MOVE,
            token_budget: DEFAULT_TOKEN_BUDGET,
            overhead_tokens: 0,
        }
    }
}

impl FailureModel {
    pub fn new(p: f64, tokens_per_move: f64, token_budget: u64) -> Result<Self> {
        let model = FailureModel { p, tokens_per_move, token_budget, overhead_tokens: 0 };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        check_p(self.p)?;
        if !self.tokens_per_move.is_finite() || self.tokens_per_move <= 0.0 {
            return Err(Error::invalid("tokens_per_move must be positive"));
        }
        if self.token_budget < 1 {
            return Err(Error::invalid("token_budget must be at least 1"));
        }
        Ok(())
    }

    pub fn effective_budget(&self) -> u64 {
        self.token_budget.saturating_sub(self.overhead_tokens)
    }

    /// Resource cliff after the overhead is taken out of the budget.
    pub fn cliff(&self) -> Result<u32> {
        resource_cliff(self.effective_budget(), self.tokens_per_move)
    }

    /// Whether writing out a full `n`-disk solution overruns the budget.
    pub fn over_budget(&self, n: u32) -> bool {
        token_cost(n, self.tokens_per_move).map_or(true, |c| c > self.effective_budget() as f64)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("p must be in (0, 1], got {p}")))
    }
}

/// `2^n - 1`, for `1 <= n <= 63`.
pub fn hanoi_moves(n: u32) -> Result<u64> {
    if !(1..=63).contains(&n) {
        return Err(Error::invalid(format!("n must be in 1..=63, got {n}")));
    }
    Ok((1u64 << n) - 1)
}

pub fn token_cost(n: u32, tokens_per_move: f64) -> Result<f64> {
    Ok(tokens_per_move * hanoi_moves(n)? as f64)
}

/// Smallest `n` whose full solution costs more than `token_budget`.
pub fn resource_cliff(token_budget: u64, tokens_per_move: f64) -> Result<u32> {
    if tokens_per_move.is_nan() || tokens_per_move <= 0.0 || (token_budget as f64) < tokens_per_move {
        return Err(Error::invalid("token budget must cover at least one move"));
    }
    (1..=63)
        .find(|&n| token_cost(n, tokens_per_move).expect("n in range") > token_budget as f64)
        .ok_or_else(|| Error::invalid("budget exceeds every representable solution"))
}

/// `p^m`, evaluated as `exp(m ln p)`.
pub fn success_probability(p: f64, m: u64) -> Result<f64> {
    check_p(p)?;
    if m == 0 || p == 1.0 {
        return Ok(1.0);
    }
    Ok((m as f64 * p.ln()).exp().clamp(0.0, 1.0))
}

/// Smallest `n` with `p^(2^n - 1) < 0.5`.
pub fn failure_horizon(p: f64) -> Result<u32> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("failure horizon needs p in (0, 1), got {p}")));
    }
    (1..=63)
        .find(|&n| success_probability(p, hanoi_moves(n).expect("n in range")).expect("valid p") < 0.5)
        .ok_or_else(|| Error::invalid(format!("p = {p} never drops below one half")))
}

/// Percentile bootstrap interval for the mean.
///
/// The interval is widened if needed so that it always contains the sample
/// mean.
pub fn bootstrap_ci(values: &[f64], resamples: usize, confidence: f64, seed: u64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::invalid("bootstrap needs at least one value"));
    }
    if resamples < 100 {
        return Err(Error::invalid("bootstrap needs at least 100 resamples"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(format!("confidence must be in (0, 1), got {confidence}")));
    }
    let len = values.len();
    let mean = values.iter().sum::<f64>() / len as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..len).map(|_| values[rng.gen_range(0..len)]).sum::<f64>() / len as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = 1.0 - confidence;
    let lo_idx = ((alpha / 2.0) * resamples as f64).floor() as usize;
    let hi_idx = (((1.0 - alpha / 2.0) * resamples as f64).ceil() as usize).clamp(1, resamples) - 1;
    Ok((means[lo_idx].min(mean), means[hi_idx].max(mean)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: u32,
    pub moves: u64,
    pub token_cost: f64,
    pub p_success: Vec<f64>,
}

/// Token cost and success probability per disk count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub model: FailureModel,
    pub p_list: Vec<f64>,
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    /// First row whose token cost exceeds the model's budget.
    pub fn first_over_budget(&self) -> Option<&CurveRow> {
        let budget = self.model.effective_budget() as f64;
        self.rows.iter().find(|r| r.token_cost > budget)
    }

    /// `n,moves,token_cost,p_success_<p>...` with one line per row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,moves,token_cost");
        for p in &self.p_list {
            write!(out, ",p_success_{p}").unwrap();
        }
        out.push('\n');
        for row in &self.rows {
            write!(out, "{},{},{}", row.n, row.moves, row.token_cost).unwrap();
            for v in &row.p_success {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn emit_model_curves(model: &FailureModel, n_range: RangeInclusive<u32>, p_list: &[f64]) -> Result<CurveTable> {
    if n_range.is_empty() || p_list.is_empty() {
        return Err(Error::invalid("n range and p list must be non-empty"));
    }
    for &p in p_list {
        check_p(p)?;
    }
    let rows = n_range
        .map(|n| {
            let moves = hanoi_moves(n)?;
            let p_success = p_list.iter().map(|&p| success_probability(p, moves)).collect::<Result<_>>()?;
            Ok(CurveRow { n, moves, token_cost: token_cost(n, model.tokens_per_move)?, p_success })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTable { model: *model, p_list: p_list.to_vec(), rows })
}
