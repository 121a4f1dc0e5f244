//! Move-by-move replay of candidate traces, and extraction of traces buried
//! in free-form text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::puzzle::{parse_trace, IllegalReason, PuzzleInstance, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Solved,
    IllegalMove,
    NotSolved,
    ParseError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "Solved",
            Status::IllegalMove => "IllegalMove",
            Status::NotSolved => "NotSolved",
            Status::ParseError => "ParseError",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjudicationResult {
    pub status: Status,
    pub first_failure_index: Option<usize>,
    pub failure_reason: Option<IllegalReason>,
    pub valid_prefix_len: usize,
    pub moves_total: usize,
}

impl AdjudicationResult {
    pub fn parse_error() -> Self {
        AdjudicationResult {
            status: Status::ParseError,
            first_failure_index: None,
            failure_reason: None,
            valid_prefix_len: 0,
            moves_total: 0,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }
}

/// Replays `trace` from the instance's initial state.
///
/// Replay stops at the first illegal move, or at the first prefix that
/// reaches the goal; moves after the goal are counted but not checked.
pub fn adjudicate(instance: &PuzzleInstance, trace: &Trace) -> Result<AdjudicationResult> {
    if trace.kind != instance.kind() {
        return Err(Error::KindMismatch { expected: instance.kind(), found: trace.kind });
    }
    let total = trace.moves.len();
    let mut state = instance.initial_state();
    if instance.is_goal(&state) {
        return Ok(solved(total));
    }
    for (i, mv) in trace.moves.iter().enumerate() {
        if let Err(illegal) = instance.apply_in_place(&mut state, mv) {
            return Ok(AdjudicationResult {
                status: Status::IllegalMove,
                first_failure_index: Some(i),
                failure_reason: Some(illegal.reason),
                valid_prefix_len: i,
                moves_total: total,
            });
        }
        if instance.is_goal(&state) {
            return Ok(solved(total));
        }
    }
    Ok(AdjudicationResult {
        status: Status::NotSolved,
        first_failure_index: None,
        failure_reason: None,
        valid_prefix_len: total,
        moves_total: total,
    })
}

fn solved(total: usize) -> AdjudicationResult {
    AdjudicationResult {
        status: Status::Solved,
        first_failure_index: None,
        failure_reason: None,
        valid_prefix_len: total,
        moves_total: total,
    }
}

/// Strictly parses a whole answer and adjudicates it; unparseable answers
/// get [`Status::ParseError`].
pub fn adjudicate_text(instance: &PuzzleInstance, text: &str) -> AdjudicationResult {
    match parse_trace(instance.kind(), text) {
        Ok(trace) => adjudicate(instance, &trace).expect("parsed with the instance kind"),
        Err(_) => AdjudicationResult::parse_error(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub start: usize,
    pub end: usize,
    pub result: AdjudicationResult,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionScan {
    pub findings: Vec<Finding>,
}

impl SolutionScan {
    /// Position (in finding order) of the first solved candidate.
    pub fn earliest_solved(&self) -> Option<usize> {
        self.findings.iter().position(|f| f.result.is_solved())
    }
}

/// Finds every bracketed move list anchored at `[[` in `text`, parses it
/// with the strict grammar and adjudicates it. Byte spans are half-open and
/// ascending; regions that fail to parse are skipped.
pub fn scan_text_for_solutions(instance: &PuzzleInstance, text: &str) -> SolutionScan {
    let bytes = text.as_bytes();
    let mut findings = Vec::new();
    let mut i = 0;
    while i + 1 < bytes.len() {
        if bytes[i] != b'[' || bytes[i + 1] != b'[' {
            i += 1;
            continue;
        }
        let Some(end) = balanced_end(bytes, i) else { break };
        match parse_trace(instance.kind(), &text[i..end]) {
            Ok(trace) => {
                let result = adjudicate(instance, &trace).expect("parsed with the instance kind");
                findings.push(Finding { start: i, end, result });
                i = end;
            }
            Err(_) => i += 1,
        }
    }
    SolutionScan { findings }
}

fn balanced_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (offset, &b) in bytes[start..].iter().enumerate() {
        match b {
            b'[' => depth += 1,
            b']' => {
                depth -= 1;
                if depth == 0 {
                    return Some(start + offset + 1);
                }
            }
            _ => {}
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub accuracy: f64,
    pub valid_prefix_fraction: f64,
}

pub fn episode_metrics(result: &AdjudicationResult) -> EpisodeMetrics {
    EpisodeMetrics {
        accuracy: if result.is_solved() { 1.0 } else { 0.0 },
        valid_prefix_fraction: result.valid_prefix_len as f64 / result.moves_total.max(1) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::PuzzleKind;

    fn hanoi_trace(text: &str) -> Trace {
        parse_trace(PuzzleKind::Hanoi, text).unwrap()
    }

    #[test]
    fn illegal_move_is_located() {
        let inst = PuzzleInstance::hanoi(2).unwrap();
        let r = adjudicate(&inst, &hanoi_trace("[[1,0,2],[2,0,2]]")).unwrap();
        assert_eq!(r.status, Status::IllegalMove);
        assert_eq!(r.first_failure_index, Some(1));
        assert_eq!(r.failure_reason, Some(IllegalReason::LargerOnSmaller));
        assert_eq!(r.valid_prefix_len, 1);
        assert_eq!(r.moves_total, 2);
    }

    #[test]
    fn legal_but_incomplete() {
        let inst = PuzzleInstance::hanoi(2).unwrap();
        let r = adjudicate(&inst, &hanoi_trace("[[1,0,1]]")).unwrap();
        assert_eq!(r.status, Status::NotSolved);
        assert_eq!(r.valid_prefix_len, 1);
    }

    #[test]
    fn moves_after_goal_are_not_checked() {
        let inst = PuzzleInstance::hanoi(1).unwrap();
        let r = adjudicate(&inst, &hanoi_trace("[[1,0,2],[3,3,3]]")).unwrap();
        assert_eq!(r.status, Status::Solved);
        assert_eq!(r.valid_prefix_len, 2);
        assert_eq!(r.moves_total, 2);
    }

    #[test]
    fn kind_mismatch() {
        let inst = PuzzleInstance::checker(1).unwrap();
        assert!(matches!(
            adjudicate(&inst, &hanoi_trace("[]")),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn scan_finds_candidates_in_order() {
        let inst = PuzzleInstance::hanoi(1).unwrap();
        let scan = scan_text_for_solutions(&inst, "the answer is [[1,0,2]].");
        assert_eq!(scan.findings.len(), 1);
        assert!(scan.findings[0].result.is_solved());
        assert_eq!(&"the answer is [[1,0,2]]."[scan.findings[0].start..scan.findings[0].end], "[[1,0,2]]");

        assert!(scan_text_for_solutions(&inst, "no lists here, only [1, 2] and prose").findings.is_empty());

        let scan = scan_text_for_solutions(&inst, "first try [[1,0,1]] ... final [[1,0,2]]");
        let statuses: Vec<Status> = scan.findings.iter().map(|f| f.result.status).collect();
        assert_eq!(statuses, vec![Status::NotSolved, Status::Solved]);
        assert_eq!(scan.earliest_solved(), Some(1));
    }

    #[test]
    fn scan_skips_malformed_and_recovers_inner_lists() {
        let inst = PuzzleInstance::hanoi(1).unwrap();
        let scan = scan_text_for_solutions(&inst, "[[[1,0,2]]] and [[x]] then [[1,0,2]");
        assert_eq!(scan.findings.len(), 1);
        assert_eq!(scan.findings[0].start, 1);
    }

    #[test]
    fn metrics() {
        let m = episode_metrics(&solved(7));
        assert_eq!((m.accuracy, m.valid_prefix_fraction), (1.0, 1.0));
        let illegal = AdjudicationResult {
            status: Status::IllegalMove,
            first_failure_index: Some(0),
            failure_reason: Some(IllegalReason::WrongPeg),
            valid_prefix_len: 0,
            moves_total: 4,
        };
        let m = episode_metrics(&illegal);
        assert_eq!((m.accuracy, m.valid_prefix_fraction), (0.0, 0.0));
        let unsolved = AdjudicationResult {
            status: Status::NotSolved,
            first_failure_index: None,
            failure_reason: None,
            valid_prefix_len: 5,
            moves_total: 5,
        };
        let m = episode_metrics(&unsolved);
        assert_eq!((m.accuracy, m.valid_prefix_fraction), (0.0, 1.0));
        let m = episode_metrics(&AdjudicationResult::parse_error());
        assert_eq!((m.accuracy, m.valid_prefix_fraction), (0.0, 0.0));
    }
}
