//! The four puzzle environments as deterministic state machines.
//!
//! Every environment exposes the same surface through [`PuzzleInstance`]:
//! a canonical initial state, a legality check that reports a structured
//! [`IllegalReason`], a goal predicate, and move enumeration in canonical
//! order (lexicographic on each move's serialized form).

pub mod blocks;
pub mod checker;
pub mod hanoi;
pub mod river;
mod trace;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use blocks::{BlocksConfig, BlocksState};
pub use checker::{Cell, CheckerState};
pub use hanoi::HanoiState;
pub use river::{Bank, Individual, Passengers, RiverState, Role};
pub use trace::{format_move, format_trace, parse_move, parse_trace, ParseError, Trace};

/// Largest River instance representable by the bitmask state encoding.
pub const MAX_RIVER_N: u32 = 64;
/// Largest Hanoi instance whose move count fits in `u64`.
pub const MAX_HANOI_N: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PuzzleKind {
    Hanoi,
    Checker,
    River,
    Blocks,
}

impl PuzzleKind {
    pub const ALL: [PuzzleKind; 4] = [
        PuzzleKind::Hanoi,
        PuzzleKind::Checker,
        PuzzleKind::River,
        PuzzleKind::Blocks,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PuzzleKind::Hanoi => "hanoi",
            PuzzleKind::Checker => "checker",
            PuzzleKind::River => "river",
            PuzzleKind::Blocks => "blocks",
        }
    }

    pub(crate) fn index(self) -> u64 {
        match self {
            PuzzleKind::Hanoi => 0,
            PuzzleKind::Checker => 1,
            PuzzleKind::River => 2,
            PuzzleKind::Blocks => 3,
        }
    }
}

impl fmt::Display for PuzzleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PuzzleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hanoi" => Ok(PuzzleKind::Hanoi),
            "checker" | "checkers" => Ok(PuzzleKind::Checker),
            "river" => Ok(PuzzleKind::River),
            "blocks" => Ok(PuzzleKind::Blocks),
            other => Err(Error::invalid(format!("unknown puzzle kind `{other}`"))),
        }
    }
}

/// How a Blocks instance obtains its initial and goal stacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlocksSource {
    Explicit(BlocksConfig),
    Seed(u64),
}

/// A validated, parameterized puzzle.
///
/// Blocks instances always carry their concrete configuration; when built
/// from a seed the seed is kept alongside for provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceRepr", into = "InstanceRepr")]
pub struct PuzzleInstance {
    kind: PuzzleKind,
    n: u32,
    k: Option<u32>,
    seed: Option<u64>,
    blocks: Option<BlocksConfig>,
}

#[derive(Serialize, Deserialize)]
struct InstanceRepr {
    kind: PuzzleKind,
    n: u32,
    #[serde(default)]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blocks: Option<BlocksConfig>,
}

impl TryFrom<InstanceRepr> for PuzzleInstance {
    type Error = Error;

    fn try_from(r: InstanceRepr) -> Result<Self> {
        let source = match (r.blocks, r.seed) {
            (Some(cfg), seed) => {
                let mut inst =
                    PuzzleInstance::new(r.kind, r.n, r.k, Some(BlocksSource::Explicit(cfg)))?;
                inst.seed = seed;
                return Ok(inst);
            }
            (None, Some(seed)) => Some(BlocksSource::Seed(seed)),
            (None, None) => None,
        };
        PuzzleInstance::new(r.kind, r.n, r.k, source)
    }
}

impl From<PuzzleInstance> for InstanceRepr {
    fn from(i: PuzzleInstance) -> Self {
        InstanceRepr {
            kind: i.kind,
            n: i.n,
            k: i.k,
            seed: i.seed,
            blocks: i.blocks,
        }
    }
}

impl PuzzleInstance {
    pub fn new(kind: PuzzleKind, n: u32, k: Option<u32>, blocks: Option<BlocksSource>) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("n must be at least 1"));
        }
        match (kind, k) {
            (PuzzleKind::River, None) => {
                return Err(Error::invalid("river instances require a boat capacity k"))
            }
            (PuzzleKind::River, Some(k)) if k < 2 => {
                return Err(Error::invalid(format!("boat capacity k must be at least 2, got {k}")))
            }
            (PuzzleKind::River, Some(_)) if n > MAX_RIVER_N => {
                return Err(Error::invalid(format!("river n must be at most {MAX_RIVER_N}")))
            }
            (PuzzleKind::River, Some(_)) => {}
            (other, Some(_)) => {
                return Err(Error::invalid(format!("k is only meaningful for river, not {other}")))
            }
            (_, None) => {}
        }
        if kind == PuzzleKind::Hanoi && n > MAX_HANOI_N {
            return Err(Error::invalid(format!("hanoi n must be at most {MAX_HANOI_N}")));
        }
        let (seed, blocks) = match (kind, blocks) {
            (PuzzleKind::Blocks, None) => {
                return Err(Error::invalid("blocks instances need an explicit configuration or a seed"))
            }
            (PuzzleKind::Blocks, Some(BlocksSource::Seed(seed))) => {
                (Some(seed), Some(BlocksConfig::generate(n, seed)))
            }
            (PuzzleKind::Blocks, Some(BlocksSource::Explicit(cfg))) => {
                (None, Some(cfg.normalized(n)?))
            }
            (other, Some(_)) => {
                return Err(Error::invalid(format!("{other} instances take no blocks configuration")))
            }
            (_, None) => (None, None),
        };
        Ok(PuzzleInstance { kind, n, k, seed, blocks })
    }

    pub fn hanoi(n: u32) -> Result<Self> {
        Self::new(PuzzleKind::Hanoi, n, None, None)
    }

    pub fn checker(n: u32) -> Result<Self> {
        Self::new(PuzzleKind::Checker, n, None, None)
    }

    pub fn river(n: u32, k: u32) -> Result<Self> {
        Self::new(PuzzleKind::River, n, Some(k), None)
    }

    pub fn blocks_seeded(n: u32, seed: u64) -> Result<Self> {
        Self::new(PuzzleKind::Blocks, n, None, Some(BlocksSource::Seed(seed)))
    }

    /// Blocks instance from explicit bottom-to-top stacks; `n` is the block count.
    pub fn blocks_explicit(initial: Vec<Vec<u32>>, goal: Vec<Vec<u32>>) -> Result<Self> {
        let n = initial.iter().map(Vec::len).sum::<usize>() as u32;
        Self::new(
            PuzzleKind::Blocks,
            n,
            None,
            Some(BlocksSource::Explicit(BlocksConfig { initial, goal })),
        )
    }

    pub fn kind(&self) -> PuzzleKind {
        self.kind
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> Option<u32> {
        self.k
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn blocks_config(&self) -> Option<&BlocksConfig> {
        self.blocks.as_ref()
    }

    fn capacity(&self) -> u32 {
        self.k.unwrap_or(0)
    }

    fn blocks(&self) -> &BlocksConfig {
        self.blocks.as_ref().expect("blocks instance without configuration")
    }

    pub fn initial_state(&self) -> State {
        match self.kind {
            PuzzleKind::Hanoi => State::Hanoi(HanoiState::initial(self.n)),
            PuzzleKind::Checker => State::Checker(CheckerState::initial(self.n)),
            PuzzleKind::River => State::River(RiverState::initial(self.n)),
            PuzzleKind::Blocks => State::Blocks(BlocksState::from_config(self.blocks())),
        }
    }

    pub fn is_goal(&self, state: &State) -> bool {
        match state {
            State::Hanoi(s) => s.is_goal(self.n),
            State::Checker(s) => s.is_goal(self.n),
            State::River(s) => s.is_goal(),
            State::Blocks(s) => s.is_goal(self.blocks()),
        }
    }

    /// Moves for which [`apply_move`](Self::apply_move) succeeds, in canonical order.
    pub fn legal_moves(&self, state: &State) -> Vec<Move> {
        let mut moves = match state {
            State::Hanoi(s) => s.legal_moves(),
            State::Checker(s) => s.legal_moves(),
            State::River(s) => s.legal_moves(self.capacity()),
            State::Blocks(s) => s.legal_moves(),
        };
        sort_canonical(&mut moves);
        moves
    }

    /// Successor state; the input is left untouched.
    pub fn apply_move(&self, state: &State, mv: &Move) -> Result<State, IllegalMove> {
        let mut next = state.clone();
        self.apply_in_place(&mut next, mv)?;
        Ok(next)
    }

    /// Applies `mv` to `state`. On error `state` is unchanged.
    pub fn apply_in_place(&self, state: &mut State, mv: &Move) -> Result<(), IllegalMove> {
        match (state, mv) {
            (State::Hanoi(s), Move::Hanoi { disk, from, to }) => s.apply(self.n, *disk, *from, *to),
            (State::Checker(s), Move::Checker { from, to }) => s.apply(*from, *to),
            (State::River(s), Move::River(p)) => s.apply(self.capacity(), p),
            (State::Blocks(s), Move::Blocks { from, to }) => s.apply(*from, *to),
            (state, mv) => Err(IllegalMove::new(
                IllegalReason::KindMismatch,
                format!("{} move applied to {} state", mv.kind(), state.kind()),
            )),
        }
    }

    /// Representative used as the visited-set key during search.
    ///
    /// Blocks stacks are unlabeled (goal equality ignores stack positions), so
    /// states that differ only by a stack permutation share a key.
    pub fn canonical_state(&self, state: &State) -> State {
        match state {
            State::Blocks(s) => State::Blocks(s.canonical()),
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum State {
    Hanoi(HanoiState),
    Checker(CheckerState),
    River(RiverState),
    Blocks(BlocksState),
}

impl State {
    pub fn kind(&self) -> PuzzleKind {
        match self {
            State::Hanoi(_) => PuzzleKind::Hanoi,
            State::Checker(_) => PuzzleKind::Checker,
            State::River(_) => PuzzleKind::River,
            State::Blocks(_) => PuzzleKind::Blocks,
        }
    }

    /// Wire/JSON form used by the tool protocol and the web demo.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::json;
        match self {
            State::Hanoi(s) => json!({ "pegs": s.pegs }),
            State::Checker(s) => json!({ "cells": s.to_string() }),
            State::River(s) => json!({
                "left": s.on_bank(Bank::Left).iter().map(ToString::to_string).collect::<Vec<_>>(),
                "right": s.on_bank(Bank::Right).iter().map(ToString::to_string).collect::<Vec<_>>(),
                "boat": s.boat.as_str(),
            }),
            State::Blocks(s) => json!({ "stacks": s.stacks }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Hanoi { disk: u32, from: u32, to: u32 },
    Checker { from: u32, to: u32 },
    River(Passengers),
    Blocks { from: u32, to: u32 },
}

impl Move {
    pub fn kind(&self) -> PuzzleKind {
        match self {
            Move::Hanoi { .. } => PuzzleKind::Hanoi,
            Move::Checker { .. } => PuzzleKind::Checker,
            Move::River(_) => PuzzleKind::River,
            Move::Blocks { .. } => PuzzleKind::Blocks,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_move(self))
    }
}

pub(crate) fn sort_canonical(moves: &mut Vec<Move>) {
    let mut keyed: Vec<(String, Move)> = moves.drain(..).map(|m| (format_move(&m), m)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    moves.extend(keyed.into_iter().map(|(_, m)| m));
}

/// Structured cause of a rejected move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IllegalReason {
    WrongPeg,
    LargerOnSmaller,
    EmptySource,
    NotAdjacentOrJump,
    WrongDirection,
    BoatOnOtherBank,
    OverCapacity,
    SafetyViolation,
    UnknownBlock,
    EmptyStack,
    UnknownIndividual,
    SameStack,
    KindMismatch,
}

impl IllegalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            IllegalReason::WrongPeg => "WrongPeg",
            IllegalReason::LargerOnSmaller => "LargerOnSmaller",
            IllegalReason::EmptySource => "EmptySource",
            IllegalReason::NotAdjacentOrJump => "NotAdjacentOrJump",
            IllegalReason::WrongDirection => "WrongDirection",
            IllegalReason::BoatOnOtherBank => "BoatOnOtherBank",
            IllegalReason::OverCapacity => "OverCapacity",
            IllegalReason::SafetyViolation => "SafetyViolation",
            IllegalReason::UnknownBlock => "UnknownBlock",
            IllegalReason::EmptyStack => "EmptyStack",
            IllegalReason::UnknownIndividual => "UnknownIndividual",
            IllegalReason::SameStack => "SameStack",
            IllegalReason::KindMismatch => "KindMismatch",
        }
    }
}

impl fmt::Display for IllegalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{reason}: {detail}")]
pub struct IllegalMove {
    pub reason: IllegalReason,
    pub detail: String,
}

impl IllegalMove {
    pub(crate) fn new(reason: IllegalReason, detail: impl Into<String>) -> Self {
        IllegalMove { reason, detail: detail.into() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_instance_validates_parameters() {
        let h = PuzzleInstance::hanoi(3).unwrap();
        assert_eq!(h.kind(), PuzzleKind::Hanoi);
        assert_eq!(h.initial_state(), State::Hanoi(HanoiState { pegs: [vec![3, 2, 1], vec![], vec![]] }));

        assert!(PuzzleInstance::river(5, 3).is_ok());
        assert!(matches!(
            PuzzleInstance::new(PuzzleKind::River, 2, None, None),
            Err(Error::InvalidParameter(_))
        ));
        assert!(PuzzleInstance::river(2, 1).is_err());
        assert!(PuzzleInstance::new(PuzzleKind::Hanoi, 0, None, None).is_err());
        assert!(PuzzleInstance::new(PuzzleKind::Hanoi, 3, Some(2), None).is_err());
        assert!(PuzzleInstance::new(PuzzleKind::Blocks, 3, None, None).is_err());
        assert!(PuzzleInstance::new(PuzzleKind::Checker, 3, None, Some(BlocksSource::Seed(1))).is_err());
    }

    #[test]
    fn initial_states_are_canonical() {
        assert_eq!(
            PuzzleInstance::hanoi(2).unwrap().initial_state(),
            State::Hanoi(HanoiState { pegs: [vec![2, 1], vec![], vec![]] })
        );
        assert_eq!(
            PuzzleInstance::checker(1).unwrap().initial_state(),
            State::Checker(CheckerState { cells: vec![Cell::Red, Cell::Empty, Cell::Blue] })
        );
        let State::River(r) = PuzzleInstance::river(2, 2).unwrap().initial_state() else {
            panic!("river state expected")
        };
        assert_eq!(r.on_bank(Bank::Right), vec![]);
        assert_eq!(r.on_bank(Bank::Left).len(), 4);
        assert_eq!(r.boat, Bank::Left);
    }

    #[test]
    fn instance_json_round_trip() {
        for inst in [
            PuzzleInstance::hanoi(4).unwrap(),
            PuzzleInstance::river(5, 3).unwrap(),
            PuzzleInstance::blocks_seeded(6, 99).unwrap(),
            PuzzleInstance::blocks_explicit(vec![vec![1, 2]], vec![vec![2, 1]]).unwrap(),
        ] {
            let text = serde_json::to_string(&inst).unwrap();
            let back: PuzzleInstance = serde_json::from_str(&text).unwrap();
            assert_eq!(back, inst);
        }
        assert!(serde_json::from_str::<PuzzleInstance>(r#"{"kind":"river","n":2}"#).is_err());
    }

    #[test]
    fn mismatched_move_kind_is_rejected() {
        let inst = PuzzleInstance::hanoi(2).unwrap();
        let err = inst
            .apply_move(&inst.initial_state(), &Move::Checker { from: 0, to: 1 })
            .unwrap_err();
        assert_eq!(err.reason, IllegalReason::KindMismatch);
    }
}
