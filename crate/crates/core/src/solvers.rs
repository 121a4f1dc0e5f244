//! Reference solution generators.
//!
//! Closed-form constructions for Hanoi and Checker, an exact breadth-first
//! search usable on every kind (and the only route to unsolvability proofs),
//! a linear couples-ferrying schedule for large River instances, and a
//! two-phase Blocks planner.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::puzzle::{
    BlocksConfig, Cell, CheckerState, Individual, Move, Passengers, PuzzleInstance, PuzzleKind, State, Trace,
};

pub const DEFAULT_HANOI_CAP: u32 = 25;
pub const MAX_CHECKER_N: u32 = 1000;
/// Largest Blocks instance the exact strategy accepts.
pub const MAX_EXACT_BLOCKS_N: u32 = 8;
const EXACT_STATE_LIMIT: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    Solution { trace: Trace, optimal: bool },
    Unsolvable { states_explored: usize },
    LimitExceeded { states_explored: usize },
}

impl SolveOutcome {
    pub fn trace(&self) -> Option<&Trace> {
        match self {
            SolveOutcome::Solution { trace, .. } => Some(trace),
            _ => None,
        }
    }

    pub fn into_trace(self) -> Option<Trace> {
        match self {
            SolveOutcome::Solution { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

pub fn solve_hanoi(n: u32) -> Result<Trace> {
    solve_hanoi_capped(n, DEFAULT_HANOI_CAP)
}

/// The classic recursive schedule: `2^n - 1` moves from peg 0 to peg 2.
pub fn solve_hanoi_capped(n: u32, cap: u32) -> Result<Trace> {
    if n < 1 || n > cap {
        return Err(Error::invalid(format!("hanoi n must be in 1..={cap}, got {n}")));
    }
    fn schedule(disks: u32, src: u32, dst: u32, aux: u32, out: &mut Vec<Move>) {
        if disks == 0 {
            return;
        }
        schedule(disks - 1, src, aux, dst, out);
        out.push(Move::Hanoi { disk: disks, from: src, to: dst });
        schedule(disks - 1, aux, dst, src, out);
    }
    let mut moves = Vec::with_capacity((1usize << n) - 1);
    schedule(n, 0, 2, 1, &mut moves);
    Ok(Trace::new(PuzzleKind::Hanoi, moves))
}

/// `(n + 1)^2 - 1` moves.
///
/// Moves come in single-colour runs of length 1, 2, .., n, n, n, .., 2, 1,
/// starting with Red. Within a run the mover jumps when it can and slides
/// otherwise.
pub fn solve_checker(n: u32) -> Result<Trace> {
    if !(1..=MAX_CHECKER_N).contains(&n) {
        return Err(Error::invalid(format!("checker n must be in 1..={MAX_CHECKER_N}, got {n}")));
    }
    let runs: Vec<u32> = (1..=n).chain(std::iter::once(n)).chain((1..=n).rev()).collect();
    let mut board = CheckerState::initial(n);
    let mut moves = Vec::with_capacity(((n + 1) * (n + 1) - 1) as usize);
    for (r, &len) in runs.iter().enumerate() {
        let colour = if r % 2 == 0 { Cell::Red } else { Cell::Blue };
        for _ in 0..len {
            let e = board.empty_index();
            let (jump, slide) = match colour {
                Cell::Red => (e.checked_sub(2), e.checked_sub(1)),
                _ => (Some(e + 2), Some(e + 1)),
            };
            let from = [jump, slide]
                .into_iter()
                .flatten()
                .find(|&f| f < board.cells.len() && board.cells[f] == colour && {
                    let mut probe = board.clone();
                    probe.apply(f as u32, e as u32).is_ok()
                })
                .expect("run schedule always leaves a legal mover");
            board.apply(from as u32, e as u32).expect("checked above");
            moves.push(Move::Checker { from: from as u32, to: e as u32 });
        }
    }
    Ok(Trace::new(PuzzleKind::Checker, moves))
}

/// Breadth-first search in canonical move order.
///
/// `max_states` bounds the number of expanded states. The first shortest
/// path found is returned, so results are reproducible move for move.
pub fn solve_bfs(instance: &PuzzleInstance, max_states: usize) -> SolveOutcome {
    let start = instance.initial_state();
    if instance.is_goal(&start) {
        return SolveOutcome::Solution { trace: Trace::empty(instance.kind()), optimal: true };
    }
    let mut visited: HashSet<State> = HashSet::new();
    visited.insert(instance.canonical_state(&start));
    let mut nodes: Vec<(State, Option<(usize, Move)>)> = vec![(start, None)];
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0usize;

    while let Some(idx) = queue.pop_front() {
        if expanded >= max_states {
            return SolveOutcome::LimitExceeded { states_explored: expanded };
        }
        expanded += 1;
        let state = nodes[idx].0.clone();
        for mv in instance.legal_moves(&state) {
            let next = instance.apply_move(&state, &mv).expect("legal_moves yields applicable moves");
            if !visited.insert(instance.canonical_state(&next)) {
                continue;
            }
            let goal = instance.is_goal(&next);
            nodes.push((next, Some((idx, mv))));
            let child = nodes.len() - 1;
            if goal {
                return SolveOutcome::Solution { trace: reconstruct(instance.kind(), &nodes, child), optimal: true };
            }
            queue.push_back(child);
        }
    }
    SolveOutcome::Unsolvable { states_explored: expanded }
}

fn reconstruct(kind: PuzzleKind, nodes: &[(State, Option<(usize, Move)>)], mut idx: usize) -> Trace {
    let mut moves = Vec::new();
    while let Some((parent, mv)) = &nodes[idx].1 {
        moves.push(mv.clone());
        idx = *parent;
    }
    moves.reverse();
    Trace::new(kind, moves)
}

/// Couples ferried in pairs.
///
/// With `c = k / 2` couples per forward trip, each round trip carries `c`
/// complete couples across and brings one complete couple back, so every
/// bank and the boat only ever hold whole couples. Needs `k >= 4`; smaller
/// boats fall back to exact search for `n <= 8`.
pub fn solve_river_constructive(n: u32, k: u32) -> Result<SolveOutcome> {
    let instance = PuzzleInstance::river(n, k)?;
    if k < 4 {
        if n <= 8 {
            return Ok(solve_bfs(&instance, EXACT_STATE_LIMIT));
        }
        return Err(Error::Unsupported { n, k });
    }
    let per_trip = (k / 2) as usize;
    let couple = |i: u32| [Individual::actor(i), Individual::agent(i)];
    let crossing = |group: &[u32]| Move::River(Passengers::new(group.iter().flat_map(|&i| couple(i)).collect()));

    let mut waiting: VecDeque<u32> = (1..=n).collect();
    let mut moves = Vec::new();
    loop {
        if waiting.len() <= per_trip {
            let rest: Vec<u32> = waiting.drain(..).collect();
            moves.push(crossing(&rest));
            break;
        }
        let group: Vec<u32> = waiting.drain(..per_trip).collect();
        moves.push(crossing(&group));
        let back = *group.last().expect("per_trip >= 2");
        moves.push(crossing(&[back]));
        waiting.push_front(back);
    }
    Ok(SolveOutcome::Solution { trace: Trace::new(PuzzleKind::River, moves), optimal: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlocksStrategy {
    Exact,
    Heuristic,
}

pub fn solve_blocks(instance: &PuzzleInstance, strategy: BlocksStrategy) -> Result<SolveOutcome> {
    if instance.kind() != PuzzleKind::Blocks {
        return Err(Error::KindMismatch { expected: PuzzleKind::Blocks, found: instance.kind() });
    }
    match strategy {
        BlocksStrategy::Exact if instance.n() > MAX_EXACT_BLOCKS_N => {
            Ok(SolveOutcome::LimitExceeded { states_explored: 0 })
        }
        BlocksStrategy::Exact => Ok(solve_bfs(instance, EXACT_STATE_LIMIT)),
        BlocksStrategy::Heuristic => {
            let cfg = instance.blocks_config().expect("blocks instance");
            Ok(SolveOutcome::Solution {
                trace: Trace::new(PuzzleKind::Blocks, blocks_two_phase(cfg)),
                optimal: false,
            })
        }
    }
}

/// At most `2n` moves: clear every block that is not already part of a
/// correctly built tower base onto its own table position, then build each
/// goal tower upward.
fn blocks_two_phase(cfg: &BlocksConfig) -> Vec<Move> {
    let n = cfg.initial.iter().map(Vec::len).sum::<usize>();
    // goal_below[b] = block directly under b in the goal, 0 if b sits on the table.
    let mut goal_below = vec![0u32; n + 1];
    let towers: Vec<&Vec<u32>> = cfg.goal.iter().filter(|t| !t.is_empty()).collect();
    for tower in &towers {
        for pair in tower.windows(2) {
            goal_below[pair[1] as usize] = pair[0];
        }
    }
    let settled = |stack: &[u32]| -> usize {
        match stack.first() {
            Some(&b) if goal_below[b as usize] == 0 => {
                1 + stack.windows(2).take_while(|w| goal_below[w[1] as usize] == w[0]).count()
            }
            _ => 0,
        }
    };

    let mut stacks = cfg.initial.clone();
    let mut moves = Vec::new();
    for s in 0..stacks.len() {
        let keep = settled(&stacks[s]).max(1);
        while stacks[s].len() > keep {
            let e = stacks.iter().position(Vec::is_empty).expect("a stack of two leaves a free position");
            let block = stacks[s].pop().expect("non-empty");
            stacks[e].push(block);
            moves.push(Move::Blocks { from: s as u32, to: e as u32 });
        }
    }
    for tower in towers {
        let base = stacks.iter().position(|s| s.first() == Some(&tower[0])).expect("tower base stays put");
        for &block in &tower[stacks[base].len()..] {
            let from = stacks.iter().position(|s| s.as_slice() == [block]).expect("unplaced blocks are single");
            stacks[from].clear();
            stacks[base].push(block);
            moves.push(Move::Blocks { from: from as u32, to: base as u32 });
        }
    }
    moves
}

/// The solution the scripted agents and the CLI treat as ground truth.
pub fn reference_solution(instance: &PuzzleInstance) -> SolveOutcome {
    let n = instance.n();
    match instance.kind() {
        PuzzleKind::Hanoi => match solve_hanoi(n) {
            Ok(trace) => SolveOutcome::Solution { trace, optimal: true },
            Err(_) => SolveOutcome::LimitExceeded { states_explored: 0 },
        },
        PuzzleKind::Checker => match solve_checker(n) {
            Ok(trace) => SolveOutcome::Solution { trace, optimal: true },
            Err(_) => SolveOutcome::LimitExceeded { states_explored: 0 },
        },
        PuzzleKind::River => {
            let k = instance.k().expect("river instance has k");
            solve_river_constructive(n, k).unwrap_or(SolveOutcome::LimitExceeded { states_explored: 0 })
        }
        PuzzleKind::Blocks => solve_blocks(instance, BlocksStrategy::Heuristic).expect("blocks instance"),
    }
}
