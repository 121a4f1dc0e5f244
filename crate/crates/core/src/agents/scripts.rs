//! Answer generators behind the scripted archetypes.

use std::collections::HashMap;

use rand::seq::index::sample;
use rand::Rng;

use crate::puzzle::{Individual, Move, Passengers, PuzzleInstance, PuzzleKind, State};
use crate::solvers::{reference_solution, solve_river_constructive, SolveOutcome};

/// Marker every resignation carries.
pub const IMPOSSIBLE: &str = "IMPOSSIBLE";

pub(crate) fn resignation(instance: &PuzzleInstance, why: &str) -> String {
    format!("{IMPOSSIBLE}: the {} puzzle with n={} has no valid solution ({why}).", instance.kind(), instance.n())
}

/// Number of entities whose position must be tracked on every move.
pub(crate) fn state_size(instance: &PuzzleInstance) -> u64 {
    let n = instance.n() as u64;
    match instance.kind() {
        PuzzleKind::Hanoi | PuzzleKind::Blocks => n,
        PuzzleKind::Checker => 2 * n + 1,
        PuzzleKind::River => 2 * n,
    }
}

/// Rough count of reachable states, used to decide whether brute force is viable.
pub(crate) fn state_space_estimate(instance: &PuzzleInstance) -> f64 {
    let n = instance.n() as f64;
    match instance.kind() {
        PuzzleKind::Hanoi => 3f64.powf(n),
        PuzzleKind::Checker => (2.0 * n + 1.0) * 2f64.powf(2.0 * n),
        PuzzleKind::River => 2f64.powf(2.0 * n + 1.0),
        PuzzleKind::Blocks => (1..=instance.n()).map(f64::from).product::<f64>() * 2f64.powf(n),
    }
}

/// Uniformly drawn well-formed move of the instance's kind, different from `original`.
pub(crate) fn corrupt_move(instance: &PuzzleInstance, original: &Move, rng: &mut impl Rng) -> Move {
    for _ in 0..64 {
        let candidate = random_move(instance, rng);
        if &candidate != original {
            return candidate;
        }
    }
    random_move(instance, rng)
}

fn distinct_pair(len: u32, rng: &mut impl Rng) -> (u32, u32) {
    let from = rng.gen_range(0..len);
    if len < 2 {
        return (from, from);
    }
    let mut to = rng.gen_range(0..len - 1);
    if to >= from {
        to += 1;
    }
    (from, to)
}

fn random_move(instance: &PuzzleInstance, rng: &mut impl Rng) -> Move {
    let n = instance.n();
    match instance.kind() {
        PuzzleKind::Hanoi => {
            let disk = rng.gen_range(1..=n);
            let (from, to) = distinct_pair(3, rng);
            Move::Hanoi { disk, from, to }
        }
        PuzzleKind::Checker => {
            let (from, to) = distinct_pair(2 * n + 1, rng);
            Move::Checker { from, to }
        }
        PuzzleKind::Blocks => {
            let (from, to) = distinct_pair(n, rng);
            Move::Blocks { from, to }
        }
        PuzzleKind::River => {
            let people = 2 * n as usize;
            let cap = (instance.k().unwrap_or(2) as usize).min(people);
            // Group size weighted by how many groups of that size exist.
            let weights: Vec<f64> = (1..=cap).map(|s| binomial(people, s)).collect();
            let mut pick = rng.gen::<f64>() * weights.iter().sum::<f64>();
            let mut size = cap;
            for (i, w) in weights.iter().enumerate() {
                if pick < *w {
                    size = i + 1;
                    break;
                }
                pick -= w;
            }
            let chosen = sample(rng, people, size)
                .into_iter()
                .map(|idx| {
                    let index = (idx / 2) as u32 + 1;
                    if idx % 2 == 0 {
                        Individual::actor(index)
                    } else {
                        Individual::agent(index)
                    }
                })
                .collect();
            Move::River(Passengers::new(chosen))
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Reference moves with each one independently replaced with probability `1 - p`.
pub(crate) fn noisy_moves(instance: &PuzzleInstance, reference: &[Move], p: f64, rng: &mut impl Rng) -> Vec<Move> {
    reference
        .iter()
        .map(|mv| if rng.gen::<f64>() < p { mv.clone() } else { corrupt_move(instance, mv, rng) })
        .collect()
}

/// Replays the reference plan while only remembering the last `window` moves.
///
/// Before each move the agent rebuilds its belief of the current state by
/// applying just the remembered moves to the initial state (skipping any
/// that no longer apply), finds that belief in the reference trajectory and
/// continues from there. When the belief matches no reference state it starts
/// over from the first move. Output length equals the reference length.
pub(crate) fn forgetful_moves(instance: &PuzzleInstance, reference: &[Move], window: usize) -> Vec<Move> {
    let mut trajectory: HashMap<State, usize> = HashMap::new();
    let mut state = instance.initial_state();
    trajectory.insert(state.clone(), 0);
    for (i, mv) in reference.iter().enumerate() {
        instance.apply_in_place(&mut state, mv).expect("reference plan is legal");
        trajectory.entry(state.clone()).or_insert(i + 1);
    }

    let mut emitted: Vec<Move> = Vec::with_capacity(reference.len());
    for i in 0..reference.len() {
        let remembered = &emitted[i.saturating_sub(window)..];
        let position = if remembered.len() == emitted.len() {
            i
        } else {
            let mut belief = instance.initial_state();
            for mv in remembered {
                let _ = instance.apply_in_place(&mut belief, mv);
            }
            trajectory.get(&belief).copied().unwrap_or(0)
        };
        emitted.push(reference[position.min(reference.len() - 1)].clone());
    }
    emitted
}

/// The "pattern-based" schedule a fixated solver commits to.
pub(crate) fn heuristic_plan(instance: &PuzzleInstance) -> Vec<Move> {
    match instance.kind() {
        PuzzleKind::River => agents_first_ferry(instance),
        PuzzleKind::Hanoi => {
            let len = crate::analytics::hanoi_moves(instance.n().min(25)).unwrap_or(1) as usize;
            (0..len)
                .map(|i| {
                    let from = (i % 3) as u32;
                    Move::Hanoi { disk: 1, from, to: (from + 1) % 3 }
                })
                .collect()
        }
        PuzzleKind::Checker | PuzzleKind::Blocks => greedy_walk(instance),
    }
}

/// Ferry up to `k` agents across, send the first of them back alone, repeat;
/// actors follow once the agents are across. Ignores the safety rule, so it
/// fails whenever the boat cannot take everyone at once.
fn agents_first_ferry(instance: &PuzzleInstance) -> Vec<Move> {
    let n = instance.n();
    let k = instance.k().unwrap_or(2) as usize;
    let order: Vec<Individual> =
        (1..=n).map(Individual::agent).chain((1..=n).map(Individual::actor)).collect();
    let mut on_left: Vec<Individual> = order.clone();
    let mut moves = Vec::new();
    while !on_left.is_empty() {
        let group: Vec<Individual> = on_left.iter().take(k).copied().collect();
        on_left.retain(|p| !group.contains(p));
        moves.push(Move::River(Passengers::new(group.clone())));
        if on_left.is_empty() {
            break;
        }
        let back = group[0];
        moves.push(Move::River(Passengers::new(vec![back])));
        let pos = order.iter().position(|p| *p == back).expect("known individual");
        let insert_at = on_left
            .iter()
            .position(|p| order.iter().position(|q| q == p).expect("known") > pos)
            .unwrap_or(on_left.len());
        on_left.insert(insert_at, back);
    }
    moves
}

/// Takes the first legal move that does not undo the previous one, for as
/// many moves as the reference solution has, stopping early when stuck.
fn greedy_walk(instance: &PuzzleInstance) -> Vec<Move> {
    let budget = reference_solution(instance).trace().map_or(4 * instance.n() as usize, |t| t.len().max(1));
    let mut state = instance.initial_state();
    let mut previous: Option<State> = None;
    let mut moves = Vec::new();
    while moves.len() < budget && !instance.is_goal(&state) {
        let next = instance.legal_moves(&state).into_iter().find_map(|mv| {
            let s = instance.apply_move(&state, &mv).ok()?;
            (previous.as_ref() != Some(&s)).then_some((mv, s))
        });
        let Some((mv, s)) = next else { break };
        previous = Some(std::mem::replace(&mut state, s));
        moves.push(mv);
    }
    moves
}

/// The verified strategy a self-correcting solver switches to.
pub(crate) fn revised_plan(instance: &PuzzleInstance) -> SolveOutcome {
    match (instance.kind(), instance.k()) {
        (PuzzleKind::River, Some(k)) if k >= 4 => {
            solve_river_constructive(instance.n(), k).unwrap_or(SolveOutcome::LimitExceeded { states_explored: 0 })
        }
        _ => reference_solution(instance),
    }
}
