//! Solvers checked against small, independently written reference searches.

use std::collections::{HashMap, HashSet, VecDeque};

use gapbench_core::adjudicator::adjudicate;
use gapbench_core::puzzle::{format_trace, Move, PuzzleInstance, PuzzleKind};
use gapbench_core::solvers::{
    reference_solution, solve_bfs, solve_blocks, solve_checker, solve_hanoi, solve_river_constructive,
    BlocksStrategy, SolveOutcome,
};

/// Iterative Hanoi: odd steps move disk 1 one peg along a fixed cycle, even
/// steps make the only other legal move.
fn hanoi_iterative(n: u32) -> Vec<(u32, u32, u32)> {
    let mut pegs: [Vec<u32>; 3] = [(1..=n).rev().collect(), vec![], vec![]];
    let cycle = if n % 2 == 1 { [0, 2, 1] } else { [0, 1, 2] };
    let mut small_at = 0usize;
    let mut out = Vec::new();
    for step in 0..(1u64 << n) - 1 {
        if step % 2 == 0 {
            let from = cycle[small_at];
            small_at = (small_at + 1) % 3;
            let to = cycle[small_at];
            let d = pegs[from].pop().unwrap();
            pegs[to].push(d);
            out.push((1, from as u32, to as u32));
        } else {
            let others: Vec<usize> = (0..3).filter(|&p| p != cycle[small_at]).collect();
            let (a, b) = (others[0], others[1]);
            let (from, to) = match (pegs[a].last(), pegs[b].last()) {
                (Some(x), Some(y)) if x < y => (a, b),
                (Some(_), Some(_)) => (b, a),
                (Some(_), None) => (a, b),
                _ => (b, a),
            };
            let d = pegs[from].pop().unwrap();
            pegs[to].push(d);
            out.push((d, from as u32, to as u32));
        }
    }
    out
}

/// Plain BFS over checker strings.
fn checker_distance(n: usize) -> usize {
    let start: String = "R".repeat(n) + "_" + &"B".repeat(n);
    let goal: String = "B".repeat(n) + "_" + &"R".repeat(n);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((s, d)) = queue.pop_front() {
        if s == goal {
            return d;
        }
        let cells: Vec<char> = s.chars().collect();
        let e = cells.iter().position(|&c| c == '_').unwrap() as isize;
        for (offset, colour) in [(-1, 'R'), (-2, 'R'), (1, 'B'), (2, 'B')] {
            let from = e + offset;
            if from < 0 || from >= cells.len() as isize || cells[from as usize] != colour {
                continue;
            }
            if offset.abs() == 2 {
                let mid = cells[((from + e) / 2) as usize];
                if mid == colour || mid == '_' {
                    continue;
                }
            }
            let mut next = cells.clone();
            next.swap(from as usize, e as usize);
            let next: String = next.into_iter().collect();
            if seen.insert(next.clone()) {
                queue.push_back((next, d + 1));
            }
        }
    }
    usize::MAX
}

/// BFS over (left-bank set, boat side) with couples encoded as bits
/// `2i` (actor) and `2i + 1` (agent).
fn river_distance(n: usize, k: usize) -> Option<usize> {
    let people = 2 * n;
    let all: u32 = (1 << people) - 1;
    let safe = |group: u32| {
        let agents = (0..n).filter(|i| group >> (2 * i + 1) & 1 == 1).count();
        agents == 0 || (0..n).all(|i| group >> (2 * i) & 1 == 0 || group >> (2 * i + 1) & 1 == 1)
    };
    let mut seen = HashSet::from([(all, true)]);
    let mut queue = VecDeque::from([((all, true), 0)]);
    while let Some(((left, boat_left), d)) = queue.pop_front() {
        if left == 0 {
            return Some(d);
        }
        let bank = if boat_left { left } else { all & !left };
        let mut sub = bank;
        while sub != 0 {
            if (sub.count_ones() as usize) <= k {
                let from_after = bank & !sub;
                let to_after = (all & !bank) | sub;
                if safe(sub) && safe(from_after) && safe(to_after) {
                    let next = (if boat_left { left & !sub } else { left | sub }, !boat_left);
                    if seen.insert(next) {
                        queue.push_back((next, d + 1));
                    }
                }
            }
            sub = (sub - 1) & bank;
        }
    }
    None
}

fn bfs_len(instance: &PuzzleInstance) -> Option<usize> {
    solve_bfs(instance, 10_000_000).trace().map(|t| t.len())
}

#[test]
fn recursive_hanoi_matches_iterative_oracle() {
    for n in 1..=12 {
        let trace = solve_hanoi(n).unwrap();
        let moves: Vec<(u32, u32, u32)> = trace
            .moves
            .iter()
            .map(|m| match *m {
                Move::Hanoi { disk, from, to } => (disk, from, to),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(moves, hanoi_iterative(n), "n={n}");
    }
}

#[test]
fn hanoi_bfs_matches_closed_form() {
    for n in 1..=8 {
        let expected = (1usize << n) - 1;
        assert_eq!(bfs_len(&PuzzleInstance::hanoi(n).unwrap()), Some(expected), "n={n}");
    }
}

#[test]
fn checker_bfs_matches_oracle_and_closed_form() {
    for n in 1..=4u32 {
        let closed = ((n + 1) * (n + 1) - 1) as usize;
        assert_eq!(checker_distance(n as usize), closed);
        assert_eq!(bfs_len(&PuzzleInstance::checker(n).unwrap()), Some(closed), "n={n}");
        assert_eq!(solve_checker(n).unwrap().len(), closed);
    }
}

#[test]
fn river_solvability_table() {
    // Frozen from river_distance above; the library search must agree.
    let table: [((u32, u32), Option<usize>); 11] = [
        ((2, 2), Some(5)),
        ((3, 2), Some(11)),
        ((4, 2), None),
        ((2, 3), Some(3)),
        ((3, 3), Some(5)),
        ((4, 3), Some(9)),
        ((5, 3), Some(11)),
        ((6, 3), None),
        ((7, 3), None),
        ((8, 3), None),
        ((3, 4), Some(3)),
    ];
    for ((n, k), expected) in table {
        assert_eq!(river_distance(n as usize, k as usize), expected, "oracle n={n} k={k}");
        let outcome = solve_bfs(&PuzzleInstance::river(n, k).unwrap(), 10_000_000);
        match expected {
            Some(len) => assert_eq!(outcome.trace().map(|t| t.len()), Some(len), "n={n} k={k}"),
            None => assert!(matches!(outcome, SolveOutcome::Unsolvable { .. }), "n={n} k={k}"),
        }
    }
}

#[test]
fn unsolvable_is_stable_under_larger_limits() {
    let inst = PuzzleInstance::river(6, 3).unwrap();
    let SolveOutcome::Unsolvable { states_explored } = solve_bfs(&inst, 1_000) else { panic!() };
    for limit in [states_explored, states_explored * 10, 10_000_000] {
        assert_eq!(solve_bfs(&inst, limit), SolveOutcome::Unsolvable { states_explored });
    }
    assert!(matches!(solve_bfs(&inst, states_explored - 1), SolveOutcome::LimitExceeded { .. }));
}

#[test]
fn blocks_exact_is_optimal_and_heuristic_within_2n() {
    for seed in 0..40 {
        let n = 2 + (seed % 5) as u32;
        let inst = PuzzleInstance::blocks_seeded(n, seed).unwrap();
        let exact = solve_blocks(&inst, BlocksStrategy::Exact).unwrap();
        let heuristic = solve_blocks(&inst, BlocksStrategy::Heuristic).unwrap();
        let (e, h) = (exact.trace().unwrap(), heuristic.trace().unwrap());
        assert!(adjudicate(&inst, e).unwrap().is_solved());
        assert!(adjudicate(&inst, h).unwrap().is_solved());
        assert!(e.len() <= h.len() && h.len() <= 2 * n as usize, "seed={seed}");
    }
}

#[test]
fn every_solver_output_adjudicates_solved() {
    let mut instances = Vec::new();
    for n in 1..=10 {
        instances.push(PuzzleInstance::hanoi(n).unwrap());
        instances.push(PuzzleInstance::checker(n).unwrap());
        instances.push(PuzzleInstance::blocks_seeded(n, n as u64 * 31).unwrap());
    }
    for n in 2..=30 {
        for k in 4..=7 {
            instances.push(PuzzleInstance::river(n, k).unwrap());
        }
    }
    for (n, k) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (5, 3)] {
        instances.push(PuzzleInstance::river(n, k).unwrap());
    }
    for inst in &instances {
        let trace = reference_solution(inst).into_trace().unwrap_or_else(|| panic!("{inst:?}"));
        assert!(adjudicate(inst, &trace).unwrap().is_solved(), "{inst:?}: {}", format_trace(&trace));
    }
}

#[test]
fn constructive_river_length_is_linear() {
    let points: Vec<(f64, f64)> = (4..=40)
        .map(|n| (n as f64, solve_river_constructive(n, 4).unwrap().trace().unwrap().len() as f64))
        .collect();
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let intercept = (sy - slope * sx) / m;
    let max_residual = points.iter().map(|(x, y)| (y - (slope * x + intercept)).abs()).fold(0.0, f64::max);
    assert!(slope > 0.0);
    assert!(max_residual < 1e-9, "residual {max_residual}");
}

#[test]
fn checker_scale() {
    let trace = solve_checker(50).unwrap();
    assert_eq!(trace.len(), 2600);
    assert!(adjudicate(&PuzzleInstance::checker(50).unwrap(), &trace).unwrap().is_solved());
}

#[test]
fn bfs_shortest_lengths_agree_with_reference_where_optimal() {
    let mut checked: HashMap<PuzzleKind, usize> = HashMap::new();
    for n in 1..=6 {
        for inst in [PuzzleInstance::hanoi(n).unwrap(), PuzzleInstance::checker(n.min(4)).unwrap()] {
            if let SolveOutcome::Solution { trace, optimal: true } = reference_solution(&inst) {
                assert_eq!(bfs_len(&inst), Some(trace.len()));
                *checked.entry(inst.kind()).or_default() += 1;
            }
        }
    }
    assert_eq!(checked[&PuzzleKind::Hanoi], 6);
}
