use std::io::Write;

use gapbench_core::adjudicator::Status;
use gapbench_core::agents::{make_agent, AgentConfig, Archetype, Mode};
use gapbench_core::harness::{
    load_episodes, persist_episodes, replay_verdict, run_episode, run_sweep, Budgets, EpisodeRecord, SweepSpec,
};
use gapbench_core::puzzle::{PuzzleInstance, PuzzleKind};
use gapbench_core::solvers::reference_solution;
use gapbench_core::Error;

fn cfg(archetype: Archetype, seed: u64) -> AgentConfig {
    AgentConfig::new(archetype, seed)
}

fn mixed_records() -> Vec<EpisodeRecord> {
    let budgets = Budgets::default();
    let cases = [
        (cfg(Archetype::Perfect, 0), PuzzleInstance::hanoi(4).unwrap(), Mode::Text),
        (cfg(Archetype::Noisy { p: 0.9 }, 3), PuzzleInstance::checker(3).unwrap(), Mode::Text),
        (cfg(Archetype::GiveUp { move_threshold: 100 }, 0), PuzzleInstance::river(5, 3).unwrap(), Mode::Text),
        (cfg(Archetype::Forgetful { window_moves: 2 }, 0), PuzzleInstance::river(4, 3).unwrap(), Mode::Text),
        (cfg(Archetype::SelfCorrecting, 1), PuzzleInstance::river(8, 4).unwrap(), Mode::Agentic),
        (cfg(Archetype::Fixated, 1), PuzzleInstance::blocks_seeded(5, 77).unwrap(), Mode::Agentic),
        (
            cfg(Archetype::Perfect, 0),
            PuzzleInstance::blocks_explicit(vec![vec![2, 1], vec![3]], vec![vec![1, 2, 3]]).unwrap(),
            Mode::Text,
        ),
    ];
    cases.iter().map(|(c, i, m)| run_episode(c, i, *m, 5, &budgets).unwrap()).collect()
}

#[test]
fn episodes_round_trip_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("episodes.jsonl");
    let records = mixed_records();
    assert_eq!(persist_episodes(&records, &path).unwrap(), records.len());
    let loaded = load_episodes(&path).unwrap();
    assert_eq!(loaded, records);
    for r in &loaded {
        assert_eq!(replay_verdict(r).unwrap(), r.adjudication(), "{:?}", r.agent);
    }
    persist_episodes(&records[..2], &path).unwrap();
    assert_eq!(load_episodes(&path).unwrap().len(), records.len() + 2);
}

#[test]
fn corrupted_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("episodes.jsonl");
    let records = mixed_records();
    persist_episodes(&records[..3], &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let broken = lines[1][..lines[1].len() / 2].to_string();
    lines[1] = &broken;
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "{}", lines.join("\n")).unwrap();
    match load_episodes(&path) {
        Err(Error::Schema { line, .. }) => assert_eq!(line, 2),
        other => panic!("expected a schema error, got {other:?}"),
    }
    assert!(matches!(load_episodes(&dir.path().join("missing.jsonl")), Err(Error::Io(_))));
}

#[test]
fn identical_configs_give_identical_transcripts() {
    let a: Vec<_> = mixed_records().iter().map(EpisodeRecord::without_timing).collect();
    let b: Vec<_> = mixed_records().iter().map(EpisodeRecord::without_timing).collect();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());

    let inst = PuzzleInstance::hanoi(9).unwrap();
    let mut x = make_agent(cfg(Archetype::Noisy { p: 0.99 }, 4)).unwrap();
    let mut y = make_agent(cfg(Archetype::Noisy { p: 0.99 }, 4)).unwrap();
    assert_eq!(x.text_answer(&inst, 64_000), y.text_answer(&inst, 64_000));
}

#[test]
fn give_up_resigns_only_above_its_threshold() {
    // Threshold is compared with reference length times entities tracked per state.
    let instances = [
        PuzzleInstance::hanoi(3).unwrap(),
        PuzzleInstance::hanoi(6).unwrap(),
        PuzzleInstance::checker(2).unwrap(),
        PuzzleInstance::checker(5).unwrap(),
        PuzzleInstance::river(3, 3).unwrap(),
        PuzzleInstance::river(5, 3).unwrap(),
        PuzzleInstance::river(12, 6).unwrap(),
        PuzzleInstance::blocks_seeded(6, 2).unwrap(),
    ];
    let tracked = |i: &PuzzleInstance| match i.kind() {
        PuzzleKind::Hanoi | PuzzleKind::Blocks => i.n() as u64,
        PuzzleKind::Checker => 2 * i.n() as u64 + 1,
        PuzzleKind::River => 2 * i.n() as u64,
    };
    for threshold in [1, 20, 100, 500] {
        for inst in &instances {
            let len = reference_solution(inst).trace().unwrap().len() as u64;
            let r = run_episode(&cfg(Archetype::GiveUp { move_threshold: threshold }, 0), inst, Mode::Text, 0, &Budgets::default())
                .unwrap();
            assert_eq!(r.resigned, len * tracked(inst) > threshold, "{inst:?} t={threshold}");
            if !r.resigned {
                assert_eq!(r.status, Status::Solved);
            }
        }
    }
}

#[test]
fn forgetting_causes_state_drift_on_long_crossings() {
    let inst = PuzzleInstance::river(12, 4).unwrap();
    let r = run_episode(&cfg(Archetype::Forgetful { window_moves: 4 }, 0), &inst, Mode::Text, 0, &Budgets::default())
        .unwrap();
    assert_ne!(r.status, Status::Solved);
    let wide = run_episode(&cfg(Archetype::Forgetful { window_moves: 100 }, 0), &inst, Mode::Text, 0, &Budgets::default())
        .unwrap();
    assert_eq!(wide.status, Status::Solved);
}

#[test]
fn shared_agentic_baseline_on_small_crossings() {
    for (n, k) in [(2, 2), (3, 2), (2, 3), (3, 3), (4, 3), (5, 3), (4, 4), (5, 4)] {
        let inst = PuzzleInstance::river(n, k).unwrap();
        for archetype in [Archetype::Fixated, Archetype::SelfCorrecting] {
            let r = run_episode(&cfg(archetype.clone(), 0), &inst, Mode::Agentic, 0, &Budgets::default()).unwrap();
            assert_eq!(r.status, Status::Solved, "{archetype} n={n} k={k}");
        }
    }
}

/// Eager: Perfect writing the whole answer under a small token cap.
/// Deliberate: SelfCorrecting checking every move through the simulator,
/// paying tokens for each tool call, under a larger but finite cap.
#[test]
fn three_regimes() {
    let eager = cfg(Archetype::Perfect, 0);
    let deliberate = cfg(Archetype::SelfCorrecting, 0);
    let ns: Vec<u32> = (1..=13).collect();
    let mut text = SweepSpec::new(vec![eager], PuzzleKind::Hanoi, ns.clone(), Mode::Text, 21);
    text.samples_per_cell = 3;
    text.budgets.text_tokens = 1_000;
    let mut agentic = SweepSpec::new(vec![deliberate], PuzzleKind::Hanoi, ns, Mode::Agentic, 21);
    agentic.samples_per_cell = 3;
    agentic.budgets = Budgets { agentic_tokens: 20_000, tool_calls: 10_000, ..Budgets::default() };
    agentic.workers = 0;
    let eager = run_sweep(&text).unwrap().report;
    let deliberate = run_sweep(&agentic).unwrap().report;
    let acc = |report: &gapbench_core::harness::SweepReport, n: u32| report.rows.iter().find(|r| r.n == n).unwrap().accuracy_mean;

    for n in 1..=4 {
        assert!(acc(&eager, n) >= acc(&deliberate, n), "low band n={n}");
    }
    for n in 7..=9 {
        assert!(acc(&deliberate, n) > acc(&eager, n), "middle band n={n}");
    }
    for n in 12..=13 {
        assert_eq!((acc(&eager, n), acc(&deliberate, n)), (0.0, 0.0), "high band n={n}");
    }
}
