use std::io::Write;
use std::process::{Command, Stdio};

use gapbench_cli::{parse_range, run_cli, EXIT_NEGATIVE, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_input(args, "")
}

fn run_with_input(args: &[&str], input: &str) -> (i32, String, String) {
    let mut argv = vec!["gapbench"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(argv, &mut input.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Recursive Hanoi in the canonical trace format.
fn hanoi_oracle(n: u32, from: u32, to: u32, via: u32, out: &mut Vec<String>) {
    if n == 0 {
        return;
    }
    hanoi_oracle(n - 1, from, via, to, out);
    out.push(format!("[{n},{from},{to}]"));
    hanoi_oracle(n - 1, via, to, from, out);
}

#[test]
fn solve_hanoi_prints_the_recursive_trace() {
    let (code, out, _) = run(&["solve", "--kind", "hanoi", "--n", "3"]);
    let mut moves = Vec::new();
    hanoi_oracle(3, 0, 2, 1, &mut moves);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), format!("[{}]", moves.join(",")));
    assert_eq!(moves.len(), 7);
}

#[test]
fn unsolvable_river_exits_one() {
    let (code, out, _) = run(&["solve", "--kind", "river", "--n", "6", "--k", "3"]);
    assert_eq!(code, EXIT_NEGATIVE);
    assert!(out.starts_with("UNSOLVABLE (states_explored="), "{out}");
}

#[test]
fn model_table_first_over_budget_row_is_13() {
    let (code, out, _) = run(&["model", "--budget", "64000", "--tokens-per-move", "8", "--n-range", "1..20"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("n,moves,token_cost,p_success_"));
    let first = lines
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .find(|cols| cols[2].parse::<f64>().unwrap() > 64_000.0)
        .unwrap();
    assert_eq!((first[0].as_str(), first[2].as_str()), ("13", "65528"));
    assert_eq!(out, run(&["model", "--n-range", "1..20"]).1, "output must be byte-stable");
}

#[test]
fn validate_accepts_solve_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases: Vec<Vec<String>> = (1..=6)
        .flat_map(|n| {
            let n = n.to_string();
            vec![
                vec!["--kind".into(), "hanoi".into(), "--n".into(), n.clone()],
                vec!["--kind".into(), "checker".into(), "--n".into(), n.clone()],
                vec!["--kind".into(), "blocks".into(), "--n".into(), n.clone(), "--seed".into(), "9".into()],
                vec!["--kind".into(), "river".into(), "--n".into(), n.clone(), "--k".into(), "4".into()],
            ]
        })
        .chain([vec!["--kind".into(), "river".into(), "--n".into(), "3".into(), "--k".into(), "2".into()]])
        .collect();
    for (i, case) in cases.iter().enumerate() {
        let args: Vec<&str> = case.iter().map(String::as_str).collect();
        let (code, trace, _) = run(&[&["solve"], args.as_slice()].concat());
        assert_eq!(code, EXIT_OK, "{case:?}");
        let path = dir.path().join(format!("{i}.txt"));
        std::fs::write(&path, &trace).unwrap();
        let file = path.to_str().unwrap();
        let (code, summary, _) = run(&[&["validate"], args.as_slice(), &["--trace-file", file]].concat());
        assert_eq!(code, EXIT_OK, "{case:?}: {summary}");
        assert!(summary.starts_with("status: Solved\n"));
    }
}

#[test]
fn validate_reports_the_first_illegal_move() {
    let trace = "[[1,0,2],[2,0,2],[1,2,1]]";
    let (code, out, _) = run_with_input(&["validate", "--kind", "hanoi", "--n", "3", "--trace-file", "-"], trace);
    assert_eq!(code, EXIT_NEGATIVE);
    assert_eq!(
        out,
        "status: IllegalMove\nfirst_failure_index: 1\nfailure_reason: LargerOnSmaller\nvalid_prefix_len: 1\nmoves_total: 3\n"
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["solve", "--kind", "hanoi"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--kind", "lattice", "--n", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve", "--kind", "river", "--n", "3"]).0, EXIT_USAGE);
    assert_eq!(run(&["model", "--n-range", "5..2"]).0, EXIT_USAGE);
    assert_eq!(run(&["bogus"]).0, EXIT_USAGE);
    let (code, _, err) = run(&["solve", "--kind", "hanoi", "--n", "3", "--strategy", "exact"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error:"));
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn range_syntax() {
    assert_eq!(parse_range("1..20").unwrap(), 1..=20);
    assert_eq!(parse_range("1..=20").unwrap(), 1..=20);
    assert_eq!(parse_range("7").unwrap(), 7..=7);
    assert!(parse_range("0..3").is_err());
    assert!(parse_range("a..3").is_err());
}

#[test]
fn sweep_writes_report_and_replayable_episodes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let args = [
        "sweep", "--agent", "noisy:0.99", "--agent", "selfcorrecting", "--kind", "river", "--k", "4", "--n-range",
        "2..4", "--samples", "4", "--mode", "agentic", "--seed", "3", "--out-dir", out_dir,
    ];
    let (code, csv, _) = run(&args);
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    assert_eq!(std::fs::read_to_string(dir.path().join("report.csv")).unwrap(), csv);
    let episodes = dir.path().join("episodes.jsonl");
    assert_eq!(std::fs::read_to_string(&episodes).unwrap().lines().count(), 24);
    let (code, out, _) = run(&["replay", "--episodes", episodes.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "replayed 24 episodes, 0 mismatches\n");
    assert_eq!(run(&["replay", "--episodes", "/nonexistent/episodes.jsonl"]).0, EXIT_USAGE);
}

#[test]
fn serve_over_standard_streams_matches_golden_transcript() {
    let requests = include_str!("../../core/tests/golden/session.requests.jsonl");
    let responses = include_str!("../../core/tests/golden/session.responses.jsonl");
    let mut child = Command::new(env!("CARGO_BIN_EXE_gapbench"))
        .args(["serve", "--transport", "stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(requests.as_bytes()).unwrap();
    let output = child.wait_with_output().unwrap();
    assert!(output.status.success());
    assert_eq!(String::from_utf8(output.stdout).unwrap(), responses);
}
