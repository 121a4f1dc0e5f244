use serde_json::Value;

use gapbench_web::{model_curves, play, sweep};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn curves_report_cliff_and_horizons() {
    let v = parse(&model_curves(64_000, 8.0, "0.999, 0.9999, 0.99999", 20));
    assert_eq!(v["cliff"], 13);
    // Smallest n whose 2^n - 1 move run succeeds with probability below 1/2.
    let horizon = |p: f64| (1..64).find(|&n| p.powf(2f64.powi(n) - 1.0) < 0.5).unwrap();
    let expected: Vec<i32> = [0.999, 0.9999, 0.99999].iter().map(|&p| horizon(p)).collect();
    assert_eq!(v["horizons"], serde_json::json!(expected));
    assert_eq!(expected[0], 10);
    assert_eq!(expected[2], 17);
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
    assert_eq!(v["rows"][12]["token_cost"], 65528.0);
    assert!(parse(&model_curves(64_000, 8.0, "x", 5))["error"].is_string());
}

#[test]
fn play_steps_through_the_reference_solution() {
    let v = parse(&play("hanoi", 3, 0, 0, ""));
    assert_eq!(v["status"], "Solved");
    assert_eq!(v["moves"].as_array().unwrap().len(), 7);
    assert_eq!(v["states"].as_array().unwrap().len(), 8);
    assert_eq!(v["states"][7]["pegs"], serde_json::json!([[], [], [3, 2, 1]]));
    assert_eq!(parse(&play("river", 6, 3, 0, ""))["status"], "Unsolvable");
    assert!(parse(&play("blocks", 5, 0, 4, ""))["goal"].is_array());
}

#[test]
fn play_stops_at_the_first_illegal_move() {
    let v = parse(&play("hanoi", 3, 0, 0, "[[1,0,2],[2,0,2],[1,2,1]]"));
    assert_eq!(v["status"], "IllegalMove");
    assert_eq!(v["first_failure_index"], 1);
    assert_eq!(v["failure_reason"], "LargerOnSmaller");
    assert_eq!(v["states"].as_array().unwrap().len(), 2);
    assert_eq!(parse(&play("hanoi", 3, 0, 0, "[[1,0"))["status"], "ParseError");
    assert!(parse(&play("hanoi", 14, 0, 0, ""))["error"].is_string());
}

#[test]
fn sweep_returns_a_report() {
    let csv = sweep("truncating:64000:8", "hanoi", 11, 14, 0, 3, "text", 1);
    let accuracy: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(accuracy, ["1.000000", "1.000000", "0.000000", "0.000000"]);
    assert_eq!(csv, sweep("truncating:64000:8", "hanoi", 11, 14, 0, 3, "text", 1));
    assert!(parse(&sweep("perfect", "hanoi", 1, 40, 0, 3, "text", 1))["error"].is_string());
}
