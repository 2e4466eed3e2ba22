//! End-to-end runs of the `cgplan` binary: exit codes, printed output,
//! and the files each subcommand leaves behind.

use cgplan_cli::sha256_hex;
use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::Command;

const DEMO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../demo/storyline.json");

const LOOP_GAME: &str = r#"{
  "states": [{"name": "v0", "owner": "P1", "reward": 1.0}],
  "edges": [{"from": "v0", "to": "v0"}],
  "initial": "v0"
}
"#;

const FLIP_SYSTEM: &str = "props: p\ninit: !p\ngoal: p\naction flip: p' <-> !p\n";

fn cgplan(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_cgplan"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("the binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8(output.stdout).expect("stdout is text"),
        String::from_utf8(output.stderr).expect("stderr is text"),
    )
}

fn jsonl(path: &Path) -> Vec<Value> {
    fs::read_to_string(path)
        .expect("trace exists")
        .lines()
        .map(|line| serde_json::from_str(line).expect("trace lines are JSON"))
        .collect()
}

#[test]
fn solve_prints_the_discounted_loop_value() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("loop.json"), LOOP_GAME).unwrap();
    let (code, stdout, _) =
        cgplan(dir.path(), &["solve", "loop.json", "--objective", "discounted", "--beta", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().next().unwrap(), "val1(v0) = 2.000000000");
    assert!(stdout.contains("choice1 v0 v0"));
}

#[test]
fn the_demo_plan_run_matches_the_story() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = cgplan(
        dir.path(),
        &[
            "plan", DEMO, "--objective", "average", "--goal", "0.5", "--trace", "t.jsonl",
            "--plan", "p.json", "--report", "r.json",
        ],
    );
    assert_eq!(code, 0);
    assert!(stdout.contains("FEASIBLE certified=0.600000000 goal=0.500000000 refinements=2"));

    let trace = jsonl(&dir.path().join("t.jsonl"));
    assert_eq!(trace.len(), 3);
    let statuses: Vec<&str> =
        trace.iter().map(|line| line["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["SPURIOUS", "SPURIOUS", "FEASIBLE"]);
    assert_eq!(trace[0]["split"]["operator"], "VALUE_FOCUS");
    assert_eq!(trace[0]["split"]["subset"], serde_json::json!(["v0"]));
    assert_eq!(trace[1]["split"]["operator"], "FOCUS_P2");
    assert_eq!(trace[2]["split"], Value::Null);
    let milestones = [0.15, 0.25, 0.6];
    for (line, expected) in trace.iter().zip(milestones) {
        let got = line["abstract_val1_initial"].as_f64().unwrap();
        assert!((got - expected).abs() <= 1e-6, "milestone {expected} came out {got}");
    }
    assert_eq!(
        trace.iter().map(|line| line["abstract_states"].as_u64().unwrap()).collect::<Vec<_>>(),
        [6, 7, 8],
    );

    let plan: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(plan["player"], 1);
    assert_eq!(plan["choice"]["v"], "v3");

    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "feasible");
    assert_eq!(report["exit_code"], 0);
    assert_eq!(report["trace"], "t.jsonl");
    assert_eq!(report["input_sha256"].as_str().unwrap(), sha256_hex(&fs::read(DEMO).unwrap()));
    assert!((report["values"]["certified_value"].as_f64().unwrap() - 0.6).abs() <= 1e-6);
    assert_eq!(report["values"]["refinements"], 2.0);
}

#[test]
fn goals_above_the_value_are_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = cgplan(
        dir.path(),
        &[
            "plan", DEMO, "--objective", "average", "--goal", "0.8", "--plan", "s.json",
            "--report", "r.json",
        ],
    );
    assert_eq!(code, 1);
    assert!(stdout.contains("INFEASIBLE certified=0.700000000 goal=0.800000000"));
    let spoiler: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(spoiler["player"], 2);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "infeasible");
    assert_eq!(report["exit_code"], 1);
}

#[test]
fn the_plan_lands_next_to_the_game_by_default() {
    let dir = tempfile::tempdir().unwrap();
    fs::copy(DEMO, dir.path().join("game.json")).unwrap();
    let (code, stdout, _) =
        cgplan(dir.path(), &["plan", "game.json", "--objective", "average", "--goal", "0.5"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("plan written to game.plan.json"));
    assert!(dir.path().join("game.plan.json").exists());
}

#[test]
fn iteration_caps_stop_the_planner() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = cgplan(
        dir.path(),
        &["plan", DEMO, "--objective", "average", "--goal", "0.5", "--max-iters", "1"],
    );
    assert_eq!(code, 2);
    assert!(stderr.contains("within 1 iterations"), "stderr was: {stderr}");
}

#[test]
fn boolplan_solves_flip() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("flip.bp"), FLIP_SYSTEM).unwrap();
    let (code, stdout, _) = cgplan(dir.path(), &["boolplan", "flip.bp", "--trace", "bt.jsonl"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("FEASIBLE steps=1"));
    assert!(stdout.contains("plan: flip"));

    let trace = jsonl(&dir.path().join("bt.jsonl"));
    assert_eq!(trace.len(), 2);
    assert_eq!(trace[0]["status"], "SPURIOUS");
    assert_eq!(trace[0]["added"], serde_json::json!(["p"]));
    assert_eq!(trace[1]["status"], "FEASIBLE");
    assert_eq!(trace[1]["abstract_plan"], serde_json::json!(["flip"]));
}

#[test]
fn boolplan_reports_unreachable_goals() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("stuck.bp"), "props: p\ninit: p\ngoal: p & !p\naction wait: p' <-> p\n")
        .unwrap();
    let (code, stdout, _) =
        cgplan(dir.path(), &["boolplan", "stuck.bp", "--report", "r.json"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("INFEASIBLE"));
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "unreachable");
    assert_eq!(report["exit_code"], 1);
}

#[test]
fn validate_is_a_three_way_verdict() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("good.json"), LOOP_GAME).unwrap();
    let (code, stdout, _) = cgplan(dir.path(), &["validate", "good.json"]);
    assert_eq!((code, stdout.trim()), (0, "VALID"));

    let broken = LOOP_GAME.replace(r#"{"from": "v0", "to": "v0"}"#, r#"{"from": "v0", "to": "v0", "weight": 0.5}"#);
    fs::write(dir.path().join("broken.json"), broken).unwrap();
    let (code, stdout, _) = cgplan(dir.path(), &["validate", "broken.json"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("INVALID:"));

    fs::write(dir.path().join("prose.json"), "not json at all").unwrap();
    let (code, _, stderr) = cgplan(dir.path(), &["validate", "prose.json"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("not JSON"));

    let (code, _, _) = cgplan(dir.path(), &["validate", "absent.json"]);
    assert_eq!(code, 2);
}

#[test]
fn classify_names_the_class() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("loop.json"), LOOP_GAME).unwrap();
    let (code, stdout, _) = cgplan(dir.path(), &["classify", DEMO]);
    assert_eq!((code, stdout.trim()), (0, "GAME"));
    let (code, stdout, _) = cgplan(dir.path(), &["classify", "loop.json"]);
    assert_eq!((code, stdout.trim()), (0, "TRANSITION_SYSTEM"));
}

#[test]
fn oracle_agrees_with_solve_on_the_demo() {
    let dir = tempfile::tempdir().unwrap();
    let (code, oracle_out, _) = cgplan(dir.path(), &["oracle", DEMO, "--objective", "average"]);
    assert_eq!(code, 0);
    assert_eq!(oracle_out.lines().next().unwrap(), "val1(v) = 0.700000000");
    let (_, solve_out, _) = cgplan(dir.path(), &["solve", DEMO, "--objective", "average"]);
    let values = |text: &str| -> Vec<String> {
        text.lines().filter(|l| l.starts_with("value ")).map(str::to_string).collect()
    };
    assert_eq!(values(&oracle_out), values(&solve_out));
}

#[test]
fn abstract_emits_the_quotient() {
    let dir = tempfile::tempdir().unwrap();
    let game = r#"{
  "states": [
    {"name": "a", "owner": "P1", "reward": 0.0},
    {"name": "b", "owner": "P1", "reward": 1.0},
    {"name": "c", "owner": "P1", "reward": 0.0}
  ],
  "edges": [
    {"from": "a", "to": "b"},
    {"from": "a", "to": "c"},
    {"from": "b", "to": "b"},
    {"from": "c", "to": "c"}
  ],
  "initial": "a"
}
"#;
    fs::write(dir.path().join("g.json"), game).unwrap();
    fs::write(dir.path().join("part.json"), r#"{"blocks": [["a"], ["b", "c"]]}"#).unwrap();
    let (code, _, _) = cgplan(
        dir.path(),
        &["abstract", "g.json", "--partition", "part.json", "--out", "abs.json"],
    );
    assert_eq!(code, 0);
    let quotient: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("abs.json")).unwrap()).unwrap();
    assert_eq!(quotient["states"].as_array().unwrap().len(), 2);
    let annex = quotient["concretization"].as_object().unwrap();
    assert!(annex.values().any(|members| members == &serde_json::json!(["b", "c"])));

    // Without --out the quotient goes to stdout.
    let (code, stdout, _) =
        cgplan(dir.path(), &["abstract", "g.json", "--partition", "part.json"]);
    assert_eq!(code, 0);
    let inline: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(inline["states"], quotient["states"]);
}

#[test]
fn generated_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "random", "--states", "6", "--seed", "7", "--out"];
    let (code, _, _) = cgplan(dir.path(), &[&args[..], &["a.json"]].concat());
    assert_eq!(code, 0);
    let (code, _, _) = cgplan(dir.path(), &[&args[..], &["b.json"]].concat());
    assert_eq!(code, 0);
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);

    let (code, stdout, _) = cgplan(dir.path(), &["validate", "a.json"]);
    assert_eq!((code, stdout.trim()), (0, "VALID"));

    let (code, _, stderr) = cgplan(dir.path(), &["gen", "random", "--states", "0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("state count"));
}

#[test]
fn gridworld_runs_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = cgplan(
        dir.path(),
        &[
            "gen", "gridworld", "--width", "1", "--height", "2", "--seed", "7", "--out",
            "gw.json", "--report", "r.json",
        ],
    );
    assert_eq!(code, 0);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "generated");
    assert_eq!(report["seed"], 7);

    let (code, stdout, _) = cgplan(dir.path(), &["solve", "gw.json", "--objective", "average"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().next().unwrap(), "val1(c_0_0) = 1.000000000");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("loop.json"), LOOP_GAME).unwrap();

    let (code, _, _) = cgplan(dir.path(), &["frobnicate"]);
    assert_eq!(code, 2);

    let (code, _, _) = cgplan(dir.path(), &["plan", "loop.json", "--objective", "average"]);
    assert_eq!(code, 2);

    let (code, _, stderr) =
        cgplan(dir.path(), &["solve", "loop.json", "--objective", "average", "--beta", "0.5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--beta"));

    let (code, _, stderr) =
        cgplan(dir.path(), &["solve", "loop.json", "--objective", "discounted"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--beta"));
}

#[test]
fn failed_runs_still_leave_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = cgplan(
        dir.path(),
        &["solve", "absent.json", "--objective", "average", "--report", "r.json"],
    );
    assert_eq!(code, 2);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"], "error");
    assert_eq!(report["exit_code"], 2);
}
