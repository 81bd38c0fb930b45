use contextuality::cli::{run, EXIT_FAILS, EXIT_GUARD, EXIT_HOLDS, EXIT_INPUT};
use contextuality::document::{parse_system, serialize_system};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("contextuality").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, _) = invoke(args);
    (code, serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}")))
}

#[test]
fn exit_codes_on_every_fixture() {
    let (h, f, i) = (EXIT_HOLDS, EXIT_FAILS, EXIT_INPUT);
    let commands: [&[&str]; 9] = [
        &["validate"],
        &["scc"],
        &["contextuality", "--encoding", "scc"],
        &["contextuality", "--encoding", "cbd"],
        &["cfd"],
        &["gcfd"],
        &["cyclic3"],
        &["report"],
        &["fcf", "--context", "1"],
    ];
    let expected: [(&str, [i32; 9]); 5] = [
        ("magic_box", [h, h, f, f, h, h, f, h, h]),
        ("generic_example", [h, h, h, h, h, h, i, h, h]),
        ("disturbed_cycle", [h, f, i, h, i, h, h, h, h]),
        ("disturbed_contextual_cycle", [h, f, i, f, i, h, f, h, h]),
        ("single_context", [h, h, h, h, h, h, i, h, h]),
    ];
    for (name, codes) in expected {
        let path = fixture(&format!("{name}.json"));
        for (cmd, want) in commands.iter().zip(codes) {
            let mut args = cmd.to_vec();
            args.push(&path);
            assert_eq!(invoke(&args).0, want, "{name}: {cmd:?}");
        }
    }
}

#[test]
fn magic_box_contextuality_without_extension() {
    let path = fixture("magic_box");
    let (code, v) = json(&["contextuality", "--encoding", "scc", &path]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(v["noncontextual"], false);
    let (code, v) = json(&["contextuality", "--witness", &path]);
    assert_eq!(code, EXIT_FAILS);
    assert!(!v["certificate"].as_array().unwrap().is_empty());
}

#[test]
fn magic_box_cfd_and_cyclic() {
    let path = fixture("magic_box.json");
    let (code, v) = json(&["cfd", &path]);
    assert_eq!(code, EXIT_HOLDS);
    assert_eq!(v["holds"], true);
    assert_eq!(v["per_context"].as_object().unwrap().len(), 3);

    let (code, v) = json(&["cyclic3", &path]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!((v["lhs"].as_str(), v["rhs"].as_str()), (Some("3"), Some("1")));
    let (_, text, _) = invoke(&["--format", "text", "cyclic3", &path]);
    assert_eq!(text.trim(), "cyclic rank 3: lhs 3 > rhs 1 -> contextual");
}

#[test]
fn fcf_prints_a_loadable_subsystem() {
    let (code, out, _) = invoke(&["fcf", "--context", "2", &fixture("generic_example.json")]);
    assert_eq!(code, EXIT_HOLDS);
    let sub = parse_system(&out).unwrap();
    assert_eq!(sub.contents().cloned().collect::<Vec<_>>(), ["2", "3", "4"]);
    assert_eq!(sub.block("3").unwrap().contents, ["3"]);
    assert_eq!(sub.num_contexts(), 4);

    let (code, _, err) = invoke(&["fcf", "--context", "9", &fixture("generic_example.json")]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains('9'));
}

#[test]
fn reports_are_byte_identical_across_runs_and_jobs() {
    let files: Vec<String> = ["magic_box", "generic_example", "disturbed_contextual_cycle"]
        .iter()
        .map(|n| fixture(&format!("{n}.json")))
        .collect();
    let mut args = vec!["report", "--witness"];
    args.extend(files.iter().map(String::as_str));
    let first = invoke(&args).1;
    assert_eq!(first, invoke(&args).1);
    let mut parallel = vec!["--jobs", "3"];
    parallel.extend(&args);
    assert_eq!(first, invoke(&parallel).1);
}

#[test]
fn documents_round_trip_on_every_fixture() {
    for entry in std::fs::read_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let sys = parse_system(&text).unwrap();
        assert_eq!(serialize_system(&sys), text);
        assert_eq!(parse_system(&serialize_system(&sys)).unwrap(), sys);
    }
}

#[test]
fn guard_reports_the_dimension_product() {
    let (code, _, err) = invoke(&["--max-columns", "4", "contextuality", &fixture("magic_box.json")]);
    assert_eq!(code, EXIT_GUARD);
    assert!(err.contains("2 × 2 × 2 = 8"), "{err}");
}

fn write_temp(text: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.json");
    std::fs::write(&path, text).unwrap();
    (dir, path)
}

#[test]
fn validate_points_at_the_offending_field() {
    let text = std::fs::read_to_string(fixture("single_context.json")).unwrap().replace("\"1/2\"", "\"1/4\"");
    let (_dir, path) = write_temp(&text);
    let (code, v) = json(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_FAILS);
    assert_eq!(v["valid"], false);
    assert!(v["violations"].to_string().contains("contexts[0].distribution"), "{v}");
    // the analyses refuse the same file as input
    assert_eq!(invoke(&["scc", path.to_str().unwrap()]).0, EXIT_INPUT);
}

#[test]
fn unreadable_and_malformed_input() {
    assert_eq!(invoke(&["scc", "/nonexistent/system.json"]).0, EXIT_INPUT);
    let (_dir, path) = write_temp("{\"version\": 1, \"contents\": [");
    let (code, _, err) = invoke(&["scc", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 1"), "{err}");
    assert_ne!(invoke(&["frobnicate"]).0, EXIT_HOLDS);
}

#[test]
fn worst_exit_code_wins_across_files() {
    let (good, bad) = (fixture("magic_box.json"), fixture("disturbed_cycle.json"));
    assert_eq!(invoke(&["scc", &good, &bad]).0, EXIT_FAILS);
    assert_eq!(invoke(&["scc", &good, "/nonexistent.json", &bad]).0, EXIT_INPUT);
}

#[test]
fn demo_runs() {
    let (code, out, _) = invoke(&["--format", "text", "demo"]);
    assert_eq!(invoke(&["demo"]).0, EXIT_HOLDS);
    assert_eq!(code, EXIT_HOLDS);
    assert!(out.contains("lhs 3 > rhs 1"));
}

#[test]
fn binary_exit_status_matches_contract() {
    let bin = env!("CARGO_BIN_EXE_contextuality");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["cfd", &fixture("magic_box.json")]), Some(EXIT_HOLDS));
    assert_eq!(status(&["contextuality", &fixture("magic_box.json")]), Some(EXIT_FAILS));
    assert_eq!(status(&["scc", "/nonexistent.json"]), Some(EXIT_INPUT));
    assert_eq!(status(&["--max-columns", "2", "contextuality", &fixture("magic_box.json")]), Some(EXIT_GUARD));
}
