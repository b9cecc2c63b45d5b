use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmdelay::format::{read_flow, read_instance};
use mmdelay::gadgets::gap_composite;
use mmdelay::model::check_flow;
use mmdelay::Rational;
use serde_json::Value;
use tempfile::TempDir;

fn mmdelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmdelay"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let o = mmdelay(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn block_at_four_thirds_has_delay_one() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "block5.json", &["block", "--n", "5"]);
    let o = mmdelay(&["solve", "--instance", f.to_str().unwrap(), "--rate", "4/3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("max_delay: 1\n"), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("  rate 1/3")).count(), 4);
}

#[test]
fn composite_gap_is_two() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "composite5.json", &["composite", "--n", "5"]);
    let o = mmdelay(&["gap", "--instance", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("int_gap: 2\n"));
}

#[test]
fn generated_file_matches_library() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "c.json", &["composite", "--n", "5"]);
    let read = read_instance(&std::fs::read(f).unwrap()).unwrap();
    assert_eq!(read, gap_composite(5).unwrap());
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(mmdelay(&["solve", "--instance", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(mmdelay(&["solve"]).status.code(), Some(2));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"nodes\": [\n").unwrap();
    let o = mmdelay(&["solve", "--instance", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    let f = generate(dir.path(), "block.json", &["block", "--n", "3"]);
    let f = f.to_str().unwrap();
    let o = mmdelay(&["solve", "--instance", f, "--rate", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("max_flow: 2"));
    assert_eq!(mmdelay(&["solve", "--instance", f, "--solver", "nope"]).status.code(), Some(2));
    assert_eq!(mmdelay(&["intsolve", "--instance", f, "--rate", "3/2"]).status.code(), Some(2));

    let c = generate(dir.path(), "c.json", &["composite", "--n", "5"]);
    let o = mmdelay(&["intsolve", "--instance", c.to_str().unwrap(), "--budget", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn json_round_trips_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "p.json", &["partition", "--values", "3,1,2"]);
    let f = f.to_str().unwrap();
    let args = ["solve", "--instance", f, "--json"];
    let first = mmdelay(&args);
    let second = mmdelay(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);

    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(doc["max_delay"], 3);
    let inst = read_instance(&std::fs::read(f).unwrap()).unwrap();
    let flow = read_flow(&inst, serde_json::to_string(&doc["flow"]).unwrap().as_bytes()).unwrap();
    assert!(check_flow(&inst, &flow, &Rational::from_integer(2)).is_empty());
}

#[test]
fn trace_lists_probes() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "b.json", &["block", "--n", "5", "--rate", "2"]);
    let o = mmdelay(&["solve", "--instance", f.to_str().unwrap(), "--trace"]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("T\tr*(T)\tbranch"));
    let probes: Vec<&str> = lines.take_while(|l| !l.starts_with("max_delay")).collect();
    assert!(!probes.is_empty());
    assert!(probes.iter().all(|l| l.ends_with("upper") || l.ends_with("lower")));
    assert!(out.contains("max_delay: 2\n"));
}

#[test]
fn dcmaxflow_strategies_agree_and_dump_lp() {
    let dir = TempDir::new().unwrap();
    let f = generate(dir.path(), "b.json", &["block", "--n", "3"]);
    let f = f.to_str().unwrap();
    let a = stdout(&mmdelay(&["dcmaxflow", "--instance", f, "--delay-bound", "1"]));
    let b = stdout(&mmdelay(&["dcmaxflow", "--instance", f, "--delay-bound", "1", "--strategy", "path-lp"]));
    assert!(a.contains("max_flow: 2\n"));
    assert!(b.contains("max_flow: 2\n"));
    let dump = stdout(&mmdelay(&["dcmaxflow", "--instance", f, "--delay-bound", "1", "--dump-lp"]));
    assert!(dump.starts_with("maximize"));
    assert!(dump.contains("cap[dash_1]"));
}

#[test]
fn verify_directory_in_parallel() {
    let dir = TempDir::new().unwrap();
    generate(dir.path(), "a.json", &["block", "--n", "4"]);
    generate(dir.path(), "b.json", &["partition", "--values", "1,1,4"]);
    for seed in ["1", "2", "3"] {
        generate(
            dir.path(),
            &format!("r{seed}.json"),
            &["random", "--seed", seed, "--nodes", "5", "--edges", "8", "--rate", "2"],
        );
    }
    let d = dir.path().to_str().unwrap();
    let serial = mmdelay(&["verify", "--dir", d]);
    let parallel = mmdelay(&["verify", "--dir", d, "--jobs", "4"]);
    assert_eq!(serial.status.code(), Some(0), "{}", stdout(&serial));
    assert_eq!(serial.stdout, parallel.stdout);
    assert!(stdout(&serial).ends_with("5 of 5 instances passed\n"));
    assert!(!stdout(&serial).contains("FAIL"));
}
