use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torsionlab")).args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

#[test]
fn homology_of_rp2() {
    let out = run(&["homology", data("rp2.complex").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == r#"{"degree":1,"betti":0,"torsion":[2]}"#), "{text}");
}

#[test]
fn homology_of_torus_and_pair() {
    let out = run(&["homology", data("torus.complex").to_str().unwrap()]);
    let betti: Vec<u64> = lines(&out).iter().map(|v| v["betti"].as_u64().unwrap()).collect();
    assert_eq!(betti, vec![1, 2, 1]);
    // An annulus relative to one boundary circle is acyclic.
    let out = run(&["homology", data("cylinder_rel.pair").to_str().unwrap()]);
    assert!(lines(&out).iter().all(|v| v["betti"] == 0 && v["torsion"].as_array().unwrap().is_empty()));
}

#[test]
fn parse_errors_exit_2_with_line() {
    let out = run(&["homology", data("empty.complex").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let out = run(&["homology", data("bad_line.complex").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = run(&["homology", "/nonexistent/file"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(64));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(run(&["dehn-fill", "--p", "2", "--q", "4"]).status.code(), Some(64));
    assert_eq!(run(&["dehn-table", "--p", "5..1", "--q", "1"]).status.code(), Some(64));
    assert_eq!(run(&["constants", "--d", "3", "--margulis-eps", "-1"]).status.code(), Some(64));
    assert_eq!(run(&["verify", "commutator", "--d", "1"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn precision_env_is_validated() {
    let bin = env!("CARGO_BIN_EXE_torsionlab");
    let path = data("rp2.complex");
    let bad = Command::new(bin).env("TORSIONLAB_PRECISION", "zero").args(["homology", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(bad.status.code(), Some(64));
    let good = Command::new(bin).env("TORSIONLAB_PRECISION", "128").args(["verify", "soule", "--count", "50"]).output().unwrap();
    assert_eq!(good.status.code(), Some(0));
}

#[test]
fn verify_suites_pass() {
    let out = run(&["verify", "soule", "--count", "1000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = lines(&out).pop().unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["count"], 1000);
    assert_eq!(run(&["verify", "commutator", "--d", "10"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "nerve", "--count", "6"]).status.code(), Some(0));
    assert_eq!(run(&["verify", "orbit", "--count", "20"]).status.code(), Some(0));
}

#[test]
fn soule_instances_carry_payloads() {
    let out = run(&["verify", "soule", "--count", "5", "--seed", "3"]);
    let all = lines(&out);
    let random: Vec<&Value> = all.iter().filter(|v| v["payload"]["kind"] == "matrix").collect();
    assert_eq!(random.len(), 5);
    for v in random {
        let rows = v["payload"]["rows"].as_u64().unwrap() as usize;
        assert_eq!(v["payload"]["entries"].as_array().unwrap().len(), rows);
    }
}

#[test]
fn constants_document() {
    let out = run(&["constants", "--d", "4", "--margulis-eps", "1", "--margulis-m", "2"]);
    let doc = lines(&out).pop().unwrap();
    assert_eq!(doc["eps"], "1/668168");
    let plain = lines(&run(&["constants", "--d", "2"])).pop().unwrap();
    assert!(plain.get("figure_eight_volume").is_none());
    let with = lines(&run(&["constants", "--d", "2", "--m8"])).pop().unwrap();
    assert!(with["figure_eight_volume"].as_f64().unwrap() < 2.03);
    let other = lines(&run(&["constants", "--d", "5", "--m8"])).pop().unwrap();
    assert_eq!(with["figure_eight_volume"], other["figure_eight_volume"]);
}

#[test]
fn dehn_commands() {
    let doc = lines(&run(&["dehn-fill", "--p", "5", "--q", "1"])).pop().unwrap();
    assert_eq!(doc["torsion"], serde_json::json!([5]));
    assert_eq!(doc["betti"], 0);
    let doc = lines(&run(&["dehn-fill", "--p", "0", "--q", "1"])).pop().unwrap();
    assert_eq!(doc["betti"], 1);
    let doc = lines(&run(&["dehn-fill", "--mu", "1,0", "--lambda", "0,0", "--relations", "0,3", "--p", "7", "--q", "3"]))
        .pop()
        .unwrap();
    assert_eq!(doc["torsion"], serde_json::json!([21]));
    let table = lines(&run(&["dehn-table", "--p", "1..50", "--q", "1..10"]));
    let excluded: Vec<(i64, i64)> = table
        .iter()
        .filter(|r| r["hyperbolic"] == "excluded")
        .map(|r| (r["p"].as_i64().unwrap(), r["q"].as_i64().unwrap()))
        .collect();
    assert_eq!(excluded, vec![(1, 1), (2, 1), (3, 1), (4, 1)]);
}

#[test]
fn nerve_and_displacement_commands() {
    let doc = lines(&run(&["nerve", data("circle8.cover").to_str().unwrap()])).pop().unwrap();
    assert_eq!(doc["homology"][1]["betti"], 1);
    let doc = lines(&run(&["nerve", data("h3_cluster.cover").to_str().unwrap()])).pop().unwrap();
    assert_eq!(doc["f_vector"], serde_json::json!([4, 6, 4, 1]));
    let out = run(&["displacement", data("isometries.txt").to_str().unwrap(), "--point", "1,0,0,0"]);
    let rows = lines(&out);
    assert!((rows[0]["displacement"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    assert_eq!(rows[2]["displacement"], 0.0);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("torsionlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.jsonl");
    let out = run(&["dehn-fill", "--p", "3", "--q", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("\"torsion\":[3]"));
    std::fs::remove_dir_all(dir).unwrap();
}
