use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ess(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ess")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, n: usize, p: usize, seed: u64) -> (PathBuf, PathBuf) {
    let prob = dir.join(format!("p{n}_{p}_{seed}.txt"));
    let rhs = dir.join(format!("b{n}_{p}_{seed}.txt"));
    let out = ess(&[
        "generate",
        "--n",
        &n.to_string(),
        "--p",
        &p.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path_str(&prob),
        "--rhs",
        path_str(&rhs),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    (prob, rhs)
}

fn header_values(text: &str, key: &str) -> Vec<f64> {
    let line = text.lines().find(|l| l.starts_with(&format!("{key} "))).unwrap();
    line[key.len() + 1..].split(',').map(|v| v.parse().unwrap()).collect()
}

fn times(text: &str) -> Vec<f64> {
    text.lines().skip_while(|l| *l != "t").skip(1).map(|v| v.parse().unwrap()).collect()
}

#[test]
fn generate_is_deterministic() {
    let a = ess(&["generate", "--n", "50", "--p", "3", "--seed", "42"]);
    let b = ess(&["generate", "--n", "50", "--p", "3", "--seed", "42"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = ess(&["generate", "--n", "50", "--p", "3", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn generated_problem_follows_protocol() {
    let out = ess(&["generate", "--n", "300", "--p", "4", "--seed", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let t = times(&text);
    assert_eq!(t.len(), 300);
    assert!(t.windows(2).all(|w| w[0] < w[1]));
    assert!(t.iter().all(|v| (0.0..=20.0).contains(v)));
    let alpha = header_values(&text, "alpha");
    let d = header_values(&text, "d")[0];
    assert!((d - 1.0 - alpha.iter().sum::<f64>()).abs() <= 1e-15);
    assert!(alpha.iter().chain(&header_values(&text, "beta")).all(|v| (0.0..=2.0).contains(v)));
}

#[test]
fn generate_rejects_bad_sizes() {
    assert_eq!(ess(&["generate", "--n", "0", "--p", "2"]).status.code(), Some(2));
    assert_eq!(ess(&["generate", "--n", "5", "--p", "0"]).status.code(), Some(2));
    assert_eq!(ess(&["generate", "--n", "five", "--p", "1"]).status.code(), Some(2));
}

#[test]
fn hand_written_kernel_matches_dense_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("k.txt");
    std::fs::write(&prob, "# four points\nn 4\np 2\nd 3.1\nalpha 1.2,0.7\nbeta 0.5,1.5\nt\n0.0\n0.3\n1.7\n2.0\n").unwrap();
    let rhs = dir.path().join("b.txt");
    std::fs::write(&rhs, "1\n-2\n0.5\n3\n").unwrap();
    let out = ess(&["solve", path_str(&prob), "--rhs", path_str(&rhs), "--verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["verify"]["solution_rel_err"].as_f64().unwrap() <= 1e-10);
    assert!(report["verify"]["logdet_rel_err"].as_f64().unwrap() <= 1e-12);
    assert!(report["residual_inf"].as_f64().unwrap() <= 1e-13);
    assert_eq!(report["x"].as_array().unwrap().len(), 4);
}

#[test]
fn missing_rhs_means_all_ones() {
    let dir = tempfile::tempdir().unwrap();
    let (prob, _) = generate(dir.path(), 30, 2, 1);
    let ones = dir.path().join("ones.txt");
    std::fs::write(&ones, "1\n".repeat(30)).unwrap();
    let implicit: Value = serde_json::from_slice(&ess(&["solve", path_str(&prob)]).stdout).unwrap();
    let explicit: Value = serde_json::from_slice(&ess(&["solve", path_str(&prob), "--rhs", path_str(&ones)]).stdout).unwrap();
    assert_eq!(implicit["x"], explicit["x"]);
}

#[test]
fn solution_round_trips_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let (prob, rhs) = generate(dir.path(), 40, 3, 2);
    let out_file = dir.path().join("report.json");
    let out = ess(&["solve", path_str(&prob), "--rhs", path_str(&rhs), "--out", path_str(&out_file)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&out_file).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["x"].as_array().unwrap().len(), 40);
    // the problem file prints every float in shortest round-trip form
    for line in times(&std::fs::read_to_string(&prob).unwrap()).iter().map(|v| format!("{v:?}")) {
        let v: f64 = line.parse().unwrap();
        assert_eq!(format!("{v:?}"), line);
    }
    let rhs_text = std::fs::read_to_string(&rhs).unwrap();
    for line in rhs_text.lines() {
        assert_eq!(format!("{:?}", line.parse::<f64>().unwrap()), line);
    }
}

#[test]
fn malformed_input_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("bad.txt");
    std::fs::write(&prob, "n 3\np 1\nd 2\nalpha 1\nbeta 0.5\nt\n0\n1,5\n2\n").unwrap();
    let out = ess(&["solve", path_str(&prob)]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("bad.txt:8:1"), "{msg}");

    let rhs = dir.path().join("rhs.txt");
    std::fs::write(&rhs, "1\n2\n").unwrap();
    let (good, _) = generate(dir.path(), 3, 1, 0);
    let out = ess(&["solve", path_str(&good), "--rhs", path_str(&rhs)]);
    assert_eq!(out.status.code(), Some(2));
    let out = ess(&["solve", path_str(&dir.path().join("absent.txt"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn singular_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let prob = dir.path().join("s.txt");
    std::fs::write(&prob, "n 2\np 1\nd 1\nalpha 1\nbeta 0\nt\n0\n1\n").unwrap();
    let out = ess(&["solve", path_str(&prob)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));
}

fn strip_timings(line: &str) -> Value {
    let mut v: Value = serde_json::from_str(line).unwrap();
    for key in ["assembly_ms", "factorize_ms", "solve_ms", "dense_total_ms"] {
        v.as_object_mut().unwrap().remove(key);
    }
    v
}

#[test]
fn bench_records() {
    let args = ["bench", "--n", "64,300", "--p", "1,3", "--seed", "0,1", "--verify", "--dense-cap", "100"];
    let a = String::from_utf8(ess(&args).stdout).unwrap();
    let b = String::from_utf8(ess(&args).stdout).unwrap();
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines.len(), 8);
    for (x, y) in a.lines().zip(b.lines()) {
        assert_eq!(strip_timings(x), strip_timings(y));
    }
    for line in lines {
        let rec: Value = serde_json::from_str(line).unwrap();
        let n = rec["n"].as_u64().unwrap();
        for key in ["assembly_ms", "factorize_ms", "solve_ms", "residual_inf"] {
            assert!(rec[key].as_f64().unwrap() >= 0.0);
        }
        assert!(rec["residual_inf"].as_f64().unwrap() < 1e-12);
        if n <= 100 {
            assert_eq!(rec["mode"], "both");
            assert!(rec["logdet_rel_err"].as_f64().unwrap() < 1e-12);
        } else {
            assert_eq!(rec["mode"], "fast");
            assert!(rec.get("logdet_rel_err").is_none());
        }
    }
}

#[test]
fn bench_failures_stay_in_stream() {
    let out = ess(&["bench", "--n", "200,10", "--mode", "dense", "--dense-cap", "50"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(recs[0]["error"].as_str().unwrap().contains("cap"));
    assert_eq!(recs[1]["mode"], "dense");
    assert!(recs[1]["residual_inf"].as_f64().unwrap() < 1e-12);
}

#[test]
fn triplet_export_matches_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let (prob, _) = generate(dir.path(), 5, 2, 3);
    let trip = dir.path().join("t.txt");
    assert!(ess(&["solve", path_str(&prob), "--triplets", path_str(&trip)]).status.success());
    let text = std::fs::read_to_string(trip).unwrap();
    let max_index = text
        .lines()
        .flat_map(|l| l.split(' ').take(2).map(|v| v.parse::<usize>().unwrap()))
        .max()
        .unwrap();
    assert_eq!(max_index + 1, 5 * 5 - 4);
}
