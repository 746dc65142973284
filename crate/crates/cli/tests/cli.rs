use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_obliv-kand"));
    c.env_remove("OBLIV_KAND_SOLVER");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok_json(args: &[&str]) -> Vec<Value> {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn assert_schema(name: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    assert!(compiled.is_valid(v), "{name} output does not match schema: {v}");
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn superoblivious_k2_is_four_ninths() {
    let out = ok_json(&["ratio", "-k", "2", "--superoblivious"]);
    assert_schema("ratio", &out[0]);
    assert!((f(&out[0], "ratio") - 4.0 / 9.0).abs() < 1e-6);
    assert_eq!(out[0]["probs"][0], "2/3");
}

#[test]
fn perturbed_k2_matches_reference() {
    let out = ok_json(&["ratio", "-k", "2", "--perturbed", "0.01", "0.001"]);
    assert!((f(&out[0], "ratio") - 0.4457).abs() < 5e-4);
    assert!(f(&out[0], "ratio") > 4.0 / 9.0);
}

#[test]
fn fair_coin_is_worse_than_p_star() {
    let out = ok_json(&["ratio", "-k", "2", "-t", "0,1", "-p", "0.5"]);
    // Rounding at 1/2 satisfies a 2AND with probability 1/4 while val can be 1.
    assert!((f(&out[0], "ratio") - 0.25).abs() < 1e-9);
}

#[test]
fn weights_and_lp_dump_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.csv");
    let d = dir.path().join("lp.txt");
    ok_json(&["ratio", "-k", "3", "--superoblivious", "--weights", w.to_str().unwrap(), "--dump-lp", d.to_str().unwrap()]);
    let csv = std::fs::read_to_string(&w).unwrap();
    assert!(csv.starts_with("pattern,weight\n") && csv.lines().count() > 1);
    assert!(!std::fs::read_to_string(&d).unwrap().is_empty());
}

#[test]
fn user_errors_exit_2() {
    for args in [
        vec!["ratio", "-k", "2"],
        vec!["ratio", "-k", "2", "--superoblivious", "--perturbed", "0.01", "0.001"],
        vec!["ratio", "-k", "2", "-t", "0,1"],
        vec!["ratio", "-k", "2", "-t", "0,2", "-p", "0.6"],
        vec!["ratio", "-k", "1", "--superoblivious"],
        vec!["gen", "-k", "2", "-n", "5", "-m", "1"],
        vec!["stream", "--mode", "random-order"],
        vec!["nonsense"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn solver_failure_exits_3() {
    let o = bin().env("OBLIV_KAND_SOLVER", "external:/nonexistent/solver").args(["ratio", "-k", "2", "--superoblivious"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[cfg(unix)]
#[test]
fn reference_mismatch_exits_4() {
    use std::os::unix::fs::PermissionsExt;
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("solver.sh");
    std::fs::write(&script, "#!/bin/sh\necho optimal\necho 0.3\n").unwrap();
    std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755)).unwrap();
    let o = bin().env("OBLIV_KAND_SOLVER", format!("external:{}", script.display())).args(["table", "--to", "2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn table_default_rows() {
    let o = run(&["table"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_reader(o.stdout.as_slice());
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let expect = [(0.5, 0.4444, 0.4457), (0.25, 0.2222, 0.2226), (0.125, 0.1152, 0.1157), (0.0625, 0.0576, 0.0578)];
    for (row, (ub, a, p)) in rows.iter().zip(expect) {
        let col = |i: usize| row[i].parse::<f64>().unwrap();
        assert_eq!(col(1), ub);
        assert!((col(2) - a).abs() < 5e-5);
        assert!((col(3) - p).abs() < 5e-4);
    }
}

#[test]
fn bernoulli_k100_has_three_tight_pairs() {
    let out = ok_json(&["bernoulli", "-k", "100"]);
    assert_schema("bernoulli", &out[0]);
    assert_eq!(out[0]["holds"], true);
    assert_eq!(out[0]["tight_count"], 3);
}

#[test]
fn bernoulli_range_emits_one_line_per_k() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    let out = ok_json(&["bernoulli", "-k", "2", "--k-max", "6", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.len(), 5);
    // Every pair i + j <= k is listed: Σ_{k=2..6} (k+1)(k+2)/2 rows.
    let rows = std::fs::read_to_string(csv).unwrap().lines().count() - 1;
    assert_eq!(rows, (2..=6).map(|k| (k + 1) * (k + 2) / 2).sum::<usize>());
}

#[test]
fn certify_k6_beats_alpha_star() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok_json(&["certify", "-k", "6", "--eps", "1e-3", "--out-dir", dir.path().to_str().unwrap()]);
    let v = &out[0];
    assert_schema("certify", v);
    // α*_6 = 2^{-5} (1 - 1/49)^3.
    let alpha6 = (48.0f64 / 49.0).powi(3) / 32.0;
    assert!((f(v, "alpha_star") - alpha6).abs() < 1e-12);
    assert!(f(v, "certified_lower_bound") > alpha6);
    assert!(f(v, "lp_primal_value") >= f(v, "certified_lower_bound") - 1e-9);
    let table = std::fs::read_to_string(v["margin_table_path"].as_str().unwrap()).unwrap();
    assert!(table.starts_with("family,i,j,lhs,rhs,margin"));
    for line in table.lines().skip(1) {
        let margin: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(margin > 0.0, "{line}");
    }
}

#[test]
fn value_of_symmetric_pair() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pair.kand");
    std::fs::write(&file, "kand 2 2 2\n1 +1 +2\n1 -1 -2\n").unwrap();
    let out = ok_json(&["value", file.to_str().unwrap(), "-t", "0,1", "-p", "0.666667"]);
    assert_schema("value", &out[0]);
    assert_eq!(out[0]["val_exact"], "1/2");
    assert_eq!(out[0]["obl_exact"], "1/4");
}

#[test]
fn gen_is_seeded_and_snapshot_sums_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.kand");
    let a = run(&["gen", "-k", "3", "-n", "30", "-m", "40", "--profile", "skewed:0.3", "--seed", "5"]);
    let b = run(&["gen", "-k", "3", "-n", "30", "-m", "40", "--profile", "skewed:0.3", "--seed", "5", "--out", file.to_str().unwrap()]);
    assert_eq!(b.status.code(), Some(0));
    assert_eq!(stdout(&a), std::fs::read_to_string(&file).unwrap());
    let snap = run(&["snapshot", file.to_str().unwrap(), "-t", "1/4,1/2,1"]);
    let total: f64 = stdout(&snap).lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
}

#[test]
fn stream_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let agg = dir.path().join("agg.csv");
    let args = ["stream", "--mode", "random-order", "-k", "2", "-n", "200", "-m", "2000", "--profile", "planted:0.8", "--eps", "0.2", "--seeds", "6", "--seed", "10"];
    let mut one = args.to_vec();
    one.extend(["--threads", "1", "--aggregate", agg.to_str().unwrap()]);
    let mut two = args.to_vec();
    two.extend(["--threads", "3"]);
    let a = ok_json(&one);
    let b = ok_json(&two);
    assert_eq!(a, b);
    assert_eq!(a.len(), 6);
    for (i, v) in a.iter().enumerate() {
        assert_schema("stream", v);
        assert_eq!(v["seed"], 10 + i as u64);
    }
    let summary = std::fs::read_to_string(agg).unwrap();
    assert_eq!(summary.lines().count(), 5);
}

#[test]
fn bounded_degree_full_storage_is_exact() {
    // q = (C·D/(m ε²))^{1/k} >= 1 stores every clause.
    let out = ok_json(&["stream", "--mode", "bounded-degree", "-k", "2", "-n", "20", "-m", "30", "--eps", "0.5", "--seeds", "2"]);
    for v in &out {
        assert_eq!(v["exact_path"], true);
        assert!(f(v, "snapshot_l1_error") < 1e-12);
        assert!((f(v, "linear") - f(v, "exact_value")).abs() < 1e-12);
    }
}

#[test]
fn grid_summary_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let out = ok_json(&["grid", "-k", "2", "-l", "2", "--xs", "0.4:0.6:0.1", "--ys", "0.8,0.9", "--out", csv.to_str().unwrap()]);
    assert_schema("grid", &out[0]);
    assert_eq!(out[0]["cells"], 6);
    let best = f(&out[0], "best_ratio");
    let ratios: Vec<f64> = std::fs::read_to_string(csv).unwrap().lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 6);
    assert!(ratios.iter().all(|&r| r <= best + 1e-9));
}
