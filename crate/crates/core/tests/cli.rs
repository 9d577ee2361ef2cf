use std::process::{Command, Output};

use serde_json::Value;

use igusa_zeta::coeff::PadicRing;
use igusa_zeta::poly::parse;
use igusa_zeta::ratfun::RatFun;
use igusa_zeta::sqh::{zeta_semiquasihomogeneous, SqhConfig};

fn igusa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igusa")).args(args).env_remove("IGUSA_ZETA_CACHE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = igusa(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn cusp_denominator_and_poles() {
    let v = json(&["compute", "x^2+y^3", "--prime", "5"]);
    assert_eq!(v["denominator"], serde_json::json!([[1, 1], [5, 6]]));
    assert_eq!(v["pole_real_parts"], serde_json::json!(["-1/1", "-5/6"]));
    assert_eq!(v["weights"], serde_json::json!([3, 2]));
    assert_eq!(v["d"], 6);
    assert_eq!(v["k0"], 0);
}

#[test]
fn json_zeta_round_trips() {
    let v = json(&["compute", "x^2+y^3+x*y^2", "--prime", "7"]);
    let parsed = RatFun::from_json(&v["zeta"]).unwrap();
    let r = PadicRing::new(7).unwrap();
    let (direct, _) = zeta_semiquasihomogeneous(&parse("x^2+y^3+x*y^2", None, &r).unwrap(), None, &SqhConfig::default()).unwrap();
    assert_eq!(parsed, direct);
    assert_eq!(parsed.to_json(), v["zeta"]);
}

#[test]
fn linear_text_output() {
    let o = igusa(&["compute", "x", "--prime", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Z(t) = (2/3) / (1 - 3^-1*t)"), "{}", stdout(&o));
}

#[test]
fn compute_counts_match_oracle() {
    let computed = json(&["compute", "x^2+y^3+x*y^2", "--prime", "7", "--expand", "4"]);
    let brute = json(&["oracle", "x^2+y^3+x*y^2", "--prime", "7", "--levels", "4"]);
    assert_eq!(computed["N"], brute["N"]);
}

#[test]
fn oracle_counts_for_the_cusp() {
    let v = json(&["oracle", "x^2+y^3", "--prime", "5", "--levels", "5"]);
    assert_eq!(v["p"], 5);
    assert_eq!(v["n"], 2);
    let counts: Vec<u64> = v["N"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(counts.len(), 6);
    // Direct double loop modulo 5^j.
    for (j, &c) in counts.iter().enumerate().take(4) {
        let m = 5u64.pow(j as u32);
        let naive = (0..m).flat_map(|x| (0..m).map(move |y| (x, y))).filter(|&(x, y)| (x * x + y * y * y) % m == 0).count();
        assert_eq!(c, naive as u64, "N_{j}");
    }
}

#[test]
fn check_passes_and_negative_control_fails() {
    let o = igusa(&["check", "x^2+y^3", "--prime", "5", "--levels", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("pass closed form"));
    assert!(stdout(&o).ends_with("check: pass\n"));

    let o = igusa(&["check", "x^2+y^3", "--prime", "5", "--levels", "4", "--max-iter", "0"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn check_in_characteristic_p() {
    let o = igusa(&["check", "x^2 + u*y^3", "--prime", "5", "--char", "p"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| igusa(args).status.code();
    assert_eq!(code(&["compute", "x^2+y^", "--prime", "5"]), Some(2));
    assert_eq!(code(&["compute", "x^2+u", "--prime", "5"]), Some(2));
    assert_eq!(code(&["compute", "x^2*y^2", "--prime", "5"]), Some(3));
    assert_eq!(code(&["compute", "x^2+y^3+x*y", "--prime", "5", "--weights", "3,2:6"]), Some(3));
    assert_eq!(code(&["compute", "x^2+y^3", "--prime", "5", "--max-depth", "1"]), Some(4));
    assert_eq!(code(&["compute", "x^2+y^3+x*y^2", "--prime", "7", "--max-iter", "1"]), Some(5));
    assert_eq!(code(&["compute", "x^2+y^3", "--prime", "5", "--budget", "10"]), Some(6));
    assert_eq!(code(&["compute", "x", "--prime", "4"]), Some(1));
}

#[test]
fn constant_term_goes_straight_to_the_engine() {
    let v = json(&["compute", "x^2+y^3+5", "--prime", "5"]);
    assert_eq!(v["k0"], Value::Null);
    assert_eq!(v["N"], serde_json::json!([1, 5, 20, 100, 500]));
}

#[test]
fn cache_hits_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let args = ["compute", "x^2+y^3+x*y^2", "--prime", "7", "--cache", path];
    let cold = igusa(&args);
    let warm = igusa(&args);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.status.code(), warm.status.code());
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);

    // Spelling differences canonicalize to the same entry.
    let respelled = igusa(&["compute", "y^3 + x^2 + x*y^2", "--prime", "7", "--cache", path]);
    assert_eq!(respelled.stdout, cold.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn cache_is_actually_consulted() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["oracle", "x^2+y^3", "--prime", "5"];
    let cold = Command::new(env!("CARGO_BIN_EXE_igusa")).args(args).env("IGUSA_ZETA_CACHE", dir.path()).output().unwrap();
    let entry = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let mut record: Value = serde_json::from_str(&std::fs::read_to_string(&entry).unwrap()).unwrap();
    assert_eq!(record["output"].as_str().unwrap().as_bytes(), cold.stdout.as_slice());
    record["output"] = Value::from("from cache\n");
    std::fs::write(&entry, record.to_string()).unwrap();
    let warm = Command::new(env!("CARGO_BIN_EXE_igusa")).args(args).env("IGUSA_ZETA_CACHE", dir.path()).output().unwrap();
    assert_eq!(stdout(&warm), "from cache\n");
}

#[test]
fn trace_file_holds_the_trees() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("trace.json");
    let o = igusa(&["compute", "x^2+y^3+x*y^2", "--prime", "3", "--trace", file.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let complements = v["complements"].as_array().unwrap();
    assert_eq!(complements[0]["label"], "limit");
    let first_tree = &complements[0]["cells"][0]["tree"];
    assert!(first_tree["nodes"][0]["parent"].is_null());

    let file = dir.path().join("direct.json");
    let o = igusa(&["compute", "x^2+y^3+9", "--prime", "3", "--trace", file.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert!(v["nodes"].as_array().unwrap().len() > 1);
}

#[test]
fn latex_output() {
    let o = igusa(&["compute", "x^2+y^3", "--prime", "5", "--format", "latex"]);
    let text = stdout(&o);
    assert!(text.starts_with("Z(s) = \\frac{"), "{text}");
    assert!(text.contains("(1 - 5^{-5} t^{6})"));
}
