use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use tempodisc::contrast::{contrast_db, ContrastQuery};
use tempodisc::choice::GrowthRate;
use tempodisc::experiments::{population_dispersion, ParetoWealth};
use tempodisc::probability::Probability;
use tempodisc::{PeriodCount, QIndex};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tempodisc"))
        .args(args)
        .env_remove("TEMPODISC_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (headers, rows)
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn close10(a: f64, b: f64) -> bool {
    (a - b).abs() <= 5e-10 * b.abs().max(1e-300)
}

fn decide(args: &[&str]) -> Output {
    let mut full = vec!["decide"];
    full.extend_from_slice(args);
    run(&full)
}

#[test]
fn decide_prefers_certain_early_payment() {
    let out = decide(&["--wealth", "1", "--early-amount", "1", "--late-amount", "2", "--p-early", "1", "--p-late", "0.5"]);
    let (headers, rows) = csv_rows(&stdout(&out));
    assert_eq!(headers[0], "side");
    assert_eq!(rows[0][0], "Early");
    assert_eq!(rows[0][2], "2");
}

#[test]
fn decide_reports_indifference() {
    let out = decide(&["--wealth", "1000", "--early-amount", "1", "--late-amount", "1.001", "--p-early", "1", "--p-late", "1"]);
    let (_, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows[0][0], "Indifferent");
}

#[test]
fn invalid_flag_value_is_a_usage_error() {
    let out = decide(&["--wealth", "0", "--early-amount", "1", "--late-amount", "2", "--p-early", "1", "--p-late", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--wealth"), "{err}");

    let out = decide(&["--wealth", "1", "--early-amount", "1", "--late-amount", "2", "--p-early", "1.5", "--p-late", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--p-early"));

    // early amount larger than the late one
    let out = decide(&["--wealth", "1", "--early-amount", "3", "--late-amount", "2", "--p-early", "1", "--p-late", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["curve", "--q", "2"]).status.code(), Some(2));
}

#[test]
fn curve_endpoints() {
    let (_, rows) = csv_rows(&stdout(&run(&["curve", "--q", "2", "--rho", "0.1", "--n-max", "10"])));
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0], ["0", "1"]);
    assert_eq!(rows[10], ["10", "0.5"]);

    let (_, rows) = csv_rows(&stdout(&run(&["curve", "--q", "1", "--rho", "0.1", "--n-max", "10", "--step", "0.5"])));
    assert_eq!(rows.len(), 21);
    assert_eq!(rows[20][1], "0.3678794412");
}

#[test]
fn contrast_matches_library() {
    let out = run(&["contrast", "--xm", "1", "--q", "2", "--n-max", "10", "--format", "json"]);
    let v = json(&out);
    let cli = v["rows"][9]["contrast_db"].as_f64().unwrap();
    let lib = contrast_db(
        &ContrastQuery::new(
            GrowthRate::new(1.0).unwrap(),
            QIndex::HYPERBOLIC,
            Probability::ONE,
            PeriodCount::new(10.0).unwrap(),
        )
        .unwrap(),
    );
    assert!(close10(cli, lib), "{cli} vs {lib}");
    assert_eq!(v["meta"]["params"]["horizon"]["kind"], "periods");
    assert_eq!(v["meta"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn reversal_reports_crossing() {
    let out = run(&["reversal", "--rate", "0.2", "--n-max", "5"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.182748964"));
    let (headers, rows) = csv_rows(&stdout(&out));
    assert_eq!(headers, ["n", "early", "late", "preferred"]);
    assert_eq!(rows[0][3], "early");
    assert_eq!(rows[1][3], "late");

    let v = json(&run(&["reversal", "--rate", "0.2", "--format", "json"]));
    assert!(close10(v["meta"]["params"]["crossing"].as_f64().unwrap(), 1.182748963535319));
    assert_eq!(v["rows"].as_array().unwrap().len(), 10);
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn two_row_fit_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "two.csv", "n,value\n1,0.9\n2,0.8\n");
    let out = run(&["fit", "--data", &data]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient data"));

    let out = run(&["fit", "--data", &dir.path().join("missing.csv").display().to_string()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fit_ranks_hyperbolic_data() {
    let dir = TempDir::new().unwrap();
    let mut body = String::from("n,value\n");
    for n in 1..=10 {
        body.push_str(&format!("{n},{}\n", 1.0 / (1.0 + 0.1 * f64::from(n))));
    }
    let data = write(&dir, "h.csv", &body);
    let (_, rows) = csv_rows(&stdout(&run(&["fit", "--data", &data])));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][1], "exponential");
    let free = rows.iter().find(|r| r[1] == "free_q").unwrap();
    assert_eq!(free[0], "1");
    assert!((free[2].parse::<f64>().unwrap() - 2.0).abs() < 1e-6);

    let (_, rows) = csv_rows(&stdout(&run(&["fit", "--data", &data, "--pin-q", "2"])));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], "pinned");
    assert!((rows[0][3].parse::<f64>().unwrap() - 0.1).abs() < 1e-6);
}

#[test]
fn fit_accepts_amount_rows() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "a.csv", "n,value,kind\n1,100,amount\n2,200,amount\n4,400,amount\n8,800,amount\n");
    let (_, rows) = csv_rows(&stdout(&run(&["fit", "--data", &data, "--wealth", "1000", "--pin-q", "2"])));
    assert!((rows[0][3].parse::<f64>().unwrap() - 0.1).abs() < 1e-6);
}

#[test]
fn thaler_config_round_trip() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "thaler.json",
        r#"{
            "w0": 100000,
            "prizes": [
                {"m0": 250, "target_rate": 0.0081},
                {"m0": 3000, "target_rate": 0.0769}
            ],
            "horizons": [
                {"label": "3 months", "n": 0.25},
                {"label": "1 year", "n": 1},
                {"label": "3 years", "n": 3}
            ]
        }"#,
    );
    let out_path = dir.path().join("table.csv");
    let out = run(&["thaler", "--config", &config, "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("reversed: increasing"));

    let text = fs::read_to_string(&out_path).unwrap();
    let (headers, rows) = csv_rows(&text);
    assert_eq!(headers, ["prize", "horizon_label", "n", "amount", "rate", "observed"]);
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let expected = if row[0] == "250" { 0.0081 } else { 0.0769 };
        assert!(close10(row[4].parse().unwrap(), expected), "{row:?}");
    }
    assert_eq!(rows[1][1], "1 year");
    assert!(close10(rows[1][3].parse().unwrap(), 250.0 + 0.0081 * 100_250.0));

    let v = json(&run(&["thaler", "--config", &config, "--format", "json"]));
    assert_eq!(v["meta"]["params"]["magnitude_effect"], "reversed: increasing");
}

#[test]
fn bad_config_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "bad.json", r#"{"w0": 1000, "prizes": [{"m0": 10}], "horizons": [{"label": "a", "n": 1}]}"#);
    assert_eq!(run(&["thaler", "--config", &config]).status.code(), Some(3));
    let config = write(&dir, "typo.json", r#"{"w0": 1000, "prize": []}"#);
    assert_eq!(run(&["thaler", "--config", &config]).status.code(), Some(3));
}

fn population(extra: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tempodisc"));
    cmd.args(["population", "--exponent", "1.5", "--wmin", "10000", "--size", "2000", "--m", "100", "--format", "json"])
        .args(extra)
        .env_remove("TEMPODISC_SEED");
    cmd
}

#[test]
fn population_matches_library_and_honours_seed() {
    let v: Value = serde_json::from_slice(&population(&["--seed", "9"]).output().unwrap().stdout).unwrap();
    let lib = population_dispersion(&ParetoWealth::new(1.5, 1e4, 2000, 9).unwrap(), 0.0, 100.0).unwrap();
    let row = &v["rows"][0];
    assert_eq!(row["count"], 2000);
    assert!(close10(row["median"].as_f64().unwrap(), lib.median));
    assert!(close10(row["iqr"].as_f64().unwrap(), lib.iqr));

    let by_env = population(&["--seed", "1"]).env("TEMPODISC_SEED", "9").output().unwrap();
    let v_env: Value = serde_json::from_slice(&by_env.stdout).unwrap();
    assert_eq!(v_env["rows"], v["rows"]);
    assert_eq!(v_env["meta"]["params"]["seed"], 9);

    let bad_env = population(&[]).env("TEMPODISC_SEED", "x").output().unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn output_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("curve.csv");
    let args = ["curve", "--q", "1.5", "--rho", "0.2", "--n-max", "5", "--period-length", "year"];
    let printed = stdout(&run(&args));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert!(run(&with_out).status.success());
    assert_eq!(fs::read_to_string(Path::new(&path)).unwrap(), printed);

    let v = json(&run(&[&args[..], &["--format", "json"]].concat()));
    assert_eq!(v["meta"]["period_length"], "year");
}
