use std::process::{Command, Output};

use quotient_mi::curve::{DensityCurve, Quantity};
use quotient_mi::mutualinfo::outage_direct;
use quotient_mi::{ChannelConfig, EnsembleContext};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quotient-mi"))
        .args(args)
        .env_remove("QUOTIENT_MI_RTOL")
        .env_remove("QUOTIENT_MI_ATOL")
        .env_remove("QUOTIENT_MI_MAX_SUBDIVISIONS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(err.lines().last().unwrap()).expect("stderr ends with a JSON record")
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn outage_point_matches_library() {
    let o = run(&[
        "outage",
        "--n",
        "2",
        "--na",
        "4",
        "--nb",
        "5",
        "--a",
        "1",
        "--b",
        "0.3333333",
        "--R",
        "3",
        "--method",
        "direct",
    ]);
    let curve = DensityCurve::from_csv(&stdout(&o)).unwrap();
    assert_eq!(curve.quantity, Quantity::MiCdf);
    let ctx = EnsembleContext::new(ChannelConfig::new(2, 4, 5, 1.0, 0.3333333).unwrap()).unwrap();
    assert_eq!(curve.values[0], outage_direct(&ctx, 3.0).unwrap());
    let summary = String::from_utf8_lossy(&o.stderr);
    assert!(summary.starts_with("outage n=2 nA=4 nB=5"), "{summary}");
    assert!(summary.contains("runtime="));
}

#[test]
fn moments_reproduce_reported_mean() {
    let o = run(&[
        "moments",
        "--n",
        "4",
        "--na",
        "4",
        "--nb",
        "5",
        "--a",
        "1",
        "--b",
        "0.3333333",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mean = v["mean"].as_f64().unwrap();
    assert!((mean - 4.93).abs() <= 0.02, "{mean}");
    assert!(v["variance"].as_f64().unwrap() > 0.0);
}

#[test]
fn outage_rate_reproduces_reported_rate() {
    let o = run(&[
        "outage-rate",
        "--eps",
        "0.01",
        "--n",
        "3",
        "--method",
        "laplace",
    ]);
    let rows = data_rows(&stdout(&o));
    assert!((rows[0][1] - 2.1).abs() <= 0.05, "{:?}", rows);
}

#[test]
fn invalid_configuration_exits_2_with_record() {
    let o = run(&["moments", "--n", "3", "--na", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let rec = error_record(&o);
    assert_eq!(rec["kind"], "invalid_config");
    assert_eq!(rec["exit_code"], 2);
    let o = run(&["outage", "--n", "2", "--b", "-0.5", "--R", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["outage", "--n", "2", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["kind"], "usage");
}

#[test]
fn quadrature_failure_exits_3() {
    let o = run(&[
        "outage",
        "--n",
        "3",
        "--R",
        "4",
        "--method",
        "direct",
        "--rel-tol",
        "1e-15",
        "--abs-tol",
        "1e-300",
        "--max-subdivisions",
        "1",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(error_record(&o)["kind"], "accuracy");
}

#[test]
fn csv_round_trips_exactly() {
    let text = stdout(&run(&["marginal", "--n", "3", "--points", "25"]));
    let curve = DensityCurve::from_csv(&text).unwrap();
    assert_eq!(curve.len(), 25);
    assert_eq!(curve.to_csv(), text);
    let json = stdout(&run(&[
        "extremes", "--n", "2", "--kind", "max-cdf", "--points", "10", "--format", "json",
    ]));
    let curve = DensityCurve::from_json(&json).unwrap();
    assert_eq!(DensityCurve::from_json(&curve.to_json()).unwrap(), curve);
}

#[test]
fn db_flags_convert_per_factor() {
    let a = stdout(&run(&[
        "moments",
        "--n",
        "2",
        "--a-db",
        "0",
        "--b-db",
        "-4.771212547196624",
    ]));
    let b = stdout(&run(&[
        "moments",
        "--n",
        "2",
        "--a",
        "1",
        "--b",
        "0.3333333333333333",
    ]));
    let (ra, rb) = (data_rows(&a), data_rows(&b));
    assert!((ra[0][0] - rb[0][0]).abs() < 1e-9);
    assert_eq!(
        run(&["moments", "--n", "2", "--a", "1", "--a-db", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn tolerance_environment_variables() {
    let o = Command::new(env!("CARGO_BIN_EXE_quotient-mi"))
        .args(["marginal", "--n", "2", "--points", "3"])
        .env("QUOTIENT_MI_RTOL", "1e-7")
        .output()
        .unwrap();
    let curve = DensityCurve::from_csv(&stdout(&o)).unwrap();
    assert_eq!(curve.spec.rel_tol, 1e-7);
}

#[test]
fn mc_compare_is_reproducible() {
    let args = [
        "mc-compare",
        "--n",
        "3",
        "--quantity",
        "eig-max-cdf",
        "--points",
        "20",
        "--count",
        "4000",
        "--seed",
        "17",
    ];
    let first = stdout(&run(&args));
    let second = stdout(&run(&args));
    assert_eq!(first, second);
    assert!(first.contains(",PASS\n"), "{first}");
    let other = stdout(&run(&[
        "mc-compare",
        "--n",
        "3",
        "--quantity",
        "eig-max-cdf",
        "--points",
        "20",
        "--count",
        "4000",
        "--seed",
        "18",
    ]));
    assert_ne!(first, other);
}

#[test]
fn mc_compare_outage_and_marginal() {
    let o = stdout(&run(&[
        "mc-compare",
        "--n",
        "2",
        "--quantity",
        "mi-cdf",
        "--points",
        "15",
        "--count",
        "20000",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&o).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert!(v["sup_distance"].as_f64().unwrap() <= v["band"].as_f64().unwrap());
    let o = stdout(&run(&[
        "mc-compare",
        "--n",
        "3",
        "--quantity",
        "eig-marginal",
        "--points",
        "30",
        "--count",
        "20000",
        "--format",
        "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&o).unwrap();
    assert_eq!(v["grid"].as_array().unwrap().len(), 30);
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn sweep_table_is_monotone() {
    let text = stdout(&run(&[
        "sweep",
        "--ns",
        "2,3",
        "--a-db-hi",
        "10",
        "--a-db-step",
        "5",
    ]));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 6);
    for n in [2.0, 3.0] {
        let r: Vec<f64> = rows
            .iter()
            .filter(|row| row[1] == n)
            .map(|row| row[2])
            .collect();
        assert!(r.windows(2).all(|w| w[1] > w[0]));
    }
}

#[test]
fn writes_output_file() {
    let path = std::env::temp_dir().join(format!("quotient-mi-cli-{}.csv", std::process::id()));
    let o = run(&[
        "mi-pdf",
        "--n",
        "2",
        "--points",
        "12",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let curve = DensityCurve::from_csv(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(curve.len(), 12);
    assert_eq!(curve.quantity, Quantity::MiPdf);
}

#[test]
fn monte_carlo_density_is_rejected() {
    let o = run(&["mi-pdf", "--n", "2", "--method", "mc", "--points", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["kind"], "domain");
}
