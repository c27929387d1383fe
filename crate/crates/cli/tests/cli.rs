use std::path::Path;
use std::process::{Command, Output};

fn cubedisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubedisc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(csv: &str, column: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == column).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn volume_and_discrepancy_examples() {
    let v = stdout(&cubedisc(&["volume", "--sigma", "1,0", "--r", "0.5"]));
    assert_eq!(field(&v, "volume")[0].parse::<f64>().unwrap(), 3.0);
    let d = stdout(&cubedisc(&[
        "discrepancy",
        "--m",
        "2",
        "--sigma",
        "1,0",
        "--r",
        "0.5",
    ]));
    assert_eq!(field(&d, "count"), vec!["20"]);
    assert!((field(&d, "discrepancy")[0].parse::<f64>().unwrap() - 1.25).abs() < 1e-12);
}

#[test]
fn off_unit_sigma_warns_and_normalises() {
    let o = cubedisc(&["count", "--m", "3", "--sigma", "3,4", "--r", "0.2"]);
    let unit = stdout(&cubedisc(&[
        "count", "--m", "3", "--sigma", "0.6,0.8", "--r", "0.2",
    ]));
    assert_eq!(stdout(&o), unit);
    assert!(String::from_utf8_lossy(&o.stderr).contains("normalising"));
}

#[test]
fn errors_are_one_line_with_exit_code() {
    for args in [
        &["count", "--m", "2", "--sigma", "1,0,0", "--r", "0.5"][..],
        &["count", "--sigma", "1,0", "--r", "0.5"],
        &["scan", "--m", "2", "--nodes", "5"],
        &["integrate", "--m", "2", "--r", "0.5", "--method", "simpson"],
        &["volume", "--sigma", "1,0"],
    ] {
        let o = cubedisc(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}

#[test]
fn scan_then_fit_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let o = cubedisc(&[
        "scan",
        "--m-list",
        "2,3,4",
        "--r-count",
        "16",
        "--nodes",
        "128",
        "--out",
        dir,
    ]);
    assert_eq!(stdout(&o).lines().count(), 3);
    let scan = std::fs::read_to_string(tmp.path().join("scan_d2_M3_a0.5.csv")).unwrap();
    assert_eq!(scan.lines().next().unwrap(), cubedisc_cli::SCAN_HEADER);
    assert_eq!(scan.lines().count(), 17);

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(tmp.path().join("scan_d2_M3_a0.5.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["M"], 3);
    assert_eq!(manifest["nodes"], 128);
    assert_eq!(manifest["measure_convention"], "unnormalized-surface-measure");
    assert!(manifest["command_line"]
        .as_str()
        .unwrap()
        .contains("--m-list 2,3,4"));

    let inputs: Vec<String> = (2..=4)
        .map(|m| {
            tmp.path()
                .join(format!("scan_d2_M{m}_a0.5.csv"))
                .display()
                .to_string()
        })
        .collect();
    let mut args = vec!["fit", "--out", dir, "--plot", "--in"];
    args.extend(inputs.iter().map(String::as_str));
    let o = cubedisc(&args);
    stdout(&o);
    assert!(String::from_utf8_lossy(&o.stderr).contains("slope"));
    let fit = std::fs::read_to_string(tmp.path().join("fit_d2_a0.5.csv")).unwrap();
    assert_eq!(fit.lines().next().unwrap(), cubedisc_cli::FIT_HEADER);
    assert_eq!(field(&fit, "M"), vec!["2", "3", "4"]);
    assert!(tmp.path().join("fit_d2_a0.5.svg").exists());

    // the fit supremum is the largest integral in each scan file
    let best = field(&scan, "integral_abs_D")
        .iter()
        .map(|v| v.parse::<f64>().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(field(&fit, "sup_value")[1].parse::<f64>().unwrap(), best);
}

#[test]
fn fit_rejects_foreign_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("x.csv");
    std::fs::write(&p, "d,r,volume\n2,0.5,3\n").unwrap();
    let o = cubedisc(&["fit", "--in", p.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a scan CSV"));
}

#[test]
fn config_file_sits_under_explicit_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    std::fs::write(&conf, "# small run\nm = 3\nr_count = 8\nnodes = 64\n").unwrap();
    let c = conf.to_str().unwrap();
    let from_file = stdout(&cubedisc(&["scan", "--config", c]));
    assert_eq!(field(&from_file, "nodes")[0], "64");
    assert_eq!(field(&from_file, "M")[0], "3");
    let overridden = stdout(&cubedisc(&["scan", "--config", c, "--nodes", "128"]));
    assert_eq!(field(&overridden, "nodes")[0], "128");

    std::fs::write(&conf, "m 3\n").unwrap();
    assert!(!cubedisc(&["scan", "--config", c]).status.success());
}

#[test]
fn jsonl_output_parses() {
    let out = stdout(&cubedisc(&[
        "scan",
        "--m",
        "2",
        "--r-count",
        "8",
        "--nodes",
        "64",
        "--format",
        "jsonl",
    ]));
    let rows: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["method"], "angular-trapezoid");
    assert_eq!(rows[7]["r_count"], 8);
}

#[test]
fn fourier_full_square_is_a_product_of_sincs() {
    let out = stdout(&cubedisc(&["fourier", "--xi", "0.25,0.5", "--m", "2"]));
    let re: f64 = field(&out, "re")[0].parse().unwrap();
    let one = |x: f64| (std::f64::consts::TAU * x).sin() / (std::f64::consts::PI * x);
    assert!((re - one(0.25) * one(0.5)).abs() < 1e-13);
    assert_eq!(field(&out, "hat_Phi").len(), 1);
}

#[test]
fn poisson_reports_both_sides() {
    let out = stdout(&cubedisc(&[
        "poisson", "--m", "2", "--sigma", "0,1", "--r", "0.4",
    ]));
    let lhs: f64 = field(&out, "lhs")[0].parse().unwrap();
    let rhs: f64 = field(&out, "rhs")[0].parse().unwrap();
    let tail: f64 = field(&out, "tail_bound")[0].parse().unwrap();
    assert!(tail <= 1e-8);
    assert!((lhs - rhs).abs() <= 1e-6);

    let o = cubedisc(&[
        "poisson",
        "--m",
        "2",
        "--sigma",
        "0.6,0.8",
        "--r",
        "0.4",
        "--max-k",
        "50",
        "--sandwich",
    ]);
    let out = stdout(&o);
    assert_eq!(field(&out, "K"), vec!["50"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert_eq!(field(&out, "count").len(), 1);
}

#[test]
fn probes_write_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    stdout(&cubedisc(&[
        "probe-decay",
        "--rho-list",
        "4,8",
        "--nodes",
        "256",
        "--out",
        dir,
    ]));
    stdout(&cubedisc(&["probe-logsum", "--m-list", "4,16", "--out", dir]));
    let check = |name: &str, rows: usize| {
        let p = Path::new(dir).join(name);
        assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), rows + 1);
        assert!(p.with_extension("manifest.json").exists());
    };
    check("decay_d2.csv", 2);
    check("logsum_d2.csv", 2);
    let o = cubedisc(&[
        "probe-decay",
        "--sigma",
        "0.6,0.8",
        "--r",
        "0.3",
        "--rho-list",
        "4",
    ]);
    assert!(!o.status.success());
}
