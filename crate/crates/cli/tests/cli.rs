use std::path::Path;
use std::process::{Command, Output};

fn qlidar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlidar")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn coherent_signal_starts_at_fringe_top() {
    let text = stdout(&qlidar(&["signal", "--state-a", "cs", "--alpha2", "2", "--phi-min", "0", "--phi-max", "pi", "--phi-steps", "3"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "phi,value");
    assert_eq!(lines.len(), 4);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0]);
}

#[test]
fn multi_state_signal_has_one_column_per_state() {
    let text = stdout(&qlidar(&["signal", "--state-a", "cs,mps1", "--phi-steps", "5"]));
    assert_eq!(text.lines().next().unwrap(), "phi,value_cs,value_mps1");
}

#[test]
fn json_carries_the_csv_numbers() {
    let args = ["sensitivity", "--state-a", "ecss", "--phi-min", "0", "--phi-max", "1", "--phi-steps", "6"];
    let csv = stdout(&qlidar(&args));
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&qlidar(&json_args))).unwrap();
    let rows = json["rows"].as_array().unwrap();
    for (line, row) in csv.lines().skip(1).zip(rows) {
        for (cell, v) in line.split(',').zip(row.as_array().unwrap()) {
            match v {
                serde_json::Value::String(s) => assert_eq!(s, cell),
                v => assert_eq!(v.as_f64().unwrap(), cell.parse::<f64>().unwrap()),
            }
        }
    }
}

#[test]
fn stationary_point_is_written_as_inf() {
    let text = stdout(&qlidar(&["sensitivity", "--phi-min", "0", "--phi-max", "1", "--phi-steps", "2"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "phi,delta_phi,snl,ratio");
    assert!(lines[1].ends_with(",inf"), "{}", lines[1]);
    assert_eq!(lines[1].split(',').nth(1), Some("inf"));
}

#[test]
fn fwhm_header_and_converged_row() {
    let text = stdout(&qlidar(&["fwhm", "--grid", "8"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,fwhm_cs,fwhm_ecss,fwhm_mps0,fwhm_mps1,fwhm_mps2,fwhm_mps3");
    let v: Vec<f64> = lines[1].split(',').skip(1).map(|c| c.parse().unwrap()).collect();
    let (lo, hi) = v.iter().fold((f64::MAX, f64::MIN), |(a, b), x| (a.min(*x), b.max(*x)));
    assert!(hi / lo < 1.05, "{v:?}");
}

#[test]
fn coherent_wigner_is_non_negative() {
    let text = stdout(&qlidar(&["wigner", "--alpha2", "2", "--alpha-phase", "0.25pi", "--resolution", "41"]));
    assert_eq!(text.lines().next(), Some("y1,y2,w"));
    assert_eq!(text.lines().count(), 41 * 41 + 1);
    for line in text.lines().skip(1) {
        let w: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(w >= -1e-9);
    }
}

#[test]
fn peaks_and_loss_tables() {
    let text = stdout(&qlidar(&["peaks", "--alpha2", "2"]));
    assert_eq!(text, "state,count\ncs,1\necss,2\nmps0,2\nmps1,2\nmps2,2\nmps3,2\n");
    let text = stdout(&qlidar(&["loss", "--state-a", "cs", "--metric", "ratio", "--grid", "0,0.3,0.6"]));
    let ratios: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn quick_oracle_check_passes() {
    let out = qlidar(&["oracle-check", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("worst:"));
}

#[test]
fn impossible_tolerance_reports_disagreement() {
    let out = qlidar(&["oracle-check", "--quick", "--state-a", "cs", "--tolerance", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle disagreement"));
}

#[test]
fn invalid_specs_exit_one() {
    for args in [
        vec!["signal", "--alpha2", "-1"],
        vec!["signal", "--state-a", "mps9"],
        vec!["signal", "--phi-steps", "1"],
        vec!["signal", "--bogus"],
        vec!["fwhm", "--state-a", "cs"],
    ] {
        let out = qlidar(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    let out = qlidar(&["signal", "--loss-r", "1.5"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("loss-r"));
}

#[test]
fn io_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.cfg");
    assert_eq!(qlidar(&["signal", "--config", missing.to_str().unwrap()]).status.code(), Some(3));
    let bad_out = dir.path().join("no/such/dir/out.csv");
    assert_eq!(qlidar(&["signal", "--out", bad_out.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, format!("# signal\nstate_a = mps1\nphi-steps = 4\nout = {}\n", out.display())).unwrap();
    let status = qlidar(&["signal", "--config", cfg.to_str().unwrap(), "--phi-steps", "7"]);
    assert!(status.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(Path::new(&out).exists());
    std::fs::write(&cfg, "alpha2 = 2\nalpha2 = 3\n").unwrap();
    assert_eq!(qlidar(&["signal", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(qlidar(&["--help"]).status.code(), Some(0));
    assert_eq!(qlidar(&[]).status.code(), Some(1));
}
