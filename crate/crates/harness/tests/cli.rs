use std::process::{Command, Output};

use positlab::CSV_HEADER;

fn positlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_positlab")).args(args).output().expect("run positlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// (format, N, value) triples of a long-form CSV.
fn values(csv: &str) -> Vec<(String, String, f64)> {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[2].to_string(), f[5].parse().unwrap())
        })
        .collect()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(positlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(positlab(&["fft-accuracy"]).status.code(), Some(2), "seed is required");
    assert_eq!(positlab(&["fft-accuracy", "--seed", "1", "--formats", "posit64"]).status.code(), Some(2));
    assert_eq!(positlab(&["fft-accuracy", "--seed", "1", "--sizes", "30"]).status.code(), Some(2));
    assert_eq!(positlab(&["fft-accuracy", "--seed", "1", "--config", "/nonexistent/cfg"]).status.code(), Some(2));
}

#[test]
fn small_sizes_still_round() {
    let o = positlab(&["fft-accuracy", "--seed", "9", "--sizes", "4"]);
    assert!(o.status.success());
    let v = values(&stdout(&o));
    assert_eq!(v.len(), 2);
    assert!(v.iter().all(|(_, n, x)| n == "16" && *x > 0.0));
}

#[test]
fn high_precision_round_trip_is_near_exact() {
    let o = positlab(&["fft-accuracy", "--seed", "9", "--sizes", "6,8", "--formats", "bigfloat"]);
    assert!(values(&stdout(&o)).iter().all(|(f, _, x)| f == "bigfloat" && *x < 1e-60));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, format!("# sweep\nseed=5\nsizes=4,5\nformats=float32\nout={}\n", out.display())).unwrap();
    let o = positlab(&["fft-accuracy", "--config", cfg.to_str().unwrap(), "--sizes", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let v = values(&text);
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].0.as_str(), v[0].1.as_str()), ("float32", "64"));
    assert!(text.contains(",5,error_norm,"));
}

#[test]
fn distribution_flag_changes_inputs() {
    let a = stdout(&positlab(&["fft-accuracy", "--seed", "3", "--sizes", "6", "--dist", "uniform"]));
    let b = stdout(&positlab(&["fft-accuracy", "--seed", "3", "--sizes", "6", "--dist", "truncnormal"]));
    assert_ne!(a, b);
}

#[test]
fn spectral_zero_steps_give_zero_norms() {
    let o = positlab(&["spectral-accuracy", "--sizes", "4,6", "--steps", "0"]);
    let v = values(&stdout(&o));
    assert_eq!(v.len(), 4);
    assert!(v.iter().all(|(_, _, x)| *x == 0.0));
}

#[test]
fn spectral_reference_is_converged() {
    let run = |p: &str| values(&stdout(&positlab(&["spectral-accuracy", "--sizes", "5", "--steps", "50", "--precision", p])));
    for (a, b) in run("250").iter().zip(run("500").iter()) {
        assert!(a.2 > 0.0);
        assert!(((a.2 - b.2) / a.2).abs() < 1e-6, "{a:?} {b:?}");
    }
}

#[test]
fn conformance_reports_every_suite() {
    let o = positlab(&["conformance", "--seed", "11", "--samples", "5000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for metric in ["add.failures", "sub.failures", "mul.failures", "roundtrip.failures"] {
        assert!(text.contains(&format!(",{metric},0\n")), "{metric}");
    }
    assert_eq!(text.matches(".failures,0\n").count(), 7);
}

#[test]
fn cost_report_is_json_with_ratios() {
    let o = positlab(&["cost-report", "--sizes", "8"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["operators"].as_array().unwrap().len(), 6);
    assert_eq!(v["ratios"].as_array().unwrap().len(), 3);
    assert_eq!(v["fft"][0]["n"], 256);
    let full: serde_json::Value = serde_json::from_slice(&positlab(&["cost-report", "--fastmath", "false"]).stdout).unwrap();
    assert!(full["operators"][0]["total_nodes"].as_u64() > v["operators"][0]["total_nodes"].as_u64());
}

#[test]
fn bench_rows_are_sorted_and_ordered_by_speed() {
    let o = positlab(&["bench", "--seed", "1", "--sizes", "16,12", "--repeats", "3"]);
    let v = values(&stdout(&o));
    let keys: Vec<(&str, &str)> = v.iter().map(|(f, n, _)| (f.as_str(), n.as_str())).collect();
    assert_eq!(
        keys,
        [("posit32", "4096"), ("posit32", "65536"), ("float32", "4096"), ("float32", "65536"), ("native_f32", "4096"), ("native_f32", "65536")]
    );
    let at = |f: &str| v.iter().find(|(g, n, _)| g == f && n == "65536").unwrap().2;
    assert!(at("posit32") > at("native_f32"));
    assert!(at("float32") > at("native_f32"));
    assert!(at("posit32") > at("float32"));
}
