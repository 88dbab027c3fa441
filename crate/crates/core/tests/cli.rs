use std::process::{Command, Output};
use std::time::Instant;

fn tcmcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcmcap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn bound_quad_rdt() {
    let o = tcmcap(&["bound", "--activation", "quad", "--d", "4", "--method", "rdt"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["bound"].as_f64().unwrap() - 4.660).abs() < 1e-3);
    assert_eq!(v["seed"], 42);
    assert!(v["runtime_s"].is_null());
}

#[test]
fn bound_linear_plrdt_is_two() {
    let o = tcmcap(&["bound", "--activation", "linear", "--d", "8", "--method", "plrdt", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][3], "2");
}

#[test]
fn odd_width_is_rejected() {
    let o = tcmcap(&["bound", "--activation", "relu", "--d", "3", "--method", "rdt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("even positive integer"), "{}", stderr(&o));
    let o = tcmcap(&["bound", "--activation", "quad", "--d", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tcmcap(&["bound", "--activation", "relu", "--d", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(tcmcap(&[]).status.code(), Some(2));
    assert_eq!(tcmcap(&["bound", "--d", "2"]).status.code(), Some(2));
    assert_eq!(tcmcap(&["bound", "--activation", "quad", "--d", "2", "--mc-samples", "0"]).status.code(), Some(2));
    assert_eq!(tcmcap(&["--version"]).status.code(), Some(0));
}

#[test]
fn quad_sweep_decreases_and_plrdt_is_tighter() {
    let o = tcmcap(&[
        "sweep", "--activation", "quad", "--d-min", "2", "--d-max", "16", "--d-step", "2", "--method", "plrdt,rdt",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next().unwrap(), tcmcap::cli::CSV_HEADER);
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 16);
    let (pl, rdt): (Vec<_>, Vec<_>) = rows.iter().partition(|r| r[2] == "plrdt");
    // Rows are ordered by method, then width.
    assert_eq!(rows[0][2], "rdt");
    let bound = |r: &Vec<String>| r[3].parse::<f64>().unwrap();
    let widths: Vec<usize> = rdt.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(widths, vec![2, 4, 6, 8, 10, 12, 14, 16]);
    assert!(rdt.windows(2).all(|w| bound(w[0]) > bound(w[1])));
    for (p, r) in pl.iter().zip(&rdt) {
        assert_eq!(p[1], r[1]);
        assert!(bound(p) <= bound(r));
        assert!(!p[5].is_empty() && r[5].is_empty());
    }
}

#[test]
fn empty_range_and_bad_output_path() {
    let o = tcmcap(&["sweep", "--activation", "quad", "--d-min", "10", "--d-max", "4"]);
    assert_eq!(o.status.code(), Some(2));
    let o = tcmcap(&[
        "sweep", "--activation", "quad", "--d-min", "2", "--d-max", "4", "--out", "/nonexistent/dir/out.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn out_file_and_precision() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.json");
    let p = path.to_str().unwrap();
    let o = tcmcap(&[
        "sweep", "--activation", "quad", "--d-min", "2", "--d-max", "4", "--format", "json", "--full-precision",
        "--out", p,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let b = v[0]["bound"].as_f64().unwrap();
    assert!((b - tcmcap::rdt::quad_capacity_closed_form(2).unwrap()).abs() < 1e-9);
    assert!(b.to_string().len() > 8);
}

#[test]
fn timing_column_is_opt_in() {
    let o = tcmcap(&["bound", "--activation", "quad", "--d", "2", "--timing"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["runtime_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn table1_passes() {
    let o = tcmcap(&["table1"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}{}", stderr(&o));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 14);
    assert_eq!(text.lines().filter(|l| l.starts_with("SKIP")).count(), 2);
    assert!(!text.contains("FAIL"));
}

#[test]
fn selfcheck_quick_and_fault_injection() {
    let t = Instant::now();
    let o = tcmcap(&["selfcheck", "--quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(t.elapsed().as_secs() < 60);
    let o = tcmcap(&["selfcheck", "--quick", "--inject-kernel-offset", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL oracle-equivalence"));
    assert!(stderr(&o).contains("oracle-equivalence"));
}
