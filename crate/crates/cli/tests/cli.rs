use std::path::Path;
use std::process::{Command, Output};

use dephaser::sweep::parse_sweep_csv;

fn dephaser(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dephaser")).args(args).output().expect("spawn dephaser")
}

fn dephaser_in(dir: &Path, threads: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dephaser"))
        .args(args)
        .current_dir(dir)
        .env("DEPHASER_THREADS", threads)
        .output()
        .expect("spawn dephaser")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn rate_prints_one_row() {
    let o = dephaser(&["rate", "--T", "100", "--L", "4e-9", "--D", "1e-8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = parse_sweep_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    let t2 = rows[0].t2;
    assert!((1e-12..=30e-12).contains(&t2), "t2 {t2}");
    assert_eq!(rows[0].t2, 1.0 / rows[0].gamma);
}

#[test]
fn rate_degenerate_separation() {
    let o = dephaser(&["rate", "--T", "100", "--L", "4e-9", "--D", "0"]);
    assert_eq!(code(&o), 0);
    let rows = parse_sweep_csv(&stdout(&o)).unwrap();
    assert_eq!(rows[0].gamma, 0.0);
    assert!(rows[0].t2.is_infinite());
}

#[test]
fn negative_temperature_is_usage_error_naming_flag() {
    let o = dephaser(&["rate", "--T", "-5", "--L", "4e-9", "--D", "1e-8"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--T"), "{}", stderr(&o));
    let o = dephaser(&["rate", "--T", "5", "--L", "0", "--D", "1e-8"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--L"), "{}", stderr(&o));
}

#[test]
fn unknown_flags_and_help() {
    assert_eq!(code(&dephaser(&["rate", "--bogus"])), 1);
    assert_eq!(code(&dephaser(&["--help"])), 0);
    assert_eq!(code(&dephaser(&[])), 1);
}

#[test]
fn temperature_sweep_t2_decreases() {
    let o = dephaser(&["sweep", "--axis", "T", "--min", "10", "--max", "300", "--points", "20", "--log", "--L", "4e-9", "--D", "1e-8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = parse_sweep_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 20);
    assert!(rows.windows(2).all(|w| w[1].t2 < w[0].t2));
    assert!((rows[0].axis_value - 10.0).abs() < 1e-12 && (rows[19].axis_value - 300.0).abs() < 1e-9);
}

#[test]
fn distance_sweep_rises_then_flattens() {
    let o = dephaser(&["sweep", "--axis", "D", "--min", "1e-10", "--max", "2e-6", "--points", "12", "--log", "--L", "4e-9", "--T", "50"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = parse_sweep_csv(&stdout(&o)).unwrap();
    assert!(rows.windows(2).all(|w| w[1].gamma > w[0].gamma));
    let first = rows[1].gamma / rows[0].gamma;
    let last = rows[11].gamma / rows[10].gamma;
    assert!(first > 2.0 && last < 1.2, "{first} {last}");
}

#[test]
fn sweep_needs_two_points() {
    let o = dephaser(&["sweep", "--axis", "T", "--min", "10", "--max", "20", "--points", "1", "--L", "4e-9", "--D", "1e-8"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--points"), "{}", stderr(&o));
}

#[test]
fn sweep_writes_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let o = dephaser_in(
        dir.path(),
        "2",
        &["sweep", "--axis", "T", "--min", "10", "--max", "100", "--points", "5", "--log", "--L", "4e-9", "--D", "1e-8", "--out", "s.csv", "--plot", "s.svg"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("axis,axis_value,gamma_per_s,t2_s,method,error_estimate\n"));
    assert_eq!(parse_sweep_csv(&csv).unwrap().len(), 5);
    let svg = std::fs::read_to_string(dir.path().join("s.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn validate_passes_and_rejects_tiny_sample_counts() {
    let o = dephaser(&["validate", "--T", "50", "--L", "4e-9", "--D", "1e-8", "--samples", "1000000"]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("PASS") && !stdout(&o).contains("FAIL"));
    let o = dephaser(&["validate", "--T", "50", "--L", "4e-9", "--D", "1e-8", "--samples", "100"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--samples"), "{}", stderr(&o));
}

#[test]
fn bad_material_file_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "tau0_s = -1\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&dephaser(&["rate", "--T", "50", "--L", "4e-9", "--D", "1e-8", "--material", p])), 3);
    std::fs::write(&path, "tau0_s = fast\n").unwrap();
    assert_eq!(code(&dephaser(&["rate", "--T", "50", "--L", "4e-9", "--D", "1e-8", "--material", p])), 3);
    let missing = dir.path().join("absent.txt");
    assert_eq!(code(&dephaser(&["rate", "--T", "50", "--L", "4e-9", "--D", "1e-8", "--material", missing.to_str().unwrap()])), 3);
}

#[test]
fn material_file_changes_the_rate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "# slower anharmonic decay\ntau0_s = 1.84e-11\n").unwrap();
    let base = parse_sweep_csv(&stdout(&dephaser(&["rate", "--T", "50", "--L", "4e-9", "--D", "1e-8"]))).unwrap();
    let o = dephaser(&["rate", "--T", "50", "--L", "4e-9", "--D", "1e-8", "--material", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let slow = parse_sweep_csv(&stdout(&o)).unwrap();
    assert!((base[0].gamma / slow[0].gamma - 2.0).abs() < 1e-9);
}

#[test]
fn curve_reports_plateau() {
    let finite = dephaser(&["curve", "--spectral", "gaussian", "--A", "3.3e-81", "--n", "2", "--omega-c", "1e12", "--T", "0", "--tmax", "1e-10", "--points", "10"]);
    assert_eq!(code(&finite), 0, "{}", stderr(&finite));
    assert!(stderr(&finite).contains("plateau: 0."), "{}", stderr(&finite));
    let divergent = dephaser(&["curve", "--spectral", "gaussian", "--A", "5e-70", "--n", "1", "--omega-c", "1e12", "--T", "10", "--tmax", "1e-10", "--points", "10"]);
    assert_eq!(code(&divergent), 0, "{}", stderr(&divergent));
    assert!(stderr(&divergent).contains("plateau: divergent"));
    let zero = dephaser(&["curve", "--spectral", "exponential", "--A", "3.3e-81", "--n", "3", "--omega-c", "1e12", "--T", "5", "--tmax", "0"]);
    assert_eq!(code(&zero), 0);
    assert_eq!(stdout(&zero).lines().count(), 2);
}

#[test]
fn evolve_decays_by_one_over_e() {
    let o = dephaser(&["evolve", "--gamma", "1e9", "--rho01", "0.4,0", "--tmax", "1e-9", "--points", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name} in {header:?}"));
    let re = last[col("re_rho01")];
    let im = last[col("im_rho01")];
    assert!(((re * re + im * im).sqrt() / 0.4 - (-1f64).exp()).abs() < 1e-9);
}

#[test]
fn evolve_without_dephasing_keeps_coherence() {
    let o = dephaser(&["evolve", "--gamma", "0", "--rho01", "0.4,0", "--tmax", "1e-9", "--points", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let state = |line: &str| line.split_once(',').unwrap().1.to_string();
    let first = state(text.lines().nth(1).unwrap());
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().skip(1).all(|l| state(l) == first), "{text}");
}

#[test]
fn evolve_rejects_unphysical_state() {
    let o = dephaser(&["evolve", "--gamma", "1e9", "--rho00", "0.5", "--rho01", "0.9,0", "--tmax", "1e-9"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--rho01"), "{}", stderr(&o));
}

#[test]
fn output_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--axis", "T", "--min", "20", "--max", "80", "--points", "4", "--L", "4e-9", "--D", "1e-8", "--method", "mc", "--samples", "200000", "--seed", "5", "--out", "x.csv"];
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let o = dephaser_in(dir.path(), threads, &args);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(std::fs::read(dir.path().join("x.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn invalid_thread_setting_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_dephaser"))
        .args(["rate", "--T", "50", "--L", "4e-9", "--D", "1e-8"])
        .env("DEPHASER_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}

#[test]
fn unwritable_output_is_config_error() {
    let o = dephaser(&["rate", "--T", "50", "--L", "4e-9", "--D", "1e-8", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code(&o), 3);
}
