use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cosra_cli::commands::{cmd_degree_dist, cmd_run, cmd_stats, cmd_sweep};
use cosra_cli::config::{Manifest, Settings};
use cosra_cli::output::REPORT_HEADER;
use tempfile::TempDir;

/// 30 users x 40 objects in u.data layout with a popularity skew.
fn toy_ratings(dir: &Path) -> PathBuf {
    let mut text = String::new();
    let mut state = 12345u64;
    for u in 1..=30 {
        for o in 1..=40 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let draw = (state >> 33) % 100;
            if draw < 60 / (1 + o / 8) {
                let rating = 1 + (state >> 20) % 5;
                text.push_str(&format!("{u}\t{o}\t{rating}\t{}\n", 880000000 + u * o));
            }
        }
    }
    let path = dir.join("toy.data");
    fs::write(&path, text).unwrap();
    path
}

fn manifest(data: &Path, out: &Path, extra: &[(&str, &str)]) -> Manifest {
    let mut s = Settings::new();
    s.insert("data".into(), data.display().to_string());
    s.insert("out".into(), out.display().to_string());
    s.insert("folds".into(), "2".into());
    s.insert("realizations".into(), "1".into());
    s.insert("list-length".into(), "5".into());
    for (k, v) in extra {
        s.insert(k.to_string(), v.to_string());
    }
    Manifest::from_settings(&s).unwrap()
}

fn cosra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosra")).args(args).output().unwrap()
}

#[test]
fn stats_prints_one_table() {
    let dir = TempDir::new().unwrap();
    let data = toy_ratings(dir.path());
    let out = cosra(&["stats", "--data", data.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "users objects links sparsity");
    assert_eq!(lines.len(), 2);
    assert_eq!(text, cmd_stats(&manifest(&data, dir.path(), &[])).unwrap());
}

#[test]
fn missing_dataset_names_the_path() {
    let out = cosra(&["stats", "--data", "/nonexistent/u.data"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("/nonexistent/u.data"), "{err}");
}

#[test]
fn invalid_settings_fail_before_compute() {
    let dir = TempDir::new().unwrap();
    let data = toy_ratings(dir.path());
    let data = data.to_str().unwrap();
    for args in [
        vec!["sweep", "--data", data, "--eta1", "-2:2:0"],
        vec!["run", "--data", data, "--folds", "1"],
        vec!["run", "--data", data, "--algorithms", "svd"],
        vec!["run", "--data", data, "--threshold", "9"],
    ] {
        let out = cosra(&args);
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8(out.stderr).unwrap().starts_with("error:"));
    }
    assert!(!dir.path().join("report.csv").exists());
}

#[test]
fn run_writes_rows_per_algorithm_and_summary() {
    let dir = TempDir::new().unwrap();
    let data = toy_ratings(dir.path());
    let path = cmd_run(&manifest(&data, dir.path(), &[])).unwrap();
    let csv = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], REPORT_HEADER);
    // one realization row plus mean and std for each of six algorithms
    assert_eq!(lines.len(), 1 + 6 * 3);
    let names: Vec<&str> = lines[1..7].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(names, ["GR", "UCF", "ICF", "MD", "HC", "CosRA"]);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), REPORT_HEADER.split(',').count());
    }
    assert!(lines.iter().filter(|l| l.contains(",mean,")).count() == 6);
    let echo = fs::read_to_string(dir.path().join("manifest.echo")).unwrap();
    assert!(echo.contains("folds = 2"));
}

#[test]
fn run_is_reproducible_and_config_file_matches_flags() {
    let dir = TempDir::new().unwrap();
    let data = toy_ratings(dir.path());
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    let flags = ["--folds", "3", "--realizations", "2", "--list-length", "4", "--seed", "9"];
    for (out, workers) in [(&a, "1"), (&b, "3")] {
        let mut args = vec!["run", "--data", data.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend(flags);
        args.extend(["--workers", workers]);
        assert!(cosra(&args).status.success());
    }
    let config = dir.path().join("run.cfg");
    fs::write(
        &config,
        format!("data = {}\nfolds = 3\nrealizations = 2\nlist_length = 4\nseed = 9\n", data.display()),
    )
    .unwrap();
    assert!(cosra(&["run", "--config", config.to_str().unwrap(), "--out", c.to_str().unwrap()])
        .status
        .success());
    let report = |d: &PathBuf| fs::read(d.join("report.csv")).unwrap();
    assert_eq!(report(&a), report(&b));
    assert_eq!(report(&a), report(&c));
}

#[test]
fn sweep_special_case_matches_cosra_run() {
    let dir = TempDir::new().unwrap();
    let data = toy_ratings(dir.path());
    let m = manifest(&data, dir.path(), &[("eta1", "-0.5"), ("eta2", "-0.5"), ("algorithms", "cosra")]);
    let sweep = fs::read_to_string(cmd_sweep(&m).unwrap()).unwrap();
    let run = fs::read_to_string(cmd_run(&m).unwrap()).unwrap();
    let cell: Vec<&str> = sweep.lines().nth(1).unwrap().split(',').collect();
    let mean: Vec<&str> = run.lines().find(|l| l.contains(",mean,")).unwrap().split(',').collect();
    assert_eq!(sweep.lines().count(), 2);
    assert_eq!(&cell[..2], ["-0.5", "-0.5"]);
    assert_eq!(cell[2..], mean[7..]);
}

#[test]
fn sweep_grid_has_every_cell() {
    let dir = TempDir::new().unwrap();
    let data = toy_ratings(dir.path());
    let m = manifest(&data, dir.path(), &[("eta1", "-1:0:0.5"), ("eta2", "-0.5,1")]);
    let sweep = fs::read_to_string(cmd_sweep(&m).unwrap()).unwrap();
    assert_eq!(sweep.lines().count(), 1 + 3 * 2);
}

#[test]
fn degdist_gr_with_single_slot() {
    let dir = TempDir::new().unwrap();
    let data = toy_ratings(dir.path());
    let m = manifest(&data, dir.path(), &[("algorithms", "gr,cosra*(-1,0.5)"), ("lengths", "1,3")]);
    let paths = cmd_degree_dist(&m).unwrap();
    let names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        ["degdist_gr_1.csv", "degdist_gr_3.csv", "degdist_cosra-star_-1_0.5_1.csv", "degdist_cosra-star_-1_0.5_3.csv"]
    );
    let gr = fs::read_to_string(&paths[0]).unwrap();
    assert!(gr.starts_with("degree,count\n"));
    // with L = 1 GR can only pick from a few top degrees
    assert!(gr.lines().count() - 1 <= 5, "{gr}");
}
