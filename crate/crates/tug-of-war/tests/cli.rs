//! End-to-end tests of the `tow` binary: exit codes, file formats, and
//! byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CHAIN_CFG: &str = "\
domain.kind = interval
domain.a = 0.0
domain.b = 1.0
domain.left = dirichlet
domain.right = neumann
g.value = 1.0
payoff.variant = strip_only
grid.eps = 0.1
solver.tol = 1e-13
sim.start_cells = 5
sim.strategy = optimal1d
sim.episodes = 1000
sim.seed = 42
";

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tow-cli-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("experiment.cfg");
    std::fs::write(&path, text).unwrap();
    path
}

fn tow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(cfg: &Path, out: &Path, sub: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        sub,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    tow(&args)
}

#[test]
fn solve_succeeds_and_writes_files() {
    let dir = workdir("solve");
    let cfg = write_cfg(&dir, CHAIN_CFG);
    let out = run(&cfg, &dir.join("out"), "solve", &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("out/value.csv")).unwrap();
    assert!(csv.starts_with("# eps="));
    assert_eq!(csv.lines().count(), 2 + 11, "header, columns, 11 nodes");
    assert!(dir.join("out/solve_summary.txt").exists());
}

#[test]
fn invalid_eps_exits_2_naming_the_field() {
    let dir = workdir("badeps");
    let cfg = write_cfg(&dir, &CHAIN_CFG.replace("grid.eps = 0.1", "grid.eps = 0.3"));
    let out = run(&cfg, &dir.join("out"), "solve", &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("eps"), "stderr must name the field: {stderr}");
}

#[test]
fn missing_config_exits_2() {
    let dir = workdir("missing");
    let out = run(&dir.join("nope.cfg"), &dir.join("out"), "solve", &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_iterations_exit_3() {
    let dir = workdir("noconv");
    let cfg = write_cfg(
        &dir,
        &CHAIN_CFG.replace("solver.tol = 1e-13", "solver.tol = 1e-13\nsolver.max_iter = 5"),
    );
    let out = run(&cfg, &dir.join("out"), "solve", &[]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = workdir("det");
    let cfg = write_cfg(&dir, CHAIN_CFG);
    let (o1, o2) = (dir.join("r1"), dir.join("r2"));
    assert_eq!(run(&cfg, &o1, "simulate", &[]).status.code(), Some(0));
    assert_eq!(run(&cfg, &o2, "simulate", &[]).status.code(), Some(0));
    let a = std::fs::read(o1.join("estimates.csv")).unwrap();
    let b = std::fs::read(o2.join("estimates.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn seed_flag_overrides_the_config() {
    let dir = workdir("seed");
    let cfg = write_cfg(&dir, CHAIN_CFG);
    let (o1, o2) = (dir.join("r1"), dir.join("r2"));
    assert_eq!(run(&cfg, &o1, "simulate", &["--seed", "1"]).status.code(), Some(0));
    assert_eq!(run(&cfg, &o2, "simulate", &["--seed", "2"]).status.code(), Some(0));
    let a = std::fs::read(o1.join("estimates.csv")).unwrap();
    let b = std::fs::read(o2.join("estimates.csv")).unwrap();
    assert_ne!(a, b, "different seeds must change the estimates");
}

#[test]
fn simulate_mean_matches_the_oracle_value() {
    let dir = workdir("simval");
    let cfg = write_cfg(&dir, &CHAIN_CFG.replace("sim.episodes = 1000", "sim.episodes = 10000"));
    let out = run(&cfg, &dir.join("out"), "simulate", &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("out/estimates.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let mean: f64 = fields[2].parse().unwrap();
    let se: f64 = fields[3].parse().unwrap();
    assert!((mean - 0.5).abs() <= 3.0 * se, "mean {mean} vs 0.5 (se {se})");
    let truncated: u64 = fields[5].parse().unwrap();
    assert_eq!(truncated, 0);
}

#[test]
fn analyze_pass_and_fail_exit_codes() {
    let dir = workdir("analyze");
    let good = write_cfg(
        &dir,
        &format!("{CHAIN_CFG}analysis.checks = modulus residual\nanalysis.omega_c = 2.0\n"),
    );
    let out = run(&good, &dir.join("good"), "analyze", &[]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("good/analysis_report.txt").exists());

    let bad_path = dir.join("bad.cfg");
    std::fs::write(
        &bad_path,
        format!("{CHAIN_CFG}analysis.checks = modulus\nanalysis.omega_c = 0.01\n"),
    )
    .unwrap();
    let out = run(&bad_path, &dir.join("bad"), "analyze", &[]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("worst offender"), "stdout: {stdout}");
}

#[test]
fn oracle1d_full_payoff_row() {
    let dir = workdir("oracle");
    let cfg = write_cfg(
        &dir,
        &CHAIN_CFG.replace("payoff.variant = strip_only", "payoff.variant = full"),
    );
    let out = run(&cfg, &dir.join("out"), "oracle1d", &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("out/oracle.csv")).unwrap();
    let row5 = csv.lines().nth(6).unwrap();
    let a5: f64 = row5.split(',').nth(1).unwrap().parse().unwrap();
    assert!((a5 - 0.58).abs() <= 1e-12, "a_5 = {a5}");
}

#[test]
fn study_emits_one_row_per_eps() {
    let dir = workdir("study");
    let cfg = write_cfg(
        &dir,
        &CHAIN_CFG
            .replace("grid.eps = 0.1", "grid.eps_list = 0.1 0.05 0.025")
            .replace("payoff.variant = strip_only", "payoff.variant = full"),
    );
    let out = run(&cfg, &dir.join("out"), "study", &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("out/study.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);

    // A single-eps study still emits its one row.
    let single = write_cfg(
        &dir,
        &CHAIN_CFG.replace("grid.eps = 0.1", "grid.eps = 0.05"),
    );
    let out = run(&single, &dir.join("single"), "study", &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("single/study.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn threads_flag_is_accepted() {
    let dir = workdir("threads");
    let cfg = write_cfg(&dir, CHAIN_CFG);
    let out = run(&cfg, &dir.join("out"), "solve", &["--threads", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn trace_export_writes_episode_csv() {
    let dir = workdir("trace");
    let cfg = write_cfg(&dir, &format!("{CHAIN_CFG}sim.export_trace = true\n"));
    let out = run(&cfg, &dir.join("out"), "simulate", &[]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.join("out/trace_start0.csv")).unwrap();
    assert!(csv.starts_with("step,x,toss,payoff_increment"));
    // The trace ends on the absorbing endpoint.
    let last = csv.lines().last().unwrap();
    let x: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(x, 0.0);
}
