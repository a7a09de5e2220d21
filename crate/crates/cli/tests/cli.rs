use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tracesim::io::read_edge_list_file;
use tracesim::report::{verify_manifest, ExperimentReport};

fn tracesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tracesim")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, spec: &str, seed: &str) -> std::path::PathBuf {
    let out = dir.join("g.txt");
    let o = tracesim(&["generate", "--spec", spec, "--seed", seed, "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

#[test]
fn generate_writes_a_connected_edge_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = generate(dir.path(), "er:n=200,k=6", "3");
    let g = read_edge_list_file(&out).unwrap();
    assert!(g.is_connected());
    assert!(g.n() > 180);

    let again = dir.path().join("again.txt");
    tracesim(&["generate", "--spec", "er:n=200,k=6", "--seed", "3", "--out", p(&again)]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.txt");
    for args in [
        vec!["generate", "--spec", "er:n=10,kk=2", "--seed", "1", "--out", p(&out)],
        vec!["generate", "--spec", "er:n=10,k=2"],
        vec!["frobnicate"],
        vec!["betweenness", "--graph", "/nonexistent/graph.txt", "--out", p(&out)],
    ] {
        let o = tracesim(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", stderr(&o));
    }
    let o = tracesim(&["generate", "--spec", "er:n=10,kk=2", "--seed", "1", "--out", p(&out)]);
    assert!(stderr(&o).contains("kk"));
    assert_eq!(code(&tracesim(&["--help"])), 0);
    assert_eq!(code(&tracesim(&["--version"])), 0);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), "er:n=100,k=5", "1");
    let out = dir.path().join("run");
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "n_sources = 2\nrho_t = 0.1\nrealizations = 0\nseed = 1\n").unwrap();
    let o = tracesim(&["explore", "--config", p(&cfg), "--graph", p(&graph), "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("realizations"), "{}", stderr(&o));

    // No budget at all.
    let o = tracesim(&["explore", "--graph", p(&graph), "--out", p(&out), "--seed", "1"]);
    assert_eq!(code(&o), 1);
    // Missing config file.
    let o = tracesim(&["explore", "--config", "/nonexistent.cfg", "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    // Malformed edge list.
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 1\n1 1\n").unwrap();
    let o = tracesim(&[
        "explore",
        "--graph",
        p(&bad),
        "--out",
        p(&out),
        "--seed",
        "1",
        "--n-sources",
        "1",
        "--rho-t",
        "0.5",
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn explore_is_reproducible_and_manifest_checks_out() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), "rsf:n=300,gamma=2.3", "2");
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        format!("graph_file = {}\nn_sources = 1\nrho_t = 0.1\nrealizations = 3\nseed = 9\n", p(&graph)),
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let oa = tracesim(&["explore", "--config", p(&cfg), "--out", p(&a)]);
    let ob = tracesim(&["explore", "--config", p(&cfg), "--out", p(&b)]);
    assert_eq!(code(&oa), 0, "{}", stderr(&oa));
    assert_eq!(oa.stdout, ob.stdout);
    // A single source is flagged.
    assert!(stderr(&oa).contains("single source"), "{}", stderr(&oa));

    let report = ExperimentReport::read(&a.join("report.json")).unwrap();
    verify_manifest(&a, &report).unwrap();
    for entry in &report.files {
        let (x, y) = (fs::read(a.join(&entry.path)).unwrap(), fs::read(b.join(&entry.path)).unwrap());
        assert_eq!(x, y, "{} differs", entry.path);
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), "er:n=150,k=6", "4");
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "n_sources = 2\nrho_t = 0.1\nrealizations = 2\nseed = 1\npsc = usp\n").unwrap();
    let out = dir.path().join("o");
    let o = tracesim(&[
        "explore",
        "--config",
        p(&cfg),
        "--graph",
        p(&graph),
        "--out",
        p(&out),
        "--psc",
        "asp",
        "--n-sources",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = ExperimentReport::read(&out.join("report.json")).unwrap();
    assert!(report.config.contains("psc = asp"), "{}", report.config);
    assert_eq!(report.points[0].budget.n_sources, 3);
}

#[test]
fn sweep_comparison_and_betweenness_commands() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), "rsf:n=300,gamma=2.3", "5");
    let common = [
        "--graph",
        p(&graph),
        "--seed",
        "3",
        "--epsilon",
        "2",
        "--rho-t-grid",
        "0.02, 0.1, 0.3",
        "--realizations",
        "2",
    ];

    let out = dir.path().join("sweep");
    let mut args = vec!["symmetry-sweep", "--out", p(&out), "--psc", "rsp"];
    args.extend(common);
    let o = tracesim(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("symmetry point"));
    verify_manifest(&out, &ExperimentReport::read(&out.join("report.json")).unwrap()).unwrap();

    let out = dir.path().join("cmp");
    let mut args = vec!["compare-deployment", "--out", p(&out)];
    args.extend(common);
    let o = tracesim(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("compare.csv").exists());

    let out = dir.path().join("bc");
    let o = tracesim(&["betweenness", "--graph", p(&graph), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    verify_manifest(&out, &ExperimentReport::read(&out.join("report.json")).unwrap()).unwrap();
}

#[test]
fn infeasible_sweep_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), "er:n=50,k=4", "5");
    let out = dir.path().join("sweep");
    let o = tracesim(&[
        "symmetry-sweep",
        "--graph",
        p(&graph),
        "--out",
        p(&out),
        "--seed",
        "1",
        "--epsilon",
        "40",
        "--rho-t-grid",
        "0.5",
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).contains("grid"), "{}", stderr(&o));
}
