use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use replica_placement::fixtures;
use replica_placement::DistributionTree;
use tempfile::TempDir;

fn replica(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_replica")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_tree(dir: &TempDir, name: &str, tree: &DistributionTree) -> String {
    write(dir, name, &tree.to_text())
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn core_tests() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests")
}

#[test]
fn solve_optimal_multiple_on_fig1c() {
    let dir = TempDir::new().unwrap();
    let tree = write_tree(&dir, "fig1c.tree", &fixtures::fig1c());
    let sol = dir.path().join("out.sol");
    let out = replica(&["solve", "--tree", &tree, "--algo", "optimal-multiple", "-o", sol.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(&sol).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("replica ")).count(), 2);
    let check = replica(&["validate", "--tree", &tree, "--solution", sol.to_str().unwrap(), "--policy", "multiple"]);
    assert_eq!(code(&check), 0);
    assert!(stdout(&check).contains("2 replicas, cost 2"));
}

#[test]
fn upwards_solution_fails_closest_validation() {
    let dir = TempDir::new().unwrap();
    let tree = write_tree(&dir, "fig1b.tree", &fixtures::fig1b());
    let sol = write(&dir, "bad.sol", "replica s1\nreplica s2\nassign c1 s1 1\nassign c2 s2 1\n");
    let out = replica(&["validate", "--tree", &tree, "--solution", &sol, "--policy", "closest"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("NotClosest"), "{}", stdout(&out));
    let out = replica(&["validate", "--tree", &tree, "--solution", &sol, "--policy", "upwards"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn infeasible_heuristic_reports_residual() {
    let dir = TempDir::new().unwrap();
    let tree = write_tree(&dir, "fig1c.tree", &fixtures::fig1c());
    let out = replica(&["solve", "--tree", &tree, "--algo", "ctda"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stderr(&out).trim(), "no solution: residual 2 requests at root");
    assert!(stdout(&out).is_empty());
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&replica(&["frobnicate"])), 2);
    assert_eq!(code(&replica(&["solve", "--tree", "x.tree"])), 2);
    assert_eq!(code(&replica(&["solve", "--tree", "/nonexistent.tree", "--algo", "mg"])), 2);
    let junk = write(&dir, "junk.tree", "node r\n");
    let out = replica(&["solve", "--tree", &junk, "--algo", "mg"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("junk.tree"));
    let tree = write_tree(&dir, "t.tree", &fixtures::fig1a());
    assert_eq!(code(&replica(&["solve", "--tree", &tree, "--algo", "nope"])), 2);
    assert_eq!(code(&replica(&["validate", "--tree", &tree, "--solution", &tree, "--policy", "sideways"])), 2);
    assert_eq!(code(&replica(&["--help"])), 0);
}

#[test]
fn oracle_costs_separate_policies() {
    let dir = TempDir::new().unwrap();
    let tree = write_tree(&dir, "fig2.tree", &fixtures::fig2(2));
    let closest = replica(&["oracle", "--tree", &tree, "--policy", "closest"]);
    assert_eq!(code(&closest), 0);
    assert!(stderr(&closest).contains("4 replicas, cost 4"), "{}", stderr(&closest));
    let upwards = replica(&["oracle", "--tree", &tree, "--policy", "upwards"]);
    assert!(stderr(&upwards).contains("3 replicas, cost 3"));
    let tree = write_tree(&dir, "fig1c.tree", &fixtures::fig1c());
    let out = replica(&["oracle", "--tree", &tree, "--policy", "upwards"]);
    assert_eq!(code(&out), 1);
    assert_eq!(code(&replica(&["oracle", "--tree", &tree, "--cap", "1"])), 2);
}

#[test]
fn export_matches_golden_file() {
    let dir = TempDir::new().unwrap();
    let tree = write_tree(&dir, "fig1a.tree", &fixtures::fig1a());
    let out = replica(&["export-lp", "--tree", &tree, "--policy", "multiple"]);
    assert_eq!(code(&out), 0);
    let golden = fs::read_to_string(core_tests().join("golden/fig1a.multiple.exact.lp")).unwrap();
    assert_eq!(stdout(&out), golden);
    let out = replica(&["export-lp", "--tree", &tree, "--policy", "closest", "--profile", "qos+bw", "--relaxation", "refined"]);
    assert!(stdout(&out).contains("relaxation refined"));
}

#[test]
fn import_solution_round_trip() {
    let dir = TempDir::new().unwrap();
    let tree = write_tree(&dir, "fig1a.tree", &fixtures::fig1a());
    let good = write(&dir, "good.txt", "objective 1\nx_s1 1\ny_c1_s1 1\nz_c1_c1 1\n");
    let out = replica(&["import-solution", "--tree", &tree, "--lp-solution", &good]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(stdout(&out), "replica s1\nassign c1 s1 1\n");
    let invalid = write(&dir, "invalid.txt", "y_c1_s1 1\nz_c1_c1 1\n");
    assert_eq!(code(&replica(&["import-solution", "--tree", &tree, "--lp-solution", &invalid])), 1);
    let fractional = write(&dir, "frac.txt", "x_s1 0.5\n");
    assert_eq!(code(&replica(&["import-solution", "--tree", &tree, "--lp-solution", &fractional])), 2);
    let relaxed = replica(&["import-solution", "--tree", &tree, "--lp-solution", &fractional, "--relaxation", "rational"]);
    assert_eq!(code(&relaxed), 0);
    assert_eq!(stdout(&relaxed).trim(), "objective 0.5");
}

#[test]
fn lower_bounds() {
    let dir = TempDir::new().unwrap();
    let tree = write_tree(&dir, "fig5.tree", &fixtures::fig5(2, 4));
    let out = replica(&["lower-bound", "--tree", &tree]);
    assert_eq!((code(&out), stdout(&out).trim()), (0, "naive 2"));
    let asset = core_tests().join("assets/fig5_2_4.multiple.refined.sol");
    let out = replica(&["lower-bound", "--tree", &tree, "--lp-solution", asset.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("refined "));
    let hetero = write_tree(&dir, "fig4.tree", &fixtures::fig4(2, 3));
    assert_eq!(code(&replica(&["lower-bound", "--tree", &hetero])), 2);
}

#[test]
fn generate_is_deterministic() {
    let args = ["generate", "--seed", "5", "--lambda", "0.4", "--size", "20..60", "--capacity", "30..60"];
    let a = replica(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&replica(&args)));
    let tree: DistributionTree = stdout(&a).parse().unwrap();
    assert!((20..=60).contains(&tree.len()) && !tree.is_homogeneous());
    assert_eq!(code(&replica(&["generate", "--lambda", "0.01", "--capacity", "5", "--size", "4..6"])), 2);
}

#[test]
fn campaign_csv() {
    let dir = TempDir::new().unwrap();
    let config = write(
        &dir,
        "c.conf",
        "lambdas = 0.3, 0.7\ntrees = 3\nsize = 6..16\nmax_internal = 8\ncapacity = 50\nheuristics = CTDA, MG, MB\n",
    );
    let out = replica(&["campaign", "--config", &config, "--workers", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = stdout(&out);
    assert_eq!(csv.lines().next(), Some("lambda,heuristic,instances,successes,success_pct,rcost"));
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    assert_eq!(csv, stdout(&replica(&["campaign", "--config", &config])));
    assert_ne!(csv, stdout(&replica(&["campaign", "--config", &config, "--seed", "99"])));
    let bad = write(&dir, "bad.conf", "trees = many\n");
    assert_eq!(code(&replica(&["campaign", "--config", &bad])), 2);
}
