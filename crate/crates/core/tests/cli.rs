use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcf")).args(args).output().expect("mcf runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const DIAMOND: &str = "c two routes\np min 4 4\nn 1 4\nn 4 -4\na 1 2 0 3 1\na 1 3 0 3 2\na 2 4 0 3 1\na 3 4 0 3 2\n";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_with_each_solver() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "d.min", DIAMOND);
    for alg in ["scc", "mmcc", "cat", "ssp", "cas", "cos", "ns"] {
        let o = mcf(&["solve", "--alg", alg, &inst]);
        assert!(o.status.success(), "{alg}: {}", String::from_utf8_lossy(&o.stderr));
        let out = stdout(&o);
        assert!(out.contains("c status optimal"), "{alg}: {out}");
        assert!(out.lines().any(|l| l == "s 10"), "{alg}: {out}");
    }
}

#[test]
fn solution_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "d.min", DIAMOND);
    let o = mcf(&["solve", "--alg", "cos", "--cos-variant", "pr", &inst]);
    let sol = write(dir.path(), "d.sol", &stdout(&o));
    let v = mcf(&["verify", &inst, &sol]);
    assert!(v.status.success());
    assert_eq!(stdout(&v).trim(), "optimal");

    // Route everything the expensive way: feasible, with a negative cycle left.
    let worse = write(dir.path(), "w.sol", "s 14\nf 1 2 1\nf 1 3 3\nf 2 4 1\nf 3 4 3\n");
    let v = mcf(&["verify", &inst, &worse]);
    assert_eq!(v.status.code(), Some(2));
    let out = stdout(&v);
    assert!(out.contains("negative residual cycle"), "{out}");
    assert!(out.ends_with("feasible, not optimal\n"), "{out}");

    let broken = write(dir.path(), "b.sol", "s 3\nf 1 2 3\n");
    let v = mcf(&["verify", &inst, &broken]);
    assert_eq!(v.status.code(), Some(2));
    assert!(stdout(&v).contains("infeasible"));
}

#[test]
fn lower_bounds_keep_the_original_objective() {
    let dir = tempfile::tempdir().unwrap();
    // Two units forced onto the expensive route.
    let text = DIAMOND.replace("a 1 3 0 3 2", "a 1 3 2 3 2");
    let inst = write(dir.path(), "lb.min", &text);
    let o = mcf(&["solve", &inst]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().any(|l| l == "s 12"), "{out}");
    assert!(out.lines().any(|l| l == "f 1 3 2"), "{out}");
    let sol = write(dir.path(), "lb.sol", &out);
    assert!(mcf(&["verify", &inst, &sol]).status.success());
}

#[test]
fn infeasible_instance_exits_with_status() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "i.min", "p min 2 1\nn 1 5\nn 2 -5\na 1 2 0 3 1\n");
    for alg in ["scc", "ssp", "cos", "ns"] {
        let o = mcf(&["solve", "--alg", alg, &inst]);
        assert_eq!(o.status.code(), Some(2), "{alg}");
        assert!(stdout(&o).contains("c status infeasible"));
    }
}

#[test]
fn bad_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "x.min", "p min 2 1\na 1 3 0 1 1\n");
    let o = mcf(&["solve", &inst]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert!(!mcf(&["solve", "--alg", "nope", &inst]).status.success());
}

#[test]
fn generated_instances_solve() {
    let dir = tempfile::tempdir().unwrap();
    for family in ["random-sparse", "random-dense", "grid-torus"] {
        let path = dir.path().join(format!("{family}.min"));
        let path = path.to_str().unwrap();
        let g = mcf(&["gen", "--family", family, "--n", "64", "--seed", "3", "-o", path]);
        assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
        let a = stdout(&mcf(&["solve", "--alg", "ns", path]));
        let b = stdout(&mcf(&["solve", "--alg", "cos", path]));
        let obj = |s: &str| s.lines().find(|l| l.starts_with("s ")).map(str::to_string);
        assert!(obj(&a).is_some());
        assert_eq!(obj(&a), obj(&b), "{family}");
    }
    // Same seed, same file.
    let one = stdout(&mcf(&["gen", "--family", "grid-torus", "--n", "30", "--seed", "9"]));
    let two = stdout(&mcf(&["gen", "--family", "grid-torus", "--n", "30", "--seed", "9"]));
    assert_eq!(one, two);
}

#[test]
fn bench_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "bench.toml",
        "families = [\"random-sparse\"]\nsizes = [32, 64]\nseeds = [1, 2]\nsolvers = [\"ns-bs\", \"cos-par\", \"ssp\"]\ntimeout_secs = 30\n",
    );
    let summary = dir.path().join("summary.csv");
    let o = mcf(&["bench", "--config", &config, "--summary", summary.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = stdout(&o);
    let mut lines = rows.lines();
    assert!(lines.next().unwrap().starts_with("family,n,m,seed,solver,status"));
    assert_eq!(lines.count(), 2 * 2 * 3);
    let summary = fs::read_to_string(summary).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 3);
}
