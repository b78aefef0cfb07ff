use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn cpds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpds")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes `cpds reduce <input> <which..>` to `out` and returns its path.
fn reduce(input: &Path, which: &[&str], out: &Path) -> PathBuf {
    let mut args = vec!["reduce", arg(input)];
    args.extend_from_slice(which);
    let o = cpds(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    fs::write(out, &o.stdout).unwrap();
    out.to_path_buf()
}

fn winner(p: &Path) -> String {
    let o = cpds(&["solve", arg(p)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    stdout(&o).lines().next().unwrap().trim_start_matches("winner: ").to_string()
}

#[test]
fn validate_accepts_example_fixture() {
    let o = cpds(&["validate", arg(&fixture("example2.cpg"))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn simulate_reproduces_example_stacks() {
    let o = cpds(&["simulate", arg(&fixture("example2.cpg")), "--seed", "1", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let stacks: Vec<&str> = text
        .lines()
        .map(|l| {
            let from = l.find('[').unwrap();
            &l[from..l.find(" levels=").unwrap()]
        })
        .collect();
    assert_eq!(
        stacks,
        [
            "[[[b^0]_1]_2]_3",
            "[[[b^0]_1]_2]_3",
            "[[[b^0]_1]_2 [[b^0]_1]_2]_3",
            "[[[a^1 b^0]_1]_2 [[b^0]_1]_2]_3",
            "[[[a^1 b^0]_1]_2 [[a^1 b^0]_1]_2 [[b^0]_1]_2]_3",
            "[[[b^0]_1]_2]_3",
        ]
    );
    assert!(text.lines().last().unwrap().starts_with("5 collapse c5 "));
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let f = fixture("adversarial.cpg");
    let a = cpds(&["simulate", arg(&f), "--seed", "9", "--steps", "50"]);
    let b = cpds(&["simulate", arg(&f), "--seed", "9", "--steps", "50"]);
    assert_eq!(a.stdout, b.stdout);
    let j = cpds(&["--json", "simulate", arg(&f), "--seed", "9", "--steps", "50"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), stdout(&a).lines().count());
}

#[test]
fn parse_error_names_the_line() {
    let o = cpds(&["validate", arg(&fixture("bad_op.cpg"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 7"), "{}", stderr(&o));
}

#[test]
fn diagnostics_are_precondition_failures() {
    let o = cpds(&["validate", arg(&fixture("bad_rewrite.cpg"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("link order"));
}

#[test]
fn unbounded_game_is_unsolvable() {
    let o = cpds(&["solve", arg(&fixture("pumping.cpg"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("unsolvable"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cpds(&["solve"]).status.code(), Some(1));
    assert_eq!(cpds(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cpds(&["solve", "/nonexistent.cpg"]).status.code(), Some(1));
    assert_eq!(cpds(&["--help"]).status.code(), Some(0));
}

#[test]
fn solve_json_mirrors_text() {
    let f = fixture("adversarial.cpg");
    let text = stdout(&cpds(&["solve", arg(&f), "--strategy"]));
    let v: serde_json::Value = serde_json::from_slice(&cpds(&["--json", "solve", arg(&f), "--strategy"]).stdout).unwrap();
    assert!(text.starts_with(&format!("winner: {}\nnodes: {}\nedges: {}\n", v["winner"].as_str().unwrap(), v["nodes"], v["edges"])));
    assert_eq!(v["strategy"].as_array().unwrap().len(), text.lines().filter(|l| l.contains(" -> ")).count());
}

#[test]
fn order_reduction_needs_order_two() {
    let o = cpds(&["reduce", arg(&fixture("even_loop.cpg")), "order"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("order at least 2"));
    let o = cpds(&["reduce", arg(&fixture("odd_pusher.cpg")), "order"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rank-aware"));
}

#[test]
fn reductions_chain_through_files() {
    let d = tmp("chain");
    let ra = reduce(&fixture("adversarial.cpg"), &["rank-aware"], &d.join("ra.cpg"));
    let c3 = reduce(&ra, &["counter", "3"], &d.join("c3.cpg"));
    let c4 = reduce(&ra, &["counter", "4"], &d.join("c4.cpg"));
    let pr = reduce(&ra, &["poly", "1", "2"], &d.join("pr.cpg"));
    let pg = reduce(&ra, &["poly", "1", "2", "--gadget"], &d.join("pg.cpg"));
    assert_eq!(winner(&c3), "E");
    assert_eq!(winner(&pr), winner(&c4));
    assert_eq!(winner(&pg), winner(&c4));
    for p in [&ra, &c3, &pr, &pg] {
        assert_eq!(cpds(&["validate", arg(p)]).status.code(), Some(0));
        let again = cpds(&["reduce", arg(p), "rank-aware"]);
        assert_eq!(again.status.code(), Some(0));
    }
    let c1 = reduce(&ra, &["counter", "1"], &d.join("c1.cpg"));
    assert_eq!(winner(&c1), "A");
}

#[test]
fn order_reduction_and_reaware() {
    let d = tmp("order");
    let ra = reduce(&fixture("odd_pusher.cpg"), &["rank-aware"], &d.join("ra.cpg"));
    let or = reduce(&ra, &["order", "--reaware"], &d.join("or.cpg"));
    assert_eq!(winner(&or), "E");
    assert!(fs::read_to_string(&or).unwrap().contains("meta rankaware"));
    let c = reduce(&or, &["counter", "3"], &d.join("c.cpg"));
    assert_eq!(winner(&c), "E");
}

#[test]
fn reduce_output_is_deterministic() {
    let f = fixture("odd_pusher.cpg");
    let a = cpds(&["reduce", arg(&f), "rank-aware"]);
    let b = cpds(&["reduce", arg(&f), "rank-aware"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pipeline_on_even_loop_passes_with_e() {
    let o = cpds(&["verify-pipeline", arg(&fixture("even_loop.cpg")), "--sweep", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for l in text.lines().filter(|l| l.starts_with("stage ")) {
        assert!(l.ends_with("winner=E"), "{l}");
    }
    assert!(text.lines().filter(|l| l.starts_with("check ")).all(|l| l.contains(": pass") || l.contains(": skipped [order 1]")));
}

#[test]
fn pipeline_shows_flip_on_adversarial() {
    let f = fixture("adversarial.cpg");
    let o = cpds(&["verify-pipeline", arg(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sweep: 0:A 1:A 2:E 3:E"));
    assert!(stdout(&o).contains("b_star: 2\n"));
    let v: serde_json::Value = serde_json::from_slice(&cpds(&["--json", "verify-pipeline", arg(&f)]).stdout).unwrap();
    assert_eq!(v["b_star"], 2);
    assert_eq!(v["sweep"]["1"], "A");
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
    assert!(v["stages"][0].get("ms").is_none());
    let t: serde_json::Value = serde_json::from_slice(&cpds(&["--json", "verify-pipeline", arg(&f), "--timings"]).stdout).unwrap();
    assert!(t["stages"][0]["ms"].is_u64());
}

#[test]
fn pipeline_failure_exits_four() {
    let o = cpds(&["verify-pipeline", arg(&fixture("odd_pusher.cpg")), "--sweep", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("check (d) counter and order reductions commute: fail"));
}

#[test]
fn pipeline_on_unsolvable_input_exits_three() {
    let o = cpds(&["verify-pipeline", arg(&fixture("pumping.cpg")), "--sweep", "1", "--max-nodes", "500"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gen_is_deterministic() {
    let (a, b) = (tmp("gen_a"), tmp("gen_b"));
    for d in [&a, &b] {
        let o = cpds(&["gen", "--out", arg(d), "--seed", "5", "--count", "4"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let man = fs::read_to_string(a.join("manifest.txt")).unwrap();
    assert_eq!(man, fs::read_to_string(b.join("manifest.txt")).unwrap());
    assert_eq!(man.lines().count(), 4);
    for line in man.lines() {
        let f: Vec<&str> = line.split(' ').collect();
        assert_eq!(f.len(), 5);
        assert_eq!(f[2], "2");
        assert_eq!(fs::read(a.join(f[1])).unwrap(), fs::read(b.join(f[1])).unwrap());
        assert_eq!(cpds(&["solve", arg(&a.join(f[1]))]).status.code(), Some(0));
    }
}

#[test]
fn gen_with_zero_count_writes_empty_manifest() {
    let d = tmp("gen_empty");
    let o = cpds(&["gen", "--out", arg(&d), "--count", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(d.join("manifest.txt")).unwrap(), "");
}

#[test]
fn gen_reports_bad_ranges() {
    let d = tmp("gen_bad");
    let o = cpds(&["gen", "--out", arg(&d), "--states", "4..2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cpds(&["gen", "--out", arg(&d), "--states", "x..2"]);
    assert_eq!(o.status.code(), Some(1));
}
