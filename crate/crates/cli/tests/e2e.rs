use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tempfile::TempDir;
use viscofix_core::trace::read_trace_csv;
use viscofix_core::{fredholm_operator, FredholmProblem, Point};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn viscofix(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_viscofix"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Value after `label` on the first line starting with it.
fn field<'a>(stdout: &'a str, label: &str) -> &'a str {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(label))
        .unwrap_or_else(|| panic!("no '{label}' in:\n{stdout}"))
        .trim()
}

fn first_coord(stdout: &str) -> f64 {
    let point = field(stdout, "final point:");
    point
        .trim_start_matches('[')
        .split([',', ']'])
        .next()
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

fn linear_1d(schedule: &str, solver: &str) -> String {
    format!(
        "[space]\nkind = euclidean\ndim = 1\n\
         [problem]\nkind = builtin-linear\nslope = 0.5\n\
         [contraction]\nkind = linear\nc = 0.25\n\
         [scheme]\nname = new_implicit\n\
         [schedule]\n{schedule}\n\
         [solver]\n{solver}\n"
    )
}

const LINE_PROJECTION: &str = "[space]\nkind = euclidean\ndim = 2\n\
    [problem]\nkind = line-projection\n\
    [contraction]\nkind = constant-point\npoint = \"3, 4\"\n\
    [scheme]\nname = new_implicit\n\
    [schedule]\npreset = halpern-mix\n\
    [solver]\nouter_tol = 1e-4\nmax_outer = 100000\n";

#[test]
fn solve_linear_problem_converges_to_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        &linear_1d("preset = eq75", "outer_tol = 1e-6\nmax_outer = 1000000"),
    );
    let r = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    assert_eq!(field(&r.stdout, "termination:"), "converged");
    assert!(first_coord(&r.stdout).abs() <= 2e-6);
    // eq75 fails two conditions; the solve warns about them.
    assert!(
        r.stderr.contains("condition (iii) violated"),
        "{}",
        r.stderr
    );
}

#[test]
fn solve_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.conf", LINE_PROJECTION);
    let a = viscofix(&["solve", "--config", p(&cfg)]);
    let b = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.code, 0);
    let vi: f64 = field(&a.stdout, "vi residual:")
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(vi >= -1e-8);
}

#[test]
fn solve_exit_two_on_max_iters() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        &linear_1d("preset = eq75", "outer_tol = 1e-12\nmax_outer = 100"),
    );
    let r = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(r.code, 2);
    assert_eq!(field(&r.stdout, "termination:"), "max_iters");
}

#[test]
fn solve_writes_a_trace_that_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        &linear_1d("preset = eq75", "max_outer = 250"),
    );
    let trace = dir.path().join("trace.csv");
    let r = viscofix(&["solve", "--config", p(&cfg), "--trace", p(&trace)]);
    assert_eq!(r.code, 2);
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("n,residual,step_norm,inner_iters,alpha1,alpha2,alpha3,delta\n"));
    let rows = read_trace_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 250);
    assert_eq!(rows[0].n, 2);
    assert_eq!(rows[0].alpha1, 0.25);
    // Rewriting the parsed rows reproduces the file byte for byte.
    let mut again = Vec::new();
    viscofix_core::trace::write_trace_csv(&rows, &mut again).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);
}

#[test]
fn solve_identity_problem_stops_at_first_check() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        "[space]\nkind = euclidean\ndim = 3\n[problem]\nkind = builtin-linear\nslope = 1\n\
         [scheme]\nname = new_implicit\n[schedule]\npreset = eq75\n",
    );
    let r = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(field(&r.stdout, "iterations:").starts_with("0 "));
    assert_eq!(field(&r.stdout, "final residual:"), "0.000000e0");
}

#[test]
fn gamma_out_of_range_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        "[space]\nkind = euclidean\ndim = 2\n[problem]\nkind = monotone\ngamma = 3\nalpha = 1\n\
         [scheme]\nname = 7\n[schedule]\npreset = halpern-mix\n",
    );
    let r = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("(0, 2*alpha] = (0, 2]"), "{}", r.stderr);
}

#[test]
fn theta_out_of_range_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        "[space]\nkind = euclidean\ndim = 2\n\
         [problem]\nkind = pseudocontraction\nk = -0.3333333333333333\nlambda = 0.5\ntheta = 0.7\nL = 1\n\
         [scheme]\nname = 7\n[schedule]\npreset = halpern-mix\n",
    );
    let r = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("(0, lambda/L^2]"), "{}", r.stderr);
}

#[test]
fn unknown_key_cites_key_and_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        "[space]\nkind = euclidean\ndim = 1\n[solver]\nouter_tol = 1e-6\nmax_outr = 10\n",
    );
    let r = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 6"), "{}", r.stderr);
    assert!(r.stderr.contains("max_outr"), "{}", r.stderr);
}

#[test]
fn range_violation_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        &linear_1d("preset = eq75\nstart = 1", "max_outer = 10"),
    );
    let r = viscofix(&["solve", "--config", p(&cfg)]);
    assert_eq!(r.code, 1);
    assert!(field(&r.stdout, "termination:").starts_with("schedule_range_violation (n = 1"));
}

#[test]
fn missing_config_file_exits_one() {
    let r = viscofix(&["solve", "--config", "/nonexistent/x.conf"]);
    assert_eq!(r.code, 1);
}

#[test]
fn validate_schedule_presets() {
    let r = viscofix(&[
        "validate-schedule",
        "--preset",
        "eq75",
        "--horizon",
        "10000",
    ]);
    assert_eq!(r.code, 0);
    let status = |label: &str| {
        r.stdout
            .lines()
            .find(|l| l.starts_with(label))
            .unwrap()
            .split_whitespace()
            .nth(1)
            .unwrap()
            .to_owned()
    };
    assert_eq!(status("(i) "), "satisfied");
    assert_eq!(status("(ii) "), "satisfied");
    assert_eq!(status("(iii) "), "violated");
    assert_eq!(status("(iv) "), "violated");
    assert_eq!(status("(v) "), "satisfied");
    assert!(r.stdout.contains("range violations before n0 (skipped): 1"));

    let h = viscofix(&[
        "validate-schedule",
        "--preset",
        "halpern-mix",
        "--horizon",
        "1000",
    ]);
    assert_eq!(h.code, 0);
    assert!(h
        .stdout
        .lines()
        .any(|l| l.starts_with("(ii)") && l.contains("violated")));

    assert_eq!(
        viscofix(&["validate-schedule", "--preset", "nope", "--horizon", "1000"]).code,
        1
    );
    assert_eq!(
        viscofix(&["validate-schedule", "--preset", "eq75", "--horizon", "50"]).code,
        1
    );
}

#[test]
fn validate_schedule_from_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        "[schedule]\nalpha1 = 0, 0.5, 0\nalpha2 = 1, -1.5, 0\nalpha3 = 0, 1, 0\ndelta = 0.5, -0.5, 1\nstart = 2\n",
    );
    let r = viscofix(&[
        "validate-schedule",
        "--config",
        p(&cfg),
        "--horizon",
        "10000",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    // Custom schedules never get limit or series conditions certified.
    for label in ["(ii)", "(iii)", "(iv)"] {
        let line = r.stdout.lines().find(|l| l.starts_with(label)).unwrap();
        assert!(!line.contains("satisfied"), "{line}");
    }
}

#[test]
fn compare_on_linear_problem() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        &linear_1d(
            "preset = compare-t16",
            "outer_tol = 4e-6\nmax_outer = 5000000",
        ),
    );
    let r = viscofix(&["compare", "--config", p(&cfg), "--schemes", "5,7"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let d: f64 = field(&r.stdout, "distance between limits:")
        .parse()
        .unwrap();
    assert!(d <= 1e-5);

    let same = viscofix(&[
        "compare",
        "--config",
        p(&cfg),
        "--schemes",
        "7,new_implicit",
    ]);
    assert_eq!(same.code, 0);
    assert_eq!(
        field(&same.stdout, "distance between limits:"),
        "0.000000e0"
    );
}

#[test]
fn compare_on_line_projection() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.conf", LINE_PROJECTION);
    let r = viscofix(&["compare", "--config", p(&cfg), "--schemes", "2,7"]);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let d: f64 = field(&r.stdout, "distance between limits:")
        .parse()
        .unwrap();
    assert!(d <= 1e-2);
}

#[test]
fn compare_exit_two_when_a_run_stalls() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "a.conf",
        &linear_1d("preset = eq75", "outer_tol = 1e-12\nmax_outer = 50"),
    );
    let r = viscofix(&["compare", "--config", p(&cfg), "--schemes", "5,7"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("no limit comparison"));
    assert_eq!(
        viscofix(&["compare", "--config", p(&cfg), "--schemes", "5"]).code,
        1
    );
}

fn fredholm_config(kernel: &str) -> String {
    format!(
        "[problem]\nkind = fredholm\nkernel = {kernel}\ngrid_size = 128\n\
         [scheme]\nname = mann_implicit\n[schedule]\npreset = halpern-mix\n\
         [solver]\nouter_tol = 1e-11\n"
    )
}

fn read_solution(path: &Path) -> Vec<(f64, f64)> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x"));
    lines
        .map(|l| {
            let (t, x) = l.split_once(',').unwrap();
            (t.parse().unwrap(), x.parse().unwrap())
        })
        .collect()
}

#[test]
fn fredholm_separable_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.conf", &fredholm_config("separable-linear"));
    let out = dir.path().join("x.csv");
    let r = viscofix(&["fredholm", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let sol = read_solution(&out);
    assert_eq!(sol.len(), 129);
    let sup = sol
        .iter()
        .map(|(t, x)| (x - 1.2 * t).abs())
        .fold(0.0, f64::max);
    assert!(sup <= 5e-4, "{sup}");
    let printed: f64 = field(&r.stdout, "sup error against x*(t) = 6t/5:")
        .parse()
        .unwrap();
    assert!((printed - sup).abs() <= 1e-12);
}

#[test]
fn fredholm_zero_kernel_returns_g() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.conf", &fredholm_config("zero"));
    let out = dir.path().join("x.csv");
    let r = viscofix(&["fredholm", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(r.code, 0);
    assert!(field(&r.stdout, "iterations:").starts_with("0 "));
    for (t, x) in read_solution(&out) {
        assert_eq!(x, t);
    }
}

#[test]
fn fredholm_sine_matches_picard_oracle() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.conf", &fredholm_config("sine"));
    let out = dir.path().join("x.csv");
    let r = viscofix(&["fredholm", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(r.code, 0);
    let residual: f64 = field(&r.stdout, "final residual:").parse().unwrap();
    assert!(residual <= 1e-11);

    // The discrete map is a 1/2-contraction, so plain iteration converges.
    let problem = FredholmProblem::sine(128).unwrap();
    let t = fredholm_operator(&problem);
    let mut x = Point::from(problem.nodes());
    for _ in 0..100 {
        x = t.apply(&x);
    }
    for ((_, got), want) in read_solution(&out).iter().zip(x.coords()) {
        assert!((got - want).abs() <= 1e-8, "{got} vs {want}");
    }
}

#[test]
fn fredholm_requires_a_fredholm_problem() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "a.conf", LINE_PROJECTION);
    assert_eq!(viscofix(&["fredholm", "--config", p(&cfg)]).code, 1);
}
