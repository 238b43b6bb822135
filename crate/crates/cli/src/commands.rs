use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use viscofix_core::solver::vi_residual_with;
use viscofix_core::trace::write_trace_csv;
use viscofix_core::{
    compare_limits, run, validate_assumption12, Point, Schedule, SchemeKind, SolveReport, Status,
    Termination,
};

use crate::config::{KernelKind, ProblemKind, RunConfig};
use crate::problem::{build_problem, schedule, scheme, solver_config, Problem};
use crate::{CliError, Outcome, EXIT_CONFIG, EXIT_NOT_CONVERGED, EXIT_OK};

/// Horizon of the schedule check printed before a solve.
const WARNING_HORIZON: u64 = 10_000;

/// Coordinates shown before a point is abbreviated.
const SHOWN_COORDS: usize = 8;

fn format_point(p: &Point) -> String {
    let c = p.coords();
    let shown: Vec<String> = c
        .iter()
        .take(SHOWN_COORDS)
        .map(|v| format!("{v:.12e}"))
        .collect();
    if c.len() > SHOWN_COORDS {
        format!("[{}, ... ({} coordinates)]", shown.join(", "), c.len())
    } else {
        format!("[{}]", shown.join(", "))
    }
}

fn exit_for(termination: &Termination) -> i32 {
    match termination {
        Termination::Converged => EXIT_OK,
        Termination::MaxIters => EXIT_NOT_CONVERGED,
        Termination::ScheduleRangeViolation { .. } => EXIT_CONFIG,
    }
}

/// Condition findings that are not "satisfied", as warning lines.
fn schedule_warnings(schedule: &Schedule) -> Result<String, CliError> {
    let report = validate_assumption12(schedule, WARNING_HORIZON)?;
    let mut out = String::new();
    let labels = ["(i)", "(ii)", "(iii)", "(iv)", "(v)"];
    for (label, fact) in labels.iter().zip(&report.conditions) {
        if fact.status != Status::Satisfied {
            writeln!(
                out,
                "warning: schedule {} condition {label} {}: {}",
                report.schedule, fact.status, fact.note
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn write_report(out: &mut String, problem: &Problem, report: &SolveReport) {
    writeln!(out, "scheme: {}", report.scheme).unwrap();
    writeln!(out, "termination: {}", report.termination).unwrap();
    writeln!(
        out,
        "iterations: {} (final index n = {})",
        report.iterations, report.final_index
    )
    .unwrap();
    writeln!(out, "final point: {}", format_point(&report.final_point)).unwrap();
    writeln!(out, "initial residual: {:.6e}", report.initial_residual).unwrap();
    writeln!(out, "final residual: {:.6e}", report.final_residual).unwrap();
    if let Some(samples) = &problem.fixed_samples {
        let p = &report.final_point;
        let fp = match &problem.f {
            Some(f) if !report.scheme.uses_identity_f() => f.apply(p),
            _ => p.clone(),
        };
        if let Ok(v) = vi_residual_with(&problem.space, p, &fp, samples) {
            writeln!(
                out,
                "vi residual: {v:.6e} (min over {} samples of F(T))",
                samples.len()
            )
            .unwrap();
        }
    }
}

fn solve_one(
    problem: &Problem,
    scheme: SchemeKind,
    schedule: &Schedule,
    cfg: &RunConfig,
    record_trace: bool,
) -> Result<SolveReport, CliError> {
    let solver = solver_config(cfg, record_trace)?;
    Ok(run(
        &problem.space,
        scheme,
        problem.f.as_ref(),
        &problem.t,
        schedule,
        &problem.x1,
        &solver,
    )?)
}

fn write_trace(path: &Path, report: &SolveReport) -> Result<(), CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
    write_trace_csv(&report.trace, BufWriter::new(file))
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn wrap(result: Result<Outcome, CliError>) -> Outcome {
    result.unwrap_or_else(|e| Outcome::from_error(&e))
}

pub fn cmd_solve(config_path: &Path, trace_path: Option<&Path>) -> Outcome {
    wrap((|| {
        let cfg = RunConfig::load(config_path)?;
        let problem = build_problem(&cfg)?;
        let scheme = scheme(&cfg)?;
        let schedule = schedule(&cfg)?;
        let trace = trace_path
            .map(Path::to_path_buf)
            .or_else(|| cfg.trace.as_ref().map(Into::into));
        let stderr = schedule_warnings(&schedule)?;
        let report = solve_one(&problem, scheme, &schedule, &cfg, trace.is_some())?;

        let mut stdout = String::new();
        writeln!(stdout, "problem: {}", problem.t.label()).unwrap();
        writeln!(
            stdout,
            "schedule: {} (n0 = {})",
            schedule.name(),
            schedule.start_index()
        )
        .unwrap();
        write_report(&mut stdout, &problem, &report);
        if let Some(path) = &trace {
            write_trace(path, &report)?;
            writeln!(
                stdout,
                "trace: {} ({} rows)",
                path.display(),
                report.trace.len()
            )
            .unwrap();
        }
        Ok(Outcome {
            code: exit_for(&report.termination),
            stdout,
            stderr,
        })
    })())
}

pub fn cmd_validate_schedule(
    preset: Option<&str>,
    config_path: Option<&Path>,
    horizon: u64,
) -> Outcome {
    wrap((|| {
        let schedule = match (preset, config_path) {
            (Some(name), None) => Schedule::preset(name)?,
            (None, Some(path)) => schedule(&RunConfig::load(path)?)?,
            _ => {
                return Err(CliError::Config(
                    "give exactly one of --preset and --config".into(),
                ))
            }
        };
        let report = validate_assumption12(&schedule, horizon)?;
        Ok(Outcome {
            code: EXIT_OK,
            stdout: report.render(),
            stderr: String::new(),
        })
    })())
}

pub fn cmd_compare(config_path: &Path, schemes: &str) -> Outcome {
    wrap((|| {
        let names: Vec<&str> = schemes.split(',').map(str::trim).collect();
        let [a, b] = names.as_slice() else {
            return Err(CliError::Config(format!(
                "--schemes expects two names separated by a comma, found '{schemes}'"
            )));
        };
        let (a, b): (SchemeKind, SchemeKind) = (a.parse()?, b.parse()?);
        let cfg = RunConfig::load(config_path)?;
        let problem = build_problem(&cfg)?;
        let schedule = schedule(&cfg)?;
        let stderr = schedule_warnings(&schedule)?;

        let (ra, rb) = std::thread::scope(|s| {
            let ha = s.spawn(|| solve_one(&problem, a, &schedule, &cfg, false));
            let hb = s.spawn(|| solve_one(&problem, b, &schedule, &cfg, false));
            (
                ha.join().expect("solver thread panicked"),
                hb.join().expect("solver thread panicked"),
            )
        });
        let (ra, rb) = (ra?, rb?);

        let mut stdout = String::new();
        writeln!(stdout, "problem: {}", problem.t.label()).unwrap();
        writeln!(
            stdout,
            "schedule: {} (n0 = {})",
            schedule.name(),
            schedule.start_index()
        )
        .unwrap();
        for r in [&ra, &rb] {
            writeln!(
                stdout,
                "{}: {} after {} iterations, residual {:.6e}, final point {}",
                r.scheme,
                r.termination,
                r.iterations,
                r.final_residual,
                format_point(&r.final_point)
            )
            .unwrap();
        }
        let code = match compare_limits(&problem.space, &ra, &rb) {
            Ok(d) => {
                writeln!(stdout, "distance between limits: {d:.6e}").unwrap();
                EXIT_OK
            }
            Err(e) => {
                let gap = problem.space.distance(&ra.final_point, &rb.final_point)?;
                writeln!(stdout, "distance between final iterates: {gap:.6e}").unwrap();
                writeln!(stdout, "no limit comparison: {e}").unwrap();
                if [&ra, &rb]
                    .iter()
                    .any(|r| matches!(r.termination, Termination::ScheduleRangeViolation { .. }))
                {
                    EXIT_CONFIG
                } else {
                    EXIT_NOT_CONVERGED
                }
            }
        };
        Ok(Outcome {
            code,
            stdout,
            stderr,
        })
    })())
}

pub fn cmd_fredholm(config_path: &Path, out_path: Option<&Path>) -> Outcome {
    wrap((|| {
        let cfg = RunConfig::load(config_path)?;
        let kernel = match &cfg.problem {
            Some(ProblemKind::Fredholm { kernel, .. }) => *kernel,
            _ => {
                return Err(CliError::Config(
                    "the fredholm command needs [problem] kind = fredholm".into(),
                ))
            }
        };
        let problem = build_problem(&cfg)?;
        let fp = problem.fredholm.as_ref().expect("fredholm problem");
        let scheme = cfg.scheme.unwrap_or(SchemeKind::MannImplicit);
        let schedule = cfg.schedule.clone().unwrap_or_else(Schedule::halpern_mix);
        let stderr = schedule_warnings(&schedule)?;
        let report = solve_one(&problem, scheme, &schedule, &cfg, false)?;

        let nodes = fp.nodes();
        let x = report.final_point.coords();
        let mut stdout = String::new();
        writeln!(stdout, "problem: {}", fp.label()).unwrap();
        writeln!(
            stdout,
            "schedule: {} (n0 = {})",
            schedule.name(),
            schedule.start_index()
        )
        .unwrap();
        write_report(&mut stdout, &problem, &report);
        writeln!(stdout, "{:>24} {:>24}", "t", "x(t)").unwrap();
        for (t, v) in nodes.iter().zip(x) {
            writeln!(stdout, "{t:>24.16e} {v:>24.16e}").unwrap();
        }
        if kernel == KernelKind::SeparableLinear {
            let sup = nodes
                .iter()
                .zip(x)
                .map(|(t, v)| (v - 1.2 * t).abs())
                .fold(0.0, f64::max);
            writeln!(stdout, "sup error against x*(t) = 6t/5: {sup:.6e}").unwrap();
        }
        if let Some(path) = out_path {
            let write = || -> std::io::Result<()> {
                let mut w = BufWriter::new(File::create(path)?);
                writeln!(w, "t,x")?;
                for (t, v) in nodes.iter().zip(x) {
                    writeln!(w, "{t:.16e},{v:.16e}")?;
                }
                w.flush()
            };
            write()
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
            writeln!(stdout, "solution: {}", path.display()).unwrap();
        }
        Ok(Outcome {
            code: exit_for(&report.termination),
            stdout,
            stderr,
        })
    })())
}
