//! Turns a parsed [`RunConfig`] into concrete maps and a starting point.

use viscofix_core::{
    average_pseudocontraction, check_strict_pseudocontraction, forward_projected,
    fredholm_operator, ConvexSet, FredholmProblem, GeneralizedContraction, MonotoneOperatorSpec,
    NonexpansiveMap, Operator, Point, Schedule, SchemeKind, SolverConfig, Space,
};

use crate::config::{ContractionKind, KernelKind, MonotoneSet, ProblemKind, RunConfig, SpaceKind};
use crate::CliError;
use viscofix_core::space::SetKind;

/// Pairs drawn when auditing a configured pseudocontraction.
const PSEUDO_AUDIT_PAIRS: usize = 1000;

/// Samples of the fixed-point set used for the VI residual.
const VI_SAMPLES: usize = 41;

pub struct Problem {
    pub space: Space,
    pub t: NonexpansiveMap,
    /// `None` means `f = I`.
    pub f: Option<GeneralizedContraction>,
    pub x1: Point,
    /// Points of `F(T)` when it is a known point or line.
    pub fixed_samples: Option<Vec<Point>>,
    pub fredholm: Option<FredholmProblem>,
}

fn build_space(kind: SpaceKind) -> Result<Space, CliError> {
    let space = match kind {
        SpaceKind::Euclidean { dim } => Space::euclidean(dim),
        SpaceKind::Trapezoid { grid_size } => Space::trapezoid(grid_size),
    };
    space.map_err(CliError::from)
}

fn fredholm_problem(kernel: KernelKind, grid_size: usize) -> Result<FredholmProblem, CliError> {
    let p = match kernel {
        KernelKind::SeparableLinear => FredholmProblem::separable_linear(grid_size),
        KernelKind::Sine => FredholmProblem::sine(grid_size),
        KernelKind::Zero => FredholmProblem::zero_kernel(grid_size),
    };
    p.map_err(CliError::from)
}

fn monotone_set(space: &Space, set: &MonotoneSet) -> Result<ConvexSet, CliError> {
    let dim = space.dim();
    let k = match *set {
        MonotoneSet::Whole => Ok(ConvexSet::whole()),
        MonotoneSet::Ball { radius } => ConvexSet::ball(space, space.zero(), radius),
        MonotoneSet::Box { lo, hi } => ConvexSet::boxed(space, vec![lo; dim], vec![hi; dim]),
    };
    k.map_err(CliError::from)
}

fn build_contraction(
    space: &Space,
    kind: &ContractionKind,
) -> Result<GeneralizedContraction, CliError> {
    match kind {
        ContractionKind::ConstantPoint { point } => {
            let p = Point::new(point.clone())?;
            space.check(&p)?;
            Ok(GeneralizedContraction::constant(p))
        }
        ContractionKind::Linear { c } => Ok(GeneralizedContraction::linear(*c)?),
        ContractionKind::Rational { beta } => {
            Ok(GeneralizedContraction::rational_ray(space, *beta)?)
        }
    }
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem, CliError> {
    let problem = cfg
        .problem
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [problem] section".into()))?;

    let mut fredholm = None;
    let space = match problem {
        ProblemKind::Fredholm { kernel, grid_size } => {
            if let Some(kind) = cfg.space {
                if kind
                    != (SpaceKind::Trapezoid {
                        grid_size: *grid_size,
                    })
                {
                    return Err(CliError::Config(format!(
                        "a fredholm problem with grid_size = {grid_size} needs \
                         [space] kind = trapezoid, grid_size = {grid_size} (or no [space] section)"
                    )));
                }
            }
            let fp = fredholm_problem(*kernel, *grid_size)?;
            let space = fp.space();
            fredholm = Some(fp);
            space
        }
        _ => build_space(
            cfg.space
                .ok_or_else(|| CliError::Config("missing [space] section".into()))?,
        )?,
    };

    let t = match problem {
        ProblemKind::BuiltinLinear { slope } => NonexpansiveMap::linear(&space, *slope)?,
        ProblemKind::LineProjection => NonexpansiveMap::axis_projection(&space)?,
        ProblemKind::Pseudocontraction {
            k,
            lambda,
            theta,
            l,
        } => {
            let k = *k;
            let mut s = Operator::new(format!("{k} x"), move |x: &Point| x.scale(k));
            if k != 1.0 {
                s = s.with_fixed_set(ConvexSet::singleton(&space, space.zero())?);
            }
            let audit = check_strict_pseudocontraction(&space, &s, *lambda, PSEUDO_AUDIT_PAIRS, 0)?;
            if !audit.pass {
                return Err(CliError::Config(format!(
                    "S = {k} x is not {lambda}-strictly pseudocontractive (worst slack {:.3e})",
                    audit.worst_slack
                )));
            }
            average_pseudocontraction(&s, *lambda, *theta, *l)?
        }
        ProblemKind::Monotone { gamma, alpha, set } => {
            let a = MonotoneOperatorSpec::scaled_identity(&space, *alpha)?;
            forward_projected(&space, monotone_set(&space, set)?, &a, *gamma)?
        }
        ProblemKind::Fredholm { .. } => fredholm_operator(fredholm.as_ref().expect("built above")),
    };

    let f = cfg
        .contraction
        .as_ref()
        .map(|c| build_contraction(&space, c))
        .transpose()?;

    let x1 = match &fredholm {
        Some(fp) => Point::from(
            fp.nodes()
                .into_iter()
                .map(|t| fp.g(t))
                .collect::<Vec<f64>>(),
        ),
        None => Point::filled(space.dim(), 1.0),
    };
    let x1 = match t.domain().kind() {
        SetKind::Whole => x1,
        _ => t.domain().project(&space, &x1)?,
    };

    let fixed_samples = t
        .known_fixed_set()
        .and_then(|set| set.line_samples(10.0, VI_SAMPLES));

    Ok(Problem {
        space,
        t,
        f,
        x1,
        fixed_samples,
        fredholm,
    })
}

pub fn scheme(cfg: &RunConfig) -> Result<SchemeKind, CliError> {
    cfg.scheme
        .ok_or_else(|| CliError::Config("missing [scheme] section".into()))
}

pub fn schedule(cfg: &RunConfig) -> Result<Schedule, CliError> {
    cfg.schedule
        .clone()
        .ok_or_else(|| CliError::Config("missing [schedule] section".into()))
}

pub fn solver_config(cfg: &RunConfig, record_trace: bool) -> Result<SolverConfig, CliError> {
    let mut out = SolverConfig {
        record_trace,
        ..SolverConfig::default()
    };
    if let Some(s) = &cfg.solver {
        out.outer_tol = s.outer_tol.unwrap_or(out.outer_tol);
        out.max_outer = s.max_outer.unwrap_or(out.max_outer);
        out.inner_tol = s.inner_tol.unwrap_or(out.inner_tol);
        out.max_inner = s.max_inner.unwrap_or(out.max_inner);
    }
    out.validate()?;
    Ok(out)
}
