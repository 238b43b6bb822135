//! The iteration engine.
//!
//! Every implicit scheme has the shape
//! `x_{n+1} = offset + weight * T(shift + coeff * x_{n+1})`, i.e. its new
//! iterate is the fixed point of an affine-in-`T` map [`ImplicitStep`] whose
//! contraction factor is `weight * coeff < 1`. The step is solved by Picard
//! iteration warm-started at `x_n`.
//!
//! | scheme          | offset                  | weight    | shift          | coeff     |
//! |-----------------|-------------------------|-----------|----------------|-----------|
//! | `new_implicit`  | `a1 f(x) + a2 x`        | `a3`      | `(1-d) f(x)`   | `d`       |
//! | `three_term`    | `a1 f(x) + a2 x`        | `a3`      | `d x`          | `1-d`     |
//! | `kema`          | `a f(x)`                | `1-a`     | `d x`          | `1-d`     |
//! | `midpoint`      | `a f(x)`                | `1-a`     | `x/2`          | `1/2`     |
//!
//! The single-parameter schemes (`explicit`, `midpoint`, `kema`) use
//! `a = a1 / (a1 + a3)`. `mann_implicit` and `midpoint_mann` are
//! `new_implicit` and `midpoint` with `f` replaced by the identity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::maps::{GeneralizedContraction, NonexpansiveMap};
use crate::schedules::{Params, Schedule};
use crate::space::{Point, Space};

/// Extra Picard iterations allowed beyond the a-priori bound.
pub const INNER_SAFETY_MARGIN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// `x+ = a f(x) + (1 - a) T x`.
    Explicit,
    /// `x+ = a f(x) + (1 - a) T((x + x+)/2)`.
    Midpoint,
    /// `x+ = a f(x) + (1 - a) T(d x + (1 - d) x+)`.
    Kema,
    /// `y+ = a1 f(y) + a2 y + a3 T(d y + (1 - d) y+)`.
    ThreeTerm,
    /// `x+ = a1 f(x) + a2 x + a3 T((1 - d) f(x) + d x+)`.
    NewImplicit,
    /// `NewImplicit` with `f = I`.
    MannImplicit,
    /// `Midpoint` with `f = I`.
    MidpointMann,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 7] = [
        SchemeKind::Explicit,
        SchemeKind::Midpoint,
        SchemeKind::Kema,
        SchemeKind::ThreeTerm,
        SchemeKind::NewImplicit,
        SchemeKind::MannImplicit,
        SchemeKind::MidpointMann,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Explicit => "explicit",
            SchemeKind::Midpoint => "midpoint",
            SchemeKind::Kema => "kema",
            SchemeKind::ThreeTerm => "three_term",
            SchemeKind::NewImplicit => "new_implicit",
            SchemeKind::MannImplicit => "mann_implicit",
            SchemeKind::MidpointMann => "midpoint_mann",
        }
    }

    /// Equation-number alias accepted on the command line.
    pub fn number(&self) -> &'static str {
        match self {
            SchemeKind::Explicit => "1",
            SchemeKind::Midpoint => "2",
            SchemeKind::Kema => "4",
            SchemeKind::ThreeTerm => "5",
            SchemeKind::NewImplicit => "7",
            SchemeKind::MannImplicit => "55",
            SchemeKind::MidpointMann => "56",
        }
    }

    /// Presets that substitute `f = I`.
    pub fn uses_identity_f(&self) -> bool {
        matches!(self, SchemeKind::MannImplicit | SchemeKind::MidpointMann)
    }

    pub fn is_implicit(&self) -> bool {
        !matches!(self, SchemeKind::Explicit)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.number() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SchemeKind::ALL.iter().map(|k| k.name()).collect();
                Error::Config(format!(
                    "unknown scheme '{s}' (known: {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once `||x_n - T x_n|| <= outer_tol`.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Certified bound on `||u - T_w(u)||` for the inner solve.
    pub inner_tol: f64,
    pub max_inner: usize,
    pub record_trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            outer_tol: 1e-10,
            max_outer: 10_000,
            inner_tol: 1e-13,
            max_inner: 500,
            record_trace: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("outer_tol", self.outer_tol), ("inner_tol", self.inner_tol)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, found {v}")));
            }
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::Config("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}

/// `u -> offset + weight * T(shift + coeff * u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplicitStep {
    offset: Point,
    weight: f64,
    shift: Point,
    coeff: f64,
}

impl ImplicitStep {
    /// Fails unless `weight * coeff` is a contraction factor in `[0, 1)`.
    pub fn new(offset: Point, weight: f64, shift: Point, coeff: f64) -> Result<Self> {
        let q = weight * coeff;
        if !(weight >= 0.0 && coeff >= 0.0 && q < 1.0) {
            return Err(Error::Input(format!(
                "implicit step is not a contraction: weight {weight} * coeff {coeff} = {q}"
            )));
        }
        if offset.dim() != shift.dim() {
            return Err(Error::DimensionMismatch {
                expected: offset.dim(),
                found: shift.dim(),
            });
        }
        Ok(ImplicitStep {
            offset,
            weight,
            shift,
            coeff,
        })
    }

    /// The step of the new implicit scheme:
    /// `T_w(u) = a1 f(w) + a2 w + a3 T((1 - d) f(w) + d u)` with `f(w)` given.
    pub fn new_implicit(x: &Point, fx: &Point, p: &Params) -> Result<Self> {
        Self::new(
            fx.combine(p.alpha1, x, p.alpha2),
            p.alpha3,
            fx.scale(1.0 - p.delta),
            p.delta,
        )
    }

    pub fn contraction_factor(&self) -> f64 {
        self.weight * self.coeff
    }

    pub fn apply(&self, t: &NonexpansiveMap, u: &Point) -> Point {
        let mut out = self.offset.clone();
        if self.weight != 0.0 {
            let arg = self.shift.combine(1.0, u, self.coeff);
            out.axpy(self.weight, &t.apply(&arg));
        }
        out
    }

    /// Picard iterates `u_1, u_2, ...` from `start`.
    pub fn iterates<'a>(&'a self, t: &'a NonexpansiveMap, start: Point) -> PicardIterates<'a> {
        PicardIterates {
            step: self,
            t,
            current: start,
        }
    }
}

/// Infinite iterator over `u_{k+1} = T_w(u_k)`.
pub struct PicardIterates<'a> {
    step: &'a ImplicitStep,
    t: &'a NonexpansiveMap,
    current: Point,
}

impl Iterator for PicardIterates<'_> {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        self.current = self.step.apply(self.t, &self.current);
        Some(self.current.clone())
    }
}

/// Solves `u = T_w(u)` by Picard iteration from `start`.
///
/// After `k` applications the residual of the returned point is certified
/// by `q * ||u_k - u_{k-1}||`, with `q` the contraction factor. The number
/// of applications is capped at the a-priori bound
/// `ceil(log(tol / d_1) / log q)` plus [`INNER_SAFETY_MARGIN`], and at
/// `cfg.max_inner`. Returns the solution and the number of applications.
pub fn solve_implicit(
    space: &Space,
    step: &ImplicitStep,
    t: &NonexpansiveMap,
    start: &Point,
    cfg: &SolverConfig,
) -> Result<(Point, usize)> {
    space.check(start)?;
    space.check(&step.offset)?;
    let q = step.contraction_factor();
    let mut prev = start.clone();
    let mut cap = cfg.max_inner;
    let mut last_step = f64::INFINITY;
    for (k, u) in step
        .iterates(t, start.clone())
        .enumerate()
        .take(cfg.max_inner)
    {
        let iters = k + 1;
        last_step = space.dist(&u, &prev);
        if !last_step.is_finite() {
            break;
        }
        if q * last_step <= cfg.inner_tol {
            return Ok((u, iters));
        }
        if k == 0 && q > 0.0 {
            let bound = ((cfg.inner_tol / last_step).ln() / q.ln()).ceil().max(1.0);
            cap = cap.min(bound as usize + INNER_SAFETY_MARGIN);
        }
        if iters >= cap {
            return Err(Error::InnerDivergence {
                iterations: iters,
                last_step,
            });
        }
        prev = u;
    }
    Err(Error::InnerDivergence {
        iterations: cap,
        last_step,
    })
}

/// Inner solve of the new implicit scheme at `x_n`:
/// the fixed point of `u -> a1 f(x_n) + a2 x_n + a3 T((1 - d) f(x_n) + d u)`.
pub fn inner_implicit_solve(
    space: &Space,
    f: &GeneralizedContraction,
    t: &NonexpansiveMap,
    x_n: &Point,
    params: &Params,
    cfg: &SolverConfig,
) -> Result<(Point, usize)> {
    space.check(x_n)?;
    let fx = f.apply(x_n);
    let step = ImplicitStep::new_implicit(x_n, &fx, params)?;
    solve_implicit(space, &step, t, x_n, cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub n: u64,
    pub x: Point,
    pub last_inner_iters: usize,
    /// `||x - T x||`.
    pub residual: f64,
}

impl IterationState {
    pub fn initial(space: &Space, t: &NonexpansiveMap, n: u64, x: Point) -> Result<Self> {
        space.check(&x)?;
        let residual = space.dist(&x, &t.apply(&x));
        Ok(IterationState {
            n,
            x,
            last_inner_iters: 0,
            residual,
        })
    }
}

/// One outer iteration: the step taken at index `n` with the parameters
/// at `n`; `residual` and `step_norm` describe the produced iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    pub residual: f64,
    pub step_norm: f64,
    pub inner_iters: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Converged,
    MaxIters,
    ScheduleRangeViolation { n: u64, message: String },
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Termination::Converged => f.write_str("converged"),
            Termination::MaxIters => f.write_str("max_iters"),
            Termination::ScheduleRangeViolation { n, message } => {
                write!(f, "schedule_range_violation (n = {n}: {message})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub scheme: SchemeKind,
    pub final_point: Point,
    /// Index of the final iterate.
    pub final_index: u64,
    pub termination: Termination,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub iterations: usize,
    pub trace: Vec<TraceRow>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

fn identity(x: &Point) -> Point {
    x.clone()
}

/// Resolves the viscosity map used by `scheme`: the identity for the
/// `f = I` presets or when no contraction is given.
fn viscosity_map<'a>(
    scheme: SchemeKind,
    f: Option<&'a GeneralizedContraction>,
) -> Box<dyn Fn(&Point) -> Point + 'a> {
    match f {
        Some(f) if !scheme.uses_identity_f() => Box::new(move |x| f.apply(x)),
        _ => Box::new(identity),
    }
}

/// Mixing weight `a1 / (a1 + a3)` for single-parameter schemes.
fn collapsed_alpha(n: u64, p: &Params) -> Result<f64> {
    let denom = p.alpha1 + p.alpha3;
    if denom > 0.0 {
        Ok(p.alpha1 / denom)
    } else {
        Err(Error::ScheduleRange {
            n,
            message: "alpha1 + alpha3 = 0 leaves single-parameter schemes undefined".into(),
        })
    }
}

#[allow(clippy::too_many_arguments)]
fn advance(
    space: &Space,
    scheme: SchemeKind,
    n: u64,
    x: &Point,
    f: &dyn Fn(&Point) -> Point,
    t: &NonexpansiveMap,
    p: &Params,
    cfg: &SolverConfig,
) -> Result<(Point, usize)> {
    let fx = f(x);
    let step = match scheme {
        SchemeKind::Explicit => {
            let a = collapsed_alpha(n, p)?;
            return Ok((fx.combine(a, &t.apply(x), 1.0 - a), 0));
        }
        SchemeKind::NewImplicit | SchemeKind::MannImplicit => {
            ImplicitStep::new_implicit(x, &fx, p)?
        }
        SchemeKind::ThreeTerm => ImplicitStep::new(
            fx.combine(p.alpha1, x, p.alpha2),
            p.alpha3,
            x.scale(p.delta),
            1.0 - p.delta,
        )?,
        SchemeKind::Kema => {
            let a = collapsed_alpha(n, p)?;
            ImplicitStep::new(fx.scale(a), 1.0 - a, x.scale(p.delta), 1.0 - p.delta)?
        }
        SchemeKind::Midpoint | SchemeKind::MidpointMann => {
            let a = collapsed_alpha(n, p)?;
            ImplicitStep::new(fx.scale(a), 1.0 - a, x.scale(0.5), 0.5)?
        }
    };
    solve_implicit(space, &step, t, x, cfg)
}

/// Advances `state` by one outer iteration of `scheme`.
///
/// Fails with [`Error::ScheduleRange`] when the schedule leaves its ranges
/// at `state.n`.
pub fn step(
    space: &Space,
    scheme: SchemeKind,
    state: &IterationState,
    f: Option<&GeneralizedContraction>,
    t: &NonexpansiveMap,
    schedule: &Schedule,
    cfg: &SolverConfig,
) -> Result<IterationState> {
    let f = viscosity_map(scheme, f);
    let p = schedule.eval(state.n)?;
    step_with(space, scheme, state, &*f, t, &p, cfg)
}

fn step_with(
    space: &Space,
    scheme: SchemeKind,
    state: &IterationState,
    f: &dyn Fn(&Point) -> Point,
    t: &NonexpansiveMap,
    p: &Params,
    cfg: &SolverConfig,
) -> Result<IterationState> {
    if let Some(message) = p.range_violation() {
        return Err(Error::ScheduleRange {
            n: state.n,
            message,
        });
    }
    let (x, inner) = advance(space, scheme, state.n, &state.x, f, t, p, cfg)?;
    if !x.is_finite() {
        return Err(Error::Diagnostic(format!(
            "iterate became non-finite at n = {}",
            state.n + 1
        )));
    }
    let residual = space.dist(&x, &t.apply(&x));
    Ok(IterationState {
        n: state.n + 1,
        x,
        last_inner_iters: inner,
        residual,
    })
}

/// Runs `scheme` from `x1` at the schedule's start index until the
/// fixed-point residual drops to `outer_tol` or `max_outer` steps are taken.
/// `f = None` runs the scheme with `f = I`.
pub fn run(
    space: &Space,
    scheme: SchemeKind,
    f: Option<&GeneralizedContraction>,
    t: &NonexpansiveMap,
    schedule: &Schedule,
    x1: &Point,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    run_observed(space, scheme, f, t, schedule, x1, cfg, |_| {})
}

/// [`run`] with a callback on every iterate, the initial one included.
#[allow(clippy::too_many_arguments)]
pub fn run_observed(
    space: &Space,
    scheme: SchemeKind,
    f: Option<&GeneralizedContraction>,
    t: &NonexpansiveMap,
    schedule: &Schedule,
    x1: &Point,
    cfg: &SolverConfig,
    mut observer: impl FnMut(&IterationState),
) -> Result<SolveReport> {
    cfg.validate()?;
    let fmap = viscosity_map(scheme, f);
    let mut state = IterationState::initial(space, t, schedule.start_index(), x1.clone())?;
    observer(&state);
    let initial_residual = state.residual;
    let mut trace = Vec::new();
    let mut iterations = 0;

    let termination = loop {
        if state.residual <= cfg.outer_tol {
            break Termination::Converged;
        }
        if iterations >= cfg.max_outer {
            break Termination::MaxIters;
        }
        let p = schedule.eval(state.n)?;
        let next = match step_with(space, scheme, &state, &*fmap, t, &p, cfg) {
            Ok(next) => next,
            Err(Error::ScheduleRange { n, message }) => {
                break Termination::ScheduleRangeViolation { n, message }
            }
            Err(e) => return Err(e),
        };
        if cfg.record_trace {
            trace.push(TraceRow {
                n: state.n,
                residual: next.residual,
                step_norm: space.dist(&next.x, &state.x),
                inner_iters: next.last_inner_iters,
                alpha1: p.alpha1,
                alpha2: p.alpha2,
                alpha3: p.alpha3,
                delta: p.delta,
            });
        }
        iterations += 1;
        state = next;
        observer(&state);
    };

    Ok(SolveReport {
        scheme,
        final_index: state.n,
        final_residual: state.residual,
        final_point: state.x,
        termination,
        initial_residual,
        iterations,
        trace,
    })
}

/// `min_x <p - f(p), x - p>` over sample points `x` of `F(T)`; nonnegative
/// when `p` solves the viscosity variational inequality.
pub fn vi_residual(
    space: &Space,
    p: &Point,
    f: &GeneralizedContraction,
    samples: &[Point],
) -> Result<f64> {
    vi_residual_with(space, p, &f.apply(p), samples)
}

/// [`vi_residual`] with `f(p)` supplied directly.
pub fn vi_residual_with(space: &Space, p: &Point, fp: &Point, samples: &[Point]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Input("vi_residual needs at least one sample".into()));
    }
    space.check(p)?;
    space.check(fp)?;
    let g = p - fp;
    samples.iter().try_fold(f64::INFINITY, |acc, x| {
        space.check(x)?;
        Ok(acc.min(space.dot(&g, &(x - p))))
    })
}

/// `||p_A - p_B||` for two converged runs.
pub fn compare_limits(space: &Space, a: &SolveReport, b: &SolveReport) -> Result<f64> {
    for r in [a, b] {
        if !r.converged() {
            return Err(Error::Diagnostic(format!(
                "run of scheme {} terminated with {}, not converged",
                r.scheme, r.termination
            )));
        }
    }
    space.distance(&a.final_point, &b.final_point)
}

/// `max{ ||x1 - p||, phi^{-1}(||f(p) - p||) }`, the a-priori bound on
/// `||x_n - p||` for the new implicit scheme. `f = None` means `f = I`.
pub fn iterate_bound(
    space: &Space,
    x1: &Point,
    p: &Point,
    f: Option<&GeneralizedContraction>,
) -> Result<f64> {
    let start = space.distance(x1, p)?;
    let visc = match f {
        None => 0.0,
        Some(f) => {
            let gap = space.distance(&f.apply(p), p)?;
            f.modulus().phi_inverse(gap)
        }
    };
    Ok(start.max(visc))
}
