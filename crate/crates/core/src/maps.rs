//! Operators: nonexpansive maps, generalized contractions and the three
//! application constructions (averaged strict pseudocontractions,
//! forward-projected monotone operators, discretized Fredholm operators).
//!
//! Nonexpansiveness and contractivity cannot be proven at runtime. The
//! `check_*` audits below sample seeded random pairs and report the worst
//! observed ratio or slack, so they are deterministic for a fixed seed.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::space::{ConvexSet, Point, SetKind, Space};

/// Shared, thread-safe point map.
pub type MapFn = Arc<dyn Fn(&Point) -> Point + Send + Sync>;
/// Scalar function on `[0, 1]`.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Fredholm kernel `Phi(t, s, x)`.
pub type KernelFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Audit tolerance on `||Tx - Ty|| / ||x - y|| <= 1`.
pub const NONEXPANSIVE_TOLERANCE: f64 = 1e-10;
/// Audit tolerance on contraction and monotonicity slacks.
pub const SLACK_TOLERANCE: f64 = 1e-10;
/// Audit samples are drawn uniformly from `[-R, R]^d` and projected into the domain.
pub const SAMPLE_RADIUS: f64 = 10.0;
/// Largest number of witness pairs kept in a report.
const MAX_WITNESSES: usize = 8;

/// An evaluable map with a domain and, optionally, a known fixed-point set.
#[derive(Clone)]
pub struct Operator {
    eval: MapFn,
    domain: ConvexSet,
    known_fixed_set: Option<ConvexSet>,
    label: String,
}

impl Operator {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        Operator {
            eval: Arc::new(eval),
            domain: ConvexSet::whole(),
            known_fixed_set: None,
            label: label.into(),
        }
    }

    pub fn with_domain(mut self, domain: ConvexSet) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_fixed_set(mut self, fixed: ConvexSet) -> Self {
        self.known_fixed_set = Some(fixed);
        self
    }

    pub fn apply(&self, x: &Point) -> Point {
        (self.eval)(x)
    }

    pub fn domain(&self) -> &ConvexSet {
        &self.domain
    }

    pub fn known_fixed_set(&self) -> Option<&ConvexSet> {
        self.known_fixed_set.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("known_fixed_set", &self.known_fixed_set)
            .finish_non_exhaustive()
    }
}

/// A map `T` claimed to satisfy `||Tx - Ty|| <= ||x - y||` on its domain.
///
/// The claim is the constructor's responsibility; [`check_nonexpansive`]
/// audits it statistically.
#[derive(Clone, Debug)]
pub struct NonexpansiveMap(Operator);

impl NonexpansiveMap {
    pub fn new(op: Operator) -> Self {
        NonexpansiveMap(op)
    }

    pub fn from_fn<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        NonexpansiveMap(Operator::new(label, eval))
    }

    pub fn identity() -> Self {
        Self::from_fn("identity", |x| x.clone())
    }

    /// `T x = slope * x`; nonexpansive for `|slope| <= 1`.
    pub fn linear(space: &Space, slope: f64) -> Result<Self> {
        if !(slope.is_finite() && slope.abs() <= 1.0) {
            return Err(Error::Config(format!(
                "linear map slope must lie in [-1, 1], found {slope}"
            )));
        }
        let fixed = if slope == 1.0 {
            ConvexSet::whole()
        } else {
            ConvexSet::singleton(space, space.zero())?
        };
        let op =
            Operator::new(format!("x -> {slope} x"), move |x| x.scale(slope)).with_fixed_set(fixed);
        Ok(NonexpansiveMap(op))
    }

    /// Metric projection onto `set`; its fixed points are the set itself.
    pub fn projection(space: &Space, set: ConvexSet) -> Result<Self> {
        set.check_in(space)?;
        let sp = space.clone();
        let s = set.clone();
        let op = Operator::new("metric projection", move |x| s.project_unchecked(&sp, x))
            .with_fixed_set(set);
        Ok(NonexpansiveMap(op))
    }

    /// Projection onto the first coordinate axis `{ x : x_i = 0, i > 0 }`.
    pub fn axis_projection(space: &Space) -> Result<Self> {
        let mut e1 = vec![0.0; space.dim()];
        e1[0] = 1.0 / space.weights()[0].sqrt();
        let line = ConvexSet::affine_span(space, space.zero(), vec![Point::from(e1)])?;
        let mut t = Self::projection(space, line)?;
        t.0.label = "projection onto the first axis".into();
        Ok(t)
    }

    pub fn with_domain(self, domain: ConvexSet) -> Self {
        NonexpansiveMap(self.0.with_domain(domain))
    }

    pub fn with_fixed_set(self, fixed: ConvexSet) -> Self {
        NonexpansiveMap(self.0.with_fixed_set(fixed))
    }

    pub fn apply(&self, x: &Point) -> Point {
        self.0.apply(x)
    }

    pub fn domain(&self) -> &ConvexSet {
        self.0.domain()
    }

    pub fn known_fixed_set(&self) -> Option<&ConvexSet> {
        self.0.known_fixed_set()
    }

    pub fn label(&self) -> &str {
        self.0.label()
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }
}

/// Modulus `psi` of a (psi, L)-contraction.
///
/// Both kinds are continuous L-functions with `phi(t) = t - psi(t)`
/// continuous, strictly increasing and unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiModulus {
    /// `psi(t) = c t`, `c` in `[0, 1)`.
    Linear { c: f64 },
    /// `psi(t) = t / (1 + beta t)`, `beta > 0`.
    Rational { beta: f64 },
}

impl PsiModulus {
    pub fn linear(c: f64) -> Result<Self> {
        if !(c.is_finite() && (0.0..1.0).contains(&c)) {
            return Err(Error::Config(format!(
                "linear contraction constant must lie in [0, 1), found {c}"
            )));
        }
        Ok(PsiModulus::Linear { c })
    }

    pub fn rational(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Config(format!(
                "rational modulus beta must be positive, found {beta}"
            )));
        }
        Ok(PsiModulus::Rational { beta })
    }

    pub fn psi(&self, t: f64) -> f64 {
        match *self {
            PsiModulus::Linear { c } => c * t,
            PsiModulus::Rational { beta } => t / (1.0 + beta * t),
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        t - self.psi(t)
    }

    /// `phi^{-1}(y)` by bisection to `1e-12` on `[0, 1e12]`.
    pub fn phi_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0_f64, 1e12_f64);
        if self.phi(hi) <= y {
            return hi;
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.phi(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl fmt::Display for PsiModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiModulus::Linear { c } => write!(f, "linear(c = {c})"),
            PsiModulus::Rational { beta } => write!(f, "rational(beta = {beta})"),
        }
    }
}

/// A map `f` with `||f x - f y|| <= psi(||x - y||)` on `domain`.
#[derive(Clone)]
pub struct GeneralizedContraction {
    eval: MapFn,
    modulus: PsiModulus,
    domain: ConvexSet,
    label: String,
}

impl GeneralizedContraction {
    pub fn new<F>(label: impl Into<String>, modulus: PsiModulus, eval: F) -> Self
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        GeneralizedContraction {
            eval: Arc::new(eval),
            modulus,
            domain: ConvexSet::whole(),
            label: label.into(),
        }
    }

    /// Restricts the set on which the modulus is claimed (and audited).
    pub fn with_domain(mut self, domain: ConvexSet) -> Self {
        self.domain = domain;
        self
    }

    /// `f x = c x` with the linear modulus `c`.
    pub fn linear(c: f64) -> Result<Self> {
        let modulus = PsiModulus::linear(c)?;
        Ok(Self::new(format!("x -> {c} x"), modulus, move |x| {
            x.scale(c)
        }))
    }

    /// The constant map `f x = point`, a contraction with `c = 0`.
    pub fn constant(point: Point) -> Self {
        Self::new("constant", PsiModulus::Linear { c: 0.0 }, move |_| {
            point.clone()
        })
    }

    /// `f x = psi(||x||) e_1`, where `psi(t) = t / (1 + beta t)` and `e_1`
    /// is the unit vector of the first coordinate.
    ///
    /// `|psi(a) - psi(b)| <= psi(|a - b|)` because `psi` is concave with
    /// `psi(0) = 0`, so this is a (psi, L)-contraction on the whole space
    /// that is not a strict contraction (its Lipschitz constant is 1).
    pub fn rational_ray(space: &Space, beta: f64) -> Result<Self> {
        let modulus = PsiModulus::rational(beta)?;
        let sp = space.clone();
        let unit = 1.0 / space.weights()[0].sqrt();
        Ok(Self::new(
            format!("rational ray (beta = {beta})"),
            modulus,
            move |x| {
                let r = sp.norm_of(x);
                let mut out = vec![0.0; x.dim()];
                out[0] = modulus.psi(r) * unit;
                Point::from(out)
            },
        ))
    }

    pub fn apply(&self, x: &Point) -> Point {
        (self.eval)(x)
    }

    pub fn modulus(&self) -> PsiModulus {
        self.modulus
    }

    pub fn domain(&self) -> &ConvexSet {
        &self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for GeneralizedContraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralizedContraction")
            .field("label", &self.label)
            .field("modulus", &self.modulus)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// An alpha-inverse-strongly monotone operator `A`.
#[derive(Clone)]
pub struct MonotoneOperatorSpec {
    eval: MapFn,
    ism_alpha: f64,
    zeros: Option<ConvexSet>,
    label: String,
}

impl MonotoneOperatorSpec {
    pub fn new<F>(label: impl Into<String>, ism_alpha: f64, eval: F) -> Result<Self>
    where
        F: Fn(&Point) -> Point + Send + Sync + 'static,
    {
        if !(ism_alpha.is_finite() && ism_alpha > 0.0) {
            return Err(Error::Config(format!(
                "inverse-strong-monotonicity constant must be positive, found {ism_alpha}"
            )));
        }
        Ok(MonotoneOperatorSpec {
            eval: Arc::new(eval),
            ism_alpha,
            zeros: None,
            label: label.into(),
        })
    }

    /// `A x = x / alpha`, which is alpha-inverse-strongly monotone with the
    /// single zero `0`.
    pub fn scaled_identity(space: &Space, alpha: f64) -> Result<Self> {
        let a = Self::new(format!("x -> x / {alpha}"), alpha, move |x| {
            x.scale(1.0 / alpha)
        })?;
        Ok(a.with_zeros(ConvexSet::singleton(space, space.zero())?))
    }

    /// Declares the zero set `A^{-1} 0`.
    pub fn with_zeros(mut self, zeros: ConvexSet) -> Self {
        self.zeros = Some(zeros);
        self
    }

    pub fn apply(&self, x: &Point) -> Point {
        (self.eval)(x)
    }

    pub fn ism_alpha(&self) -> f64 {
        self.ism_alpha
    }

    pub fn zeros(&self) -> Option<&ConvexSet> {
        self.zeros.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for MonotoneOperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneOperatorSpec")
            .field("label", &self.label)
            .field("ism_alpha", &self.ism_alpha)
            .field("zeros", &self.zeros)
            .finish_non_exhaustive()
    }
}

// ---------------------------------------------------------------------------
// Audits
// ---------------------------------------------------------------------------

/// A sampled pair together with the quantity that flagged it.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x: Point,
    pub y: Point,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonexpansiveReport {
    /// Largest observed `||Tx - Ty|| / ||x - y||`.
    pub max_ratio: f64,
    pub pass: bool,
    /// Pairs whose ratio exceeded `1 + NONEXPANSIVE_TOLERANCE`.
    pub witnesses: Vec<Witness>,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlackReport {
    /// Smallest observed slack; negative means the inequality failed.
    pub worst_slack: f64,
    pub pass: bool,
    pub witness: Option<Witness>,
    pub pairs: usize,
}

/// Seeded sampler of distinct point pairs inside a domain.
struct PairSampler<'a> {
    space: &'a Space,
    domain: &'a ConvexSet,
    rng: ChaCha8Rng,
}

impl<'a> PairSampler<'a> {
    fn new(space: &'a Space, domain: &'a ConvexSet, seed: u64) -> Self {
        PairSampler {
            space,
            domain,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn point(&mut self) -> Point {
        let raw: Vec<f64> = (0..self.space.dim())
            .map(|_| self.rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS))
            .collect();
        self.domain.project_unchecked(self.space, &Point::from(raw))
    }

    /// Up to `n` pairs with `x != y`; gives up after `20 n` draws.
    fn pairs(&mut self, n: usize) -> Vec<(Point, Point)> {
        let mut out = Vec::with_capacity(n);
        let mut draws = 0;
        while out.len() < n && draws < 20 * n.max(1) {
            draws += 1;
            let x = self.point();
            let y = self.point();
            if self.space.dist(&x, &y) > 0.0 {
                out.push((x, y));
            }
        }
        out
    }
}

/// Worst Lipschitz ratio of `eval` over `n_samples` seeded pairs from `domain`.
pub(crate) fn lipschitz_audit(
    space: &Space,
    domain: &ConvexSet,
    eval: impl Fn(&Point) -> Point,
    n_samples: usize,
    seed: u64,
) -> Result<NonexpansiveReport> {
    domain.check_in(space)?;
    let pairs = PairSampler::new(space, domain, seed).pairs(n_samples);
    let mut max_ratio: f64 = 0.0;
    let mut witnesses = Vec::new();
    for (x, y) in &pairs {
        let (tx, ty) = (eval(x), eval(y));
        space.check(&tx)?;
        let ratio = space.dist(&tx, &ty) / space.dist(x, y);
        max_ratio = max_ratio.max(ratio);
        if ratio > 1.0 + NONEXPANSIVE_TOLERANCE && witnesses.len() < MAX_WITNESSES {
            witnesses.push(Witness {
                x: x.clone(),
                y: y.clone(),
                value: ratio,
            });
        }
    }
    Ok(NonexpansiveReport {
        max_ratio,
        pass: max_ratio <= 1.0 + NONEXPANSIVE_TOLERANCE,
        witnesses,
        pairs: pairs.len(),
    })
}

/// Statistical audit of `||Tx - Ty|| <= ||x - y||` over seeded pairs drawn
/// from the map's domain.
pub fn check_nonexpansive(
    space: &Space,
    t: &NonexpansiveMap,
    n_samples: usize,
    seed: u64,
) -> Result<NonexpansiveReport> {
    if n_samples == 0 {
        return Err(Error::Input("n_samples must be at least 1".into()));
    }
    lipschitz_audit(space, t.domain(), |x| t.apply(x), n_samples, seed)
}

fn slack_audit(
    space: &Space,
    domain: &ConvexSet,
    n_samples: usize,
    seed: u64,
    slack: impl Fn(&Point, &Point) -> f64,
) -> Result<SlackReport> {
    if n_samples == 0 {
        return Err(Error::Input("n_samples must be at least 1".into()));
    }
    domain.check_in(space)?;
    let pairs = PairSampler::new(space, domain, seed).pairs(n_samples);
    let mut worst = f64::INFINITY;
    let mut witness = None;
    for (x, y) in &pairs {
        let s = slack(x, y);
        if s < worst {
            worst = s;
            if s < -SLACK_TOLERANCE {
                witness = Some(Witness {
                    x: x.clone(),
                    y: y.clone(),
                    value: s,
                });
            }
        }
    }
    Ok(SlackReport {
        worst_slack: worst,
        pass: worst >= -SLACK_TOLERANCE,
        witness,
        pairs: pairs.len(),
    })
}

/// Audits `||f x - f y|| <= psi(||x - y||)`; slack is `psi(d) - ||f x - f y||`.
pub fn check_contraction(
    space: &Space,
    f: &GeneralizedContraction,
    n_samples: usize,
    seed: u64,
) -> Result<SlackReport> {
    let psi = f.modulus();
    slack_audit(space, f.domain(), n_samples, seed, |x, y| {
        psi.psi(space.dist(x, y)) - space.dist(&f.apply(x), &f.apply(y))
    })
}

/// Audits the lambda-strict pseudocontraction inequality
/// `||Sx - Sy||^2 <= ||x - y||^2 - lambda ||(I - S)x - (I - S)y||^2`.
pub fn check_strict_pseudocontraction(
    space: &Space,
    s: &Operator,
    lambda: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SlackReport> {
    slack_audit(space, s.domain(), n_samples, seed, |x, y| {
        let (sx, sy) = (s.apply(x), s.apply(y));
        let d = space.dist(x, y);
        let ds = space.dist(&sx, &sy);
        let rx = x - &sx;
        let ry = y - &sy;
        d * d - lambda * space.dist(&rx, &ry).powi(2) - ds * ds
    })
}

/// Audits `<Au - Av, u - v> >= alpha ||Au - Av||^2` over pairs from `domain`.
pub fn check_inverse_strongly_monotone(
    space: &Space,
    a: &MonotoneOperatorSpec,
    domain: &ConvexSet,
    n_samples: usize,
    seed: u64,
) -> Result<SlackReport> {
    slack_audit(space, domain, n_samples, seed, |u, v| {
        let da = &a.apply(u) - &a.apply(v);
        space.dot(&da, &(u - v)) - a.ism_alpha() * space.dot(&da, &da)
    })
}

// ---------------------------------------------------------------------------
// Application operators
// ---------------------------------------------------------------------------

/// Averages a lambda-strict pseudocontraction `S` into the nonexpansive map
/// `T x = theta x + (1 - theta) S x`, which has the same fixed points.
///
/// `theta` must lie in `(0, lambda / L^2]` (and below 1), where `smooth_l`
/// is the 2-uniform-smoothness constant of the space (1 for Hilbert spaces).
pub fn average_pseudocontraction(
    s: &Operator,
    lambda: f64,
    theta: f64,
    smooth_l: f64,
) -> Result<NonexpansiveMap> {
    if !(lambda.is_finite() && (0.0..1.0).contains(&lambda)) {
        return Err(Error::Config(format!(
            "pseudocontraction constant lambda must lie in [0, 1), found {lambda}"
        )));
    }
    if !(smooth_l.is_finite() && smooth_l > 0.0) {
        return Err(Error::Config(format!(
            "smoothness constant L must be positive, found {smooth_l}"
        )));
    }
    let upper = lambda / (smooth_l * smooth_l);
    if !(theta > 0.0 && theta <= upper && theta < 1.0) {
        return Err(Error::Config(format!(
            "theta = {theta} is outside the admissible interval (0, lambda/L^2] = (0, {upper}] \
             (with lambda = {lambda}, L = {smooth_l})"
        )));
    }
    let inner = s.clone();
    let mut op = Operator::new(
        format!("{theta} x + {} S x, S = {}", 1.0 - theta, s.label()),
        move |x| x.combine(theta, &inner.apply(x), 1.0 - theta),
    )
    .with_domain(s.domain().clone());
    if let Some(fixed) = s.known_fixed_set() {
        op = op.with_fixed_set(fixed.clone());
    }
    Ok(NonexpansiveMap(op))
}

/// The forward-projected map `x -> P_K(x - gamma A x)` for an
/// alpha-inverse-strongly monotone `A`; its fixed points solve VI(K, A).
///
/// Requires `0 < gamma <= 2 alpha`, the range where `I - gamma A` is
/// nonexpansive.
pub fn forward_projected(
    space: &Space,
    k: ConvexSet,
    a: &MonotoneOperatorSpec,
    gamma: f64,
) -> Result<NonexpansiveMap> {
    k.check_in(space)?;
    let upper = 2.0 * a.ism_alpha();
    if !(gamma > 0.0 && gamma <= upper) {
        return Err(Error::Config(format!(
            "gamma = {gamma} is outside the admissible interval (0, 2*alpha] = (0, {upper}] \
             (with alpha = {})",
            a.ism_alpha()
        )));
    }
    let sp = space.clone();
    let set = k.clone();
    let op_a = a.clone();
    let mut op = Operator::new(
        format!("P_K(x - {gamma} A x), A = {}", a.label()),
        move |x| set.project_unchecked(&sp, &x.combine(1.0, &op_a.apply(x), -gamma)),
    )
    .with_domain(k);
    // For inverse-strongly monotone A with zeros in K, VI(K, A) = A^{-1}0.
    if let Some(z) = a.zeros() {
        let inside = match (op.domain().kind(), z.kind()) {
            (SetKind::Whole, _) => true,
            (_, SetKind::AffineSpan { base, directions }) if directions.is_empty() => {
                op.domain().contains(space, base, 1e-12)?
            }
            _ => false,
        };
        if inside {
            op = op.with_fixed_set(z.clone());
        }
    }
    Ok(NonexpansiveMap(op))
}

/// Lipschitz spot-check of a Fredholm kernel in its last argument.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzAudit {
    pub max_ratio: f64,
    /// Present when the sampled ratio exceeds the declared bound.
    pub warning: Option<String>,
}

/// `x(t) = g(t) + int_0^1 Phi(t, s, x(s)) ds` discretized on the trapezoid
/// grid `t_i = i / m`, `i = 0..=m`.
#[derive(Clone)]
pub struct FredholmProblem {
    g: ScalarFn,
    kernel: KernelFn,
    lipschitz_bound: f64,
    grid_size: usize,
    label: String,
}

impl FredholmProblem {
    pub fn new(
        label: impl Into<String>,
        g: ScalarFn,
        kernel: KernelFn,
        lipschitz_bound: f64,
        grid_size: usize,
    ) -> Result<Self> {
        if !(lipschitz_bound.is_finite() && (0.0..=1.0).contains(&lipschitz_bound)) {
            return Err(Error::Config(format!(
                "kernel Lipschitz bound must lie in [0, 1], found {lipschitz_bound}"
            )));
        }
        if grid_size < 2 {
            return Err(Error::Config(format!(
                "Fredholm grid needs at least 2 intervals, found {grid_size}"
            )));
        }
        Ok(FredholmProblem {
            g,
            kernel,
            lipschitz_bound,
            grid_size,
            label: label.into(),
        })
    }

    /// `Phi(t, s, x) = (t s / 2) x`, `g(t) = t`; exact solution `x*(t) = 6t/5`.
    pub fn separable_linear(grid_size: usize) -> Result<Self> {
        Self::new(
            "separable-linear",
            Arc::new(|t| t),
            Arc::new(|t, s, x| 0.5 * t * s * x),
            0.5,
            grid_size,
        )
    }

    /// `Phi(t, s, x) = sin(x) / 2`, `g(t) = t`.
    pub fn sine(grid_size: usize) -> Result<Self> {
        Self::new(
            "sine",
            Arc::new(|t| t),
            Arc::new(|_, _, x: f64| 0.5 * x.sin()),
            0.5,
            grid_size,
        )
    }

    /// `Phi = 0`, `g(t) = t`; the solution is `g` itself.
    pub fn zero_kernel(grid_size: usize) -> Result<Self> {
        Self::new(
            "zero",
            Arc::new(|t| t),
            Arc::new(|_, _, _| 0.0),
            0.0,
            grid_size,
        )
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn space(&self) -> Space {
        Space::trapezoid(self.grid_size).expect("grid_size validated at construction")
    }

    pub fn nodes(&self) -> Vec<f64> {
        let m = self.grid_size as f64;
        (0..=self.grid_size).map(|i| i as f64 / m).collect()
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub fn kernel(&self, t: f64, s: f64, x: f64) -> f64 {
        (self.kernel)(t, s, x)
    }

    /// Samples `|Phi(t,s,x) - Phi(t,s,y)| / |x - y|` and warns when it
    /// exceeds the declared bound.
    pub fn audit_lipschitz(&self, n_samples: usize, seed: u64) -> LipschitzAudit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_ratio: f64 = 0.0;
        for _ in 0..n_samples {
            let t = rng.gen_range(0.0..=1.0);
            let s = rng.gen_range(0.0..=1.0);
            let x = rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS);
            let y = rng.gen_range(-SAMPLE_RADIUS..=SAMPLE_RADIUS);
            if x == y {
                continue;
            }
            let r = (self.kernel(t, s, x) - self.kernel(t, s, y)).abs() / (x - y).abs();
            max_ratio = max_ratio.max(r);
        }
        let warning = (max_ratio > self.lipschitz_bound + 1e-12).then(|| {
            format!(
                "kernel '{}' shows Lipschitz ratio {max_ratio:.6} above the declared bound {}",
                self.label, self.lipschitz_bound
            )
        });
        LipschitzAudit { max_ratio, warning }
    }
}

impl fmt::Debug for FredholmProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FredholmProblem")
            .field("label", &self.label)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("grid_size", &self.grid_size)
            .finish_non_exhaustive()
    }
}

/// The discrete Fredholm operator
/// `(T x)_i = g(t_i) + sum_j w_j Phi(t_i, t_j, x_j)` on the trapezoid space.
pub fn fredholm_operator(problem: &FredholmProblem) -> NonexpansiveMap {
    let nodes = problem.nodes();
    let weights = problem.space().weights().to_vec();
    let g_values: Vec<f64> = nodes.iter().map(|&t| problem.g(t)).collect();
    let kernel = problem.kernel.clone();
    NonexpansiveMap::from_fn(format!("Fredholm operator ({})", problem.label), move |x| {
        let xs = x.coords();
        Point::from(
            nodes
                .iter()
                .zip(&g_values)
                .map(|(&t, &g)| {
                    g + nodes
                        .iter()
                        .zip(&weights)
                        .zip(xs)
                        .map(|((&s, &w), &xj)| w * kernel(t, s, xj))
                        .sum::<f64>()
                })
                .collect::<Vec<f64>>(),
        )
    })
}
