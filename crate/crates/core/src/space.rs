//! Finite-dimensional weighted inner-product spaces and metric projections.
//!
//! A [`Space`] is `R^d` equipped with `<x, y> = sum_i w_i x_i y_i` for
//! positive weights `w`. All-ones weights give plain Euclidean space; the
//! composite-trapezoid weights of [`Space::trapezoid`] turn grid samples of a
//! function on `[0, 1]` into a discrete model of `L^2[0, 1]`.
//!
//! Because the weights are diagonal, every projection below is an exact
//! nearest-point map in the weighted norm.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance for the orthonormality check on affine-span directions.
pub const GRAM_TOLERANCE: f64 = 1e-10;

/// A point of the model space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    /// Builds a point, rejecting non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::Input(format!(
                "coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        Point(vec![value; dim])
    }

    /// One-dimensional point.
    pub fn scalar(value: f64) -> Self {
        Point(vec![value])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self * a + other * b`, coordinatewise.
    pub fn combine(&self, a: f64, other: &Point, b: f64) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    /// In-place `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Point) {
        debug_assert_eq!(self.dim(), other.dim());
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            *x += a * y;
        }
    }

    pub fn scale(&self, a: f64) -> Point {
        Point(self.0.iter().map(|x| a * x).collect())
    }
}

impl From<Vec<f64>> for Point {
    /// Unchecked conversion; prefer [`Point::new`] for external data.
    fn from(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        self.combine(1.0, rhs, 1.0)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        self.combine(1.0, rhs, -1.0)
    }
}

impl Mul<&Point> for f64 {
    type Output = Point;
    fn mul(self, rhs: &Point) -> Point {
        rhs.scale(self)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        self.scale(-1.0)
    }
}

/// `R^d` with a diagonal positive weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    weights: Vec<f64>,
}

impl Space {
    /// Plain Euclidean space of dimension `dim`.
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::with_weights(vec![1.0; dim])
    }

    /// Composite-trapezoid discretization of `L^2[0, 1]` with `intervals`
    /// subintervals, i.e. `intervals + 1` nodes `t_i = i / intervals`.
    pub fn trapezoid(intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::Config(
                "trapezoid grid needs at least one interval".into(),
            ));
        }
        let h = 1.0 / intervals as f64;
        let mut weights = vec![h; intervals + 1];
        weights[0] = h / 2.0;
        weights[intervals] = h / 2.0;
        Self::with_weights(weights)
    }

    pub fn with_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("space dimension must be at least 1".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::Config(format!(
                "space weights must be finite and positive, found {w}"
            )));
        }
        Ok(Space { weights })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn zero(&self) -> Point {
        Point::zeros(self.dim())
    }

    /// Fails unless `x` has this space's dimension.
    pub fn check(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dot(x, y))
    }

    pub fn norm(&self, x: &Point) -> Result<f64> {
        self.check(x)?;
        Ok(self.norm_of(x))
    }

    /// `||x - y||`.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dist(x, y))
    }

    pub(crate) fn dot(&self, x: &Point, y: &Point) -> f64 {
        debug_assert_eq!(x.dim(), self.dim());
        debug_assert_eq!(y.dim(), self.dim());
        self.weights
            .iter()
            .zip(x.coords().iter().zip(y.coords()))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub(crate) fn norm_of(&self, x: &Point) -> f64 {
        self.dot(x, x).sqrt()
    }

    pub(crate) fn dist(&self, x: &Point, y: &Point) -> f64 {
        debug_assert_eq!(x.dim(), y.dim());
        self.weights
            .iter()
            .zip(x.coords().iter().zip(y.coords()))
            .map(|(w, (a, b))| w * (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// The shape of a [`ConvexSet`].
#[derive(Debug, Clone, PartialEq)]
pub enum SetKind {
    Whole,
    /// Coordinatewise bounds; infinite bounds are allowed.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    /// `{ z : <normal, z> <= offset }`.
    Halfspace {
        normal: Point,
        offset: f64,
    },
    /// `base + span(directions)` with orthonormal directions.
    AffineSpan {
        base: Point,
        directions: Vec<Point>,
    },
}

/// A closed convex set with a closed-form metric projection.
///
/// Constructors validate against the space the set will be used in.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSet {
    kind: SetKind,
}

impl ConvexSet {
    pub fn whole() -> Self {
        ConvexSet {
            kind: SetKind::Whole,
        }
    }

    pub fn boxed(space: &Space, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        for v in [&lo, &hi] {
            if v.len() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    found: v.len(),
                });
            }
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() || l > h {
                return Err(Error::Config(format!(
                    "box bounds must satisfy lo <= hi, coordinate {i} has [{l}, {h}]"
                )));
            }
        }
        Ok(ConvexSet {
            kind: SetKind::Box { lo, hi },
        })
    }

    pub fn ball(space: &Space, center: Point, radius: f64) -> Result<Self> {
        space.check(&center)?;
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!(
                "ball radius must be positive, found {radius}"
            )));
        }
        Ok(ConvexSet {
            kind: SetKind::Ball { center, radius },
        })
    }

    pub fn halfspace(space: &Space, normal: Point, offset: f64) -> Result<Self> {
        space.check(&normal)?;
        if space.norm_of(&normal) == 0.0 {
            return Err(Error::Config("halfspace normal must be nonzero".into()));
        }
        if !offset.is_finite() {
            return Err(Error::Config(format!(
                "halfspace offset must be finite, found {offset}"
            )));
        }
        Ok(ConvexSet {
            kind: SetKind::Halfspace { normal, offset },
        })
    }

    /// `base + span(directions)`; the directions must already be orthonormal
    /// in the space's inner product. An empty direction list is the single
    /// point `base`.
    pub fn affine_span(space: &Space, base: Point, directions: Vec<Point>) -> Result<Self> {
        space.check(&base)?;
        for d in &directions {
            space.check(d)?;
        }
        for (i, di) in directions.iter().enumerate() {
            for (j, dj) in directions.iter().enumerate().skip(i) {
                let g = space.dot(di, dj);
                let want = if i == j { 1.0 } else { 0.0 };
                if (g - want).abs() > GRAM_TOLERANCE {
                    return Err(Error::Config(format!(
                        "affine-span directions must be orthonormal: <d{i}, d{j}> = {g}"
                    )));
                }
            }
        }
        Ok(ConvexSet {
            kind: SetKind::AffineSpan { base, directions },
        })
    }

    /// The single point `{p}`.
    pub fn singleton(space: &Space, p: Point) -> Result<Self> {
        Self::affine_span(space, p, Vec::new())
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    /// Checks that the set's data has the space's dimension.
    pub fn check_in(&self, space: &Space) -> Result<()> {
        let mismatch = |found: usize| Error::DimensionMismatch {
            expected: space.dim(),
            found,
        };
        match &self.kind {
            SetKind::Whole => Ok(()),
            SetKind::Box { lo, .. } if lo.len() != space.dim() => Err(mismatch(lo.len())),
            SetKind::Box { .. } => Ok(()),
            SetKind::Ball { center, .. } => space.check(center),
            SetKind::Halfspace { normal, .. } => space.check(normal),
            SetKind::AffineSpan { base, .. } => space.check(base),
        }
    }

    /// Whether `x` lies in the set up to `tol` (measured as distance).
    pub fn contains(&self, space: &Space, x: &Point, tol: f64) -> Result<bool> {
        let p = self.project(space, x)?;
        Ok(space.dist(&p, x) <= tol)
    }

    /// Metric projection: the unique nearest point of the set to `x`.
    pub fn project(&self, space: &Space, x: &Point) -> Result<Point> {
        space.check(x)?;
        self.check_in(space)?;
        Ok(self.project_unchecked(space, x))
    }

    pub(crate) fn project_unchecked(&self, space: &Space, x: &Point) -> Point {
        match &self.kind {
            SetKind::Whole => x.clone(),
            SetKind::Box { lo, hi } => Point(
                x.coords()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect(),
            ),
            SetKind::Ball { center, radius } => {
                let d = x - center;
                let r = space.norm_of(&d);
                if r <= *radius {
                    x.clone()
                } else {
                    center.combine(1.0, &d, radius / r)
                }
            }
            SetKind::Halfspace { normal, offset } => {
                let excess = space.dot(normal, x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.combine(1.0, normal, -excess / space.dot(normal, normal))
                }
            }
            SetKind::AffineSpan { base, directions } => {
                let d = x - base;
                let mut p = base.clone();
                for dir in directions {
                    p.axpy(space.dot(&d, dir), dir);
                }
                p
            }
        }
    }

    /// Evenly spaced points `base + s * d` for `s` in `[-extent, extent]` when
    /// the set is a line, or the point itself for a singleton. `None` for
    /// other shapes.
    pub fn line_samples(&self, extent: f64, count: usize) -> Option<Vec<Point>> {
        match &self.kind {
            SetKind::AffineSpan { base, directions } if directions.is_empty() => {
                Some(vec![base.clone()])
            }
            SetKind::AffineSpan { base, directions } if directions.len() == 1 => {
                let count = count.max(1);
                let step = if count > 1 {
                    2.0 * extent / (count - 1) as f64
                } else {
                    0.0
                };
                Some(
                    (0..count)
                        .map(|k| {
                            let s = if count > 1 {
                                -extent + step * k as f64
                            } else {
                                0.0
                            };
                            base.combine(1.0, &directions[0], s)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }
}
