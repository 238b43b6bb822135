//! Parameter schedules `(alpha1_n, alpha2_n, alpha3_n, delta_n)` and their
//! validation against the five standing conditions of the convergence
//! theorem:
//!
//! * (i)   `alpha1 + alpha2 + alpha3 = 1`, each in `[0, 1]`, `delta` in `(0, 1)`;
//! * (ii)  `lim (1 - alpha3 delta - alpha2) = 0` and its series diverges;
//! * (iii) `0 < liminf alpha2 <= limsup alpha2 < 1`;
//! * (iv)  `lim alpha3 = 0` and `sum alpha3 (1 - delta) < inf`;
//! * (v)   `0 < eps <= delta_n <= delta_{n+1} <= delta_bar < 1`.
//!
//! Limits and series are undecidable from finite data. Presets carry
//! hand-derived facts for them; custom schedules only ever get
//! `Inconclusive` or `Violated` for those conditions.

use std::fmt;

use crate::error::{Error, Result};

/// Tolerance on `|alpha1 + alpha2 + alpha3 - 1|`.
pub const SIMPLEX_TOLERANCE: f64 = 1e-12;
/// Tail log-log slopes at or above `-1 - SLOPE_MARGIN` suggest a divergent series.
pub const SLOPE_MARGIN: f64 = 0.05;

/// Parameters at one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    pub delta: f64,
}

impl Params {
    /// Describes the first failed range constraint, if any.
    pub fn range_violation(&self) -> Option<String> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        for (name, v) in [
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
        ] {
            if !unit(v) {
                return Some(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Some(format!("delta = {} is outside (0, 1)", self.delta));
        }
        let sum = self.alpha1 + self.alpha2 + self.alpha3;
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Some(format!("alpha1 + alpha2 + alpha3 = {sum} != 1"));
        }
        None
    }

    /// `1 - alpha3 delta - alpha2`, the summand of condition (ii).
    pub fn viscosity_weight(&self) -> f64 {
        1.0 - self.alpha3 * self.delta - self.alpha2
    }
}

/// `a + b / (n + c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalTerm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl RationalTerm {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        RationalTerm { a, b, c }
    }

    pub fn constant(a: f64) -> Self {
        RationalTerm { a, b: 0.0, c: 0.0 }
    }

    pub fn eval(&self, n: u64) -> f64 {
        if self.b == 0.0 {
            self.a
        } else {
            self.a + self.b / (n as f64 + self.c)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind {
    /// `1/(2n), 1 - 3/(2n), 1/n, n/(2(n+1))`.
    Eq75,
    /// `1/(n+1), 1/2, 1/2 - 1/(n+1), 1/2`.
    HalpernMix,
    /// `1/n, 1 - 1/n - 1/n^2, 1/n^2, 1/2`.
    CompareT16,
    CustomRational {
        alpha1: RationalTerm,
        alpha2: RationalTerm,
        alpha3: RationalTerm,
        delta: RationalTerm,
    },
}

/// Outcome of one condition check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Satisfied,
    Violated,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Satisfied => "satisfied",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// A status with the reasoning behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub status: Status,
    pub note: String,
}

impl Fact {
    fn new(status: Status, note: impl Into<String>) -> Self {
        Fact {
            status,
            note: note.into(),
        }
    }
}

/// Analytic facts for the limit/series conditions of a preset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredFacts {
    pub cond_ii: Fact,
    pub cond_iii: Fact,
    pub cond_iv: Fact,
    pub cond_v: Fact,
    /// `lim alpha3 / (1 - alpha2 - alpha3 delta) = 0`, the extra hypothesis
    /// of the same-limit comparison between schemes (5) and (7).
    pub same_limit_ratio: Fact,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    kind: ScheduleKind,
    start_index: u64,
    declared: Option<DeclaredFacts>,
}

pub const PRESET_NAMES: [&str; 3] = ["eq75", "halpern-mix", "compare-t16"];

impl Schedule {
    /// Default start index 2: at `n = 1`, `alpha2 = -1/2`.
    pub fn eq75() -> Self {
        use Status::*;
        Schedule {
            kind: ScheduleKind::Eq75,
            start_index: 2,
            declared: Some(DeclaredFacts {
                cond_ii: Fact::new(
                    Satisfied,
                    "1 - alpha3 delta - alpha2 = 3/(2n) - 1/(2(n+1)) -> 0 and behaves like 1/n, so the series diverges",
                ),
                cond_iii: Fact::new(Violated, "alpha2 = 1 - 3/(2n) -> 1, so limsup alpha2 = 1"),
                cond_iv: Fact::new(
                    Violated,
                    "alpha3 = 1/n -> 0 but alpha3 (1 - delta) ~ 1/(2n), whose series diverges",
                ),
                cond_v: Fact::new(
                    Satisfied,
                    "delta = n/(2(n+1)) is increasing with eps = delta_{n0} and delta_bar = 1/2",
                ),
                same_limit_ratio: Fact::new(
                    Violated,
                    "alpha3 / (1 - alpha2 - alpha3 delta) -> 1",
                ),
            }),
        }
    }

    pub fn halpern_mix() -> Self {
        use Status::*;
        Schedule {
            kind: ScheduleKind::HalpernMix,
            start_index: 1,
            declared: Some(DeclaredFacts {
                cond_ii: Fact::new(
                    Violated,
                    "1 - alpha3 delta - alpha2 = 1/4 + 1/(2(n+1)) -> 1/4, not 0",
                ),
                cond_iii: Fact::new(Satisfied, "alpha2 = 1/2 for every n"),
                cond_iv: Fact::new(Violated, "alpha3 = 1/2 - 1/(n+1) -> 1/2, not 0"),
                cond_v: Fact::new(Satisfied, "delta = 1/2 for every n"),
                same_limit_ratio: Fact::new(Violated, "alpha3 / (1 - alpha2 - alpha3 delta) -> 2"),
            }),
        }
    }

    pub fn compare_t16() -> Self {
        use Status::*;
        Schedule {
            kind: ScheduleKind::CompareT16,
            start_index: 2,
            declared: Some(DeclaredFacts {
                cond_ii: Fact::new(
                    Satisfied,
                    "1 - alpha3 delta - alpha2 = 1/n + 1/(2n^2) -> 0 and its series diverges",
                ),
                cond_iii: Fact::new(Violated, "alpha2 = 1 - 1/n - 1/n^2 -> 1"),
                cond_iv: Fact::new(
                    Satisfied,
                    "alpha3 = 1/n^2 -> 0 and sum alpha3 / 2 converges",
                ),
                cond_v: Fact::new(Satisfied, "delta = 1/2 for every n"),
                same_limit_ratio: Fact::new(
                    Satisfied,
                    "alpha3 / (1 - alpha2 - alpha3 delta) = 1/(n + 1/2) -> 0",
                ),
            }),
        }
    }

    pub fn custom_rational(
        alpha1: RationalTerm,
        alpha2: RationalTerm,
        alpha3: RationalTerm,
        delta: RationalTerm,
        start_index: u64,
    ) -> Result<Self> {
        let s = Schedule {
            kind: ScheduleKind::CustomRational {
                alpha1,
                alpha2,
                alpha3,
                delta,
            },
            start_index: 1,
            declared: None,
        };
        s.with_start(start_index)
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "eq75" => Ok(Self::eq75()),
            "halpern-mix" => Ok(Self::halpern_mix()),
            "compare-t16" => Ok(Self::compare_t16()),
            other => Err(Error::Config(format!(
                "unknown schedule preset '{other}' (known: {})",
                PRESET_NAMES.join(", ")
            ))),
        }
    }

    /// Overrides the start index `n0`.
    pub fn with_start(mut self, start_index: u64) -> Result<Self> {
        if start_index == 0 {
            return Err(Error::Config(
                "schedule start index must be at least 1".into(),
            ));
        }
        if let ScheduleKind::CustomRational {
            alpha1,
            alpha2,
            alpha3,
            delta,
        } = &self.kind
        {
            for (name, term) in [
                ("alpha1", alpha1),
                ("alpha2", alpha2),
                ("alpha3", alpha3),
                ("delta", delta),
            ] {
                let vals = [term.a, term.b, term.c];
                if vals.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Config(format!("{name} coefficients must be finite")));
                }
                if term.b != 0.0 && start_index as f64 + term.c <= 0.0 {
                    return Err(Error::Config(format!(
                        "{name} = a + b/(n + c) has a pole or sign change at n >= {start_index}; need c > -{start_index}"
                    )));
                }
            }
        }
        self.start_index = start_index;
        Ok(self)
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    pub fn start_index(&self) -> u64 {
        self.start_index
    }

    pub fn declared(&self) -> Option<&DeclaredFacts> {
        self.declared.as_ref()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ScheduleKind::Eq75 => "eq75",
            ScheduleKind::HalpernMix => "halpern-mix",
            ScheduleKind::CompareT16 => "compare-t16",
            ScheduleKind::CustomRational { .. } => "custom-rational",
        }
    }

    /// Parameters at `n >= n0`. The tuple is returned even when it leaves
    /// the admissible ranges; see [`Params::range_violation`].
    pub fn eval(&self, n: u64) -> Result<Params> {
        if n < self.start_index {
            return Err(Error::Input(format!(
                "schedule index {n} precedes the start index {}",
                self.start_index
            )));
        }
        Ok(self.formula(n))
    }

    fn formula(&self, n: u64) -> Params {
        let nf = n as f64;
        match &self.kind {
            ScheduleKind::Eq75 => Params {
                alpha1: 1.0 / (2.0 * nf),
                alpha2: 1.0 - 3.0 / (2.0 * nf),
                alpha3: 1.0 / nf,
                delta: nf / (2.0 * (nf + 1.0)),
            },
            ScheduleKind::HalpernMix => Params {
                alpha1: 1.0 / (nf + 1.0),
                alpha2: 0.5,
                alpha3: 0.5 - 1.0 / (nf + 1.0),
                delta: 0.5,
            },
            ScheduleKind::CompareT16 => Params {
                alpha1: 1.0 / nf,
                alpha2: 1.0 - 1.0 / nf - 1.0 / (nf * nf),
                alpha3: 1.0 / (nf * nf),
                delta: 0.5,
            },
            ScheduleKind::CustomRational {
                alpha1,
                alpha2,
                alpha3,
                delta,
            } => Params {
                alpha1: alpha1.eval(n),
                alpha2: alpha2.eval(n),
                alpha3: alpha3.eval(n),
                delta: delta.eval(n),
            },
        }
    }
}

/// Result of [`validate_assumption12`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub schedule: &'static str,
    pub start_index: u64,
    pub horizon: u64,
    /// Conditions (i) through (v), in order.
    pub conditions: [Fact; 5],
    pub same_limit_ratio: Fact,
    /// Indices in `[n0, horizon]` where the range constraints fail.
    pub range_violations: Vec<u64>,
    /// Indices in `[1, n0)` that the start index skips because they fail
    /// the range constraints.
    pub skipped_range_violations: Vec<u64>,
}

impl ConditionReport {
    pub fn statuses(&self) -> [Status; 5] {
        [0, 1, 2, 3, 4].map(|i| self.conditions[i].status)
    }

    /// One line per condition.
    pub fn render(&self) -> String {
        const LABELS: [&str; 5] = ["(i)", "(ii)", "(iii)", "(iv)", "(v)"];
        let mut out = format!(
            "schedule {} (n0 = {}), horizon {}\n",
            self.schedule, self.start_index, self.horizon
        );
        for (label, fact) in LABELS.iter().zip(&self.conditions) {
            out.push_str(&format!("{label:<6} {:<12} {}\n", fact.status, fact.note));
        }
        out.push_str(&format!(
            "{:<6} {:<12} {}\n",
            "(t16)", self.same_limit_ratio.status, self.same_limit_ratio.note
        ));
        if !self.skipped_range_violations.is_empty() {
            out.push_str(&format!(
                "range violations before n0 (skipped): {}\n",
                join_indices(&self.skipped_range_violations)
            ));
        }
        if !self.range_violations.is_empty() {
            out.push_str(&format!(
                "range violations in [n0, horizon]: {}\n",
                join_indices(&self.range_violations)
            ));
        }
        out
    }
}

fn join_indices(v: &[u64]) -> String {
    const SHOWN: usize = 10;
    let mut s: Vec<String> = v.iter().take(SHOWN).map(u64::to_string).collect();
    if v.len() > SHOWN {
        s.push(format!("... ({} total)", v.len()));
    }
    s.join(", ")
}

/// Sequence statistics over `[n0, horizon]` used by the numeric heuristics.
struct Tail {
    last: f64,
    mid: f64,
    partial_sum: f64,
    slope: Option<f64>,
    vanishes: bool,
}

fn tail_of(schedule: &Schedule, horizon: u64, term: impl Fn(&Params) -> f64) -> Tail {
    let n0 = schedule.start_index;
    let value = |n: u64| term(&schedule.formula(n));
    let partial_sum = (n0..=horizon).map(value).sum();
    let lo = (horizon / 10).max(n0);
    let vanishes = (lo..=horizon).all(|n| value(n).abs() <= 1e-15);
    Tail {
        last: value(horizon),
        mid: value((horizon / 2).max(n0)),
        partial_sum,
        slope: if vanishes {
            None
        } else {
            loglog_slope(lo, horizon, value)
        },
        vanishes,
    }
}

/// Least-squares slope of `log |s_n|` against `log n` on log-spaced indices.
fn loglog_slope(lo: u64, hi: u64, value: impl Fn(u64) -> f64) -> Option<f64> {
    if hi <= lo {
        return None;
    }
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let mut pts = Vec::new();
    for k in 0..=48 {
        let n = (llo + (lhi - llo) * k as f64 / 48.0).exp().round() as u64;
        let v = value(n.clamp(lo, hi)).abs();
        if v > 0.0 {
            pts.push(((n as f64).ln(), v.ln()));
        }
    }
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Whether the tail settled on a value bounded away from 0.
fn settles_away_from_zero(t: &Tail) -> bool {
    t.last.abs() > 1e-3 && (t.last - t.mid).abs() <= 0.1 * t.last.abs()
}

fn numeric_ii(t: &Tail) -> Fact {
    use Status::*;
    if t.vanishes {
        return Fact::new(
            Violated,
            format!(
                "summand vanishes on the tail, so the series is finite (partial sum {:.6e})",
                t.partial_sum
            ),
        );
    }
    if settles_away_from_zero(t) {
        return Fact::new(
            Violated,
            format!("summand settles near {:.6e}, not 0", t.last),
        );
    }
    match t.slope {
        Some(s) if s < -1.0 - SLOPE_MARGIN => Fact::new(
            Violated,
            format!(
                "tail exponent {s:.3} < -1.05 suggests a convergent series (partial sum {:.6e})",
                t.partial_sum
            ),
        ),
        Some(s) => Fact::new(
            Inconclusive,
            format!(
                "summand -> 0 numerically; tail exponent {s:.3} >= -1.05, divergence suspected (partial sum {:.6e})",
                t.partial_sum
            ),
        ),
        None => Fact::new(Inconclusive, "tail exponent could not be estimated"),
    }
}

fn numeric_iii(schedule: &Schedule, horizon: u64) -> Fact {
    let lo = (horizon / 2).max(schedule.start_index);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in lo..=horizon {
        let a2 = schedule.formula(n).alpha2;
        min = min.min(a2);
        max = max.max(a2);
    }
    if max >= 1.0 - 1e-9 || min <= 1e-9 {
        Fact::new(
            Status::Violated,
            format!("alpha2 reaches the boundary on the tail: range [{min:.6e}, {max:.6e}]"),
        )
    } else {
        Fact::new(
            Status::Inconclusive,
            format!("alpha2 tail range [{min:.6e}, {max:.6e}]; liminf/limsup not certified"),
        )
    }
}

fn numeric_iv(limit: &Tail, series: &Tail) -> Fact {
    use Status::*;
    if settles_away_from_zero(limit) {
        return Fact::new(
            Violated,
            format!("alpha3 settles near {:.6e}, not 0", limit.last),
        );
    }
    if series.vanishes {
        return Fact::new(
            Inconclusive,
            "alpha3 (1 - delta) vanishes on the tail; finiteness not certified from numerics",
        );
    }
    match series.slope {
        Some(s) if s >= -1.0 - SLOPE_MARGIN => Fact::new(
            Violated,
            format!(
                "alpha3 (1 - delta) tail exponent {s:.3} >= -1.05: divergence suspected (partial sum {:.6e})",
                series.partial_sum
            ),
        ),
        Some(s) => Fact::new(
            Inconclusive,
            format!(
                "tail exponent {s:.3} suggests convergence (partial sum {:.6e}); not certified",
                series.partial_sum
            ),
        ),
        None => Fact::new(Inconclusive, "tail exponent could not be estimated"),
    }
}

/// Finite-horizon part of (v): monotone nondecreasing and inside (0, 1).
fn finite_v(schedule: &Schedule, horizon: u64) -> std::result::Result<(f64, f64), String> {
    let n0 = schedule.start_index;
    let mut prev = schedule.formula(n0).delta;
    let (eps, mut bar) = (prev, prev);
    for n in n0..=horizon {
        let d = schedule.formula(n).delta;
        if !(d > 0.0 && d < 1.0) {
            return Err(format!("delta_{n} = {d} is outside (0, 1)"));
        }
        if d < prev {
            return Err(format!("delta decreases at n = {n}: {prev} -> {d}"));
        }
        prev = d;
        bar = bar.max(d);
    }
    Ok((eps, bar))
}

fn numeric_ratio(t: &Tail) -> Fact {
    if settles_away_from_zero(t) {
        Fact::new(
            Status::Violated,
            format!(
                "alpha3 / (1 - alpha2 - alpha3 delta) settles near {:.6e}",
                t.last
            ),
        )
    } else {
        Fact::new(
            Status::Inconclusive,
            format!(
                "ratio at the horizon is {:.6e}; limit not certified",
                t.last
            ),
        )
    }
}

/// Checks the five schedule conditions over `[n0, horizon]`.
///
/// Condition (i) is decided exactly on the horizon. The limit and series
/// parts of (ii)-(iv) come from the preset's declared facts when present,
/// otherwise from numeric heuristics that never return `Satisfied`.
pub fn validate_assumption12(schedule: &Schedule, horizon: u64) -> Result<ConditionReport> {
    let n0 = schedule.start_index;
    if horizon < 100 {
        return Err(Error::Input(format!(
            "horizon must be at least 100, found {horizon}"
        )));
    }
    if horizon < n0 {
        return Err(Error::Input(format!(
            "horizon {horizon} precedes the start index {n0}"
        )));
    }

    let skipped_range_violations: Vec<u64> = (1..n0)
        .filter(|&n| schedule.formula(n).range_violation().is_some())
        .collect();
    let mut range_violations = Vec::new();
    let mut first_note = None;
    let mut max_sum_err: f64 = 0.0;
    for n in n0..=horizon {
        let p = schedule.formula(n);
        max_sum_err = max_sum_err.max((p.alpha1 + p.alpha2 + p.alpha3 - 1.0).abs());
        if let Some(msg) = p.range_violation() {
            if first_note.is_none() {
                first_note = Some(format!("n = {n}: {msg}"));
            }
            range_violations.push(n);
        }
    }
    let cond_i = match first_note {
        None => Fact::new(
            Status::Satisfied,
            format!("checked on [{n0}, {horizon}]; max |sum - 1| = {max_sum_err:.3e}"),
        ),
        Some(note) => Fact::new(
            Status::Violated,
            format!(
                "{} range violations, first at {note}",
                range_violations.len()
            ),
        ),
    };

    let finite_v = finite_v(schedule, horizon);
    let (cond_ii, cond_iii, cond_iv, mut cond_v, same_limit_ratio) = match schedule.declared() {
        Some(d) => (
            d.cond_ii.clone(),
            d.cond_iii.clone(),
            d.cond_iv.clone(),
            d.cond_v.clone(),
            d.same_limit_ratio.clone(),
        ),
        None => {
            let ii = tail_of(schedule, horizon, Params::viscosity_weight);
            let a3 = tail_of(schedule, horizon, |p| p.alpha3);
            let a3s = tail_of(schedule, horizon, |p| p.alpha3 * (1.0 - p.delta));
            let ratio = tail_of(schedule, horizon, |p| {
                p.alpha3 / (1.0 - p.alpha2 - p.alpha3 * p.delta)
            });
            let v = match &finite_v {
                Ok((eps, bar)) => Fact::new(
                    Status::Inconclusive,
                    format!(
                        "delta nondecreasing in [{eps:.6}, {bar:.6}] on the horizon; delta_bar < 1 not certified"
                    ),
                ),
                Err(_) => Fact::new(Status::Violated, String::new()),
            };
            (
                numeric_ii(&ii),
                numeric_iii(schedule, horizon),
                numeric_iv(&a3, &a3s),
                v,
                numeric_ratio(&ratio),
            )
        }
    };
    // A finite-horizon failure of (v) overrides any declared fact.
    if let Err(msg) = finite_v {
        cond_v = Fact::new(Status::Violated, msg);
    }

    Ok(ConditionReport {
        schedule: schedule.name(),
        start_index: n0,
        horizon,
        conditions: [cond_i, cond_ii, cond_iii, cond_iv, cond_v],
        same_limit_ratio,
        range_violations,
        skipped_range_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use Status::*;

    #[test]
    fn eq75_values() {
        let s = Schedule::eq75();
        let p = s.eval(2).unwrap();
        assert_eq!((p.alpha1, p.alpha2, p.alpha3), (0.25, 0.25, 0.5));
        assert_abs_diff_eq!(p.delta, 1.0 / 3.0, epsilon = 1e-16);
        let p = s.eval(4).unwrap();
        assert_eq!(
            (p.alpha1, p.alpha2, p.alpha3, p.delta),
            (0.125, 0.625, 0.25, 0.4)
        );
        assert!(s.eval(1).is_err(), "n = 1 precedes the default start");

        let from_one = Schedule::eq75().with_start(1).unwrap();
        let p = from_one.eval(1).unwrap();
        assert_eq!(p.alpha2, -0.5);
        assert!(p.range_violation().unwrap().contains("alpha2"));
    }

    #[test]
    fn presets_stay_on_the_simplex() {
        for s in [
            Schedule::eq75(),
            Schedule::halpern_mix(),
            Schedule::compare_t16(),
        ] {
            for n in s.start_index()..=100_000 {
                let p = s.eval(n).unwrap();
                assert!(
                    (p.alpha1 + p.alpha2 + p.alpha3 - 1.0).abs() <= 1e-12,
                    "{} at {n}",
                    s.name()
                );
                assert!(p.delta > 0.0 && p.delta < 1.0);
                assert!(p.range_violation().is_none(), "{} at {n}", s.name());
            }
        }
    }

    #[test]
    fn eval_is_bitwise_deterministic() {
        let s = Schedule::compare_t16();
        for n in [2u64, 17, 99_999] {
            let (a, b) = (s.eval(n).unwrap(), s.eval(n).unwrap());
            assert_eq!(a.alpha2.to_bits(), b.alpha2.to_bits());
            assert_eq!(a.delta.to_bits(), b.delta.to_bits());
        }
    }

    #[test]
    fn eq75_report_regression() {
        let r = validate_assumption12(&Schedule::eq75(), 10_000).unwrap();
        assert_eq!(
            r.statuses(),
            [Satisfied, Satisfied, Violated, Violated, Satisfied]
        );
        assert_eq!(r.skipped_range_violations, vec![1]);
        assert!(r.range_violations.is_empty());
        assert_eq!(r.same_limit_ratio.status, Violated);
    }

    #[test]
    fn halpern_mix_report() {
        let r = validate_assumption12(&Schedule::halpern_mix(), 10_000).unwrap();
        let st = r.statuses();
        assert_eq!(st[0], Satisfied);
        assert_eq!(st[1], Violated);
        assert_eq!(st[2], Satisfied);
        // 1 - alpha3 delta - alpha2 = 1/4 + 1/(2(n+1)).
        for n in [1u64, 10, 1000] {
            let p = Schedule::halpern_mix().eval(n).unwrap();
            assert_abs_diff_eq!(
                p.viscosity_weight(),
                0.25 + 0.5 / (n as f64 + 1.0),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn compare_t16_report() {
        let r = validate_assumption12(&Schedule::compare_t16(), 1000).unwrap();
        assert_eq!(
            r.statuses(),
            [Satisfied, Satisfied, Violated, Satisfied, Satisfied]
        );
        assert_eq!(r.same_limit_ratio.status, Satisfied);
    }

    fn constant(a1: f64, a2: f64, a3: f64, d: f64) -> Schedule {
        Schedule::custom_rational(
            RationalTerm::constant(a1),
            RationalTerm::constant(a2),
            RationalTerm::constant(a3),
            RationalTerm::constant(d),
            1,
        )
        .unwrap()
    }

    #[test]
    fn degenerate_identity_schedule() {
        let r = validate_assumption12(&constant(0.0, 1.0, 0.0, 0.5), 1000).unwrap();
        let st = r.statuses();
        assert_eq!(st[0], Satisfied);
        assert_eq!(st[1], Violated);
        assert_eq!(st[2], Violated);
    }

    #[test]
    fn custom_eq75_never_certified_by_numerics() {
        // The eq75 formulas written as a custom schedule: delta = 1/2 - 1/(2(n+1)).
        let s = Schedule::custom_rational(
            RationalTerm::new(0.0, 0.5, 0.0),
            RationalTerm::new(1.0, -1.5, 0.0),
            RationalTerm::new(0.0, 1.0, 0.0),
            RationalTerm::new(0.5, -0.5, 1.0),
            2,
        )
        .unwrap();
        let preset = Schedule::eq75();
        for n in [2u64, 3, 50, 1234] {
            let (a, b) = (s.eval(n).unwrap(), preset.eval(n).unwrap());
            assert_abs_diff_eq!(a.delta, b.delta, epsilon = 1e-15);
            assert_abs_diff_eq!(a.alpha2, b.alpha2, epsilon = 1e-15);
        }
        let r = validate_assumption12(&s, 10_000).unwrap();
        let st = r.statuses();
        assert_eq!(st[0], Satisfied);
        for (i, status) in st.iter().enumerate().skip(1) {
            assert_ne!(
                *status,
                Satisfied,
                "condition {} certified from numerics",
                i + 1
            );
        }
        assert_eq!(st[1], Inconclusive);
        assert_eq!(st[3], Violated);
    }

    #[test]
    fn custom_with_range_violation() {
        let s = constant(0.5, 0.6, 0.0, 0.5);
        let r = validate_assumption12(&s, 200).unwrap();
        assert_eq!(r.statuses()[0], Violated);
        assert_eq!(r.range_violations.len(), 200);
    }

    #[test]
    fn decreasing_delta_violates_v() {
        let s = Schedule::custom_rational(
            RationalTerm::constant(0.2),
            RationalTerm::constant(0.4),
            RationalTerm::constant(0.4),
            RationalTerm::new(0.3, 0.5, 1.0),
            1,
        )
        .unwrap();
        let r = validate_assumption12(&s, 100).unwrap();
        assert_eq!(r.statuses()[4], Violated);
    }

    #[test]
    fn validation_preconditions() {
        assert!(validate_assumption12(&Schedule::eq75(), 99).is_err());
        assert!(Schedule::preset("nope").is_err());
        assert!(Schedule::eq75().with_start(0).is_err());
        assert!(Schedule::custom_rational(
            RationalTerm::new(0.0, 1.0, -3.0),
            RationalTerm::constant(0.5),
            RationalTerm::constant(0.5),
            RationalTerm::constant(0.5),
            2,
        )
        .is_err());
    }

    #[test]
    fn render_lists_every_condition() {
        let r = validate_assumption12(&Schedule::eq75(), 1000).unwrap();
        let text = r.render();
        for label in ["(i) ", "(ii) ", "(iii) ", "(iv) ", "(v) "] {
            assert!(text.contains(label), "{text}");
        }
        assert!(text.contains("before n0 (skipped): 1"));
    }
}
