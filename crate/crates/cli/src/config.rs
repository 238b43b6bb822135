//! Strict parser for the line-oriented run configuration.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Unknown sections, unknown keys, duplicates and unparsable values are
//! errors that cite the offending key and line.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use viscofix_core::schedules::RationalTerm;
use viscofix_core::{Schedule, SchemeKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.line, &self.key) {
            (Some(l), Some(k)) => write!(f, "line {l}: key '{k}': {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "key '{k}': {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, key: Option<&str>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        key: key.map(str::to_owned),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Euclidean {
        dim: usize,
    },
    /// `grid_size` intervals, `grid_size + 1` nodes.
    Trapezoid {
        grid_size: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    SeparableLinear,
    Sine,
    Zero,
}

impl KernelKind {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::SeparableLinear => "separable-linear",
            KernelKind::Sine => "sine",
            KernelKind::Zero => "zero",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneSet {
    Whole,
    Ball { radius: f64 },
    Box { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    /// `T x = slope * x`.
    BuiltinLinear { slope: f64 },
    /// Projection onto the first coordinate axis.
    LineProjection,
    /// `T = theta I + (1 - theta) S` with `S = k I`.
    Pseudocontraction {
        k: f64,
        lambda: f64,
        theta: f64,
        l: f64,
    },
    /// `T x = P_K(x - gamma A x)` with `A = x / alpha`.
    Monotone {
        gamma: f64,
        alpha: f64,
        set: MonotoneSet,
    },
    Fredholm {
        kernel: KernelKind,
        grid_size: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContractionKind {
    ConstantPoint { point: Vec<f64> },
    Linear { c: f64 },
    Rational { beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub outer_tol: Option<f64>,
    pub max_outer: Option<usize>,
    pub inner_tol: Option<f64>,
    pub max_inner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub space: Option<SpaceKind>,
    pub problem: Option<ProblemKind>,
    /// `None` means `f = I`.
    pub contraction: Option<ContractionKind>,
    pub scheme: Option<SchemeKind>,
    pub schedule: Option<Schedule>,
    pub solver: Option<SolverSection>,
    pub trace: Option<String>,
}

const SECTIONS: [&str; 7] = [
    "space",
    "problem",
    "contraction",
    "scheme",
    "schedule",
    "solver",
    "output",
];

struct Entry {
    value: String,
    line: usize,
}

/// One `[section]` with its unconsumed entries.
struct Table {
    name: String,
    line: usize,
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<Entry, ConfigError> {
        self.take(key).ok_or_else(|| {
            err(
                Some(self.line),
                Some(key),
                format!("missing in section [{}]", self.name),
            )
        })
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.take(key).map(|e| parse_real(&e, key)).transpose()
    }

    fn required_real(&mut self, key: &str) -> Result<f64, ConfigError> {
        let e = self.required(key)?;
        parse_real(&e, key)
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.take(key)
            .map(|e| {
                e.value.parse::<usize>().map_err(|_| {
                    err(
                        Some(e.line),
                        Some(key),
                        format!("'{}' is not a non-negative integer", e.value),
                    )
                })
            })
            .transpose()
    }

    fn required_count(&mut self, key: &str) -> Result<usize, ConfigError> {
        let line = self.line;
        self.count(key)?.ok_or_else(|| {
            err(
                Some(line),
                Some(key),
                format!("missing in section [{}]", self.name),
            )
        })
    }

    /// Fails on the first key nobody asked for.
    fn finish(self) -> Result<(), ConfigError> {
        match self.entries.into_iter().min_by_key(|(_, e)| e.line) {
            Some((key, e)) => Err(err(
                Some(e.line),
                Some(&key),
                format!("unknown key in section [{}]", self.name),
            )),
            None => Ok(()),
        }
    }
}

fn parse_real(e: &Entry, key: &str) -> Result<f64, ConfigError> {
    match e.value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(err(
            Some(e.line),
            Some(key),
            format!("'{}' is not a finite real", e.value),
        )),
    }
}

fn parse_list(e: &Entry, key: &str) -> Result<Vec<f64>, ConfigError> {
    e.value
        .split(',')
        .map(|part| {
            let part = part.trim();
            match part.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(
                    Some(e.line),
                    Some(key),
                    format!("'{part}' is not a finite real"),
                )),
            }
        })
        .collect()
}

fn strip_quotes(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

fn tokenize(text: &str) -> Result<Vec<Table>, ConfigError> {
    let mut tables: Vec<Table> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if !content.is_ascii() {
            return Err(err(Some(line), None, "non-ASCII characters"));
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(Some(line), None, "unterminated section header"))?
                .trim();
            if !SECTIONS.contains(&name) {
                return Err(err(
                    Some(line),
                    None,
                    format!("unknown section [{name}] (known: {})", SECTIONS.join(", ")),
                ));
            }
            if let Some(prev) = tables.iter().find(|t| t.name == name) {
                return Err(err(
                    Some(line),
                    None,
                    format!("section [{name}] repeated (first at line {})", prev.line),
                ));
            }
            tables.push(Table {
                name: name.to_owned(),
                line,
                entries: BTreeMap::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            err(
                Some(line),
                None,
                format!("expected 'key = value', found '{content}'"),
            )
        })?;
        let key = key.trim();
        let value = strip_quotes(value.trim()).trim().to_owned();
        let table = tables
            .last_mut()
            .ok_or_else(|| err(Some(line), Some(key), "key outside of any section"))?;
        if let Some(prev) = table.entries.get(key) {
            return Err(err(
                Some(line),
                Some(key),
                format!("duplicate key (first at line {})", prev.line),
            ));
        }
        table.entries.insert(key.to_owned(), Entry { value, line });
    }
    Ok(tables)
}

fn parse_space(mut t: Table) -> Result<SpaceKind, ConfigError> {
    let kind = t.required("kind")?;
    let space = match kind.value.as_str() {
        "euclidean" => SpaceKind::Euclidean {
            dim: t.required_count("dim")?,
        },
        "trapezoid" => SpaceKind::Trapezoid {
            grid_size: t.required_count("grid_size")?,
        },
        other => {
            return Err(err(
                Some(kind.line),
                Some("kind"),
                format!("unknown space kind '{other}' (known: euclidean, trapezoid)"),
            ))
        }
    };
    t.finish()?;
    Ok(space)
}

fn parse_monotone_set(e: &Entry) -> Result<MonotoneSet, ConfigError> {
    let bad = || {
        err(
            Some(e.line),
            Some("set"),
            format!("'{}' is not one of whole, ball:R, box:LO:HI", e.value),
        )
    };
    let num = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let parts: Vec<&str> = e.value.split(':').collect();
    match parts.as_slice() {
        ["whole"] => Ok(MonotoneSet::Whole),
        ["ball", r] => num(r)
            .map(|radius| MonotoneSet::Ball { radius })
            .ok_or_else(bad),
        ["box", lo, hi] => match (num(lo), num(hi)) {
            (Some(lo), Some(hi)) => Ok(MonotoneSet::Box { lo, hi }),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

fn parse_problem(mut t: Table) -> Result<ProblemKind, ConfigError> {
    let kind = t.required("kind")?;
    let problem = match kind.value.as_str() {
        "builtin-linear" => ProblemKind::BuiltinLinear {
            slope: t.required_real("slope")?,
        },
        "line-projection" => ProblemKind::LineProjection,
        "pseudocontraction" => ProblemKind::Pseudocontraction {
            k: t.required_real("k")?,
            lambda: t.required_real("lambda")?,
            theta: t.required_real("theta")?,
            l: t.real("L")?.unwrap_or(1.0),
        },
        "monotone" => ProblemKind::Monotone {
            gamma: t.required_real("gamma")?,
            alpha: t.required_real("alpha")?,
            set: match t.take("set") {
                Some(e) => parse_monotone_set(&e)?,
                None => MonotoneSet::Whole,
            },
        },
        "fredholm" => {
            let e = t.required("kernel")?;
            let kernel = match e.value.as_str() {
                "separable-linear" => KernelKind::SeparableLinear,
                "sine" => KernelKind::Sine,
                "zero" => KernelKind::Zero,
                other => {
                    return Err(err(
                        Some(e.line),
                        Some("kernel"),
                        format!("unknown kernel '{other}' (known: separable-linear, sine, zero)"),
                    ))
                }
            };
            ProblemKind::Fredholm {
                kernel,
                grid_size: t.required_count("grid_size")?,
            }
        }
        other => {
            return Err(err(
                Some(kind.line),
                Some("kind"),
                format!(
                    "unknown problem kind '{other}' (known: builtin-linear, line-projection, \
                     pseudocontraction, monotone, fredholm)"
                ),
            ))
        }
    };
    t.finish()?;
    Ok(problem)
}

fn parse_contraction(mut t: Table) -> Result<ContractionKind, ConfigError> {
    let kind = t.required("kind")?;
    let c =
        match kind.value.as_str() {
            "constant-point" => {
                let e = t.required("point")?;
                ContractionKind::ConstantPoint {
                    point: parse_list(&e, "point")?,
                }
            }
            "linear" => ContractionKind::Linear {
                c: t.required_real("c")?,
            },
            "rational" => ContractionKind::Rational {
                beta: t.required_real("beta")?,
            },
            other => return Err(err(
                Some(kind.line),
                Some("kind"),
                format!(
                    "unknown contraction kind '{other}' (known: constant-point, linear, rational)"
                ),
            )),
        };
    t.finish()?;
    Ok(c)
}

fn parse_scheme(mut t: Table) -> Result<SchemeKind, ConfigError> {
    let e = t.required("name")?;
    let scheme = e
        .value
        .parse::<SchemeKind>()
        .map_err(|x| err(Some(e.line), Some("name"), x.to_string()))?;
    t.finish()?;
    Ok(scheme)
}

fn rational_term(e: &Entry, key: &str) -> Result<RationalTerm, ConfigError> {
    match parse_list(e, key)?.as_slice() {
        [a] => Ok(RationalTerm::constant(*a)),
        [a, b, c] => Ok(RationalTerm::new(*a, *b, *c)),
        _ => Err(err(
            Some(e.line),
            Some(key),
            "expected 'a' or 'a, b, c' for a + b/(n + c)",
        )),
    }
}

fn parse_schedule(mut t: Table) -> Result<Schedule, ConfigError> {
    let start = t.take("start");
    let start_value = start
        .as_ref()
        .map(|e| {
            e.value.parse::<u64>().map_err(|_| {
                err(
                    Some(e.line),
                    Some("start"),
                    format!("'{}' is not a positive integer", e.value),
                )
            })
        })
        .transpose()?;
    let schedule = if let Some(e) = t.take("preset") {
        let s = Schedule::preset(&e.value)
            .map_err(|x| err(Some(e.line), Some("preset"), x.to_string()))?;
        match (start_value, &start) {
            (Some(n0), Some(se)) => s
                .with_start(n0)
                .map_err(|x| err(Some(se.line), Some("start"), x.to_string()))?,
            _ => s,
        }
    } else {
        let mut terms = Vec::with_capacity(4);
        for key in ["alpha1", "alpha2", "alpha3", "delta"] {
            let e = t.required(key)?;
            terms.push(rational_term(&e, key)?);
        }
        let n0 = start_value.unwrap_or(1);
        Schedule::custom_rational(terms[0], terms[1], terms[2], terms[3], n0).map_err(|x| {
            err(
                start.as_ref().map(|e| e.line).or(Some(t.line)),
                Some("start"),
                x.to_string(),
            )
        })?
    };
    t.finish()?;
    Ok(schedule)
}

fn parse_solver(mut t: Table) -> Result<SolverSection, ConfigError> {
    let s = SolverSection {
        outer_tol: t.real("outer_tol")?,
        max_outer: t.count("max_outer")?,
        inner_tol: t.real("inner_tol")?,
        max_inner: t.count("max_inner")?,
    };
    t.finish()?;
    Ok(s)
}

fn parse_output(mut t: Table) -> Result<Option<String>, ConfigError> {
    let trace = t.take("trace").map(|e| e.value);
    t.finish()?;
    Ok(trace)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        for table in tokenize(text)? {
            match table.name.as_str() {
                "space" => cfg.space = Some(parse_space(table)?),
                "problem" => cfg.problem = Some(parse_problem(table)?),
                "contraction" => cfg.contraction = Some(parse_contraction(table)?),
                "scheme" => cfg.scheme = Some(parse_scheme(table)?),
                "schedule" => cfg.schedule = Some(parse_schedule(table)?),
                "solver" => cfg.solver = Some(parse_solver(table)?),
                "output" => cfg.trace = parse_output(table)?,
                _ => unreachable!("section names are checked while tokenizing"),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err(None, None, format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
# 1D linear test problem
[space]
kind = euclidean
dim = 1

[problem]
kind = builtin-linear
slope = 0.5

[contraction]
kind = linear
c = 0.25

[scheme]
name = 7

[schedule]
preset = eq75

[solver]
outer_tol = 1e-8
max_outer = 5000

[output]
trace = "out.csv"
"#;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::parse(FULL).unwrap();
        assert_eq!(cfg.space, Some(SpaceKind::Euclidean { dim: 1 }));
        assert_eq!(cfg.problem, Some(ProblemKind::BuiltinLinear { slope: 0.5 }));
        assert_eq!(cfg.contraction, Some(ContractionKind::Linear { c: 0.25 }));
        assert_eq!(cfg.scheme, Some(SchemeKind::NewImplicit));
        assert_eq!(cfg.schedule.as_ref().unwrap().name(), "eq75");
        let solver = cfg.solver.unwrap();
        assert_eq!(solver.outer_tol, Some(1e-8));
        assert_eq!(solver.max_outer, Some(5000));
        assert_eq!(solver.inner_tol, None);
        assert_eq!(cfg.trace.as_deref(), Some("out.csv"));
    }

    #[test]
    fn parsing_is_deterministic() {
        assert_eq!(
            RunConfig::parse(FULL).unwrap(),
            RunConfig::parse(FULL).unwrap()
        );
    }

    #[test]
    fn unknown_key_cites_key_and_line() {
        let text = "[space]\nkind = euclidean\ndim = 2\ncolour = red\n";
        let e = RunConfig::parse(text).unwrap_err();
        assert_eq!(e.line, Some(4));
        assert_eq!(e.key.as_deref(), Some("colour"));
        assert!(e.to_string().contains("line 4"));
    }

    #[test]
    fn structural_errors() {
        for (text, line) in [
            ("[nope]\n", 1),
            ("kind = x\n", 1),
            ("[space]\nkind euclidean\n", 2),
            ("[space]\nkind = euclidean\nkind = trapezoid\n", 3),
            ("[scheme]\nname = 7\n[scheme]\nname = 5\n", 3),
            ("[solver]\nouter_tol = inf\n", 2),
            ("[solver]\nmax_outer = -3\n", 2),
            ("[scheme]\nname = nine\n", 2),
            ("[schedule]\npreset = bogus\n", 2),
            (
                "[problem]\nkind = monotone\ngamma = 1\nalpha = 1\nset = cube\n",
                5,
            ),
        ] {
            let e = RunConfig::parse(text).unwrap_err();
            assert_eq!(e.line, Some(line), "{text:?}: {e}");
        }
    }

    #[test]
    fn custom_schedule_and_sets() {
        let text = "[schedule]\nalpha1 = 0, 0.5, 0\nalpha2 = 1, -1.5, 0\nalpha3 = 0, 1, 0\ndelta = 0.5\nstart = 2\n\
                    [problem]\nkind = monotone\ngamma = 1\nalpha = 1\nset = box:-1:2\n";
        let cfg = RunConfig::parse(text).unwrap();
        let p = cfg.schedule.unwrap().eval(4).unwrap();
        assert!((p.alpha1 - 0.125).abs() < 1e-15);
        assert!((p.alpha2 - 0.625).abs() < 1e-15);
        assert_eq!(
            cfg.problem,
            Some(ProblemKind::Monotone {
                gamma: 1.0,
                alpha: 1.0,
                set: MonotoneSet::Box { lo: -1.0, hi: 2.0 }
            })
        );
    }

    #[test]
    fn comments_and_quotes() {
        let text =
            "[contraction] # trailing\nkind = constant-point\npoint = \"3, 4\" # f = (3,4)\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(
            cfg.contraction,
            Some(ContractionKind::ConstantPoint {
                point: vec![3.0, 4.0]
            })
        );
    }
}
