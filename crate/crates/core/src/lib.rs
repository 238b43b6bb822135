//! Viscosity-type implicit iterations for fixed points of nonexpansive maps.
//!
//! The crate is organized bottom-up:
//!
//! * [`space`]: weighted inner-product spaces, points and convex sets with
//!   metric projections.
//! * [`maps`]: nonexpansive maps, generalized contractions, sampling audits
//!   and derived operators (averaged pseudocontractions, forward-projected
//!   monotone operators, discretized Fredholm operators).
//! * [`schedules`]: control-parameter sequences and their condition
//!   validator.
//! * [`solver`]: the iteration schemes, inner implicit solves and
//!   diagnostics.
//! * [`trace`]: CSV traces.

pub mod error;
pub mod maps;
pub mod schedules;
pub mod solver;
pub mod space;
pub mod trace;

pub use error::{Error, Result};
pub use maps::{
    average_pseudocontraction, check_contraction, check_inverse_strongly_monotone,
    check_nonexpansive, check_strict_pseudocontraction, forward_projected, fredholm_operator,
    FredholmProblem, GeneralizedContraction, MonotoneOperatorSpec, NonexpansiveMap, Operator,
    PsiModulus,
};
pub use schedules::{validate_assumption12, ConditionReport, Params, Schedule, Status};
pub use solver::{
    compare_limits, inner_implicit_solve, iterate_bound, run, run_observed, step, vi_residual,
    IterationState, SchemeKind, SolveReport, SolverConfig, Termination, TraceRow,
};
pub use space::{ConvexSet, Point, Space};
