//! Fixtures shared by the benchmarks.

use viscofix_core::{
    fredholm_operator, FredholmProblem, GeneralizedContraction, NonexpansiveMap, Params, Point,
    Space,
};

/// `T x = x / 2`, `f x = x / 4` on the real line.
pub fn linear_1d() -> (Space, NonexpansiveMap, GeneralizedContraction) {
    let space = Space::euclidean(1).expect("dimension 1");
    let t = NonexpansiveMap::linear(&space, 0.5).expect("slope 1/2");
    let f = GeneralizedContraction::linear(0.25).expect("c = 1/4");
    (space, t, f)
}

pub fn step_params() -> Params {
    Params {
        alpha1: 0.25,
        alpha2: 0.25,
        alpha3: 0.5,
        delta: 1.0 / 3.0,
    }
}

/// The separable-linear Fredholm operator on `grid_size + 1` nodes with a
/// starting vector of ones.
pub fn fredholm(grid_size: usize) -> (Space, NonexpansiveMap, Point) {
    let problem = FredholmProblem::separable_linear(grid_size).expect("grid");
    let space = problem.space();
    let x = Point::filled(space.dim(), 1.0);
    (space, fredholm_operator(&problem), x)
}
