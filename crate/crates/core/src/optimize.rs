//! Thin wrapper over argmin's Nelder–Mead for closures on `&[f64]`.

use std::cell::Cell;

use argmin::core::{CostFunction, Error as ArgminError, Executor, State, TerminationReason};
use argmin::solver::neldermead::NelderMead;

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_iterations: u64,
    /// Stop once the standard deviation of the simplex values drops below this.
    pub sd_tolerance: f64,
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            sd_tolerance: 1e-11,
            initial_step: 0.25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// True when the simplex collapsed before the iteration cap.
    pub converged: bool,
}

struct Objective<F> {
    f: F,
    calls: Cell<usize>,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> Result<f64, ArgminError> {
        self.calls.set(self.calls.get() + 1);
        let v = (self.f)(x);
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

/// Minimizes `f` from an axis-aligned simplex around `x0`.
pub fn minimize<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    assert!(!x0.is_empty(), "cannot minimize over zero parameters");
    let objective = Objective {
        f,
        calls: Cell::new(0),
    };
    let start_value = objective.cost(&x0.to_vec()).unwrap_or(f64::INFINITY);
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(opts.sd_tolerance)
        .expect("non-negative tolerance");
    let run = Executor::new(objective, solver)
        .configure(|s| s.max_iters(opts.max_iterations))
        .run();
    let fallback = || Minimum {
        x: x0.to_vec(),
        value: start_value,
        evaluations: x0.len() + 1,
        converged: false,
    };
    let Ok(res) = run else {
        return fallback();
    };
    let evaluations = res.problem().problem.as_ref().map_or(0, |p| p.calls.get());
    let state = res.state();
    let converged = matches!(
        state.get_termination_reason(),
        Some(TerminationReason::SolverConverged)
    );
    match state.get_best_param() {
        Some(x) if state.get_best_cost() <= start_value => Minimum {
            x: x.clone(),
            value: state.get_best_cost(),
            evaluations,
            converged,
        },
        _ => Minimum {
            evaluations,
            converged,
            ..fallback()
        },
    }
}
