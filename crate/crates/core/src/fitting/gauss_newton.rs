//! Damped Gauss–Newton for small nonlinear least-squares problems.

use nalgebra::{DMatrix, DVector};

/// Residual vector `r(θ)` and its Jacobian `∂r/∂θ`.
pub trait LeastSquares {
    fn residuals(&self, theta: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, theta: &DVector<f64>) -> DMatrix<f64>;

    /// Parameters outside the admissible region are treated as failed steps.
    fn admissible(&self, _theta: &DVector<f64>) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussNewtonOptions {
    pub max_iterations: usize,
    /// Stop once the undamped `|Δθ| / max(|θ|, 1)` falls below this.
    pub step_tolerance: f64,
    pub max_halvings: usize,
}

impl Default for GaussNewtonOptions {
    fn default() -> Self {
        GaussNewtonOptions { max_iterations: 100, step_tolerance: 1e-10, max_halvings: 30 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Relative step below tolerance, or zero objective.
    Converged,
    /// No damped step decreased the objective.
    Stalled,
    IterationLimit,
    /// Residuals or Jacobian stopped being finite.
    NonFinite,
}

#[derive(Debug, Clone)]
pub struct GaussNewtonResult {
    pub theta: DVector<f64>,
    /// Mean squared residual at `theta`.
    pub objective: f64,
    pub iterations: usize,
    pub termination: Termination,
    /// Objective at the start and after every accepted step.
    pub trace: Vec<f64>,
}

impl GaussNewtonResult {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

fn mean_square(r: &DVector<f64>) -> f64 {
    if r.is_empty() {
        0.0
    } else {
        r.norm_squared() / r.len() as f64
    }
}

fn objective<P: LeastSquares + ?Sized>(problem: &P, theta: &DVector<f64>) -> f64 {
    if !problem.admissible(theta) {
        return f64::INFINITY;
    }
    let v = mean_square(&problem.residuals(theta));
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

/// Solves `(JᵀJ) δ = Jᵀr`, regularising the diagonal when the normal
/// matrix is singular.
fn normal_step(j: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    let jt = j.transpose();
    let mut h = &jt * j;
    let g = &jt * r;
    if let Some(chol) = h.clone().cholesky() {
        let step = chol.solve(&g);
        if step.iter().all(|x| x.is_finite()) {
            return Some(step);
        }
    }
    let scale = h.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut lambda = 1e-10 * scale;
    for _ in 0..20 {
        for i in 0..h.nrows() {
            h[(i, i)] += lambda;
        }
        if let Some(chol) = h.clone().cholesky() {
            let step = chol.solve(&g);
            if step.iter().all(|x| x.is_finite()) {
                return Some(step);
            }
        }
        lambda *= 10.0;
    }
    None
}

/// Iterates `θ ← θ − t (JᵀJ)⁻¹ Jᵀ r`, halving `t` from 1 until the objective
/// decreases. Accepted steps therefore never increase the objective.
pub fn gauss_newton<P: LeastSquares + ?Sized>(
    problem: &P,
    initial: DVector<f64>,
    opts: &GaussNewtonOptions,
) -> GaussNewtonResult {
    let mut theta = initial;
    let mut current = objective(problem, &theta);
    let mut trace = vec![current];
    let finish = |theta, objective, iterations, termination, trace| GaussNewtonResult {
        theta,
        objective,
        iterations,
        termination,
        trace,
    };
    if !current.is_finite() {
        return finish(theta, current, 0, Termination::NonFinite, trace);
    }

    for iteration in 1..=opts.max_iterations {
        if current == 0.0 {
            return finish(theta, current, iteration - 1, Termination::Converged, trace);
        }
        let r = problem.residuals(&theta);
        let j = problem.jacobian(&theta);
        if j.iter().any(|x| !x.is_finite()) {
            return finish(theta, current, iteration - 1, Termination::NonFinite, trace);
        }
        let Some(step) = normal_step(&j, &r) else {
            return finish(theta, current, iteration - 1, Termination::NonFinite, trace);
        };
        let scale = theta.norm().max(1.0);
        let full_relative = step.norm() / scale;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let candidate = &theta - &step * t;
            let value = objective(problem, &candidate);
            if value < current {
                accepted = Some((candidate, value));
                break;
            }
            t *= 0.5;
        }

        match accepted {
            Some((candidate, value)) => {
                theta = candidate;
                current = value;
                trace.push(current);
                // judged on the undamped step so that creeping towards a
                // boundary is not mistaken for convergence
                if full_relative < opts.step_tolerance {
                    return finish(theta, current, iteration, Termination::Converged, trace);
                }
            }
            None => {
                // At a minimum the full step is already negligible and
                // rounding prevents a strict decrease.
                let termination = if full_relative < opts.step_tolerance.sqrt() {
                    Termination::Converged
                } else {
                    Termination::Stalled
                };
                return finish(theta, current, iteration, termination, trace);
            }
        }
    }
    finish(theta, current, opts.max_iterations, Termination::IterationLimit, trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Linear {
        x: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquares for Linear {
        fn residuals(&self, t: &DVector<f64>) -> DVector<f64> {
            DVector::from_iterator(self.x.len(), self.x.iter().zip(&self.y).map(|(x, y)| t[0] + t[1] * x - y))
        }
        fn jacobian(&self, _: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_fn(self.x.len(), 2, |i, k| if k == 0 { 1.0 } else { self.x[i] })
        }
    }

    struct Quadratic;

    impl LeastSquares for Quadratic {
        fn residuals(&self, t: &DVector<f64>) -> DVector<f64> {
            DVector::from_element(1, t[0] * t[0] - 4.0)
        }
        fn jacobian(&self, t: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_element(1, 1, 2.0 * t[0])
        }
    }

    #[test]
    fn linear_model_solved_in_one_step() {
        let p = Linear { x: vec![0.0, 1.0, 2.0, 3.0], y: vec![1.0, 2.9, 5.2, 7.1] };
        let res = gauss_newton(&p, DVector::from_vec(vec![10.0, -3.0]), &GaussNewtonOptions::default());
        assert!(res.converged());
        // the first step lands on the least-squares solution, the second confirms it
        assert!(res.iterations <= 2);
        let (x̄, ȳ) = (1.5, 4.05);
        let sxy: f64 = p.x.iter().zip(&p.y).map(|(x, y)| (x - x̄) * (y - ȳ)).sum();
        let sxx: f64 = p.x.iter().map(|x| (x - x̄) * (x - x̄)).sum();
        let slope = sxy / sxx;
        assert!((res.theta[1] - slope).abs() < 1e-12);
        assert!((res.theta[0] - (ȳ - slope * x̄)).abs() < 1e-12);
        assert_eq!(res.trace.len(), res.iterations + 1);
    }

    #[test]
    fn quadratic_root_from_one() {
        let res = gauss_newton(&Quadratic, DVector::from_element(1, 1.0), &GaussNewtonOptions::default());
        assert!(res.converged());
        assert!((res.theta[0] - 2.0).abs() < 1e-12);
        let res = gauss_newton(&Quadratic, DVector::from_element(1, -0.5), &GaussNewtonOptions::default());
        assert!((res.theta[0] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_is_non_increasing() {
        let res = gauss_newton(&Quadratic, DVector::from_element(1, 37.0), &GaussNewtonOptions::default());
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn singular_normal_matrix_is_regularised() {
        // θ1 and θ2 enter only through their sum
        struct Sum;
        impl LeastSquares for Sum {
            fn residuals(&self, t: &DVector<f64>) -> DVector<f64> {
                DVector::from_vec(vec![t[0] + t[1] - 3.0, 2.0 * (t[0] + t[1]) - 6.0])
            }
            fn jacobian(&self, _: &DVector<f64>) -> DMatrix<f64> {
                DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0])
            }
        }
        let res = gauss_newton(&Sum, DVector::from_vec(vec![0.0, 0.0]), &GaussNewtonOptions::default());
        assert!(res.converged());
        assert!((res.theta[0] + res.theta[1] - 3.0).abs() < 1e-8);
    }

    #[test]
    fn inadmissible_region_stalls() {
        struct Runaway;
        impl LeastSquares for Runaway {
            // minimum at θ = +∞
            fn residuals(&self, t: &DVector<f64>) -> DVector<f64> {
                DVector::from_element(1, (-t[0]).exp())
            }
            fn jacobian(&self, t: &DVector<f64>) -> DMatrix<f64> {
                DMatrix::from_element(1, 1, -(-t[0]).exp())
            }
            fn admissible(&self, t: &DVector<f64>) -> bool {
                t[0] < 5.0
            }
        }
        let res = gauss_newton(&Runaway, DVector::from_element(1, 0.0), &GaussNewtonOptions::default());
        assert!(!res.converged());
        assert!(res.trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
