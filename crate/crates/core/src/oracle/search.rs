use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use num_complex::Complex;

use crate::error::{Error, Result};

/// Columns of `G_1 G_2 ... G_K` where each two-level rotation acts on a
/// pair `(p, q)` as `[[cos θ, -e^{-iφ} sin θ], [e^{iφ} sin θ, cos θ]]`.
/// `d(d-1)` angles reach every orthonormal basis up to column phases.
pub(crate) fn basis_from_angles(d: usize, angles: &[f64]) -> Vec<Vec<Complex<f64>>> {
    debug_assert_eq!(angles.len(), basis_param_count(d));
    // u[row][col]
    let mut u: Vec<Vec<Complex<f64>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    let mut k = 0;
    for p in 0..d {
        for q in p + 1..d {
            let (s, c) = angles[k].sin_cos();
            let e = Complex::from_polar(1.0, angles[k + 1]);
            k += 2;
            for row in u.iter_mut() {
                let (up, uq) = (row[p], row[q]);
                row[p] = up * c + uq * e * s;
                row[q] = -(up * e.conj() * s) + uq * c;
            }
        }
    }
    (0..d).map(|j| u.iter().map(|row| row[j]).collect()).collect()
}

pub(crate) fn basis_param_count(d: usize) -> usize {
    d * (d - 1)
}

struct Negated<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Negated<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-(self.0)(p))
    }
}

pub(crate) struct LocalMax {
    pub value: f64,
    pub params: Vec<f64>,
    pub evaluations: u64,
    pub converged: bool,
}

/// Nelder-Mead maximization of `f` from `x0` with an axis simplex of size `step`.
pub(crate) fn maximize<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: Vec<f64>,
    step: f64,
    max_iters: u64,
    tol: f64,
) -> Result<LocalMax> {
    if x0.is_empty() {
        let value = f(&x0);
        return Ok(LocalMax {
            value,
            params: x0,
            evaluations: 1,
            converged: true,
        });
    }
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut v = x0.clone();
        v[i] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(tol)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let res = Executor::new(Negated(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
        .map_err(|e| Error::InvalidArgument(format!("optimizer failed: {e}")))?;
    let state = res.state();
    let params = state.get_best_param().cloned().unwrap_or(x0);
    let evaluations = state.get_func_counts().get("cost_count").copied().unwrap_or(0);
    let converged = matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    );
    Ok(LocalMax {
        value: -state.get_best_cost(),
        params,
        evaluations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn givens_bases_are_orthonormal() {
        for d in 1..6 {
            let angles: Vec<f64> = (0..basis_param_count(d)).map(|k| 0.37 * k as f64 + 0.1).collect();
            let b = basis_from_angles(d, &angles);
            for i in 0..d {
                for j in 0..d {
                    let ip: Complex<f64> = b[i].iter().zip(&b[j]).map(|(x, y)| x.conj() * y).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - want).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn finds_a_quadratic_maximum() {
        let r = maximize(
            |x| 3.0 - (x[0] - 1.0).powi(2) - (x[1] + 0.5).powi(2),
            vec![0.0, 0.0],
            0.5,
            500,
            1e-12,
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - 3.0).abs() < 1e-9);
        assert!((r.params[0] - 1.0).abs() < 1e-4);
        assert!(r.evaluations > 0);
    }
}
