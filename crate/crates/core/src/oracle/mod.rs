//! Brute-force estimators that certify the analytic bounds: random product
//! basis averages, a two-step LOCC protocol search, and a global basis search.
//!
//! Optimizer values are achievable mutual informations of specific complete
//! measurements, so they are lower bounds on accessible information, not
//! optima.

mod locc;
mod search;

pub use locc::{optimize_two_step_locc, TwoStepProtocol};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::densmat::PureState;
use crate::ensembles::Ensemble;
use crate::entropy::{mutual_information_of_basis, mutual_information_of_vectors};
use crate::error::{Error, Result};
use crate::haar::{sample_product_basis, RngSeed};
use crate::montecarlo::{estimate_mean, MeanEstimate};
use search::{basis_from_angles, basis_param_count, maximize};

/// Largest total dimension accepted by [`optimize_global_orthogonal`].
pub const MAX_GLOBAL_DIM: usize = 16;

/// Mean mutual information over `n_bases` Haar-random product bases (one
/// local unitary per party).
pub fn average_product_basis_mi(e: &Ensemble, n_bases: usize, seed: RngSeed) -> Result<MeanEstimate> {
    if n_bases < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bases, got {n_bases}")));
    }
    let dims = e.dims().to_vec();
    Ok(estimate_mean(n_bases, seed, |rng| {
        let basis = sample_product_basis::<f64, _>(&dims, rng);
        let vectors: Vec<_> = basis.elements().into_iter().map(PureState::into_amplitudes).collect();
        mutual_information_of_vectors(e, &vectors)
    }))
}

/// Work limits for the optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizerBudget {
    pub restarts: usize,
    /// Nelder-Mead iterations per local search.
    pub max_iters: u64,
    /// Stop when the simplex values have this standard deviation.
    pub tolerance: f64,
    /// Points per axis of the coarse grid over Alice's Bloch angles.
    pub alice_grid: usize,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 3000,
            tolerance: 1e-11,
            alice_grid: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OptimizationResult {
    /// Mutual information of the best basis found, in bits.
    pub value: f64,
    pub params: Vec<f64>,
    pub restarts_used: usize,
    /// Whether the best local search met its tolerance within budget.
    pub converged: bool,
    pub evaluations: u64,
}

impl OptimizationResult {
    /// The result, or [`Error::BudgetExhausted`] if the best search did not converge.
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::BudgetExhausted {
                evaluations: self.evaluations,
            })
        }
    }
}

/// Best of several independent local searches; ties keep the lowest index.
pub(crate) fn best_of(runs: Vec<search::LocalMax>) -> OptimizationResult {
    let restarts_used = runs.len();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    OptimizationResult {
        value: best.value,
        params: best.params,
        restarts_used,
        converged: best.converged,
        evaluations,
    }
}

fn random_angles<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}

/// Maximizes the mutual information over complete orthonormal bases of the
/// whole space, parameterized by two-level rotations with phases. Restart
/// `k` starts from random angles drawn from stream `k` of `seed`.
pub fn optimize_global_orthogonal(e: &Ensemble, budget: &OptimizerBudget, seed: RngSeed) -> Result<OptimizationResult> {
    let d = e.dim();
    if d > MAX_GLOBAL_DIM {
        return Err(Error::SizeCap(format!(
            "global basis search is limited to dimension {MAX_GLOBAL_DIM}, got {d}"
        )));
    }
    if budget.restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart".into()));
    }
    let n = basis_param_count(d);
    let runs = (0..budget.restarts)
        .into_par_iter()
        .map(|k| {
            let x0 = random_angles(n, &mut seed.stream(k as u64));
            maximize(
                |x| mutual_information_of_vectors(e, &basis_from_angles(d, x)),
                x0,
                0.4,
                budget.max_iters,
                budget.tolerance,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut result = best_of(runs);
    // Re-evaluate on the explicit, orthonormality-checked basis.
    let basis = basis_from_angles(d, &result.params)
        .into_iter()
        .map(PureState::normalized)
        .collect::<Result<Vec<_>>>()?;
    result.value = mutual_information_of_basis(e, &basis)?;
    Ok(result)
}

#[cfg(test)]
mod tests;
