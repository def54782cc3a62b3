use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::search::{basis_from_angles, basis_param_count, maximize, LocalMax};
use super::{best_of, random_angles, OptimizationResult, OptimizerBudget};
use crate::densmat::{kron_vec, ComplexMatrix, PureState};
use crate::ensembles::Ensemble;
use crate::entropy::{mutual_information_of_basis, mutual_information_of_vectors, MeasurementOutcomeTable};
use crate::error::{Error, Result};
use crate::haar::RngSeed;

/// Alice measures her qubit in `{|α>, |α⊥>}`, then Bob measures in a basis
/// that depends on her outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoStepProtocol {
    /// Bloch angles `(θ, φ)` of `|α> = cos(θ/2)|0> + e^{iφ} sin(θ/2)|1>`.
    pub alice: (f64, f64),
    /// Two-level rotation angles of Bob's basis for each Alice outcome.
    pub bob: [Vec<f64>; 2],
}

fn alice_basis(theta: f64, phi: f64) -> [Vec<Complex<f64>>; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = Complex::from_polar(1.0, phi);
    [
        vec![Complex::new(c, 0.0), e * s],
        vec![-(e.conj() * s), Complex::new(c, 0.0)],
    ]
}

impl TwoStepProtocol {
    /// Unpacks `[θ, φ, bob_0..., bob_1...]`.
    pub fn from_params(db: usize, params: &[f64]) -> Result<Self> {
        let nb = basis_param_count(db);
        if params.len() != 2 + 2 * nb {
            return Err(Error::DimensionMismatch(format!(
                "two-step protocol on 2x{db} needs {} parameters, got {}",
                2 + 2 * nb,
                params.len()
            )));
        }
        Ok(Self {
            alice: (params[0], params[1]),
            bob: [params[2..2 + nb].to_vec(), params[2 + nb..].to_vec()],
        })
    }

    /// The complete measurement `{|α_a> ⊗ |β^{(a)}_b>}`, outcome `a db + b`.
    pub fn basis(&self, db: usize) -> Vec<PureState> {
        let alice = alice_basis(self.alice.0, self.alice.1);
        let mut out = Vec::with_capacity(2 * db);
        for (a, bob) in alice.iter().zip(&self.bob) {
            for beta in basis_from_angles(db, bob) {
                out.push(PureState::normalized(kron_vec(a, &beta)).expect("product of unit vectors"));
            }
        }
        out
    }
}

fn protocol_vectors(db: usize, params: &[f64]) -> Vec<Vec<Complex<f64>>> {
    let nb = basis_param_count(db);
    let alice = alice_basis(params[0], params[1]);
    let mut out = Vec::with_capacity(2 * db);
    for (a, bob) in alice.iter().zip([&params[2..2 + nb], &params[2 + nb..]]) {
        for beta in basis_from_angles(db, bob) {
            out.push(kron_vec(a, &beta));
        }
    }
    out
}

/// Unnormalized conditional operators `p_x <α|rho_x|α>` on B, per member.
fn conditionals(e: &Ensemble, alpha: &[Complex<f64>], db: usize) -> Vec<ComplexMatrix> {
    e.members()
        .iter()
        .map(|m| {
            let c = m.state.conditional_unchecked(alpha, 2, db);
            match c.state {
                Some(s) => s.matrix().scale(m.prob * c.weight),
                None => ComplexMatrix::zeros(db, db),
            }
        })
        .collect()
}

/// `q_a I(X:B | a)` for Bob's basis `angles` given the conditional operators.
fn bob_term(cond: &[ComplexMatrix], db: usize, angles: &[f64]) -> f64 {
    let basis = basis_from_angles(db, angles);
    let mut joint = Vec::with_capacity(cond.len() * db);
    for m in cond {
        for b in &basis {
            joint.push(m.expectation_re(b).max(0.0));
        }
    }
    let q: f64 = joint.iter().sum();
    if q <= 0.0 {
        return 0.0;
    }
    joint.iter_mut().for_each(|j| *j /= q);
    q * MeasurementOutcomeTable::from_joint_unchecked(cond.len(), db, joint).mutual_information()
}

/// Stage one: with Alice fixed, each outcome's Bob basis is optimized on
/// its own term of `I(X:AB) = I(X:A) + Σ_a q_a I(X:B|a)`.
fn alice_fixed(
    e: &Ensemble,
    db: usize,
    theta: f64,
    phi: f64,
    budget: &OptimizerBudget,
    seed: RngSeed,
) -> Result<LocalMax> {
    let nb = basis_param_count(db);
    let alice = alice_basis(theta, phi);
    let mut params = vec![theta, phi];
    let mut evaluations = 0;
    let mut converged = true;
    let inner_restarts = 4;
    let mut marginal = Vec::with_capacity(2 * e.len());
    let mut bob_total = 0.0;
    for (a, alpha) in alice.iter().enumerate() {
        let cond = conditionals(e, alpha, db);
        for m in &cond {
            marginal.push(m.trace().re.max(0.0));
        }
        let mut best: Option<LocalMax> = None;
        for r in 0..inner_restarts {
            let x0 = random_angles(nb, &mut seed.stream((a * inner_restarts + r) as u64));
            let run = maximize(|x| bob_term(&cond, db, x), x0, 0.4, budget.max_iters, budget.tolerance)?;
            evaluations += run.evaluations;
            if best.as_ref().is_none_or(|b| run.value > b.value) {
                best = Some(run);
            }
        }
        let best = best.expect("inner restarts");
        converged &= best.converged;
        bob_total += best.value;
        params.extend(best.params);
    }
    // I(X:A) from the member-by-outcome table, laid out outcome-major.
    let n = e.len();
    let joint: Vec<f64> = (0..n).flat_map(|x| [marginal[x], marginal[n + x]]).collect();
    let i_a = MeasurementOutcomeTable::from_joint_unchecked(n, 2, joint).mutual_information();
    Ok(LocalMax {
        value: i_a + bob_total,
        params,
        evaluations,
        converged,
    })
}

/// Maximizes the mutual information of two-step LOCC protocols on a 2⊗n
/// ensemble: a coarse grid over Alice's Bloch angles with Bob optimized per
/// outcome, then joint refinement of all angles from the best grid points.
/// The reported value is re-evaluated on the explicit measurement basis.
pub fn optimize_two_step_locc(e: &Ensemble, budget: &OptimizerBudget, seed: RngSeed) -> Result<OptimizationResult> {
    let (da, db) = e.bipartite_dims()?;
    if da != 2 {
        return Err(Error::DimensionMismatch(format!(
            "two-step protocol needs a qubit first party, got {da}x{db}"
        )));
    }
    if budget.restarts == 0 || budget.alice_grid == 0 {
        return Err(Error::InvalidArgument(
            "need at least one restart and one grid point".into(),
        ));
    }
    let g = budget.alice_grid;
    let grid_seed = seed.derive(1);
    let mut coarse = (0..g * g)
        .into_par_iter()
        .map(|k| {
            let theta = std::f64::consts::PI * ((k / g) as f64 + 0.5) / g as f64;
            let phi = std::f64::consts::TAU * (k % g) as f64 / g as f64;
            alice_fixed(e, db, theta, phi, budget, grid_seed.derive(k as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let grid_evaluations: u64 = coarse.iter().map(|r| r.evaluations).sum();
    coarse.sort_by(|a, b| b.value.total_cmp(&a.value));

    let n_params = 2 + 2 * basis_param_count(db);
    let refine_seed = seed.derive(2);
    let starts: Vec<Vec<f64>> = (0..budget.restarts)
        .map(|k| match coarse.get(k) {
            Some(c) if k < budget.restarts.div_ceil(2) => c.params.clone(),
            _ => random_angles(n_params, &mut refine_seed.stream(k as u64)),
        })
        .collect();
    let runs = starts
        .into_par_iter()
        .map(|x0| {
            maximize(
                |x| mutual_information_of_vectors(e, &protocol_vectors(db, x)),
                x0,
                0.2,
                budget.max_iters,
                budget.tolerance,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut result = best_of(runs);
    result.evaluations += grid_evaluations;
    let protocol = TwoStepProtocol::from_params(db, &result.params)?;
    result.value = mutual_information_of_basis(e, &protocol.basis(db))?;
    Ok(result)
}
