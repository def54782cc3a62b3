use serde::Serialize;
use serde_json::json;

use super::{lambda_l, BoundName, BoundReport, Evaluation};
use crate::densmat::{ComplexMatrix, DensityMatrix};
use crate::ensembles::{bell_state, default_isometry, project_to_2xn, string_ensemble, BellState, PureDecomposition};
use crate::entropy::von_neumann_entropy;
use crate::error::{Error, Result};

pub const FLAG_NO_DISTILLATION: &str = "no-distillation";

/// Ingredients and value of the distillation upper bound
/// `D ≤ S(ϱ^A) + S(ϱ^B) - S̄_A - Λ_L(E)/m`.
#[derive(Clone, Debug, Serialize)]
pub struct DistillationReport {
    pub copies: usize,
    pub s_a: f64,
    pub s_b: f64,
    /// `Σ_i p_i S(tr_B |psi_i><psi_i|)` for the single-copy decomposition.
    pub s_bar_a: f64,
    pub lambda_l: BoundReport,
    pub bound: BoundReport,
}

impl DistillationReport {
    /// True when the bound rules out any positive yield.
    pub fn no_distillation(&self) -> bool {
        self.bound.value <= 0.0
    }
}

/// Distillation bound for protocols that first distinguish the members of
/// the m-copy string ensemble.
///
/// The string ensemble's A side (dimension `d_A^m`) is projected to a qubit
/// with `isometry` (default: the first two basis vectors) unless it is
/// already two-dimensional.
pub fn distillation_bound(
    d: &PureDecomposition,
    m: usize,
    isometry: Option<&ComplexMatrix>,
    eval: &Evaluation,
) -> Result<DistillationReport> {
    let avg = d.average_state()?;
    let s_a = von_neumann_entropy(&avg.partial_trace(0)?)?;
    let s_b = von_neumann_entropy(&avg.partial_trace(1)?)?;
    let mut s_bar_a = 0.0;
    for (p, psi) in d.members() {
        let rho = DensityMatrix::from_pure(psi, d.dims())?;
        s_bar_a += p * von_neumann_entropy(&rho.partial_trace(0)?)?;
    }

    let strings = string_ensemble(d, m)?;
    let (big_a, _) = strings.bipartite_dims()?;
    let projected = match isometry {
        Some(v) => project_to_2xn(&strings, v)?,
        None if big_a == 2 => strings,
        None => project_to_2xn(&strings, &default_isometry(big_a)?)?,
    };
    let lambda = lambda_l(&projected, eval)?;

    let mf = m as f64;
    let mut bound = BoundReport {
        name: BoundName::DistillD,
        value: s_a + s_b - s_bar_a - lambda.value / mf,
        std_error: lambda.std_error / mf,
        method: lambda.method,
        params: lambda.params.clone(),
        flags: lambda.flags.clone(),
    };
    bound.params.insert("copies".into(), json!(m));
    bound
        .params
        .insert("projected".into(), json!(isometry.is_some() || big_a != 2));
    if bound.value <= 0.0 {
        bound.flags.push(FLAG_NO_DISTILLATION.to_string());
    }
    Ok(DistillationReport {
        copies: m,
        s_a,
        s_b,
        s_bar_a,
        lambda_l: lambda,
        bound,
    })
}

/// Comparison of the distillation bound with the hashing yield `1 - S(ϱ)`.
#[derive(Clone, Debug, Serialize)]
pub struct HashingCheck {
    pub bound: f64,
    pub bound_std_error: f64,
    pub hashing_yield: f64,
    pub compatible: bool,
}

/// Sigma multiplier and absolute slack used by [`hashing_compatibility_check`].
pub const HASHING_SIGMAS: f64 = 3.0;
pub const HASHING_ABS_TOL: f64 = 1e-9;

/// Checks `bound(m) ≥ 1 - S(ϱ)` for a mixture of canonical Bell states.
pub fn hashing_compatibility_check(d: &PureDecomposition, m: usize, eval: &Evaluation) -> Result<HashingCheck> {
    if d.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "hashing check needs a 2x2 decomposition, got {:?}",
            d.dims()
        )));
    }
    for (index, (_, psi)) in d.members().iter().enumerate() {
        let is_bell = BellState::ALL
            .iter()
            .any(|&b| bell_state(b).inner(psi).norm() >= 1.0 - 1e-9);
        if !is_bell {
            return Err(Error::NotBellDiagonal { index });
        }
    }
    let report = distillation_bound(d, m, None, eval)?;
    let hashing_yield = 1.0 - von_neumann_entropy(&d.average_state()?)?;
    let bound = report.bound.value;
    let sigma = report.bound.std_error;
    Ok(HashingCheck {
        bound,
        bound_std_error: sigma,
        hashing_yield,
        compatible: bound + HASHING_SIGMAS * sigma + HASHING_ABS_TOL >= hashing_yield,
    })
}
