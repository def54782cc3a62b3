//! Upper and lower bounds on (locally) accessible information.

mod distill;
mod local;

pub use distill::{
    distillation_bound, hashing_compatibility_check, DistillationReport, HashingCheck, FLAG_NO_DISTILLATION,
    HASHING_ABS_TOL, HASHING_SIGMAS,
};
pub use local::{
    lambda_l, lambda_l_product_average, local_subentropy, ProductAverageForm, PRODUCT_FORM_ABS_TOL,
    PRODUCT_FORM_SIGMAS, PRODUCT_TOLERANCE,
};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::ensembles::Ensemble;
use crate::entropy::{harmonic, subentropy_of, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::haar::DEFAULT_GRID;

pub const DEFAULT_MC_SAMPLES: usize = 200_000;
pub const MIN_MC_SAMPLES: usize = 100;

pub const FLAG_SEPARABLE_ONLY: &str = "separable-only";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundName {
    #[serde(rename = "chi")]
    Chi,
    #[serde(rename = "lambda")]
    Lambda,
    #[serde(rename = "chi_L")]
    ChiL,
    #[serde(rename = "lambda_L")]
    LambdaL,
    #[serde(rename = "Q_L")]
    QL,
    #[serde(rename = "distill_D")]
    DistillD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// How integrals over product states are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Evaluation {
    /// Bloch-sphere product rule; needs a qubit first party.
    Quadrature { n_theta: usize, n_phi: usize },
    /// Haar product-state sampling.
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for Evaluation {
    fn default() -> Self {
        Evaluation::Quadrature {
            n_theta: DEFAULT_GRID,
            n_phi: DEFAULT_GRID,
        }
    }
}

impl Evaluation {
    pub fn monte_carlo(seed: u64) -> Self {
        Evaluation::MonteCarlo {
            samples: DEFAULT_MC_SAMPLES,
            seed,
        }
    }

    pub fn method(&self) -> Method {
        match self {
            Evaluation::Quadrature { .. } => Method::Quadrature,
            Evaluation::MonteCarlo { .. } => Method::MonteCarlo,
        }
    }

    pub fn params(&self) -> Map<String, Value> {
        match *self {
            Evaluation::Quadrature { n_theta, n_phi } => {
                let mut m = Map::new();
                m.insert("n_theta".into(), json!(n_theta));
                m.insert("n_phi".into(), json!(n_phi));
                m
            }
            Evaluation::MonteCarlo { samples, seed } => {
                let mut m = Map::new();
                m.insert("samples".into(), json!(samples));
                m.insert("seed".into(), json!(seed));
                m
            }
        }
    }
}

/// One named bound value with provenance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: BoundName,
    #[serde(rename = "value_bits")]
    pub value: f64,
    #[serde(rename = "std_error_bits")]
    pub std_error: f64,
    pub method: Method,
    pub params: Map<String, Value>,
    pub flags: Vec<String>,
}

impl BoundReport {
    pub(crate) fn closed_form(name: BoundName, value: f64) -> Self {
        Self {
            name,
            value,
            std_error: 0.0,
            method: Method::ClosedForm,
            params: Map::new(),
            flags: Vec::new(),
        }
    }

    pub fn has_flag(&self, flag: &str) -> bool {
        self.flags.iter().any(|f| f == flag)
    }
}

/// `log2(e) (1/2 + 1/3 + ... + 1/n)`, zero for `n = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HarmonicConstant(pub usize);

impl HarmonicConstant {
    pub fn value(self) -> f64 {
        if self.0 <= 1 {
            0.0
        } else {
            std::f64::consts::LOG2_E * (harmonic::<f64>(self.0) - 1.0)
        }
    }
}

/// `χ = S(rho) - Σ_x p_x S(rho_x)`.
pub fn holevo_chi(e: &Ensemble) -> Result<BoundReport> {
    let mut chi = von_neumann_entropy(&e.average_state())?;
    for m in e.members() {
        chi -= m.prob * von_neumann_entropy(&m.state)?;
    }
    Ok(BoundReport::closed_form(BoundName::Chi, chi.max(0.0)))
}

/// `Λ = Q(rho) - Σ_x p_x Q(rho_x)`.
pub fn jrw_lambda(e: &Ensemble) -> Result<BoundReport> {
    let mut lambda = subentropy_of(&e.average_state())?;
    for m in e.members() {
        lambda -= m.prob * subentropy_of(&m.state)?;
    }
    Ok(BoundReport::closed_form(BoundName::Lambda, lambda))
}

/// `χ_L = S(rho^A) + S(rho^B) - max_Z Σ_x p_x S(rho_x^Z) - E_out`.
///
/// `e_out_avg` is the average output entanglement; zero gives a valid but
/// weaker bound.
pub fn chi_l(e: &Ensemble, e_out_avg: f64) -> Result<BoundReport> {
    e.bipartite_dims()?;
    if !(e_out_avg >= 0.0) {
        return Err(Error::NegativeEoutTerm { value: e_out_avg });
    }
    let avg = e.average_state();
    let s_a = von_neumann_entropy(&avg.partial_trace(0)?)?;
    let s_b = von_neumann_entropy(&avg.partial_trace(1)?)?;
    let mut mean_a = 0.0;
    let mut mean_b = 0.0;
    for m in e.members() {
        mean_a += m.prob * von_neumann_entropy(&m.state.partial_trace(0)?)?;
        mean_b += m.prob * von_neumann_entropy(&m.state.partial_trace(1)?)?;
    }
    let (max_party, max_term) = if mean_a >= mean_b { ("A", mean_a) } else { ("B", mean_b) };
    let mut r = BoundReport::closed_form(BoundName::ChiL, s_a + s_b - max_term - e_out_avg);
    r.params.insert("e_out_avg".into(), json!(e_out_avg));
    r.params.insert("max_party".into(), json!(max_party));
    Ok(r)
}

/// Whether `Λ_L` on these dims is only known to bound separable-operation
/// information (no qubit party, or more than two parties).
pub fn separable_only(dims: &[usize]) -> bool {
    dims.len() > 2 || dims.iter().all(|&d| d > 2)
}

#[cfg(test)]
mod tests;
