//! Local subentropy `Q_L` and the local lower bound `Λ_L`.
//!
//! For a qubit first party, integrating out B analytically leaves
//!
//! ```text
//! Q_L(σ) = 2 ∫dα w(α) [Q(σ̃_α) - log2 w(α)] + H(d_B)
//! ```
//!
//! with `w(α) = tr <α|σ|α>`, `σ̃_α = <α|σ|α>/w(α)` and `H(n)` the harmonic
//! constant. The `-log2 w` term is the classical part of the B-average; the
//! constants cancel in `Λ_L = Q_L(rho) - Σ p_x Q_L(rho_x)`. The Monte Carlo
//! path evaluates the defining product-state integral directly.

use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{
    separable_only, BoundName, BoundReport, Evaluation, HarmonicConstant, FLAG_SEPARABLE_ONLY, MIN_MC_SAMPLES,
};
use crate::densmat::{kron_vec, DensityMatrix};
use crate::ensembles::Ensemble;
use crate::entropy::subentropy_of;
use crate::error::{Error, Result};
use crate::haar::{bloch_grid, sample_pure_state, QuadratureGrid, RngSeed};
use crate::montecarlo::{estimate_mean, MeanEstimate};
use crate::scalar::xlog2x;

/// Max deviation of the average state from `rho^A ⊗ rho^B` accepted by the
/// product-average path.
pub const PRODUCT_TOLERANCE: f64 = 1e-8;
/// Standard errors allowed between the product-average and direct values.
pub const PRODUCT_FORM_SIGMAS: f64 = 5.0;
/// Absolute slack for that comparison (covers quadrature error when both
/// paths are deterministic).
pub const PRODUCT_FORM_ABS_TOL: f64 = 1e-6;

fn quadrature_grid(e_dims: &[usize], n_theta: usize, n_phi: usize) -> Result<(usize, QuadratureGrid<f64>)> {
    match e_dims {
        [2, db] => Ok((*db, bloch_grid(n_theta, n_phi)?)),
        other => Err(Error::QuadratureUnsupported { dims: other.to_vec() }),
    }
}

fn check_budget(samples: usize) -> Result<()> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::SampleBudgetTooSmall {
            got: samples,
            min: MIN_MC_SAMPLES,
        });
    }
    Ok(())
}

/// `w (Q(σ̃) - log2 w)` at one Bloch node.
fn weighted_term(sigma: &DensityMatrix, alpha: &[Complex<f64>], db: usize) -> Result<f64> {
    let c = sigma.conditional_unchecked(alpha, 2, db);
    match c.state {
        None => Ok(0.0),
        Some(s) => Ok(c.weight * (subentropy_of(&s)? - c.weight.log2())),
    }
}

/// `2 Σ_i w_i f(α_i)`, evaluated in parallel and summed in node order.
fn integrate_qubit<F>(grid: &QuadratureGrid<f64>, f: F) -> Result<f64>
where
    F: Fn(&[Complex<f64>]) -> Result<f64> + Sync,
{
    let values: Vec<f64> = grid
        .nodes
        .par_iter()
        .map(|n| f(n.amplitudes()))
        .collect::<Result<_>>()?;
    Ok(2.0 * values.iter().zip(&grid.weights).map(|(v, w)| v * w).sum::<f64>())
}

/// Haar-random product ket over all parties.
fn product_ket<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Vec<Complex<f64>> {
    let mut v = vec![Complex::new(1.0, 0.0)];
    for &d in dims {
        v = kron_vec(&v, sample_pure_state::<f64, _>(d, rng).amplitudes());
    }
    v
}

fn flags_for(dims: &[usize]) -> Vec<String> {
    if separable_only(dims) {
        vec![FLAG_SEPARABLE_ONLY.to_string()]
    } else {
        Vec::new()
    }
}

fn report(name: BoundName, value: f64, std_error: f64, eval: &Evaluation, dims: &[usize]) -> BoundReport {
    BoundReport {
        name,
        value,
        std_error,
        method: eval.method(),
        params: eval.params(),
        flags: flags_for(dims),
    }
}

/// Local subentropy `Q_L(σ) = -D ∫ <v|σ|v> log2 <v|σ|v>` over Haar product kets `v`.
pub fn local_subentropy(sigma: &DensityMatrix, eval: &Evaluation) -> Result<BoundReport> {
    let dims = sigma.dims();
    match *eval {
        Evaluation::Quadrature { n_theta, n_phi } => {
            let (db, grid) = quadrature_grid(dims, n_theta, n_phi)?;
            let integral = integrate_qubit(&grid, |a| weighted_term(sigma, a, db))?;
            let value = integral + HarmonicConstant(db).value();
            Ok(report(BoundName::QL, value, 0.0, eval, dims))
        }
        Evaluation::MonteCarlo { samples, seed } => {
            check_budget(samples)?;
            let est = local_subentropy_mc(sigma, samples, RngSeed(seed));
            Ok(report(BoundName::QL, est.mean, est.std_error, eval, dims))
        }
    }
}

fn local_subentropy_mc(sigma: &DensityMatrix, samples: usize, seed: RngSeed) -> MeanEstimate {
    let dims = sigma.dims().to_vec();
    let total = sigma.dim() as f64;
    estimate_mean(samples, seed, |rng| {
        let v = product_ket(&dims, rng);
        -total * xlog2x(sigma.expectation(&v).max(0.0))
    })
}

/// `Σ_x p_x Q_L(rho_x)` with one shared set of product samples.
fn mean_member_local_subentropy_mc(e: &Ensemble, samples: usize, seed: RngSeed) -> MeanEstimate {
    let dims = e.dims().to_vec();
    let total = e.dim() as f64;
    estimate_mean(samples, seed, |rng| {
        let v = product_ket(&dims, rng);
        -total
            * e.members()
                .iter()
                .map(|m| m.prob * xlog2x(m.state.expectation(&v).max(0.0)))
                .sum::<f64>()
    })
}

/// `Λ_L = Q_L(rho) - Σ_x p_x Q_L(rho_x)`, the average mutual information of
/// complete orthogonal product measurements.
///
/// Quadrature needs `dims = [2, n]` (swap parties first if B is the qubit).
/// Monte Carlo works for any party structure and shares samples between the
/// two terms. Results on inputs without a qubit party, or with more than two
/// parties, carry the `separable-only` flag.
pub fn lambda_l(e: &Ensemble, eval: &Evaluation) -> Result<BoundReport> {
    let dims = e.dims();
    match *eval {
        Evaluation::Quadrature { n_theta, n_phi } => {
            let (db, grid) = quadrature_grid(dims, n_theta, n_phi)?;
            let avg = e.average_state();
            let value = integrate_qubit(&grid, |a| {
                let mut v = weighted_term(&avg, a, db)?;
                for m in e.members() {
                    v -= m.prob * weighted_term(&m.state, a, db)?;
                }
                Ok(v)
            })?;
            Ok(report(BoundName::LambdaL, value, 0.0, eval, dims))
        }
        Evaluation::MonteCarlo { samples, seed } => {
            check_budget(samples)?;
            let dims_v = dims.to_vec();
            let total = e.dim() as f64;
            let est = estimate_mean(samples, RngSeed(seed), |rng| {
                let v = product_ket(&dims_v, rng);
                let mut t = 0.0;
                let mut member_part = 0.0;
                for m in e.members() {
                    let tx = m.state.expectation(&v).max(0.0);
                    t += m.prob * tx;
                    member_part += m.prob * xlog2x(tx);
                }
                total * (member_part - xlog2x(t))
            });
            Ok(report(BoundName::LambdaL, est.mean, est.std_error, eval, dims))
        }
    }
}

/// Which closed form to use for `Q_L(rho^A ⊗ rho^B)` in the product-average path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ProductAverageForm {
    /// `Q(rho^A) + Q(rho^B) + H(d_A) + H(d_B)`, which follows from the
    /// defining integral.
    #[default]
    Derived,
    /// `-d_A d_B {Q(rho^A) + Q(rho^B) - (H(d_A) - H(d_B))}` as it is usually
    /// printed. Kept so the consistency gate can be exercised; it disagrees
    /// with the direct evaluation.
    AsPrinted,
}

impl ProductAverageForm {
    pub fn name(self) -> &'static str {
        match self {
            ProductAverageForm::Derived => "derived",
            ProductAverageForm::AsPrinted => "printed",
        }
    }
}

/// `Λ_L` for ensembles whose average state is a product `rho^A ⊗ rho^B`:
/// the first term comes from the marginal subentropies, the second from the
/// members as in [`lambda_l`]. The value is returned only if it agrees with
/// the direct [`lambda_l`] within `PRODUCT_FORM_SIGMAS` combined standard
/// errors plus `PRODUCT_FORM_ABS_TOL`; otherwise
/// [`Error::ConsistencyFailure`].
pub fn lambda_l_product_average(e: &Ensemble, eval: &Evaluation, form: ProductAverageForm) -> Result<BoundReport> {
    let (da, db) = e.bipartite_dims()?;
    let avg = e.average_state();
    let rho_a = avg.partial_trace(0)?;
    let rho_b = avg.partial_trace(1)?;
    let deviation = avg.matrix().max_abs_diff(rho_a.kron(&rho_b)?.matrix());
    if deviation > PRODUCT_TOLERANCE {
        return Err(Error::AverageNotProduct { deviation });
    }
    let q_a = subentropy_of(&rho_a)?;
    let q_b = subentropy_of(&rho_b)?;
    let (h_a, h_b) = (HarmonicConstant(da).value(), HarmonicConstant(db).value());
    let first = match form {
        ProductAverageForm::Derived => q_a + q_b + h_a + h_b,
        ProductAverageForm::AsPrinted => -((da * db) as f64) * (q_a + q_b - (h_a - h_b)),
    };

    // Σ_x p_x Q_L(rho_x), on an independent stream from the direct evaluation.
    let (second, second_se) = match *eval {
        Evaluation::Quadrature { n_theta, n_phi } => {
            let (db, grid) = quadrature_grid(e.dims(), n_theta, n_phi)?;
            let integral = integrate_qubit(&grid, |a| {
                e.members()
                    .iter()
                    .map(|m| Ok(m.prob * weighted_term(&m.state, a, db)?))
                    .sum::<Result<f64>>()
            })?;
            (integral + HarmonicConstant(db).value(), 0.0)
        }
        Evaluation::MonteCarlo { samples, seed } => {
            check_budget(samples)?;
            let est = mean_member_local_subentropy_mc(e, samples, RngSeed(seed).derive(1));
            (est.mean, est.std_error)
        }
    };
    let value = first - second;
    let direct = lambda_l(e, eval)?;
    let diff = (value - direct.value).abs();
    let tolerance = PRODUCT_FORM_SIGMAS * (second_se.powi(2) + direct.std_error.powi(2)).sqrt() + PRODUCT_FORM_ABS_TOL;
    if diff > tolerance {
        return Err(Error::ConsistencyFailure {
            product_form: value,
            direct: direct.value,
            diff,
            tolerance,
        });
    }
    let mut r = report(BoundName::LambdaL, value, second_se, eval, e.dims());
    r.params.insert("form".into(), json!(form.name()));
    r.params.insert("first_term".into(), json!(first));
    r.params.insert("direct_value".into(), json!(direct.value));
    r.params.insert("direct_std_error".into(), json!(direct.std_error));
    Ok(r)
}
