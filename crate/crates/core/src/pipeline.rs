//! Report assembly shared by the command-line front end and the acceptance
//! suite. Everything here is deterministic given its inputs and seed.

use std::path::Path;

use serde::Serialize;

use crate::bounds::{
    chi_l, distillation_bound, hashing_compatibility_check, holevo_chi, jrw_lambda, lambda_l, lambda_l_product_average,
    BoundReport, DistillationReport, Evaluation, HashingCheck, ProductAverageForm,
};
use crate::densmat::{ComplexMatrix, DensityMatrix};
use crate::ensembles::{
    e1_ensemble, format_sig17, parse_ensemble, parse_pure_decomposition, resolve_builtin,
    resolve_builtin_decomposition, Ensemble, PureDecomposition,
};
use crate::error::{Error, Result};
use crate::haar::RngSeed;
use crate::montecarlo::MeanEstimate;
use crate::oracle::{
    average_product_basis_mi, optimize_global_orthogonal, optimize_two_step_locc, OptimizationResult, OptimizerBudget,
    MAX_GLOBAL_DIM,
};
use crate::scrooge::{constancy_check, sample_scrooge, BasisMode, ConstancyStats, Recovery};

/// A built-in name (`bell3`, `e1:pi/2:pi/4`, ...) or a path to an ensemble JSON file.
pub fn load_ensemble(source: &str) -> Result<Ensemble> {
    if let Some(e) = resolve_builtin(source) {
        return e;
    }
    parse_ensemble(&read(source)?)
}

/// A built-in decomposition name or a path to a ket-only ensemble JSON file.
pub fn load_decomposition(source: &str) -> Result<PureDecomposition> {
    if let Some(d) = resolve_builtin_decomposition(source) {
        return d;
    }
    parse_pure_decomposition(&read(source)?)
}

fn read(path: &str) -> Result<String> {
    if !Path::new(path).exists() {
        return Err(Error::InvalidArgument(format!(
            "{path:?} is neither a built-in name nor an existing file"
        )));
    }
    Ok(std::fs::read_to_string(path)?)
}

/// Reads a `2 x d_A` isometry as rows of `[re, im]` pairs.
pub fn load_isometry(path: &str) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(&read(path)?).map_err(|e| Error::Schema(e.to_string()))?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Schema("isometry rows differ in length".into()));
    }
    let data = rows
        .iter()
        .flatten()
        .map(|[re, im]| num_complex::Complex::new(*re, *im))
        .collect();
    ComplexMatrix::new(rows.len(), cols, data)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleSummary {
    pub label: String,
    pub dims: Vec<usize>,
    pub members: usize,
}

impl From<&Ensemble> for EnsembleSummary {
    fn from(e: &Ensemble) -> Self {
        Self {
            label: e.label().to_string(),
            dims: e.dims().to_vec(),
            members: e.len(),
        }
    }
}

/// What [`bounds_report`] computes besides the closed-form bounds.
#[derive(Clone, Debug)]
pub struct BoundsConfig {
    pub evaluation: Evaluation,
    pub e_out_avg: f64,
    /// Random product bases for the averaging oracle; 0 skips it.
    pub bases: usize,
    /// Run the two-step LOCC and global basis searches where applicable.
    pub optimize: bool,
    pub budget: OptimizerBudget,
    pub product_form: Option<ProductAverageForm>,
    pub seed: u64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self {
            evaluation: Evaluation::default(),
            e_out_avg: 0.0,
            bases: 0,
            optimize: true,
            budget: OptimizerBudget::default(),
            product_form: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_basis_average: Option<MeanEstimate>,
    /// Achieved by an explicit LOCC protocol: a lower bound on the LOCC-accessible information.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_step_locc: Option<OptimizationResult>,
    /// Achieved by an explicit global basis: a lower bound on the accessible information.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global_orthogonal: Option<OptimizationResult>,
}

/// `Λ_L ≤ (achieved LOCC value) ≤ χ_L` and `≤ χ`, with a 3σ allowance.
#[derive(Clone, Debug, Serialize)]
pub struct Sandwich {
    pub lower: f64,
    pub lower_std_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locc_achieved: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper_locc: Option<f64>,
    pub upper: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub ensemble: EnsembleSummary,
    /// Parties were exchanged so that the qubit is first (quadrature needs it).
    pub parties_swapped: bool,
    pub bounds: Vec<BoundReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_average: Option<BoundReport>,
    pub oracle: OracleReport,
    pub sandwich: Sandwich,
}

const SANDWICH_SIGMAS: f64 = 3.0;
const SANDWICH_ABS_TOL: f64 = 1e-9;

pub fn bounds_report(e: &Ensemble, cfg: &BoundsConfig) -> Result<BoundsReport> {
    let bipartite = e.bipartite_dims().ok();
    let swap = matches!(cfg.evaluation, Evaluation::Quadrature { .. }) && matches!(bipartite, Some((da, 2)) if da != 2);
    let work = if swap { e.swap_parties()? } else { e.clone() };

    let chi = holevo_chi(&work)?;
    let lambda = jrw_lambda(&work)?;
    let chi_l = match bipartite {
        Some(_) => Some(chi_l(&work, cfg.e_out_avg)?),
        None => None,
    };
    let lambda_l = lambda_l(&work, &cfg.evaluation)?;
    let product_average = match cfg.product_form {
        Some(form) => Some(lambda_l_product_average(&work, &cfg.evaluation, form)?),
        None => None,
    };

    let seed = RngSeed(cfg.seed);
    let product_basis_average = if cfg.bases > 0 {
        Some(average_product_basis_mi(&work, cfg.bases, seed.derive(10))?)
    } else {
        None
    };
    let qubit_first = matches!(work.bipartite_dims(), Ok((2, _)));
    let two_step_locc = if cfg.optimize && qubit_first {
        Some(optimize_two_step_locc(&work, &cfg.budget, seed.derive(11))?)
    } else {
        None
    };
    let global_orthogonal = if cfg.optimize && work.dim() <= MAX_GLOBAL_DIM {
        Some(optimize_global_orthogonal(&work, &cfg.budget, seed.derive(12))?)
    } else {
        None
    };

    let slack = SANDWICH_SIGMAS * lambda_l.std_error + SANDWICH_ABS_TOL;
    let locc_achieved = two_step_locc.as_ref().map(|r| r.value);
    let upper_locc = chi_l.as_ref().map(|r| r.value);
    let mut consistent = lambda_l.value >= -slack && lambda_l.value <= chi.value + slack;
    if let Some(v) = locc_achieved {
        consistent &= v >= lambda_l.value - slack && v <= chi.value + SANDWICH_ABS_TOL;
        if let Some(u) = upper_locc {
            consistent &= v <= u + SANDWICH_ABS_TOL;
        }
    }
    let sandwich = Sandwich {
        lower: lambda_l.value,
        lower_std_error: lambda_l.std_error,
        locc_achieved,
        upper_locc,
        upper: chi.value,
        consistent,
    };

    let mut bounds = vec![chi, lambda];
    bounds.extend(chi_l);
    bounds.push(lambda_l);
    Ok(BoundsReport {
        ensemble: EnsembleSummary::from(e),
        parties_swapped: swap,
        bounds,
        product_average,
        oracle: OracleReport {
            product_basis_average,
            two_step_locc,
            global_orthogonal,
        },
        sandwich,
    })
}

/// One row of the E₁ sweep. `lambda_l` is `None` where the family is undefined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub lambda_l: Option<f64>,
    pub std_error: Option<f64>,
    pub chi: Option<f64>,
    pub flag: String,
}

/// `Λ_L(E₁(θ, φ))` at `steps` evenly spaced `θ` from `theta_min` to `theta_max`
/// inclusive. Monte Carlo rows share the seed (common random numbers along the curve).
pub fn sweep_e1(phi: f64, theta_min: f64, theta_max: f64, steps: usize, eval: &Evaluation) -> Result<Vec<SweepRow>> {
    if steps == 0 || !(theta_min <= theta_max) {
        return Err(Error::InvalidArgument(format!(
            "need steps ≥ 1 and θ_min ≤ θ_max, got {steps} steps over [{theta_min}, {theta_max}]"
        )));
    }
    let thetas: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                theta_min
            } else {
                theta_min + (theta_max - theta_min) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    thetas
        .into_iter()
        .map(|theta| match e1_ensemble(theta, phi) {
            Ok(e) => {
                let r = lambda_l(&e, eval)?;
                Ok(SweepRow {
                    theta,
                    lambda_l: Some(r.value),
                    std_error: Some(r.std_error),
                    chi: Some(holevo_chi(&e)?.value),
                    flag: String::new(),
                })
            }
            Err(Error::DegenerateParameters(_)) => Ok(SweepRow {
                theta,
                lambda_l: None,
                std_error: None,
                chi: None,
                flag: "degenerate".into(),
            }),
            Err(e) => Err(e),
        })
        .collect()
}

/// RFC 4180 CSV with a header row; numbers at 17 significant digits.
pub fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::InvalidArgument(format!("CSV write failed: {e}"));
    w.write_record(["theta", "lambda_l", "std_error", "chi", "flag"])
        .map_err(csv_err)?;
    let num = |x: Option<f64>| x.map(format_sig17).unwrap_or_default();
    for r in rows {
        w.write_record([
            format_sig17(r.theta),
            num(r.lambda_l),
            num(r.std_error),
            num(r.chi),
            r.flag.clone(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields"))
}

#[derive(Clone, Debug)]
pub struct ScroogeConfig {
    pub samples: usize,
    pub bases: usize,
    pub seed: u64,
}

impl Default for ScroogeConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            bases: 50,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeComparison {
    pub difference: f64,
    pub sigma: f64,
    pub within_3_sigma: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScroogeReport {
    pub dims: Vec<usize>,
    pub samples: usize,
    pub recovery: Recovery,
    pub product: ConstancyStats,
    pub global: ConstancyStats,
    pub product_vs_global: ModeComparison,
}

/// Samples the Scrooge ensemble of `rho` and measures it in random product
/// and global bases.
pub fn scrooge_report(rho: &DensityMatrix, cfg: &ScroogeConfig) -> Result<ScroogeReport> {
    let seed = RngSeed(cfg.seed);
    let sample = sample_scrooge(rho, cfg.samples, seed.derive(20))?;
    let product = constancy_check(&sample, cfg.bases, seed.derive(21), BasisMode::Product)?;
    let global = constancy_check(&sample, cfg.bases, seed.derive(22), BasisMode::Global)?;
    let difference = product.mean - global.mean;
    let sigma = (product.std_error.powi(2) + global.std_error.powi(2)).sqrt();
    Ok(ScroogeReport {
        dims: rho.dims().to_vec(),
        samples: sample.len(),
        recovery: sample.recovery(),
        product_vs_global: ModeComparison {
            difference,
            sigma,
            within_3_sigma: difference.abs() <= 3.0 * sigma,
        },
        product,
        global,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DistillReport {
    pub decomposition: EnsembleSummary,
    pub distillation: DistillationReport,
    /// Present when every member is a canonical Bell state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hashing: Option<HashingCheck>,
}

pub fn distill_report(
    d: &PureDecomposition,
    m: usize,
    isometry: Option<&ComplexMatrix>,
    eval: &Evaluation,
) -> Result<DistillReport> {
    let distillation = distillation_bound(d, m, isometry, eval)?;
    let hashing = if isometry.is_none() && d.dims() == [2, 2] {
        match hashing_compatibility_check(d, m, eval) {
            Ok(h) => Some(h),
            Err(Error::NotBellDiagonal { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(DistillReport {
        decomposition: EnsembleSummary {
            label: d.label().to_string(),
            dims: d.dims().to_vec(),
            members: d.len(),
        },
        distillation,
        hashing,
    })
}
