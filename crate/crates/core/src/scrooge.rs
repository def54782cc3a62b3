//! Scrooge ensembles: the least-informative pure-state ensemble with a given
//! average state, and checks that its measured mutual information does not
//! depend on the measurement basis.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::densmat::{DensityMatrix, PureState};
use crate::ensembles::{serialize_kets, Ensemble};
use crate::entropy::{subentropy_of, Spectrum};
use crate::error::{Error, Result};
use crate::haar::{sample_product_basis, sample_pure_state, sample_unitary, RngSeed};
use crate::montecarlo::{par_blocks, BLOCK_SIZE};

/// Eigenvalues at or below this are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;

/// Spread of per-basis values, in mean standard errors, that still counts as
/// sampling noise around a common value.
pub const CONSTANCY_SIGMAS: f64 = 6.0;

/// Density of the Scrooge distribution over `x_i = |<e_i|psi>|^2` with respect
/// to `dx_1 ... dx_{N-1}`:
///
/// ```text
/// (N-1)! N / [λ_1 ... λ_N (x_1/λ_1 + ... + x_N/λ_N)^{N+1}]
/// ```
///
/// `x` and `lambda` are indexed alike. Components where `λ_i` is zero must
/// vanish; the density is then the one of the support.
pub fn scrooge_density(x: &[f64], lambda: &Spectrum) -> Result<f64> {
    let lam = lambda.values();
    if x.len() != lam.len() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} coordinates, spectrum has {}",
            x.len(),
            lam.len()
        )));
    }
    if x.iter().any(|&v| v < 0.0 || !v.is_finite()) || (x.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("{x:?} is not a point of the simplex")));
    }
    let mut n = 0usize;
    let mut prod = 1.0;
    let mut t = 0.0;
    for (&xi, &li) in x.iter().zip(lam) {
        if li <= SUPPORT_CUTOFF {
            if xi > 0.0 {
                return Err(Error::SupportMismatch(format!(
                    "x = {xi} on an eigenvector with eigenvalue {li}"
                )));
            }
            continue;
        }
        n += 1;
        prod *= li;
        t += xi / li;
    }
    let factorial: f64 = (1..n).map(|k| k as f64).product();
    Ok(factorial * n as f64 / (prod * t.powi(n as i32 + 1)))
}

/// Weighted pure states drawn from the Scrooge ensemble of `source`.
#[derive(Clone, Debug)]
pub struct ScroogeSample {
    pub states: Vec<PureState>,
    /// Normalized importance weights.
    pub weights: Vec<f64>,
    pub source: DensityMatrix,
    pub seed: u64,
}

/// Draws `n` samples: `|phi>` Haar on the support of `rho`, emitted state
/// `rho^{1/2}|phi>` normalized, weight proportional to `<phi|rho|phi>`.
pub fn sample_scrooge(rho: &DensityMatrix, n: usize, seed: RngSeed) -> Result<ScroogeSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one Scrooge sample".into()));
    }
    let eig = rho.eigh()?;
    let support: Vec<(f64, Vec<Complex<f64>>)> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > SUPPORT_CUTOFF)
        .map(|(k, &l)| (l, eig.vectors.column(k)))
        .collect();
    let r = support.len();
    let dim = rho.dim();
    let blocks = par_blocks(n, BLOCK_SIZE, seed, |rng, _, count| {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let phi = sample_pure_state::<f64, _>(r, rng);
            let mut psi = vec![Complex::new(0.0, 0.0); dim];
            let mut weight = 0.0;
            for ((l, e), c) in support.iter().zip(phi.amplitudes()) {
                weight += l * c.norm_sqr();
                let a = c * l.sqrt();
                for (p, ei) in psi.iter_mut().zip(e) {
                    *p += a * ei;
                }
            }
            let norm = weight.sqrt();
            psi.iter_mut().for_each(|p| *p /= norm);
            out.push((weight, PureState::normalized(psi)));
        }
        out
    });
    let mut states = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (w, s) in blocks.into_iter().flatten() {
        states.push(s?);
        weights.push(w);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(ScroogeSample {
        states,
        weights,
        source: rho.clone(),
        seed: seed.0,
    })
}

/// Distance of the weighted sample average from the source state.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Recovery {
    /// `max |(Σ w_s |psi_s><psi_s|) - rho|` over entries.
    pub max_error: f64,
    /// Largest entrywise standard error of the weighted average.
    pub mc_scale: f64,
}

impl ScroogeSample {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.source.dims()
    }

    /// `Σ_s w_s |psi_s><psi_s|` as a matrix (row-major entries).
    fn average_entries(&self) -> Vec<Complex<f64>> {
        let d = self.source.dim();
        let mut acc = vec![Complex::new(0.0, 0.0); d * d];
        for (s, &w) in self.states.iter().zip(&self.weights) {
            let a = s.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    acc[i * d + j] += a[i] * a[j].conj() * w;
                }
            }
        }
        acc
    }

    /// First-moment recovery. The standard error treats the average as a
    /// ratio estimator: `sqrt(Σ_s w_s^2 |P_s - avg|^2)` per real component.
    pub fn recovery(&self) -> Recovery {
        let d = self.source.dim();
        let avg = self.average_entries();
        let mut var_re = vec![0.0; d * d];
        let mut var_im = vec![0.0; d * d];
        for (s, &w) in self.states.iter().zip(&self.weights) {
            let a = s.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    let dev = a[i] * a[j].conj() - avg[i * d + j];
                    var_re[i * d + j] += w * w * dev.re * dev.re;
                    var_im[i * d + j] += w * w * dev.im * dev.im;
                }
            }
        }
        let rho = self.source.matrix();
        let max_error = (0..d * d)
            .map(|k| (avg[k] - rho[(k / d, k % d)]).norm())
            .fold(0.0, f64::max);
        let mc_scale = var_re.iter().chain(&var_im).map(|v| v.sqrt()).fold(0.0, f64::max);
        Recovery { max_error, mc_scale }
    }

    /// The sample as an explicit ensemble (weights as probabilities).
    pub fn to_ensemble(&self) -> Result<Ensemble> {
        let kets: Vec<(f64, PureState)> = self.weights.iter().copied().zip(self.states.iter().cloned()).collect();
        Ensemble::from_kets(format!("scrooge:{}", self.seed), self.source.dims().to_vec(), &kets)
    }

    /// Ensemble JSON with `ket` members.
    pub fn to_json(&self) -> String {
        serialize_kets(
            &format!("scrooge:{}", self.seed),
            self.source.dims(),
            self.weights.iter().copied().zip(&self.states),
        )
    }
}

/// Which random bases [`constancy_check`] measures in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisMode {
    /// One Haar unitary per party.
    Product,
    /// Haar unitary on the whole space.
    Global,
}

/// Mutual information of the sample over random bases.
#[derive(Clone, Debug, Serialize)]
pub struct ConstancyStats {
    pub mode: BasisMode,
    pub samples: usize,
    pub values: Vec<f64>,
    /// Per-basis standard error from sample noise.
    pub std_errors: Vec<f64>,
    pub mean: f64,
    pub spread: f64,
    /// Mean of the per-basis standard errors.
    pub mean_std_error: f64,
    /// Standard error of `mean`: sample noise combined with basis-to-basis variation.
    pub std_error: f64,
    /// `spread ≤ CONSTANCY_SIGMAS × mean_std_error`.
    pub consistent_with_constant: bool,
    /// `Q(rho)`, reported for comparison only.
    pub reference_subentropy: f64,
}

/// `I(X:B)` of the weighted sample for one basis, with its delta-method
/// standard error. Influence of sample `s`:
/// `-Σ_b log2(q_b)(P_sb - q_b) - (h_s - h̄)`.
fn basis_information(sample: &ScroogeSample, basis: &[Vec<Complex<f64>>]) -> (f64, f64) {
    let nb = basis.len();
    let mut probs = Vec::with_capacity(sample.len() * nb);
    let mut q = vec![0.0; nb];
    let mut h = Vec::with_capacity(sample.len());
    let mut h_bar = 0.0;
    for (s, &w) in sample.states.iter().zip(&sample.weights) {
        let a = s.amplitudes();
        let mut hs = 0.0;
        for (b, qb) in basis.iter().zip(q.iter_mut()) {
            let p = b
                .iter()
                .zip(a)
                .fold(Complex::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
                .norm_sqr();
            probs.push(p);
            *qb += w * p;
            if p > 0.0 {
                hs -= p * p.log2();
            }
        }
        h.push(hs);
        h_bar += w * hs;
    }
    let h_q: f64 = q.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    let value = h_q - h_bar;
    let log_q: Vec<f64> = q.iter().map(|&x| if x > 0.0 { x.log2() } else { 0.0 }).collect();
    let mut var = 0.0;
    for (s, &w) in sample.weights.iter().enumerate() {
        let row = &probs[s * nb..(s + 1) * nb];
        let mut infl = -(h[s] - h_bar);
        for b in 0..nb {
            infl -= log_q[b] * (row[b] - q[b]);
        }
        var += w * w * infl * infl;
    }
    (value, var.sqrt())
}

/// Measures the sample in `n_bases` random bases (basis `k` drawn from
/// stream `k` of `seed`).
pub fn constancy_check(
    sample: &ScroogeSample,
    n_bases: usize,
    seed: RngSeed,
    mode: BasisMode,
) -> Result<ConstancyStats> {
    if n_bases < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bases, got {n_bases}")));
    }
    let dims = sample.dims().to_vec();
    let dim = sample.source.dim();
    let results: Vec<(f64, f64)> = (0..n_bases)
        .into_par_iter()
        .map(|k| {
            let mut rng = seed.stream(k as u64);
            let vectors: Vec<Vec<Complex<f64>>> = match mode {
                BasisMode::Product => sample_product_basis::<f64, _>(&dims, &mut rng)
                    .elements()
                    .into_iter()
                    .map(PureState::into_amplitudes)
                    .collect(),
                BasisMode::Global => {
                    let u = sample_unitary::<f64, _>(dim, &mut rng);
                    (0..dim).map(|j| u.column(j)).collect()
                }
            };
            basis_information(sample, &vectors)
        })
        .collect();
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let std_errors: Vec<f64> = results.iter().map(|r| r.1).collect();
    let nf = n_bases as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_std_error = std_errors.iter().sum::<f64>() / nf;
    let basis_var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    let spread = max - min;
    Ok(ConstancyStats {
        mode,
        samples: sample.len(),
        values,
        std_errors,
        mean,
        spread,
        mean_std_error,
        std_error: (mean_std_error.powi(2) + basis_var / nf).sqrt(),
        consistent_with_constant: spread <= CONSTANCY_SIGMAS * mean_std_error,
        reference_subentropy: subentropy_of(&sample.source)?,
    })
}
