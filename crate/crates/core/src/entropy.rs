//! Entropy functionals in bits: Shannon, von Neumann, subentropy, and the
//! mutual information of a complete projective measurement.

use num_complex::Complex;

use crate::densmat::{gram_deviation, DensityMatrix, PureState};
use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::haar::ProductBasis;
use crate::scalar::{xlog2x, Real};

const PROB_SUM_TOL: f64 = 1e-9;
const NEGATIVE_PROB_TOL: f64 = 1e-12;

fn sum_tol<T: Real>() -> T {
    T::lit(PROB_SUM_TOL).max(T::validation_tol())
}

/// Shannon entropy of a probability vector. `0 log 0 = 0`.
pub fn shannon_entropy<T: Real>(p: &[T]) -> Result<T> {
    let mut sum = T::zero();
    for (index, &v) in p.iter().enumerate() {
        if v < -T::lit(NEGATIVE_PROB_TOL) || !v.is_finite() {
            return Err(Error::NegativeProbability {
                index,
                value: v.to_f64_lossy(),
            });
        }
        sum = sum + v;
    }
    if (sum - T::one()).abs() > sum_tol() {
        return Err(Error::ProbabilitySum {
            sum: sum.to_f64_lossy(),
        });
    }
    Ok(entropy_unchecked(p))
}

/// `-Σ p log2 p`, clamping tiny negatives to zero.
#[inline]
pub(crate) fn entropy_unchecked<T: Real>(p: &[T]) -> T {
    -p.iter().map(|&x| xlog2x(x)).sum::<T>()
}

/// Eigenvalue list of a density matrix: descending, in `[0, 1]`, unit sum.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T: Real = f64> {
    values: Vec<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DimensionMismatch("empty spectrum".into()));
        }
        let tol = sum_tol::<T>();
        for (index, v) in values.iter_mut().enumerate() {
            if !v.is_finite() || *v < -tol || *v > T::one() + tol {
                return Err(Error::NegativeProbability {
                    index,
                    value: v.to_f64_lossy(),
                });
            }
            *v = v.max(T::zero()).min(T::one());
        }
        let sum: T = values.iter().copied().sum();
        if (sum - T::one()).abs() > tol {
            return Err(Error::ProbabilitySum {
                sum: sum.to_f64_lossy(),
            });
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self { values })
    }

    pub fn of(rho: &DensityMatrix<T>) -> Result<Self> {
        Self::new(rho.eigh()?.values)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn entropy(&self) -> T {
        entropy_unchecked(&self.values)
    }
}

pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(Spectrum::of(rho)?.entropy())
}

/// Harmonic number `H_n = 1 + 1/2 + ... + 1/n` (`H_0 = 0`).
pub(crate) fn harmonic<T: Real>(n: usize) -> T {
    (1..=n).map(|k| T::one() / T::from_usize(k).unwrap()).sum()
}

/// Step of the trapezoid rule in `u = ln t`. The integrand is analytic in
/// the strip `|Im u| < π`, so the error falls like `exp(-2π²/h)`.
const SUBENTROPY_STEP: f64 = 0.4;

/// `λ ln(1 + y) - ln(1 + λ y)`, which is `≤ 0` for `λ ∈ [0, 1]`.
fn log_gap<T: Real>(l: T, y: T) -> T {
    if y >= T::lit(0.1) {
        return l * y.ln_1p() - (l * y).ln_1p();
    }
    // Series in y; the first-order terms cancel exactly.
    let mut acc = T::zero();
    let mut yk = y;
    let mut lk = T::one();
    let mut sign = T::one();
    for k in 2..64 {
        yk = yk * y;
        lk = lk * l;
        sign = -sign;
        let term = sign * yk * l * (T::one() - lk) / T::from_usize(k).unwrap();
        acc = acc + term;
        if term.abs() <= T::epsilon() * acc.abs() {
            break;
        }
    }
    acc
}

/// Subentropy `Q(λ) = -Σ_i (Π_{j≠i} λ_i/(λ_i - λ_j)) λ_i log2 λ_i`.
///
/// Evaluated through
///
/// ```text
/// Q ln 2 = ∫_0^∞ [t/(1+t) - Π_i t/(t + λ_i)] dt
/// ```
///
/// which has no cancellation between nodes, so degenerate and nearly
/// degenerate spectra need no special casing. Zero eigenvalues drop out.
pub fn subentropy<T: Real>(s: &Spectrum<T>) -> T {
    let total: T = s.values.iter().copied().sum();
    let lam: Vec<T> = s
        .values
        .iter()
        .filter(|&&v| v > T::zero())
        .map(|&v| v / total)
        .collect();
    if lam.len() < 2 {
        return T::zero();
    }
    // Below u_min the integrand is O(t^2), above u_max it is O(1/t).
    let h = T::lit(SUBENTROPY_STEP);
    let ln_eps = T::epsilon().ln();
    let k_min = ((T::lit(0.5) * ln_eps - T::lit(2.0)) / h).floor().to_i64().unwrap();
    let k_max = ((T::lit(2.0) - ln_eps) / h).ceil().to_i64().unwrap();
    let mut acc = T::zero();
    for k in k_min..=k_max {
        let t = (T::from_i64(k).unwrap() * h).exp();
        let y = T::one() / t;
        let gap: T = lam.iter().map(|&l| log_gap(l, y)).sum();
        acc = acc - t / (T::one() + t) * gap.exp_m1() * t;
    }
    (acc * h / T::LN_2()).max(T::zero())
}

/// Subentropy of a density matrix.
pub fn subentropy_of<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(subentropy(&Spectrum::of(rho)?))
}

/// Joint distribution `p(x, y)` of ensemble index and measurement outcome.
#[derive(Clone, Debug)]
pub struct MeasurementOutcomeTable<T: Real = f64> {
    rows: usize,
    cols: usize,
    joint: Vec<T>,
}

impl<T: Real> MeasurementOutcomeTable<T> {
    pub fn new(rows: usize, cols: usize, joint: Vec<T>) -> Result<Self> {
        if joint.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} outcome table",
                joint.len()
            )));
        }
        let mut t = Self { rows, cols, joint };
        let mut sum = T::zero();
        for (index, v) in t.joint.iter_mut().enumerate() {
            if *v < -T::lit(NEGATIVE_PROB_TOL) || !v.is_finite() {
                return Err(Error::NegativeProbability {
                    index,
                    value: v.to_f64_lossy(),
                });
            }
            *v = v.max(T::zero());
            sum = sum + *v;
        }
        if (sum - T::one()).abs() > sum_tol() {
            return Err(Error::ProbabilitySum {
                sum: sum.to_f64_lossy(),
            });
        }
        Ok(t)
    }

    pub(crate) fn from_joint_unchecked(rows: usize, cols: usize, joint: Vec<T>) -> Self {
        Self { rows, cols, joint }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.joint[x * self.cols + y]
    }

    pub fn row_marginal(&self) -> Vec<T> {
        (0..self.rows)
            .map(|x| self.joint[x * self.cols..(x + 1) * self.cols].iter().copied().sum())
            .collect()
    }

    pub fn column_marginal(&self) -> Vec<T> {
        (0..self.cols)
            .map(|y| (0..self.rows).map(|x| self.get(x, y)).sum())
            .collect()
    }

    /// `I(X:Y) = H(X) + H(Y) - H(X,Y)`, floored at zero.
    pub fn mutual_information(&self) -> T {
        let hx = entropy_unchecked(&self.row_marginal());
        let hy = entropy_unchecked(&self.column_marginal());
        let hxy = entropy_unchecked(&self.joint);
        (hx + hy - hxy).max(T::zero())
    }
}

fn outcome_table(e: &Ensemble, vectors: &[Vec<Complex<f64>>]) -> MeasurementOutcomeTable<f64> {
    let n = vectors.len();
    let mut joint = Vec::with_capacity(e.len() * n);
    for m in e.members() {
        for v in vectors {
            joint.push(m.prob * m.state.expectation(v).max(0.0));
        }
    }
    MeasurementOutcomeTable::from_joint_unchecked(e.len(), n, joint)
}

/// Mutual information for measurement vectors the caller knows to be a
/// complete orthonormal basis.
pub(crate) fn mutual_information_of_vectors(e: &Ensemble, vectors: &[Vec<Complex<f64>>]) -> f64 {
    outcome_table(e, vectors).mutual_information()
}

/// Mutual information between the ensemble label and the outcome of a
/// projective measurement in a complete orthonormal basis.
pub fn mutual_information_of_basis(e: &Ensemble, basis: &[PureState<f64>]) -> Result<f64> {
    let dim = e.dim();
    if basis.len() != dim || basis.iter().any(|b| b.dim() != dim) {
        return Err(Error::IncompleteBasis {
            got: basis.len(),
            expected: dim,
        });
    }
    let dev = gram_deviation(basis);
    if dev > 1e-9 {
        return Err(Error::NonOrthonormal { deviation: dev });
    }
    let vectors: Vec<Vec<Complex<f64>>> = basis.iter().map(|b| b.amplitudes().to_vec()).collect();
    Ok(outcome_table(e, &vectors).mutual_information())
}

/// Same as [`mutual_information_of_basis`] for a product basis, which is
/// orthonormal by construction.
pub fn mutual_information_of_product_basis(e: &Ensemble, basis: &ProductBasis<f64>) -> Result<f64> {
    if basis.dims() != e.dims() {
        return Err(Error::DimensionMismatch(format!(
            "product basis dims {:?} vs ensemble dims {:?}",
            basis.dims(),
            e.dims()
        )));
    }
    let vectors: Vec<Vec<Complex<f64>>> = (0..basis.len()).map(|k| basis.element(k).into_amplitudes()).collect();
    Ok(outcome_table(e, &vectors).mutual_information())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct product formula `-Σ_k Π_{l≠k} λ_k/(λ_k-λ_l) λ_k log2 λ_k`.
    fn subentropy_product_formula(l: &[f64]) -> f64 {
        let mut q = 0.0;
        for (k, &lk) in l.iter().enumerate() {
            if lk == 0.0 {
                continue;
            }
            let mut prod = 1.0;
            for (j, &lj) in l.iter().enumerate() {
                if j != k {
                    prod *= lk / (lk - lj);
                }
            }
            q -= prod * lk * lk.log2();
        }
        q
    }

    fn spectrum(v: &[f64]) -> Spectrum<f64> {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn shannon_examples() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.5f64, 0.5]).unwrap() - 1.0).abs() < 1e-15);
        let third = 1.0 / 3.0;
        assert!((shannon_entropy(&[third, third, third]).unwrap() - 3f64.log2()).abs() < 1e-14);
        assert!(matches!(
            shannon_entropy(&[1.1, -0.1]),
            Err(Error::NegativeProbability { index: 1, .. })
        ));
        assert!(matches!(
            shannon_entropy(&[0.5, 0.4]),
            Err(Error::ProbabilitySum { .. })
        ));
    }

    #[test]
    fn subentropy_unit_values() {
        assert_eq!(subentropy(&spectrum(&[1.0, 0.0])), 0.0);
        assert_eq!(subentropy(&spectrum(&[1.0, 0.0, 0.0, 0.0])), 0.0);
        // degenerate limit -d/dλ(λ² log2 λ) at 1/2
        let half = 1.0 - 0.5 * std::f64::consts::LOG2_E;
        assert!((subentropy(&spectrum(&[0.5, 0.5])) - half).abs() < 1e-12);
        assert!((subentropy(&spectrum(&[0.5, 0.5])) - 0.27865).abs() < 1e-5);
        // two-node closed form
        let (a, b) = (2.0f64 / 3.0, 1.0f64 / 3.0);
        let closed = -(a * a * a.log2() - b * b * b.log2()) / (a - b);
        assert!((subentropy(&spectrum(&[a, b])) - closed).abs() < 1e-14);
        assert!((closed - 0.25163).abs() < 1e-5);
    }

    #[test]
    fn triple_confluent_node() {
        // Q(1/3,1/3,1/3,0) = -g[0, t, t, t] with g = λ⁴ log2 λ. Confluent
        // Hermite data at t give -(g[t,t,t] - g[0,t,t]) / t with g[0,t,t]
        // built from g[0,t] = g(t)/t and g[t,t] = g'(t).
        let t = 1.0f64 / 3.0;
        let ln2 = std::f64::consts::LN_2;
        let g = |x: f64| x.powi(4) * x.ln() / ln2;
        let g1 = |x: f64| (4.0 * x.powi(3) * x.ln() + x.powi(3)) / ln2;
        let g2 = |x: f64| (12.0 * x * x * x.ln() + 7.0 * x * x) / ln2 / 2.0;
        let g0t = g(t) / t;
        let g0tt = (g1(t) - g0t) / t;
        let g0ttt = (g2(t) - g0tt) / t;
        let q = subentropy(&spectrum(&[t, t, t, 0.0]));
        assert!((q + g0ttt).abs() < 1e-12, "{q} vs {}", -g0ttt);
        assert!(q > 0.0 && q < 3f64.log2());
    }

    #[test]
    fn maximally_mixed_closed_form() {
        for d in 2..=64usize {
            let hd: f64 = (1..=d).map(|k| 1.0 / k as f64).sum();
            let expected = (d as f64).log2() - std::f64::consts::LOG2_E * (hd - 1.0);
            let q = subentropy(&spectrum(&vec![1.0 / d as f64; d]));
            assert!((q - expected).abs() < 1e-12, "d = {d}: {q} vs {expected}");
        }
    }

    #[test]
    fn clustered_spectrum_is_continuous() {
        let d = 12;
        let base = subentropy(&spectrum(&vec![1.0 / d as f64; d]));
        let jittered: Vec<f64> = (0..d).map(|k| (1.0 + 1e-7 * k as f64) / d as f64).collect();
        let s: f64 = jittered.iter().sum();
        let jittered: Vec<f64> = jittered.iter().map(|x| x / s).collect();
        assert!((subentropy(&spectrum(&jittered)) - base).abs() < 1e-10);
    }

    #[test]
    fn near_degenerate_pair_is_continuous() {
        let exact = subentropy(&spectrum(&[0.5, 0.5]));
        for eps in [1e-3, 1e-5, 1e-8, 1e-10] {
            let q = subentropy(&spectrum(&[0.5 + eps, 0.5 - eps]));
            assert!((q - exact).abs() < 10.0 * eps.max(1e-12), "eps {eps}: {q}");
        }
    }

    #[test]
    fn maximally_mixed_single_precision() {
        let q = subentropy(&Spectrum::new(vec![0.5f32, 0.5]).unwrap());
        assert!((q - 0.278_652_5).abs() < 1e-5);
    }

    fn random_spectrum(raw: Vec<f64>) -> Vec<f64> {
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    fn separated(v: &[f64], gap: f64) -> bool {
        let mut s = v.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        s.windows(2).all(|w| w[1] - w[0] >= gap)
    }

    proptest! {
        #[test]
        fn matches_product_formula_on_separated_spectra(raw in prop::collection::vec(0.01f64..1.0, 2..7)) {
            let v = random_spectrum(raw);
            prop_assume!(separated(&v, 1e-3));
            let q = subentropy(&spectrum(&v));
            prop_assert!((q - subentropy_product_formula(&v)).abs() <= 1e-10);
        }

        #[test]
        fn subentropy_below_von_neumann(raw in prop::collection::vec(0.0f64..1.0, 1..8)) {
            prop_assume!(raw.iter().sum::<f64>() > 1e-3);
            let s = spectrum(&random_spectrum(raw));
            let q = subentropy(&s);
            prop_assert!(q >= 0.0);
            prop_assert!(q <= s.entropy() + 1e-12);
        }

        #[test]
        fn appending_zero_eigenvalue_leaves_subentropy(raw in prop::collection::vec(0.0f64..1.0, 1..7)) {
            prop_assume!(raw.iter().sum::<f64>() > 1e-3);
            let v = random_spectrum(raw);
            let mut w = v.clone();
            w.push(0.0);
            prop_assert!((subentropy(&spectrum(&v)) - subentropy(&spectrum(&w))).abs() <= 1e-10);
        }
    }

    #[test]
    fn outcome_table_mutual_information() {
        let t = MeasurementOutcomeTable::new(2, 2, vec![0.5f64, 0.0, 0.0, 0.5]).unwrap();
        assert!((t.mutual_information() - 1.0).abs() < 1e-15);
        let t = MeasurementOutcomeTable::new(2, 2, vec![0.25; 4]).unwrap();
        assert_eq!(t.mutual_information(), 0.0);
        assert!(MeasurementOutcomeTable::new(1, 2, vec![0.5, 0.4]).is_err());
    }
}
