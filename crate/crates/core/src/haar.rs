//! Haar sampling of pure states and local unitaries, plus the Bloch-sphere
//! quadrature used for the qubit fast path.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::densmat::{kron_vec, ComplexMatrix, PureState};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Seed for the crate's ChaCha8 streams.
///
/// Streams are split by index: `seed.stream(k)` for distinct `k` are
/// independent, and the same `(seed, k)` always yields the same sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        self.stream(0)
    }

    pub fn stream(self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(index);
        rng
    }

    /// Derives an unrelated seed, for handing a sub-computation its own stream family.
    pub fn derive(self, tag: u64) -> RngSeed {
        // splitmix64 finalizer
        let mut z = self.0 ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T>
where
    StandardNormal: Distribution<T>,
{
    Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random pure state in dimension `d`.
pub fn sample_pure_state<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState<T>
where
    StandardNormal: Distribution<T>,
{
    assert!(d >= 1, "dimension must be positive");
    loop {
        let v: Vec<Complex<T>> = (0..d).map(|_| complex_normal(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Haar-random unitary: Gram-Schmidt (twice) on a complex Gaussian matrix,
/// which is QR with a positive real R diagonal.
pub fn sample_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix<T>
where
    StandardNormal: Distribution<T>,
{
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex<T>> = (0..d).map(|_| complex_normal(rng)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj = q
                    .iter()
                    .zip(&v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi = *vi - qi * proj;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if n > T::lit(1e-6) {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    ComplexMatrix::from_columns(&cols).expect("square by construction")
}

/// Complete orthonormal basis `{U_1|j_1> ⊗ U_2|j_2> ⊗ ...}` built from one
/// local unitary per party.
#[derive(Clone, Debug)]
pub struct ProductBasis<T: Real = f64> {
    factors: Vec<ComplexMatrix<T>>,
}

impl<T: Real> ProductBasis<T> {
    /// Each factor must be a square unitary (checked to `T::validation_tol()`).
    pub fn new(factors: Vec<ComplexMatrix<T>>) -> Result<Self> {
        for u in &factors {
            if !u.is_square() {
                return Err(Error::DimensionMismatch("local basis matrix not square".into()));
            }
            let dev = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.rows()));
            if dev > T::validation_tol() {
                return Err(Error::NonOrthonormal {
                    deviation: dev.to_f64_lossy(),
                });
            }
        }
        Ok(Self { factors })
    }

    pub fn computational(dims: &[usize]) -> Self {
        Self {
            factors: dims.iter().map(|&d| ComplexMatrix::identity(d)).collect(),
        }
    }

    pub fn factors(&self) -> &[ComplexMatrix<T>] {
        &self.factors
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(ComplexMatrix::rows).collect()
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(ComplexMatrix::rows).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Element with multi-index `idx` (row-major over the parties).
    pub fn element(&self, mut idx: usize) -> PureState<T> {
        let mut parts = vec![0usize; self.factors.len()];
        for (slot, u) in parts.iter_mut().zip(&self.factors).rev() {
            *slot = idx % u.rows();
            idx /= u.rows();
        }
        let mut v = vec![Complex::new(T::one(), T::zero())];
        for (u, &j) in self.factors.iter().zip(&parts) {
            v = kron_vec(&v, &u.column(j));
        }
        PureState::from_unit_vector(v)
    }

    pub fn elements(&self) -> Vec<PureState<T>> {
        (0..self.len()).map(|k| self.element(k)).collect()
    }
}

/// Product basis with independent Haar local unitaries on A and B.
pub fn sample_local_product_basis<T: Real, R: Rng + ?Sized>(da: usize, db: usize, rng: &mut R) -> ProductBasis<T>
where
    StandardNormal: Distribution<T>,
{
    sample_product_basis(&[da, db], rng)
}

/// Product basis with one independent Haar unitary per party.
pub fn sample_product_basis<T: Real, R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> ProductBasis<T>
where
    StandardNormal: Distribution<T>,
{
    ProductBasis {
        factors: dims.iter().map(|&d| sample_unitary(d, rng)).collect(),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::from_usize(n).unwrap();
    let m = n.div_ceil(2);
    for i in 0..m {
        let fi = T::from_usize(i + 1).unwrap();
        let mut x = (T::PI() * (fi - T::lit(0.25)) / (nf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d.is_finite() { d } else { dp };
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kf = T::from_usize(k).unwrap();
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize(n).unwrap();
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

/// Nodes and unit-mass weights for integrating over qubit pure states.
#[derive(Clone, Debug)]
pub struct QuadratureGrid<T: Real = f64> {
    pub n_theta: usize,
    pub n_phi: usize,
    pub nodes: Vec<PureState<T>>,
    pub weights: Vec<T>,
}

pub const DEFAULT_GRID: usize = 64;

/// Gauss-Legendre in `cos(theta)` times the uniform rule in `phi`; node state
/// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`. Weights sum to one.
pub fn bloch_grid<T: Real>(n_theta: usize, n_phi: usize) -> Result<QuadratureGrid<T>> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidArgument(format!(
            "Bloch grid needs at least 2x2 nodes, got {n_theta}x{n_phi}"
        )));
    }
    let (us, ws) = gauss_legendre::<T>(n_theta);
    let nphi = T::from_usize(n_phi).unwrap();
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    let mut weights = Vec::with_capacity(n_theta * n_phi);
    for (&u, &w) in us.iter().zip(&ws) {
        let c = ((T::one() + u) / T::lit(2.0)).max(T::zero()).sqrt();
        let s = ((T::one() - u) / T::lit(2.0)).max(T::zero()).sqrt();
        for j in 0..n_phi {
            let phi = T::lit(2.0) * T::PI() * T::from_usize(j).unwrap() / nphi;
            let amp1 = Complex::from_polar(s, phi);
            nodes.push(PureState::from_unit_vector(vec![Complex::new(c, T::zero()), amp1]));
            weights.push(w / (T::lit(2.0) * nphi));
        }
    }
    Ok(QuadratureGrid {
        n_theta,
        n_phi,
        nodes,
        weights,
    })
}

impl<T: Real> QuadratureGrid<T> {
    /// `∫ f(alpha) dalpha` over the unit-mass Haar measure.
    pub fn integrate(&self, f: impl Fn(&PureState<T>) -> T) -> T {
        self.nodes.iter().zip(&self.weights).map(|(n, &w)| w * f(n)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
