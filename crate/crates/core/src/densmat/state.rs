use num_complex::Complex;

use super::eigen::{eigh_hermitian, Eigh};
use super::matrix::{kron_vec, ComplexMatrix, MAX_DIM};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Normalized ket.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState<T: Real = f64> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Accepts amplitudes whose Euclidean norm is 1 within `T::norm_tol()`.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::DimensionMismatch("empty ket".into()));
        }
        let norm = norm(&amplitudes);
        if !norm.is_finite() || (norm - T::one()).abs() > T::norm_tol() {
            return Err(Error::NotNormalized {
                norm: norm.to_f64_lossy(),
            });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > T::zero()) || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n.to_f64_lossy() });
        }
        for a in &mut amplitudes {
            *a = *a / n;
        }
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_unit_vector(amplitudes: Vec<Complex<T>>) -> Self {
        Self { amplitudes }
    }

    /// Computational basis ket `|k>` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        assert!(k < d, "basis index {k} out of range for dimension {d}");
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); d];
        amplitudes[k] = Complex::new(T::one(), T::zero());
        Self { amplitudes }
    }

    /// Real-amplitude ket from a nonzero vector.
    pub fn from_real(values: &[T]) -> Result<Self> {
        Self::normalized(values.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }

    pub fn projector(&self) -> ComplexMatrix<T> {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }
}

fn norm<T: Real>(v: &[Complex<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Max deviation of the Gram matrix of `vectors` from the identity.
pub fn gram_deviation<T: Real>(vectors: &[PureState<T>]) -> T {
    let mut dev = T::zero();
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate().skip(i) {
            let g = u.inner(v);
            let target = if i == j { T::one() } else { T::zero() };
            dev = dev.max((g - Complex::new(target, T::zero())).norm());
        }
    }
    dev
}

fn check_dims(dims: &[usize], size: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!("invalid party dimensions {dims:?}")));
    }
    let total = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match total {
        Some(t) if t > MAX_DIM => Err(Error::SizeCap(format!("total dimension {t} exceeds {MAX_DIM}"))),
        Some(t) if t == size => Ok(()),
        Some(t) => Err(Error::DimensionMismatch(format!(
            "party dimensions {dims:?} multiply to {t}, matrix is {size}x{size}"
        ))),
        None => Err(Error::SizeCap("party dimensions overflow".into())),
    }
}

/// Trace-one positive semidefinite Hermitian matrix with declared party dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real = f64> {
    dims: Vec<usize>,
    matrix: ComplexMatrix<T>,
}

/// Weight and normalized conditional state of `<alpha|sigma|alpha>`.
#[derive(Clone, Debug)]
pub struct Conditional<T: Real = f64> {
    pub weight: T,
    /// `None` when the weight is below the 1e-14 cutoff.
    pub state: Option<DensityMatrix<T>>,
}

pub const CONDITIONAL_WEIGHT_CUTOFF: f64 = 1e-14;

/// Validates `m` as a density matrix on a space with party dimensions `dims`.
///
/// Small negative eigenvalues (above `-T::validation_tol()`) are clamped to
/// zero and the result renormalized to unit trace.
pub fn validate_density_matrix<T: Real>(m: ComplexMatrix<T>, dims: &[usize]) -> Result<DensityMatrix<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    check_dims(dims, m.rows())?;
    let tol = T::validation_tol();
    let dev = m.hermitian_deviation();
    if dev > tol {
        return Err(Error::NonHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    let trace = m.trace().re;
    if (trace - T::one()).abs() > tol {
        return Err(Error::TraceDeviation {
            trace: trace.to_f64_lossy(),
        });
    }
    let h = m.hermitian_part();
    let eig = eigh_hermitian(&h)?;
    let min = eig.values.last().copied().unwrap_or(T::zero());
    if min < -tol {
        return Err(Error::NegativeEigenvalue {
            value: min.to_f64_lossy(),
        });
    }
    // Eigenvalues within solver rounding of zero are left alone, as is a
    // trace that is one up to rounding, so valid input keeps its exact bits.
    let n = T::from_usize(m.rows()).unwrap();
    let noise = T::epsilon() * T::lit(64.0) * n;
    let matrix = if min < -noise {
        let clamped = eig.apply(|x| x.max(T::zero()));
        let tr = clamped.trace().re;
        clamped.scale(T::one() / tr)
    } else if (trace - T::one()).abs() > noise {
        h.scale(T::one() / trace)
    } else {
        h
    };
    Ok(DensityMatrix {
        dims: dims.to_vec(),
        matrix,
    })
}

impl<T: Real> DensityMatrix<T> {
    /// Skips validation; callers guarantee a Hermitian PSD unit-trace matrix up to rounding.
    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: ComplexMatrix<T>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        Self { dims, matrix }
    }

    pub fn from_pure(state: &PureState<T>, dims: &[usize]) -> Result<Self> {
        check_dims(dims, state.dim())?;
        Ok(Self {
            dims: dims.to_vec(),
            matrix: state.projector(),
        })
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let n = dims.iter().product();
        check_dims(dims, n)?;
        Ok(Self {
            dims: dims.to_vec(),
            matrix: ComplexMatrix::identity(n).scale(T::one() / T::from_usize(n).unwrap()),
        })
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// Eigenvalues (descending, clamped to `[0, 1]`) and orthonormal eigenvectors.
    pub fn eigh(&self) -> Result<Eigh<T>> {
        let mut e = eigh_hermitian(&self.matrix)?;
        for v in &mut e.values {
            *v = v.max(T::zero()).min(T::one());
        }
        Ok(e)
    }

    pub fn purity(&self) -> T {
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<v|rho|v>` (real for Hermitian `rho`).
    #[inline]
    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        self.matrix.expectation_re(v)
    }

    /// Tensor product; party lists are concatenated.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let matrix = self.matrix.kron(&other.matrix)?;
        let dims: Vec<usize> = self.dims.iter().chain(&other.dims).copied().collect();
        check_dims(&dims, matrix.rows())?;
        Ok(Self { dims, matrix })
    }

    /// `U rho U^dagger` for a unitary `U` on the full space.
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.rows() != self.dim() || u.cols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}x{}, state dimension {}",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: self.matrix.conjugate_by(u).hermitian_part(),
        })
    }

    /// Reduced state of party `keep`, tracing out every other party.
    pub fn partial_trace(&self, keep: usize) -> Result<Self> {
        let parties = self.dims.len();
        if keep >= parties {
            return Err(Error::BadPartyIndex { index: keep, parties });
        }
        let dk = self.dims[keep];
        let left: usize = self.dims[..keep].iter().product();
        let right: usize = self.dims[keep + 1..].iter().product();
        let mut out = ComplexMatrix::<T>::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut s = Complex::new(T::zero(), T::zero());
                for l in 0..left {
                    for r in 0..right {
                        s = s + self.matrix[((l * dk + i) * right + r, (l * dk + j) * right + r)];
                    }
                }
                out[(i, j)] = s;
            }
        }
        Ok(Self {
            dims: vec![dk],
            matrix: out,
        })
    }

    /// Exchanges the two parties of a bipartite state.
    pub fn swap_parties(&self) -> Result<Self> {
        let (da, db) = self.bipartite_dims()?;
        let n = da * db;
        let idx = |k: usize| (k % da) * db + k / da;
        let matrix = ComplexMatrix::from_fn(n, n, |i, j| self.matrix[(idx(i), idx(j))]);
        Ok(Self {
            dims: vec![db, da],
            matrix,
        })
    }

    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        match self.dims.as_slice() {
            [a, b] => Ok((*a, *b)),
            other => Err(Error::DimensionMismatch(format!(
                "expected a bipartite state, got party dimensions {other:?}"
            ))),
        }
    }

    /// Splits `<alpha|sigma|alpha>` (an operator on B) into its trace weight
    /// and the normalized conditional state.
    pub fn conditional_operator(&self, alpha: &PureState<T>) -> Result<Conditional<T>> {
        let (da, db) = self.bipartite_dims()?;
        if alpha.dim() != da {
            return Err(Error::DimensionMismatch(format!(
                "conditioning ket has dimension {}, party A has {da}",
                alpha.dim()
            )));
        }
        Ok(self.conditional_unchecked(alpha.amplitudes(), da, db))
    }

    pub(crate) fn conditional_unchecked(&self, alpha: &[Complex<T>], da: usize, db: usize) -> Conditional<T> {
        let mut m = ComplexMatrix::<T>::zeros(db, db);
        for b in 0..db {
            for b2 in 0..db {
                let mut s = Complex::new(T::zero(), T::zero());
                for a in 0..da {
                    let ca = alpha[a].conj();
                    for a2 in 0..da {
                        s = s + ca * self.matrix[(a * db + b, a2 * db + b2)] * alpha[a2];
                    }
                }
                m[(b, b2)] = s;
            }
        }
        let weight = m.trace().re;
        if weight < T::lit(CONDITIONAL_WEIGHT_CUTOFF) {
            return Conditional {
                weight: T::zero(),
                state: None,
            };
        }
        Conditional {
            weight,
            state: Some(Self {
                dims: vec![db],
                matrix: m.hermitian_part().scale(T::one() / weight),
            }),
        }
    }
}
