//! Cyclic complex Jacobi eigensolver for small Hermitian matrices.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `A = V diag(values) V^dagger`, eigenvalues descending,
/// eigenvectors in the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigh<T: Real = f64> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigh<T> {
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d = ComplexMatrix::diag(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }

    /// Applies `f` to the spectrum: `V f(Λ) V^dagger`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let mapped: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        let d = ComplexMatrix::diag(&mapped);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Only the Hermitian part of `m` is used. Stops once the off-diagonal
/// Frobenius norm falls below `T::jacobi_tol()` (relative to the matrix norm
/// when that exceeds one).
pub fn eigh_hermitian<T: Real>(m: &ComplexMatrix<T>) -> Result<Eigh<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let threshold = T::jacobi_tol() * a.frobenius_norm().max(T::one());
    let zero = Complex::new(T::zero(), T::zero());

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off < threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off.to_f64_lossy(),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == T::zero() {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (r + r);
                let t = if theta == T::zero() {
                    T::one()
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let e = phase.conj();
                let j_pp = Complex::new(c, T::zero());
                let j_pq = Complex::new(s, T::zero());
                let j_qp = e * (-s);
                let j_qq = e * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * j_pp + akq * j_qp;
                    a[(k, q)] = akp * j_pq + akq * j_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
                    a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
                }
                a[(p, q)] = zero;
                a[(q, p)] = zero;
                a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
                a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * j_pp + vkq * j_qp;
                    v[(k, q)] = vkp * j_pq + vkq * j_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            Complex::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        (&g + &g.adjoint()).scale(0.5)
    }

    #[test]
    fn reconstructs_random_hermitian() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (5, 4), (8, 5), (16, 6)] {
            let m = random_hermitian(n, seed);
            let e = eigh_hermitian(&m).unwrap();
            assert!(e.reconstruct().max_abs_diff(&m) < 1e-10, "n = {n}");
            let vv = &e.vectors.adjoint() * &e.vectors;
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let m = ComplexMatrix::<f64>::diag(&[0.1, 0.5, 0.0, 0.4]);
        let e = eigh_hermitian(&m).unwrap();
        assert_eq!(e.values, vec![0.5, 0.4, 0.1, 0.0]);
    }

    #[test]
    fn works_in_single_precision() {
        let m = random_hermitian(4, 9).map(|x| x as f32);
        let e = eigh_hermitian(&m).unwrap();
        assert!(e.reconstruct().max_abs_diff(&m) < 1e-4);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(eigh_hermitian(&ComplexMatrix::<f64>::zeros(2, 3)).is_err());
    }
}
