//! Scalar abstraction for the dense linear algebra, entropy and quadrature code.
//!
//! Everything below the ensemble layer is written against [`Real`], so the same
//! code runs in `f32` and `f64`. Tolerances are part of the trait because the
//! double-precision thresholds (1e-10 and friends) are unreachable in `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Hermiticity, trace and PSD-clamp tolerance for density matrices.
    fn validation_tol() -> Self;
    /// Norm tolerance for pure states.
    fn norm_tol() -> Self;
    /// Off-diagonal Frobenius norm at which Jacobi sweeps stop.
    fn jacobi_tol() -> Self;

    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn validation_tol() -> Self {
        1e-10
    }
    fn norm_tol() -> Self {
        1e-12
    }
    fn jacobi_tol() -> Self {
        1e-13
    }
}

impl Real for f32 {
    fn validation_tol() -> Self {
        1e-5
    }
    fn norm_tol() -> Self {
        1e-5
    }
    fn jacobi_tol() -> Self {
        1e-6
    }
}

/// `x log2 x` with the continuous extension `0 log 0 = 0`.
#[inline]
pub fn xlog2x<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x * x.log2()
    }
}
