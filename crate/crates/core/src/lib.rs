//! # locinfo
//!
//! Bounds on the information two separated receivers can extract from a
//! bipartite quantum ensemble using local operations and classical
//! communication (LOCC).
//!
//! - Upper bounds: Holevo `χ` and the LOCC bound `χ_L`.
//! - Lower bounds: the single-receiver subentropy bound `Λ` and the local
//!   bound `Λ_L`, the average mutual information over complete orthogonal
//!   product measurements, evaluated by Bloch-sphere quadrature (qubit A) or
//!   Monte Carlo with common random numbers.
//! - Scrooge ensembles, whose product-basis mutual information is constant and
//!   saturates `Λ_L`.
//! - An upper bound on the singlet yield of distillation protocols that
//!   distinguish strings of states locally.
//!
//! Independent brute-force oracles (random product-basis averages, two-step
//! LOCC optimization, global basis search) live in [`oracle`].
//!
//! The linear algebra, entropy and quadrature layers are generic over
//! [`Real`] (`f32` or `f64`); the ensemble and bound layers work in `f64`.
//! Concrete aliases are exported at the crate root.

#![forbid(unsafe_code)]

pub mod acceptance;
pub mod bounds;
pub mod densmat;
pub mod ensembles;
pub mod entropy;
mod error;
pub mod haar;
pub mod montecarlo;
pub mod oracle;
pub mod pipeline;
pub mod scalar;
pub mod scrooge;

pub use error::{Error, Result};
pub use scalar::Real;

pub use densmat::{ComplexMatrix, DensityMatrix, PureState};
pub use ensembles::{Ensemble, PureDecomposition};
pub use haar::RngSeed;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
pub type Matrix64 = ComplexMatrix<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type Density64 = DensityMatrix<f64>;
pub type Density32 = DensityMatrix<f32>;
pub type Ket64 = PureState<f64>;
pub type Ket32 = PureState<f32>;
pub type Spectrum64 = entropy::Spectrum<f64>;
pub type Spectrum32 = entropy::Spectrum<f32>;
pub type Grid64 = haar::QuadratureGrid<f64>;
pub type Grid32 = haar::QuadratureGrid<f32>;

/// Crate version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
