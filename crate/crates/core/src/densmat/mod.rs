//! Dense complex linear algebra on small Hilbert spaces.

mod eigen;
mod matrix;
mod state;

pub use eigen::{eigh_hermitian, Eigh, MAX_SWEEPS};
pub use matrix::{kron_vec, ComplexMatrix, MAX_DIM};
pub use state::{
    gram_deviation, validate_density_matrix, Conditional, DensityMatrix, PureState, CONDITIONAL_WEIGHT_CUTOFF,
};

#[cfg(test)]
mod tests;
