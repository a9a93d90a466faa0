//! Finite-dimensional quantum linear algebra.

pub mod matrix;
pub mod pauli;
pub mod propagate;
pub mod random;
pub mod spectral;
pub mod state;
pub mod thermal;

pub use matrix::CMatrix;
pub use spectral::{matrix_exp_hermitian_generator, spectral, SpectralDecomposition};
pub use state::{DensityMatrix, Hermitian, PureState};
pub use thermal::{
    expectation, expectation_pure, free_energy, free_energy_difference, partition_function,
    relative_entropy, thermal_state,
};
