//! Numerical tolerances shared by every module.

/// Structural checks: unit trace, positivity, spectral reconstruction.
pub const STRUCTURAL: f64 = 1e-10;

/// Algebraic identities that hold to rounding: hermiticity, normalization, commutators.
pub const ALGEBRAIC: f64 = 1e-12;

/// Eigenvalues below this are clamped before taking logarithms.
pub const LOG_CLAMP: f64 = 1e-14;

/// Positivity slack for density matrices.
pub const PSD_SLACK: f64 = 1e-10;

/// Largest accepted `‖U†U − I‖_max` for externally supplied unitaries.
pub const UNITARITY: f64 = 1e-9;
