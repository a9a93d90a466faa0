//! Worked examples: a qubit driven through two different couplings, and a
//! displaced harmonic oscillator with a closed-form solution.

pub mod oscillator;
pub mod quadrature;
pub mod qubit;
pub mod scan;

pub use oscillator::{DrivingProtocol, FockSpace, OscillatorParams};
pub use qubit::{QubitCoupling, QubitExample};
pub use scan::{figure1_scan, log_grid, ScanRow, ScanTarget};
