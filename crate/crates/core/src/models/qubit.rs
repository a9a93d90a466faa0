//! Qubit system, qubit control.
//!
//! Two couplings drive the same endpoint spectra:
//! `H¹ = σ_x⊗|0⟩⟨0| − ½σ_y⊗|1⟩⟨1|` depends on θ only, while
//! `H² = 2(σ₊⊗σ₋ + σ₋⊗σ₊)` gives `H_S = sinθ (cosφ σ_x + sinφ σ_y)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::collision::{effective_unitary, relative_hamiltonian, JointHamiltonian};
use crate::error::{Error, Result};
use crate::fluctuation::{modified_je, OnePointResult};
use crate::protocol::{ControlProtocol, LinearAngles, QubitControl};
use crate::quantum::{pauli, Hermitian};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QubitCoupling {
    /// `σ_x⊗|0⟩⟨0| − ½σ_y⊗|1⟩⟨1|`, driven θ: 0 → π.
    BlockDiagonal,
    /// `2(σ₊⊗σ₋ + σ₋⊗σ₊)`, driven θ: π/2 → π/6 and φ: 0 → π/2.
    Exchange,
}

impl QubitCoupling {
    pub fn from_variant(variant: u8) -> Result<Self> {
        match variant {
            1 => Ok(Self::BlockDiagonal),
            2 => Ok(Self::Exchange),
            v => Err(Error::InvalidParameter(format!("qubit variant must be 1 or 2, got {v}"))),
        }
    }

    pub fn variant(self) -> u8 {
        match self {
            Self::BlockDiagonal => 1,
            Self::Exchange => 2,
        }
    }

    pub fn joint(self) -> JointHamiltonian {
        let m = match self {
            Self::BlockDiagonal => &pauli::x().kron(&pauli::proj0()) - &(&pauli::y().kron(&pauli::proj1()) * 0.5),
            Self::Exchange => &(&pauli::plus().kron(&pauli::minus()) + &pauli::minus().kron(&pauli::plus())) * 2.0,
        };
        JointHamiltonian::new(Hermitian::new(m).expect("hermitian coupling"), 2, 2).expect("qubit dims")
    }

    /// The linear protocol used with this coupling.
    pub fn protocol(self, duration: f64) -> QubitControl<LinearAngles> {
        let (theta, phi) = match self {
            Self::BlockDiagonal => ((0.0, PI), (0.0, 0.0)),
            Self::Exchange => ((PI / 2.0, PI / 6.0), (0.0, PI / 2.0)),
        };
        QubitControl(LinearAngles { theta, phi, duration })
    }
}

/// `ΔF = −(1/β) ln[cosh(β/2)/cosh β]` for the endpoint spectra `±1 → ±½`.
pub fn qubit_delta_f(beta: f64) -> f64 {
    -((0.5 * beta).cosh() / beta.cosh()).ln() / beta
}

#[derive(Clone, Debug)]
pub struct QubitExample {
    pub coupling: QubitCoupling,
    pub duration: f64,
    pub h_a: Hermitian,
    pub h_b: Hermitian,
    pub result: OnePointResult,
}

/// Runs the one-point scheme for a qubit variant through the Zeno-limit unitary.
pub fn qubit_example(coupling: QubitCoupling, duration: f64, steps: usize, beta: f64) -> Result<QubitExample> {
    let joint = coupling.joint();
    let protocol = coupling.protocol(duration);
    let h_a = relative_hamiltonian(&joint, &protocol.state_at(0.0))?;
    let h_b = relative_hamiltonian(&joint, &protocol.state_at(duration))?;
    let u = effective_unitary(&joint, &protocol, steps)?;
    let result = modified_je(&h_a, &h_b, &u, beta)?;
    Ok(QubitExample { coupling, duration, h_a, h_b, result })
}
