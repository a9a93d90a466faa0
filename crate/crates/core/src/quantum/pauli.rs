//! Single-qubit operators in the computational basis `{|0⟩, |1⟩}`.
//!
//! `σ₊ = |1⟩⟨0|` and `σ₋ = |0⟩⟨1|`. With this choice the exchange coupling
//! `2(σ₊⊗σ₋ + σ₋⊗σ₊)` and the oscillator coupling `g(a⊗σ₊ + a†⊗σ₋)` produce
//! relative Hamiltonians with the phase `e^{iφ}` on the raising part.

use num_complex::Complex64 as C64;

use super::matrix::CMatrix;

fn m(entries: [[C64; 2]; 2]) -> CMatrix {
    CMatrix::from_fn(2, |i, j| entries[i][j])
}

const O: C64 = C64::new(0.0, 0.0);
const I1: C64 = C64::new(1.0, 0.0);
const IM: C64 = C64::new(0.0, 1.0);

pub fn x() -> CMatrix {
    m([[O, I1], [I1, O]])
}

pub fn y() -> CMatrix {
    m([[O, -IM], [IM, O]])
}

pub fn z() -> CMatrix {
    m([[I1, O], [O, -I1]])
}

pub fn plus() -> CMatrix {
    m([[O, O], [I1, O]])
}

pub fn minus() -> CMatrix {
    m([[O, I1], [O, O]])
}

pub fn hadamard() -> CMatrix {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    m([[s, s], [s, -s]])
}

pub fn ket0() -> Vec<C64> {
    vec![I1, O]
}

pub fn ket1() -> Vec<C64> {
    vec![O, I1]
}

/// `|0⟩⟨0|`
pub fn proj0() -> CMatrix {
    CMatrix::projector(&ket0())
}

/// `|1⟩⟨1|`
pub fn proj1() -> CMatrix {
    CMatrix::projector(&ket1())
}
