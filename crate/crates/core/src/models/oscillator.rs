//! Harmonic oscillator displaced by a complex force, controlled by a qubit.
//!
//! `H_SC = ω(a†a + ½)⊗I + g(a⊗σ₊ + a†⊗σ₋)` has the relative Hamiltonian
//! `ω(a†a + ½) + f a† + f* a` with `f = (g/2) sinθ e^{iφ}`. The evolution is a
//! displacement by `p(t) = −i e^{−iωt} ∫₀ᵗ e^{iωs} f(s) ds`, and the work from any
//! number state is `ω|p(T)|² + 2Re[f*(T) p(T)]`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::quadrature::{integrate, integrate_real};
use crate::collision::{effective_unitary, relative_hamiltonian, JointHamiltonian};
use crate::error::{Error, Result};
use crate::protocol::{AngleSchedule, Angles, ControlProtocol, QubitControl};
use crate::quantum::{pauli, CMatrix, Hermitian};

/// Absolute tolerance of the force integrals.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Population allowed in the top tenth of the Fock levels.
pub const LEAK_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_LEVELS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub omega: f64,
    pub g: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self { omega: 1.0, g: 1.0 }
    }
}

/// Number states `|0⟩ … |D−1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    pub levels: usize,
}

impl FockSpace {
    pub fn new(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 Fock levels, got {levels}")));
        }
        Ok(Self { levels })
    }

    pub fn annihilation(&self) -> CMatrix {
        CMatrix::from_fn(self.levels, |i, j| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn creation(&self) -> CMatrix {
        self.annihilation().adjoint()
    }

    pub fn number(&self) -> CMatrix {
        CMatrix::diag(&(0..self.levels).map(|n| n as f64).collect::<Vec<_>>())
    }

    /// The coupling `ω(a†a + ½)⊗I + g(a⊗σ₊ + a†⊗σ₋)`.
    pub fn coupling(&self, params: OscillatorParams) -> JointHamiltonian {
        let d = self.levels;
        let h0 = CMatrix::from_fn(d, |i, j| if i == j { C64::new(params.omega * (i as f64 + 0.5), 0.0) } else { C64::new(0.0, 0.0) });
        let a = self.annihilation();
        let m = &(&h0.kron(&CMatrix::identity(2)) + &(&a.kron(&pauli::plus()) * params.g))
            + &(&self.creation().kron(&pauli::minus()) * params.g);
        JointHamiltonian::new(Hermitian::new(m).expect("hermitian coupling"), d, 2).expect("oscillator dims")
    }
}

/// The four forcing shapes (θ, φ):
/// 1: (πt/2T, 0), 2: (πt/2T, πt/2T), 3: (arcsin t/T, 0), 4: (arcsin t/T, 2πt/T).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DrivingProtocol {
    pub kind: u8,
    pub duration: f64,
}

impl DrivingProtocol {
    pub fn new(kind: u8, duration: f64) -> Result<Self> {
        if !(1..=4).contains(&kind) {
            return Err(Error::InvalidParameter(format!("oscillator protocol must be 1–4, got {kind}")));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!("protocol duration must be positive, got {duration}")));
        }
        Ok(Self { kind, duration })
    }

    /// `f(t) = (g/2) sinθ(t) e^{iφ(t)}`
    pub fn force(&self, t: f64, g: f64) -> C64 {
        let s = (t / self.duration).clamp(0.0, 1.0);
        let sin_theta = match self.kind {
            1 | 2 => (0.5 * PI * s).sin(),
            _ => s,
        };
        C64::from_polar(0.5 * g * sin_theta, self.angles(t).phi)
    }
}

impl AngleSchedule for DrivingProtocol {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn angles(&self, t: f64) -> Angles {
        let tt = self.duration;
        let s = (t / tt).clamp(0.0, 1.0);
        let (theta, theta_dot) = match self.kind {
            1 | 2 => (0.5 * PI * s, 0.5 * PI / tt),
            // θ̇ diverges at t = T; collisions only sample interior midpoints
            _ => (s.asin(), 1.0 / (tt * (1.0 - s * s).max(f64::MIN_POSITIVE).sqrt())),
        };
        let (phi, phi_dot) = match self.kind {
            2 => (0.5 * PI * s, 0.5 * PI / tt),
            4 => (2.0 * PI * s, 2.0 * PI / tt),
            _ => (0.0, 0.0),
        };
        Angles { theta, theta_dot, phi, phi_dot }
    }
}

fn check_force_origin(protocol: &DrivingProtocol, g: f64) -> Result<()> {
    let f0 = protocol.force(0.0, g).norm();
    if f0 > 1e-14 {
        return Err(Error::InvalidParameter(format!("force must vanish at t = 0, |f(0)| = {f0}")));
    }
    Ok(())
}

/// `p(t) = −i e^{−iωt} ∫₀ᵗ e^{iωs} f(s) ds`
pub fn oscillator_p_at(protocol: &DrivingProtocol, t: f64, params: OscillatorParams) -> Result<C64> {
    check_force_origin(protocol, params.g)?;
    let w = params.omega;
    let integral = integrate(|s| C64::from_polar(1.0, w * s) * protocol.force(s, params.g), 0.0, t, QUADRATURE_TOL);
    Ok(C64::new(0.0, -1.0) * C64::from_polar(1.0, -w * t) * integral)
}

pub fn oscillator_p(protocol: &DrivingProtocol, params: OscillatorParams) -> Result<C64> {
    oscillator_p_at(protocol, protocol.duration, params)
}

/// `⟨W_n⟩ = ω|p(T)|² + 2Re[f*(T) p(T)]`, the same for every initial number state.
pub fn oscillator_work_analytic(protocol: &DrivingProtocol, params: OscillatorParams) -> Result<f64> {
    let p = oscillator_p(protocol, params)?;
    let f = protocol.force(protocol.duration, params.g);
    Ok(params.omega * p.norm_sqr() + 2.0 * (f.conj() * p).re)
}

/// `ΔF = (|f(0)|² − |f(T)|²)/ω`
pub fn oscillator_delta_f(protocol: &DrivingProtocol, params: OscillatorParams) -> f64 {
    let (f0, ft) = (protocol.force(0.0, params.g), protocol.force(protocol.duration, params.g));
    (f0.norm_sqr() - ft.norm_sqr()) / params.omega
}

/// `χ(t) = −∫₀ᵗ Re[p(s) f*(s)] ds` (nested quadrature); only a global phase of `U(t)`.
pub fn oscillator_chi(protocol: &DrivingProtocol, t: f64, params: OscillatorParams) -> Result<f64> {
    check_force_origin(protocol, params.g)?;
    Ok(-integrate_real(
        |s| {
            let p = oscillator_p_at(protocol, s, params).expect("checked");
            (p * protocol.force(s, params.g).conj()).re
        },
        0.0,
        t,
        QUADRATURE_TOL,
    ))
}

/// Fock truncation and discretization for [`oscillator_numeric`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericSettings {
    pub steps: usize,
    pub levels: usize,
    pub params: OscillatorParams,
}

impl Default for NumericSettings {
    fn default() -> Self {
        Self { steps: 10_000, levels: DEFAULT_LEVELS, params: OscillatorParams::default() }
    }
}

/// Work from the number state `|n0⟩` via the effective unitary on the truncated space.
pub fn oscillator_numeric(protocol: &DrivingProtocol, n0: usize, settings: NumericSettings) -> Result<f64> {
    Ok(oscillator_numeric_many(protocol, &[n0], settings)?[0])
}

/// As [`oscillator_numeric`] for several initial number states sharing one unitary.
pub fn oscillator_numeric_many(protocol: &DrivingProtocol, n0: &[usize], settings: NumericSettings) -> Result<Vec<f64>> {
    let fock = FockSpace::new(settings.levels)?;
    let d = fock.levels;
    let joint = fock.coupling(settings.params);
    let control = QubitControl(*protocol);
    let h_a = relative_hamiltonian(&joint, &control.state_at(0.0))?;
    let h_b = relative_hamiltonian(&joint, &control.state_at(protocol.duration))?;
    let u = effective_unitary(&joint, &control, settings.steps)?;
    let top = d - d.div_ceil(10);
    n0.iter()
        .map(|&n| {
            if n >= d {
                return Err(Error::IndexOutOfRange { index: n, len: d });
            }
            let column: Vec<C64> = (0..d).map(|i| u[(i, n)]).collect();
            let leak: f64 = column[top..].iter().map(|z| z.norm_sqr()).sum();
            if leak > LEAK_THRESHOLD {
                return Err(Error::TruncationLeak { population: leak, levels: d });
            }
            Ok(h_b.matrix().sandwich(&column, &column).re - h_a.matrix()[(n, n)].re)
        })
        .collect()
}
