//! The external work meter.
//!
//! Everything here is computed from the coupling `H_SC`, the control protocol and
//! the ancilla states leaving each collision. The system's own (relative)
//! Hamiltonian is never formed.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::collision::{collide, collision_unitary, Discretization, JointHamiltonian};
use crate::error::{Error, Result};
use crate::protocol::ControlProtocol;
use crate::quantum::matrix::{inner, norm_sqr, CMatrix};
use crate::quantum::spectral;
use crate::quantum::thermal::trace_product;
use crate::quantum::{DensityMatrix, Hermitian};

/// Squared tangent norms below this count as a stationary protocol.
const STATIONARY: f64 = 1e-30;

/// `H_C^{ρ_S} = Tr_S[(ρ_S ⊗ I) H_SC]`, the control-side Hamiltonian seen through the system.
pub fn control_hamiltonian(h: &JointHamiltonian, rho: &DensityMatrix) -> Result<Hermitian> {
    h.check_system(rho.dim())?;
    let dc = h.dim_control();
    let m = CMatrix::from_fn(dc, |a, b| trace_product(rho.matrix(), h.block(a, b)));
    Ok(Hermitian::from_hermitian_part(&m))
}

/// First-order perturbation of the ancilla: `|ψ_C*⟩ = |ψ_C⟩ + |ψ^⚡⟩ dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct AncillaKick {
    pub psi_lightning: Vec<C64>,
}

/// `|ψ^⚡⟩ = −i H_C^{ρ_S} |ψ_C⟩`. A pure system state enters as its projector.
pub fn ancilla_kick(h: &JointHamiltonian, rho: &DensityMatrix, psi_c: &[C64]) -> Result<AncillaKick> {
    h.check_control(psi_c)?;
    let hc = control_hamiltonian(h, rho)?;
    let v = hc.matrix().apply(psi_c);
    Ok(AncillaKick { psi_lightning: v.into_iter().map(|z| z * C64::new(0.0, -1.0)).collect() })
}

pub fn ancilla_kick_pure(h: &JointHamiltonian, psi_s: &[C64], psi_c: &[C64]) -> Result<AncillaKick> {
    ancilla_kick(h, &DensityMatrix::from_ket(psi_s)?, psi_c)
}

/// `dW = −2 dt Im⟨ψ̇_C|ψ^⚡⟩`
pub fn work_increment(psi_dot: &[C64], kick: &AncillaKick, dt: f64) -> f64 {
    -2.0 * dt * inner(psi_dot, &kick.psi_lightning).im
}

/// `Ω = i(|ψ⟩⟨ψ̇| − |ψ̇⟩⟨ψ|) + ζ I` together with the vectors it is built from.
///
/// `Ω` is stored in the operator form, whose expectation in the post-collision
/// ancilla state is `dW`. Its spectrum on `span{ψ, ψ̇}` is `ζ/2 ± ‖ψ̇‖` (and `ζ`
/// elsewhere); with `⟨ψ̇|ψ⟩ = 0` this is the two-outcome measurement
/// `(|φ₋⟩⟨φ₋| − |φ₊⟩⟨φ₊|)/(2α)` with outcomes `±1/α`.
#[derive(Clone, Debug)]
pub struct WorkObservable {
    pub omega: Hermitian,
    /// `2 Im⟨ψ̇|ψ⟩`
    pub zeta: f64,
    /// `√(⟨ψ|ψ⟩/⟨ψ̇|ψ̇⟩)`; `None` for a stationary protocol, where `Ω = 0`.
    pub alpha: Option<f64>,
    /// `ψ ± iαψ̇` (empty when `alpha` is `None`).
    pub phi_plus: Vec<C64>,
    pub phi_minus: Vec<C64>,
}

pub fn work_observable(psi: &[C64], psi_dot: &[C64]) -> Result<WorkObservable> {
    if psi.len() != psi_dot.len() {
        return Err(Error::DimensionMismatch { expected: psi.len(), found: psi_dot.len() });
    }
    let d = psi.len();
    let n_dot = norm_sqr(psi_dot);
    if n_dot <= STATIONARY {
        return Ok(WorkObservable {
            omega: Hermitian::zeros(d),
            zeta: 0.0,
            alpha: None,
            phi_plus: Vec::new(),
            phi_minus: Vec::new(),
        });
    }
    let zeta = 2.0 * inner(psi_dot, psi).im;
    let alpha = (norm_sqr(psi) / n_dot).sqrt();
    let i = C64::new(0.0, 1.0);
    let m = CMatrix::from_fn(d, |r, c| {
        let v = i * (psi[r] * psi_dot[c].conj() - psi_dot[r] * psi[c].conj());
        if r == c { v + zeta } else { v }
    });
    let phi_plus = psi.iter().zip(psi_dot).map(|(p, q)| p + i * alpha * q).collect();
    let phi_minus = psi.iter().zip(psi_dot).map(|(p, q)| p - i * alpha * q).collect();
    Ok(WorkObservable { omega: Hermitian::from_hermitian_part(&m), zeta, alpha: Some(alpha), phi_plus, phi_minus })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WorkMode {
    /// Exact expectation values `Tr{Ω_i ρ_C,i}`.
    Expectation,
    /// Projective measurements of `Ω_i` on `shots` independently prepared runs.
    Sampled { shots: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotStatistics {
    pub shots: u64,
    /// Sample mean of the total work over runs.
    pub mean_total: f64,
    /// Standard error of `mean_total`.
    pub std_error: f64,
}

#[derive(Clone, Debug)]
pub struct WorkRecord {
    /// Per-collision work, in time order (sampled mode: per-collision shot means).
    pub increments: Vec<f64>,
    pub total: f64,
    pub mode: WorkMode,
    pub shots: Option<ShotStatistics>,
    /// System state after the last collision.
    pub final_state: DensityMatrix,
}

/// Drives `rho0` through `steps` exact collisions and reads the work off each ancilla.
///
/// Ancilla `i` is prepared in `ψ_C(t_i)` and, after colliding, measured with `Ω_i`
/// built from `ψ_C(t_i)` and `ψ̇_C(t_i)`. The system is never measured, so in
/// sampled mode the shot outcomes of different collisions are independent.
pub fn measure_work<P: ControlProtocol + ?Sized>(
    rho0: &DensityMatrix,
    h: &JointHamiltonian,
    protocol: &P,
    steps: usize,
    mode: WorkMode,
) -> Result<WorkRecord> {
    h.check_system(rho0.dim())?;
    let (ds, dc) = (h.dim_system(), h.dim_control());
    if protocol.dim() != dc {
        return Err(Error::DimensionMismatch { expected: dc, found: protocol.dim() });
    }
    if let WorkMode::Sampled { shots: 0, .. } = mode {
        return Err(Error::InvalidParameter("sampled mode needs at least one shot".into()));
    }
    let grid = Discretization::new(protocol.duration(), steps)?;
    let v = collision_unitary(h, grid.dt);
    let mut rng = match mode {
        WorkMode::Sampled { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        WorkMode::Expectation => None,
    };
    let mut rho = rho0.clone();
    let mut increments = Vec::with_capacity(steps);
    let mut variance = 0.0;
    for t in grid.times() {
        let psi = protocol.state_at(t);
        let psi_dot = protocol.derivative_at(t, grid.dt / 10.0);
        let post = collide(&v, &rho, &psi);
        let rho_c = post.partial_trace_first(ds, dc)?;
        rho = DensityMatrix::from_matrix_renormalized(&post.partial_trace_second(ds, dc)?);
        let obs = work_observable(&psi, &psi_dot)?;
        let dw = match (mode, rng.as_mut()) {
            (WorkMode::Sampled { shots, .. }, Some(rng)) if obs.alpha.is_some() => {
                let (mean, var) = sample_outcomes(&obs.omega, &rho_c, shots, rng);
                variance += var;
                mean
            }
            (WorkMode::Sampled { .. }, _) => 0.0,
            (WorkMode::Expectation, _) => trace_product(obs.omega.matrix(), &rho_c).re,
        };
        increments.push(dw);
    }
    let total = increments.iter().sum();
    let shots = match mode {
        WorkMode::Sampled { shots, .. } => {
            Some(ShotStatistics { shots, mean_total: total, std_error: (variance / shots as f64).sqrt() })
        }
        WorkMode::Expectation => None,
    };
    Ok(WorkRecord { increments, total, mode, shots, final_state: rho })
}

/// Shot mean and (unbiased) per-shot variance of a projective `Ω` measurement.
fn sample_outcomes(omega: &Hermitian, rho_c: &CMatrix, shots: u64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let s = spectral(omega);
    let mut remaining = shots;
    let mut left = 1.0;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let last = s.dim() - 1;
    for (k, (lambda, e)) in s.eigenvalues.iter().zip(&s.eigenvectors).enumerate() {
        if remaining == 0 {
            break;
        }
        let p = rho_c.sandwich(e, e).re.max(0.0);
        let count = if k == last || p >= left {
            remaining
        } else {
            Binomial::new(remaining, (p / left).clamp(0.0, 1.0)).expect("valid binomial").sample(rng)
        };
        remaining -= count;
        left -= p;
        sum += count as f64 * lambda;
        sum_sq += count as f64 * lambda * lambda;
    }
    let n = shots as f64;
    let mean = sum / n;
    let var = if shots > 1 { (sum_sq - n * mean * mean).max(0.0) / (n - 1.0) } else { 0.0 };
    (mean, var)
}
