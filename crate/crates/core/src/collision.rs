//! Collision model: relative Hamiltonians, single collisions and the Zeno-limit unitary.
//!
//! Joint operators act on `S ⊗ C` (system first); index `(i, a)` maps to `i·dim_C + a`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::protocol::ControlProtocol;
use crate::quantum::matrix::{mul_into, CMatrix};
use crate::quantum::propagate::Propagator;
use crate::quantum::{DensityMatrix, Hermitian};

/// A system–control coupling `H_SC` on `dim_s · dim_c` levels.
#[derive(Clone, Debug)]
pub struct JointHamiltonian {
    h: Hermitian,
    dim_s: usize,
    dim_c: usize,
    /// `B_ab = ⟨a|H_SC|b⟩` (system operators), indexed `a·dim_c + b`.
    blocks: Vec<CMatrix>,
}

impl JointHamiltonian {
    pub fn new(h: Hermitian, dim_s: usize, dim_c: usize) -> Result<Self> {
        if dim_s == 0 || dim_c == 0 || h.dim() != dim_s * dim_c {
            return Err(Error::DimensionMismatch { expected: dim_s * dim_c, found: h.dim() });
        }
        let m = h.matrix();
        let blocks = (0..dim_c * dim_c)
            .map(|ab| {
                let (a, b) = (ab / dim_c, ab % dim_c);
                CMatrix::from_fn(dim_s, |i, j| m[(i * dim_c + a, j * dim_c + b)])
            })
            .collect();
        Ok(Self { h, dim_s, dim_c, blocks })
    }

    pub fn hamiltonian(&self) -> &Hermitian {
        &self.h
    }

    pub fn dim_system(&self) -> usize {
        self.dim_s
    }

    pub fn dim_control(&self) -> usize {
        self.dim_c
    }

    pub(crate) fn check_control(&self, psi_c: &[C64]) -> Result<()> {
        if psi_c.len() != self.dim_c {
            return Err(Error::DimensionMismatch { expected: self.dim_c, found: psi_c.len() });
        }
        Ok(())
    }

    pub(crate) fn check_system(&self, dim: usize) -> Result<()> {
        if dim != self.dim_s {
            return Err(Error::DimensionMismatch { expected: self.dim_s, found: dim });
        }
        Ok(())
    }

    /// The system operator `⟨a|H_SC|b⟩` for control basis states `a`, `b`.
    pub(crate) fn block(&self, a: usize, b: usize) -> &CMatrix {
        &self.blocks[a * self.dim_c + b]
    }

    /// `⟨u|H_SC|v⟩` over the control factor, written into `out`.
    pub(crate) fn partial_element_into(&self, u: &[C64], v: &[C64], out: &mut CMatrix) {
        out.as_mut_slice().fill(C64::new(0.0, 0.0));
        for a in 0..self.dim_c {
            for b in 0..self.dim_c {
                let w = u[a].conj() * v[b];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for (o, x) in out.as_mut_slice().iter_mut().zip(self.blocks[a * self.dim_c + b].as_slice()) {
                    *o += w * x;
                }
            }
        }
    }
}

/// Relative Hamiltonian `H_S^{ψ_C} = ⟨ψ_C|H_SC|ψ_C⟩`.
pub fn relative_hamiltonian(h: &JointHamiltonian, psi_c: &[C64]) -> Result<Hermitian> {
    h.check_control(psi_c)?;
    let mut out = CMatrix::zeros(h.dim_s);
    h.partial_element_into(psi_c, psi_c, &mut out);
    Ok(Hermitian::from_hermitian_part(&out))
}

/// `e^{−iH_SC dt}` for one collision.
pub fn collision_unitary(h: &JointHamiltonian, dt: f64) -> CMatrix {
    h.h.propagator(dt)
}

/// Post-collision joint state `V (ρ_S ⊗ |ψ_C⟩⟨ψ_C|) V†`.
pub fn collide(v: &CMatrix, rho: &DensityMatrix, psi_c: &[C64]) -> CMatrix {
    let joint = rho.matrix().kron(&CMatrix::projector(psi_c));
    v.matmul(&joint).matmul(&v.adjoint())
}

fn check_inputs(rho: &DensityMatrix, h: &JointHamiltonian, psi_c: &[C64], dt: f64) -> Result<()> {
    h.check_system(rho.dim())?;
    h.check_control(psi_c)?;
    if !(dt >= 0.0) {
        return Err(Error::InvalidParameter(format!("collision time must be non-negative, got {dt}")));
    }
    Ok(())
}

/// `ρ' = Tr_C{ e^{−iH_SC dt} (ρ ⊗ |ψ_C⟩⟨ψ_C|) e^{iH_SC dt} }`
pub fn collision_step_exact(
    rho: &DensityMatrix,
    h: &JointHamiltonian,
    psi_c: &[C64],
    dt: f64,
) -> Result<DensityMatrix> {
    check_inputs(rho, h, psi_c, dt)?;
    let post = collide(&collision_unitary(h, dt), rho, psi_c);
    let reduced = post.partial_trace_second(h.dim_s, h.dim_c)?;
    Ok(DensityMatrix::from_matrix_renormalized(&reduced))
}

/// `ρ' = ρ − i dt [H_S^{ψ_C}, ρ]`, re-hermitized and trace-renormalized.
pub fn collision_step_first_order(
    rho: &DensityMatrix,
    h: &JointHamiltonian,
    psi_c: &[C64],
    dt: f64,
) -> Result<DensityMatrix> {
    check_inputs(rho, h, psi_c, dt)?;
    let hs = relative_hamiltonian(h, psi_c)?;
    Ok(first_order_update(rho, &hs, dt))
}

fn first_order_update(rho: &DensityMatrix, hs: &Hermitian, dt: f64) -> DensityMatrix {
    let comm = hs.matrix().commutator(rho.matrix());
    let next = rho.matrix() - &(&comm * C64::new(0.0, dt));
    DensityMatrix::from_matrix_renormalized(&next)
}

/// `N` collisions of length `Δt = T/N`, sampled at interval midpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Discretization {
    pub steps: usize,
    pub dt: f64,
}

impl Discretization {
    pub fn new(duration: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidParameter("number of collisions must be at least 1".into()));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!("protocol duration must be positive, got {duration}")));
        }
        Ok(Self { steps, dt: duration / steps as f64 })
    }

    /// `t_i = (i + ½) Δt`
    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|i| self.time(i))
    }
}

/// `U = Π_i e^{−i H_S^{ψ_C(t_i)} Δt}`, time-ordered (latest collision leftmost).
pub fn effective_unitary<P: ControlProtocol + ?Sized>(
    h: &JointHamiltonian,
    protocol: &P,
    steps: usize,
) -> Result<CMatrix> {
    if protocol.dim() != h.dim_c {
        return Err(Error::DimensionMismatch { expected: h.dim_c, found: protocol.dim() });
    }
    let grid = Discretization::new(protocol.duration(), steps)?;
    let mut u = CMatrix::identity(h.dim_s);
    let mut hs = CMatrix::zeros(h.dim_s);
    let mut prop = Propagator::new(h.dim_s);
    for t in grid.times() {
        let psi = protocol.state_at(t);
        h.partial_element_into(&psi, &psi, &mut hs);
        prop.apply(&hs, grid.dt, &mut u);
    }
    Ok(u)
}

/// How a single collision is applied to the system state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StepMode {
    /// The full joint unitary followed by the partial trace over the ancilla.
    Exact,
    /// `ρ − iΔt[H_S^{ψ_C}, ρ]`.
    #[default]
    FirstOrder,
    /// `e^{−iH_S^{ψ_C}Δt} ρ e^{iH_S^{ψ_C}Δt}`: the Zeno-limit dynamics per collision.
    Unitary,
}

#[derive(Clone, Debug)]
pub struct Evolution {
    pub final_state: DensityMatrix,
    /// States after each collision, when requested.
    pub trajectory: Option<Vec<DensityMatrix>>,
}

pub fn evolve<P: ControlProtocol + ?Sized>(
    rho0: &DensityMatrix,
    h: &JointHamiltonian,
    protocol: &P,
    steps: usize,
    mode: StepMode,
    record: bool,
) -> Result<Evolution> {
    h.check_system(rho0.dim())?;
    if protocol.dim() != h.dim_c {
        return Err(Error::DimensionMismatch { expected: h.dim_c, found: protocol.dim() });
    }
    let grid = Discretization::new(protocol.duration(), steps)?;
    let joint_v = matches!(mode, StepMode::Exact).then(|| collision_unitary(h, grid.dt));
    let mut rho = rho0.clone();
    let mut trajectory = record.then(|| Vec::with_capacity(steps));
    let mut hs = CMatrix::zeros(h.dim_s);
    let mut prop = Propagator::new(h.dim_s);
    let mut scratch = CMatrix::zeros(h.dim_s);
    for t in grid.times() {
        let psi = protocol.state_at(t);
        rho = match mode {
            StepMode::Exact => {
                let post = collide(joint_v.as_ref().expect("joint unitary"), &rho, &psi);
                DensityMatrix::from_matrix_renormalized(&post.partial_trace_second(h.dim_s, h.dim_c)?)
            }
            StepMode::FirstOrder => {
                h.partial_element_into(&psi, &psi, &mut hs);
                first_order_update(&rho, &Hermitian::from_hermitian_part(&hs), grid.dt)
            }
            StepMode::Unitary => {
                h.partial_element_into(&psi, &psi, &mut hs);
                let mut u = CMatrix::identity(h.dim_s);
                prop.apply(&hs, grid.dt, &mut u);
                mul_into(&u, rho.matrix(), &mut scratch);
                DensityMatrix::from_matrix_renormalized(&scratch.matmul(&u.adjoint()))
            }
        };
        if let Some(tr) = trajectory.as_mut() {
            tr.push(rho.clone());
        }
    }
    Ok(Evolution { final_state: rho, trajectory })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{ConstantProtocol, LinearAngles, QubitControl};
    use crate::quantum::{pauli, random, spectral, PureState};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn block_diagonal_coupling() -> JointHamiltonian {
        let m = &pauli::x().kron(&pauli::proj0()) - &(&pauli::y().kron(&pauli::proj1()) * 0.5);
        JointHamiltonian::new(Hermitian::new(m).unwrap(), 2, 2).unwrap()
    }

    fn exchange_coupling() -> JointHamiltonian {
        let m = &(&pauli::plus().kron(&pauli::minus()) + &pauli::minus().kron(&pauli::plus())) * 2.0;
        JointHamiltonian::new(Hermitian::new(m).unwrap(), 2, 2).unwrap()
    }

    fn random_joint(ds: usize, dc: usize, rng: &mut ChaCha8Rng) -> JointHamiltonian {
        JointHamiltonian::new(random::hermitian(ds * dc, rng), ds, dc).unwrap()
    }

    #[test]
    fn relative_hamiltonian_of_block_diagonal_coupling() {
        let h = block_diagonal_coupling();
        let at0 = relative_hamiltonian(&h, &pauli::ket0()).unwrap();
        assert!((at0.matrix() - &pauli::x()).max_abs() < 1e-15);
        let at1 = relative_hamiltonian(&h, &pauli::ket1()).unwrap();
        assert!((at1.matrix() - &(&pauli::y() * -0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn relative_hamiltonian_of_exchange_coupling() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let hs = relative_hamiltonian(&exchange_coupling(), &[c(r), c(r)]).unwrap();
        assert!((hs.matrix() - &pauli::x()).max_abs() < 1e-15);
    }

    #[test]
    fn relative_hamiltonian_rejects_wrong_control_dim() {
        assert!(relative_hamiltonian(&exchange_coupling(), &[c(1.0)]).is_err());
    }

    #[test]
    fn zero_time_collision_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let h = random_joint(3, 2, &mut rng);
        let rho = random::density_matrix(3, &mut rng);
        let psi = random::pure_state(2, &mut rng);
        for step in [collision_step_exact, collision_step_first_order] {
            let out = step(&rho, &h, psi.amplitudes(), 0.0).unwrap();
            assert!((out.matrix() - rho.matrix()).max_abs() < 1e-14);
        }
    }

    #[test]
    fn exact_step_rotates_plus_state() {
        let m = pauli::z().kron(&pauli::proj0());
        let h = JointHamiltonian::new(Hermitian::new(m).unwrap(), 2, 2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DensityMatrix::from_ket(&[c(r), c(r)]).unwrap();
        let out = collision_step_exact(&rho, &h, &pauli::ket0(), 0.01).unwrap();
        let sx = crate::quantum::expectation(&Hermitian::new(pauli::x()).unwrap(), &out).unwrap();
        // 4×4 exponential oracle: the ancilla is an eigenstate, so the rotation is exact
        assert!((sx - 0.02f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn commuting_product_coupling_leaves_thermal_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let hs = random::hermitian(3, &mut rng);
        let psi = random::pure_state(2, &mut rng);
        let m = hs.matrix().kron(&CMatrix::projector(psi.amplitudes()));
        let h = JointHamiltonian::new(Hermitian::new(m).unwrap(), 3, 2).unwrap();
        let rho = crate::quantum::thermal_state(&hs, 1.0);
        let out = collision_step_exact(&rho, &h, psi.amplitudes(), 0.05).unwrap();
        assert!((out.matrix() - rho.matrix()).max_abs() < 1e-12);
        let fo = collision_step_first_order(&rho, &h, psi.amplitudes(), 0.05).unwrap();
        assert!((fo.matrix() - rho.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn exact_step_is_cptp() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let h = random_joint(3, 2, &mut rng);
            let rho = random::density_matrix(3, &mut rng);
            let psi = random::pure_state(2, &mut rng);
            let v = collision_unitary(&h, 0.3);
            let post = collide(&v, &rho, psi.amplitudes());
            let reduced = post.partial_trace_second(3, 2).unwrap();
            assert!((reduced.trace().re - 1.0).abs() < 1e-12);
            assert!(spectral(&Hermitian::from_hermitian_part(&reduced)).min() > -1e-10);
        }
    }

    #[test]
    fn first_order_defect_is_quadratic_in_dt() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let h = random_joint(2, 2, &mut rng);
            let rho = random::density_matrix(2, &mut rng);
            let psi = random::pure_state(2, &mut rng);
            let defect = |dt: f64| {
                let a = collision_step_exact(&rho, &h, psi.amplitudes(), dt).unwrap();
                let b = collision_step_first_order(&rho, &h, psi.amplitudes(), dt).unwrap();
                (a.matrix() - b.matrix()).frobenius_norm()
            };
            let ratio = defect(2e-3) / defect(1e-3);
            assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
        }
    }

    #[test]
    fn constant_protocol_gives_single_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let h = random_joint(3, 2, &mut rng);
        let psi = random::pure_state(2, &mut rng);
        let p = ConstantProtocol { state: psi.amplitudes().to_vec(), duration: 2.5 };
        let u = effective_unitary(&h, &p, 100).unwrap();
        let exact = relative_hamiltonian(&h, psi.amplitudes()).unwrap().propagator(2.5);
        assert!((&u - &exact).max_abs() < 1e-12);
    }

    #[test]
    fn effective_unitary_converges_under_refinement() {
        let h = exchange_coupling();
        let p = QubitControl(LinearAngles { theta: (PI / 2.0, PI / 6.0), phi: (0.0, PI / 2.0), duration: 3.0 });
        let reference = effective_unitary(&h, &p, 20_000).unwrap();
        let errors: Vec<f64> = [50, 100, 200]
            .iter()
            .map(|&n| (&effective_unitary(&h, &p, n).unwrap() - &reference).max_abs())
            .collect();
        for (n, e) in [50usize, 100, 200].iter().zip(&errors) {
            assert!(*e <= 10.0 / *n as f64, "N={n} err={e}");
        }
        assert!(errors[2] < errors[1] && errors[1] < errors[0]);
        assert!(reference.unitarity_defect() < 1e-9);
    }

    #[test]
    fn slow_driving_follows_the_ground_state() {
        let h = block_diagonal_coupling();
        let p = QubitControl(LinearAngles { theta: (0.0, PI), phi: (0.0, 0.0), duration: 50.0 });
        let u = effective_unitary(&h, &p, 40_000).unwrap();
        let ga = spectral(&relative_hamiltonian(&h, &pauli::ket0()).unwrap()).eigenvectors[0].clone();
        let gb = spectral(&relative_hamiltonian(&h, &pauli::ket1()).unwrap()).eigenvectors[0].clone();
        let overlap = crate::quantum::matrix::inner(&gb, &u.apply(&ga)).norm_sqr();
        assert!(overlap >= 0.999, "overlap {overlap}");
    }

    #[test]
    fn unitary_mode_matches_effective_unitary() {
        let h = block_diagonal_coupling();
        let p = QubitControl(LinearAngles { theta: (0.0, PI), phi: (0.0, 0.0), duration: 50.0 });
        let rho0 = crate::quantum::thermal_state(&relative_hamiltonian(&h, &pauli::ket0()).unwrap(), 1.0);
        let u = effective_unitary(&h, &p, 40_000).unwrap();
        let evolved = evolve(&rho0, &h, &p, 40_000, StepMode::Unitary, false).unwrap();
        assert!((evolved.final_state.matrix() - rho0.evolved(&u).matrix()).max_abs() < 1e-6);
    }

    #[test]
    fn collision_modes_converge_to_the_zeno_limit() {
        let h = exchange_coupling();
        let p = QubitControl(LinearAngles { theta: (PI / 2.0, PI / 6.0), phi: (0.0, PI / 2.0), duration: 2.0 });
        let rho0 = DensityMatrix::from_ket(&pauli::ket0()).unwrap();
        let target = |n| rho0.evolved(&effective_unitary(&h, &p, n).unwrap());
        for mode in [StepMode::Exact, StepMode::FirstOrder] {
            let err = |n: usize| {
                let e = evolve(&rho0, &h, &p, n, mode, false).unwrap();
                (e.final_state.matrix() - target(n).matrix()).frobenius_norm()
            };
            let (e1, e2) = (err(2_000), err(4_000));
            assert!((e1 / e2 - 2.0).abs() < 0.3, "{mode:?}: {e1} vs {e2}");
        }
    }

    #[test]
    fn first_order_mode_purity_drifts_at_order_dt() {
        let h = exchange_coupling();
        let p = QubitControl(LinearAngles { theta: (PI / 2.0, PI / 6.0), phi: (0.0, PI / 2.0), duration: 2.0 });
        let rho0 = DensityMatrix::from_ket(&PureState::basis(2, 0).unwrap().amplitudes().to_vec()).unwrap();
        let drift = |n| (evolve(&rho0, &h, &p, n, StepMode::FirstOrder, false).unwrap().final_state.purity() - 1.0).abs();
        let (d1, d2) = (drift(1_000), drift(2_000));
        assert!(d1 < 1e-2 && (d1 / d2 - 2.0).abs() < 0.2, "{d1} {d2}");
    }

    #[test]
    fn evolve_records_trajectory() {
        let h = exchange_coupling();
        let p = ConstantProtocol { state: pauli::ket0(), duration: 1.0 };
        let rho0 = DensityMatrix::maximally_mixed(2);
        let e = evolve(&rho0, &h, &p, 7, StepMode::default(), true).unwrap();
        assert_eq!(e.trajectory.unwrap().len(), 7);
        assert!(evolve(&rho0, &h, &p, 0, StepMode::Exact, false).is_err());
    }
}
