//! Gibbs states, partition functions, free energies, relative entropy, expectations.

use num_complex::Complex64 as C64;

use super::matrix::CMatrix;
use super::spectral::spectral;
use super::state::{DensityMatrix, Hermitian, PureState};
use crate::error::{Error, Result};
use crate::tolerance;

/// `e^{−βH}/Z`
pub fn thermal_state(h: &Hermitian, beta: f64) -> DensityMatrix {
    let s = spectral(h);
    let e0 = s.min();
    let z: f64 = s.eigenvalues.iter().map(|&e| (-beta * (e - e0)).exp()).sum();
    let m = s.map(|e| C64::new((-beta * (e - e0)).exp() / z, 0.0));
    DensityMatrix::from_matrix_renormalized(&m)
}

/// Normalized Boltzmann weights `e^{−βE_k}/Z`, evaluated with a shifted exponent.
pub fn gibbs_weights(energies: &[f64], beta: f64) -> Vec<f64> {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// `ln Σ_k e^{−βE_k}`
pub fn log_partition_from_energies(energies: &[f64], beta: f64) -> f64 {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    -beta * e0 + energies.iter().map(|&e| (-beta * (e - e0)).exp()).sum::<f64>().ln()
}

pub fn partition_function(h: &Hermitian, beta: f64) -> f64 {
    log_partition_from_energies(&spectral(h).eigenvalues, beta).exp()
}

/// `F = −ln Z / β`
pub fn free_energy(h: &Hermitian, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(-log_partition_from_energies(&spectral(h).eigenvalues, beta) / beta)
}

/// `ΔF = F_B − F_A = −(1/β) ln(Z_B/Z_A)`
pub fn free_energy_difference(h_a: &Hermitian, h_b: &Hermitian, beta: f64) -> Result<f64> {
    Ok(free_energy(h_b, beta)? - free_energy(h_a, beta)?)
}

/// Quantum relative entropy `S(ρ‖σ) = Tr[ρ(ln ρ − ln σ)]`.
///
/// Eigenvalues of `ρ` below [`tolerance::LOG_CLAMP`] are clamped, which leaves
/// `0·ln 0 = 0` up to ~1e-13. A `σ` with an eigenvalue below the clamp is rejected.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.dim(), found: rho.dim() });
    }
    let sr = spectral(&rho.as_hermitian());
    let ss = spectral(&sigma.as_hermitian());
    if ss.min() < tolerance::LOG_CLAMP {
        return Err(Error::IllConditioned(ss.min()));
    }
    let rho_log_rho: f64 = sr
        .eigenvalues
        .iter()
        .map(|&l| {
            let l = l.max(tolerance::LOG_CLAMP);
            l * l.ln()
        })
        .sum();
    let log_sigma = ss.map(|l| C64::new(l.ln(), 0.0));
    let cross = rho.matrix().matmul(&log_sigma).trace().re;
    Ok(rho_log_rho - cross)
}

/// `Tr{A ρ}`
pub fn expectation(a: &Hermitian, rho: &DensityMatrix) -> Result<f64> {
    if a.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: rho.dim() });
    }
    Ok(trace_product(a.matrix(), rho.matrix()).re)
}

/// `⟨ψ|A|ψ⟩`
pub fn expectation_pure(a: &Hermitian, psi: &PureState) -> Result<f64> {
    if a.dim() != psi.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: psi.dim() });
    }
    Ok(a.matrix().sandwich(psi.amplitudes(), psi.amplitudes()).re)
}

/// `Tr{A B}` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let d = a.dim();
    let (a, b) = (a.as_slice(), b.as_slice());
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for k in 0..d {
            acc += a[i * d + k] * b[k * d + i];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{pauli, random};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn herm(m: CMatrix) -> Hermitian {
        Hermitian::new(m).unwrap()
    }

    #[test]
    fn infinite_temperature_is_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random::hermitian(3, &mut rng);
        let rho = thermal_state(&h, 0.0);
        assert!((rho.matrix() - DensityMatrix::maximally_mixed(3).matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn thermal_sigma_z_at_unit_beta() {
        let rho = thermal_state(&herm(pauli::z()), 1.0);
        // direct evaluation: diag(e^{-1}, e^{1}) / (2 cosh 1)
        let z = 2.0 * 1f64.cosh();
        assert!((rho.matrix()[(0, 0)].re - (-1f64).exp() / z).abs() < 1e-14);
        assert!((rho.matrix()[(1, 1)].re - 1f64.exp() / z).abs() < 1e-14);
        assert!((rho.matrix()[(0, 0)].re - 0.11920).abs() < 1e-5);
        assert!((rho.matrix()[(1, 1)].re - 0.88080).abs() < 1e-5);
    }

    #[test]
    fn thermal_state_commutes_with_hamiltonian() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 2..=6 {
            let h = random::hermitian(d, &mut rng);
            let rho = thermal_state(&h, 0.7);
            assert!(rho.matrix().commutator(h.matrix()).max_abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_z_partition_function_and_free_energy() {
        let h = herm(pauli::z());
        assert!((partition_function(&h, 1.0) - 3.08616).abs() < 1e-5);
        assert!((free_energy(&h, 1.0).unwrap() - (-(2.0 * 1f64.cosh()).ln())).abs() < 1e-14);
        assert!((free_energy(&h, 1.0).unwrap() + 1.12693).abs() < 1e-5);
    }

    #[test]
    fn zero_operator_free_energy() {
        let h = Hermitian::zeros(4);
        assert!((partition_function(&h, 2.0) - 4.0).abs() < 1e-14);
        assert!((free_energy(&h, 2.0).unwrap() + 4f64.ln() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn free_energy_gauge_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random::hermitian(3, &mut rng);
        let f0 = free_energy(&h, 1.3).unwrap();
        let f1 = free_energy(&h.shifted(0.75), 1.3).unwrap();
        assert!((f1 - f0 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn free_energy_rejects_non_positive_beta() {
        let h = herm(pauli::z());
        assert_eq!(free_energy(&h, 0.0), Err(Error::InvalidBeta(0.0)));
        assert_eq!(free_energy(&h, -1.0), Err(Error::InvalidBeta(-1.0)));
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityMatrix::new(CMatrix::diag(&[0.2, 0.8])).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);

        let pure = DensityMatrix::from_ket(&pauli::ket0()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((relative_entropy(&pure, &mixed).unwrap() - 2f64.ln()).abs() < 1e-12);

        let expected = 0.2 * 0.4f64.ln() + 0.8 * 1.6f64.ln();
        let s = relative_entropy(&rho, &mixed).unwrap();
        assert!((s - expected).abs() < 1e-12);
        assert!((s - 0.19274).abs() < 1e-5);
    }

    #[test]
    fn relative_entropy_flags_singular_reference() {
        let pure = DensityMatrix::from_ket(&pauli::ket0()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(matches!(relative_entropy(&mixed, &pure), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn expectation_examples() {
        let z = herm(pauli::z());
        let psi = PureState::new(pauli::ket0()).unwrap();
        assert!((expectation_pure(&z, &psi).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&herm(pauli::x()), &DensityMatrix::maximally_mixed(2)).unwrap().abs() < 1e-15);
        assert!(expectation(&z, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn expectation_matches_spectral_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for d in 2..=5 {
            let h = random::hermitian(d, &mut rng);
            let rho = random::density_matrix(d, &mut rng);
            let s = spectral(&h);
            let oracle: f64 = s
                .eigenvalues
                .iter()
                .zip(&s.eigenvectors)
                .map(|(l, v)| l * rho.matrix().sandwich(v, v).re)
                .sum();
            assert!((expectation(&h, &rho).unwrap() - oracle).abs() < 1e-12);
        }
    }
}
