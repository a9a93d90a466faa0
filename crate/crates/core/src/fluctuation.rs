//! Fluctuation theorems: the two-point-measurement Jarzynski identity and the
//! operational one-point scheme with its entropic correction.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::matrix::CMatrix;
use crate::quantum::thermal::{gibbs_weights, log_partition_from_energies, trace_product};
use crate::quantum::{relative_entropy, spectral, thermal_state, DensityMatrix, Hermitian};
use crate::tolerance;

/// Eigenvalues closer than this share a Lüders projector.
const DEGENERACY: f64 = 1e-9;

fn check_pair(h_a: &Hermitian, h_b: &Hermitian, u: &CMatrix) -> Result<()> {
    if h_b.dim() != h_a.dim() {
        return Err(Error::DimensionMismatch { expected: h_a.dim(), found: h_b.dim() });
    }
    if u.dim() != h_a.dim() {
        return Err(Error::DimensionMismatch { expected: h_a.dim(), found: u.dim() });
    }
    let defect = u.unitarity_defect();
    if defect > tolerance::UNITARITY {
        return Err(Error::NotUnitary(defect));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

/// Joint statistics of the two energy measurements, over distinct eigenvalues.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TPMDistribution {
    pub energies_a: Vec<f64>,
    pub energies_b: Vec<f64>,
    /// `p[a][b]`
    pub probabilities: Vec<Vec<f64>>,
    /// `W[a][b] = E_b − E_a`
    pub works: Vec<Vec<f64>>,
}

impl TPMDistribution {
    pub fn total_probability(&self) -> f64 {
        self.probabilities.iter().flatten().sum()
    }

    pub fn marginal_a(&self) -> Vec<f64> {
        self.probabilities.iter().map(|row| row.iter().sum()).collect()
    }
}

/// `p(a,b) = Tr{P_b U P_a ρ_A P_a U†}` with `ρ_A` thermal and Lüders projectors onto eigenspaces.
pub fn tpm_distribution(h_a: &Hermitian, h_b: &Hermitian, u: &CMatrix, beta: f64) -> Result<TPMDistribution> {
    tpm_distribution_mixture(h_a, h_b, &[(1.0, u.clone())], beta)
}

/// TPM statistics for the unital channel `ρ ↦ Σ_k w_k U_k ρ U_k†` (weights summing to one).
pub fn tpm_distribution_mixture(
    h_a: &Hermitian,
    h_b: &Hermitian,
    channel: &[(f64, CMatrix)],
    beta: f64,
) -> Result<TPMDistribution> {
    if channel.is_empty() {
        return Err(Error::InvalidParameter("channel needs at least one unitary".into()));
    }
    for (w, u) in channel {
        check_pair(h_a, h_b, u)?;
        if !(*w >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative channel weight {w}")));
        }
    }
    let wsum: f64 = channel.iter().map(|(w, _)| w).sum();
    if (wsum - 1.0).abs() > tolerance::ALGEBRAIC {
        return Err(Error::InvalidParameter(format!("channel weights sum to {wsum}")));
    }
    let sa = spectral(h_a);
    let sb = spectral(h_b);
    let spaces_a = sa.eigenspaces(DEGENERACY);
    let spaces_b = sb.eigenspaces(DEGENERACY);
    let gibbs = gibbs_weights(&sa.eigenvalues, beta);
    let proj_b: Vec<CMatrix> = spaces_b.iter().map(|(_, m)| sb.projector(m)).collect();
    let mut probabilities = Vec::with_capacity(spaces_a.len());
    for (_, members) in &spaces_a {
        // P_a ρ_A P_a = (e^{−βE_a}/Z_A) P_a for a thermal ρ_A
        let weight: f64 = members.iter().map(|&k| gibbs[k]).sum::<f64>() / members.len() as f64;
        let pa = sa.projector(members);
        let mut moved = CMatrix::zeros(h_a.dim());
        for (w, u) in channel {
            moved += &(&u.matmul(&pa).matmul(&u.adjoint()) * *w);
        }
        probabilities.push(proj_b.iter().map(|pb| weight * trace_product(pb, &moved).re.max(0.0)).collect());
    }
    let energies_a: Vec<f64> = spaces_a.iter().map(|(e, _)| *e).collect();
    let energies_b: Vec<f64> = spaces_b.iter().map(|(e, _)| *e).collect();
    let works = energies_a.iter().map(|ea| energies_b.iter().map(|eb| eb - ea).collect()).collect();
    Ok(TPMDistribution { energies_a, energies_b, probabilities, works })
}

/// `⟨e^{−βW}⟩ = Σ p(a,b) e^{−βW(a,b)}`
pub fn jarzynski_average(dist: &TPMDistribution, beta: f64) -> f64 {
    dist.probabilities
        .iter()
        .zip(&dist.works)
        .flat_map(|(p, w)| p.iter().zip(w))
        .map(|(p, w)| p * (-beta * w).exp())
        .sum()
}

/// `Z_B/Z_A`, the value the TPM average must reproduce.
pub fn partition_ratio(h_a: &Hermitian, h_b: &Hermitian, beta: f64) -> f64 {
    let la = log_partition_from_energies(&spectral(h_a).eigenvalues, beta);
    let lb = log_partition_from_energies(&spectral(h_b).eigenvalues, beta);
    (lb - la).exp()
}

/// `⟨W_a⟩ = ⟨a|U†H_B U|a⟩ − E_a` for the `a`-th eigenvector (ascending) of `H_A`.
pub fn one_point_work(h_a: &Hermitian, h_b: &Hermitian, u: &CMatrix, a_index: usize) -> Result<f64> {
    check_pair(h_a, h_b, u)?;
    let sa = spectral(h_a);
    if a_index >= sa.dim() {
        return Err(Error::IndexOutOfRange { index: a_index, len: sa.dim() });
    }
    let moved = u.apply(&sa.eigenvectors[a_index]);
    Ok(h_b.matrix().sandwich(&moved, &moved).re - sa.eigenvalues[a_index])
}

/// Final energies `⟨a|U†H_B U|a⟩` and the evolved eigenvectors `U|a⟩`.
fn evolved_eigenbasis(h_a: &Hermitian, h_b: &Hermitian, u: &CMatrix) -> (Vec<f64>, Vec<f64>, Vec<Vec<C64>>) {
    let sa = spectral(h_a);
    let moved: Vec<Vec<C64>> = sa.eigenvectors.iter().map(|v| u.apply(v)).collect();
    let finals = moved.iter().map(|m| h_b.matrix().sandwich(m, m).re).collect();
    (sa.eigenvalues, finals, moved)
}

/// `ρ̃_T = Σ_a e^{−β⟨a|U†H_BU|a⟩} U|a⟩⟨a|U† / Z̃_T`
pub fn best_guess_state(h_a: &Hermitian, h_b: &Hermitian, u: &CMatrix, beta: f64) -> Result<DensityMatrix> {
    check_pair(h_a, h_b, u)?;
    let (_, finals, moved) = evolved_eigenbasis(h_a, h_b, u);
    Ok(guess_from(&finals, &moved, beta))
}

fn guess_from(finals: &[f64], moved: &[Vec<C64>], beta: f64) -> DensityMatrix {
    let q = gibbs_weights(finals, beta);
    let mut m = CMatrix::zeros(moved[0].len());
    for (w, v) in q.iter().zip(moved) {
        m += &(&CMatrix::projector(v) * *w);
    }
    DensityMatrix::from_matrix_renormalized(&m)
}

/// Everything the one-point scheme yields for one protocol.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OnePointResult {
    /// Eigenvalues `E_a` of `H_A`, ascending.
    pub energies: Vec<f64>,
    /// `p_a = e^{−βE_a}/Z_A`
    pub probabilities: Vec<f64>,
    /// `⟨W_a⟩`
    pub works: Vec<f64>,
    /// `−(1/β) ln Σ_a p_a e^{−β⟨W_a⟩}`
    pub delta_f_tilde: f64,
    /// `−(1/β) ln(Z_B/Z_A)`
    pub delta_f: f64,
    /// `S(ρ̃_T ‖ ρ_T^th)`
    pub relative_entropy: f64,
    /// `⟨W⟩ = Σ_a p_a ⟨W_a⟩`
    pub avg_work: f64,
}

impl OnePointResult {
    /// `|Σ_a p_a e^{−β⟨W_a⟩} − e^{−βΔF} e^{−S}|`
    pub fn identity_residual(&self, beta: f64) -> f64 {
        let lhs = (-beta * self.delta_f_tilde).exp();
        let rhs = (-beta * self.delta_f).exp() * (-self.relative_entropy).exp();
        (lhs - rhs).abs()
    }

    /// Checks `ΔF ≤ ΔF̃ ≤ ⟨W⟩` up to `tol`.
    pub fn check_bound_chain(&self, tol: f64) -> Result<()> {
        if self.delta_f > self.delta_f_tilde + tol || self.delta_f_tilde > self.avg_work + tol {
            return Err(Error::BoundViolation(format!(
                "ΔF = {}, ΔF̃ = {}, ⟨W⟩ = {}",
                self.delta_f, self.delta_f_tilde, self.avg_work
            )));
        }
        Ok(())
    }
}

/// `ΔF̃` from initial energies and externally measured conditional works.
pub fn delta_f_tilde_from_works(energies: &[f64], works: &[f64], beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if energies.len() != works.len() {
        return Err(Error::DimensionMismatch { expected: energies.len(), found: works.len() });
    }
    let finals: Vec<f64> = energies.iter().zip(works).map(|(e, w)| e + w).collect();
    let ln_lhs = log_partition_from_energies(&finals, beta) - log_partition_from_energies(energies, beta);
    Ok(-ln_lhs / beta)
}

pub fn modified_je(h_a: &Hermitian, h_b: &Hermitian, u: &CMatrix, beta: f64) -> Result<OnePointResult> {
    check_beta(beta)?;
    check_pair(h_a, h_b, u)?;
    let (energies, finals, moved) = evolved_eigenbasis(h_a, h_b, u);
    let works: Vec<f64> = finals.iter().zip(&energies).map(|(f, e)| f - e).collect();
    let probabilities = gibbs_weights(&energies, beta);
    let ln_za = log_partition_from_energies(&energies, beta);
    let ln_zb = log_partition_from_energies(&spectral(h_b).eigenvalues, beta);
    let ln_z_guess = log_partition_from_energies(&finals, beta);
    let guess = guess_from(&finals, &moved, beta);
    let s = relative_entropy(&guess, &thermal_state(h_b, beta))?;
    let avg_work = probabilities.iter().zip(&works).map(|(p, w)| p * w).sum();
    Ok(OnePointResult {
        energies,
        probabilities,
        works,
        delta_f_tilde: -(ln_z_guess - ln_za) / beta,
        delta_f: -(ln_zb - ln_za) / beta,
        relative_entropy: s,
        avg_work,
    })
}
