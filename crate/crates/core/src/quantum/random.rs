//! Random operators and states for sampling studies and property tests.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::CMatrix;
use super::state::{DensityMatrix, Hermitian, PureState};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// i.i.d. complex-Gaussian matrix, symmetrized to `(G + G†)/2`.
pub fn hermitian(dim: usize, rng: &mut impl Rng) -> Hermitian {
    let g = CMatrix::from_fn(dim, |_, _| gaussian(rng));
    Hermitian::from_hermitian_part(&g)
}

/// Gram–Schmidt orthonormalization of a complex-Gaussian matrix (Haar distributed).
pub fn unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= overlap * y;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    CMatrix::from_fn(dim, |i, j| cols[j][i])
}

pub fn pure_state(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// `G G† / Tr(G G†)` for a complex-Gaussian `G` (full rank almost surely).
pub fn density_matrix(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = CMatrix::from_fn(dim, |_, _| gaussian(rng));
    DensityMatrix::from_matrix_renormalized(&g.matmul(&g.adjoint()))
}

/// A random tangent vector at `psi`: `Re⟨ψ|ψ̇⟩ = 0`, as for any norm-preserving path.
pub fn tangent(psi: &[C64], rng: &mut impl Rng) -> Vec<C64> {
    let mut v: Vec<C64> = psi.iter().map(|_| gaussian(rng)).collect();
    let overlap: C64 = psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    for (x, p) in v.iter_mut().zip(psi) {
        *x -= overlap.re * p;
    }
    v
}
