//! Hermitian eigendecomposition and functions of hermitian operators.

use num_complex::Complex64 as C64;

use super::matrix::CMatrix;
use super::state::Hermitian;

/// Eigenvalues in ascending order with their orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<C64>>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Σ_k f(λ_k) |k⟩⟨k|`
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(*lambda);
            for i in 0..d {
                let wi = w * v[i];
                for j in 0..d {
                    out[(i, j)] += wi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| C64::new(l, 0.0))
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    /// Groups eigenvalues closer than `tol` into eigenspaces; returns (mean level, member indices).
    pub fn eigenspaces(&self, tol: f64) -> Vec<(f64, Vec<usize>)> {
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            match groups.last_mut() {
                Some((_, members)) if (lambda - self.eigenvalues[members[0]]).abs() <= tol => {
                    members.push(k)
                }
                _ => groups.push((lambda, vec![k])),
            }
        }
        for (level, members) in groups.iter_mut() {
            *level = members.iter().map(|&k| self.eigenvalues[k]).sum::<f64>() / members.len() as f64;
        }
        groups
    }

    /// Projector onto the span of the listed eigenvectors.
    pub fn projector(&self, members: &[usize]) -> CMatrix {
        let d = self.dim();
        let mut out = CMatrix::zeros(d);
        for &k in members {
            out += &CMatrix::projector(&self.eigenvectors[k]);
        }
        out
    }
}

pub fn spectral(h: &Hermitian) -> SpectralDecomposition {
    let d = h.dim();
    let eig = h.matrix().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k);
            // Fix the global phase so the largest component is real and positive.
            let pivot = col.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
            let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
            col.iter().map(|z| z * phase).collect()
        })
        .collect();
    SpectralDecomposition { eigenvalues, eigenvectors }
}

/// `e^{−iHt}` computed exactly through the spectral decomposition.
pub fn matrix_exp_hermitian_generator(h: &Hermitian, t: f64) -> CMatrix {
    h.propagator(t)
}
