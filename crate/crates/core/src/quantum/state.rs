//! Validated wrappers: hermitian operators, pure states and density matrices.

use num_complex::Complex64 as C64;

use super::matrix::{norm_sqr, CMatrix};
use super::spectral::{spectral, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::tolerance;

/// A matrix equal to its conjugate transpose within [`tolerance::ALGEBRAIC`].
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > tolerance::ALGEBRAIC * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Projects onto the hermitian part `(M + M†)/2` without checking.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        Self(m.hermitian_part())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim))
    }

    pub fn diag(values: &[f64]) -> Self {
        Self(CMatrix::diag(values))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        spectral(self)
    }

    /// `e^{−iHt}` through the spectral decomposition.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.spectral().map(|lambda| C64::from_polar(1.0, -lambda * t))
    }

    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.0.clone();
        for i in 0..m.dim() {
            m[(i, i)] += c;
        }
        Self(m)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self(&self.0 * c)
    }

    /// `U† H U`
    pub fn conjugated_by_adjoint(&self, u: &CMatrix) -> Self {
        Self::from_hermitian_part(&u.adjoint().matmul(&self.0).matmul(u))
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<C64>);

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("state vector must be non-empty".into()));
        }
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > tolerance::ALGEBRAIC {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self(amplitudes))
    }

    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        amplitudes.iter_mut().for_each(|z| *z /= n);
        Ok(Self(amplitudes))
    }

    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, len: dim });
        }
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[k] = C64::new(1.0, 0.0);
        Ok(Self(v))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn amplitudes(&self) -> &[C64] {
        &self.0
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(CMatrix::projector(&self.0))
    }
}

/// Hermitian, positive semidefinite (to −1e-10), unit trace (to 1e-10).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > tolerance::STRUCTURAL {
            return Err(Error::InvalidDensityMatrix(format!("not hermitian (deviation {defect:e})")));
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > tolerance::STRUCTURAL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let lowest = spectral(&Hermitian(m.clone())).eigenvalues[0];
        if lowest < -tolerance::PSD_SLACK {
            return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {lowest:e}")));
        }
        Ok(Self(m))
    }

    /// Re-hermitizes and rescales to unit trace; no positivity check.
    pub(crate) fn from_matrix_renormalized(m: &CMatrix) -> Self {
        let h = m.hermitian_part();
        let tr = h.trace().re;
        Self(&h * (1.0 / tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(&CMatrix::identity(dim) * (1.0 / dim as f64))
    }

    pub fn from_ket(ket: &[C64]) -> Result<Self> {
        Ok(PureState::new(ket.to_vec())?.projector())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).trace().re
    }

    /// `U ρ U†`
    pub fn evolved(&self, u: &CMatrix) -> Self {
        Self::from_matrix_renormalized(&u.matmul(&self.0).matmul(&u.adjoint()))
    }

    pub fn as_hermitian(&self) -> Hermitian {
        Hermitian(self.0.clone())
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(self.0.kron(&other.0))
    }
}
