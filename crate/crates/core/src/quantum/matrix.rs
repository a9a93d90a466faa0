//! Dense complex square matrices, stored row-major.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    /// Builds a matrix from `dim²` row-major entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = C64::new(v, 0.0);
        }
        m
    }

    /// `|ket⟩⟨bra|`
    pub fn outer(ket: &[C64], bra: &[C64]) -> Result<Self> {
        if ket.len() != bra.len() {
            return Err(Error::DimensionMismatch { expected: ket.len(), found: bra.len() });
        }
        let d = ket.len();
        Ok(Self::from_fn(d, |i, j| ket[i] * bra[j].conj()))
    }

    pub fn projector(ket: &[C64]) -> Self {
        let d = ket.len();
        Self::from_fn(d, |i, j| ket[i] * ket[j].conj())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |i, j| self.data[j * d + i].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * c).collect() }
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |i, j| 0.5 * (self.data[i * d + j] + self.data[j * d + i].conj()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (max column sum); an upper bound on the spectral norm for hermitian input.
    pub fn one_norm(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .map(|j| (0..d).map(|i| self.data[i * d + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    /// `‖M†M − I‖_max`
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        (&p - &Self::identity(self.dim)).max_abs()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.dim);
        mul_into(self, rhs, &mut out);
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨u|M|v⟩`
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let mv = self.apply(v);
        inner(u, &mv)
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let d = da * db;
        let mut out = Self::zeros(d);
        for i in 0..da {
            for j in 0..da {
                let a = self.data[i * da + j];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        out.data[(i * db + k) * d + j * db + l] = a * rhs.data[k * db + l];
                    }
                }
            }
        }
        out
    }

    /// Traces out the second tensor factor of a `dim_a·dim_b` matrix.
    pub fn partial_trace_second(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        self.check_split(dim_a, dim_b)?;
        let d = self.dim;
        Ok(Self::from_fn(dim_a, |i, j| {
            (0..dim_b).map(|k| self.data[(i * dim_b + k) * d + j * dim_b + k]).sum()
        }))
    }

    /// Traces out the first tensor factor of a `dim_a·dim_b` matrix.
    pub fn partial_trace_first(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        self.check_split(dim_a, dim_b)?;
        let d = self.dim;
        Ok(Self::from_fn(dim_b, |k, l| {
            (0..dim_a).map(|i| self.data[(i * dim_b + k) * d + i * dim_b + l]).sum()
        }))
    }

    fn check_split(&self, dim_a: usize, dim_b: usize) -> Result<()> {
        if dim_a * dim_b != self.dim || dim_a == 0 {
            return Err(Error::DimensionMismatch { expected: dim_a * dim_b, found: self.dim });
        }
        Ok(())
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        let d = self.dim;
        nalgebra::DMatrix::from_fn(d, d, |i, j| self.data[i * d + j])
    }
}

/// `out ← a·b`, skipping zero entries of `a` (cheap for sparse generators).
pub fn mul_into(a: &CMatrix, b: &CMatrix, out: &mut CMatrix) {
    let d = a.dim;
    debug_assert_eq!(b.dim, d);
    debug_assert_eq!(out.dim, d);
    out.data.fill(ZERO);
    for i in 0..d {
        let out_row = &mut out.data[i * d..(i + 1) * d];
        for k in 0..d {
            let aik = a.data[i * d + k];
            if aik == ZERO {
                continue;
            }
            let b_row = &b.data[k * d..(k + 1) * d];
            for (o, &bkj) in out_row.iter_mut().zip(b_row) {
                *o += aik * bkj;
            }
        }
    }
}

/// `⟨u|v⟩`
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&CMatrix> for CMatrix {
    fn sub_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

impl Mul<f64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: f64) -> CMatrix {
        self.scaled(C64::new(rhs, 0.0))
    }
}

impl Mul<f64> for CMatrix {
    type Output = CMatrix;
    fn mul(mut self, rhs: f64) -> CMatrix {
        self.data.iter_mut().for_each(|z| *z *= rhs);
        self
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(mut self, rhs: CMatrix) -> CMatrix {
        self += &rhs;
        self
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(mut self, rhs: CMatrix) -> CMatrix {
        self -= &rhs;
        self
    }
}

impl Mul<C64> for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: C64) -> CMatrix {
        self.scaled(rhs)
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scaled(C64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
