//! In-place short-time propagation `M ← e^{−iH dt} M`.
//!
//! The exponential is applied as a Taylor series on the target matrix, split into
//! sub-steps so that `‖H dt‖₁ ≤ 1` per sub-step, and truncated once a term drops
//! below 1e-17 relative to the target. This is exact to rounding and avoids an
//! eigendecomposition per collision.

use num_complex::Complex64 as C64;

use super::matrix::{mul_into, CMatrix};

const TERM_CUTOFF: f64 = 1e-17;
const MAX_TERMS: usize = 60;

pub struct Propagator {
    term: CMatrix,
    next: CMatrix,
}

impl Propagator {
    pub fn new(dim: usize) -> Self {
        Self { term: CMatrix::zeros(dim), next: CMatrix::zeros(dim) }
    }

    pub fn apply(&mut self, h: &CMatrix, dt: f64, target: &mut CMatrix) {
        let norm = h.one_norm() * dt.abs();
        let substeps = norm.ceil().max(1.0) as usize;
        let tau = dt / substeps as f64;
        for _ in 0..substeps {
            self.apply_small(h, tau, target);
        }
    }

    fn apply_small(&mut self, h: &CMatrix, tau: f64, target: &mut CMatrix) {
        let scale = target.max_abs().max(f64::MIN_POSITIVE);
        self.term.as_mut_slice().copy_from_slice(target.as_slice());
        for k in 1..=MAX_TERMS {
            mul_into(h, &self.term, &mut self.next);
            let c = C64::new(0.0, -tau / k as f64);
            let mut largest: f64 = 0.0;
            for (t, n) in self.term.as_mut_slice().iter_mut().zip(self.next.as_slice()) {
                *t = n * c;
                largest = largest.max(t.norm());
            }
            for (x, t) in target.as_mut_slice().iter_mut().zip(self.term.as_slice()) {
                *x += t;
            }
            if largest <= TERM_CUTOFF * scale {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_spectral_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (d, dt) in [(2, 0.01), (4, 0.3), (6, 2.5), (3, -1.7)] {
            let h = random::hermitian(d, &mut rng).scaled(3.0);
            let mut u = CMatrix::identity(d);
            Propagator::new(d).apply(h.matrix(), dt, &mut u);
            let exact = h.propagator(dt);
            assert!((&u - &exact).max_abs() < 1e-13, "d={d} dt={dt}");
        }
    }

    #[test]
    fn composes_on_non_identity_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let h = random::hermitian(3, &mut rng);
        let u0 = random::unitary(3, &mut rng);
        let mut u = u0.clone();
        Propagator::new(3).apply(h.matrix(), 0.4, &mut u);
        let expected = h.propagator(0.4).matmul(&u0);
        assert!((&u - &expected).max_abs() < 1e-13);
    }
}
