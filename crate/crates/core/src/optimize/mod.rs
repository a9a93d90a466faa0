//! Variational free-energy estimation: minimize ΔF̃ over spline-shaped control
//! protocols for random couplings with a qubit control.

pub mod spline;
pub mod study;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{effective_unitary, relative_hamiltonian, JointHamiltonian};
use crate::error::{Error, Result};
use crate::fluctuation::{modified_je, OnePointResult};
use crate::protocol::{qubit_state, QubitControl};
use crate::quantum::{random, spectral, CMatrix, Hermitian};

pub use spline::{NaturalSpline, SplineProtocol};
pub use study::{run_study, DimAggregate, SampleResult, StudyConfig, StudyResult};

/// How sampled coupling spectra are normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumSampling {
    /// Affine map of the spectrum onto exactly `[−1, 1]`.
    #[default]
    Rescaled,
    /// Divide by the largest |eigenvalue|: bounded by `[−1, 1]`, spread in `(1, 2]`.
    Bounded,
}

/// A Gaussian random coupling on `dim_s ⊗ qubit`, normalized per `sampling`.
pub fn sample_random_hamiltonian(dim_s: usize, rng: &mut impl Rng, sampling: SpectrumSampling) -> Result<JointHamiltonian> {
    if !(2..=6).contains(&dim_s) {
        return Err(Error::InvalidParameter(format!("system dimension must be in 2..=6, got {dim_s}")));
    }
    let h = random::hermitian(2 * dim_s, rng);
    let s = spectral(&h);
    let (lo, hi) = (s.min(), s.max());
    let m = match sampling {
        SpectrumSampling::Rescaled => {
            let scale = 2.0 / (hi - lo);
            s.map(|e| ((e - lo) * scale - 1.0).into())
        }
        SpectrumSampling::Bounded => {
            let scale = 1.0 / hi.abs().max(lo.abs());
            s.map(|e| (e * scale).into())
        }
    };
    JointHamiltonian::new(Hermitian::from_hermitian_part(&m), dim_s, 2)
}

/// `λ_max − λ_min` of the coupling.
pub fn spectral_spread(h: &JointHamiltonian) -> f64 {
    let s = spectral(h.hamiltonian());
    s.max() - s.min()
}

/// ΔF̃ of spline protocols for one coupling; the endpoint Hamiltonians are fixed by
/// θ(0) = 0, θ(T) = π/2, φ = 0 and computed once.
pub struct Objective<'a> {
    pub joint: &'a JointHamiltonian,
    pub h_a: Hermitian,
    pub h_b: Hermitian,
    pub beta: f64,
    pub steps: usize,
}

impl<'a> Objective<'a> {
    pub fn new(joint: &'a JointHamiltonian, beta: f64, steps: usize) -> Result<Self> {
        if joint.dim_control() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: joint.dim_control() });
        }
        let h_a = relative_hamiltonian(joint, &qubit_state(spline::THETA_START, 0.0))?;
        let h_b = relative_hamiltonian(joint, &qubit_state(spline::THETA_END, 0.0))?;
        Ok(Self { joint, h_a, h_b, beta, steps })
    }

    pub fn with_steps(&self, steps: usize) -> Objective<'a> {
        Objective { joint: self.joint, h_a: self.h_a.clone(), h_b: self.h_b.clone(), beta: self.beta, steps }
    }

    pub fn unitary(&self, protocol: &SplineProtocol) -> Result<CMatrix> {
        effective_unitary(self.joint, &QubitControl(protocol.clone()), self.steps)
    }

    pub fn evaluate_full(&self, protocol: &SplineProtocol) -> Result<OnePointResult> {
        modified_je(&self.h_a, &self.h_b, &self.unitary(protocol)?, self.beta)
    }

    pub fn evaluate(&self, protocol: &SplineProtocol) -> Result<f64> {
        Ok(self.evaluate_full(protocol)?.delta_f_tilde)
    }

    /// `−(1/β) ln(Z_B/Z_A)`
    pub fn delta_f(&self) -> Result<f64> {
        crate::quantum::free_energy_difference(&self.h_a, &self.h_b, self.beta)
    }
}

/// ΔF̃ for a spline protocol driving `h` with `steps` collisions.
pub fn objective(h: &JointHamiltonian, protocol: &SplineProtocol, beta: f64, steps: usize) -> Result<f64> {
    Objective::new(h, beta, steps)?.evaluate(protocol)
}

/// `grid_size` equally spaced durations from `t_min` to `t_max`.
pub fn duration_grid(t_min: f64, t_max: f64, grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("duration grid needs at least 2 points".into()));
    }
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < T_min < T_max, got [{t_min}, {t_max}]")));
    }
    let h = (t_max - t_min) / (grid_size - 1) as f64;
    Ok((0..grid_size).map(|k| if k == grid_size - 1 { t_max } else { t_min + h * k as f64 }).collect())
}

/// Grid argmin of `f`; ties go to the smallest duration.
pub fn argmin_on_grid(grid: &[f64], mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut best = (f64::NAN, f64::INFINITY);
    for &t in grid {
        let v = f(t)?;
        if v < best.1 {
            best = (t, v);
        }
    }
    if best.0.is_nan() {
        return Err(Error::InvalidParameter("objective is not finite on the duration grid".into()));
    }
    Ok(best)
}

/// The duration on a uniform grid minimizing ΔF̃ for a fixed protocol shape.
pub fn optimize_duration(
    objective: &Objective<'_>,
    shape: &SplineProtocol,
    t_min: f64,
    t_max: f64,
    grid_size: usize,
) -> Result<(f64, f64)> {
    let grid = duration_grid(t_min, t_max, grid_size)?;
    argmin_on_grid(&grid, |t| objective.evaluate(&shape.with_duration(t)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentConfig {
    /// Initial trial step of each line search (radians per unit gradient).
    pub step: f64,
    /// Line search gives up once the step halves below this.
    pub min_step: f64,
    pub max_iters: usize,
    /// Stop once an iteration improves ΔF̃ by less than `rel_tol · max(1, |ΔF̃|)`.
    pub rel_tol: f64,
    /// Central-difference step for the gradient (radians).
    pub fd_step: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub duration_grid: usize,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self { step: 0.2, min_step: 1e-5, max_iters: 60, rel_tol: 1e-6, fd_step: 1e-4, t_min: 0.5, t_max: 5.0, duration_grid: 16 }
    }
}

/// Improvements smaller than this are treated as rounding noise.
const ACCEPT_MARGIN: f64 = 1e-12;
/// Gradients below this norm are finite-difference noise.
const GRADIENT_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct DescentOutcome {
    pub protocol: SplineProtocol,
    pub value: f64,
    /// Objective after the start and after every accepted iteration (non-increasing).
    pub history: Vec<f64>,
    pub iterations: usize,
}

pub fn gradient(objective: &Objective<'_>, protocol: &SplineProtocol, h: f64) -> Result<Vec<f64>> {
    let x = protocol.params();
    (0..x.len())
        .map(|i| {
            let mut up = x.clone();
            let mut down = x.clone();
            up[i] += h;
            down[i] -= h;
            let fu = objective.evaluate(&protocol.with_params(&up)?)?;
            let fd = objective.evaluate(&protocol.with_params(&down)?)?;
            Ok((fu - fd) / (2.0 * h))
        })
        .collect()
}

/// Backtracking gradient descent over the spline control values, re-optimizing
/// the duration on the grid after every accepted step.
pub fn gradient_descent(objective: &Objective<'_>, init: &SplineProtocol, config: &DescentConfig) -> Result<DescentOutcome> {
    let mut current = init.clone();
    let mut value = objective.evaluate(&current)?;
    let mut history = vec![value];
    let durations = duration_grid(config.t_min, config.t_max, config.duration_grid)?;
    let mut iterations = 0;
    while iterations < config.max_iters {
        let g = gradient(objective, &current, config.fd_step)?;
        if g.iter().map(|x| x * x).sum::<f64>().sqrt() < GRADIENT_FLOOR {
            break;
        }
        let x = current.params();
        let mut eta = config.step;
        let mut accepted = None;
        while eta >= config.min_step {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - eta * gi).collect();
            let cand = current.with_params(&trial)?;
            let v = objective.evaluate(&cand)?;
            if v < value - ACCEPT_MARGIN {
                accepted = Some((cand, v));
                break;
            }
            eta *= 0.5;
        }
        let Some((mut next, mut next_value)) = accepted else { break };
        let (t_best, v_best) = argmin_on_grid(&durations, |t| objective.evaluate(&next.with_duration(t)?))?;
        if v_best < next_value - ACCEPT_MARGIN {
            next = next.with_duration(t_best)?;
            next_value = v_best;
        }
        iterations += 1;
        let gain = value - next_value;
        current = next;
        value = next_value;
        history.push(value);
        if gain < config.rel_tol * value.abs().max(1.0) {
            break;
        }
    }
    Ok(DescentOutcome { protocol: current, value, history, iterations })
}
