//! Batch comparison of linear and optimized protocols over random couplings.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gradient_descent, optimize_duration, sample_random_hamiltonian, spectral_spread, DescentConfig, Objective, SpectrumSampling, SplineProtocol};
use crate::error::{Error, Result};

/// Slack on `ΔF ≤ ΔF̃ ≤ ⟨W⟩` before a sample aborts the study.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub dims: Vec<usize>,
    pub samples_per_dim: usize,
    pub seed: u64,
    pub beta: f64,
    /// Interior spline points per angle.
    pub points: usize,
    /// Collisions per objective evaluation during the search.
    pub steps_search: usize,
    /// Collisions for the reported values.
    pub steps_final: usize,
    /// Duration of the linear reference protocol.
    pub baseline_duration: f64,
    pub sampling: SpectrumSampling,
    pub descent: DescentConfig,
}

impl StudyConfig {
    /// Strategy 1: T ∈ [0.5, 5], 5 points; strategy 2: T ∈ [0.5, 20], 10 points.
    pub fn strategy(which: u8) -> Result<Self> {
        let (t_max, points) = match which {
            1 => (5.0, 5),
            2 => (20.0, 10),
            s => return Err(Error::InvalidParameter(format!("strategy must be 1 or 2, got {s}"))),
        };
        Ok(Self {
            dims: (2..=6).collect(),
            samples_per_dim: 50,
            seed: 0,
            beta: 1.0,
            points,
            steps_search: 400,
            steps_final: 20_000,
            baseline_duration: 1.0,
            sampling: SpectrumSampling::Rescaled,
            descent: DescentConfig { t_min: 0.5, t_max, max_iters: 40, ..Default::default() },
        })
    }

    fn validate(&self) -> Result<()> {
        if self.samples_per_dim == 0 {
            return Err(Error::InvalidParameter("need at least one sample per dimension".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|d| !(2..=6).contains(d)) {
            return Err(Error::InvalidParameter(format!("dimensions must lie in 2..=6, got {:?}", self.dims)));
        }
        if self.points == 0 || self.steps_search == 0 || self.steps_final == 0 {
            return Err(Error::InvalidParameter("points and step counts must be positive".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidBeta(self.beta));
        }
        Ok(())
    }
}

/// Independent stream per (dimension, sample): results do not depend on scheduling.
pub fn sample_rng(seed: u64, dim: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((dim * 100_000 + index) as u64);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub dim: usize,
    pub index: usize,
    pub delta_f: f64,
    pub spread: f64,
    pub delta_f_tilde_linear: f64,
    pub delta_f_tilde_opt: f64,
    pub err_abs_linear: f64,
    pub err_abs_opt: f64,
    pub err_scl_linear: f64,
    pub err_scl_opt: f64,
    pub duration_opt: f64,
    pub iterations: usize,
    /// The linear reference beat the optimized protocol at final resolution.
    pub baseline_won: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimAggregate {
    pub dim: usize,
    pub n_samples: usize,
    pub mean_err_abs_linear: f64,
    pub mean_err_abs_opt: f64,
    pub mean_err_scl_linear: f64,
    pub mean_err_scl_opt: f64,
    pub baseline_wins: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub samples: Vec<SampleResult>,
    pub aggregates: Vec<DimAggregate>,
}

impl StudyResult {
    pub fn aggregate(&self, dim: usize) -> Option<&DimAggregate> {
        self.aggregates.iter().find(|a| a.dim == dim)
    }
}

fn checked(r: crate::fluctuation::OnePointResult, what: &str, dim: usize, index: usize) -> Result<f64> {
    r.check_bound_chain(BOUND_TOL).map_err(|e| Error::BoundViolation(format!("{what} protocol, dim {dim}, sample {index}: {e}")))?;
    Ok(r.delta_f_tilde)
}

pub fn run_sample(config: &StudyConfig, dim: usize, index: usize) -> Result<SampleResult> {
    let mut rng = sample_rng(config.seed, dim, index);
    let h = sample_random_hamiltonian(dim, &mut rng, config.sampling)?;
    let search = Objective::new(&h, config.beta, config.steps_search)?;
    let fine = search.with_steps(config.steps_final);
    let delta_f = search.delta_f()?;
    let spread = spectral_spread(&h);

    let baseline = SplineProtocol::linear(config.points, config.baseline_duration)?;
    let lin = checked(fine.evaluate_full(&baseline)?, "linear", dim, index)?;

    let d = &config.descent;
    let shape = SplineProtocol::linear(config.points, d.t_min)?;
    let (t0, _) = optimize_duration(&search, &shape, d.t_min, d.t_max, d.duration_grid)?;
    let out = gradient_descent(&search, &shape.with_duration(t0)?, d)?;
    let opt = checked(fine.evaluate_full(&out.protocol)?, "optimized", dim, index)?;

    let baseline_won = lin < opt;
    let best = opt.min(lin);
    let (ea, eo) = ((lin - delta_f).abs(), (best - delta_f).abs());
    Ok(SampleResult {
        dim,
        index,
        delta_f,
        spread,
        delta_f_tilde_linear: lin,
        delta_f_tilde_opt: best,
        err_abs_linear: ea,
        err_abs_opt: eo,
        err_scl_linear: ea / spread,
        err_scl_opt: eo / spread,
        duration_opt: if baseline_won { config.baseline_duration } else { crate::protocol::AngleSchedule::duration(&out.protocol) },
        iterations: out.iterations,
        baseline_won,
    })
}

fn aggregate(dim: usize, rows: &[&SampleResult]) -> DimAggregate {
    let n = rows.len() as f64;
    let mean = |f: fn(&SampleResult) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
    DimAggregate {
        dim,
        n_samples: rows.len(),
        mean_err_abs_linear: mean(|r| r.err_abs_linear),
        mean_err_abs_opt: mean(|r| r.err_abs_opt),
        mean_err_scl_linear: mean(|r| r.err_scl_linear),
        mean_err_scl_opt: mean(|r| r.err_scl_opt),
        baseline_wins: rows.iter().filter(|r| r.baseline_won).count(),
    }
}

/// Runs every (dimension, sample) pair in parallel. `on_sample` sees each result as it
/// completes (in completion order); the returned samples are in (dim, index) order.
pub fn run_study(config: &StudyConfig, on_sample: &(dyn Fn(&SampleResult) + Sync)) -> Result<StudyResult> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = config.dims.iter().flat_map(|&d| (0..config.samples_per_dim).map(move |j| (d, j))).collect();
    let samples: Vec<SampleResult> = jobs
        .par_iter()
        .map(|&(d, j)| {
            let r = run_sample(config, d, j)?;
            on_sample(&r);
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let aggregates = config
        .dims
        .iter()
        .map(|&d| aggregate(d, &samples.iter().filter(|r| r.dim == d).collect::<Vec<_>>()))
        .collect();
    Ok(StudyResult { samples, aggregates })
}
