//! Switching-time scans behind the qubit and oscillator figures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oscillator::{oscillator_delta_f, oscillator_work_analytic, DrivingProtocol, OscillatorParams};
use super::qubit::{qubit_example, QubitCoupling};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 40;
pub const DEFAULT_T_MIN: f64 = 0.05;
pub const DEFAULT_T_MAX: f64 = 50.0;
pub const DEFAULT_STEPS: usize = 40_000;

/// `n` log-spaced durations from `t_min` to `t_max` inclusive.
pub fn log_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("a grid needs at least 2 points".into()));
    }
    let (a, b) = (t_min.ln(), t_max.ln());
    Ok((0..n)
        .map(|k| match k {
            0 => t_min,
            k if k == n - 1 => t_max,
            k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScanTarget {
    Qubit(QubitCoupling),
    /// Oscillator protocol 1–4, evaluated in the continuous limit.
    Oscillator { kind: u8, params: OscillatorParams },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "T")]
    pub duration: f64,
    #[serde(rename = "deltaF")]
    pub delta_f: f64,
    #[serde(rename = "deltaF_tilde")]
    pub delta_f_tilde: f64,
    pub avg_work: f64,
}

fn row(target: ScanTarget, duration: f64, steps: usize, beta: f64) -> Result<ScanRow> {
    match target {
        ScanTarget::Qubit(c) => {
            let r = qubit_example(c, duration, steps, beta)?.result;
            Ok(ScanRow { duration, delta_f: r.delta_f, delta_f_tilde: r.delta_f_tilde, avg_work: r.avg_work })
        }
        ScanTarget::Oscillator { kind, params } => {
            let p = DrivingProtocol::new(kind, duration)?;
            // the work is the same from every number state, so ΔF̃ = ⟨W⟩
            let w = oscillator_work_analytic(&p, params)?;
            Ok(ScanRow { duration, delta_f: oscillator_delta_f(&p, params), delta_f_tilde: w, avg_work: w })
        }
    }
}

/// One row per grid point, in grid order; points are evaluated in parallel.
pub fn figure1_scan(target: ScanTarget, grid: &[f64], steps: usize, beta: f64) -> Result<Vec<ScanRow>> {
    grid.par_iter().map(|&t| row(target, t, steps, beta)).collect()
}
