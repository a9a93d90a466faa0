//! Natural cubic splines on uniform knots, and the spline-shaped qubit protocol.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::{AngleSchedule, Angles};

/// Natural cubic spline through `(k/m, y_k)`, `k = 0..=m`, on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NaturalSpline {
    values: Vec<f64>,
    /// Second derivatives at the knots (zero at both ends).
    curvature: Vec<f64>,
    h: f64,
}

impl NaturalSpline {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::InvalidParameter("a spline needs at least two knots".into()));
        }
        let m = n - 1;
        let h = 1.0 / m as f64;
        let mut curvature = vec![0.0; n];
        if m >= 2 {
            // M_{k−1} + 4M_k + M_{k+1} = 6(y_{k+1} − 2y_k + y_{k−1})/h², Thomas algorithm
            let interior = m - 1;
            let mut c = vec![0.0; interior];
            let mut d = vec![0.0; interior];
            for i in 0..interior {
                let k = i + 1;
                let rhs = 6.0 * (values[k + 1] - 2.0 * values[k] + values[k - 1]) / (h * h);
                let denom = if i == 0 { 4.0 } else { 4.0 - c[i - 1] };
                c[i] = 1.0 / denom;
                d[i] = if i == 0 { rhs / denom } else { (rhs - d[i - 1]) / denom };
            }
            for i in (0..interior).rev() {
                let next = if i + 1 < interior { curvature[i + 2] } else { 0.0 };
                curvature[i + 1] = d[i] - c[i] * next;
            }
        }
        Ok(Self { values, curvature, h })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value and first derivative at `x ∈ [0, 1]`; the end knots are returned exactly.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let m = self.values.len() - 1;
        let x = x.clamp(0.0, 1.0);
        let k = ((x / self.h) as usize).min(m - 1);
        let (v, dv) = self.eval_segment(k, x);
        match x {
            x if x == 0.0 => (self.values[0], dv),
            x if x == 1.0 => (self.values[m], dv),
            _ => (v, dv),
        }
    }

    /// The cubic of segment `[k/m, (k+1)/m]`, evaluated at any `x`.
    fn eval_segment(&self, k: usize, x: f64) -> (f64, f64) {
        let h = self.h;
        let a = (k + 1) as f64 * h - x;
        let b = x - k as f64 * h;
        let (m0, m1) = (self.curvature[k], self.curvature[k + 1]);
        let c0 = self.values[k] - m0 * h * h / 6.0;
        let c1 = self.values[k + 1] - m1 * h * h / 6.0;
        let v = (m0 * a * a * a + m1 * b * b * b) / (6.0 * h) + (c0 * a + c1 * b) / h;
        let dv = (-m0 * a * a + m1 * b * b) / (2.0 * h) + (c1 - c0) / h;
        (v, dv)
    }
}

pub const THETA_START: f64 = 0.0;
pub const THETA_END: f64 = FRAC_PI_2;

/// θ and φ as natural splines through `n` equally spaced interior values plus the
/// pinned endpoints θ(0) = 0, θ(T) = π/2, φ(0) = φ(T) = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "SplineParams", try_from = "SplineParams")]
pub struct SplineProtocol {
    theta: NaturalSpline,
    phi: NaturalSpline,
    duration: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct SplineParams {
    s_theta: Vec<f64>,
    s_phi: Vec<f64>,
    duration: f64,
}

impl From<SplineProtocol> for SplineParams {
    fn from(p: SplineProtocol) -> Self {
        Self { s_theta: p.s_theta().to_vec(), s_phi: p.s_phi().to_vec(), duration: p.duration }
    }
}

impl TryFrom<SplineParams> for SplineProtocol {
    type Error = Error;
    fn try_from(p: SplineParams) -> Result<Self> {
        SplineProtocol::new(p.s_theta, p.s_phi, p.duration)
    }
}

impl SplineProtocol {
    pub fn new(s_theta: Vec<f64>, s_phi: Vec<f64>, duration: f64) -> Result<Self> {
        if s_theta.len() != s_phi.len() {
            return Err(Error::DimensionMismatch { expected: s_theta.len(), found: s_phi.len() });
        }
        if s_theta.len() < 2 {
            return Err(Error::InvalidParameter(format!("need n ≥ 2 spline points, got {}", s_theta.len())));
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!("protocol duration must be positive, got {duration}")));
        }
        let pin = |start: f64, inner: Vec<f64>, end: f64| {
            let mut v = Vec::with_capacity(inner.len() + 2);
            v.push(start);
            v.extend(inner);
            v.push(end);
            NaturalSpline::new(v)
        };
        Ok(Self { theta: pin(THETA_START, s_theta, THETA_END)?, phi: pin(0.0, s_phi, 0.0)?, duration })
    }

    /// The spline form of θ = (π/2) t/T, φ = 0 (exact: natural splines reproduce lines).
    pub fn linear(n: usize, duration: f64) -> Result<Self> {
        let s_theta = (1..=n).map(|k| THETA_END * k as f64 / (n + 1) as f64).collect();
        Self::new(s_theta, vec![0.0; n], duration)
    }

    pub fn points(&self) -> usize {
        self.theta.values.len() - 2
    }

    pub fn s_theta(&self) -> &[f64] {
        let v = &self.theta.values;
        &v[1..v.len() - 1]
    }

    pub fn s_phi(&self) -> &[f64] {
        let v = &self.phi.values;
        &v[1..v.len() - 1]
    }

    /// Control values as one vector `[s_θ, s_φ]`.
    pub fn params(&self) -> Vec<f64> {
        let mut v = self.s_theta().to_vec();
        v.extend_from_slice(self.s_phi());
        v
    }

    pub fn with_params(&self, params: &[f64]) -> Result<Self> {
        let n = self.points();
        if params.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, found: params.len() });
        }
        Self::new(params[..n].to_vec(), params[n..].to_vec(), self.duration)
    }

    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        Self::new(self.s_theta().to_vec(), self.s_phi().to_vec(), duration)
    }
}

impl AngleSchedule for SplineProtocol {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn angles(&self, t: f64) -> Angles {
        let s = t / self.duration;
        let (theta, dth) = self.theta.eval(s);
        let (phi, dph) = self.phi.eval(s);
        Angles { theta, theta_dot: dth / self.duration, phi, phi_dot: dph / self.duration }
    }
}
