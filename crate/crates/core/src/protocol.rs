//! Control protocols: differentiable paths of pure control states on `[0, T]`.

use num_complex::Complex64 as C64;

/// A path `t ↦ |ψ_C(t)⟩` of normalized control states.
pub trait ControlProtocol: Sync {
    fn dim(&self) -> usize;

    fn duration(&self) -> f64;

    fn state_at(&self, t: f64) -> Vec<C64>;

    /// `|ψ̇_C(t)⟩` in closed form, when the protocol knows it.
    fn analytic_derivative(&self, _t: f64) -> Option<Vec<C64>> {
        None
    }

    /// `|ψ̇_C(t)⟩`, falling back to central differences with step `h`
    /// (one-sided at the ends of `[0, T]`).
    fn derivative_at(&self, t: f64, h: f64) -> Vec<C64> {
        if let Some(d) = self.analytic_derivative(t) {
            return d;
        }
        central_difference(self, t, h)
    }
}

pub fn central_difference<P: ControlProtocol + ?Sized>(p: &P, t: f64, h: f64) -> Vec<C64> {
    let tt = p.duration();
    let lo = (t - h).max(0.0);
    let hi = (t + h).min(tt);
    let a = p.state_at(lo);
    let b = p.state_at(hi);
    let w = 1.0 / (hi - lo);
    a.iter().zip(&b).map(|(x, y)| (y - x) * w).collect()
}

/// A protocol that holds one control state for the whole duration.
#[derive(Clone, Debug)]
pub struct ConstantProtocol {
    pub state: Vec<C64>,
    pub duration: f64,
}

impl ControlProtocol for ConstantProtocol {
    fn dim(&self) -> usize {
        self.state.len()
    }

    fn duration(&self) -> f64 {
        self.duration
    }

    fn state_at(&self, _t: f64) -> Vec<C64> {
        self.state.clone()
    }

    fn analytic_derivative(&self, _t: f64) -> Option<Vec<C64>> {
        Some(vec![C64::new(0.0, 0.0); self.state.len()])
    }
}

/// Bloch angles of a qubit control state and their time derivatives (radians, radians per time).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angles {
    pub theta: f64,
    pub theta_dot: f64,
    pub phi: f64,
    pub phi_dot: f64,
}

/// A schedule `t ↦ (θ(t), φ(t))` for the qubit control state
/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub trait AngleSchedule: Sync {
    fn duration(&self) -> f64;
    fn angles(&self, t: f64) -> Angles;
}

pub fn qubit_state(theta: f64, phi: f64) -> [C64; 2] {
    let (s, c) = (0.5 * theta).sin_cos();
    [C64::new(c, 0.0), C64::from_polar(s, phi)]
}

/// `d/dt [cos(θ/2), e^{iφ} sin(θ/2)]`
pub fn qubit_tangent(a: &Angles) -> [C64; 2] {
    let (s, c) = (0.5 * a.theta).sin_cos();
    let e = C64::from_polar(1.0, a.phi);
    [
        C64::new(-0.5 * a.theta_dot * s, 0.0),
        e * C64::new(0.5 * a.theta_dot * c, a.phi_dot * s),
    ]
}

/// Adapts an [`AngleSchedule`] into a qubit [`ControlProtocol`] with analytic derivative.
#[derive(Clone, Debug)]
pub struct QubitControl<S>(pub S);

impl<S: AngleSchedule> ControlProtocol for QubitControl<S> {
    fn dim(&self) -> usize {
        2
    }

    fn duration(&self) -> f64 {
        self.0.duration()
    }

    fn state_at(&self, t: f64) -> Vec<C64> {
        let a = self.0.angles(t);
        qubit_state(a.theta, a.phi).to_vec()
    }

    fn analytic_derivative(&self, t: f64) -> Option<Vec<C64>> {
        Some(qubit_tangent(&self.0.angles(t)).to_vec())
    }
}

/// θ and φ interpolated linearly between fixed endpoint values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearAngles {
    pub theta: (f64, f64),
    pub phi: (f64, f64),
    pub duration: f64,
}

impl AngleSchedule for LinearAngles {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn angles(&self, t: f64) -> Angles {
        let s = t / self.duration;
        let dth = self.theta.1 - self.theta.0;
        let dph = self.phi.1 - self.phi.0;
        Angles {
            theta: self.theta.0 + dth * s,
            theta_dot: dth / self.duration,
            phi: self.phi.0 + dph * s,
            phi_dot: dph / self.duration,
        }
    }
}
