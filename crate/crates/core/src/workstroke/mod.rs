//! Work strokes: frequency ramps of the isolated oscillator.
//!
//! The ramp is linear in the squared frequency,
//! `ω²(t) = ω1² + (t/τ)(ω2² − ω1²)`, so `ω(0) = ω1` and `ω(τ) = ω2`.
//! Everything about the quantum evolution follows from the two classical
//! solutions `X`, `Y` of `ẍ + ω²(t) x = 0`.

mod generating;
mod propagator;
mod quadrature;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use generating::transition_probabilities;
pub use propagator::{adiabatic_map, propagator_matrix, sudden_quench_matrix, Propagator, PropagatorKind};
pub use quadrature::{gauss_hermite, propagator_quadrature, QUADRATURE_NODES};

/// Fixed RK4 step count; the step is `τ / TRAJECTORY_STEPS`.
pub const TRAJECTORY_STEPS: usize = 20_000;

/// Tolerance on `X Ẏ − Ẋ Y = −1`.
pub const WRONSKIAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampSpec {
    pub omega_start: f64,
    pub omega_end: f64,
    pub duration: f64,
}

impl RampSpec {
    pub fn new(omega_start: f64, omega_end: f64, duration: f64) -> Result<Self> {
        let r = Self {
            omega_start,
            omega_end,
            duration,
        };
        r.check()?;
        Ok(r)
    }

    pub fn check(&self) -> Result<()> {
        for (name, w) in [("omega_start", self.omega_start), ("omega_end", self.omega_end)] {
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid(name, format!("must be positive, got {w}")));
            }
        }
        if !(self.duration.is_finite() && self.duration >= 0.0) {
            return Err(invalid(
                "duration",
                format!("must be non-negative, got {}", self.duration),
            ));
        }
        Ok(())
    }

    pub fn omega_sq(&self, t: f64) -> f64 {
        let (a, b) = (self.omega_start * self.omega_start, self.omega_end * self.omega_end);
        if self.duration == 0.0 {
            return b;
        }
        a + (t / self.duration) * (b - a)
    }

    /// The same ramp run backwards in frequency.
    pub fn reversed(&self) -> Self {
        Self {
            omega_start: self.omega_end,
            omega_end: self.omega_start,
            duration: self.duration,
        }
    }

    pub fn is_sudden(&self) -> bool {
        self.duration == 0.0
    }
}

/// End-point values of the two fundamental solutions with
/// `X(0)=0, Ẋ(0)=1` and `Y(0)=1, Ẏ(0)=0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalTrajectory {
    pub x_end: f64,
    pub xdot_end: f64,
    pub y_end: f64,
    pub ydot_end: f64,
    /// Continuously tracked argument of `ζ(t) = Y(t) + i ω1 X(t)` at `t = τ`.
    /// Fixes the square-root branch of the ground-state amplitude.
    pub zeta_phase: f64,
}

impl ClassicalTrajectory {
    /// Trajectory of a zero-duration ramp.
    pub fn sudden() -> Self {
        Self {
            x_end: 0.0,
            xdot_end: 1.0,
            y_end: 1.0,
            ydot_end: 0.0,
            zeta_phase: 0.0,
        }
    }

    pub fn wronskian(&self) -> f64 {
        self.x_end * self.ydot_end - self.xdot_end * self.y_end
    }
}

/// Integrate both fundamental solutions with classic RK4.
pub fn integrate_trajectory(ramp: &RampSpec) -> Result<ClassicalTrajectory> {
    ramp.check()?;
    if ramp.is_sudden() {
        return Err(Error::ZeroDuration);
    }
    let h = ramp.duration / TRAJECTORY_STEPS as f64;
    let w1 = ramp.omega_start;
    let f = |t: f64, s: [f64; 4]| {
        let w2 = ramp.omega_sq(t);
        [s[1], -w2 * s[0], s[3], -w2 * s[2]]
    };
    let axpy = |s: [f64; 4], k: [f64; 4], a: f64| [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2], s[3] + a * k[3]];
    let mut s = [0.0, 1.0, 1.0, 0.0];
    let mut phase = 0.0_f64;
    for i in 0..TRAJECTORY_STEPS {
        let t = i as f64 * h;
        let k1 = f(t, s);
        let k2 = f(t + h / 2.0, axpy(s, k1, h / 2.0));
        let k3 = f(t + h / 2.0, axpy(s, k2, h / 2.0));
        let k4 = f(t + h, axpy(s, k3, h));
        let next = [
            s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            s[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
            s[3] + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
        ];
        // arg(ζ_next / ζ) is a small increment, so no wrapping is lost
        let (zr, zi) = (s[2], w1 * s[0]);
        let (nr, ni) = (next[2], w1 * next[0]);
        phase += (ni * zr - nr * zi).atan2(nr * zr + ni * zi);
        s = next;
    }
    let traj = ClassicalTrajectory {
        x_end: s[0],
        xdot_end: s[1],
        y_end: s[2],
        ydot_end: s[3],
        zeta_phase: phase,
    };
    let w = traj.wronskian();
    if (w + 1.0).abs() > WRONSKIAN_TOL {
        return Err(Error::NumericalFailure {
            context: "trajectory integration (Wronskian)",
            deviation: (w + 1.0).abs(),
        });
    }
    Ok(traj)
}

/// Adiabaticity factor
/// `Q* = [ω1²(ω2² X² + Ẋ²) + (ω2² Y² + Ẏ²)] / (2 ω1 ω2)`.
pub fn qstar(traj: &ClassicalTrajectory, ramp: &RampSpec) -> f64 {
    let (w1, w2) = (ramp.omega_start, ramp.omega_end);
    let (x, xd, y, yd) = (traj.x_end, traj.xdot_end, traj.y_end, traj.ydot_end);
    (w1 * w1 * (w2 * w2 * x * x + xd * xd) + (w2 * w2 * y * y + yd * yd)) / (2.0 * w1 * w2)
}

/// `Q*` of a ramp, including the sudden limit `(ω1² + ω2²)/(2 ω1 ω2)`.
pub fn ramp_qstar(ramp: &RampSpec) -> Result<f64> {
    let traj = if ramp.is_sudden() {
        ClassicalTrajectory::sudden()
    } else {
        integrate_trajectory(ramp)?
    };
    Ok(qstar(&traj, ramp))
}
