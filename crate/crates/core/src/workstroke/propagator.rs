//! Finite-time propagator in the Fock bases of the initial and final frequency.
//!
//! The evolution operator of a quadratic Hamiltonian maps the ladder operator
//! of the final basis onto a Bogoliubov combination of the initial one,
//! `U† a₂ U = α a₁ + β a₁†`, with `α`, `β` read off the classical trajectory.
//! Taking matrix elements of `a₂ U = U (α a₁ + β a₁†)` and its adjoint gives
//! exact three-term recurrences for `U_mn = ⟨φ_m^{ω2}| U |φ_n^{ω1}⟩` that start
//! from the Gaussian overlap `U_00`. Row `m` of column `n + 1` only needs rows
//! `m − 1` and `m`, so any truncated block is obtained exactly, without the
//! cancellation that limits direct quadrature of the kernel at high levels.

use serde::{Deserialize, Serialize};

use super::{integrate_trajectory, qstar, ClassicalTrajectory, RampSpec};
use crate::error::{Error, Result};
use crate::qmath::{CMatrix, DensityMatrix, C64};

/// Columns `n ≤ n_levels − TRUSTED_MARGIN` must have unit norm.
pub const TRUSTED_MARGIN: usize = 10;
/// Tolerance on the column norms of the trusted block.
pub const COLUMN_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropagatorKind {
    /// Finite-duration ramp.
    Finite,
    /// `τ = 0`: overlap of the two eigenbases.
    SuddenQuench,
    /// Population-preserving map `|n⟩ → |n⟩` with zero phases.
    Adiabatic,
}

/// Truncated work-stroke matrix `U_mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    matrix: CMatrix,
    ramp: RampSpec,
    qstar: f64,
    kind: PropagatorKind,
    column_norm_deviation: f64,
    leakage: CMatrix,
}

impl Propagator {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn ramp(&self) -> &RampSpec {
        &self.ramp
    }

    pub fn qstar(&self) -> f64 {
        self.qstar
    }

    pub fn kind(&self) -> PropagatorKind {
        self.kind
    }

    pub fn n_levels(&self) -> usize {
        self.matrix.nrows()
    }

    /// Max deviation from 1 of the trusted column norms, measured over an
    /// extended row range so that genuine transitions above the truncation
    /// are not mistaken for numerical error.
    pub fn column_norm_deviation(&self) -> f64 {
        self.column_norm_deviation
    }

    /// Max `|U_mn|` over odd `m + n`.
    pub fn parity_deviation(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in ((j + 1) % 2..n).step_by(2) {
                worst = worst.max(self.matrix[(i, j)].norm());
            }
        }
        worst
    }

    /// `I − U†U`: `Tr[(I − U†U) ρ]` is the weight a stroke moves above the
    /// truncation.
    pub fn leakage_operator(&self) -> &CMatrix {
        &self.leakage
    }

    /// `U ρ U† + Tr[(I − U†U) ρ] |N−1⟩⟨N−1|`.
    ///
    /// Weight lost above the truncation is returned to the top retained level,
    /// which keeps the stroke linear and trace preserving.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = self.n_levels();
        let mut out = &self.matrix * rho * self.matrix.adjoint();
        out[(n - 1, n - 1)] += (&self.leakage * rho).trace();
        out
    }

    /// Population-preserving map between two frequencies.
    pub fn adiabatic(ramp: &RampSpec, n_levels: usize) -> Result<Self> {
        ramp.check()?;
        let ramp = *ramp;
        Ok(Self {
            matrix: CMatrix::identity(n_levels, n_levels),
            ramp,
            qstar: 1.0,
            kind: PropagatorKind::Adiabatic,
            column_norm_deviation: 0.0,
            leakage: CMatrix::zeros(n_levels, n_levels),
        })
    }
}

/// `(α, β)` of `U† a₂ U = α a₁ + β a₁†`.
fn bogoliubov(traj: &ClassicalTrajectory, w1: f64, w2: f64) -> (C64, C64) {
    let i = C64::i();
    let (s1, s2) = (w1.sqrt(), w2.sqrt());
    let a = s2 * traj.y_end + i * (traj.ydot_end / s2);
    let b = s2 * traj.x_end + i * (traj.xdot_end / s2);
    let alpha = 0.5 * (a / s1 - i * b * s1);
    let beta = 0.5 * (a / s1 + i * b * s1);
    (alpha, beta)
}

/// `⟨φ_0^{ω2}| U |φ_0^{ω1}⟩`.
///
/// The evolved ground state is `(ω1/π)^{1/4} ζ^{-1/2} exp(i ζ̇ x² / 2ζ)` with
/// `ζ = Y + i ω1 X`; the square root follows the continuously tracked phase of ζ.
fn ground_amplitude(traj: &ClassicalTrajectory, w1: f64, w2: f64) -> C64 {
    let i = C64::i();
    let zeta = C64::new(traj.y_end, w1 * traj.x_end);
    let zeta_dot = C64::new(traj.ydot_end, w1 * traj.xdot_end);
    let inv_sqrt_zeta = C64::from_polar(zeta.norm().powf(-0.5), -0.5 * traj.zeta_phase);
    let width = w2 - i * zeta_dot / zeta;
    let gauss = (C64::new(2.0 * std::f64::consts::PI, 0.0) / width).sqrt();
    (w1 * w2).powf(0.25) / std::f64::consts::PI.sqrt() * inv_sqrt_zeta * gauss
}

/// Fill `rows × cols` of `U_mn` from the recurrences.
fn recurrence_block(traj: &ClassicalTrajectory, w1: f64, w2: f64, rows: usize, cols: usize) -> CMatrix {
    let (alpha, beta) = bogoliubov(traj, w1, w2);
    let ac = alpha.conj();
    let bc = beta.conj();
    let mut u = CMatrix::zeros(rows, cols);
    u[(0, 0)] = ground_amplitude(traj, w1, w2);
    // first column: √(m+1) U_{m+1,0} = (β/α*) √m U_{m−1,0}
    let ratio = beta / ac;
    for m in (1..rows.saturating_sub(1)).step_by(2) {
        u[(m + 1, 0)] = ratio * ((m as f64) / (m as f64 + 1.0)).sqrt() * u[(m - 1, 0)];
    }
    // √m U_{m−1,n} = α* √(n+1) U_{m,n+1} + β* √n U_{m,n−1}
    for n in 0..cols.saturating_sub(1) {
        let denom = ac * ((n + 1) as f64).sqrt();
        let sn = (n as f64).sqrt();
        for m in 0..rows {
            let mut t = C64::new(0.0, 0.0);
            if m > 0 {
                t += (m as f64).sqrt() * u[(m - 1, n)];
            }
            if n > 0 {
                t -= bc * sn * u[(m, n - 1)];
            }
            u[(m, n + 1)] = t / denom;
        }
    }
    u
}

/// Rows used for the column-norm check.
fn extended_rows(n_levels: usize) -> usize {
    (8 * n_levels).max(200)
}

fn build(traj: &ClassicalTrajectory, ramp: &RampSpec, n_levels: usize, kind: PropagatorKind) -> Result<Propagator> {
    let (w1, w2) = (ramp.omega_start, ramp.omega_end);
    let rows = extended_rows(n_levels);
    let full = recurrence_block(traj, w1, w2, rows, n_levels);
    let trusted = n_levels.saturating_sub(TRUSTED_MARGIN).max(1);
    let deviation = (0..trusted)
        .map(|j| (full.column(j).norm() - 1.0).abs())
        .fold(0.0_f64, f64::max);
    if !(deviation <= COLUMN_NORM_TOL) {
        return Err(Error::NumericalFailure {
            context: "propagator construction",
            deviation,
        });
    }
    let matrix = full.rows(0, n_levels).into_owned();
    let leakage = CMatrix::identity(n_levels, n_levels) - matrix.adjoint() * &matrix;
    Ok(Propagator {
        matrix,
        ramp: *ramp,
        qstar: qstar(traj, ramp),
        kind,
        column_norm_deviation: deviation,
        leakage,
    })
}

/// Finite-time propagator of a ramp; `τ = 0` is routed to [`sudden_quench_matrix`].
pub fn propagator_matrix(ramp: &RampSpec, n_levels: usize) -> Result<Propagator> {
    ramp.check()?;
    if n_levels < 2 {
        return Err(crate::error::invalid("n_levels", "must be at least 2"));
    }
    if ramp.is_sudden() {
        return sudden_quench_matrix(ramp.omega_start, ramp.omega_end, n_levels);
    }
    let traj = integrate_trajectory(ramp)?;
    build(&traj, ramp, n_levels, PropagatorKind::Finite)
}

/// Overlaps `⟨φ_m^{ω2}|φ_n^{ω1}⟩` of the two Hermite-function bases.
pub fn sudden_quench_matrix(omega_start: f64, omega_end: f64, n_levels: usize) -> Result<Propagator> {
    let ramp = RampSpec::new(omega_start, omega_end, 0.0)?;
    if n_levels < 2 {
        return Err(crate::error::invalid("n_levels", "must be at least 2"));
    }
    build(
        &ClassicalTrajectory::sudden(),
        &ramp,
        n_levels,
        PropagatorKind::SuddenQuench,
    )
}

/// Population-preserving work stroke: the matrix is kept and reinterpreted in
/// the eigenbasis of the final frequency. The adiabatic phases are set to zero.
pub fn adiabatic_map(state: &DensityMatrix) -> DensityMatrix {
    state.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workstroke::transition_probabilities;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_frequency_is_diagonal_free_evolution() {
        let w = 2.0;
        let tau = 4.0;
        let p = propagator_matrix(&RampSpec::new(w, w, tau).unwrap(), 30).unwrap();
        for n in 0..20 {
            for m in 0..30 {
                let expected = if m == n { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(p.matrix()[(m, n)].norm(), expected, epsilon = 1e-8);
            }
            let phase = C64::from_polar(1.0, -w * tau * (n as f64 + 0.5));
            assert!((p.matrix()[(n, n)] - phase).norm() < 1e-7);
        }
    }

    #[test]
    fn matches_generating_function() {
        for &tau in &[0.1, 0.5, 1.0, 4.0, 16.0] {
            let p = propagator_matrix(&RampSpec::new(1.0, 4.0, tau).unwrap(), 30).unwrap();
            let probs = transition_probabilities(p.qstar(), 5).unwrap();
            for m in 0..=5 {
                for n in 0..=5 {
                    assert_abs_diff_eq!(p.matrix()[(m, n)].norm_sqr(), probs[(m, n)], epsilon = 1e-10);
                }
            }
            assert!(p.parity_deviation() < 1e-12);
            assert!(p.column_norm_deviation() < 1e-10);
        }
    }

    #[test]
    fn sudden_quench_overlaps() {
        let id = sudden_quench_matrix(3.0, 3.0, 10).unwrap();
        assert!((id.matrix() - CMatrix::identity(10, 10)).camax() < 1e-14);
        let q = sudden_quench_matrix(1.0, 4.0, 30).unwrap();
        assert_abs_diff_eq!(q.matrix()[(0, 0)].re, (4.0_f64 / 5.0).sqrt(), epsilon = 1e-12);
        assert!(q.matrix().iter().all(|z| z.im.abs() < 1e-14));
        let probs = transition_probabilities(q.qstar(), 5).unwrap();
        for m in 0..=5 {
            for n in 0..=5 {
                assert_abs_diff_eq!(q.matrix()[(m, n)].norm_sqr(), probs[(m, n)], epsilon = 1e-12);
            }
        }
        assert_eq!(q.kind(), PropagatorKind::SuddenQuench);
    }

    #[test]
    fn zero_duration_routes_to_quench() {
        let p = propagator_matrix(&RampSpec::new(1.0, 4.0, 0.0).unwrap(), 12).unwrap();
        assert_eq!(p.kind(), PropagatorKind::SuddenQuench);
    }

    #[test]
    fn reversed_ramp_is_transpose() {
        let r = RampSpec::new(1.0, 4.0, 2.5).unwrap();
        let fwd = propagator_matrix(&r, 20).unwrap();
        let back = propagator_matrix(&r.reversed(), 20).unwrap();
        assert!((fwd.matrix().transpose() - back.matrix()).camax() < 1e-9);
    }

    #[test]
    fn adiabatic_propagator_is_identity() {
        let p = Propagator::adiabatic(&RampSpec::new(1.0, 4.0, 32.0).unwrap(), 8).unwrap();
        assert_eq!(p.kind(), PropagatorKind::Adiabatic);
        assert_eq!(p.qstar(), 1.0);
        assert_eq!(p.matrix(), &CMatrix::identity(8, 8));
    }
}
