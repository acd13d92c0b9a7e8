//! Collisions of the oscillator with spin-1/2 reservoir particles.
//!
//! The persistent state holds the oscillator and one memory particle per
//! reservoir, ordered `[cold-a, oscillator, hot-a]`. A second particle
//! (`cold-b` or `hot-b`) is attached only for the duration of a heat stroke
//! and sits on the outer edge, so every collision acts on neighbouring factors.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qmath::{
    conjugate_local, kron, matrix_exponential, partial_trace_raw, tensor, unitarity_deviation, CMatrix, DensityMatrix,
    Factor, FockSpace, SpinSpec, C64, OSCILLATOR,
};

pub const COLD_A: &str = "cold-a";
pub const COLD_B: &str = "cold-b";
pub const HOT_A: &str = "hot-a";
pub const HOT_B: &str = "hot-b";

/// Relative tolerance for the resonance condition.
const RESONANCE_TOL: f64 = 1e-12;

/// Health limit for the collision unitaries, `‖V V† − I‖_max`.
pub const UNITARITY_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Cold,
    Hot,
}

impl Side {
    pub fn memory_label(self) -> &'static str {
        match self {
            Side::Cold => COLD_A,
            Side::Hot => HOT_A,
        }
    }

    pub fn fresh_label(self) -> &'static str {
        match self {
            Side::Cold => COLD_B,
            Side::Hot => HOT_B,
        }
    }
}

/// One reservoir: particle spec plus system and intra-reservoir couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSpec {
    pub spin: SpinSpec,
    /// `J`
    pub coupling: f64,
    /// `τ_se`
    pub collision_time: f64,
    /// `J_ee`
    pub intra_coupling: f64,
    /// `τ_ee`
    pub intra_time: f64,
}

impl EnvironmentSpec {
    pub fn new(
        spin: SpinSpec,
        coupling: f64,
        collision_time: f64,
        intra_coupling: f64,
        intra_time: f64,
    ) -> Result<Self> {
        let e = Self {
            spin,
            coupling,
            collision_time,
            intra_coupling,
            intra_time,
        };
        e.check()?;
        Ok(e)
    }

    /// Markovian reservoir (`J_ee τ_ee = 0`).
    pub fn markovian(spin: SpinSpec, coupling: f64, collision_time: f64) -> Result<Self> {
        Self::new(spin, coupling, collision_time, 0.0, 0.0)
    }

    pub fn check(&self) -> Result<()> {
        self.spin.check()?;
        if !(self.coupling.is_finite() && self.collision_time.is_finite() && self.coupling * self.collision_time > 0.0)
        {
            return Err(invalid(
                "coupling",
                format!("J·τ_se must be positive, got {}·{}", self.coupling, self.collision_time),
            ));
        }
        let s = self.intra_strength();
        if !(s.is_finite() && s >= 0.0 && self.intra_coupling >= 0.0 && self.intra_time >= 0.0) {
            return Err(invalid(
                "intra_coupling",
                format!("J_ee·τ_ee must be non-negative, got {s}"),
            ));
        }
        Ok(())
    }

    /// `J τ_se`
    pub fn collision_strength(&self) -> f64 {
        self.coupling * self.collision_time
    }

    /// `J_ee τ_ee`
    pub fn intra_strength(&self) -> f64 {
        self.intra_coupling * self.intra_time
    }

    pub fn is_markovian(&self) -> bool {
        self.intra_strength() == 0.0
    }
}

fn sigma_plus() -> CMatrix {
    // |e⟩⟨g| with index 0 = ground
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
}

fn check_resonance(space: &FockSpace, env: &EnvironmentSpec) -> Result<()> {
    let (w, we) = (space.frequency(), env.spin.frequency);
    if (w - we).abs() > RESONANCE_TOL * w.max(we) {
        return Err(Error::FrequencyMismatch {
            oscillator: w,
            spin: we,
        });
    }
    Ok(())
}

fn checked_unitary(u: CMatrix, context: &'static str) -> Result<CMatrix> {
    let dev = unitarity_deviation(&u);
    if dev > UNITARITY_LIMIT {
        return Err(Error::TruncationHealth {
            context,
            deviation: dev,
            limit: UNITARITY_LIMIT,
        });
    }
    Ok(u)
}

/// `exp(−i τ_se J (a σ⁺ + a† σ⁻))` on `oscillator ⊗ qubit`.
pub fn jc_unitary(space: &FockSpace, env: &EnvironmentSpec) -> Result<CMatrix> {
    check_resonance(space, env)?;
    env.check()?;
    let ops = space.operators();
    let sp = sigma_plus();
    let h = kron(&ops.a, &sp) + kron(&ops.a_dag, &sp.adjoint());
    checked_unitary(
        matrix_exponential(&(h * C64::new(env.coupling, 0.0)), env.collision_time)?,
        "Jaynes-Cummings collision",
    )
}

/// The same collision with the factors ordered `qubit ⊗ oscillator`.
pub fn jc_unitary_qubit_first(space: &FockSpace, env: &EnvironmentSpec) -> Result<CMatrix> {
    let u = jc_unitary(space, env)?;
    let n = space.n_levels();
    // (o, q) → (q, o)
    Ok(CMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (qi, oi) = (i / n, i % n);
        let (qj, oj) = (j / n, j % n);
        u[(oi * 2 + qi, oj * 2 + qj)]
    }))
}

/// Total excitation number `a†a ⊗ I + I ⊗ σ⁺σ⁻` on `oscillator ⊗ qubit`.
pub fn excitation_number(space: &FockSpace) -> CMatrix {
    let ops = space.operators();
    let sp = sigma_plus();
    kron(&ops.number, &CMatrix::identity(2, 2))
        + kron(
            &CMatrix::identity(space.n_levels(), space.n_levels()),
            &(&sp * sp.adjoint()),
        )
}

/// `exp(−i τ_ee J_ee (σˣσˣ + σʸσʸ + σᶻσᶻ))` on two qubits.
///
/// The Heisenberg coupling equals `J_ee (2 SWAP − I)`, so with `θ = J_ee τ_ee`
/// the unitary is `e^{iθ} (cos 2θ I − i sin 2θ SWAP)`.
pub fn heisenberg_unitary(env: &EnvironmentSpec) -> CMatrix {
    let theta = env.intra_strength();
    let g = C64::from_polar(1.0, theta);
    let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let mut u = CMatrix::zeros(4, 4);
    u[(0, 0)] = g * C64::new(c, -s);
    u[(3, 3)] = g * C64::new(c, -s);
    u[(1, 1)] = g * c;
    u[(2, 2)] = g * c;
    u[(1, 2)] = g * C64::new(0.0, -s);
    u[(2, 1)] = g * C64::new(0.0, -s);
    u
}

/// Oscillator and the two memory particles.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineEnvState {
    joint: DensityMatrix,
    omega: f64,
}

impl EngineEnvState {
    /// `ρ_cold ⊗ ρ_engine ⊗ ρ_hot` with thermal memory particles.
    pub fn new(engine: &DensityMatrix, omega: f64, cold: &SpinSpec, hot: &SpinSpec) -> Result<Self> {
        if engine.factors().len() != 1 || engine.factors()[0].label != OSCILLATOR {
            return Err(invalid("engine", "expected a single oscillator factor"));
        }
        let joint = tensor(&[&cold.thermal_state(COLD_A), engine, &hot.thermal_state(HOT_A)])?;
        Ok(Self { joint, omega })
    }

    pub fn from_joint(joint: DensityMatrix, omega: f64) -> Result<Self> {
        let labels = joint.labels();
        if labels != [COLD_A, OSCILLATOR, HOT_A] {
            return Err(invalid("joint", format!("unexpected factor layout {labels:?}")));
        }
        Ok(Self { joint, omega })
    }

    pub fn joint(&self) -> &DensityMatrix {
        &self.joint
    }

    /// Current oscillator frequency.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn n_levels(&self) -> usize {
        self.joint.factors()[1].dim
    }

    /// Reduced oscillator state in the eigenbasis of the current frequency.
    pub fn engine(&self) -> DensityMatrix {
        let data = partial_trace_raw(self.joint.data(), &self.joint.dims(), &[false, true, false]);
        DensityMatrix::from_parts(vec![Factor::new(OSCILLATOR, self.n_levels())], data)
    }

    /// `Tr[ρ H_s]` at the current frequency.
    pub fn engine_energy(&self) -> f64 {
        let n = self.n_levels();
        let d = self.joint.data();
        let mut e = 0.0;
        for i in 0..d.nrows() {
            let level = (i / 2) % n;
            e += d[(i, i)].re * self.omega * (level as f64 + 0.5);
        }
        e
    }

    /// Reduced state of one memory particle.
    pub fn particle(&self, side: Side) -> DensityMatrix {
        let keep = match side {
            Side::Cold => [true, false, false],
            Side::Hot => [false, false, true],
        };
        let data = partial_trace_raw(self.joint.data(), &self.joint.dims(), &keep);
        DensityMatrix::from_parts(vec![Factor::new(side.memory_label(), 2)], data)
    }

    pub(crate) fn set_omega(&mut self, omega: f64) {
        self.omega = omega;
    }

    /// Work-stroke map on the oscillator factor,
    /// `ρ → (I⊗U⊗I) ρ (I⊗U⊗I)† + Tr_osc[(I⊗L⊗I) ρ] ⊗ |N−1⟩⟨N−1|` with
    /// `L = I − U†U`. Returns the weight that was moved to the top level.
    pub(crate) fn apply_oscillator(&mut self, u: &CMatrix, leakage: &CMatrix) -> f64 {
        let n = self.n_levels();
        let rho = self.joint.data();
        let mut data = conjugate_local(rho, u, 2, n, 2);
        let idx = |c: usize, m: usize, h: usize| (c * n + m) * 2 + h;
        let mut moved = 0.0;
        for (c, h, c2, h2) in (0..16).map(|k| (k >> 3, (k >> 2) & 1, (k >> 1) & 1, k & 1)) {
            let mut m_el = C64::new(0.0, 0.0);
            for m in 0..n {
                for m2 in 0..n {
                    let l = leakage[(m, m2)];
                    if l != C64::new(0.0, 0.0) {
                        m_el += l * rho[(idx(c, m2, h), idx(c2, m, h2))];
                    }
                }
            }
            data[(idx(c, n - 1, h), idx(c2, n - 1, h2))] += m_el;
            if c == c2 && h == h2 {
                moved += m_el.re;
            }
        }
        self.joint = DensityMatrix::from_parts(self.joint.factors().to_vec(), data);
        moved
    }

    /// Free evolution of all persistent factors for `duration`.
    ///
    /// `oscillator` is the oscillator frequency, or `None` when its evolution
    /// is already contained in a work-stroke propagator.
    pub(crate) fn free_evolve(&mut self, duration: f64, oscillator: Option<f64>, omega_cold: f64, omega_hot: f64) {
        if duration == 0.0 {
            return;
        }
        let n = self.n_levels();
        let w = oscillator.unwrap_or(0.0);
        let dim = self.joint.dim();
        let energy: Vec<f64> = (0..dim)
            .map(|i| {
                let qh = (i % 2) as f64;
                let level = ((i / 2) % n) as f64;
                let qc = (i / (2 * n)) as f64;
                omega_cold * qc + w * level + omega_hot * qh
            })
            .collect();
        let phases: Vec<C64> = energy.iter().map(|e| C64::from_polar(1.0, -e * duration)).collect();
        let mut data = self.joint.data().clone();
        for j in 0..dim {
            for i in 0..dim {
                data[(i, j)] *= phases[i] * phases[j].conj();
            }
        }
        self.joint = DensityMatrix::from_parts(self.joint.factors().to_vec(), data);
    }
}

/// Energy bookkeeping of one heat stroke.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatOutcome {
    pub state: EngineEnvState,
    /// `E_fin − E_in` of the reduced engine.
    pub heat: f64,
    /// Energy change of the particle that collided with the engine.
    pub env_energy_change: f64,
}

/// Prebuilt unitaries for the heat strokes against one reservoir.
#[derive(Debug, Clone)]
pub struct HeatStroke {
    side: Side,
    env: EnvironmentSpec,
    /// Collision unitary for one sub-step of `τ_se / substeps`.
    jc: CMatrix,
    substeps: usize,
    intra: Option<CMatrix>,
}

impl HeatStroke {
    pub fn new(side: Side, env: &EnvironmentSpec, space: &FockSpace) -> Result<Self> {
        Self::with_substeps(side, env, space, 1)
    }

    /// Splits the system collision into `substeps` equal pieces so that
    /// [`HeatStroke::apply_observed`] can sample inside the stroke.
    pub fn with_substeps(side: Side, env: &EnvironmentSpec, space: &FockSpace, substeps: usize) -> Result<Self> {
        if substeps == 0 {
            return Err(invalid("substeps", "must be at least 1"));
        }
        let mut piece = *env;
        piece.collision_time /= substeps as f64;
        let jc = match side {
            Side::Cold => jc_unitary_qubit_first(space, &piece)?,
            Side::Hot => jc_unitary(space, &piece)?,
        };
        let intra = (!env.is_markovian()).then(|| heisenberg_unitary(env));
        Ok(Self {
            side,
            env: *env,
            jc,
            substeps,
            intra,
        })
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn env(&self) -> &EnvironmentSpec {
        &self.env
    }

    /// Collision with the memory particle, intra-reservoir collision with a
    /// fresh particle, trace-out of the memory particle, relabel.
    pub fn apply(&self, state: &EngineEnvState) -> Result<HeatOutcome> {
        self.apply_observed(state, &mut |_, _| {})
    }

    /// As [`HeatStroke::apply`], calling `observer(elapsed, state)` after every
    /// collision sub-step except the last.
    pub fn apply_observed(
        &self,
        state: &EngineEnvState,
        observer: &mut dyn FnMut(f64, &EngineEnvState),
    ) -> Result<HeatOutcome> {
        let we = self.env.spin.frequency;
        if (state.omega - we).abs() > RESONANCE_TOL * we.max(state.omega) {
            return Err(Error::FrequencyMismatch {
                oscillator: state.omega,
                spin: we,
            });
        }
        let n = state.n_levels();
        let e_engine = state.engine_energy();
        let e_particle = particle_energy(&state.particle(self.side), we);

        let (left, right) = match self.side {
            Side::Cold => (1, 2),
            Side::Hot => (2, 1),
        };
        let dt = self.env.collision_time / self.substeps as f64;
        let mut after = state.clone();
        for k in 0..self.substeps {
            let data = conjugate_local(after.joint.data(), &self.jc, left, 2 * n, right);
            after.joint = DensityMatrix::from_parts(state.joint.factors().to_vec(), data);
            if k + 1 < self.substeps {
                observer(dt * (k + 1) as f64, &after);
            }
        }
        let heat = after.engine_energy() - e_engine;
        let env_energy_change = particle_energy(&after.particle(self.side), we) - e_particle;

        let fresh = self.env.spin.thermal_state(self.side.fresh_label());
        let joint = match &self.intra {
            None => {
                // fresh particle simply replaces the memory particle
                let keep = match self.side {
                    Side::Cold => [false, true, true],
                    Side::Hot => [true, true, false],
                };
                let reduced = partial_trace_raw(after.joint.data(), &after.joint.dims(), &keep);
                let mut fresh = fresh.into_data();
                let data = match self.side {
                    Side::Cold => kron(&std::mem::take(&mut fresh), &reduced),
                    Side::Hot => kron(&reduced, &fresh),
                };
                DensityMatrix::from_parts(after.joint.factors().to_vec(), data)
            }
            Some(v) => {
                let (five, ee_left, ee_right, drop) = match self.side {
                    Side::Cold => (tensor(&[&fresh, &after.joint])?, 1, 2 * n, 1),
                    Side::Hot => (tensor(&[&after.joint, &fresh])?, 2 * n, 1, 2),
                };
                let data = conjugate_local(five.data(), v, ee_left, 4, ee_right);
                let mut keep = [true; 4];
                keep[drop] = false;
                let reduced = partial_trace_raw(&data, &five.dims(), &keep);
                DensityMatrix::from_parts(
                    vec![
                        Factor::new(COLD_A, 2),
                        Factor::new(OSCILLATOR, n),
                        Factor::new(HOT_A, 2),
                    ],
                    reduced,
                )
            }
        };
        Ok(HeatOutcome {
            state: EngineEnvState {
                joint,
                omega: state.omega,
            },
            heat,
            env_energy_change,
        })
    }
}

/// `ω_e ⟨σᶻ⟩ / 2` of a single qubit.
fn particle_energy(rho: &DensityMatrix, omega: f64) -> f64 {
    let d = rho.data();
    0.5 * omega * (d[(1, 1)].re - d[(0, 0)].re)
}

/// One heat stroke with freshly built unitaries.
pub fn heat_stroke(
    state: &EngineEnvState,
    side: Side,
    env: &EnvironmentSpec,
    space: &FockSpace,
) -> Result<HeatOutcome> {
    HeatStroke::new(side, env, space)?.apply(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::{partial_trace, trace_distance};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn env(omega: f64, temp: f64, jee: f64) -> EnvironmentSpec {
        EnvironmentSpec::new(SpinSpec::new(omega, temp).unwrap(), 1.0, 0.3, jee, 1.0).unwrap()
    }

    #[test]
    fn jc_rabi_transfer() {
        let space = FockSpace::new(30, 1.0).unwrap();
        let v = jc_unitary(&space, &env(1.0, 1.0, 0.0)).unwrap();
        // |0,g⟩ = index 0 is invariant
        assert!((v[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        // |1,g⟩ = index 2, |0,e⟩ = index 1
        assert_abs_diff_eq!(v[(2, 2)].re, 0.3_f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(v[(1, 2)].norm_sqr(), 0.3_f64.sin().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(v[(1, 2)].im, -0.3_f64.sin(), epsilon = 1e-12);
        assert_abs_diff_eq!(0.3_f64.sin().powi(2), 0.087332, epsilon = 1e-6);
        let n = excitation_number(&space);
        assert!((&v * &n - &n * &v).camax() < 1e-10);
    }

    #[test]
    fn jc_requires_resonance() {
        let space = FockSpace::new(6, 1.0).unwrap();
        assert!(matches!(
            jc_unitary(&space, &env(4.0, 1.0, 0.0)),
            Err(Error::FrequencyMismatch { .. })
        ));
    }

    #[test]
    fn heisenberg_partial_swap() {
        let id = heisenberg_unitary(&env(1.0, 1.0, 0.0));
        assert!((id - CMatrix::identity(4, 4)).camax() < 1e-15);
        let theta = 0.65 * FRAC_PI_4;
        let v = heisenberg_unitary(&env(1.0, 1.0, theta));
        // |↑↓⟩ = index 2 → |↓↑⟩ = index 1
        assert_abs_diff_eq!(v[(1, 2)].norm_sqr(), (2.0 * theta).sin().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!((2.0 * theta).sin().powi(2), 0.72700, epsilon = 1e-5);
        // agrees with the exponential of the Pauli form
        let sx = CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|x| C64::new(x, 0.0)));
        let sy = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.0, -1.0),
                C64::new(0.0, 1.0),
                C64::new(0.0, 0.0),
            ],
        );
        let sz = CMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0].map(|x| C64::new(x, 0.0)));
        let h = kron(&sx, &sx) + kron(&sy, &sy) + kron(&sz, &sz);
        let e = matrix_exponential(&h, theta).unwrap();
        assert!((e - v).camax() < 1e-12);
    }

    #[test]
    fn full_swap_exchanges_states() {
        let v = heisenberg_unitary(&env(1.0, 1.0, FRAC_PI_4));
        let a = SpinSpec::new(1.0, 0.3).unwrap().thermal_state("a");
        let b = DensityMatrix::pure("b", &[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]).unwrap();
        let ab = tensor(&[&a, &b]).unwrap();
        let out = crate::qmath::apply_unitary(&ab, &["a", "b"], &v).unwrap();
        let ra = partial_trace(&out, &["a"]).unwrap();
        let rb = partial_trace(&out, &["b"]).unwrap();
        assert!((ra.data() - b.data()).camax() < 1e-12);
        assert!((rb.data() - a.data()).camax() < 1e-12);
    }

    fn state_at(omega: f64, t_engine: f64, n: usize, cold: &SpinSpec, hot: &SpinSpec) -> EngineEnvState {
        let engine = FockSpace::new(n, omega).unwrap().thermal_state(t_engine).unwrap();
        EngineEnvState::new(&engine, omega, cold, hot).unwrap()
    }

    #[test]
    fn matched_temperatures_exchange_no_heat() {
        // the truncated thermal state is an exact fixed point: |N−1, e⟩ is isolated
        let cold = env(1.0, 0.1, 0.0);
        let hot = env(4.0, 10.0, 0.0);
        let space = FockSpace::new(30, 4.0).unwrap();
        let s = state_at(4.0, 10.0, 30, &cold.spin, &hot.spin);
        let out = heat_stroke(&s, Side::Hot, &hot, &space).unwrap();
        assert_abs_diff_eq!(out.heat, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn substeps_compose_to_the_full_collision() {
        let cold = env(1.0, 0.1, 0.4);
        let hot = env(4.0, 10.0, 0.4);
        let space = FockSpace::new(12, 4.0).unwrap();
        let s = state_at(4.0, 0.8, 12, &cold.spin, &hot.spin);
        let whole = HeatStroke::new(Side::Hot, &hot, &space).unwrap().apply(&s).unwrap();
        let split = HeatStroke::with_substeps(Side::Hot, &hot, &space, 10).unwrap();
        let mut seen = Vec::new();
        let parts = split.apply_observed(&s, &mut |t, _| seen.push(t)).unwrap();
        assert_eq!(seen.len(), 9);
        assert_abs_diff_eq!(seen[8], 0.27, epsilon = 1e-12);
        assert!((whole.state.joint().data() - parts.state.joint().data()).camax() < 1e-12);
        assert_abs_diff_eq!(whole.heat, parts.heat, epsilon = 1e-12);
    }

    #[test]
    fn relaxation_toward_colder_bath() {
        let cold = env(1.0, 0.1, 0.0);
        let hot = env(4.0, 10.0, 0.0);
        let space = FockSpace::new(30, 1.0).unwrap();
        let s = state_at(1.0, 0.5, 30, &cold.spin, &hot.spin);
        let out = heat_stroke(&s, Side::Cold, &cold, &space).unwrap();
        assert!(out.heat < 0.0);
        assert_abs_diff_eq!(out.heat + out.env_energy_change, 0.0, epsilon = 1e-9);
        out.state.joint().validate().unwrap();
    }

    #[test]
    fn memory_stroke_preserves_trace_and_balance() {
        let cold = env(1.0, 0.1, 0.65 * FRAC_PI_4);
        let hot = env(4.0, 10.0, 0.65 * FRAC_PI_4);
        let space = FockSpace::new(12, 4.0).unwrap();
        let s = state_at(4.0, 0.8, 12, &cold.spin, &hot.spin);
        let out = heat_stroke(&s, Side::Hot, &hot, &space).unwrap();
        out.state.joint().validate().unwrap();
        assert_abs_diff_eq!(out.heat + out.env_energy_change, 0.0, epsilon = 1e-9);
        assert_eq!(out.state.joint().labels(), [COLD_A, OSCILLATOR, HOT_A]);
    }

    #[test]
    fn markovian_stroke_thermalises_monotonically() {
        let cold = env(1.0, 0.1, 0.0);
        let hot = env(4.0, 2.0, 0.0);
        let space = FockSpace::new(20, 4.0).unwrap();
        let target = space.thermal_state(2.0).unwrap();
        let mut s = state_at(4.0, 0.3, 20, &cold.spin, &hot.spin);
        let stroke = HeatStroke::new(Side::Hot, &hot, &space).unwrap();
        let mut last = trace_distance(&s.engine(), &target).unwrap();
        for _ in 0..40 {
            s = stroke.apply(&s).unwrap().state;
            let d = trace_distance(&s.engine(), &target).unwrap();
            assert!(d <= last + 1e-10);
            last = d;
        }
        assert!(last < 0.2);
    }

    #[test]
    fn perfect_swap_hands_over_the_fresh_partner_state() {
        // after a full swap the new memory particle carries the old one's post-collision state
        let cold = env(1.0, 0.1, 0.0);
        let hot = env(4.0, 10.0, FRAC_PI_4);
        let hot_markov = env(4.0, 10.0, 0.0);
        let space = FockSpace::new(10, 4.0).unwrap();
        let s = state_at(4.0, 0.8, 10, &cold.spin, &hot.spin);
        let swapped = heat_stroke(&s, Side::Hot, &hot, &space).unwrap().state;
        // reference: apply only the collision, keep the memory particle
        let jc = jc_unitary(&space, &hot_markov).unwrap();
        let mut reference = s.clone();
        let data = conjugate_local(reference.joint.data(), &jc, 2, 20, 1);
        reference.joint = DensityMatrix::from_parts(reference.joint.factors().to_vec(), data);
        let d = trace_distance(swapped.joint(), reference.joint()).unwrap();
        assert!(d < 1e-9, "{d}");
    }
}
