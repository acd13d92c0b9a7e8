//! The four-stroke Otto cycle.
//!
//! Stroke order per iteration: compression `ω_c → ω_h`, hot heat stroke,
//! expansion `ω_h → ω_c`, cold heat stroke. Energies `E0 … E4` are taken on
//! the reduced oscillator state against `H_s` at the current frequency.
//!
//! Two dynamical pictures are offered. [`Picture::Schrodinger`] (the default)
//! lets every persistent factor evolve under its bare Hamiltonian during every
//! stroke, so coherences acquired in a work stroke rotate during the heat
//! strokes. [`Picture::Interaction`] applies the collision unitaries and work
//! propagators back to back with no free evolution in between.

use serde::{Deserialize, Serialize};

use crate::collisions::{EngineEnvState, EnvironmentSpec, HeatStroke, Side};
use crate::error::{invalid, Error, Result};
use crate::qmath::{coherence_raw, trace_distance_raw, CMatrix, DensityMatrix, FockSpace, SpinSpec, OSCILLATOR};
use crate::workstroke::{propagator_matrix, Propagator, RampSpec};

/// Tolerance of the machine classification.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// `|Q_in|` below which the efficiency is undefined.
pub const HEAT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    #[default]
    Schrodinger,
    Interaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WorkMode {
    /// Finite-time ramp propagators.
    #[default]
    Finite,
    /// Population-preserving reference strokes.
    Adiabatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MachineKind {
    Engine,
    Refrigerator,
    Other,
}

impl std::fmt::Display for MachineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MachineKind::Engine => "engine",
            MachineKind::Refrigerator => "refrigerator",
            MachineKind::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    pub omega_c: f64,
    pub omega_h: f64,
    pub t_c: f64,
    pub t_h: f64,
    /// Temperature of the initial thermal engine state.
    pub t_s: f64,
    pub env_cold: EnvironmentSpec,
    pub env_hot: EnvironmentSpec,
    pub tau_w: f64,
    pub n_levels: usize,
    pub stationarity_epsilon: f64,
    pub max_cycles: usize,
    pub picture: Picture,
    pub work_mode: WorkMode,
    /// Largest trace lost to truncation in one work stroke before aborting.
    pub truncation_tolerance: f64,
    /// Sub-steps per system collision for mid-stroke observation.
    pub collision_substeps: usize,
    /// Explicit initial engine state; `None` means thermal at `t_s` and `ω_c`.
    #[serde(skip)]
    pub initial_state: Option<DensityMatrix>,
}

impl CycleConfig {
    /// `ω_c=1, ω_h=4, T_c=0.1, T_h=10, T_s=0.5, J=1, Jτ_se=0.3`, Markovian,
    /// 30 levels, `τ_w = 32`.
    pub fn paper_default() -> Self {
        let env = |omega, temperature| EnvironmentSpec {
            spin: SpinSpec {
                frequency: omega,
                temperature,
            },
            coupling: 1.0,
            collision_time: 0.3,
            intra_coupling: 1.0,
            intra_time: 0.0,
        };
        Self {
            omega_c: 1.0,
            omega_h: 4.0,
            t_c: 0.1,
            t_h: 10.0,
            t_s: 0.5,
            env_cold: env(1.0, 0.1),
            env_hot: env(4.0, 10.0),
            tau_w: 32.0,
            n_levels: 30,
            stationarity_epsilon: 1e-8,
            max_cycles: 2000,
            picture: Picture::Schrodinger,
            work_mode: WorkMode::Finite,
            truncation_tolerance: 1e-6,
            collision_substeps: 1,
            initial_state: None,
        }
    }

    /// Copies the bath frequencies and temperatures into the spin specs.
    pub fn sync_environments(&mut self) {
        self.env_cold.spin = SpinSpec {
            frequency: self.omega_c,
            temperature: self.t_c,
        };
        self.env_hot.spin = SpinSpec {
            frequency: self.omega_h,
            temperature: self.t_h,
        };
    }

    /// Sets `J_ee τ_ee` on both reservoirs, keeping `J_ee = 1`.
    pub fn set_intra_strength(&mut self, strength: f64) {
        for env in [&mut self.env_cold, &mut self.env_hot] {
            env.intra_coupling = 1.0;
            env.intra_time = strength;
        }
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [
            ("omega_c", self.omega_c),
            ("omega_h", self.omega_h),
            ("t_c", self.t_c),
            ("t_h", self.t_h),
            ("t_s", self.t_s),
            ("stationarity_epsilon", self.stationarity_epsilon),
            ("truncation_tolerance", self.truncation_tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.omega_h <= self.omega_c {
            return Err(invalid(
                "omega_h",
                format!("must exceed omega_c ({} ≤ {})", self.omega_h, self.omega_c),
            ));
        }
        if self.t_h <= self.t_c {
            return Err(invalid("t_h", format!("must exceed t_c ({} ≤ {})", self.t_h, self.t_c)));
        }
        if !(self.tau_w.is_finite() && self.tau_w >= 0.0) {
            return Err(invalid("tau_w", format!("must be non-negative, got {}", self.tau_w)));
        }
        if self.n_levels < 2 {
            return Err(invalid(
                "n_levels",
                format!("must be at least 2, got {}", self.n_levels),
            ));
        }
        if self.max_cycles < 1 {
            return Err(invalid("max_cycles", "must be at least 1"));
        }
        if self.collision_substeps < 1 {
            return Err(invalid("collision_substeps", "must be at least 1"));
        }
        self.env_cold.check()?;
        self.env_hot.check()?;
        let matches = |env: &EnvironmentSpec, w: f64, t: f64| env.spin.frequency == w && env.spin.temperature == t;
        if !matches(&self.env_cold, self.omega_c, self.t_c) {
            return Err(invalid(
                "env_cold",
                "spin frequency and temperature must equal omega_c and t_c",
            ));
        }
        if !matches(&self.env_hot, self.omega_h, self.t_h) {
            return Err(invalid(
                "env_hot",
                "spin frequency and temperature must equal omega_h and t_h",
            ));
        }
        if let Some(rho) = &self.initial_state {
            if rho.dims() != [self.n_levels] || rho.labels() != [OSCILLATOR] {
                return Err(Error::DimensionMismatch {
                    left: rho.dim(),
                    right: self.n_levels,
                });
            }
            rho.validate()?;
        }
        Ok(())
    }

    pub fn compression_ramp(&self) -> RampSpec {
        RampSpec {
            omega_start: self.omega_c,
            omega_end: self.omega_h,
            duration: self.tau_w,
        }
    }

    pub fn expansion_ramp(&self) -> RampSpec {
        self.compression_ramp().reversed()
    }

    /// `𝒯 = 2 τ_w + τ_se(cold) + τ_se(hot)`.
    pub fn cycle_duration(&self) -> f64 {
        2.0 * self.tau_w + self.env_cold.collision_time + self.env_hot.collision_time
    }

    /// `1 − ω_c/ω_h`
    pub fn adiabatic_efficiency(&self) -> f64 {
        1.0 - self.omega_c / self.omega_h
    }

    pub fn carnot_efficiency(&self) -> f64 {
        1.0 - self.t_c / self.t_h
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub index: usize,
    /// `E0 … E4` at the stroke boundaries.
    pub energies: [f64; 5],
    pub w_in: f64,
    pub q_in: f64,
    pub w_out: f64,
    pub q_out: f64,
    /// `(W_in + W_out) / Q_in`, `None` when `Q_in` vanishes.
    pub efficiency: Option<f64>,
    pub power: f64,
    pub net_work: f64,
    /// l1 coherence of the engine at the start of each stroke.
    pub coherence_checkpoints: Vec<f64>,
    pub classification: MachineKind,
    /// Largest trace lost to truncation in either work stroke.
    pub truncation_leakage: f64,
}

impl CycleRecord {
    fn from_energies(index: usize, e: [f64; 5], duration: f64) -> Self {
        let w_in = e[0] - e[1];
        let q_in = e[2] - e[1];
        let w_out = e[2] - e[3];
        let q_out = e[4] - e[3];
        let net_work = w_in + w_out;
        let mut r = Self {
            index,
            energies: e,
            w_in,
            q_in,
            w_out,
            q_out,
            efficiency: (q_in.abs() > HEAT_FLOOR).then(|| net_work / q_in),
            power: net_work / duration,
            net_work,
            coherence_checkpoints: Vec::new(),
            classification: MachineKind::Other,
            truncation_leakage: 0.0,
        };
        r.classification = classify_machine(&r);
        r
    }

    /// `(E4 − E0) + (W_in + W_out) − (Q_in + Q_out)`
    pub fn first_law_residual(&self) -> f64 {
        (self.energies[4] - self.energies[0]) + (self.w_in + self.w_out) - (self.q_in + self.q_out)
    }
}

/// Engine for `net_work > 0` with heat in from the hot side and out to the
/// cold side; refrigerator for the reverse flows.
pub fn classify_machine(record: &CycleRecord) -> MachineKind {
    let tol = CLASSIFY_TOL;
    if record.net_work > tol && record.q_in > tol && record.q_out < -tol {
        MachineKind::Engine
    } else if record.net_work < -tol && record.q_out > tol && record.q_in < -tol {
        MachineKind::Refrigerator
    } else {
        MachineKind::Other
    }
}

/// A cycle with its propagators and collision unitaries built once.
#[derive(Debug, Clone)]
pub struct Cycle {
    config: CycleConfig,
    compression: Propagator,
    expansion: Propagator,
    hot: HeatStroke,
    cold: HeatStroke,
}

/// One completed cycle.
#[derive(Debug, Clone)]
pub struct CycleOutcome {
    pub state: EngineEnvState,
    pub record: CycleRecord,
    /// Engine states at the start of each stroke.
    pub boundaries: [DensityMatrix; 4],
}

impl Cycle {
    pub fn new(config: &CycleConfig) -> Result<Self> {
        config.check()?;
        let (compression, expansion) = match config.work_mode {
            WorkMode::Finite => (
                propagator_matrix(&config.compression_ramp(), config.n_levels)?,
                propagator_matrix(&config.expansion_ramp(), config.n_levels)?,
            ),
            WorkMode::Adiabatic => (
                Propagator::adiabatic(&config.compression_ramp(), config.n_levels)?,
                Propagator::adiabatic(&config.expansion_ramp(), config.n_levels)?,
            ),
        };
        let k = config.collision_substeps;
        let hot = HeatStroke::with_substeps(
            Side::Hot,
            &config.env_hot,
            &FockSpace::new(config.n_levels, config.omega_h)?,
            k,
        )?;
        let cold = HeatStroke::with_substeps(
            Side::Cold,
            &config.env_cold,
            &FockSpace::new(config.n_levels, config.omega_c)?,
            k,
        )?;
        Ok(Self {
            config: config.clone(),
            compression,
            expansion,
            hot,
            cold,
        })
    }

    pub fn config(&self) -> &CycleConfig {
        &self.config
    }

    pub fn compression(&self) -> &Propagator {
        &self.compression
    }

    pub fn expansion(&self) -> &Propagator {
        &self.expansion
    }

    /// Initial engine state with thermal memory particles.
    pub fn initial_state(&self) -> Result<EngineEnvState> {
        match &self.config.initial_state {
            Some(rho) => self.state_from_engine(rho),
            None => {
                let rho = FockSpace::new(self.config.n_levels, self.config.omega_c)?.thermal_state(self.config.t_s)?;
                self.state_from_engine(&rho)
            }
        }
    }

    /// Attach thermal memory particles to an engine state at `ω_c`.
    pub fn state_from_engine(&self, engine: &DensityMatrix) -> Result<EngineEnvState> {
        if engine.dims() != [self.config.n_levels] {
            return Err(Error::DimensionMismatch {
                left: engine.dim(),
                right: self.config.n_levels,
            });
        }
        EngineEnvState::new(
            engine,
            self.config.omega_c,
            &self.config.env_cold.spin,
            &self.config.env_hot.spin,
        )
    }

    fn work(&self, state: &mut EngineEnvState, u: &Propagator, omega_end: f64) -> Result<f64> {
        let c = &self.config;
        let leaked = state.apply_oscillator(u.matrix(), u.leakage_operator());
        if leaked > c.truncation_tolerance {
            return Err(Error::TruncationHealth {
                context: "work stroke leakage",
                deviation: leaked,
                limit: c.truncation_tolerance,
            });
        }
        state.set_omega(omega_end);
        if c.picture == Picture::Schrodinger {
            state.free_evolve(c.tau_w, None, c.omega_c, c.omega_h);
        }
        Ok(leaked.max(0.0))
    }

    fn heat(
        &self,
        state: &EngineEnvState,
        stroke: &HeatStroke,
        offset: f64,
        observer: &mut dyn FnMut(f64, &EngineEnvState),
    ) -> Result<EngineEnvState> {
        let c = &self.config;
        let mut out = stroke.apply_observed(state, &mut |t, s| observer(offset + t, s))?.state;
        if c.picture == Picture::Schrodinger {
            out.free_evolve(stroke.env().collision_time, Some(out.omega()), c.omega_c, c.omega_h);
        }
        Ok(out)
    }

    pub fn run(&self, state: &EngineEnvState, index: usize) -> Result<CycleOutcome> {
        self.run_observed(state, index, &mut |_, _| {})
    }

    /// Runs one cycle, calling `observer(t, state)` with the time since the
    /// cycle start after every stroke and every collision sub-step.
    pub fn run_observed(
        &self,
        state: &EngineEnvState,
        index: usize,
        observer: &mut dyn FnMut(f64, &EngineEnvState),
    ) -> Result<CycleOutcome> {
        let c = &self.config;
        if (state.omega() - c.omega_c).abs() > 1e-12 * c.omega_c {
            return Err(Error::FrequencyMismatch {
                oscillator: state.omega(),
                spin: c.omega_c,
            });
        }
        let (tw, th, tc) = (c.tau_w, c.env_hot.collision_time, c.env_cold.collision_time);
        let mut e = [0.0; 5];
        let mut leak: f64 = 0.0;

        let rho0 = state.engine();
        e[0] = state.engine_energy();
        let mut s = state.clone();
        leak = leak.max(self.work(&mut s, &self.compression, c.omega_h)?);
        observer(tw, &s);

        let rho1 = s.engine();
        e[1] = s.engine_energy();
        s = self.heat(&s, &self.hot, tw, observer)?;
        observer(tw + th, &s);

        let rho2 = s.engine();
        e[2] = s.engine_energy();
        leak = leak.max(self.work(&mut s, &self.expansion, c.omega_c)?);
        observer(2.0 * tw + th, &s);

        let rho3 = s.engine();
        e[3] = s.engine_energy();
        s = self.heat(&s, &self.cold, 2.0 * tw + th, observer)?;
        e[4] = s.engine_energy();
        observer(2.0 * tw + th + tc, &s);

        let mut record = CycleRecord::from_energies(index, e, c.cycle_duration());
        let boundaries = [rho0, rho1, rho2, rho3];
        record.coherence_checkpoints = boundaries.iter().map(|r| coherence_raw(r.data())).collect();
        record.truncation_leakage = leak;
        Ok(CycleOutcome {
            state: s,
            record,
            boundaries,
        })
    }
}

/// One cycle with freshly prepared unitaries.
pub fn run_cycle(state: &EngineEnvState, cycle: &Cycle, index: usize) -> Result<(EngineEnvState, CycleRecord)> {
    let out = cycle.run(state, index)?;
    Ok((out.state, out.record))
}

#[derive(Debug, Clone)]
pub struct StationaryResult {
    /// Cycles run until the stationarity test passed.
    pub n_infinity: usize,
    pub stationary_record: CycleRecord,
    pub stationary_states: [DensityMatrix; 4],
    /// Trace distance between the last two cycle-start engine states.
    pub final_distance: f64,
}

#[derive(Debug, Clone)]
pub struct StationaryRun {
    pub result: StationaryResult,
    pub records: Vec<CycleRecord>,
    /// Stroke-start engine states of the first cycle.
    pub first_cycle_states: [DensityMatrix; 4],
}

/// Cycles until successive cycle-start engine states are closer than
/// `stationarity_epsilon` in trace distance.
pub fn run_to_stationarity(config: &CycleConfig) -> Result<StationaryRun> {
    let cycle = Cycle::new(config)?;
    run_cycle_to_stationarity(&cycle)
}

pub fn run_cycle_to_stationarity(cycle: &Cycle) -> Result<StationaryRun> {
    let c = cycle.config();
    let mut state = cycle.initial_state()?;
    let mut records = Vec::new();
    let mut first = None;
    let mut distance = f64::INFINITY;
    for index in 0..c.max_cycles {
        let out = cycle.run(&state, index)?;
        let next_start = out.state.engine();
        distance = trace_distance_raw(out.boundaries[0].data(), next_start.data());
        if first.is_none() {
            first = Some(out.boundaries.clone());
        }
        records.push(out.record.clone());
        state = out.state;
        if distance < c.stationarity_epsilon {
            return Ok(StationaryRun {
                result: StationaryResult {
                    n_infinity: index + 1,
                    stationary_record: out.record,
                    stationary_states: out.boundaries,
                    final_distance: distance,
                },
                records,
                first_cycle_states: first.expect("at least one cycle ran"),
            });
        }
    }
    Err(Error::NonConvergence {
        cycles: c.max_cycles,
        distance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrreversibleWork {
    pub compression: f64,
    pub expansion: f64,
    pub total: f64,
}

/// `⟨W_irr⟩ = −(⟨W⟩ − ⟨W_rev⟩)` for both work strokes, with the reversible
/// reference given by the population-preserving map on the same input.
///
/// Work is the two-point-measurement average: the first energy measurement
/// removes the coherences of the input, so both energies are taken from its
/// populations. For a diagonal input this is `ω_end (Q* − 1) ⟨n + 1/2⟩` up to
/// truncation, and never negative.
///
/// `states` are the engine states at the start of each stroke, as in
/// [`StationaryResult::stationary_states`].
pub fn irreversible_work(config: &CycleConfig, states: &[DensityMatrix; 4]) -> Result<IrreversibleWork> {
    config.check()?;
    let n = config.n_levels;
    let one = |ramp: RampSpec, rho: &DensityMatrix| -> Result<f64> {
        let u = propagator_matrix(&ramp, n)?;
        let populations = CMatrix::from_diagonal(&rho.data().diagonal());
        let out = u.apply(&populations);
        let space = FockSpace::new(n, ramp.omega_end)?;
        let e_finite = space.energy(&out);
        let e_rev = space.energy(rho.data());
        Ok(e_finite - e_rev)
    };
    let compression = one(config.compression_ramp(), &states[0])?;
    let expansion = one(config.expansion_ramp(), &states[2])?;
    Ok(IrreversibleWork {
        compression,
        expansion,
        total: compression + expansion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTemperature {
    pub temperature: f64,
    /// Set when the energy is at (or numerically below) the zero-point value.
    pub ground_state: bool,
}

/// Temperature of the thermal oscillator state with mean energy `energy`,
/// `T_eff = ω / ln[(2E + ω)/(2E − ω)]`.
pub fn effective_temperature(energy: f64, omega: f64) -> Result<EffectiveTemperature> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(invalid("omega", format!("must be positive, got {omega}")));
    }
    if !energy.is_finite() {
        return Err(invalid("energy", "must be finite"));
    }
    if energy <= 0.5 * omega + 1e-12 {
        return Ok(EffectiveTemperature {
            temperature: 0.0,
            ground_state: true,
        });
    }
    // ln((2E+ω)/(2E−ω)) = ln1p(2ω/(2E−ω)) keeps precision at high energy
    let t = omega / (2.0 * omega / (2.0 * energy - omega)).ln_1p();
    Ok(EffectiveTemperature {
        temperature: t,
        ground_state: false,
    })
}
