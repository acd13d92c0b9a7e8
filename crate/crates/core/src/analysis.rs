//! Information backflow and coherence along the cycle.
//!
//! Two engine states are driven through identical cycles (same propagators,
//! same thermal reservoir particles) and their trace distance is sampled at
//! every stroke boundary. The positive part of its time derivative is
//! integrated as a sum of positive increments between checkpoints.

use serde::{Deserialize, Serialize};

use crate::cycle::{Cycle, CycleConfig};
use crate::error::{invalid, Result};
use crate::qmath::{coherence_raw, trace_distance_raw, DensityMatrix, C64, OSCILLATOR};

/// Default Fock index of the test-state superposition.
pub const DEFAULT_FOCK_INDEX: usize = 10;

/// Cycles appended after both trajectories became stationary.
pub const EXTRA_CYCLES: usize = 5;

/// Orthogonal pure pair `cos α|0⟩ + sin α|n⟩`, `sin α|0⟩ − cos α|n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestStatePair {
    pub alpha: f64,
    pub fock_index: usize,
    pub states: [DensityMatrix; 2],
}

pub fn make_pair(alpha: f64, fock_index: usize, n_levels: usize) -> Result<TestStatePair> {
    if fock_index == 0 || fock_index >= n_levels {
        return Err(invalid(
            "fock_index",
            format!("must lie in 1..{n_levels}, got {fock_index}"),
        ));
    }
    if !alpha.is_finite() {
        return Err(invalid("alpha", "must be finite"));
    }
    let (s, c) = alpha.sin_cos();
    let ket = |a: f64, b: f64| {
        let mut v = vec![C64::new(0.0, 0.0); n_levels];
        v[0] = C64::new(a, 0.0);
        v[fock_index] = C64::new(b, 0.0);
        v
    };
    Ok(TestStatePair {
        alpha,
        fock_index,
        states: [
            DensityMatrix::pure(OSCILLATOR, &ket(c, s))?,
            DensityMatrix::pure(OSCILLATOR, &ket(s, -c))?,
        ],
    })
}

/// `α = (π/4)·m/10`, `m = 0 … 10`.
pub fn paper_alpha_grid() -> Vec<f64> {
    (0..=10)
        .map(|m| std::f64::consts::FRAC_PI_4 * m as f64 / 10.0)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackflowTrace {
    /// `(t, D(ρ1(t), ρ2(t)))`, starting at `t = 0`.
    pub checkpoints: Vec<(f64, f64)>,
    /// Cumulative backflow `B(t)` at each checkpoint.
    pub backflow: Vec<f64>,
    /// Final value of `B`.
    pub n_measure: f64,
    pub cycles: usize,
    /// Whether both trajectories reached a stationary cycle.
    pub stationary: bool,
}

impl BackflowTrace {
    fn new() -> Self {
        Self {
            checkpoints: Vec::new(),
            backflow: Vec::new(),
            n_measure: 0.0,
            cycles: 0,
            stationary: false,
        }
    }

    fn push(&mut self, t: f64, d: f64) {
        if let Some(&(_, prev)) = self.checkpoints.last() {
            self.n_measure += (d - prev).max(0.0);
        }
        self.checkpoints.push((t, d));
        self.backflow.push(self.n_measure);
    }

    /// Largest single increase of the distance between checkpoints.
    pub fn max_increment(&self) -> f64 {
        self.checkpoints
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Engine states sampled during one cycle, plus the closing cycle-start
/// distance of the trajectory itself.
fn sampled_cycle(
    cycle: &Cycle,
    state: &mut crate::collisions::EngineEnvState,
    index: usize,
) -> Result<(Vec<(f64, DensityMatrix)>, f64)> {
    let mut samples = Vec::new();
    let out = cycle.run_observed(state, index, &mut |t, s| samples.push((t, s.engine())))?;
    let step = trace_distance_raw(
        out.boundaries[0].data(),
        samples.last().expect("cycle emits checkpoints").1.data(),
    );
    *state = out.state;
    Ok((samples, step))
}

fn run_pair(config: &CycleConfig, pair: &TestStatePair, n_cycles: Option<usize>) -> Result<BackflowTrace> {
    let cycle = Cycle::new(config)?;
    let mut a = cycle.state_from_engine(&pair.states[0])?;
    let mut b = cycle.state_from_engine(&pair.states[1])?;
    let period = config.cycle_duration();
    let mut trace = BackflowTrace::new();
    trace.push(0.0, trace_distance_raw(pair.states[0].data(), pair.states[1].data()));
    let limit = n_cycles.unwrap_or(config.max_cycles);
    let mut remaining: Option<usize> = n_cycles;
    for index in 0..limit {
        let (sa, da) = sampled_cycle(&cycle, &mut a, index)?;
        let (sb, db) = sampled_cycle(&cycle, &mut b, index)?;
        for ((t, ra), (_, rb)) in sa.iter().zip(&sb) {
            trace.push(index as f64 * period + t, trace_distance_raw(ra.data(), rb.data()));
        }
        trace.cycles = index + 1;
        if da.max(db) < config.stationarity_epsilon {
            trace.stationary = true;
            if remaining.is_none() {
                remaining = Some(index + 1 + EXTRA_CYCLES);
            }
        }
        if remaining == Some(index + 1) {
            break;
        }
    }
    Ok(trace)
}

/// Trace-distance trajectory of the pair over `n_cycles` cycles.
pub fn backflow_trajectory(config: &CycleConfig, pair: &TestStatePair, n_cycles: usize) -> Result<BackflowTrace> {
    if n_cycles == 0 {
        return Err(invalid("n_cycles", "must be at least 1"));
    }
    run_pair(config, pair, Some(n_cycles))
}

/// Runs the pair until both trajectories are stationary, then
/// [`EXTRA_CYCLES`] more. Without a stationary cycle the trace stops at
/// `max_cycles` with `stationary` unset.
pub fn backflow_measure(config: &CycleConfig, pair: &TestStatePair) -> Result<BackflowTrace> {
    run_pair(config, pair, None)
}

/// `(t, C(t))` at `t = 0` and every checkpoint of `n_cycles` cycles.
pub fn coherence_trajectory(config: &CycleConfig, initial: &DensityMatrix, n_cycles: usize) -> Result<Vec<(f64, f64)>> {
    let cycle = Cycle::new(config)?;
    let mut state = cycle.state_from_engine(initial)?;
    let period = config.cycle_duration();
    let mut out = vec![(0.0, coherence_raw(initial.data()))];
    for index in 0..n_cycles {
        let (samples, _) = sampled_cycle(&cycle, &mut state, index)?;
        out.extend(
            samples
                .iter()
                .map(|(t, r)| (index as f64 * period + t, coherence_raw(r.data()))),
        );
    }
    Ok(out)
}

/// First time at which the coherence falls below `threshold` and stays there.
pub fn coherence_decay_time(trajectory: &[(f64, f64)], threshold: f64) -> Option<f64> {
    let last_above = trajectory.iter().rposition(|&(_, c)| c >= threshold);
    match last_above {
        None => trajectory.first().map(|p| p.0),
        Some(i) => trajectory.get(i + 1).map(|p| p.0),
    }
}

/// `(cos α, N)` for each α, in the given order.
pub fn alpha_sweep(config: &CycleConfig, alphas: &[f64], fock_index: usize) -> Result<Vec<(f64, f64)>> {
    alphas
        .iter()
        .map(|&alpha| {
            let pair = make_pair(alpha, fock_index, config.n_levels)?;
            Ok((alpha.cos(), backflow_measure(config, &pair)?.n_measure))
        })
        .collect()
}
