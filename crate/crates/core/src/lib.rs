//! Finite-time quantum Otto engine with a harmonic working medium.
//!
//! The working medium is a truncated harmonic oscillator. Work strokes are
//! frequency ramps implemented through the exact time-dependent oscillator
//! propagator; heat strokes are resonant Jaynes–Cummings collisions with
//! spin-1/2 reservoir particles, optionally followed by partial-swap
//! collisions inside the reservoir that carry memory from one stroke to the
//! next.
//!
//! Module map:
//!
//! - [`qmath`]: dense complex linear algebra, density matrices, metrics.
//! - [`workstroke`]: classical trajectories, the `Q*` factor, propagators.
//! - [`collisions`]: collision unitaries and the heat stroke.
//! - [`cycle`]: the four-stroke cycle, stationarity, thermodynamics.
//! - [`analysis`]: trace-distance backflow and coherence trajectories.
//!
//! Units are `ħ = k_B = m = 1` throughout.

#![forbid(unsafe_code)]

pub mod analysis;
pub mod collisions;
pub mod cycle;
mod error;
pub mod qmath;
pub mod workstroke;

pub use error::{Error, Result};

pub use analysis::{BackflowTrace, TestStatePair};
pub use collisions::{EngineEnvState, EnvironmentSpec, Side};
pub use cycle::{CycleConfig, CycleRecord, MachineKind, StationaryResult};
pub use qmath::{DensityMatrix, FockSpace, SpinSpec, C64};
pub use workstroke::{ClassicalTrajectory, Propagator, RampSpec};
