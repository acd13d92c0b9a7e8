//! Sweep execution.

use std::time::Instant;

use otto_core::analysis::{
    backflow_measure, backflow_trajectory, coherence_decay_time, coherence_trajectory, make_pair,
};
use otto_core::cycle::{effective_temperature, irreversible_work, run_to_stationarity, StationaryRun};
use otto_core::workstroke::ramp_qstar;
use otto_core::CycleConfig;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::CliError;
use crate::spec::{AnalysisOptions, ExperimentSpec, IrreversibleAt, RowKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: serde_json::Value,
}

impl ResultTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column(name).map(|c| &self.rows[row][c])
    }

    /// Numeric column, `None` where the cell is empty.
    pub fn numbers(&self, name: &str) -> Vec<Option<f64>> {
        let c = self.column(name).expect("known column");
        self.rows.iter().map(|r| r[c].as_f64()).collect()
    }
}

/// Column names of a row kind, after the swept parameter.
pub fn columns(kind: RowKind) -> &'static [&'static str] {
    match kind {
        RowKind::Qstar => &["qstar", "error"],
        RowKind::Stationary => &[
            "efficiency",
            "power",
            "n_infinity",
            "net_work",
            "w_in",
            "q_in",
            "w_out",
            "q_out",
            "classification",
            "t_eff_hot",
            "t_eff_cold",
            "max_leakage",
            "final_distance",
            "error",
        ],
        RowKind::Irreversible => &[
            "qstar",
            "w_irr_compression",
            "w_irr_expansion",
            "w_irr_total",
            "n_infinity",
            "error",
        ],
        RowKind::Backflow => &["alpha", "n_measure", "cycles", "stationary", "max_increment", "error"],
        RowKind::Coherence => &[
            "alpha",
            "decay_time_plus",
            "decay_time_minus",
            "final_coherence_plus",
            "final_coherence_minus",
            "error",
        ],
    }
}

fn stationary_cells(config: &CycleConfig, run: &StationaryRun) -> Result<Vec<Cell>, otto_core::Error> {
    let r = &run.result.stationary_record;
    let c = |x: f64| Cell::Num(x);
    let t_hot = effective_temperature(r.energies[2], config.omega_h)?;
    let t_cold = effective_temperature(r.energies[4], config.omega_c)?;
    let leak = run.records.iter().map(|r| r.truncation_leakage).fold(0.0, f64::max);
    Ok(vec![
        Cell::opt(r.efficiency),
        c(r.power),
        Cell::Int(run.result.n_infinity as u64),
        c(r.net_work),
        c(r.w_in),
        c(r.q_in),
        c(r.w_out),
        c(r.q_out),
        Cell::Text(r.classification.to_string()),
        c(t_hot.temperature),
        c(t_cold.temperature),
        c(leak),
        c(run.result.final_distance),
    ])
}

fn compute(kind: RowKind, config: &CycleConfig, analysis: &AnalysisOptions) -> Result<Vec<Cell>, otto_core::Error> {
    match kind {
        RowKind::Qstar => Ok(vec![Cell::Num(ramp_qstar(&config.compression_ramp())?)]),
        RowKind::Stationary => stationary_cells(config, &run_to_stationarity(config)?),
        RowKind::Irreversible => {
            let run = run_to_stationarity(config)?;
            let states = match analysis.irreversible_at {
                IrreversibleAt::Stationary => &run.result.stationary_states,
                IrreversibleAt::FirstCycle => &run.first_cycle_states,
            };
            let w = irreversible_work(config, states)?;
            Ok(vec![
                Cell::Num(ramp_qstar(&config.compression_ramp())?),
                Cell::Num(w.compression),
                Cell::Num(w.expansion),
                Cell::Num(w.total),
                Cell::Int(run.result.n_infinity as u64),
            ])
        }
        RowKind::Backflow => {
            let pair = make_pair(analysis.alpha, analysis.fock_index, config.n_levels)?;
            let trace = match analysis.n_cycles {
                Some(n) => backflow_trajectory(config, &pair, n)?,
                None => backflow_measure(config, &pair)?,
            };
            Ok(vec![
                Cell::Num(analysis.alpha),
                Cell::Num(trace.n_measure),
                Cell::Int(trace.cycles as u64),
                Cell::Bool(trace.stationary),
                Cell::Num(trace.max_increment()),
            ])
        }
        RowKind::Coherence => {
            let pair = make_pair(analysis.alpha, analysis.fock_index, config.n_levels)?;
            let mut cells = vec![Cell::Num(analysis.alpha)];
            let mut finals = Vec::new();
            for state in &pair.states {
                let traj = coherence_trajectory(config, state, analysis.coherence_cycles)?;
                cells.push(Cell::opt(coherence_decay_time(&traj, analysis.coherence_threshold)));
                finals.push(Cell::Num(traj.last().map_or(0.0, |p| p.1)));
            }
            cells.extend(finals);
            Ok(cells)
        }
    }
}

fn row(spec: &ExperimentSpec, value: f64) -> Vec<Cell> {
    let kind = spec.preset.kind();
    let width = columns(kind).len();
    let mut out = vec![Cell::Num(value)];
    let (mut config, mut analysis) = (spec.base.clone(), spec.analysis.clone());
    let result = spec
        .sweep
        .parameter
        .apply(&mut config, &mut analysis, value)
        .map_err(|m| m.to_string())
        .and_then(|()| compute(kind, &config, &analysis).map_err(|e| e.to_string()));
    match result {
        Ok(cells) => {
            out.extend(cells);
            out.push(Cell::Empty);
        }
        Err(message) => {
            out.extend(std::iter::repeat_n(Cell::Empty, width - 1));
            out.push(Cell::Text(message));
        }
    }
    out
}

/// Runs every grid point, in parallel on `jobs` workers (all cores when
/// `None`). Rows come back in grid order.
pub fn run_experiment(spec: &ExperimentSpec, jobs: Option<usize>) -> Result<ResultTable, CliError> {
    spec.check()
        .map_err(|(key, message)| CliError::Output(format!("invalid spec, {key}: {message}")))?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| CliError::Output(e.to_string()))?;
    let rows: Vec<Vec<Cell>> = pool.install(|| spec.sweep.values.par_iter().map(|&v| row(spec, v)).collect());
    let kind = spec.preset.kind();
    let mut names = vec![spec.sweep.parameter.name().to_string()];
    names.extend(columns(kind).iter().map(|s| s.to_string()));
    let meta = json!({
        "preset": spec.preset.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "columns": names,
        "sweep": spec.sweep,
        "config": spec.base,
        "analysis": spec.analysis,
        "spec": spec.to_toml(),
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    Ok(ResultTable {
        columns: names,
        rows,
        meta,
    })
}
