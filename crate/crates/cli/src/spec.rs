//! Experiment spec files.
//!
//! A spec is a TOML document with the sections `[engine]`, `[collision]`,
//! `[sweep]`, `[analysis]` and `[output]`, plus a top-level `preset` key.
//! Every key is optional. Values are resolved in this order, later ones
//! winning: the preset's defaults (paper defaults for `custom`), the file,
//! `--set section.key=value` flags, and finally `SIM_N_LEVELS`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use otto_core::cycle::{Picture, WorkMode};
use otto_core::CycleConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const N_LEVELS_ENV: &str = "SIM_N_LEVELS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    QstarCurve,
    EfficiencyVsTauw,
    NitersVsTauw,
    PowerVsTauw,
    Backflow,
    Coherence,
    NitersVsJee,
    EfficiencyPowerVsJee,
    IrreversibleWork,
    TemperatureScan,
    Custom,
}

impl Preset {
    pub const ALL: [Preset; 11] = [
        Preset::QstarCurve,
        Preset::EfficiencyVsTauw,
        Preset::NitersVsTauw,
        Preset::PowerVsTauw,
        Preset::Backflow,
        Preset::Coherence,
        Preset::NitersVsJee,
        Preset::EfficiencyPowerVsJee,
        Preset::IrreversibleWork,
        Preset::TemperatureScan,
        Preset::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::QstarCurve => "qstar-curve",
            Preset::EfficiencyVsTauw => "efficiency-vs-tauw",
            Preset::NitersVsTauw => "niters-vs-tauw",
            Preset::PowerVsTauw => "power-vs-tauw",
            Preset::Backflow => "backflow",
            Preset::Coherence => "coherence",
            Preset::NitersVsJee => "niters-vs-jee",
            Preset::EfficiencyPowerVsJee => "efficiency-power-vs-jee",
            Preset::IrreversibleWork => "irreversible-work",
            Preset::TemperatureScan => "temperature-scan",
            Preset::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::QstarCurve => "Q* against the ramp duration",
            Preset::EfficiencyVsTauw => "stationary efficiency against the work-stroke duration",
            Preset::NitersVsTauw => "cycles to stationarity against the work-stroke duration",
            Preset::PowerVsTauw => "stationary power against the work-stroke duration",
            Preset::Backflow => "information backflow N against the intra-reservoir coupling",
            Preset::Coherence => "coherence lifetime of the test states against the intra-reservoir coupling",
            Preset::NitersVsJee => "cycles to stationarity against the intra-reservoir coupling",
            Preset::EfficiencyPowerVsJee => "efficiency and power against the intra-reservoir coupling",
            Preset::IrreversibleWork => "irreversible work of both work strokes against the duration",
            Preset::TemperatureScan => "machine type against the hot-bath temperature, adiabatic strokes",
            Preset::Custom => "stationary cycle over a user-defined sweep",
        }
    }

    /// Which row computation the preset uses.
    pub fn kind(self) -> RowKind {
        match self {
            Preset::QstarCurve => RowKind::Qstar,
            Preset::Backflow => RowKind::Backflow,
            Preset::Coherence => RowKind::Coherence,
            Preset::IrreversibleWork => RowKind::Irreversible,
            _ => RowKind::Stationary,
        }
    }

    /// Fully resolved default spec.
    pub fn spec(self) -> ExperimentSpec {
        let mut base = CycleConfig::paper_default();
        let tau_grid = vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        let jee_grid: Vec<f64> = [0.0, 0.2, 0.4, 0.65, 1.0]
            .iter()
            .map(|f| f * std::f64::consts::FRAC_PI_4)
            .collect();
        let (parameter, values) = match self {
            Preset::QstarCurve => (SweepParam::TauW, log_grid(0.05, 32.0, 25)),
            Preset::EfficiencyVsTauw | Preset::NitersVsTauw | Preset::PowerVsTauw | Preset::IrreversibleWork => {
                (SweepParam::TauW, tau_grid)
            }
            Preset::Backflow | Preset::Coherence => (SweepParam::IntraStrength, jee_grid),
            Preset::NitersVsJee | Preset::EfficiencyPowerVsJee => {
                base.tau_w = 1.0;
                (SweepParam::IntraStrength, jee_grid)
            }
            Preset::TemperatureScan => {
                base.work_mode = WorkMode::Adiabatic;
                (SweepParam::THot, vec![0.2, 0.3, 0.5, 1.0, 4.0, 10.0])
            }
            Preset::Custom => (SweepParam::TauW, vec![base.tau_w]),
        };
        ExperimentSpec {
            preset: self,
            base,
            sweep: Sweep { parameter, values },
            analysis: AnalysisOptions::default(),
            output: OutputSpec::default(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
            format!("unknown preset `{s}`; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Qstar,
    Stationary,
    Irreversible,
    Backflow,
    Coherence,
}

/// `points` log-spaced values from `start` to `end` inclusive.
pub fn log_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let (a, b) = (start.ln(), end.ln());
    (0..points)
        .map(|i| {
            if i == 0 {
                start
            } else if i + 1 == points {
                end
            } else {
                (a + (b - a) * i as f64 / (points - 1) as f64).exp()
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "tau_w")]
    TauW,
    /// `J_ee τ_ee` on both reservoirs.
    #[serde(rename = "intra_strength")]
    IntraStrength,
    #[serde(rename = "t_h")]
    THot,
    #[serde(rename = "t_c")]
    TCold,
    #[serde(rename = "t_s")]
    TInit,
    #[serde(rename = "omega_h")]
    OmegaHot,
    #[serde(rename = "omega_c")]
    OmegaCold,
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "n_levels")]
    NLevels,
    #[serde(rename = "stationarity_epsilon")]
    StationarityEpsilon,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::TauW => "tau_w",
            SweepParam::IntraStrength => "intra_strength",
            SweepParam::THot => "t_h",
            SweepParam::TCold => "t_c",
            SweepParam::TInit => "t_s",
            SweepParam::OmegaHot => "omega_h",
            SweepParam::OmegaCold => "omega_c",
            SweepParam::Alpha => "alpha",
            SweepParam::NLevels => "n_levels",
            SweepParam::StationarityEpsilon => "stationarity_epsilon",
        }
    }

    /// Sets the parameter on a copy of the base configuration.
    pub fn apply(self, config: &mut CycleConfig, analysis: &mut AnalysisOptions, value: f64) -> Result<(), String> {
        match self {
            SweepParam::TauW => config.tau_w = value,
            SweepParam::IntraStrength => config.set_intra_strength(value),
            SweepParam::THot => config.t_h = value,
            SweepParam::TCold => config.t_c = value,
            SweepParam::TInit => config.t_s = value,
            SweepParam::OmegaHot => config.omega_h = value,
            SweepParam::OmegaCold => config.omega_c = value,
            SweepParam::Alpha => analysis.alpha = value,
            SweepParam::NLevels => {
                if !(value >= 2.0 && value.fract() == 0.0) {
                    return Err(format!("n_levels must be an integer ≥ 2, got {value}"));
                }
                config.n_levels = value as usize;
            }
            SweepParam::StationarityEpsilon => config.stationarity_epsilon = value,
        }
        config.sync_environments();
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub parameter: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IrreversibleAt {
    #[default]
    Stationary,
    FirstCycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Test-state angle for the backflow and coherence presets.
    pub alpha: f64,
    pub fock_index: usize,
    /// Fixed cycle count for backflow runs; unset means until stationary.
    pub n_cycles: Option<usize>,
    pub irreversible_at: IrreversibleAt,
    pub coherence_threshold: f64,
    pub coherence_cycles: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            alpha: std::f64::consts::FRAC_PI_4,
            fock_index: otto_core::analysis::DEFAULT_FOCK_INDEX,
            n_cycles: None,
            irreversible_at: IrreversibleAt::Stationary,
            coherence_threshold: 0.01,
            coherence_cycles: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format `{s}`; expected csv or json")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub base: CycleConfig,
    pub sweep: Sweep,
    pub analysis: AnalysisOptions,
    pub output: OutputSpec,
}

impl ExperimentSpec {
    pub fn check(&self) -> Result<(), (&'static str, String)> {
        self.base.check().map_err(|e| (core_error_key(&e), e.to_string()))?;
        if self.sweep.values.is_empty() {
            return Err(("sweep.values", "sweep grid is empty".into()));
        }
        if let Some(bad) = self.sweep.values.iter().find(|v| !v.is_finite()) {
            return Err(("sweep.values", format!("non-finite grid value {bad}")));
        }
        for &v in &self.sweep.values {
            let (mut c, mut a) = (self.base.clone(), self.analysis.clone());
            self.sweep
                .parameter
                .apply(&mut c, &mut a, v)
                .map_err(|m| ("sweep.values", m))?;
            c.check().map_err(|e| {
                (
                    "sweep.values",
                    format!(
                        "{} = {v} gives an invalid configuration: {e}",
                        self.sweep.parameter.name()
                    ),
                )
            })?;
            if !(0.0..=std::f64::consts::FRAC_PI_4 + 1e-12).contains(&a.alpha) {
                return Err(("analysis.alpha", format!("must lie in [0, π/4], got {}", a.alpha)));
            }
        }
        let a = &self.analysis;
        if matches!(self.preset.kind(), RowKind::Backflow | RowKind::Coherence)
            && (a.fock_index == 0 || a.fock_index >= self.base.n_levels)
        {
            return Err((
                "analysis.fock_index",
                format!("must lie in 1..{}, got {}", self.base.n_levels, a.fock_index),
            ));
        }
        if a.n_cycles == Some(0) {
            return Err(("analysis.n_cycles", "must be at least 1".into()));
        }
        if !(a.coherence_threshold > 0.0) {
            return Err(("analysis.coherence_threshold", "must be positive".into()));
        }
        Ok(())
    }

    /// The spec as a complete file, every key present.
    pub fn to_toml(&self) -> String {
        let b = &self.base;
        let file = SpecFile {
            preset: Some(self.preset.name().to_string()),
            engine: EngineSection {
                omega_c: Some(b.omega_c),
                omega_h: Some(b.omega_h),
                t_c: Some(b.t_c),
                t_h: Some(b.t_h),
                t_s: Some(b.t_s),
                tau_w: Some(b.tau_w),
                n_levels: Some(b.n_levels),
                picture: Some(b.picture),
                work_mode: Some(b.work_mode),
                stationarity_epsilon: Some(b.stationarity_epsilon),
                max_cycles: Some(b.max_cycles),
                truncation_tolerance: Some(b.truncation_tolerance),
                collision_substeps: Some(b.collision_substeps),
            },
            collision: CollisionSection {
                coupling: Some(b.env_hot.coupling),
                collision_time: Some(b.env_hot.collision_time),
                intra_coupling: Some(b.env_hot.intra_coupling),
                intra_time: Some(b.env_hot.intra_time),
            },
            sweep: SweepSection {
                parameter: Some(self.sweep.parameter),
                values: Some(self.sweep.values.clone()),
            },
            analysis: AnalysisSection {
                alpha: Some(self.analysis.alpha),
                fock_index: Some(self.analysis.fock_index),
                n_cycles: self.analysis.n_cycles,
                irreversible_at: Some(self.analysis.irreversible_at),
                coherence_threshold: Some(self.analysis.coherence_threshold),
                coherence_cycles: Some(self.analysis.coherence_cycles),
            },
            output: OutputSection {
                path: self.output.path.clone(),
                format: Some(self.output.format),
            },
        };
        toml::to_string(&file).expect("spec serializes")
    }
}

/// Section and key a core validation error refers to.
fn core_error_key(e: &otto_core::Error) -> &'static str {
    match e {
        otto_core::Error::InvalidParameter { name, .. } => match *name {
            "omega_c" => "engine.omega_c",
            "omega_h" => "engine.omega_h",
            "t_c" => "engine.t_c",
            "t_h" => "engine.t_h",
            "t_s" | "temperature" => "engine.t_s",
            "tau_w" => "engine.tau_w",
            "n_levels" => "engine.n_levels",
            "max_cycles" => "engine.max_cycles",
            "stationarity_epsilon" => "engine.stationarity_epsilon",
            "truncation_tolerance" => "engine.truncation_tolerance",
            "collision_substeps" => "engine.collision_substeps",
            "coupling" => "collision.coupling",
            "intra_coupling" => "collision.intra_coupling",
            _ => "",
        },
        _ => "",
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(default)]
    engine: EngineSection,
    #[serde(default)]
    collision: CollisionSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    analysis: AnalysisSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EngineSection {
    omega_c: Option<f64>,
    omega_h: Option<f64>,
    t_c: Option<f64>,
    t_h: Option<f64>,
    t_s: Option<f64>,
    tau_w: Option<f64>,
    n_levels: Option<usize>,
    picture: Option<Picture>,
    work_mode: Option<WorkMode>,
    stationarity_epsilon: Option<f64>,
    max_cycles: Option<usize>,
    truncation_tolerance: Option<f64>,
    collision_substeps: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CollisionSection {
    coupling: Option<f64>,
    collision_time: Option<f64>,
    intra_coupling: Option<f64>,
    intra_time: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    parameter: Option<SweepParam>,
    values: Option<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisSection {
    alpha: Option<f64>,
    fock_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_cycles: Option<usize>,
    irreversible_at: Option<IrreversibleAt>,
    coherence_threshold: Option<f64>,
    coherence_cycles: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<PathBuf>,
    format: Option<OutputFormat>,
}

fn overlay<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl SpecFile {
    fn resolve(self) -> Result<ExperimentSpec, (&'static str, String)> {
        let preset = match &self.preset {
            Some(p) => p.parse::<Preset>().map_err(|m| ("preset", m))?,
            None => Preset::Custom,
        };
        let mut spec = preset.spec();
        let b = &mut spec.base;
        let e = self.engine;
        overlay(&mut b.omega_c, e.omega_c);
        overlay(&mut b.omega_h, e.omega_h);
        overlay(&mut b.t_c, e.t_c);
        overlay(&mut b.t_h, e.t_h);
        overlay(&mut b.t_s, e.t_s);
        overlay(&mut b.tau_w, e.tau_w);
        overlay(&mut b.n_levels, e.n_levels);
        overlay(&mut b.picture, e.picture);
        overlay(&mut b.work_mode, e.work_mode);
        overlay(&mut b.stationarity_epsilon, e.stationarity_epsilon);
        overlay(&mut b.max_cycles, e.max_cycles);
        overlay(&mut b.truncation_tolerance, e.truncation_tolerance);
        overlay(&mut b.collision_substeps, e.collision_substeps);
        let c = self.collision;
        for env in [&mut b.env_cold, &mut b.env_hot] {
            overlay(&mut env.coupling, c.coupling);
            overlay(&mut env.collision_time, c.collision_time);
            overlay(&mut env.intra_coupling, c.intra_coupling);
            overlay(&mut env.intra_time, c.intra_time);
        }
        b.sync_environments();
        if preset == Preset::Custom && e.tau_w.is_some() && self.sweep.values.is_none() {
            spec.sweep.values = vec![b.tau_w];
        }
        overlay(&mut spec.sweep.parameter, self.sweep.parameter);
        overlay(&mut spec.sweep.values, self.sweep.values);
        let a = self.analysis;
        overlay(&mut spec.analysis.alpha, a.alpha);
        overlay(&mut spec.analysis.fock_index, a.fock_index);
        if a.n_cycles.is_some() {
            spec.analysis.n_cycles = a.n_cycles;
        }
        overlay(&mut spec.analysis.irreversible_at, a.irreversible_at);
        overlay(&mut spec.analysis.coherence_threshold, a.coherence_threshold);
        overlay(&mut spec.analysis.coherence_cycles, a.coherence_cycles);
        if self.output.path.is_some() {
            spec.output.path = self.output.path;
        }
        overlay(&mut spec.output.format, self.output.format);
        Ok(spec)
    }
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Line of `key = …` inside `[section]`, if the file sets it.
fn key_line(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = match dotted.split_once('.') {
        Some((s, k)) => (Some(s), k),
        None => (None, dotted),
    };
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = Some(name.trim().to_string());
            continue;
        }
        let in_section = current.as_deref() == section;
        if let Some((k, _)) = line.split_once('=') {
            let k = k.trim();
            if in_section && k == key {
                return Some(i + 1);
            }
            // dotted keys at the top level, `engine.t_h = …`
            if current.is_none() && section.is_some_and(|s| k == format!("{s}.{key}")) {
                return Some(i + 1);
            }
        }
    }
    None
}

fn parse_override(entry: &str) -> Result<(Vec<String>, toml::Value), String> {
    let (key, raw) = entry
        .split_once('=')
        .ok_or_else(|| format!("override `{entry}` is not of the form key=value"))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_string).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(format!("override `{entry}` has an empty key segment"));
    }
    let raw = raw.trim();
    // bare words are taken as strings, everything else as a TOML value
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    Ok((path, value))
}

fn apply_override(table: &mut toml::Table, path: &[String], value: toml::Value) -> Result<(), String> {
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut t = table;
    for p in parents {
        let entry = t
            .entry(p.clone())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        t = entry.as_table_mut().ok_or_else(|| format!("`{p}` is not a section"))?;
    }
    t.insert(last.clone(), value);
    Ok(())
}

/// Parses, overrides and validates a spec given as text. `n_levels_env` is
/// the raw value of `SIM_N_LEVELS`, if set.
pub fn resolve_text(
    text: &str,
    origin: &Path,
    overrides: &[String],
    n_levels_env: Option<&str>,
) -> Result<ExperimentSpec, CliError> {
    let parse_err = |e: toml::de::Error, src: &str| {
        let (line, column) = e.span().map(|s| line_col(src, s.start)).unwrap_or((0, 0));
        CliError::Parse {
            path: origin.to_path_buf(),
            line,
            column,
            message: e.message().to_string(),
        }
    };
    let mut file: SpecFile = toml::from_str(text).map_err(|e| parse_err(e, text))?;
    if !overrides.is_empty() {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| parse_err(e, text))?;
        for o in overrides {
            let (path, value) = parse_override(o).map_err(CliError::Override)?;
            apply_override(&mut table, &path, value).map_err(CliError::Override)?;
        }
        file = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Override(e.message().to_string()))?;
    }
    let mut spec = file
        .resolve()
        .map_err(|(key, message)| invalid(text, origin, key, message))?;
    if let Some(raw) = n_levels_env {
        spec.base.n_levels = raw.trim().parse().map_err(|_| CliError::Invalid {
            path: origin.to_path_buf(),
            line: None,
            message: format!("{N_LEVELS_ENV}={raw} is not a level count"),
        })?;
    }
    spec.check()
        .map_err(|(key, message)| invalid(text, origin, key, message))?;
    Ok(spec)
}

fn invalid(text: &str, origin: &Path, key: &str, message: String) -> CliError {
    CliError::Invalid {
        path: origin.to_path_buf(),
        line: if key.is_empty() { None } else { key_line(text, key) },
        message: if key.is_empty() {
            message
        } else {
            format!("{key}: {message}")
        },
    }
}

/// Reads and resolves a spec file.
pub fn load_spec(path: &Path, overrides: &[String]) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let env = std::env::var(N_LEVELS_ENV).ok();
    resolve_text(&text, path, overrides, env.as_deref())
}
