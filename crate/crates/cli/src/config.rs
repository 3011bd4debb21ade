//! Run configuration: parsing, defaults, validation and the resolved copy
//! written next to every output.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use nvespin::eseem::{CombineMode, ManifoldPair, TauGrid, TransitionSelection};
use nvespin::io::Quadrature;
use nvespin::sigproc::FtWindow;
use nvespin::spectra::{Polarization, PopulationSet};
use nvespin::spin::{rotate_field, EulerAngles, SpinSystem};

use crate::error::{CliError, CliResult};
use crate::presets;
use crate::samples::{self, SampleRecord};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 0;
const DEFAULT_SYSTEM: &str = "nv-14N";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Label of a sample in the registry; outputs are annotated with it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<String>,
    /// Sample registry CSV; the bundled registry is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[serde(default = "default_mw")]
    pub mw_frequency_ghz: f64,
    #[serde(default)]
    pub system: SystemConfig,
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub eseem: EseemConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub fit: FitConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            seed: None,
            sample: None,
            registry: None,
            mw_frequency_ghz: default_mw(),
            system: SystemConfig::default(),
            field: FieldConfig::default(),
            selection: SelectionConfig::default(),
            spectrum: SpectrumConfig::default(),
            eseem: EseemConfig::default(),
            scan: ScanConfig::default(),
            fit: FitConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn default_mw() -> f64 {
    9.6
}

/// Exactly one of `preset`, `file` or `definition` names the spin system.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub definition: Option<SpinSystem>,
}

/// Field direction, either a bundled `orientation` or an explicit
/// `nominal_axis` with `euler_deg` misalignment.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_deg: Option<[f64; 3]>,
    /// Field strength for ESEEM; defaults to the resonance field of the
    /// selected transition at the microwave frequency.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub magnitude_mt: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    #[serde(default = "default_site")]
    pub site: u8,
    #[serde(default = "default_pair")]
    pub pair: ManifoldPair,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            site: default_site(),
            pair: default_pair(),
        }
    }
}

fn default_site() -> u8 {
    1
}

fn default_pair() -> ManifoldPair {
    ManifoldPair::MinusZero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumConfig {
    pub window_mt: [f64; 2],
    pub linewidth_mt: f64,
    pub polarization: Polarization,
    pub grid_points: usize,
    /// (p₊, p₀, p₋) for sites 1 to 4.
    pub populations: [[f64; 3]; 4],
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            window_mt: [1.0, 1500.0],
            linewidth_mt: 0.5,
            polarization: Polarization::Averaged,
            grid_points: 2000,
            populations: [[0.2, 0.6, 0.2]; 4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EseemConfig {
    pub tau_start_us: f64,
    pub tau_step_us: f64,
    pub tau_points: usize,
    pub combine: CombineMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_window_ns: Option<f64>,
    pub dead_time_us: f64,
    pub zero_fill: usize,
    pub window: FtWindow,
    /// Peaks below this fraction of the largest |FT| are ignored.
    pub peak_floor: f64,
    /// Traces whose largest |V − mean| is below this are reported as flat,
    /// with no peaks.
    pub flat_tolerance: f64,
    /// Tolerance for ν_i + ν_j = ν_k among the basic peaks of one manifold.
    pub triple_tolerance_mhz: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
}

impl Default for EseemConfig {
    fn default() -> Self {
        let grid = TauGrid::default();
        EseemConfig {
            tau_start_us: grid.start_us,
            tau_step_us: grid.step_us,
            tau_points: grid.points,
            combine: CombineMode::Joint,
            bandwidth_window_ns: None,
            dead_time_us: 0.0,
            zero_fill: nvespin::sigproc::DEFAULT_ZERO_FILL,
            window: FtWindow::Hamming,
            peak_floor: 0.05,
            flat_tolerance: 1e-6,
            triple_tolerance_mhz: 0.02,
            ensemble: None,
        }
    }
}

impl EseemConfig {
    pub fn tau_grid(&self) -> CliResult<TauGrid> {
        TauGrid::new(self.tau_start_us, self.tau_step_us, self.tau_points).map_err(|e| {
            CliError::config(format!("eseem.tau_start_us/tau_step_us/tau_points: {e}"))
        })
    }
}

/// Gaussian spread of the couplings, averaged by Monte Carlo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub hyperfine_fraction: f64,
    pub quadrupole_fraction: f64,
    #[serde(default = "default_ensemble_samples")]
    pub samples: usize,
}

fn default_ensemble_samples() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub range_mt: [f64; 2],
    pub steps: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            range_mt: [100.0, 600.0],
            steps: 51,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<DecayFitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<OrientationFitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<CouplingsFitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_temperature: Option<T2FitConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayFitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// `real` or `magnitude`.
    #[serde(default = "default_quadrature")]
    pub quadrature: String,
    /// (A, T₂ in ms, n); estimated from the data when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<[f64; 3]>,
}

impl Default for DecayFitConfig {
    fn default() -> Self {
        DecayFitConfig {
            data: None,
            quadrature: default_quadrature(),
            initial: None,
        }
    }
}

fn default_quadrature() -> String {
    "real".into()
}

impl DecayFitConfig {
    pub fn quadrature(&self) -> CliResult<Quadrature> {
        self.quadrature
            .parse()
            .map_err(|e| CliError::config(format!("fit.decay.quadrature: {e}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrientationFitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// Misalignment to start from; the nominal axis comes from `[field]`.
    #[serde(default)]
    pub initial_euler_deg: [f64; 3],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingsFitConfig {
    /// (A∥, A⊥, P∥) in MHz; the nitrogen of `[system]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<[f64; 3]>,
    #[serde(default)]
    pub observations: Vec<ObservationConfig>,
}

/// One frequency file with the field setting it was measured at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservationConfig {
    pub data: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_deg: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_mt: Option<f64>,
    #[serde(default = "default_site")]
    pub site: u8,
    #[serde(default = "default_pair")]
    pub pair: ManifoldPair,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T2FitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub initial: FluctuatorStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FluctuatorStart {
    pub e_a_mev: f64,
    pub tau_0_s: f64,
    pub delta_mrad_s: f64,
    pub t2_bath_ms: f64,
}

impl Default for FluctuatorStart {
    fn default() -> Self {
        FluctuatorStart {
            e_a_mev: 2.0,
            tau_0_s: 1e-4,
            delta_mrad_s: 2e-3,
            t2_bath_ms: 0.6,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Also write the intermediate stages of the ESEEM pipeline.
    pub dump_intermediates: bool,
}

/// Which data file a `--data` override applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataTarget {
    Decay,
    Orientation,
    T2Temperature,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub data: Option<(DataTarget, PathBuf)>,
}

/// A configuration with every choice made explicit.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub system: SpinSystem,
    pub system_origin: String,
    pub nominal_axis: Vector3<f64>,
    pub euler: EulerAngles,
    pub sample: Option<SampleRecord>,
}

impl Resolved {
    pub fn seed(&self) -> u64 {
        self.config.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn direction(&self) -> Vector3<f64> {
        rotate_field(&self.nominal_axis, &self.euler)
    }

    pub fn selection(&self) -> CliResult<TransitionSelection> {
        selection(
            self.config.selection.site,
            self.config.selection.pair,
            "selection.site",
        )
    }

    pub fn populations(&self) -> CliResult<[PopulationSet; 4]> {
        let mut out = [PopulationSet::equal(); 4];
        for (k, p) in self.config.spectrum.populations.iter().enumerate() {
            out[k] = PopulationSet::new(p[0], p[1], p[2])
                .map_err(|e| CliError::config(format!("spectrum.populations[{k}]: {e}")))?;
        }
        Ok(out)
    }

    /// TOML text of the resolved configuration.
    pub fn to_toml(&self) -> CliResult<String> {
        let body = toml::to_string(&self.config)
            .map_err(|e| CliError::Output(format!("cannot serialize the resolved config: {e}")))?;
        Ok(format!(
            "# Resolved configuration; rerunning with it reproduces these outputs.\n\n{body}"
        ))
    }
}

pub fn selection(site: u8, pair: ManifoldPair, key: &str) -> CliResult<TransitionSelection> {
    TransitionSelection::site(site, pair).map_err(|e| CliError::config(format!("{key}: {e}")))
}

/// Reads a configuration file, or the defaults when `path` is `None`.
/// Relative paths inside the file are taken relative to its directory.
pub fn load(path: Option<&Path>) -> CliResult<(RunConfig, PathBuf)> {
    let cwd = std::env::current_dir()
        .map_err(|e| CliError::config(format!("cannot read the working directory: {e}")))?;
    let Some(path) = path else {
        return Ok((RunConfig::default(), cwd));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let config = parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    let base = path.parent().map(|p| cwd.join(p)).unwrap_or(cwd);
    Ok((config, base))
}

pub fn parse(text: &str) -> CliResult<RunConfig> {
    // check the version first so that an old file gets a clear message
    // instead of an unknown-key error
    let table: toml::Table = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
    match table.get("schema_version") {
        None => {
            return Err(CliError::config(
                "schema_version: missing, expected schema_version = 1",
            ))
        }
        Some(toml::Value::Integer(v)) if *v == SCHEMA_VERSION as i64 => {}
        Some(other) => {
            return Err(CliError::config(format!(
            "schema_version: unsupported value {other}, this build reads version {SCHEMA_VERSION}"
        )))
        }
    }
    toml::from_str(text).map_err(|e| CliError::config(e.to_string()))
}

fn absolute(base: &Path, p: &Path) -> CliResult<PathBuf> {
    std::path::absolute(base.join(p))
        .map_err(|e| CliError::config(format!("cannot resolve path {}: {e}", p.display())))
}

fn finite_positive(value: f64, key: &str) -> CliResult<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{key}: must be a positive number, got {value}"
        )))
    }
}

/// Nominal axis and misalignment from either a bundled orientation or
/// explicit values; `prefix` names the table in error messages.
fn field_setting(
    orientation: Option<&str>,
    nominal_axis: Option<[f64; 3]>,
    euler_deg: Option<[f64; 3]>,
    prefix: &str,
) -> CliResult<([f64; 3], [f64; 3])> {
    let (axis, euler) = match orientation {
        Some(name) => {
            if nominal_axis.is_some() || euler_deg.is_some() {
                return Err(CliError::config(format!(
                    "{prefix}.orientation: cannot be combined with {prefix}.nominal_axis or {prefix}.euler_deg"
                )));
            }
            let (axis, e) = presets::orientation(name).map_err(|_| {
                CliError::config(format!(
                    "{prefix}.orientation: unknown orientation {name:?}, expected 001, 110 or 111"
                ))
            })?;
            (axis, [e.alpha, e.beta, e.gamma])
        }
        None => (
            nominal_axis.unwrap_or([0.0, 0.0, 1.0]),
            euler_deg.unwrap_or([0.0; 3]),
        ),
    };
    let norm = Vector3::from(axis).norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(CliError::config(format!(
            "{prefix}.nominal_axis: must be a non-zero finite vector"
        )));
    }
    if euler.iter().any(|a| !a.is_finite()) {
        return Err(CliError::config(format!(
            "{prefix}.euler_deg: angles must be finite"
        )));
    }
    Ok((axis, euler))
}

/// Fills in every default, loads the spin system and the sample record,
/// and validates values that the schema alone cannot.
pub fn resolve(mut config: RunConfig, base: &Path, overrides: &Overrides) -> CliResult<Resolved> {
    if let Some(seed) = overrides.seed {
        config.seed = Some(seed);
    }
    config.seed.get_or_insert(DEFAULT_SEED);
    if let Some((target, path)) = &overrides.data {
        // a command-line path is relative to the working directory
        let path = std::path::absolute(path).map_err(|e| {
            CliError::config(format!("--data: cannot resolve {}: {e}", path.display()))
        })?;
        match target {
            DataTarget::Decay => {
                config.fit.decay.get_or_insert_with(Default::default).data = Some(path)
            }
            DataTarget::Orientation => {
                config
                    .fit
                    .orientation
                    .get_or_insert_with(Default::default)
                    .data = Some(path)
            }
            DataTarget::T2Temperature => {
                config
                    .fit
                    .t2_temperature
                    .get_or_insert_with(Default::default)
                    .data = Some(path)
            }
        }
    } else {
        for data in [
            config.fit.decay.as_mut().and_then(|f| f.data.as_mut()),
            config
                .fit
                .orientation
                .as_mut()
                .and_then(|f| f.data.as_mut()),
            config
                .fit
                .t2_temperature
                .as_mut()
                .and_then(|f| f.data.as_mut()),
        ]
        .into_iter()
        .flatten()
        {
            *data = absolute(base, data)?;
        }
    }
    if let Some(c) = config.fit.couplings.as_mut() {
        for obs in c.observations.iter_mut() {
            obs.data = absolute(base, &obs.data)?;
        }
    }

    // spin system
    let sys_cfg = std::mem::take(&mut config.system);
    let (system, system_origin) = match (sys_cfg.preset, sys_cfg.file, sys_cfg.definition) {
        (None, None, None) => (
            presets::system(DEFAULT_SYSTEM)?,
            format!("preset {DEFAULT_SYSTEM}"),
        ),
        (Some(name), None, None) => (presets::system(&name)?, format!("preset {name}")),
        (None, Some(file), None) => {
            let file = absolute(base, &file)?;
            let text = std::fs::read_to_string(&file).map_err(|e| {
                CliError::config(format!("system.file: cannot read {}: {e}", file.display()))
            })?;
            (
                presets::parse_system(&text, &format!("system.file {}", file.display()))?,
                format!("file {}", file.display()),
            )
        }
        (None, None, Some(sys)) => (sys, "definition".to_string()),
        _ => {
            return Err(CliError::config(
                "system: set exactly one of system.preset, system.file or system.definition",
            ))
        }
    };
    config.system.definition = Some(system.clone());

    // field
    finite_positive(config.mw_frequency_ghz, "mw_frequency_ghz")?;
    let (axis, euler) = field_setting(
        config.field.orientation.as_deref(),
        config.field.nominal_axis,
        config.field.euler_deg,
        "field",
    )?;
    config.field.orientation = None;
    config.field.nominal_axis = Some(axis);
    config.field.euler_deg = Some(euler);
    if let Some(b) = config.field.magnitude_mt {
        finite_positive(b, "field.magnitude_mt")?;
    }
    selection(
        config.selection.site,
        config.selection.pair,
        "selection.site",
    )?;

    // per-command sections
    let s = &config.spectrum;
    if !(s.window_mt[0].is_finite()
        && s.window_mt[1].is_finite()
        && s.window_mt[0] >= 0.0
        && s.window_mt[1] > s.window_mt[0])
    {
        return Err(CliError::config(format!(
            "spectrum.window_mt: need 0 <= low < high, got {:?}",
            s.window_mt
        )));
    }
    finite_positive(s.linewidth_mt, "spectrum.linewidth_mt")?;
    if s.grid_points < 2 {
        return Err(CliError::config("spectrum.grid_points: must be at least 2"));
    }
    let e = &config.eseem;
    e.tau_grid()?;
    if let Some(w) = e.bandwidth_window_ns {
        finite_positive(w, "eseem.bandwidth_window_ns")?;
    }
    if !(e.dead_time_us.is_finite() && e.dead_time_us >= 0.0) {
        return Err(CliError::config("eseem.dead_time_us: must be >= 0"));
    }
    if e.zero_fill == 0 {
        return Err(CliError::config("eseem.zero_fill: must be >= 1"));
    }
    if !(e.peak_floor > 0.0 && e.peak_floor < 1.0) {
        return Err(CliError::config("eseem.peak_floor: must lie in (0, 1)"));
    }
    if !(e.flat_tolerance.is_finite() && e.flat_tolerance >= 0.0) {
        return Err(CliError::config("eseem.flat_tolerance: must be >= 0"));
    }
    finite_positive(e.triple_tolerance_mhz, "eseem.triple_tolerance_mhz")?;
    if let Some(ens) = &e.ensemble {
        if !(ens.hyperfine_fraction >= 0.0 && ens.quadrupole_fraction >= 0.0) {
            return Err(CliError::config("eseem.ensemble: fractions must be >= 0"));
        }
        if ens.samples == 0 {
            return Err(CliError::config("eseem.ensemble.samples: must be >= 1"));
        }
    }
    let sc = &config.scan;
    if !(sc.range_mt[0] >= 0.0 && sc.range_mt[1] > sc.range_mt[0] && sc.range_mt[1].is_finite()) {
        return Err(CliError::config(format!(
            "scan.range_mt: need 0 <= low < high, got {:?}",
            sc.range_mt
        )));
    }
    if sc.steps < 2 {
        return Err(CliError::config("scan.steps: must be at least 2"));
    }
    if let Some(d) = &config.fit.decay {
        d.quadrature()?;
        if let Some(init) = d.initial {
            if init.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(CliError::config(
                    "fit.decay.initial: (A, T2, n) must be positive",
                ));
            }
        }
    }
    if let Some(o) = &config.fit.orientation {
        if o.initial_euler_deg.iter().any(|a| !a.is_finite()) {
            return Err(CliError::config(
                "fit.orientation.initial_euler_deg: angles must be finite",
            ));
        }
    }
    if let Some(c) = config.fit.couplings.as_mut() {
        for (k, obs) in c.observations.iter_mut().enumerate() {
            let prefix = format!("fit.couplings.observations[{k}]");
            let (axis, euler) = field_setting(
                obs.orientation.as_deref(),
                obs.nominal_axis,
                obs.euler_deg,
                &prefix,
            )?;
            obs.orientation = None;
            obs.nominal_axis = Some(axis);
            obs.euler_deg = Some(euler);
            if let Some(b) = obs.field_mt {
                finite_positive(b, &format!("{prefix}.field_mt"))?;
            }
            selection(obs.site, obs.pair, &format!("{prefix}.site"))?;
        }
        if c.initial.is_none() {
            let n = system
                .nuclei()
                .iter()
                .find(|n| n.quadrupole().is_some())
                .ok_or_else(|| {
                    CliError::config("fit.couplings: the spin system has no nitrogen to fit")
                })?;
            let q = n.quadrupole().expect("checked above");
            c.initial = Some([
                n.hyperfine().parallel(),
                n.hyperfine().perpendicular(),
                q.parallel(),
            ]);
        }
    }
    if let Some(t) = &config.fit.t2_temperature {
        let i = &t.initial;
        for (v, key) in [
            (i.e_a_mev, "e_a_mev"),
            (i.tau_0_s, "tau_0_s"),
            (i.delta_mrad_s, "delta_mrad_s"),
            (i.t2_bath_ms, "t2_bath_ms"),
        ] {
            finite_positive(v, &format!("fit.t2_temperature.initial.{key}"))?;
        }
    }

    // sample
    let sample = match &config.sample {
        None => None,
        Some(label) => {
            let records = match &config.registry {
                None => samples::parse_registry(samples::BUNDLED_REGISTRY, "bundled registry")?,
                Some(p) => {
                    let p = absolute(base, p)?;
                    let text = std::fs::read_to_string(&p).map_err(|e| {
                        CliError::config(format!("registry: cannot read {}: {e}", p.display()))
                    })?;
                    config.registry = Some(p.clone());
                    samples::parse_registry(&text, &p.display().to_string())?
                }
            };
            Some(samples::find(&records, label)?.clone())
        }
    };

    Ok(Resolved {
        nominal_axis: Vector3::from(axis),
        euler: EulerAngles::new(euler[0], euler[1], euler[2]),
        config,
        system,
        system_origin,
        sample,
    })
}
