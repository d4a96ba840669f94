//! Configuration loading, run dispatch and artifact writing for the
//! command-line binary.
//!
//! Configs are JSON with frequencies in plain GHz (converted to angular
//! units internally), durations in seconds and phases in radians.
//! Unknown keys are rejected. Every run writes its data file
//! atomically; alongside a chosen output path a manifest records the
//! config digest, grid choices and the tolerance constants in force, so
//! a result can be traced to its inputs. Data files are byte-stable
//! across reruns of the same config.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::correlations::{g1, CorrelationGrid, G2_TAIL_TOL, TAIL_TOL};
use crate::dynamics::{
    limit_cycle, LIMIT_CYCLE_TOL, STEP_DOUBLING_TOL,
};
use crate::model::{
    validate_program, EmitterParams, ModulationProgram, SawTone, COMMENSURABILITY_TOL, TAU,
};
use crate::pathways::{enumerate, predict_periodicity, PeriodicityPrediction, PhononProcess};
use crate::spectrum::{
    correlation_harmonics, spectrum_floquet, Spectrum, HARMONIC_CUT, WEIGHT_CUT,
};
use crate::sweeps::{
    calibrate_phase_offset, detuning_time_map, frequency_fan, linspace, phase_sweep,
    PipelineOptions, SweepMap, FLAT_CONTRAST,
};
use crate::{Error, Result};

/// Highest correlation harmonic probed for the manifest diagnostic.
pub const DIAGNOSTIC_HARMONICS: i64 = 16;

/// The run kinds exposed as subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Spectrum,
    PhaseSweep,
    Calibrate,
    DetuningMap,
    FrequencyFan,
    Pathways,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::PhaseSweep => "phase-sweep",
            Kind::Calibrate => "calibrate",
            Kind::DetuningMap => "detuning-map",
            Kind::FrequencyFan => "frequency-fan",
            Kind::Pathways => "pathways",
        }
    }

    fn from_name(name: &str) -> Option<Kind> {
        [
            Kind::Spectrum,
            Kind::PhaseSweep,
            Kind::Calibrate,
            Kind::DetuningMap,
            Kind::FrequencyFan,
            Kind::Pathways,
        ]
        .into_iter()
        .find(|k| k.name() == name)
    }
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn name(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    min: f64,
    max: f64,
    n: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTone {
    #[serde(rename = "freq_GHz")]
    freq_ghz: f64,
    #[serde(rename = "D")]
    d: Option<f64>,
    #[serde(rename = "delta_GHz")]
    delta_ghz: Option<f64>,
    #[serde(default)]
    phase_rad: f64,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGrids {
    #[serde(rename = "omega_GHz")]
    omega_ghz: Option<RawRange>,
    n_phi: Option<usize>,
    #[serde(rename = "omega_s_GHz")]
    omega_s_ghz: Option<Vec<f64>>,
    #[serde(rename = "delta_freq_Hz")]
    delta_freq_hz: Option<RawRange>,
    time_s: Option<RawRange>,
    #[serde(rename = "base_freq_GHz")]
    base_freq_ghz: Option<RawRange>,
    m_min: Option<i64>,
    m_max: Option<i64>,
    max_order: Option<u32>,
    n_t: Option<usize>,
    lag_periods: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(default)]
    normalize: bool,
}

fn default_filter_ghz() -> f64 {
    0.41
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: u32,
    kind: Option<String>,
    #[serde(rename = "gamma_GHz")]
    gamma_ghz: f64,
    #[serde(rename = "gamma_pd_GHz", default)]
    gamma_pd_ghz: f64,
    #[serde(rename = "rabi_GHz")]
    rabi_ghz: f64,
    #[serde(default)]
    laser_detuning: f64,
    #[serde(default)]
    laser_detuning_units: LaserDetuningUnits,
    #[serde(default)]
    tones: Vec<RawTone>,
    #[serde(rename = "base_freq_GHz")]
    base_freq_ghz: Option<f64>,
    #[serde(rename = "filter_GHz", default = "default_filter_ghz")]
    filter_ghz: f64,
    #[serde(default)]
    grids: RawGrids,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Deserialize, Default, Clone, Copy)]
enum LaserDetuningUnits {
    #[default]
    #[serde(rename = "GHz")]
    GigaHertz,
    #[serde(rename = "omega_saw")]
    OmegaSaw,
}

/// Angular frequency in rad/ns for an ordinary frequency in GHz.
fn ghz(v: f64) -> f64 {
    TAU * v
}

/// A fully validated run configuration in internal units.
#[derive(Debug)]
pub struct RunConfig {
    pub params: EmitterParams,
    pub prog: ModulationProgram,
    pub filter_width: f64,
    pub opts: PipelineOptions,
    pub normalize: bool,
    pub kind_hint: Option<Kind>,
    pub config_sha256: String,
    grids: RawGrids,
}

/// Parses and validates a JSON config from text. Schema violations
/// (bad JSON, unknown or missing keys, a bad `kind` or `version`)
/// and unit violations (out-of-domain values) are reported separately.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if raw.version != 1 {
        return Err(Error::Schema(format!(
            "unsupported config version {}, expected 1",
            raw.version
        )));
    }
    let kind_hint = match &raw.kind {
        None => None,
        Some(name) => Some(Kind::from_name(name).ok_or_else(|| {
            Error::Schema(format!(
                "unknown kind {name:?}; expected one of spectrum, phase-sweep, calibrate, detuning-map, frequency-fan, pathways"
            ))
        })?),
    };
    EmitterParams::new(ghz(raw.gamma_ghz), ghz(raw.gamma_pd_ghz), ghz(raw.rabi_ghz), 0.0)?;
    if raw.tones.len() > 2 {
        return Err(Error::Unit(format!(
            "at most two tones are supported, got {}",
            raw.tones.len()
        )));
    }
    let mut tones = Vec::with_capacity(raw.tones.len());
    for (i, tone) in raw.tones.iter().enumerate() {
        let omega = ghz(tone.freq_ghz);
        let amp = match (tone.d, tone.delta_ghz) {
            (Some(d), None) => {
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::Unit(format!("tone {i}: D must be >= 0, got {d}")));
                }
                d * omega
            }
            (None, Some(delta)) => ghz(delta),
            (Some(_), Some(_)) => {
                return Err(Error::Unit(format!(
                    "tone {i}: set exactly one of D and delta_GHz, not both"
                )))
            }
            (None, None) => {
                return Err(Error::Unit(format!("tone {i}: set one of D or delta_GHz")))
            }
        };
        tones.push(SawTone::new(omega, amp, tone.phase_rad)?);
    }
    let base_omega = match (raw.base_freq_ghz, raw.tones.len()) {
        (Some(f), _) => ghz(f),
        (None, 0) => ghz(raw.gamma_ghz),
        (None, 1) => ghz(raw.tones[0].freq_ghz),
        (None, _) => {
            return Err(Error::Unit(
                "base_freq_GHz is required when two tones are given".into(),
            ))
        }
    };
    let prog = validate_program(tones, base_omega)?;
    let laser_detuning = match raw.laser_detuning_units {
        LaserDetuningUnits::GigaHertz => ghz(raw.laser_detuning),
        LaserDetuningUnits::OmegaSaw => raw.laser_detuning * prog.base_omega(),
    };
    let params = EmitterParams::new(
        ghz(raw.gamma_ghz),
        ghz(raw.gamma_pd_ghz),
        ghz(raw.rabi_ghz),
        laser_detuning,
    )?;
    if !(raw.filter_ghz.is_finite() && raw.filter_ghz > 0.0) {
        return Err(Error::Unit(format!(
            "filter_GHz must be finite and > 0, got {}",
            raw.filter_ghz
        )));
    }
    let opts = PipelineOptions {
        n_t: raw.grids.n_t.unwrap_or(256),
        lag_periods: raw.grids.lag_periods.unwrap_or(0),
    };
    if opts.n_t < 64 {
        return Err(Error::Unit(format!("grids.n_t must be >= 64, got {}", opts.n_t)));
    }
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    Ok(RunConfig {
        params,
        prog,
        filter_width: ghz(raw.filter_ghz),
        opts,
        normalize: raw.output.normalize,
        kind_hint,
        config_sha256: format!("{:x}", hasher.finalize()),
        grids: raw.grids,
    })
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("reading {}: {e}", path.display())))?;
    parse_config(&text)
}

/// The data produced by one run.
#[derive(Debug)]
pub enum RunData {
    Spectrum(Spectrum),
    /// Rows are phases, columns the emission frequency grid.
    PhaseMap(SweepMap),
    Calibration {
        phase_rad: f64,
    },
    /// One `(time x detuning)` map per selected emission frequency.
    DetuningMaps {
        omega_s: Vec<f64>,
        maps: Vec<SweepMap>,
    },
    /// Rows are carrier frequencies, columns the emission grid.
    Fan(SweepMap),
    Pathways {
        processes: Vec<(i64, PhononProcess)>,
        predictions: Vec<PeriodicityPrediction>,
    },
}

/// A completed run plus the diagnostics recorded in the manifest.
#[derive(Debug)]
pub struct RunOutput {
    pub data: RunData,
    pub kind: Kind,
    pub n_t: usize,
    pub lag_periods: usize,
    pub kept_harmonics: Option<Vec<i64>>,
}

fn require_range(range: &Option<RawRange>, key: &str) -> Result<Vec<f64>> {
    let range = range
        .as_ref()
        .ok_or_else(|| Error::Schema(format!("grids.{key} is required for this kind")))?;
    if range.n < 2 || !range.min.is_finite() || !range.max.is_finite() || range.max <= range.min {
        return Err(Error::Unit(format!(
            "grids.{key} must have finite min < max and n >= 2"
        )));
    }
    Ok(linspace(range.min, range.max, range.n))
}

/// Executes a run. The config's `kind`, when present, must match.
pub fn run(kind: Kind, config: &RunConfig) -> Result<RunOutput> {
    if let Some(hint) = config.kind_hint {
        if hint != kind {
            return Err(Error::Schema(format!(
                "config is for kind {:?} but the {:?} subcommand was invoked",
                hint.name(),
                kind.name()
            )));
        }
    }
    let lag_periods = if config.opts.lag_periods == 0 {
        crate::sweeps::auto_lag_periods(&config.params, &config.prog, config.filter_width)
    } else {
        config.opts.lag_periods
    };
    let mut kept_harmonics = None;
    let data = match kind {
        Kind::Spectrum => {
            let omega_s: Vec<f64> = require_range(&config.grids.omega_ghz, "omega_GHz")?
                .into_iter()
                .map(ghz)
                .collect();
            let grid = correlation_grid(config, lag_periods)?;
            kept_harmonics = Some(correlation_harmonics(&grid, DIAGNOSTIC_HARMONICS));
            let mut spec = spectrum_floquet(&grid, config.filter_width, &omega_s)?;
            if config.normalize {
                spec.normalize_to_unit_max();
            }
            RunData::Spectrum(spec)
        }
        Kind::PhaseSweep => {
            let omega_s: Vec<f64> = require_range(&config.grids.omega_ghz, "omega_GHz")?
                .into_iter()
                .map(ghz)
                .collect();
            let n_phi = config.grids.n_phi.unwrap_or(32);
            if n_phi < 2 {
                return Err(Error::Unit(format!("grids.n_phi must be >= 2, got {n_phi}")));
            }
            let phases: Vec<f64> = (0..n_phi).map(|i| TAU * i as f64 / n_phi as f64).collect();
            let map = phase_sweep(
                &config.params,
                &config.prog,
                &phases,
                config.filter_width,
                &omega_s,
                &config.opts,
            )?;
            RunData::PhaseMap(normalized_map(map, config.normalize))
        }
        Kind::Calibrate => RunData::Calibration {
            phase_rad: calibrate_phase_offset(
                &config.params,
                &config.prog,
                config.filter_width,
                &config.opts,
            )?,
        },
        Kind::DetuningMap => {
            let omega_s: Vec<f64> = config
                .grids
                .omega_s_ghz
                .as_ref()
                .ok_or_else(|| Error::Schema("grids.omega_s_GHz is required for this kind".into()))?
                .iter()
                .map(|&v| ghz(v))
                .collect();
            let delta: Vec<f64> = require_range(&config.grids.delta_freq_hz, "delta_freq_Hz")?
                .into_iter()
                .map(|hz| ghz(hz * 1e-9))
                .collect();
            let times: Vec<f64> = require_range(&config.grids.time_s, "time_s")?
                .into_iter()
                .map(|s| s * 1e9)
                .collect();
            let maps = detuning_time_map(
                &config.params,
                &config.prog,
                config.filter_width,
                &omega_s,
                &delta,
                &times,
                &config.opts,
            )?;
            let maps = if config.normalize {
                normalize_jointly(maps)
            } else {
                maps
            };
            RunData::DetuningMaps { omega_s, maps }
        }
        Kind::FrequencyFan => {
            let omega_s: Vec<f64> = require_range(&config.grids.omega_ghz, "omega_GHz")?
                .into_iter()
                .map(ghz)
                .collect();
            let bases: Vec<f64> = require_range(&config.grids.base_freq_ghz, "base_freq_GHz")?
                .into_iter()
                .map(ghz)
                .collect();
            let map = frequency_fan(
                &config.params,
                &config.prog,
                config.filter_width,
                &bases,
                &omega_s,
                &config.opts,
            )?;
            RunData::Fan(normalized_map(map, config.normalize))
        }
        Kind::Pathways => {
            let harmonics = config.prog.harmonics();
            if harmonics.len() != 2 {
                return Err(Error::Unit(
                    "pathway analysis needs a two-tone program".into(),
                ));
            }
            let (p, q) = (harmonics[0], harmonics[1]);
            let m_min = config.grids.m_min.unwrap_or(-4);
            let m_max = config.grids.m_max.unwrap_or(4);
            if m_min > m_max {
                return Err(Error::Unit(format!(
                    "grids.m_min {m_min} must be <= grids.m_max {m_max}"
                )));
            }
            let max_order = config.grids.max_order.unwrap_or(4);
            let mut processes = Vec::new();
            let mut predictions = Vec::new();
            for m in m_min..=m_max {
                for process in enumerate(p, q, m, max_order)? {
                    processes.push((m, process));
                }
                predictions.push(predict_periodicity(p, q, m, max_order)?);
            }
            RunData::Pathways { processes, predictions }
        }
    };
    Ok(RunOutput { data, kind, n_t: config.opts.n_t, lag_periods, kept_harmonics })
}

fn correlation_grid(config: &RunConfig, lag_periods: usize) -> Result<CorrelationGrid> {
    let cycle = limit_cycle(&config.params, &config.prog, config.opts.n_t)?;
    g1(&config.params, &config.prog, &cycle, lag_periods)
}

fn normalized_map(map: SweepMap, normalize: bool) -> SweepMap {
    if !normalize {
        return map;
    }
    let max = map.max_value();
    if max > 0.0 {
        map.scaled(1.0 / max)
    } else {
        map
    }
}

fn normalize_jointly(maps: Vec<SweepMap>) -> Vec<SweepMap> {
    let max = maps.iter().map(SweepMap::max_value).fold(0.0, f64::max);
    if max > 0.0 {
        maps.iter().map(|m| m.scaled(1.0 / max)).collect()
    } else {
        maps
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

/// Renders the data payload in the chosen format.
pub fn render(data: &RunData, format: Format) -> String {
    match format {
        Format::Csv => render_csv(data),
        Format::Json => {
            let mut text =
                serde_json::to_string_pretty(&json_value(data)).expect("json rendering");
            text.push('\n');
            text
        }
    }
}

fn render_csv(data: &RunData) -> String {
    let mut out = String::new();
    match data {
        RunData::Spectrum(spec) => {
            out.push_str("omega_s_GHz,intensity\n");
            for (&w, &v) in spec.omega_s().iter().zip(spec.intensity()) {
                let _ = writeln!(out, "{},{}", fmt(w / TAU), fmt(v));
            }
        }
        RunData::PhaseMap(map) => {
            out.push_str("phase_rad,omega_s_GHz,intensity\n");
            for (iy, &phase) in map.y().iter().enumerate() {
                for (ix, &w) in map.x().iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        fmt(phase),
                        fmt(w / TAU),
                        fmt(map.value(iy, ix))
                    );
                }
            }
        }
        RunData::Calibration { phase_rad } => {
            out.push_str("phase_rad\n");
            let _ = writeln!(out, "{}", fmt(*phase_rad));
        }
        RunData::DetuningMaps { omega_s, maps } => {
            out.push_str("omega_s_GHz,delta_freq_Hz,time_s,intensity\n");
            for (&w, map) in omega_s.iter().zip(maps) {
                for (iy, &dw) in map.y().iter().enumerate() {
                    for (ix, &t) in map.x().iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{},{},{},{}",
                            fmt(w / TAU),
                            fmt(dw / TAU * 1e9),
                            fmt(t * 1e-9),
                            fmt(map.value(iy, ix))
                        );
                    }
                }
            }
        }
        RunData::Fan(map) => {
            out.push_str("base_freq_GHz,omega_s_GHz,intensity\n");
            for (iy, &base) in map.y().iter().enumerate() {
                for (ix, &w) in map.x().iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{}",
                        fmt(base / TAU),
                        fmt(w / TAU),
                        fmt(map.value(iy, ix))
                    );
                }
            }
        }
        RunData::Pathways { processes, .. } => {
            out.push_str("sideband,net1,net2,loops1,loops2,order,phase_multiplier\n");
            for (m, pr) in processes {
                let _ = writeln!(
                    out,
                    "{m},{},{},{},{},{},{}",
                    pr.net1,
                    pr.net2,
                    pr.loops1,
                    pr.loops2,
                    pr.order(),
                    pr.phase_multiplier()
                );
            }
        }
    }
    out
}

fn json_value(data: &RunData) -> serde_json::Value {
    use serde_json::json;
    match data {
        RunData::Spectrum(spec) => json!({
            "omega_s_GHz": spec.omega_s().iter().map(|w| w / TAU).collect::<Vec<_>>(),
            "intensity": spec.intensity(),
        }),
        RunData::PhaseMap(map) => json!({
            "phase_rad": map.y(),
            "omega_s_GHz": map.x().iter().map(|w| w / TAU).collect::<Vec<_>>(),
            "intensity": (0..map.y().len()).map(|iy| map.row(iy).to_vec()).collect::<Vec<_>>(),
        }),
        RunData::Calibration { phase_rad } => json!({ "phase_rad": phase_rad }),
        RunData::DetuningMaps { omega_s, maps } => json!({
            "omega_s_GHz": omega_s.iter().map(|w| w / TAU).collect::<Vec<_>>(),
            "delta_freq_Hz": maps[0].y().iter().map(|dw| dw / TAU * 1e9).collect::<Vec<_>>(),
            "time_s": maps[0].x().iter().map(|t| t * 1e-9).collect::<Vec<_>>(),
            "intensity": maps
                .iter()
                .map(|m| (0..m.y().len()).map(|iy| m.row(iy).to_vec()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        }),
        RunData::Fan(map) => json!({
            "base_freq_GHz": map.y().iter().map(|w| w / TAU).collect::<Vec<_>>(),
            "omega_s_GHz": map.x().iter().map(|w| w / TAU).collect::<Vec<_>>(),
            "intensity": (0..map.y().len()).map(|iy| map.row(iy).to_vec()).collect::<Vec<_>>(),
        }),
        RunData::Pathways { processes, predictions } => json!({
            "processes": processes.iter().map(|(m, pr)| json!({
                "sideband": m,
                "net1": pr.net1,
                "net2": pr.net2,
                "loops1": pr.loops1,
                "loops2": pr.loops2,
                "order": pr.order(),
                "phase_multiplier": pr.phase_multiplier(),
            })).collect::<Vec<_>>(),
            "predictions": predictions.iter().map(|p| json!({
                "sideband": p.sideband,
                "min_order": p.min_order,
                "min_phase_order": p.min_phase_order,
                "periodicities_rad": p.periodicities(),
                "components": p.components.iter().map(|c| json!({
                    "k": c.k,
                    "period_rad": c.period,
                    "min_pair_order": c.min_pair_order,
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        }),
    }
}

fn manifest_json(output: &RunOutput, config: &RunConfig, data_path: &Path, format: Format, wall_ms: u128) -> serde_json::Value {
    use serde_json::json;
    json!({
        "version": 1,
        "kind": output.kind.name(),
        "config_sha256": config.config_sha256,
        "output": data_path.display().to_string(),
        "format": format.name(),
        "normalize": config.normalize,
        "n_t": output.n_t,
        "lag_periods": output.lag_periods,
        "kept_harmonics": output.kept_harmonics,
        "tolerances": {
            "limit_cycle": LIMIT_CYCLE_TOL,
            "step_doubling": STEP_DOUBLING_TOL,
            "g1_tail": TAIL_TOL,
            "g2_tail": G2_TAIL_TOL,
            "weight_cut": WEIGHT_CUT,
            "harmonic_cut": HARMONIC_CUT,
            "flat_contrast": FLAT_CONTRAST,
            "commensurability": COMMENSURABILITY_TOL,
        },
        "wall_ms": wall_ms,
    })
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut file = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| Error::Io(format!("creating temporary file in {}: {e}", dir.display())))?;
    file.write_all(contents.as_bytes())
        .map_err(|e| Error::Io(format!("writing {}: {e}", path.display())))?;
    file.persist(path)
        .map_err(|e| Error::Io(format!("persisting {}: {e}", path.display())))?;
    Ok(())
}

/// Loads the config, executes the run and writes the artifacts. With an
/// output path the data file is written atomically and a
/// `<out>.manifest.json` is placed beside it; without one the data goes
/// to stdout and no manifest is written.
pub fn execute(kind: Kind, config_path: &Path, out: Option<&Path>, format: Format) -> Result<()> {
    let started = Instant::now();
    let config = load_config(config_path)?;
    let output = run(kind, &config)?;
    let rendered = render(&output.data, format);
    match out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => {
            write_atomic(path, &rendered)?;
            let manifest = manifest_json(
                &output,
                &config,
                path,
                format,
                started.elapsed().as_millis(),
            );
            let mut manifest_path = path.as_os_str().to_owned();
            manifest_path.push(".manifest.json");
            let mut text =
                serde_json::to_string_pretty(&manifest).expect("manifest rendering");
            text.push('\n');
            write_atomic(Path::new(&manifest_path), &text)
        }
    }
}
