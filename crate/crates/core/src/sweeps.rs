//! End-to-end spectrum pipeline and parameter sweeps built on it.
//!
//! Every sweep point follows the same chain: converge the limit cycle,
//! tabulate the first-order correlation, integrate it against the
//! detection filter. Sweeps vary one knob of the modulation program per
//! run; repeated relative phases are evaluated once and reused, keyed
//! on the exact bit pattern, so identical cells are identical in the
//! output.

use std::collections::BTreeMap;

use crate::correlations::g1;
use crate::dynamics::limit_cycle;
use crate::model::{EmitterParams, ModulationProgram, SawTone, validate_program, TAU};
use crate::spectrum::{spectrum_floquet, Spectrum};
use crate::{Error, Result};

/// Number of coarse points used by [`calibrate_phase_offset`].
pub const CALIBRATION_POINTS: usize = 64;
/// Minimum sideband contrast (max-min over max+min) for a phase
/// response to count as structured.
pub const FLAT_CONTRAST: f64 = 0.01;
/// Decay headroom demanded of the auto lag window: the slowest
/// relaxation is given time to shrink by this factor.
pub const LAG_DECAY_FACTOR: f64 = 1e7;

/// Discretization knobs for the pipeline.
#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    /// Cycle grid points per period.
    pub n_t: usize,
    /// Lag window in whole periods; 0 picks the window automatically
    /// from the relaxation rates.
    pub lag_periods: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { n_t: 256, lag_periods: 0 }
    }
}

/// Whole periods needed for the correlation tail to decay below the
/// `g1` gate: enough lifetimes of the slowest relaxation, with a floor
/// tied to the filter and decay widths so short-period programs do not
/// get a vanishing window.
pub fn auto_lag_periods(
    params: &EmitterParams,
    prog: &ModulationProgram,
    filter_width: f64,
) -> usize {
    let slowest = params.gamma.min(params.coherence_decay());
    let span = (LAG_DECAY_FACTOR.ln() / slowest).max(10.0 / params.gamma.min(filter_width));
    (span / prog.period()).ceil() as usize
}

fn resolve(opts: &PipelineOptions, params: &EmitterParams, prog: &ModulationProgram, filter_width: f64) -> (usize, usize) {
    let lag_periods = if opts.lag_periods == 0 {
        auto_lag_periods(params, prog, filter_width)
    } else {
        opts.lag_periods
    };
    (opts.n_t, lag_periods)
}

/// Full pipeline for one parameter point: limit cycle, correlation
/// grid, filtered spectrum on `omega_s`.
pub fn run_spectrum(
    params: &EmitterParams,
    prog: &ModulationProgram,
    filter_width: f64,
    omega_s: &[f64],
    opts: &PipelineOptions,
) -> Result<Spectrum> {
    let (n_t, lag_periods) = resolve(opts, params, prog, filter_width);
    let cycle = limit_cycle(params, prog, n_t)?;
    let grid = g1(params, prog, &cycle, lag_periods)?;
    spectrum_floquet(&grid, filter_width, omega_s)
}

/// Uniform grid of `n` points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + step * i as f64).collect()
}

/// A rectangular sweep result: `value(iy, ix)` is the intensity at
/// `y[iy]`, `x[ix]`.
#[derive(Debug, Clone)]
pub struct SweepMap {
    x: Vec<f64>,
    y: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl SweepMap {
    fn new(x: Vec<f64>, y: Vec<f64>, values: Vec<Vec<f64>>) -> Self {
        assert_eq!(values.len(), y.len());
        for row in &values {
            assert_eq!(row.len(), x.len());
        }
        Self { x, y, values }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn value(&self, iy: usize, ix: usize) -> f64 {
        self.values[iy][ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        &self.values[iy]
    }

    /// Largest intensity in the map, or zero for an all-negative map.
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .flat_map(|row| row.iter().copied())
            .fold(0.0, f64::max)
    }

    /// A copy with every intensity multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> SweepMap {
        let values = self
            .values
            .iter()
            .map(|row| row.iter().map(|v| v * factor).collect())
            .collect();
        SweepMap::new(self.x.clone(), self.y.clone(), values)
    }
}

fn higher_tone_index(prog: &ModulationProgram) -> Result<usize> {
    prog.highest_tone()
        .ok_or_else(|| Error::Unit("the modulation program has no tone to phase-shift".into()))
}

/// Spectra as a function of the phase of the highest-frequency tone.
/// Rows are phases, columns are the frequency grid.
pub fn phase_sweep(
    params: &EmitterParams,
    prog: &ModulationProgram,
    phases: &[f64],
    filter_width: f64,
    omega_s: &[f64],
    opts: &PipelineOptions,
) -> Result<SweepMap> {
    if phases.is_empty() {
        return Err(Error::Unit("empty phase grid".into()));
    }
    let index = higher_tone_index(prog)?;
    let mut cache: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    let mut rows = Vec::with_capacity(phases.len());
    for &phase in phases {
        let key = phase.rem_euclid(TAU).to_bits();
        let row = match cache.get(&key) {
            Some(row) => row.clone(),
            None => {
                let shifted = prog.with_phase(index, phase);
                let spec = run_spectrum(params, &shifted, filter_width, omega_s, opts)?;
                cache.insert(key, spec.intensity().to_vec());
                cache[&key].clone()
            }
        };
        rows.push(row);
    }
    Ok(SweepMap::new(omega_s.to_vec(), phases.to_vec(), rows))
}

/// Finds the phase of the highest-frequency tone that maximizes the
/// first upper sideband, by a [`CALIBRATION_POINTS`]-point sweep and a
/// parabolic refinement around the tallest sample.
///
/// Fails with `FlatResponse` when the sideband contrast over the sweep
/// is below [`FLAT_CONTRAST`], as for a single-tone program whose phase
/// only shifts the time origin.
pub fn calibrate_phase_offset(
    params: &EmitterParams,
    prog: &ModulationProgram,
    filter_width: f64,
    opts: &PipelineOptions,
) -> Result<f64> {
    let index = higher_tone_index(prog)?;
    let target = [params.laser_detuning + prog.base_omega()];
    let step = TAU / CALIBRATION_POINTS as f64;
    let mut heights = Vec::with_capacity(CALIBRATION_POINTS);
    for i in 0..CALIBRATION_POINTS {
        let shifted = prog.with_phase(index, step * i as f64);
        let spec = run_spectrum(params, &shifted, filter_width, &target, opts)?;
        heights.push(spec.intensity()[0]);
    }
    let max = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = heights.iter().copied().fold(f64::INFINITY, f64::min);
    if max <= 0.0 || (max - min) / (max + min) < FLAT_CONTRAST {
        return Err(Error::FlatResponse(format!(
            "sideband contrast {:.3e} is below {FLAT_CONTRAST}; the phase has no effect to calibrate",
            if max > 0.0 { (max - min) / (max + min) } else { 0.0 }
        )));
    }
    let k = heights
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let before = heights[(k + CALIBRATION_POINTS - 1) % CALIBRATION_POINTS];
    let at = heights[k];
    let after = heights[(k + 1) % CALIBRATION_POINTS];
    let curvature = before - 2.0 * at + after;
    let shift = if curvature < 0.0 { 0.5 * (before - after) / curvature } else { 0.0 };
    Ok((step * (k as f64 + shift)).rem_euclid(TAU))
}

/// Quasi-static spectra under a slow detuning of the highest tone: at
/// elapsed time `t` the accumulated relative phase is the stored tone
/// phase plus `delta_omega * t`. Returns one `(times x delta_omega)`
/// map per requested frequency. Cells with bit-identical phases reuse
/// the same evaluation.
pub fn detuning_time_map(
    params: &EmitterParams,
    prog: &ModulationProgram,
    filter_width: f64,
    omega_s: &[f64],
    delta_omega: &[f64],
    times: &[f64],
    opts: &PipelineOptions,
) -> Result<Vec<SweepMap>> {
    if omega_s.is_empty() || delta_omega.is_empty() || times.is_empty() {
        return Err(Error::Unit("detuning map needs frequencies, detunings and times".into()));
    }
    let index = higher_tone_index(prog)?;
    let phase0 = prog.tones()[index].phase;
    let phase_at = |dw: f64, t: f64| (phase0 + dw * t).rem_euclid(TAU);
    let mut cache: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for &dw in delta_omega {
        for &t in times {
            let phase = phase_at(dw, t);
            if let std::collections::btree_map::Entry::Vacant(slot) = cache.entry(phase.to_bits())
            {
                let shifted = prog.with_phase(index, phase);
                let spec = run_spectrum(params, &shifted, filter_width, omega_s, opts)?;
                slot.insert(spec.intensity().to_vec());
            }
        }
    }
    let maps = omega_s
        .iter()
        .enumerate()
        .map(|(iw, _)| {
            let rows = delta_omega
                .iter()
                .map(|&dw| {
                    times
                        .iter()
                        .map(|&t| cache[&phase_at(dw, t).to_bits()][iw])
                        .collect()
                })
                .collect();
            SweepMap::new(times.to_vec(), delta_omega.to_vec(), rows)
        })
        .collect();
    Ok(maps)
}

/// Spectra as the carrier frequency of the modulation is swept with the
/// physical detuning amplitudes held fixed, so each tone's modulation
/// index scales inversely with its frequency. Rows are the base
/// frequencies, columns the emission frequency grid.
pub fn frequency_fan(
    params: &EmitterParams,
    prog: &ModulationProgram,
    filter_width: f64,
    base_omegas: &[f64],
    omega_s: &[f64],
    opts: &PipelineOptions,
) -> Result<SweepMap> {
    if base_omegas.is_empty() {
        return Err(Error::Unit("empty carrier frequency grid".into()));
    }
    if prog.tones().is_empty() {
        return Err(Error::Unit("the modulation program has no tone to sweep".into()));
    }
    let mut rows = Vec::with_capacity(base_omegas.len());
    for &base in base_omegas {
        let tones = prog
            .tones()
            .iter()
            .zip(prog.harmonics())
            .map(|(tone, &h)| SawTone::new(h as f64 * base, tone.amp, tone.phase))
            .collect::<Result<Vec<_>>>()?;
        let scaled = validate_program(tones, base)?;
        let spec = run_spectrum(params, &scaled, filter_width, omega_s, opts)?;
        rows.push(spec.intensity().to_vec());
    }
    Ok(SweepMap::new(omega_s.to_vec(), base_omegas.to_vec(), rows))
}
