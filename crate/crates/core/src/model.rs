//! Physical parameters and the periodic frequency-modulation signal.
//!
//! Angular frequencies are in rad/ns, times in ns. A tone with ordinary
//! frequency f in GHz has `omega = 2 pi f` here.

use crate::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

/// Relative tolerance for the integer-multiple check in
/// [`validate_program`].
pub const COMMENSURABILITY_TOL: f64 = 1e-12;

/// Emitter rates and laser drive, all angular frequencies in rad/ns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmitterParams {
    /// Spontaneous decay rate gamma > 0.
    pub gamma: f64,
    /// Pure dephasing rate, >= 0 (default 0).
    pub gamma_pd: f64,
    /// Rabi frequency Omega >= 0.
    pub rabi: f64,
    /// Laser detuning delta_L = omega_laser - omega_transition (signed).
    pub laser_detuning: f64,
}

impl EmitterParams {
    pub fn new(gamma: f64, gamma_pd: f64, rabi: f64, laser_detuning: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Unit(format!("gamma must be finite and > 0, got {gamma}")));
        }
        if !(gamma_pd.is_finite() && gamma_pd >= 0.0) {
            return Err(Error::Unit(format!(
                "gamma_pd must be finite and >= 0, got {gamma_pd}"
            )));
        }
        if !(rabi.is_finite() && rabi >= 0.0) {
            return Err(Error::Unit(format!("rabi must be finite and >= 0, got {rabi}")));
        }
        if !laser_detuning.is_finite() {
            return Err(Error::Unit("laser_detuning must be finite".into()));
        }
        Ok(Self { gamma, gamma_pd, rabi, laser_detuning })
    }

    /// Total coherence decay rate gamma/2 + gamma_pd/2.
    pub fn coherence_decay(&self) -> f64 {
        0.5 * self.gamma + 0.5 * self.gamma_pd
    }
}

/// One coherent modulation tone: shifts the transition frequency by
/// `amp * cos(omega * t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SawTone {
    /// Tone angular frequency, > 0.
    pub omega: f64,
    /// Modulation amplitude as an angular frequency, >= 0.
    pub amp: f64,
    /// Phase in radians, stored in [0, 2 pi).
    pub phase: f64,
}

impl SawTone {
    pub fn new(omega: f64, amp: f64, phase: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::Unit(format!("tone omega must be finite and > 0, got {omega}")));
        }
        if !(amp.is_finite() && amp >= 0.0) {
            return Err(Error::Unit(format!("tone amp must be finite and >= 0, got {amp}")));
        }
        if !phase.is_finite() {
            return Err(Error::Unit("tone phase must be finite".into()));
        }
        Ok(Self { omega, amp, phase: phase.rem_euclid(TAU) })
    }

    /// Construct from a modulation index `d = amp / omega`.
    pub fn from_index(omega: f64, d: f64, phase: f64) -> Result<Self> {
        Self::new(omega, d * omega, phase)
    }

    /// Modulation index D = amp / omega.
    pub fn index(&self) -> f64 {
        self.amp / self.omega
    }
}

/// A set of zero, one or two tones sharing a common base frequency, so
/// that the total modulation is periodic with period `2 pi / base_omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationProgram {
    tones: Vec<SawTone>,
    base_omega: f64,
    harmonics: Vec<u32>,
    period: f64,
}

impl ModulationProgram {
    pub fn tones(&self) -> &[SawTone] {
        &self.tones
    }

    pub fn base_omega(&self) -> f64 {
        self.base_omega
    }

    /// Integer multiple of the base frequency for each tone, in tone
    /// order.
    pub fn harmonics(&self) -> &[u32] {
        &self.harmonics
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Index of the tone with the highest frequency, if any. Phase
    /// sweeps address this tone.
    pub fn highest_tone(&self) -> Option<usize> {
        (0..self.tones.len()).max_by(|&a, &b| {
            self.tones[a].omega.partial_cmp(&self.tones[b].omega).unwrap()
        })
    }

    /// Copy of the program with tone `i`'s phase replaced.
    pub fn with_phase(&self, i: usize, phase: f64) -> Self {
        let mut out = self.clone();
        out.tones[i].phase = phase.rem_euclid(TAU);
        out
    }
}

/// Instantaneous transition-frequency shift
/// `sum_i amp_i * cos(omega_i t + phase_i)` in rad/ns.
pub fn instantaneous_shift(prog: &ModulationProgram, t: f64) -> f64 {
    prog.tones.iter().map(|tone| tone.amp * (tone.omega * t + tone.phase).cos()).sum()
}

/// Checks that every tone frequency is an integer multiple of
/// `base_omega` and packages the tones into a [`ModulationProgram`].
///
/// Returns [`Error::Commensurability`] naming the offending tone when a
/// frequency ratio is not an integer within 1e-12 relative.
pub fn validate_program(tones: Vec<SawTone>, base_omega: f64) -> Result<ModulationProgram> {
    if !(base_omega.is_finite() && base_omega > 0.0) {
        return Err(Error::Unit(format!(
            "base_omega must be finite and > 0, got {base_omega}"
        )));
    }
    if tones.len() > 2 {
        return Err(Error::Unit(format!(
            "at most two tones are supported, got {}",
            tones.len()
        )));
    }
    let mut harmonics = Vec::with_capacity(tones.len());
    for (i, tone) in tones.iter().enumerate() {
        let ratio = tone.omega / base_omega;
        let nearest = ratio.round();
        if nearest < 1.0 || (ratio - nearest).abs() > COMMENSURABILITY_TOL * ratio.max(1.0) {
            return Err(Error::Commensurability(format!(
                "tone {i} at omega {} is not an integer multiple of base_omega {} (ratio {ratio})",
                tone.omega, base_omega
            )));
        }
        harmonics.push(nearest as u32);
    }
    if harmonics.len() == 2 && harmonics[0] == harmonics[1] {
        return Err(Error::Unit(format!(
            "two-tone programs need distinct harmonics, both tones are at {} x base",
            harmonics[0]
        )));
    }
    Ok(ModulationProgram { tones, base_omega, harmonics, period: TAU / base_omega })
}

/// Convenience: a single-tone program with modulation index `d`, using
/// the tone frequency itself as the base frequency.
pub fn single_tone_program(omega: f64, d: f64, phase: f64) -> Result<ModulationProgram> {
    validate_program(vec![SawTone::from_index(omega, d, phase)?], omega)
}

/// Convenience: a tone-free program with an explicitly chosen averaging
/// period `2 pi / base_omega`.
pub fn empty_program(base_omega: f64) -> Result<ModulationProgram> {
    validate_program(Vec::new(), base_omega)
}
