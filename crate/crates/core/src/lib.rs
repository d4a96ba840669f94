//! Simulator for the resonance-fluorescence spectrum of a laser-driven
//! two-level emitter whose transition energy is modulated by one or two
//! coherent radio-frequency tones (for example surface acoustic waves).
//!
//! The crate is organised as a pipeline:
//!
//! * [`model`] declares the physical parameters and the periodic
//!   frequency-modulation signal.
//! * [`dynamics`] integrates the Lindblad master equation and finds the
//!   driven periodic steady state (limit cycle).
//! * [`correlations`] evaluates two-time correlation functions on the
//!   limit cycle via the quantum regression theorem.
//! * [`spectrum`] turns correlation grids into filtered emission spectra
//!   and provides analytic weak-drive sideband weights.
//! * [`pathways`] enumerates multi-phonon scattering processes and
//!   predicts the phase periodicity of each sideband.
//! * [`sweeps`] orchestrates phase, detuning-time and frequency sweeps.
//! * [`cli`] parses JSON run configurations and writes CSV/JSON outputs
//!   with a reproducibility manifest.
//!
//! All frequencies inside the library are angular frequencies in rad/ns;
//! times are in ns. Configuration files use ordinary frequencies in GHz
//! (omega / 2 pi) and are converted on parse.

use std::fmt;

pub mod cli;
pub mod correlations;
pub mod dynamics;
pub mod model;
pub mod pathways;
pub mod spectrum;
pub mod sweeps;

/// Unified error type for the whole pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A tone frequency is not an integer multiple of the base frequency.
    Commensurability(String),
    /// Step-doubling refinement did not reach the integration tolerance.
    ToleranceNotMet(String),
    /// The limit-cycle iteration did not converge.
    NoConvergence(String),
    /// A correlation tail had not decayed to its factorized limit at the
    /// end of the lag grid.
    TailNotDecayed(String),
    /// A frequency grid is too coarse to resolve the sideband spacing.
    GridTooCoarse(String),
    /// A phase calibration was requested on a signal with no phase
    /// contrast.
    FlatResponse(String),
    /// A configuration document is malformed.
    Schema(String),
    /// A physical quantity is out of its valid range.
    Unit(String),
    /// File system failure.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Commensurability(m) => write!(f, "commensurability error: {m}"),
            Error::ToleranceNotMet(m) => write!(f, "tolerance not met: {m}"),
            Error::NoConvergence(m) => write!(f, "no convergence: {m}"),
            Error::TailNotDecayed(m) => write!(f, "tail not decayed: {m}"),
            Error::GridTooCoarse(m) => write!(f, "grid too coarse: {m}"),
            Error::FlatResponse(m) => write!(f, "flat response: {m}"),
            Error::Schema(m) => write!(f, "schema error: {m}"),
            Error::Unit(m) => write!(f, "unit error: {m}"),
            Error::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for convergence problems, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Unit(_) | Error::Commensurability(_) => 2,
            Error::ToleranceNotMet(_)
            | Error::NoConvergence(_)
            | Error::TailNotDecayed(_)
            | Error::GridTooCoarse(_)
            | Error::FlatResponse(_) => 3,
            Error::Io(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
