//! Two-time correlation functions of the emitted field, evaluated on
//! the driven limit cycle via the quantum regression theorem.
//!
//! `g1` tabulates `G1(t, tau) = <sigma_+(t) sigma_-(t + tau)>` for `t`
//! on the cycle grid and `tau` on a matching uniform grid spanning
//! whole modulation periods. `g2_normalized` produces the cycle-averaged
//! intensity correlation, both raw and normalized by the uncorrelated
//! population product.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{PeriodicState, Stepper, ZERO_OP};
use crate::model::{EmitterParams, ModulationProgram, TAU};
use crate::{Error, Result};

/// Absolute residual allowed between the final lag column of `g1` and
/// its factorized long-time limit.
pub const TAIL_TOL: f64 = 1e-6;
/// Allowed deviation of the normalized intensity correlation from 1 at
/// the final lag.
pub const G2_TAIL_TOL: f64 = 1e-3;

/// First-order correlations on the cycle: `value(k, j)` is
/// `G1(t_k, tau_j)`, with the cycle marginals kept alongside for
/// downstream elastic/inelastic splitting.
#[derive(Debug, Clone)]
pub struct CorrelationGrid {
    base_times: Vec<f64>,
    lags: Vec<f64>,
    values: Vec<Vec<Complex64>>,
    base_rho_eg: Vec<Complex64>,
    base_rho_ee: Vec<f64>,
    laser_detuning: f64,
    period: f64,
}

impl CorrelationGrid {
    pub fn base_times(&self) -> &[f64] {
        &self.base_times
    }

    pub fn lags(&self) -> &[f64] {
        &self.lags
    }

    pub fn n_base(&self) -> usize {
        self.base_times.len()
    }

    pub fn n_lags(&self) -> usize {
        self.lags.len()
    }

    pub fn lag_step(&self) -> f64 {
        self.period / self.base_times.len() as f64
    }

    pub fn value(&self, k: usize, j: usize) -> Complex64 {
        self.values[k][j]
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.values[k]
    }

    /// Steady-state coherence `rho_eg(t_k)` over the cycle.
    pub fn base_rho_eg(&self) -> &[Complex64] {
        &self.base_rho_eg
    }

    /// Steady-state excited population over the cycle.
    pub fn base_rho_ee(&self) -> &[f64] {
        &self.base_rho_ee
    }

    pub fn laser_detuning(&self) -> f64 {
        self.laser_detuning
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Average of `G1(t, tau)` over the cycle at each lag. Averaging
    /// over `t` keeps only the stationary Floquet component of the
    /// correlation, which is what a time-integrating spectrometer sees.
    pub fn cycle_mean(&self) -> Vec<Complex64> {
        let n = self.values.len() as f64;
        let mut mean = vec![Complex64::ZERO; self.n_lags()];
        for row in &self.values {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Fourier coefficient `a_m` of the cycle coherence,
    /// `rho_eg(t) = sum_m a_m exp(-i m w0 t)`. The squared magnitudes
    /// weight the elastic sideband comb.
    pub fn elastic_coefficient(&self, m: i64) -> Complex64 {
        let w0 = TAU / self.period;
        let mut acc = Complex64::ZERO;
        for (t, r) in self.base_times.iter().zip(&self.base_rho_eg) {
            acc += r * Complex64::from_polar(1.0, m as f64 * w0 * t);
        }
        acc / self.base_times.len() as f64
    }
}

/// Regression initial condition for `<sigma_+(t) .>`: the operator
/// `rho(t) sigma_+`, whose propagated eg entry is the correlation.
#[inline]
fn g1_init(rho: &crate::dynamics::DensityMatrix) -> crate::dynamics::Op {
    let mut m = ZERO_OP;
    m[0] = rho.rho_ge();
    m[2] = Complex64::new(rho.rho_ee(), 0.0);
    m
}

/// Tabulates `G1(t_k, tau_j)` over `lag_periods` whole periods of lag,
/// one regression row per cycle grid point, rows in parallel.
///
/// Fails with `TailNotDecayed` if any row has not reached its
/// factorized limit `rho_ge(t) rho_eg(t + tau_max)` within
/// [`TAIL_TOL`] at the final lag.
pub fn g1(
    params: &EmitterParams,
    prog: &ModulationProgram,
    cycle: &PeriodicState,
    lag_periods: usize,
) -> Result<CorrelationGrid> {
    if lag_periods == 0 {
        return Err(Error::Unit("lag_periods must be >= 1".into()));
    }
    let n_t = cycle.n();
    let n_lags = lag_periods * n_t + 1;
    let stepper = Stepper::new(params, prog, n_t);
    let values: Vec<Vec<Complex64>> = (0..n_t)
        .into_par_iter()
        .map(|k| {
            let mut m = g1_init(&cycle.states()[k]);
            let mut row = Vec::with_capacity(n_lags);
            row.push(m[2]);
            for j in 0..n_lags - 1 {
                m = stepper.step(&m, k + j);
                row.push(m[2]);
            }
            row
        })
        .collect();
    let base_rho_eg: Vec<Complex64> = cycle.states().iter().map(|s| s.rho_eg()).collect();
    let base_rho_ee: Vec<f64> = cycle.states().iter().map(|s| s.rho_ee()).collect();
    let mut worst = (0usize, 0.0f64);
    for k in 0..n_t {
        let wrap = (k + n_lags - 1) % n_t;
        let limit = base_rho_eg[k].conj() * base_rho_eg[wrap];
        let residual = (values[k][n_lags - 1] - limit).norm();
        if residual > worst.1 {
            worst = (k, residual);
        }
    }
    if worst.1 > TAIL_TOL {
        return Err(Error::TailNotDecayed(format!(
            "row {} residual {:.3e} at tau_max (limit {TAIL_TOL:.0e}); extend the lag window",
            worst.0, worst.1
        )));
    }
    Ok(CorrelationGrid {
        base_times: cycle.times().to_vec(),
        lags: (0..n_lags).map(|j| cycle.h() * j as f64).collect(),
        values,
        base_rho_eg,
        base_rho_ee,
        laser_detuning: params.laser_detuning,
        period: cycle.period(),
    })
}

/// Cycle-averaged intensity correlation.
#[derive(Debug, Clone)]
pub struct G2Curve {
    lags: Vec<f64>,
    raw: Vec<f64>,
    normalized: Vec<f64>,
}

impl G2Curve {
    pub fn lags(&self) -> &[f64] {
        &self.lags
    }

    /// Cycle-averaged `G2(tau) = <P_e(t) P_e'(t + tau)>` where the
    /// primed population evolves from the post-detection ground state.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// `raw` divided by the equally averaged uncorrelated product
    /// `<rho_ee(t) rho_ee(t + tau)>`.
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }
}

/// Computes the cycle-averaged intensity correlation over
/// `lag_periods` whole periods.
///
/// A detection at `t` projects the emitter to the ground state, so
/// each regression row starts from `|g><g|` and is weighted by the
/// detection probability `rho_ee(t)`. The zero-lag value is exactly
/// zero. Fails with `TailNotDecayed` if the normalized curve is not
/// within [`G2_TAIL_TOL`] of 1 at the final lag.
pub fn g2_normalized(
    params: &EmitterParams,
    prog: &ModulationProgram,
    cycle: &PeriodicState,
    lag_periods: usize,
) -> Result<G2Curve> {
    if lag_periods == 0 {
        return Err(Error::Unit("lag_periods must be >= 1".into()));
    }
    let n_t = cycle.n();
    let n_lags = lag_periods * n_t + 1;
    let stepper = Stepper::new(params, prog, n_t);
    let pop: Vec<f64> = cycle.states().iter().map(|s| s.rho_ee()).collect();
    let rows: Vec<Vec<f64>> = (0..n_t)
        .into_par_iter()
        .map(|k| {
            let mut m = ZERO_OP;
            m[0] = Complex64::new(1.0, 0.0);
            let mut row = Vec::with_capacity(n_lags);
            row.push(m[3].re);
            for j in 0..n_lags - 1 {
                m = stepper.step(&m, k + j);
                row.push(m[3].re);
            }
            row
        })
        .collect();
    let n = n_t as f64;
    let mut raw = Vec::with_capacity(n_lags);
    let mut normalized = Vec::with_capacity(n_lags);
    for j in 0..n_lags {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..n_t {
            num += pop[k] * rows[k][j];
            den += pop[k] * pop[(k + j) % n_t];
        }
        num /= n;
        den /= n;
        if den <= 0.0 {
            return Err(Error::Unit(
                "zero excited population; intensity correlation is undefined".into(),
            ));
        }
        raw.push(num);
        normalized.push(num / den);
    }
    let tail = normalized[n_lags - 1];
    if (tail - 1.0).abs() > G2_TAIL_TOL {
        return Err(Error::TailNotDecayed(format!(
            "normalized g2 at tau_max is {tail:.6}, not within {G2_TAIL_TOL:.0e} of 1"
        )));
    }
    Ok(G2Curve {
        lags: (0..n_lags).map(|j| cycle.h() * j as f64).collect(),
        raw,
        normalized,
    })
}
