//! Lindblad generator, time evolution and the driven periodic steady
//! state of the modulated two-level emitter.
//!
//! The rotating-frame Hamiltonian is
//! `H(t) = -delta(t) P_e + (Omega/2) (sigma_+ + sigma_-)` with
//! `delta(t) = laser_detuning - instantaneous_shift(t)`, dissipated by
//! decay at rate gamma on `sigma_-` and pure dephasing at rate gamma_pd
//! on `P_e`. The generator acts on arbitrary 2x2 operators, which is
//! what the quantum regression theorem needs.

use num_complex::Complex64;

use crate::model::{instantaneous_shift, EmitterParams, ModulationProgram};
use crate::{Error, Result};

/// Trace-distance tolerance for limit-cycle convergence.
pub const LIMIT_CYCLE_TOL: f64 = 1e-10;
/// Maximum number of periods iterated before giving up on a cycle.
pub const LIMIT_CYCLE_MAX_PERIODS: usize = 10_000;
/// Step-doubling agreement required by [`propagate`].
pub const STEP_DOUBLING_TOL: f64 = 1e-8;
/// Maximum number of step-size halvings in [`propagate`].
pub const STEP_DOUBLING_MAX_DEPTH: usize = 8;

/// A 2x2 operator in row-major order `[m_gg, m_ge, m_eg, m_ee]`.
pub type Op = [Complex64; 4];

pub const ZERO_OP: Op = [Complex64::ZERO; 4];

/// Density matrix of the two-level system, entries
/// `[rho_gg, rho_ge, rho_eg, rho_ee]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(pub Op);

impl DensityMatrix {
    pub fn ground() -> Self {
        let mut m = ZERO_OP;
        m[0] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn excited() -> Self {
        let mut m = ZERO_OP;
        m[3] = Complex64::new(1.0, 0.0);
        Self(m)
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0] + self.0[3]
    }

    pub fn rho_ee(&self) -> f64 {
        self.0[3].re
    }

    pub fn rho_ge(&self) -> Complex64 {
        self.0[1]
    }

    pub fn rho_eg(&self) -> Complex64 {
        self.0[2]
    }

    /// Largest deviation from Hermiticity across entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let offdiag = (self.0[1] - self.0[2].conj()).norm();
        let diag = self.0[0].im.abs().max(self.0[3].im.abs());
        offdiag.max(diag)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let (a, b) = (self.0[0].re, self.0[3].re);
        let c = 0.5 * (self.0[1] + self.0[2].conj());
        let mid = 0.5 * (a + b);
        let rad = (0.25 * (a - b) * (a - b) + c.norm_sqr()).sqrt();
        mid - rad
    }

    /// Trace distance to another state: half the trace norm of the
    /// Hermitian part of the difference.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let a = self.0[0].re - other.0[0].re;
        let b = self.0[3].re - other.0[3].re;
        let c = 0.5 * ((self.0[1] - other.0[1]) + (self.0[2] - other.0[2]).conj());
        let mid = 0.5 * (a + b);
        let rad = (0.25 * (a - b) * (a - b) + c.norm_sqr()).sqrt();
        0.5 * ((mid + rad).abs() + (mid - rad).abs())
    }
}

/// Driven periodic steady state sampled on a uniform grid over one
/// period.
#[derive(Debug, Clone)]
pub struct PeriodicState {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
    residual: f64,
    period: f64,
    periods_used: usize,
}

impl PeriodicState {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    /// Grid step `period / n`.
    pub fn h(&self) -> f64 {
        self.period / self.states.len() as f64
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Trace distance between the final two period maps of the
    /// convergence iteration.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn periods_used(&self) -> usize {
        self.periods_used
    }
}

#[inline]
fn rhs(m: &Op, delta: f64, gamma: f64, coherence_decay: f64, half_rabi: f64) -> Op {
    let i = Complex64::new(0.0, 1.0);
    let drive = i * half_rabi;
    let pump = drive * (m[1] - m[2]);
    let inversion = drive * (m[3] - m[0]);
    [
        pump + gamma * m[3],
        -inversion - (coherence_decay + i * delta) * m[1],
        inversion + (i * delta - coherence_decay) * m[2],
        -pump - gamma * m[3],
    ]
}

/// Applies the Lindblad generator at time `t` to an arbitrary 2x2
/// operator. For a density matrix this is d(rho)/dt; the same map
/// propagates regression operators.
pub fn apply_generator(
    params: &EmitterParams,
    prog: &ModulationProgram,
    t: f64,
    m: &Op,
) -> Op {
    let delta = params.laser_detuning - instantaneous_shift(prog, t);
    rhs(m, delta, params.gamma, params.coherence_decay(), 0.5 * params.rabi)
}

#[inline]
fn axpy(m: &Op, k: &Op, w: f64) -> Op {
    [m[0] + w * k[0], m[1] + w * k[1], m[2] + w * k[2], m[3] + w * k[3]]
}

#[inline]
fn rk4_combine(m: &Op, k1: &Op, k2: &Op, k3: &Op, k4: &Op, h: f64) -> Op {
    let w = h / 6.0;
    [
        m[0] + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        m[1] + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        m[2] + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        m[3] + w * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    ]
}

fn rk4_step_at(
    params: &EmitterParams,
    prog: &ModulationProgram,
    m: &Op,
    t: f64,
    h: f64,
) -> Op {
    let k1 = apply_generator(params, prog, t, m);
    let k2 = apply_generator(params, prog, t + 0.5 * h, &axpy(m, &k1, 0.5 * h));
    let k3 = apply_generator(params, prog, t + 0.5 * h, &axpy(m, &k2, 0.5 * h));
    let k4 = apply_generator(params, prog, t + h, &axpy(m, &k3, h));
    rk4_combine(m, &k1, &k2, &k3, &k4, h)
}

/// Fixed-step RK4 walker locked to a uniform grid over one period.
///
/// The instantaneous detuning is precomputed on the half-step grid, so
/// stepping costs no trigonometry. Step `k` advances from `k h` to
/// `(k+1) h`, with `k` taken modulo the period.
pub(crate) struct Stepper {
    half_delta: Vec<f64>,
    h: f64,
    gamma: f64,
    coherence_decay: f64,
    half_rabi: f64,
}

impl Stepper {
    pub fn new(params: &EmitterParams, prog: &ModulationProgram, steps_per_period: usize) -> Self {
        let h = prog.period() / steps_per_period as f64;
        let half_delta = (0..2 * steps_per_period)
            .map(|i| {
                params.laser_detuning - instantaneous_shift(prog, 0.5 * h * i as f64)
            })
            .collect();
        Self {
            half_delta,
            h,
            gamma: params.gamma,
            coherence_decay: params.coherence_decay(),
            half_rabi: 0.5 * params.rabi,
        }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    fn delta_at(&self, half_index: usize) -> f64 {
        self.half_delta[half_index % self.half_delta.len()]
    }

    #[inline]
    pub fn step(&self, m: &Op, k: usize) -> Op {
        let d0 = self.delta_at(2 * k);
        let dh = self.delta_at(2 * k + 1);
        let d1 = self.delta_at(2 * k + 2);
        let k1 = rhs(m, d0, self.gamma, self.coherence_decay, self.half_rabi);
        let k2 = rhs(&axpy(m, &k1, 0.5 * self.h), dh, self.gamma, self.coherence_decay, self.half_rabi);
        let k3 = rhs(&axpy(m, &k2, 0.5 * self.h), dh, self.gamma, self.coherence_decay, self.half_rabi);
        let k4 = rhs(&axpy(m, &k3, self.h), d1, self.gamma, self.coherence_decay, self.half_rabi);
        rk4_combine(m, &k1, &k2, &k3, &k4, self.h)
    }
}

pub(crate) fn integrate_op(
    params: &EmitterParams,
    prog: &ModulationProgram,
    m0: &Op,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Op {
    let h = (t1 - t0) / steps as f64;
    let mut m = *m0;
    for k in 0..steps {
        m = rk4_step_at(params, prog, &m, t0 + h * k as f64, h);
    }
    m
}

/// Evolves a state from `t0` to `t1` with fixed-step RK4, verifying the
/// result by step doubling until successive refinements agree to
/// [`STEP_DOUBLING_TOL`] per entry.
pub fn propagate(
    rho0: &DensityMatrix,
    t0: f64,
    t1: f64,
    params: &EmitterParams,
    prog: &ModulationProgram,
    steps_per_period: usize,
) -> Result<DensityMatrix> {
    if t1 < t0 {
        return Err(Error::Unit(format!("t1 {t1} must be >= t0 {t0}")));
    }
    if steps_per_period < 32 {
        return Err(Error::Unit(format!(
            "steps_per_period must be >= 32, got {steps_per_period}"
        )));
    }
    if t1 == t0 {
        return Ok(*rho0);
    }
    let periods = (t1 - t0) / prog.period();
    let mut steps = ((periods * steps_per_period as f64).ceil() as usize).max(4);
    let mut prev = integrate_op(params, prog, &rho0.0, t0, t1, steps);
    for _ in 0..STEP_DOUBLING_MAX_DEPTH {
        steps *= 2;
        let next = integrate_op(params, prog, &rho0.0, t0, t1, steps);
        let err = prev
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        if err <= STEP_DOUBLING_TOL {
            return Ok(DensityMatrix(next));
        }
        prev = next;
    }
    Err(Error::ToleranceNotMet(format!(
        "step doubling did not reach {STEP_DOUBLING_TOL} within {STEP_DOUBLING_MAX_DEPTH} refinements"
    )))
}

/// Iterates the one-period map from the ground state until the state
/// returns to itself within [`LIMIT_CYCLE_TOL`] trace distance, then
/// samples the converged cycle on an `n_t`-point grid.
pub fn limit_cycle(
    params: &EmitterParams,
    prog: &ModulationProgram,
    n_t: usize,
) -> Result<PeriodicState> {
    limit_cycle_from(&DensityMatrix::ground(), params, prog, n_t)
}

/// Same as [`limit_cycle`] but starting from a caller-chosen state.
pub fn limit_cycle_from(
    rho0: &DensityMatrix,
    params: &EmitterParams,
    prog: &ModulationProgram,
    n_t: usize,
) -> Result<PeriodicState> {
    if n_t < 64 {
        return Err(Error::Unit(format!("n_t must be >= 64, got {n_t}")));
    }
    let stepper = Stepper::new(params, prog, n_t);
    let mut rho = rho0.0;
    let mut residual = f64::INFINITY;
    let mut periods_used = 0;
    for p in 0..LIMIT_CYCLE_MAX_PERIODS {
        let start = DensityMatrix(rho);
        for k in 0..n_t {
            rho = stepper.step(&rho, k);
        }
        residual = DensityMatrix(rho).trace_distance(&start);
        if residual <= LIMIT_CYCLE_TOL {
            periods_used = p + 1;
            break;
        }
    }
    if residual > LIMIT_CYCLE_TOL {
        return Err(Error::NoConvergence(format!(
            "limit cycle residual {residual:.3e} after {LIMIT_CYCLE_MAX_PERIODS} periods"
        )));
    }
    let h = stepper.h();
    let mut times = Vec::with_capacity(n_t);
    let mut states = Vec::with_capacity(n_t);
    for k in 0..n_t {
        times.push(h * k as f64);
        states.push(DensityMatrix(rho));
        rho = stepper.step(&rho, k);
    }
    Ok(PeriodicState { times, states, residual, period: prog.period(), periods_used })
}

/// Closed-form steady-state excited population of the unmodulated
/// driven system at constant detuning `delta`.
pub fn rho_ee_steady(params: &EmitterParams, delta: f64) -> f64 {
    let gc = params.coherence_decay();
    let w2 = params.rabi * params.rabi;
    0.5 * w2 * gc / (params.gamma * (gc * gc + delta * delta) + w2 * gc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{empty_program, single_tone_program, SawTone, validate_program, TAU};
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(gamma: f64, rabi: f64, detuning: f64) -> EmitterParams {
        EmitterParams::new(gamma, 0.0, rabi, detuning).unwrap()
    }

    #[test]
    fn excited_state_decays_at_gamma() {
        let p = params(1.0, 0.0, 0.0);
        let prog = empty_program(1.0).unwrap();
        let d = apply_generator(&p, &prog, 0.3, &DensityMatrix::excited().0);
        assert_abs_diff_eq!(d[3].re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d[0].re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn generator_annihilates_trace_and_preserves_hermiticity() {
        let p = params(0.7, 2.3, -0.4);
        let prog = single_tone_program(TAU * 0.6775, 2.0, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let pe: f64 = rng.gen_range(0.0..1.0);
            let re: f64 = rng.gen_range(-0.5..0.5);
            let im: f64 = rng.gen_range(-0.5..0.5);
            let rho: Op = [
                Complex64::new(1.0 - pe, 0.0),
                Complex64::new(re, im),
                Complex64::new(re, -im),
                Complex64::new(pe, 0.0),
            ];
            let t: f64 = rng.gen_range(-3.0..3.0);
            let d = apply_generator(&p, &prog, t, &rho);
            assert!((d[0] + d[3]).norm() <= 1e-14);
            assert!((d[1] - d[2].conj()).norm() <= 1e-14);
            assert!(d[0].im.abs() <= 1e-14 && d[3].im.abs() <= 1e-14);
        }
    }

    #[test]
    fn free_decay_reaches_e_inverse_after_one_lifetime() {
        let p = params(0.8, 0.0, 0.0);
        let prog = empty_program(0.8).unwrap();
        let out = propagate(&DensityMatrix::excited(), 0.0, 1.0 / 0.8, &p, &prog, 128).unwrap();
        assert_abs_diff_eq!(out.rho_ee(), (-1.0_f64).exp(), epsilon = 1e-6);
    }

    #[test]
    fn resonant_pi_pulse_inverts_the_population() {
        let rabi = 2.0;
        let p = EmitterParams::new(1e-6 * rabi, 0.0, rabi, 0.0).unwrap();
        let prog = empty_program(rabi).unwrap();
        let t1 = std::f64::consts::PI / rabi;
        let out = propagate(&DensityMatrix::ground(), 0.0, t1, &p, &prog, 256).unwrap();
        assert_abs_diff_eq!(out.rho_ee(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn one_period_propagation_is_step_doubling_stable() {
        // Strong-modulation parameters comparable to the single-tone
        // sideband runs.
        let w = TAU * 0.6775;
        let p = params(TAU * 0.81, TAU * 0.05, 0.0);
        let prog = single_tone_program(w, 3.0, 0.0).unwrap();
        let t = prog.period();
        let coarse = integrate_op(&p, &prog, &DensityMatrix::ground().0, 0.0, t, 256);
        let fine = integrate_op(&p, &prog, &DensityMatrix::ground().0, 0.0, t, 512);
        let err = coarse
            .iter()
            .zip(fine.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert!(err <= 1e-8, "step-doubling disagreement {err:.3e}");
    }

    #[test]
    fn integrator_is_fourth_order() {
        let w = TAU * 0.6775;
        let p = params(TAU * 0.25, TAU * 0.4, 0.3 * w);
        let prog = single_tone_program(w, 2.0, 0.4).unwrap();
        let t = prog.period();
        let reference = integrate_op(&p, &prog, &DensityMatrix::ground().0, 0.0, t, 10 * 128);
        let err_at = |steps: usize| -> f64 {
            let out = integrate_op(&p, &prog, &DensityMatrix::ground().0, 0.0, t, steps);
            out.iter()
                .zip(reference.iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0_f64, f64::max)
        };
        let e1 = err_at(128);
        let e2 = err_at(256);
        assert!(e1 / e2 >= 8.0, "halving the step gained only {:.1}x", e1 / e2);
    }

    #[test]
    fn propagated_states_stay_positive_across_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let w = TAU * 0.6775;
        for _ in 0..1000 {
            let gamma = TAU * rng.gen_range(0.05..1.0);
            let rabi = gamma * rng.gen_range(0.01..20.0);
            let d: f64 = rng.gen_range(0.0..4.0);
            let detuning = w * rng.gen_range(-2.0..2.0);
            let p = EmitterParams::new(gamma, 0.0, rabi, detuning).unwrap();
            let prog = single_tone_program(w, d, rng.gen_range(0.0..TAU)).unwrap();
            let stepper = Stepper::new(&p, &prog, 256);
            let mut rho = DensityMatrix::ground().0;
            let steps = rng.gen_range(10..512);
            for k in 0..steps {
                rho = stepper.step(&rho, k);
            }
            let dm = DensityMatrix(rho);
            assert!(dm.min_eigenvalue() >= -1e-10, "negative eigenvalue {:.3e}", dm.min_eigenvalue());
            assert!((dm.trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
        }
    }

    #[test]
    fn trace_is_conserved_over_a_hundred_periods() {
        let w = TAU * 0.6775;
        let p = params(TAU * 0.81, TAU * 1.0, 0.0);
        let prog = single_tone_program(w, 3.0, 0.0).unwrap();
        let stepper = Stepper::new(&p, &prog, 256);
        let mut rho = DensityMatrix::ground().0;
        for k in 0..100 * 256 {
            rho = stepper.step(&rho, k);
        }
        assert!((DensityMatrix(rho).trace() - Complex64::new(1.0, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn table_stepper_matches_direct_time_stepping() {
        let w = TAU * 0.46;
        let p = params(TAU * 0.3, TAU * 0.2, 0.1 * w);
        let t1 = SawTone::from_index(2.0 * w, 0.9, 0.3).unwrap();
        let t2 = SawTone::from_index(3.0 * w, 1.4, 1.2).unwrap();
        let prog = validate_program(vec![t1, t2], w).unwrap();
        let stepper = Stepper::new(&p, &prog, 128);
        let h = stepper.h();
        let mut a = DensityMatrix::ground().0;
        let mut b = DensityMatrix::ground().0;
        for k in 0..3 * 128 {
            a = stepper.step(&a, k);
            b = rk4_step_at(&p, &prog, &b, h * k as f64, h);
        }
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).norm() <= 1e-12);
        }
    }

    #[test]
    fn undriven_cycle_is_the_ground_state() {
        let p = params(1.3, 0.0, 0.0);
        let prog = single_tone_program(TAU * 0.6775, 2.0, 0.0).unwrap();
        let cycle = limit_cycle(&p, &prog, 128).unwrap();
        for s in cycle.states() {
            assert!(s.trace_distance(&DensityMatrix::ground()) <= 1e-10);
        }
    }

    #[test]
    fn unmodulated_cycle_matches_the_closed_form_steady_state() {
        let p = params(1.1, 0.9, 0.0);
        let prog = empty_program(1.1).unwrap();
        let cycle = limit_cycle(&p, &prog, 128).unwrap();
        let expected = rho_ee_steady(&p, 0.0);
        for s in cycle.states() {
            assert_abs_diff_eq!(s.rho_ee(), expected, epsilon = 1e-8);
        }
        // Long-time propagation agrees with the closed form too.
        let long = propagate(&DensityMatrix::ground(), 0.0, 40.0 / 1.1, &p, &prog, 128).unwrap();
        assert_abs_diff_eq!(long.rho_ee(), expected, epsilon = 1e-8);
    }

    #[test]
    fn cycle_grid_is_self_consistent_under_direct_propagation() {
        let w = TAU * 0.6775;
        let p = params(TAU * 0.81, TAU * 0.4, 1.6 * w);
        let prog = single_tone_program(w, 3.0, 0.0).unwrap();
        let cycle = limit_cycle(&p, &prog, 256).unwrap();
        let rho0 = cycle.states()[0];
        // The fixed-step grid carries O(h^4) discretization error, about
        // 1e-7 at this modulation depth and detuning.
        for (k, expect) in cycle.states().iter().enumerate().step_by(32) {
            let direct = propagate(&rho0, 0.0, cycle.times()[k], &p, &prog, 512).unwrap();
            assert!(
                direct.trace_distance(expect) <= 1e-6,
                "grid point {k} off by {:.3e}",
                direct.trace_distance(expect)
            );
        }
    }

    #[test]
    fn cycle_is_unique_across_initial_states() {
        let w = TAU * 0.6775;
        let p = params(TAU * 0.25, TAU * 0.3, -0.5 * w);
        let prog = single_tone_program(w, 1.5, 0.2).unwrap();
        let from_ground = limit_cycle(&p, &prog, 128).unwrap();
        let from_excited = limit_cycle_from(&DensityMatrix::excited(), &p, &prog, 128).unwrap();
        for (a, b) in from_ground.states().iter().zip(from_excited.states()) {
            assert!(a.trace_distance(b) <= 1e-8);
        }
    }

    #[test]
    fn vanishing_decay_does_not_converge() {
        let p = EmitterParams::new(1e-12, 0.0, 1.0, 0.0).unwrap();
        let prog = empty_program(1.0).unwrap();
        let err = limit_cycle(&p, &prog, 64).unwrap_err();
        assert!(matches!(err, Error::NoConvergence(_)), "got {err:?}");
    }
}
