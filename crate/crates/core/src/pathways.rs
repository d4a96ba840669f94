//! Perturbative bookkeeping of which multi-quantum scattering
//! processes feed each sideband, and what relative-phase periodicities
//! they imprint.
//!
//! A process is classified by the net number of quanta drawn from each
//! tone plus any number of absorbed-and-reemitted pairs (loops). Its
//! amplitude scales with the total event count (the order) and carries
//! the relative phase once per net quantum of the second tone, so
//! interference between processes of different net second-tone count
//! `k` beats in the relative phase with period `2 pi / |k - k'|`.

use crate::{Error, Result};

/// One scattering process: net quanta exchanged with each tone and the
/// number of absorb-emit loops that contribute events but no net
/// quanta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhononProcess {
    pub net1: i64,
    pub net2: i64,
    pub loops1: u32,
    pub loops2: u32,
}

impl PhononProcess {
    /// Total number of phonon events.
    pub fn order(&self) -> u32 {
        self.net1.unsigned_abs() as u32
            + self.net2.unsigned_abs() as u32
            + 2 * (self.loops1 + self.loops2)
    }

    /// Net multiple of the relative phase carried by the amplitude.
    pub fn phase_multiplier(&self) -> i64 {
        self.net2
    }

    /// Sideband index fed by this process for tones at harmonics
    /// `p` and `q`.
    pub fn sideband(&self, p: u32, q: u32) -> i64 {
        p as i64 * self.net1 + q as i64 * self.net2
    }
}

fn validate_harmonics(p: u32, q: u32) -> Result<()> {
    if p == 0 || q == 0 {
        return Err(Error::Unit(format!("tone harmonics must be >= 1, got ({p}, {q})")));
    }
    Ok(())
}

/// All processes of order at most `max_order` that feed sideband `m`
/// for tones at harmonics `p` and `q`, sorted by ascending order. The
/// empty process (no events at all) is not a scattering process and is
/// excluded.
pub fn enumerate(p: u32, q: u32, m: i64, max_order: u32) -> Result<Vec<PhononProcess>> {
    validate_harmonics(p, q)?;
    let cap = max_order as i64;
    let mut out = Vec::new();
    for net1 in -cap..=cap {
        for net2 in -cap..=cap {
            if p as i64 * net1 + q as i64 * net2 != m {
                continue;
            }
            let base = net1.unsigned_abs() as u32 + net2.unsigned_abs() as u32;
            if base > max_order {
                continue;
            }
            let loop_budget = (max_order - base) / 2;
            for loops in 0..=loop_budget {
                for loops1 in 0..=loops {
                    let process = PhononProcess { net1, net2, loops1, loops2: loops - loops1 };
                    if process.order() > 0 {
                        out.push(process);
                    }
                }
            }
        }
    }
    out.sort_by_key(|pr| (pr.order(), pr.net1, pr.net2, pr.loops1));
    Ok(out)
}

/// One interference beat note in the relative phase: wherever two
/// contributing processes differ by `k` net second-tone quanta, the
/// sideband intensity picks up a component of period `2 pi / k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseComponent {
    /// Difference in net second-tone quanta between the two processes.
    pub k: u32,
    /// `2 pi / k`.
    pub period: f64,
    /// Smallest combined order of a process pair producing this note.
    pub min_pair_order: u32,
}

/// Predicted phase response of one sideband.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicityPrediction {
    pub sideband: i64,
    /// Order of the cheapest process feeding the sideband, if any
    /// exists within the searched order.
    pub min_order: Option<u32>,
    /// Order of the cheapest phase-carrying process.
    pub min_phase_order: Option<u32>,
    pub components: Vec<PhaseComponent>,
}

impl PeriodicityPrediction {
    /// The set of beat periods, descending (fundamental first).
    pub fn periodicities(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.period).collect()
    }
}

/// Predicts how sideband `m` responds to the relative tone phase when
/// all processes up to `max_order` interfere.
pub fn predict_periodicity(
    p: u32,
    q: u32,
    m: i64,
    max_order: u32,
) -> Result<PeriodicityPrediction> {
    let processes = enumerate(p, q, m, max_order)?;
    let min_order = processes.first().map(|pr| pr.order());
    let min_phase_order = processes
        .iter()
        .filter(|pr| pr.phase_multiplier() != 0)
        .map(|pr| pr.order())
        .min();
    // Cheapest order at which each net second-tone count appears.
    let mut cheapest: Vec<(i64, u32)> = Vec::new();
    for pr in &processes {
        match cheapest.iter_mut().find(|(net2, _)| *net2 == pr.net2) {
            Some(entry) => entry.1 = entry.1.min(pr.order()),
            None => cheapest.push((pr.net2, pr.order())),
        }
    }
    let mut components: Vec<PhaseComponent> = Vec::new();
    for (i, &(net_a, order_a)) in cheapest.iter().enumerate() {
        for &(net_b, order_b) in &cheapest[i + 1..] {
            let k = net_a.abs_diff(net_b) as u32;
            if k == 0 {
                continue;
            }
            let pair_order = order_a + order_b;
            match components.iter_mut().find(|c| c.k == k) {
                Some(c) => c.min_pair_order = c.min_pair_order.min(pair_order),
                None => components.push(PhaseComponent {
                    k,
                    period: crate::model::TAU / k as f64,
                    min_pair_order: pair_order,
                }),
            }
        }
    }
    components.sort_by_key(|c| c.k);
    Ok(PeriodicityPrediction { sideband: m, min_order, min_phase_order, components })
}
