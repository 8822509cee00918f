//! Latency and energy accounting for one communication round.
//!
//! Conventions for an unscheduled device (s_k = 0): its communication
//! time, communication energy, and CPU frequency are all zero.

use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;
use crate::{Error, Result};

/// Per-round decision bundle: scheduling mask, time allocation, and
/// communication energies. CPU frequencies and transmit powers are derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleAllocation {
    /// Scheduling mask s (binary).
    pub mask: Vec<bool>,
    /// Per-device communication times τ_k^cm (s); zero when unscheduled.
    pub tau_cm_s: Vec<f64>,
    /// Shared computation time τ^cp (s); zero when nothing is scheduled.
    pub tau_cp_s: f64,
    /// Per-device communication energies E_k^cm (J); zero when unscheduled.
    pub e_cm_j: Vec<f64>,
}

impl ScheduleAllocation {
    /// All-zero allocation (empty schedule).
    pub fn empty(k: usize) -> Self {
        Self { mask: vec![false; k], tau_cm_s: vec![0.0; k], tau_cp_s: 0.0, e_cm_j: vec![0.0; k] }
    }

    /// Derived CPU frequency f_k = s_k·C_k|D_k|/τ^cp (Hz).
    pub fn cpu_freq_hz(&self, device_k: usize, scenario: &Scenario) -> f64 {
        if !self.mask[device_k] || self.tau_cp_s <= 0.0 {
            return 0.0;
        }
        scenario.devices[device_k].workload_cycles() / self.tau_cp_s
    }

    /// Derived transmit power P_k = E_k^cm/τ_k^cm (W); zero when τ_k^cm = 0.
    pub fn tx_power_w(&self, device_k: usize) -> f64 {
        if self.tau_cm_s[device_k] <= 0.0 {
            return 0.0;
        }
        self.e_cm_j[device_k] / self.tau_cm_s[device_k]
    }

    /// Number of scheduled devices.
    pub fn scheduled_count(&self) -> usize {
        self.mask.iter().filter(|&&s| s).count()
    }

    /// Scheduled data volume D(s) (samples).
    pub fn scheduled_data(&self, scenario: &Scenario) -> u64 {
        self.mask
            .iter()
            .zip(&scenario.devices)
            .filter(|(&s, _)| s)
            .map(|(_, d)| d.data_size_samples)
            .sum()
    }
}

/// Computation latency C_k·|D_k|/f_k for one device (s).
pub fn comp_latency(workload_cycles: f64, cpu_freq_hz: f64) -> Result<f64> {
    if workload_cycles == 0.0 {
        return Ok(0.0);
    }
    if !(cpu_freq_hz > 0.0) {
        return Err(Error::Config(format!("cpu frequency must be positive, got {cpu_freq_hz}")));
    }
    Ok(workload_cycles / cpu_freq_hz)
}

/// End-to-end round latency: τ_t = Σ_k s_k·τ_k^cm + τ^cp.
///
/// Returns (τ_t, total communication time, computation time).
pub fn round_latency(alloc: &ScheduleAllocation) -> (f64, f64, f64) {
    let cm: f64 = alloc
        .mask
        .iter()
        .zip(&alloc.tau_cm_s)
        .filter(|(&s, _)| s)
        .map(|(_, &t)| t)
        .sum();
    (cm + alloc.tau_cp_s, cm, alloc.tau_cp_s)
}

/// Per-device energy split (computation, communication, total) in joules.
pub fn energies(alloc: &ScheduleAllocation, device_k: usize, scenario: &Scenario) -> (f64, f64, f64) {
    let dev = &scenario.devices[device_k];
    let f = alloc.cpu_freq_hz(device_k, scenario);
    let e_cp = scenario.kappa_eff * dev.workload_cycles() * f * f;
    let e_cm = if alloc.mask[device_k] { alloc.e_cm_j[device_k] } else { 0.0 };
    (e_cp, e_cm, e_cp + e_cm)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenario, ScenarioTemplate};

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn comp_latency_reference() {
        let t = comp_latency(1.0e6 * 5000.0, 1.8e9).unwrap();
        assert!(rel_err(t, 2.7777777777777777) < 1e-12);
    }

    #[test]
    fn comp_latency_halves_when_frequency_doubles() {
        let t1 = comp_latency(5.0e9, 1.8e9).unwrap();
        let t2 = comp_latency(5.0e9, 3.6e9).unwrap();
        assert!(rel_err(t1, 2.0 * t2) < 1e-12);
    }

    #[test]
    fn comp_latency_zero_workload() {
        assert_eq!(comp_latency(0.0, 1.8e9).unwrap(), 0.0);
    }

    #[test]
    fn comp_latency_rejects_zero_frequency() {
        assert!(comp_latency(5.0e9, 0.0).is_err());
    }

    #[test]
    fn round_latency_sums_scheduled_times() {
        let alloc = ScheduleAllocation {
            mask: vec![true, true],
            tau_cm_s: vec![0.1, 0.2],
            tau_cp_s: 1.0,
            e_cm_j: vec![0.0, 0.0],
        };
        let (tau_t, cm, cp) = round_latency(&alloc);
        assert!(rel_err(tau_t, 1.3) < 1e-12);
        assert!(rel_err(cm, 0.3) < 1e-12);
        assert_eq!(cp, 1.0);
    }

    #[test]
    fn round_latency_empty_schedule() {
        let mut alloc = ScheduleAllocation::empty(3);
        alloc.tau_cm_s = vec![0.5, 0.5, 0.5]; // ignored: nothing scheduled
        let (tau_t, cm, _) = round_latency(&alloc);
        assert_eq!(cm, 0.0);
        assert_eq!(tau_t, 0.0);
    }

    #[test]
    fn round_latency_permutation_invariant() {
        let a = ScheduleAllocation {
            mask: vec![true, false, true],
            tau_cm_s: vec![0.1, 0.7, 0.2],
            tau_cp_s: 0.5,
            e_cm_j: vec![0.0; 3],
        };
        let b = ScheduleAllocation {
            mask: vec![true, true, false],
            tau_cm_s: vec![0.2, 0.1, 0.7],
            tau_cp_s: 0.5,
            e_cm_j: vec![0.0; 3],
        };
        assert_eq!(round_latency(&a).0, round_latency(&b).0);
    }

    #[test]
    fn computation_energy_reference() {
        // xi = 1e-28, C|D| = 5e9 cycles, f = 4e8 Hz -> 0.08 J.
        let sc = generate_scenario(1, 1, &ScenarioTemplate::default()).unwrap();
        let alloc = ScheduleAllocation {
            mask: vec![true],
            tau_cm_s: vec![0.054],
            tau_cp_s: 5.0e9 / 4.0e8,
            e_cm_j: vec![0.0108],
        };
        let (e_cp, e_cm, total) = energies(&alloc, 0, &sc);
        assert!(rel_err(e_cp, 0.08) < 1e-12);
        assert!(rel_err(e_cm, 0.0108) < 1e-12);
        assert!(total <= sc.devices[0].e_max_j);
    }

    #[test]
    fn unscheduled_device_consumes_nothing() {
        let sc = generate_scenario(1, 2, &ScenarioTemplate::default()).unwrap();
        let alloc = ScheduleAllocation {
            mask: vec![false, true],
            tau_cm_s: vec![0.0, 0.05],
            tau_cp_s: 12.0,
            e_cm_j: vec![0.0, 0.01],
        };
        let (e_cp, e_cm, total) = energies(&alloc, 0, &sc);
        assert_eq!((e_cp, e_cm, total), (0.0, 0.0, 0.0));
        assert_eq!(alloc.cpu_freq_hz(0, &sc), 0.0);
        assert_eq!(alloc.tx_power_w(0), 0.0);
    }

    #[test]
    fn frequency_substitution_round_trips_for_bottleneck() {
        // tau_cp fixed -> f_k = C|D|/tau_cp -> re-derived latency = tau_cp.
        let sc = generate_scenario(3, 4, &ScenarioTemplate::default()).unwrap();
        let alloc = ScheduleAllocation {
            mask: vec![true; 4],
            tau_cm_s: vec![0.05; 4],
            tau_cp_s: 11.2,
            e_cm_j: vec![0.01; 4],
        };
        // All devices share the default workload, so each is a bottleneck.
        for k in 0..4 {
            let f = alloc.cpu_freq_hz(k, &sc);
            let t = comp_latency(sc.devices[k].workload_cycles(), f).unwrap();
            assert!(rel_err(t, alloc.tau_cp_s) < 1e-12);
        }
    }
}
