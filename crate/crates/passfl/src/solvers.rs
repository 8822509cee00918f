//! The three outer-loop subproblems, solved by structure instead of a
//! general convex-programming layer.
//!
//! With antenna positions fixed, the scalarized objective decomposes per
//! device: the time subproblem reduces to a 1-D root find per scheduled
//! device, the scheduling subproblem is a separable box LP with a closed
//! form, and the energy subproblem is maximized at a per-device box corner
//! because each rate is strictly increasing in its own energy.

use serde::{Deserialize, Serialize};

use crate::channel::{rate, ChannelGain};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Scalarization weight and per-device convex coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffConfig {
    /// Scalarization weight λ ∈ (0, 1).
    pub lambda: f64,
    /// Convex coefficients θ (θ_k ≥ 0, Σθ_k = 1).
    pub theta: Vec<f64>,
}

impl TradeoffConfig {
    pub fn new(lambda: f64, theta: Vec<f64>) -> Result<Self> {
        validate_lambda(lambda)?;
        if theta.iter().any(|&t| t < 0.0) {
            return Err(Error::Config("theta weights must be nonnegative".into()));
        }
        let sum: f64 = theta.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("theta weights must sum to 1, got {sum}")));
        }
        Ok(Self { lambda, theta })
    }

    /// Uniform weights over scheduled devices, zero elsewhere.
    pub fn uniform_over_scheduled(lambda: f64, mask: &[bool]) -> Result<Self> {
        let count = mask.iter().filter(|&&s| s).count();
        if count == 0 {
            return Err(Error::Config("cannot build weights for an empty schedule".into()));
        }
        let theta =
            mask.iter().map(|&s| if s { 1.0 / count as f64 } else { 0.0 }).collect();
        Self::new(lambda, theta)
    }
}

pub fn validate_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Config(format!("lambda out of (0,1): {lambda}")));
    }
    Ok(())
}

/// Output of the time-allocation subproblem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeAllocation {
    /// Per-device communication times (s); zero for unscheduled devices.
    pub tau_cm_s: Vec<f64>,
    /// Shared computation time (s); zero when the schedule is empty.
    pub tau_cp_s: f64,
}

/// Bisection bracket and stopping rule for the communication-time root.
const TAU_BRACKET_LO: f64 = 1e-9;
const TAU_BRACKET_HI: f64 = 1e3;
const TAU_ABS_TOL: f64 = 1e-12;
const TAU_MAX_ITERS: usize = 200;

/// Bits delivered in `tau` seconds at communication energy `e_cm`:
/// τ·B·log₂(1 + E·η·G/(τ·σ²·N)). Increasing in τ with a finite limit.
fn delivered_bits(tau: f64, e_cm: f64, g: f64, sc: &Scenario) -> f64 {
    let radio = &sc.radio;
    let x = e_cm * radio.eta_m2 * g / (tau * radio.noise_power_w * sc.num_pas as f64);
    tau * radio.bandwidth_hz * x.ln_1p() / std::f64::consts::LN_2
}

/// Solves the time subproblem: for each scheduled device, the minimal
/// communication time delivering the upload at its fixed energy (the rate
/// constraint is tight at the optimum), plus the minimal feasible shared
/// computation time.
pub fn solve_times(
    scenario: &Scenario,
    mask: &[bool],
    e_cm_j: &[f64],
    gains: &[ChannelGain],
) -> Result<TimeAllocation> {
    let k = scenario.num_devices();
    let mut tau_cm = vec![0.0; k];
    let mut tau_cp: f64 = 0.0;
    for i in 0..k {
        if !mask[i] {
            continue;
        }
        let dev = &scenario.devices[i];
        if e_cm_j[i] >= dev.e_max_j {
            return Err(Error::Infeasible(format!(
                "device {i}: communication energy {} leaves no computation budget (max {})",
                e_cm_j[i], dev.e_max_j
            )));
        }
        if !(gains[i].0 > 0.0) {
            return Err(Error::Infeasible(format!("device {i}: zero channel gain while scheduled")));
        }
        tau_cm[i] = solve_comm_time(scenario, e_cm_j[i], gains[i].0)?;
        let workload = dev.workload_cycles();
        let energy_floor =
            (scenario.kappa_eff * workload.powi(3) / (dev.e_max_j - e_cm_j[i])).sqrt();
        let freq_floor = workload / dev.f_max_hz;
        tau_cp = tau_cp.max(energy_floor.max(freq_floor));
    }
    Ok(TimeAllocation { tau_cm_s: tau_cm, tau_cp_s: tau_cp })
}

/// Root of D_b = τ·B·log₂(1 + E·η·G/(τ·σ²·N)) by bisection.
fn solve_comm_time(sc: &Scenario, e_cm: f64, g: f64) -> Result<f64> {
    let db = sc.upload_bits;
    let residual = |tau: f64| delivered_bits(tau, e_cm, g, sc) - db;
    let mut hi = TAU_BRACKET_HI;
    if residual(hi) < 0.0 {
        return Err(Error::Infeasible(format!(
            "upload of {db} bits unreachable within {TAU_BRACKET_HI} s at energy {e_cm}"
        )));
    }
    let mut lo = TAU_BRACKET_LO;
    while residual(lo) > 0.0 && lo > 1e-18 {
        hi = lo;
        lo *= 0.1;
    }
    for _ in 0..TAU_MAX_ITERS {
        if hi - lo <= TAU_ABS_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if residual(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // The upper endpoint keeps the delivery constraint satisfied.
    Ok(hi)
}

/// Output of the scheduling subproblem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSolution {
    /// Relaxed mask in [0,1]^K (the box-LP optimum).
    pub relaxed: Vec<f64>,
    /// Thresholded mask with energy-infeasible devices dropped.
    pub rounded: Vec<bool>,
    /// Scalarized per-device coefficients c_k = λ(τ_k + |D_k|) − |D_k|.
    pub coefficients: Vec<f64>,
    /// Per-device upper bounds of the relaxed box.
    pub upper_bounds: Vec<f64>,
}

/// Solves the scheduling subproblem: a separable LP over [0,1]^K whose
/// optimum sets s_k to its upper bound when its coefficient is negative
/// and to zero otherwise; ties (c_k = 0) resolve to zero.
pub fn solve_schedule(
    scenario: &Scenario,
    times: &TimeAllocation,
    e_cm_j: &[f64],
    lambda: f64,
    gains: &[ChannelGain],
) -> Result<ScheduleSolution> {
    validate_lambda(lambda)?;
    let k = scenario.num_devices();
    let mut relaxed = vec![0.0; k];
    let mut rounded = vec![false; k];
    let mut coefficients = vec![0.0; k];
    let mut upper_bounds = vec![0.0; k];
    for i in 0..k {
        let dev = &scenario.devices[i];
        let tau = times.tau_cm_s[i];
        let data = dev.data_size_samples as f64;
        let c = lambda * (tau + data) - data;
        coefficients[i] = c;
        let mut ub = 0.0;
        if tau > 0.0 {
            let r = rate(e_cm_j[i] / tau, gains[i], scenario)?;
            ub = (tau * r / scenario.upload_bits).min(1.0);
            let workload = dev.workload_cycles();
            if times.tau_cp_s > 0.0 {
                let headroom = dev.e_max_j - e_cm_j[i];
                ub = ub.min(
                    headroom * times.tau_cp_s * times.tau_cp_s
                        / (scenario.kappa_eff * workload.powi(3)),
                );
                ub = ub.min(dev.f_max_hz * times.tau_cp_s / workload);
            } else {
                ub = 0.0;
            }
            ub = ub.max(0.0);
        }
        upper_bounds[i] = ub;
        if c < 0.0 {
            relaxed[i] = ub;
        }
        // Threshold, then drop devices whose full scheduling would break
        // the energy budget at the current computation time.
        if relaxed[i] >= 0.5 {
            let workload = scenario.devices[i].workload_cycles();
            let e_cp = scenario.kappa_eff * workload.powi(3)
                / (times.tau_cp_s * times.tau_cp_s);
            rounded[i] =
                e_cm_j[i] + e_cp <= dev.e_max_j * (1.0 + 1e-9);
        }
    }
    Ok(ScheduleSolution { relaxed, rounded, coefficients, upper_bounds })
}

/// Output of the energy subproblem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySolution {
    /// Per-device communication energies (J); zero when unscheduled.
    pub e_cm_j: Vec<f64>,
    /// Devices whose feasible energy box is empty; the schedule must drop
    /// them.
    pub infeasible: Vec<usize>,
}

/// Solves the energy subproblem: each rate depends only on its own energy
/// and is strictly increasing, so any positive-weight scalarization is
/// maximized at the per-device upper box corner
/// E_k = min(P·τ_k, E_k^max − ξ·(C_k|D_k|)³/τ_cp²).
pub fn solve_energies(
    scenario: &Scenario,
    mask: &[bool],
    times: &TimeAllocation,
    theta: &[f64],
    _gains: &[ChannelGain],
) -> Result<EnergySolution> {
    debug_assert!(theta.iter().all(|&t| t >= 0.0));
    let k = scenario.num_devices();
    let mut e_cm = vec![0.0; k];
    let mut infeasible = Vec::new();
    for i in 0..k {
        if !mask[i] {
            continue;
        }
        let dev = &scenario.devices[i];
        if !(times.tau_cp_s > 0.0) {
            return Err(Error::Internal(format!(
                "energy subproblem needs tau_cp > 0 while device {i} is scheduled"
            )));
        }
        let workload = dev.workload_cycles();
        let e_cp = scenario.kappa_eff * workload.powi(3) / (times.tau_cp_s * times.tau_cp_s);
        let corner = (dev.p_max_w * times.tau_cm_s[i]).min(dev.e_max_j - e_cp);
        if corner <= 0.0 {
            infeasible.push(i);
            continue;
        }
        e_cm[i] = corner;
        debug_assert!(e_cm[i] <= dev.p_max_w * times.tau_cm_s[i] * (1.0 + 1e-12));
        debug_assert!(e_cm[i] + e_cp <= dev.e_max_j * (1.0 + 1e-12));
    }
    Ok(EnergySolution { e_cm_j: e_cm, infeasible })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
