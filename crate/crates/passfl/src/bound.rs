//! Optimality-gap bound machinery.
//!
//! After each round the excess loss contracts by ρ = 1 − δϑ/L and picks up
//! a penalty A_t with two parts: an aggregation-error term that grows with
//! the data volume excluded from the round, and a local-drift floor that is
//! present even under full participation.

use serde::{Deserialize, Serialize};

use crate::scenario::LearnParams;
use crate::{Error, Result};

/// Scheduling-dependent learning penalty F_learn = |D| − D(s) (samples).
pub fn f_learn(mask: &[bool], data_sizes: &[u64]) -> u64 {
    let total: u64 = data_sizes.iter().sum();
    total - scheduled_data(mask, data_sizes)
}

/// Scheduled data volume D(s) (samples).
pub fn scheduled_data(mask: &[bool], data_sizes: &[u64]) -> u64 {
    mask.iter().zip(data_sizes).filter(|(&s, _)| s).map(|(_, &n)| n).sum()
}

/// Per-round penalty
/// A_t = (2ϑε²/(L|D|²))·(|D| − D(s))² + ϑ³ε²/(2L|D|²).
pub fn a_t(mask: &[bool], params: &LearnParams, data_sizes: &[u64]) -> Result<f64> {
    params.contraction()?;
    let total: f64 = params.total_data as f64;
    let excluded = f_learn(mask, data_sizes) as f64;
    let theta = params.local_steps as f64;
    let eps2 = params.grad_bound * params.grad_bound;
    let l = params.lipschitz;
    let aggregation = 2.0 * theta * eps2 / (l * total * total) * excluded * excluded;
    let drift = theta.powi(3) * eps2 / (2.0 * l * total * total);
    Ok(aggregation + drift)
}

/// Per-round record of the gap envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTrace {
    /// Contraction factor ρ = 1 − δϑ/L.
    pub contraction: f64,
    /// Initial gap O_0.
    pub initial_gap: f64,
    /// Per-round penalties A_t, t = 1..T.
    pub a_t: Vec<f64>,
    /// Envelope values O_t^ub, t = 1..T.
    pub envelope: Vec<f64>,
    /// Scheduled data volumes D(s^t), t = 1..T.
    pub scheduled_data: Vec<u64>,
}

/// Evaluates the gap envelope O_T^ub = ρ^T·O_0 + Σ_t A_t·ρ^{T−t} through
/// its recursion O_t^ub = ρ·O_{t−1}^ub + A_t.
pub fn gap_envelope(
    initial_gap: f64,
    masks: &[Vec<bool>],
    params: &LearnParams,
    data_sizes: &[u64],
) -> Result<BoundTrace> {
    if initial_gap < 0.0 {
        return Err(Error::Config(format!("initial gap must be nonnegative, got {initial_gap}")));
    }
    let rho = params.contraction()?;
    let mut a_values = Vec::with_capacity(masks.len());
    let mut envelope = Vec::with_capacity(masks.len());
    let mut scheduled = Vec::with_capacity(masks.len());
    let mut current = initial_gap;
    for mask in masks {
        let a = a_t(mask, params, data_sizes)?;
        current = rho * current + a;
        a_values.push(a);
        envelope.push(current);
        scheduled.push(scheduled_data(mask, data_sizes));
    }
    Ok(BoundTrace {
        contraction: rho,
        initial_gap,
        a_t: a_values,
        envelope,
        scheduled_data: scheduled,
    })
}

/// Closed form of the envelope at round T (cross-check for the recursion).
pub fn gap_envelope_closed_form(
    initial_gap: f64,
    a_values: &[f64],
    contraction: f64,
) -> f64 {
    let t = a_values.len() as i32;
    let mut value = contraction.powi(t) * initial_gap;
    for (i, &a) in a_values.iter().enumerate() {
        value += a * contraction.powi(t - 1 - i as i32);
    }
    value
}

/// Aggregation error induced by partial scheduling:
/// ‖∇F − (1/D(s))·Σ_k s_k|D_k|∇F_k‖₂.
pub fn aggregation_error(
    global_grad: &[f64],
    local_grads: &[Vec<f64>],
    mask: &[bool],
    data_sizes: &[u64],
) -> Result<f64> {
    let d_s = scheduled_data(mask, data_sizes);
    if d_s == 0 {
        return Err(Error::Config("aggregation error undefined for empty schedule".into()));
    }
    let dim = global_grad.len();
    for g in local_grads {
        if g.len() != dim {
            return Err(Error::Config("gradient dimension mismatch".into()));
        }
    }
    let mut err2 = 0.0;
    for i in 0..dim {
        let mut avg = 0.0;
        for (k, g) in local_grads.iter().enumerate() {
            if mask[k] {
                avg += data_sizes[k] as f64 * g[i];
            }
        }
        let diff = global_grad[i] - avg / d_s as f64;
        err2 += diff * diff;
    }
    Ok(err2.sqrt())
}

/// Upper bound on the squared local-drift norm:
/// ‖d_{t−1}‖² ≤ ϑ²ε²/(|D|·D(s)).
pub fn drift_bound(params: &LearnParams, scheduled_data: u64) -> f64 {
    let theta = params.local_steps as f64;
    theta * theta * params.grad_bound * params.grad_bound
        / (params.total_data as f64 * scheduled_data as f64)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
