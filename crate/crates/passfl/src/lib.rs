//! Simulator and optimization toolkit for pinching-antenna-assisted
//! federated learning (FedPASS).
//!
//! A pinching-antenna system (PASS) is a long dielectric waveguide whose
//! radiation points can be repositioned along its axis. This crate models
//! the uplink of a federated-learning deployment served by such a system
//! and co-optimizes, per communication round, the latency and the
//! learning-penalty objectives:
//!
//! - [`scenario`] — configuration types, derived radio constants, seeded
//!   scenario generation.
//! - [`channel`] — free-space/guided channel responses, channel gain and
//!   achievable rate.
//! - [`cost`] — per-round latency and energy accounting.
//! - [`bound`] — optimality-gap bound machinery (per-round penalty,
//!   contraction envelope, aggregation error).
//! - [`solvers`] — the three separable outer-loop subproblems (time
//!   allocation, scheduling, communication energies).
//! - [`placement`] — Gauss–Seidel coordinate updates of antenna positions
//!   over a spacing-feasible grid.
//! - [`driver`] — the two-tier optimizer, Pareto sweep, and baseline
//!   pipelines.
//! - [`flsim`] — desk-scale synchronous FL simulator with bound
//!   verification on quadratic tasks.
//!
//! All randomness flows through explicit seeds (see [`rng`]); every type
//! is immutable after construction and safe to share across threads.

pub mod bound;
pub mod channel;
pub mod cost;
pub mod driver;
pub mod flsim;
pub mod placement;
pub mod rng;
pub mod scenario;
pub mod solvers;

use thiserror::Error;

/// Crate-wide error type.
///
/// The three variants map onto the CLI exit-code convention:
/// configuration errors (2), infeasibility (3), internal assertion
/// failures (4).
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or input value.
    #[error("configuration error: {0}")]
    Config(String),
    /// The requested allocation cannot be satisfied.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// An internal invariant was violated.
    #[error("internal assertion: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
