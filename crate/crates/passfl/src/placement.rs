//! Inner-loop antenna placement: coordinate updates of the weighted-gain
//! surrogate over a spacing-feasible grid.
//!
//! The placement objective is the Jensen surrogate Σ_k w_k·G_k(x) with
//! combined weights w_k = θ_k·a_k. Holding all antennas but one fixed, the
//! gain splits as G_k = |Π_k(x) + C_{k,n}|² with C_{k,n} the cached sum of
//! the other antennas' contributions, which makes each coordinate update a
//! 1-D grid search.

use num_complex::Complex64;

use crate::channel::{contribution, Placement};
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Default number of grid points over the waveguide span.
pub const DEFAULT_GRID_POINTS: usize = 2001;
/// Default maximum Gauss–Seidel sweeps.
pub const DEFAULT_MAX_SWEEPS: usize = 20;

/// Uniform candidate grid on [0, D_x].
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementGrid {
    points: Vec<f64>,
    step: f64,
}

impl PlacementGrid {
    pub fn new(num_points: usize, span_m: f64) -> Result<Self> {
        if num_points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {num_points}")));
        }
        if !(span_m > 0.0) {
            return Err(Error::Config(format!("grid span must be positive, got {span_m}")));
        }
        let step = span_m / (num_points - 1) as f64;
        let points = (0..num_points).map(|i| i as f64 * step).collect();
        Ok(Self { points, step })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Nearest grid point to `x`.
    pub fn snap(&self, x: f64) -> f64 {
        let idx = (x / self.step).round() as usize;
        self.points[idx.min(self.points.len() - 1)]
    }

    /// Smallest grid point ≥ `x`, if any.
    fn at_or_above(&self, x: f64) -> Option<f64> {
        let idx = (x / self.step).ceil() as usize;
        self.points.get(idx).copied()
    }

    /// Default inner-loop convergence tolerance: half a grid step.
    pub fn inner_tol(&self) -> f64 {
        self.step / 2.0
    }
}

/// One placement instance: the scenario geometry plus combined weights.
#[derive(Debug, Clone)]
pub struct PlacementProblem<'a> {
    pub scenario: &'a Scenario,
    /// Combined weights w_k = θ_k·a_k (nonnegative).
    pub weights: Vec<f64>,
    pub grid: PlacementGrid,
}

impl<'a> PlacementProblem<'a> {
    pub fn new(scenario: &'a Scenario, weights: Vec<f64>, grid_points: usize) -> Result<Self> {
        if weights.len() != scenario.num_devices() {
            return Err(Error::Config(format!(
                "expected {} weights, got {}",
                scenario.num_devices(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::Config("placement weights must be nonnegative".into()));
        }
        let grid = PlacementGrid::new(grid_points, scenario.area_m.0)?;
        Ok(Self { scenario, weights, grid })
    }
}

/// Coordinate profit for antenna n at candidate x:
/// Φ_n(x) = 2·Re{Σ_k ζ_{k,n}·Π_k(x)} + Σ_k w_k·|Π_k(x)|²
/// with ζ_{k,n} = w_k·C*_{k,n}.
pub fn phi(x: f64, c_others: &[Complex64], problem: &PlacementProblem) -> f64 {
    let mut cross = 0.0;
    let mut own = 0.0;
    for (k, &w) in problem.weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let pi = contribution(k, x, problem.scenario);
        cross += w * (c_others[k].conj() * pi).re;
        own += w * pi.norm_sqr();
    }
    2.0 * cross + own
}

/// Weighted-gain surrogate Σ_k w_k·|Σ_n Π_k(x_n)|² from a contribution
/// cache (rows per device, columns per antenna).
fn surrogate_from_cache(cache: &[Vec<Complex64>], weights: &[f64]) -> f64 {
    cache
        .iter()
        .zip(weights)
        .map(|(row, &w)| {
            if w == 0.0 {
                0.0
            } else {
                w * row.iter().sum::<Complex64>().norm_sqr()
            }
        })
        .sum()
}

fn build_cache(positions: &[f64], problem: &PlacementProblem) -> Vec<Vec<Complex64>> {
    (0..problem.scenario.num_devices())
        .map(|k| positions.iter().map(|&x| contribution(k, x, problem.scenario)).collect())
        .collect()
}

/// Spacing filter slack so that exactly-spaced grid points stay feasible.
const GRID_SPACING_SLACK: f64 = 1e-12;

/// Best feasible grid point for antenna n given the other positions;
/// ties break toward the smallest coordinate.
pub fn coordinate_update(
    n: usize,
    positions: &[f64],
    cache: &[Vec<Complex64>],
    problem: &PlacementProblem,
) -> Result<f64> {
    let c_others: Vec<Complex64> = cache
        .iter()
        .map(|row| row.iter().enumerate().filter(|&(m, _)| m != n).map(|(_, &v)| v).sum())
        .collect();
    let min_gap = problem.scenario.min_spacing_m * (1.0 - GRID_SPACING_SLACK);
    let mut best: Option<(f64, f64)> = None;
    for &x in problem.grid.points() {
        let feasible = positions
            .iter()
            .enumerate()
            .all(|(m, &xm)| m == n || (x - xm).abs() >= min_gap);
        if !feasible {
            continue;
        }
        let value = phi(x, &c_others, problem);
        if best.map_or(true, |(_, v)| value > v) {
            best = Some((x, value));
        }
    }
    best.map(|(x, _)| x).ok_or_else(|| {
        Error::Infeasible(format!("no spacing-feasible grid point for antenna {n}"))
    })
}

/// Result of a Gauss–Seidel placement run.
#[derive(Debug, Clone)]
pub struct GaussSeidelOutcome {
    pub placement: Placement,
    /// Surrogate value after the snap and after every coordinate update.
    pub surrogate_trace: Vec<f64>,
    /// Whether a full sweep completed with zero movement (the placement is
    /// stable under every 1-D update).
    pub coordinate_stable: bool,
}

/// Sequential coordinate updates until positions move less than `tol`
/// within a sweep or `max_sweeps` is reached. Incumbent positions are
/// snapped to the grid first so the surrogate trace is exactly monotone.
pub fn gauss_seidel(
    initial: &Placement,
    problem: &PlacementProblem,
    max_sweeps: usize,
    tol: f64,
) -> Result<GaussSeidelOutcome> {
    let mut positions = snap_positions(initial.positions(), problem)?;
    let mut cache = build_cache(&positions, problem);
    let mut trace = vec![surrogate_from_cache(&cache, &problem.weights)];
    let mut stable = false;
    for _ in 0..max_sweeps {
        let mut max_move: f64 = 0.0;
        for n in 0..positions.len() {
            let x_new = coordinate_update(n, &positions, &cache, problem)?;
            let moved = (x_new - positions[n]).abs();
            if moved > 0.0 {
                positions[n] = x_new;
                for (k, row) in cache.iter_mut().enumerate() {
                    row[n] = contribution(k, x_new, problem.scenario);
                }
            }
            max_move = max_move.max(moved);
            let value = surrogate_from_cache(&cache, &problem.weights);
            debug_assert!(
                value >= trace.last().unwrap() - 1e-9 * value.abs().max(1.0),
                "surrogate decreased: {} -> {}",
                trace.last().unwrap(),
                value
            );
            trace.push(value);
        }
        if max_move < tol {
            stable = max_move == 0.0;
            break;
        }
    }
    let placement = Placement::new(positions, problem.scenario)?;
    Ok(GaussSeidelOutcome { placement, surrogate_trace: trace, coordinate_stable: stable })
}

/// Snaps positions to the grid, restoring minimum spacing left to right if
/// rounding collapsed any pair.
fn snap_positions(positions: &[f64], problem: &PlacementProblem) -> Result<Vec<f64>> {
    let mut snapped: Vec<f64> = positions.iter().map(|&x| problem.grid.snap(x)).collect();
    snapped.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min_gap = problem.scenario.min_spacing_m;
    for i in 1..snapped.len() {
        if snapped[i] - snapped[i - 1] < min_gap * (1.0 - GRID_SPACING_SLACK) {
            snapped[i] = problem
                .grid
                .at_or_above(snapped[i - 1] + min_gap)
                .ok_or_else(|| Error::Infeasible("snapped placement exceeds span".into()))?;
        }
    }
    Ok(snapped)
}

/// Per-slot placement for one device: Gauss–Seidel with an indicator
/// weight on that device, started from the snapped uniform placement.
pub fn place_for_user(
    device_k: usize,
    scenario: &Scenario,
    grid_points: usize,
) -> Result<GaussSeidelOutcome> {
    let mut weights = vec![0.0; scenario.num_devices()];
    weights[device_k] = 1.0;
    let problem = PlacementProblem::new(scenario, weights, grid_points)?;
    let tol = problem.grid.inner_tol();
    gauss_seidel(&Placement::uniform(scenario), &problem, DEFAULT_MAX_SWEEPS, tol)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
