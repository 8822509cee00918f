//! Channel responses, per-device channel gain, and achievable uplink rate.
//!
//! The uplink from device k runs through two segments: free space from the
//! device to each pinching antenna, then the guided path along the
//! waveguide back to the feed-point. Both segments are lossless
//! line-of-sight; the per-antenna contribution collapses to a single
//! complex term Π_k(x) whose coherent sum gives the gain.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;
use crate::{Error, Result};

/// Pinching-antenna x-coordinates on the waveguide, ascending, with the
/// minimum-spacing invariant enforced at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    positions_m: Vec<f64>,
}

/// Relative slack used when checking the spacing invariant, to absorb
/// float dust from grid snapping.
const SPACING_SLACK: f64 = 1e-9;

impl Placement {
    /// Validates ordering, span, and spacing against the scenario.
    pub fn new(mut positions_m: Vec<f64>, scenario: &Scenario) -> Result<Self> {
        positions_m.sort_by(|a, b| a.partial_cmp(b).expect("antenna position is NaN"));
        if positions_m.len() != scenario.num_pas {
            return Err(Error::Config(format!(
                "expected {} antenna positions, got {}",
                scenario.num_pas,
                positions_m.len()
            )));
        }
        for &x in &positions_m {
            if !(0.0 <= x && x <= scenario.area_m.0) {
                return Err(Error::Config(format!(
                    "antenna position {x} outside waveguide span [0, {}]",
                    scenario.area_m.0
                )));
            }
        }
        let min_gap = scenario.min_spacing_m * (1.0 - SPACING_SLACK);
        for pair in positions_m.windows(2) {
            if pair[1] - pair[0] < min_gap {
                return Err(Error::Infeasible(format!(
                    "antenna spacing {} below minimum {}",
                    pair[1] - pair[0],
                    scenario.min_spacing_m
                )));
            }
        }
        Ok(Self { positions_m })
    }

    /// Uniform equal spacing over the span: x_n = (2n−1)·D_x/(2N).
    pub fn uniform(scenario: &Scenario) -> Self {
        let n = scenario.num_pas;
        let dx = scenario.area_m.0;
        let positions_m = (0..n).map(|i| (2 * i + 1) as f64 * dx / (2 * n) as f64).collect();
        Self { positions_m }
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions_m
    }

    pub fn len(&self) -> usize {
        self.positions_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions_m.is_empty()
    }
}

/// Channel gain G_k = |Σ_n Π_k(x_n)|², dimensionless (η factored out).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGain(pub f64);

impl ChannelGain {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Free-space distance from device k to waveguide coordinate x:
/// D_k(x) = √((x_k − x)² + y_k² + d²).
pub fn device_distance(device_k: usize, x: f64, scenario: &Scenario) -> f64 {
    let (xu, yu) = scenario.devices[device_k].position_m;
    let d = scenario.pa_height_m;
    ((xu - x).powi(2) + yu * yu + d * d).sqrt()
}

/// Single-antenna contribution Π_k(x) = e^{−j(κ·D_k(x) + κ_g·x)} / D_k(x).
///
/// The guided path length from the feed-point at the origin to coordinate
/// x is x itself.
pub fn contribution(device_k: usize, x: f64, scenario: &Scenario) -> Complex64 {
    let dist = device_distance(device_k, x, scenario);
    let phase = -(scenario.radio.kappa * dist + scenario.radio.kappa_g * x);
    Complex64::from_polar(1.0 / dist, phase)
}

/// Channel gain for device k under `placement`: the squared magnitude of
/// the coherent Π-sum over all antennas.
pub fn gain(device_k: usize, placement: &Placement, scenario: &Scenario) -> ChannelGain {
    let sum: Complex64 = placement
        .positions()
        .iter()
        .map(|&x| contribution(device_k, x, scenario))
        .sum();
    ChannelGain(sum.norm_sqr())
}

/// Gain of a conventional fixed-antenna array: same free-space terms, no
/// guided-phase component.
pub fn conventional_gain(device_k: usize, positions: &[f64], scenario: &Scenario) -> ChannelGain {
    let sum: Complex64 = positions
        .iter()
        .map(|&x| {
            let dist = device_distance(device_k, x, scenario);
            Complex64::from_polar(1.0 / dist, -scenario.radio.kappa * dist)
        })
        .sum();
    ChannelGain(sum.norm_sqr())
}

/// Antenna positions of the conventional baseline: N elements centered at
/// the middle of the span with λ/2 spacing.
pub fn conventional_positions(scenario: &Scenario) -> Vec<f64> {
    let n = scenario.num_pas;
    let center = scenario.area_m.0 / 2.0;
    let step = scenario.radio.wavelength_m / 2.0;
    (0..n)
        .map(|i| center + (i as f64 - (n as f64 - 1.0) / 2.0) * step)
        .collect()
}

/// Achievable uplink rate R_k = B·log₂(1 + P_k·η·G_k/(N·σ²)) (bit/s).
///
/// The transmit power is split across the N radiating points, hence the
/// 1/N factor inside the SNR.
pub fn rate(power_w: f64, gain: ChannelGain, scenario: &Scenario) -> Result<f64> {
    if power_w < 0.0 {
        return Err(Error::Config(format!("transmit power must be nonnegative, got {power_w}")));
    }
    let radio = &scenario.radio;
    let snr = power_w * radio.eta_m2 * gain.0 / (scenario.num_pas as f64 * radio.noise_power_w);
    Ok(radio.bandwidth_hz * (1.0 + snr).log2())
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::scenario::{generate_scenario, ScenarioTemplate};
    use rand::Rng;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    fn scenario_with_device(x: f64, y: f64) -> Scenario {
        let template = ScenarioTemplate::default();
        let mut sc = generate_scenario(1, 1, &template).unwrap();
        sc.devices[0].position_m = (x, y);
        sc
    }

    /// Direct evaluation of the two-segment channel product: the
    /// free-space vector entry times the guided-phase entry, summed over
    /// antennas, with η factored back out. Independent of `contribution`.
    fn direct_gain(device_k: usize, positions: &[f64], sc: &Scenario) -> f64 {
        let r = &sc.radio;
        let (xu, yu) = sc.devices[device_k].position_m;
        let d = sc.pa_height_m;
        let mut sum = Complex64::new(0.0, 0.0);
        for &xp in positions {
            let dist = ((xu - xp).powi(2) + yu * yu + d * d).sqrt();
            let h = Complex64::from_polar(
                r.eta_m2.sqrt() / dist,
                -2.0 * std::f64::consts::PI / r.wavelength_m * dist,
            );
            // Guided segment: feed-point at the origin of the waveguide.
            let g = Complex64::from_polar(
                1.0,
                -2.0 * std::f64::consts::PI / r.guided_wavelength_m * xp,
            );
            sum += g * h;
        }
        sum.norm_sqr() / r.eta_m2
    }

    #[test]
    fn contribution_magnitude_overhead() {
        let sc = scenario_with_device(10.0, 0.0);
        let pi = contribution(0, 10.0, &sc);
        assert!(rel_err(pi.norm(), 1.0 / 3.0) < 1e-12);
    }

    #[test]
    fn contribution_magnitude_three_four_five() {
        let sc = scenario_with_device(10.0, 4.0);
        let pi = contribution(0, 10.0, &sc);
        assert!(rel_err(pi.norm(), 1.0 / 5.0) < 1e-12);
    }

    #[test]
    fn contribution_is_unit_phase_over_distance() {
        let mut rng = rng::seeded(42);
        let sc = scenario_with_device(12.0, -3.5);
        for _ in 0..100 {
            let x = rng.gen_range(0.0..30.0);
            let pi = contribution(0, x, &sc);
            assert!(rel_err(pi.norm(), 1.0 / device_distance(0, x, &sc)) < 1e-12);
        }
    }

    #[test]
    fn single_antenna_overhead_gain() {
        let template = ScenarioTemplate { num_pas: 1, ..ScenarioTemplate::default() };
        let mut sc = generate_scenario(1, 1, &template).unwrap();
        sc.devices[0].position_m = (10.0, 0.0);
        let p = Placement::new(vec![10.0], &sc).unwrap();
        let g = gain(0, &p, &sc);
        assert!(rel_err(g.0, 1.0 / 9.0) < 1e-12);
    }

    #[test]
    fn co_phased_pair_quadruples_single_gain() {
        // Two antennas symmetric about the device x, one guided wavelength
        // apart: equal distances, guided phases differing by exactly 2π.
        let template = ScenarioTemplate { num_pas: 2, ..ScenarioTemplate::default() };
        let mut sc = generate_scenario(1, 1, &template).unwrap();
        sc.devices[0].position_m = (15.0, 0.0);
        let half = sc.radio.guided_wavelength_m / 2.0;
        assert!(2.0 * half >= sc.min_spacing_m);
        let p = Placement::new(vec![15.0 - half, 15.0 + half], &sc).unwrap();
        let dist = device_distance(0, 15.0 - half, &sc);
        let g = gain(0, &p, &sc);
        assert!(rel_err(g.0, 4.0 / (dist * dist)) < 1e-9);
        // Equality case of the triangle bound.
        let bound = (2.0 / dist).powi(2);
        assert!(g.0 <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn gain_matches_direct_two_segment_product() {
        let template = ScenarioTemplate::default();
        let mut rng = rng::seeded(7);
        for seed in 0..40 {
            let sc = generate_scenario(seed, 4, &template).unwrap();
            for _ in 0..25 {
                let positions = random_feasible_positions(&mut rng, &sc);
                let p = Placement::new(positions.clone(), &sc).unwrap();
                for k in 0..sc.num_devices() {
                    let g = gain(k, &p, &sc).0;
                    let direct = direct_gain(k, p.positions(), &sc);
                    assert!(rel_err(g, direct) < 1e-10, "gain {g} direct {direct}");
                }
            }
        }
    }

    fn random_feasible_positions(rng: &mut impl Rng, sc: &Scenario) -> Vec<f64> {
        loop {
            let mut xs: Vec<f64> =
                (0..sc.num_pas).map(|_| rng.gen_range(0.0..sc.area_m.0)).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if xs.windows(2).all(|w| w[1] - w[0] >= sc.min_spacing_m) {
                return xs;
            }
        }
    }

    #[test]
    fn triangle_bound_holds() {
        let template = ScenarioTemplate::default();
        let mut rng = rng::seeded(11);
        for seed in 0..20 {
            let sc = generate_scenario(seed, 3, &template).unwrap();
            for _ in 0..50 {
                let positions = random_feasible_positions(&mut rng, &sc);
                let p = Placement::new(positions, &sc).unwrap();
                for k in 0..sc.num_devices() {
                    let bound: f64 = p
                        .positions()
                        .iter()
                        .map(|&x| 1.0 / device_distance(k, x, &sc))
                        .sum();
                    assert!(gain(k, &p, &sc).0 <= bound * bound * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn rate_zero_power_is_zero() {
        let sc = generate_scenario(1, 1, &ScenarioTemplate::default()).unwrap();
        assert_eq!(rate(0.0, ChannelGain(0.5), &sc).unwrap(), 0.0);
    }

    #[test]
    fn rate_negative_power_rejected() {
        let sc = generate_scenario(1, 1, &ScenarioTemplate::default()).unwrap();
        assert!(rate(-0.1, ChannelGain(0.5), &sc).is_err());
    }

    #[test]
    fn rate_reference_value() {
        // P = 0.2 W, G = 0.04, N = 4, B = 1 MHz at the default radio.
        let sc = generate_scenario(1, 1, &ScenarioTemplate::default()).unwrap();
        let r = rate(0.2, ChannelGain(0.04), &sc).unwrap();
        assert!(rel_err(r, 1.8476354123278297e7) < 1e-9);
    }

    #[test]
    fn rate_monotone_in_power_gain_bandwidth() {
        let template = ScenarioTemplate::default();
        let sc = generate_scenario(1, 1, &template).unwrap();
        let r1 = rate(0.1, ChannelGain(0.04), &sc).unwrap();
        let r2 = rate(0.2, ChannelGain(0.04), &sc).unwrap();
        let r3 = rate(0.2, ChannelGain(0.08), &sc).unwrap();
        assert!(r2 > r1);
        assert!(r3 > r2);
        let wide = ScenarioTemplate {
            radio: crate::scenario::RadioRaw { bandwidth_hz: 2.0e6, ..template.radio },
            ..template
        };
        let sc_wide = generate_scenario(1, 1, &wide).unwrap();
        assert!(rate(0.2, ChannelGain(0.04), &sc_wide).unwrap() > r2);
    }

    #[test]
    fn placement_spacing_enforced() {
        let sc = generate_scenario(1, 1, &ScenarioTemplate::default()).unwrap();
        let tight = sc.min_spacing_m * 0.5;
        assert!(matches!(
            Placement::new(vec![10.0, 10.0 + tight, 12.0, 14.0], &sc),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn uniform_placement_is_feasible() {
        for n in [1usize, 2, 4, 8, 16] {
            let template = ScenarioTemplate { num_pas: n, ..ScenarioTemplate::default() };
            let sc = generate_scenario(1, 2, &template).unwrap();
            let u = Placement::uniform(&sc);
            assert!(Placement::new(u.positions().to_vec(), &sc).is_ok());
        }
    }
}
