//! Scenario configuration: geometry, devices, radio and compute parameters.
//!
//! All types are immutable after construction and validated against their
//! invariants at that point. Randomized generation is fully seeded.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

/// Speed of light in vacuum, exact SI value (m/s).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Radio-layer configuration with derived constants.
///
/// Construct via [`RadioConfig::derive`]; the derived fields are functions
/// of the four raw inputs and must never be set independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    /// Carrier frequency f_c (Hz).
    pub carrier_freq_hz: f64,
    /// Signal bandwidth B (Hz).
    pub bandwidth_hz: f64,
    /// Noise power spectral density (dBm/Hz).
    pub noise_psd_dbm_per_hz: f64,
    /// Effective refractive index of the dielectric waveguide (≥ 1).
    pub n_eff: f64,
    /// Free-space wavelength λ = c/f_c (m).
    pub wavelength_m: f64,
    /// Guided wavelength λ_g = λ/n_eff (m).
    pub guided_wavelength_m: f64,
    /// Path-loss constant η = c²/(16π²f_c²) (m²).
    pub eta_m2: f64,
    /// Free-space wavenumber κ = 2π/λ (rad/m).
    pub kappa: f64,
    /// Guided wavenumber κ_g = 2π/λ_g (rad/m).
    pub kappa_g: f64,
    /// Noise power σ² = 10^((PSD_dBm − 30)/10)·B (W).
    pub noise_power_w: f64,
}

/// Raw radio inputs prior to derivation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioRaw {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_dbm_per_hz: f64,
    pub n_eff: f64,
}

impl Default for RadioRaw {
    fn default() -> Self {
        Self {
            carrier_freq_hz: 28.0e9,
            bandwidth_hz: 1.0e6,
            noise_psd_dbm_per_hz: -174.0,
            n_eff: 1.44,
        }
    }
}

impl RadioConfig {
    /// Populates the derived constants from raw inputs.
    pub fn derive(raw: &RadioRaw) -> Result<Self> {
        if !(raw.carrier_freq_hz > 0.0) {
            return Err(Error::Config(format!(
                "carrier_freq_hz must be positive, got {}",
                raw.carrier_freq_hz
            )));
        }
        if !(raw.bandwidth_hz > 0.0) {
            return Err(Error::Config(format!(
                "bandwidth_hz must be positive, got {}",
                raw.bandwidth_hz
            )));
        }
        if !(raw.n_eff >= 1.0) {
            return Err(Error::Config(format!("n_eff must be >= 1, got {}", raw.n_eff)));
        }
        let wavelength_m = SPEED_OF_LIGHT_M_S / raw.carrier_freq_hz;
        let guided_wavelength_m = wavelength_m / raw.n_eff;
        let eta_m2 = SPEED_OF_LIGHT_M_S * SPEED_OF_LIGHT_M_S
            / (16.0 * std::f64::consts::PI.powi(2) * raw.carrier_freq_hz.powi(2));
        let noise_power_w =
            10f64.powf((raw.noise_psd_dbm_per_hz - 30.0) / 10.0) * raw.bandwidth_hz;
        Ok(Self {
            carrier_freq_hz: raw.carrier_freq_hz,
            bandwidth_hz: raw.bandwidth_hz,
            noise_psd_dbm_per_hz: raw.noise_psd_dbm_per_hz,
            n_eff: raw.n_eff,
            wavelength_m,
            guided_wavelength_m,
            eta_m2,
            kappa: 2.0 * std::f64::consts::PI / wavelength_m,
            kappa_g: 2.0 * std::f64::consts::PI / guided_wavelength_m,
            noise_power_w,
        })
    }

    /// The raw inputs this configuration was derived from.
    pub fn raw(&self) -> RadioRaw {
        RadioRaw {
            carrier_freq_hz: self.carrier_freq_hz,
            bandwidth_hz: self.bandwidth_hz,
            noise_psd_dbm_per_hz: self.noise_psd_dbm_per_hz,
            n_eff: self.n_eff,
        }
    }
}

/// One edge device: position, workload, and budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    /// Position (x, y) on the ground plane, z = 0 (m).
    pub position_m: (f64, f64),
    /// Local dataset size |D_k| (samples).
    pub data_size_samples: u64,
    /// CPU cycles per sample C_k.
    pub cycles_per_sample: f64,
    /// Per-round energy budget E_k^max (J).
    pub e_max_j: f64,
    /// Maximum transmit power P (W).
    pub p_max_w: f64,
    /// Maximum CPU frequency f_max (Hz).
    pub f_max_hz: f64,
}

impl DeviceProfile {
    /// Total per-round computation workload C_k·|D_k| (cycles).
    pub fn workload_cycles(&self) -> f64 {
        self.cycles_per_sample * self.data_size_samples as f64
    }

    fn validate(&self, area: (f64, f64), index: usize) -> Result<()> {
        let (x, y) = self.position_m;
        if !(0.0 <= x && x <= area.0 && -area.1 / 2.0 <= y && y <= area.1 / 2.0) {
            return Err(Error::Config(format!(
                "device {index} position ({x}, {y}) outside area {}x{}",
                area.0, area.1
            )));
        }
        if self.data_size_samples < 1 {
            return Err(Error::Config(format!("device {index} has empty dataset")));
        }
        for (name, v) in [
            ("cycles_per_sample", self.cycles_per_sample),
            ("e_max_j", self.e_max_j),
            ("p_max_w", self.p_max_w),
            ("f_max_hz", self.f_max_hz),
        ] {
            if !(v > 0.0) {
                return Err(Error::Config(format!("device {index} {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Default device budgets used when generating scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceDefaults {
    pub data_size_samples: u64,
    pub cycles_per_sample: f64,
    pub e_max_j: f64,
    pub p_max_w: f64,
    pub f_max_hz: f64,
}

impl Default for DeviceDefaults {
    fn default() -> Self {
        Self {
            data_size_samples: 5000,
            cycles_per_sample: 1.0e6,
            e_max_j: 0.1,
            p_max_w: 0.2,
            f_max_hz: 1.8e9,
        }
    }
}

/// Template from which randomized scenarios are generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioTemplate {
    /// Area dimensions (D_x, D_y) (m).
    pub area_m: (f64, f64),
    /// Waveguide height d (m).
    pub pa_height_m: f64,
    /// Number of pinching antennas N.
    pub num_pas: usize,
    /// Model-update upload size D_b (bits).
    pub upload_bits: f64,
    /// Effective-capacitance coefficient ξ (J·s²/cycle³).
    pub kappa_eff: f64,
    /// Minimum antenna spacing Δℓ (m); defaults to λ/2 when absent.
    pub min_spacing_m: Option<f64>,
    /// Raw radio inputs.
    pub radio: RadioRaw,
    /// Budgets assigned to every generated device.
    pub device_defaults: DeviceDefaults,
}

impl Default for ScenarioTemplate {
    fn default() -> Self {
        Self {
            area_m: (30.0, 20.0),
            pa_height_m: 3.0,
            num_pas: 4,
            upload_bits: 1.0e6,
            kappa_eff: 1.0e-28,
            min_spacing_m: None,
            radio: RadioRaw::default(),
            device_defaults: DeviceDefaults::default(),
        }
    }
}

/// Immutable description of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Area dimensions (D_x, D_y) (m).
    pub area_m: (f64, f64),
    /// Waveguide height d (m); the feed-point sits at (0, 0, d).
    pub pa_height_m: f64,
    /// Number of pinching antennas N.
    pub num_pas: usize,
    /// Edge devices.
    pub devices: Vec<DeviceProfile>,
    /// Radio configuration with derived constants.
    pub radio: RadioConfig,
    /// Upload size D_b (bits).
    pub upload_bits: f64,
    /// Effective-capacitance coefficient ξ (J·s²/cycle³).
    pub kappa_eff: f64,
    /// Minimum antenna spacing Δℓ (m).
    pub min_spacing_m: f64,
}

impl Scenario {
    /// Builds and validates a scenario from explicit devices.
    pub fn new(template: &ScenarioTemplate, devices: Vec<DeviceProfile>) -> Result<Self> {
        let radio = RadioConfig::derive(&template.radio)?;
        let min_spacing_m = template
            .min_spacing_m
            .unwrap_or(radio.wavelength_m / 2.0);
        let sc = Self {
            area_m: template.area_m,
            pa_height_m: template.pa_height_m,
            num_pas: template.num_pas,
            devices,
            radio,
            upload_bits: template.upload_bits,
            kappa_eff: template.kappa_eff,
            min_spacing_m,
        };
        sc.validate()?;
        Ok(sc)
    }

    fn validate(&self) -> Result<()> {
        if self.num_pas < 1 {
            return Err(Error::Config("num_pas must be >= 1".into()));
        }
        if self.devices.is_empty() {
            return Err(Error::Config("at least one device required".into()));
        }
        if !(self.min_spacing_m > 0.0) {
            return Err(Error::Config("min_spacing_m must be positive".into()));
        }
        if self.num_pas as f64 * self.min_spacing_m >= self.area_m.0 {
            return Err(Error::Config(format!(
                "placement infeasible: {} antennas at spacing {} exceed span {}",
                self.num_pas, self.min_spacing_m, self.area_m.0
            )));
        }
        if !(self.upload_bits > 0.0) {
            return Err(Error::Config("upload_bits must be positive".into()));
        }
        if !(self.kappa_eff > 0.0) {
            return Err(Error::Config("kappa_eff must be positive".into()));
        }
        if !(self.area_m.0 > 0.0 && self.area_m.1 > 0.0) {
            return Err(Error::Config("area dimensions must be positive".into()));
        }
        if !(self.pa_height_m > 0.0) {
            return Err(Error::Config("pa_height_m must be positive".into()));
        }
        for (i, dev) in self.devices.iter().enumerate() {
            dev.validate(self.area_m, i)?;
        }
        Ok(())
    }

    /// Number of devices K.
    pub fn num_devices(&self) -> usize {
        self.devices.len()
    }

    /// Total data volume |D| (samples).
    pub fn total_data(&self) -> u64 {
        self.devices.iter().map(|d| d.data_size_samples).sum()
    }

    /// Per-device data sizes (samples).
    pub fn data_sizes(&self) -> Vec<u64> {
        self.devices.iter().map(|d| d.data_size_samples).collect()
    }

    /// Copy of this scenario with per-device data sizes replaced.
    ///
    /// Used to align the radio scenario with the shard sizes of a
    /// synthetic learning task.
    pub fn with_data_sizes(&self, sizes: &[u64]) -> Result<Self> {
        if sizes.len() != self.devices.len() {
            return Err(Error::Config(format!(
                "expected {} data sizes, got {}",
                self.devices.len(),
                sizes.len()
            )));
        }
        let mut sc = self.clone();
        for (dev, &n) in sc.devices.iter_mut().zip(sizes) {
            dev.data_size_samples = n;
        }
        sc.validate()?;
        Ok(sc)
    }
}

/// Generates a scenario with `k` devices placed uniformly at random in the
/// template's rectangle. Identical `(seed, k, template)` yield identical
/// scenarios.
pub fn generate_scenario(seed: u64, k: usize, template: &ScenarioTemplate) -> Result<Scenario> {
    if k == 0 {
        return Err(Error::Config("device count K must be positive".into()));
    }
    let mut rng = rng::seeded_stream(seed, rng::stream::SCENARIO);
    let (dx, dy) = template.area_m;
    let mut devices = Vec::with_capacity(k);
    for _ in 0..k {
        let x = rng.gen_range(0.0..=dx);
        let y = rng.gen_range(-dy / 2.0..=dy / 2.0);
        let d = &template.device_defaults;
        devices.push(DeviceProfile {
            position_m: (x, y),
            data_size_samples: d.data_size_samples,
            cycles_per_sample: d.cycles_per_sample,
            e_max_j: d.e_max_j,
            p_max_w: d.p_max_w,
            f_max_hz: d.f_max_hz,
        });
    }
    Scenario::new(template, devices)
}

/// Constants of the optimality-gap bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnParams {
    /// Smoothness constant L of the global loss.
    pub lipschitz: f64,
    /// Polyak–Łojasiewicz constant δ (0 < δ ≤ L).
    pub pl_delta: f64,
    /// Local gradient steps per round ϑ.
    pub local_steps: u32,
    /// Per-sample gradient-norm bound ε.
    pub grad_bound: f64,
    /// Learning rate ζ = 1/L.
    pub learn_rate: f64,
    /// Total data volume |D| (samples).
    pub total_data: u64,
}

impl LearnParams {
    pub fn new(
        lipschitz: f64,
        pl_delta: f64,
        local_steps: u32,
        grad_bound: f64,
        total_data: u64,
    ) -> Result<Self> {
        if !(lipschitz > 0.0) {
            return Err(Error::Config(format!("lipschitz must be positive, got {lipschitz}")));
        }
        if !(pl_delta > 0.0 && pl_delta <= lipschitz) {
            return Err(Error::Config(format!(
                "pl_delta must satisfy 0 < delta <= L, got delta={pl_delta}, L={lipschitz}"
            )));
        }
        if local_steps < 1 {
            return Err(Error::Config("local_steps must be >= 1".into()));
        }
        if !(grad_bound > 0.0) {
            return Err(Error::Config(format!("grad_bound must be positive, got {grad_bound}")));
        }
        if total_data == 0 {
            return Err(Error::Config("total_data must be positive".into()));
        }
        let params = Self {
            lipschitz,
            pl_delta,
            local_steps,
            grad_bound,
            learn_rate: 1.0 / lipschitz,
            total_data,
        };
        params.contraction()?;
        Ok(params)
    }

    /// Contraction factor ρ = 1 − δϑ/L; errors when δϑ/L ≥ 1, where the
    /// gap bound is meaningless.
    pub fn contraction(&self) -> Result<f64> {
        let ratio = self.pl_delta * self.local_steps as f64 / self.lipschitz;
        if ratio >= 1.0 {
            return Err(Error::Config(format!(
                "contraction violated: delta*theta/L = {ratio} >= 1"
            )));
        }
        Ok(1.0 - ratio)
    }

    /// Copy with a different per-sample gradient bound (used to substitute
    /// the empirical maximum when the analytic bound is unavailable).
    pub fn with_grad_bound(&self, grad_bound: f64) -> Result<Self> {
        Self::new(
            self.lipschitz,
            self.pl_delta,
            self.local_steps,
            grad_bound,
            self.total_data,
        )
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn derived_wavelength_at_28ghz() {
        let radio = RadioConfig::derive(&RadioRaw::default()).unwrap();
        assert!(rel_err(radio.wavelength_m, 1.07068735e-2) < 1e-9);
    }

    #[test]
    fn derived_eta_at_28ghz() {
        let radio = RadioConfig::derive(&RadioRaw::default()).unwrap();
        assert!(rel_err(radio.eta_m2, 7.259481705540116e-7) < 1e-12);
    }

    #[test]
    fn derived_noise_power() {
        let radio = RadioConfig::derive(&RadioRaw::default()).unwrap();
        assert!(rel_err(radio.noise_power_w, 3.981071705534986e-15) < 1e-12);
    }

    #[test]
    fn guided_wavelength_consistent() {
        let radio = RadioConfig::derive(&RadioRaw::default()).unwrap();
        assert!(rel_err(radio.guided_wavelength_m * radio.n_eff, radio.wavelength_m) < 1e-12);
    }

    #[test]
    fn rederivation_is_idempotent() {
        let radio = RadioConfig::derive(&RadioRaw::default()).unwrap();
        let again = RadioConfig::derive(&radio.raw()).unwrap();
        assert_eq!(radio, again);
    }

    #[test]
    fn nonpositive_frequency_rejected() {
        let raw = RadioRaw { carrier_freq_hz: 0.0, ..RadioRaw::default() };
        assert!(matches!(RadioConfig::derive(&raw), Err(Error::Config(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let template = ScenarioTemplate::default();
        let a = generate_scenario(1, 12, &template).unwrap();
        let b = generate_scenario(1, 12, &template).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn different_seeds_differ() {
        let template = ScenarioTemplate::default();
        let a = generate_scenario(1, 12, &template).unwrap();
        let b = generate_scenario(2, 12, &template).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn generated_positions_within_bounds() {
        let template = ScenarioTemplate::default();
        for seed in 0..1000 {
            let sc = generate_scenario(seed, 12, &template).unwrap();
            for dev in &sc.devices {
                let (x, y) = dev.position_m;
                assert!((0.0..=sc.area_m.0).contains(&x));
                assert!((-sc.area_m.1 / 2.0..=sc.area_m.1 / 2.0).contains(&y));
            }
        }
    }

    #[test]
    fn zero_devices_rejected() {
        let template = ScenarioTemplate::default();
        assert!(matches!(generate_scenario(1, 0, &template), Err(Error::Config(_))));
    }

    #[test]
    fn contraction_precondition_enforced() {
        // delta*theta/L = 1 exactly: invalid.
        assert!(LearnParams::new(10.0, 1.0, 10, 1.0, 1000).is_err());
        let p = LearnParams::new(10.0, 1.0, 5, 1.0, 1000).unwrap();
        assert!((p.contraction().unwrap() - 0.5).abs() < 1e-15);
        assert!((p.learn_rate - 0.1).abs() < 1e-15);
    }

    #[test]
    fn spacing_feasibility_checked() {
        let template = ScenarioTemplate {
            num_pas: 10,
            min_spacing_m: Some(5.0),
            ..ScenarioTemplate::default()
        };
        assert!(matches!(generate_scenario(1, 3, &template), Err(Error::Config(_))));
    }

    #[test]
    fn default_spacing_is_half_wavelength() {
        let sc = generate_scenario(1, 3, &ScenarioTemplate::default()).unwrap();
        assert!(rel_err(sc.min_spacing_m, sc.radio.wavelength_m / 2.0) < 1e-15);
    }
}
