//! Scenario configuration: radio, energy and geometry constants plus the
//! seeded generator for the default 8/16-UAV layouts.

use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::beam::GainNormalization;
use crate::channel;
use crate::point::Point3;

/// Side of the square monitoring area (m).
pub const DEFAULT_AREA_SIDE_M: f64 = 100.0;
pub const DEFAULT_ALT_MIN_M: f64 = 75.0;
pub const DEFAULT_ALT_MAX_M: f64 = 95.0;
pub const DEFAULT_MIN_SEP_M: f64 = 2.0;
pub const DEFAULT_N_BSS: usize = 8;
pub const DEFAULT_BS_RING_RADIUS_M: f64 = 200.0;
pub const DEFAULT_DATA_BITS: f64 = 1e8;
/// GU transmit power and terrestrial link length used to derive `P_GU`.
pub const DEFAULT_GU_TX_POWER_W: f64 = 0.1;
pub const DEFAULT_GU_LINK_M: f64 = 200.0;
const PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("could not place {placed} of {wanted} UAVs with {min_sep_m} m separation in {attempts} attempts")]
    Placement {
        placed: usize,
        wanted: usize,
        min_sep_m: f64,
        attempts: usize,
    },
    #[error("need at least one UAV and one BS")]
    Empty,
    #[error("scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scenario: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// A violated scenario invariant, located by a dotted field path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioParams {
    pub wavelength_m: f64,
    pub carrier_hz: f64,
    /// Total VAA transmit power `P_t`.
    pub tx_power_w: f64,
    pub bandwidth_hz: f64,
    pub noise_power_w: f64,
    /// Array efficiency `eta` in (0, 1].
    pub array_efficiency: f64,
    /// Constant power received by an interfered BS from its own GU.
    pub gu_rx_power_w: f64,
    /// Pathloss constant `k0`.
    pub pathloss_const: f64,
    /// Pathloss exponent `alpha`.
    pub pathloss_exp: f64,
    pub k1: f64,
    pub k2: f64,
    /// LoS attenuation coefficient.
    pub xi_los: f64,
    /// NLoS attenuation coefficient.
    pub xi_nlos: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        let carrier_hz = 2.4e9;
        let wavelength_m = 299_792_458.0 / carrier_hz;
        let mut radio = Self {
            wavelength_m,
            carrier_hz,
            tx_power_w: 0.1,
            bandwidth_hz: 1e6,
            // thermal noise kTB at 290 K over 1 MHz (about -114 dBm)
            noise_power_w: 1.380_649e-23 * 290.0 * 1e6,
            array_efficiency: 1.0,
            gu_rx_power_w: 0.0,
            pathloss_const: (4.0 * std::f64::consts::PI / wavelength_m).powi(2),
            pathloss_exp: 3.0,
            k1: 10.0,
            k2: 0.6,
            xi_los: 1.0,
            xi_nlos: 100.0,
        };
        radio.gu_rx_power_w = radio.gu_power_over(DEFAULT_GU_TX_POWER_W, DEFAULT_GU_LINK_M);
        radio
    }
}

impl RadioParams {
    /// Power received over a terrestrial LoS link of `distance_m`.
    pub fn gu_power_over(&self, gu_tx_power_w: f64, distance_m: f64) -> f64 {
        gu_tx_power_w * channel::pathloss_gain(distance_m, 1.0, self)
    }
}

/// Rotary-wing propulsion constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyParams {
    /// Blade profile power in hover.
    pub p1_w: f64,
    /// Induced power in hover.
    pub p2_w: f64,
    pub v_tip_mps: f64,
    pub v0_mps: f64,
    /// Fuselage drag ratio.
    pub d0: f64,
    /// Rotor solidity.
    pub s: f64,
    pub rotor_area_m2: f64,
    /// kg/m^3
    pub air_density: f64,
    pub uav_mass_kg: f64,
    pub gravity_mps2: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        Self {
            p1_w: 79.8563,
            p2_w: 88.6279,
            v_tip_mps: 120.0,
            v0_mps: 4.03,
            d0: 0.6,
            s: 0.05,
            rotor_area_m2: 0.503,
            air_density: 1.225,
            uav_mass_kg: 2.0,
            gravity_mps2: 9.81,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub area_min_m: f64,
    pub area_max_m: f64,
    pub alt_min_m: f64,
    pub alt_max_m: f64,
    pub min_sep_m: f64,
    pub n_uavs: usize,
    pub n_bss: usize,
    pub uav_initial_positions: Vec<Point3>,
    pub bs_positions: Vec<Point3>,
    pub data_bits_per_bs: Vec<f64>,
}

impl Geometry {
    pub fn contains(&self, p: &Point3) -> bool {
        let horiz = self.area_min_m..=self.area_max_m;
        horiz.contains(&p.x)
            && horiz.contains(&p.y)
            && (self.alt_min_m..=self.alt_max_m).contains(&p.z)
    }

    /// Clamps a position into the flight box.
    pub fn clamp(&self, p: Point3) -> Point3 {
        Point3::new(
            p.x.clamp(self.area_min_m, self.area_max_m),
            p.y.clamp(self.area_min_m, self.area_max_m),
            p.z.clamp(self.alt_min_m, self.alt_max_m),
        )
    }

    pub fn area_center(&self) -> Point3 {
        let c = 0.5 * (self.area_min_m + self.area_max_m);
        Point3::new(c, c, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quadrature {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            n_theta: 180,
            n_phi: 360,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub radio: RadioParams,
    pub energy: EnergyParams,
    pub geom: Geometry,
    pub master_seed: u64,
    pub quadrature: Quadrature,
    /// How the gain denominator (total radiated power) is obtained when
    /// objectives are evaluated.
    #[serde(default)]
    pub gain_normalization: GainNormalization,
}

/// Builds the default scenario: 100 m square area, altitudes in [75, 95] m,
/// eight BSs on a ring around the area center and seeded UAV start positions.
pub fn build_default_scenario(n_uavs: usize, seed: u64) -> Result<Scenario, ScenarioError> {
    build_scenario(n_uavs, DEFAULT_N_BSS, DEFAULT_BS_RING_RADIUS_M, seed)
}

pub fn build_scenario(
    n_uavs: usize,
    n_bss: usize,
    ring_radius_m: f64,
    seed: u64,
) -> Result<Scenario, ScenarioError> {
    if n_uavs == 0 || n_bss == 0 {
        return Err(ScenarioError::Empty);
    }
    let (area_min, area_max) = (0.0, DEFAULT_AREA_SIDE_M);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed: Vec<Point3> = Vec::with_capacity(n_uavs);
    let mut attempts = 0;
    while placed.len() < n_uavs {
        if attempts == PLACEMENT_ATTEMPTS {
            return Err(ScenarioError::Placement {
                placed: placed.len(),
                wanted: n_uavs,
                min_sep_m: DEFAULT_MIN_SEP_M,
                attempts,
            });
        }
        attempts += 1;
        let p = Point3::new(
            rng.random_range(area_min..=area_max),
            rng.random_range(area_min..=area_max),
            rng.random_range(DEFAULT_ALT_MIN_M..=DEFAULT_ALT_MAX_M),
        );
        if placed.iter().all(|q| q.distance(&p) >= DEFAULT_MIN_SEP_M) {
            placed.push(p);
        }
    }

    let center = 0.5 * (area_min + area_max);
    let bs_positions = (0..n_bss)
        .map(|j| {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / n_bss as f64;
            Point3::new(
                center + ring_radius_m * angle.cos(),
                center + ring_radius_m * angle.sin(),
                0.0,
            )
        })
        .collect();

    Ok(Scenario {
        radio: RadioParams::default(),
        energy: EnergyParams::default(),
        geom: Geometry {
            area_min_m: area_min,
            area_max_m: area_max,
            alt_min_m: DEFAULT_ALT_MIN_M,
            alt_max_m: DEFAULT_ALT_MAX_M,
            min_sep_m: DEFAULT_MIN_SEP_M,
            n_uavs,
            n_bss,
            uav_initial_positions: placed,
            bs_positions,
            data_bits_per_bs: vec![DEFAULT_DATA_BITS; n_bss],
        },
        master_seed: seed,
        quadrature: Quadrature::default(),
        gain_normalization: GainNormalization::default(),
    })
}

impl Scenario {
    pub fn n_uavs(&self) -> usize {
        self.geom.n_uavs
    }

    pub fn n_bss(&self) -> usize {
        self.geom.n_bss
    }

    /// Every violated invariant, or `Ok` when the scenario is consistent.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut bad = |path: String, message: String| out.push(Violation { path, message });

        let r = &self.radio;
        let positive = [
            ("radio.wavelength_m", r.wavelength_m),
            ("radio.carrier_hz", r.carrier_hz),
            ("radio.tx_power_w", r.tx_power_w),
            ("radio.bandwidth_hz", r.bandwidth_hz),
            ("radio.noise_power_w", r.noise_power_w),
            ("radio.array_efficiency", r.array_efficiency),
            ("radio.gu_rx_power_w", r.gu_rx_power_w),
            ("radio.pathloss_const", r.pathloss_const),
            ("radio.pathloss_exp", r.pathloss_exp),
            ("radio.k1", r.k1),
            ("radio.k2", r.k2),
            ("radio.xi_los", r.xi_los),
            ("radio.xi_nlos", r.xi_nlos),
        ];
        let e = &self.energy;
        let positive_energy = [
            ("energy.p1_w", e.p1_w),
            ("energy.p2_w", e.p2_w),
            ("energy.v_tip_mps", e.v_tip_mps),
            ("energy.v0_mps", e.v0_mps),
            ("energy.d0", e.d0),
            ("energy.s", e.s),
            ("energy.rotor_area_m2", e.rotor_area_m2),
            ("energy.air_density", e.air_density),
            ("energy.uav_mass_kg", e.uav_mass_kg),
            ("energy.gravity_mps2", e.gravity_mps2),
        ];
        for (path, v) in positive.iter().chain(positive_energy.iter()) {
            if !(v.is_finite() && *v > 0.0) {
                bad(path.to_string(), format!("must be finite and > 0, got {v}"));
            }
        }
        if r.array_efficiency > 1.0 {
            bad(
                "radio.array_efficiency".into(),
                format!("must be in (0, 1], got {}", r.array_efficiency),
            );
        }
        if r.xi_nlos < r.xi_los {
            bad(
                "radio.xi_nlos".into(),
                format!("NLoS attenuation {} below LoS attenuation {}", r.xi_nlos, r.xi_los),
            );
        }

        let g = &self.geom;
        if !(g.area_min_m < g.area_max_m) {
            bad(
                "geom.area_min_m/area_max_m".into(),
                format!("area bounds out of order: {} >= {}", g.area_min_m, g.area_max_m),
            );
        }
        if !(g.alt_min_m < g.alt_max_m) {
            bad(
                "geom.alt_min_m/alt_max_m".into(),
                format!("altitude bounds out of order: {} >= {}", g.alt_min_m, g.alt_max_m),
            );
        }
        if !(g.alt_min_m > 0.0) {
            bad("geom.alt_min_m".into(), "must be above ground".into());
        }
        if !(g.min_sep_m > 0.0) {
            bad("geom.min_sep_m".into(), "must be > 0".into());
        }
        if g.n_uavs == 0 || g.n_uavs != g.uav_initial_positions.len() {
            bad(
                "geom.n_uavs".into(),
                format!(
                    "n_uavs = {} but {} initial positions",
                    g.n_uavs,
                    g.uav_initial_positions.len()
                ),
            );
        }
        if g.n_bss == 0 || g.n_bss != g.bs_positions.len() || g.n_bss != g.data_bits_per_bs.len() {
            bad(
                "geom.n_bss".into(),
                format!(
                    "n_bss = {} but {} BS positions and {} data sizes",
                    g.n_bss,
                    g.bs_positions.len(),
                    g.data_bits_per_bs.len()
                ),
            );
        }
        for (i, p) in g.uav_initial_positions.iter().enumerate() {
            if !g.contains(p) {
                bad(
                    format!("geom.uav_initial_positions[{i}]"),
                    format!("({}, {}, {}) outside the flight box", p.x, p.y, p.z),
                );
            }
            for (k, q) in g.uav_initial_positions.iter().enumerate().skip(i + 1) {
                let d = p.distance(q);
                if d < g.min_sep_m {
                    bad(
                        format!("geom.uav_initial_positions[{i}]/[{k}]"),
                        format!("C6 separation {d} m below min_sep_m {}", g.min_sep_m),
                    );
                }
            }
        }
        for (j, b) in g.bs_positions.iter().enumerate() {
            let inside = (g.area_min_m..=g.area_max_m).contains(&b.x)
                && (g.area_min_m..=g.area_max_m).contains(&b.y);
            if inside {
                bad(
                    format!("geom.bs_positions[{j}]"),
                    "BS lies inside the monitoring area".into(),
                );
            }
            if b.z != 0.0 {
                bad(format!("geom.bs_positions[{j}].z"), "BS must be at z = 0".into());
            }
        }
        for (j, d) in g.data_bits_per_bs.iter().enumerate() {
            if !(d.is_finite() && *d > 0.0) {
                bad(format!("geom.data_bits_per_bs[{j}]"), format!("must be > 0, got {d}"));
            }
        }
        if self.quadrature.n_theta < 18 || self.quadrature.n_phi < 36 {
            bad(
                "quadrature".into(),
                format!(
                    "grid {}x{} below the 18x36 minimum",
                    self.quadrature.n_theta, self.quadrature.n_phi
                ),
            );
        }

        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(s)?;
        scenario.validate().map_err(ScenarioError::Invalid)?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Canonical pretty JSON (struct field order, trailing newline).
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json_string().as_bytes()))
    }
}

/// Bundled default scenario files.
pub const DEFAULT_8UAV_JSON: &str = include_str!("../scenarios/default-8uav.json");
pub const DEFAULT_16UAV_JSON: &str = include_str!("../scenarios/default-16uav.json");
/// Seed used to generate the bundled scenario files.
pub const BUNDLED_SCENARIO_SEED: u64 = 7;

pub fn bundled_scenario(n_uavs: usize) -> Option<Scenario> {
    let src = match n_uavs {
        8 => DEFAULT_8UAV_JSON,
        16 => DEFAULT_16UAV_JSON,
        _ => return None,
    };
    Some(Scenario::from_json_str(src).expect("bundled scenario is valid"))
}
