//! Array factor and normalized antenna gain of the UAV virtual antenna array.
//!
//! Elements are isotropic, so the gain toward `(theta, phi)` is
//! `4 pi |F|^2 eta / integral(|F|^2 dOmega)`. The denominator can be taken
//! from a midpoint quadrature grid or from the exact pairwise closed form
//! `4 pi sum_ik I_i I_k sinc(kappa d_ik)`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::point::Point3;

#[derive(Debug, Error, PartialEq)]
pub enum BeamError {
    #[error("degenerate snapshot: radiated power integral is zero")]
    Degenerate,
    #[error("snapshot has {positions} positions but {weights} weights")]
    LengthMismatch { positions: usize, weights: usize },
    #[error("snapshot needs at least one element")]
    Empty,
    #[error("weight {index} = {value} outside [0, 1]")]
    WeightOutOfRange { index: usize, value: f64 },
}

/// Swarm geometry plus excitation weights for one target BS.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSnapshot {
    positions: Vec<Point3>,
    weights: Vec<f64>,
    wavelength_m: f64,
}

impl BeamSnapshot {
    pub fn new(
        positions: Vec<Point3>,
        weights: Vec<f64>,
        wavelength_m: f64,
    ) -> Result<Self, BeamError> {
        if positions.len() != weights.len() {
            return Err(BeamError::LengthMismatch {
                positions: positions.len(),
                weights: weights.len(),
            });
        }
        if positions.is_empty() {
            return Err(BeamError::Empty);
        }
        if let Some((index, &value)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(0.0..=1.0).contains(*w))
        {
            return Err(BeamError::WeightOutOfRange { index, value });
        }
        Ok(Self {
            positions,
            weights,
            wavelength_m,
        })
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn wavelength_m(&self) -> f64 {
        self.wavelength_m
    }

    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength_m
    }

    /// `F(theta, phi) = sum_i I_i exp(j kappa (r_i . u))`.
    pub fn array_factor(&self, theta: f64, phi: f64) -> Complex64 {
        let u = unit_vector(theta, phi);
        self.array_factor_unit(&u)
    }

    fn array_factor_unit(&self, u: &Point3) -> Complex64 {
        let kappa = self.wavenumber();
        let (mut re, mut im) = (0.0, 0.0);
        for (p, &w) in self.positions.iter().zip(&self.weights) {
            let (s, c) = (kappa * (p.x * u.x + p.y * u.y + p.z * u.z)).sin_cos();
            re += w * c;
            im += w * s;
        }
        Complex64::new(re, im)
    }

    /// `|F|^2` toward `(theta, phi)`.
    pub fn power_pattern(&self, theta: f64, phi: f64) -> f64 {
        self.array_factor(theta, phi).norm_sqr()
    }

    /// Exact `integral(|F|^2 sin(theta) dtheta dphi)` for isotropic elements.
    pub fn radiated_integral_exact(&self) -> f64 {
        let kappa = self.wavenumber();
        let n = self.positions.len();
        let mut sum = 0.0;
        for i in 0..n {
            let wi = self.weights[i];
            sum += wi * wi;
            for k in i + 1..n {
                let x = kappa * self.positions[i].distance(&self.positions[k]);
                sum += 2.0 * wi * self.weights[k] * sinc(x);
            }
        }
        4.0 * PI * sum
    }

    /// `integral(|F|^2 dOmega)` sampled at the cell midpoints of `grid` and
    /// weighted by cell solid angle, summed in a fixed row-major order.
    pub fn radiated_integral_quadrature(&self, grid: QuadratureGrid) -> f64 {
        let kappa = self.wavenumber();
        let scaled: Vec<(Point3, f64)> = self
            .positions
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w != 0.0)
            .map(|(p, &w)| (Point3::new(kappa * p.x, kappa * p.y, kappa * p.z), w))
            .collect();
        let phis: Vec<(f64, f64)> = (0..grid.n_phi).map(|b| grid.phi(b).sin_cos()).collect();
        let mut total = 0.0;
        for a in 0..grid.n_theta {
            let (st, ct) = grid.theta(a).sin_cos();
            let mut row = 0.0;
            for &(sp, cp) in &phis {
                let (ux, uy) = (st * cp, st * sp);
                let (mut re, mut im) = (0.0, 0.0);
                for (p, w) in &scaled {
                    let (s, c) = (p.x * ux + p.y * uy + p.z * ct).sin_cos();
                    re += w * c;
                    im += w * s;
                }
                row += re * re + im * im;
            }
            total += row * grid.cell_solid_angle(a);
        }
        total
    }

    pub fn radiated_integral(&self, method: GainNormalization, grid: QuadratureGrid) -> f64 {
        match method {
            GainNormalization::ClosedForm => self.radiated_integral_exact(),
            GainNormalization::Quadrature => self.radiated_integral_quadrature(grid),
        }
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Unit vector for polar angle `theta` (from +z) and azimuth `phi`.
pub fn unit_vector(theta: f64, phi: f64) -> Point3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Point3::new(st * cp, st * sp, ct)
}

/// `(theta, phi)` of the direction from `from` toward `to`; `phi` in [0, 2 pi).
pub fn direction_between(from: &Point3, to: &Point3) -> (f64, f64) {
    let v = to.sub(from);
    let r = v.norm();
    let theta = (v.z / r).clamp(-1.0, 1.0).acos();
    let mut phi = v.y.atan2(v.x);
    if phi < 0.0 {
        phi += 2.0 * PI;
    }
    if phi >= 2.0 * PI {
        phi = 0.0;
    }
    (theta, phi)
}

/// Source of the gain denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainNormalization {
    /// Exact pairwise sinc sum.
    #[default]
    ClosedForm,
    /// Midpoint rule on the scenario's `(n_theta, n_phi)` grid.
    Quadrature,
}

/// Uniform midpoint grid over `theta in [0, pi]`, `phi in [0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self::new(180, 360)
    }
}

impl From<crate::scenario::Quadrature> for QuadratureGrid {
    fn from(q: crate::scenario::Quadrature) -> Self {
        Self::new(q.n_theta, q.n_phi)
    }
}

impl QuadratureGrid {
    pub const fn new(n_theta: usize, n_phi: usize) -> Self {
        Self { n_theta, n_phi }
    }

    pub fn doubled(&self) -> Self {
        Self::new(2 * self.n_theta, 2 * self.n_phi)
    }

    pub fn d_theta(&self) -> f64 {
        PI / self.n_theta as f64
    }

    pub fn d_phi(&self) -> f64 {
        2.0 * PI / self.n_phi as f64
    }

    /// Exact solid angle of the cells in row `a`, `2 sin(theta_a) sin(dtheta/2) dphi`,
    /// so a constant integrand integrates to exactly `4 pi` times its value.
    pub fn cell_solid_angle(&self, a: usize) -> f64 {
        2.0 * self.theta(a).sin() * (0.5 * self.d_theta()).sin() * self.d_phi()
    }

    pub fn theta(&self, a: usize) -> f64 {
        (a as f64 + 0.5) * self.d_theta()
    }

    pub fn phi(&self, b: usize) -> f64 {
        (b as f64 + 0.5) * self.d_phi()
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A snapshot with its gain denominator computed once.
#[derive(Debug, Clone)]
pub struct NormalizedBeam {
    snapshot: BeamSnapshot,
    eta: f64,
    denominator: f64,
}

impl NormalizedBeam {
    pub fn new(
        snapshot: BeamSnapshot,
        eta: f64,
        method: GainNormalization,
        grid: QuadratureGrid,
    ) -> Result<Self, BeamError> {
        let denominator = snapshot.radiated_integral(method, grid);
        if !(denominator > 0.0) {
            return Err(BeamError::Degenerate);
        }
        Ok(Self {
            snapshot,
            eta,
            denominator,
        })
    }

    pub fn snapshot(&self) -> &BeamSnapshot {
        &self.snapshot
    }

    pub fn denominator(&self) -> f64 {
        self.denominator
    }

    /// Linear gain toward `(theta, phi)`.
    pub fn gain(&self, theta: f64, phi: f64) -> f64 {
        4.0 * PI * self.snapshot.power_pattern(theta, phi) * self.eta / self.denominator
    }

    /// Linear gain toward a unit direction vector.
    pub fn gain_unit(&self, u: &Point3) -> f64 {
        4.0 * PI * self.snapshot.array_factor_unit(u).norm_sqr() * self.eta / self.denominator
    }
}

/// Gain toward `(theta, phi)` with the denominator from midpoint quadrature.
pub fn gain_toward(
    snap: &BeamSnapshot,
    theta: f64,
    phi: f64,
    eta: f64,
    grid: QuadratureGrid,
) -> Result<f64, BeamError> {
    let beam = NormalizedBeam::new(snap.clone(), eta, GainNormalization::Quadrature, grid)?;
    Ok(beam.gain(theta, phi))
}

/// Gain sampled on every node of a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GainField {
    pub grid: QuadratureGrid,
    /// Row-major (`theta` outer, `phi` inner) linear gain samples.
    pub samples: Vec<f64>,
    /// Solid-angle-weighted sum of the gain over the grid cells.
    pub total_radiated_integral: f64,
}

impl GainField {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.samples[a * self.grid.n_phi + b]
    }

    /// CSV with header `theta_rad,phi_rad,gain_linear,gain_dbi`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "theta_rad,phi_rad,gain_linear,gain_dbi")?;
        for a in 0..self.grid.n_theta {
            let theta = self.grid.theta(a);
            for b in 0..self.grid.n_phi {
                let g = self.get(a, b);
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    theta,
                    self.grid.phi(b),
                    g,
                    10.0 * g.log10()
                )?;
            }
        }
        Ok(())
    }
}

/// Samples the gain on `grid` with one shared quadrature denominator.
pub fn sample_gain_field(
    snap: &BeamSnapshot,
    eta: f64,
    grid: QuadratureGrid,
) -> Result<GainField, BeamError> {
    sample_gain_field_with(snap, eta, GainNormalization::Quadrature, grid)
}

pub fn sample_gain_field_with(
    snap: &BeamSnapshot,
    eta: f64,
    method: GainNormalization,
    grid: QuadratureGrid,
) -> Result<GainField, BeamError> {
    let beam = NormalizedBeam::new(snap.clone(), eta, method, grid)?;
    let samples: Vec<f64> = (0..grid.n_theta)
        .into_par_iter()
        .flat_map_iter(|a| {
            let theta = grid.theta(a);
            let beam = &beam;
            (0..grid.n_phi).map(move |b| beam.gain(theta, grid.phi(b)))
        })
        .collect();
    let mut total = 0.0;
    for a in 0..grid.n_theta {
        let row: f64 = samples[a * grid.n_phi..(a + 1) * grid.n_phi].iter().sum();
        total += row * grid.cell_solid_angle(a);
    }
    Ok(GainField {
        grid,
        samples,
        total_radiated_integral: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const LAMBDA: f64 = 0.125;

    fn pair(spacing: f64) -> BeamSnapshot {
        BeamSnapshot::new(
            vec![Point3::new(0.0, 0.0, 0.0), Point3::new(spacing, 0.0, 0.0)],
            vec![1.0, 1.0],
            LAMBDA,
        )
        .unwrap()
    }

    #[test]
    fn array_factor_examples() {
        let single =
            BeamSnapshot::new(vec![Point3::default()], vec![1.0], LAMBDA).unwrap();
        let f = single.array_factor(0.7, 1.3);
        assert_abs_diff_eq!(f.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.im, 0.0, epsilon = 1e-15);

        let p = pair(LAMBDA / 2.0);
        let f = p.array_factor(PI / 2.0, PI / 2.0);
        assert_abs_diff_eq!(f.re, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.im, 0.0, epsilon = 1e-12);
        let f = p.array_factor(PI / 2.0, 0.0);
        assert_abs_diff_eq!(f.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn colocated_uavs_radiate_isotropically() {
        let snap = BeamSnapshot::new(vec![Point3::new(1.0, 2.0, 80.0); 4], vec![0.6; 4], LAMBDA)
            .unwrap();
        let grid = QuadratureGrid::new(36, 72);
        for (t, p) in [(0.1, 0.2), (1.5, 3.0), (2.9, 6.0)] {
            assert_abs_diff_eq!(gain_toward(&snap, t, p, 0.8, grid).unwrap(), 0.8, epsilon = 1e-3);
        }
    }

    #[test]
    fn broadside_pair_gain_matches_fine_quadrature() {
        // Reference: the same ratio with a 3600x7200 midpoint denominator.
        // Frozen from a one-off evaluation of radiated_integral_quadrature at that grid.
        let p = pair(LAMBDA / 2.0);
        let reference_den = p.radiated_integral_quadrature(QuadratureGrid::new(3600, 7200));
        let reference = 4.0 * PI * 4.0 / reference_den;
        assert_abs_diff_eq!(reference, 2.0, epsilon = 1e-4);
        let g = gain_toward(&p, PI / 2.0, PI / 2.0, 1.0, QuadratureGrid::default()).unwrap();
        assert!((g - reference).abs() / reference < 0.02, "{g} vs {reference}");
        assert!((g - 2.0).abs() / 2.0 < 0.02);
    }

    #[test]
    fn closed_form_matches_quadrature_for_compact_array() {
        let snap = BeamSnapshot::new(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(0.05, 0.02, 0.01),
                Point3::new(-0.03, 0.07, 0.04),
            ],
            vec![1.0, 0.5, 0.8],
            LAMBDA,
        )
        .unwrap();
        let exact = snap.radiated_integral_exact();
        let quad = snap.radiated_integral_quadrature(QuadratureGrid::default());
        assert!((exact - quad).abs() / exact < 1e-3, "{exact} vs {quad}");
    }

    #[test]
    fn degenerate_snapshot_is_rejected() {
        let snap = BeamSnapshot::new(vec![Point3::default(); 3], vec![0.0; 3], LAMBDA).unwrap();
        assert_eq!(
            gain_toward(&snap, 1.0, 1.0, 1.0, QuadratureGrid::new(18, 36)),
            Err(BeamError::Degenerate)
        );
        assert!(sample_gain_field(&snap, 1.0, QuadratureGrid::new(18, 36)).is_err());
    }

    #[test]
    fn invalid_snapshots() {
        assert!(matches!(
            BeamSnapshot::new(vec![Point3::default()], vec![1.0, 1.0], LAMBDA),
            Err(BeamError::LengthMismatch { .. })
        ));
        assert_eq!(BeamSnapshot::new(vec![], vec![], LAMBDA), Err(BeamError::Empty));
        assert!(matches!(
            BeamSnapshot::new(vec![Point3::default()], vec![1.5], LAMBDA),
            Err(BeamError::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn single_uav_field_is_uniform() {
        let snap = BeamSnapshot::new(vec![Point3::new(3.0, 4.0, 80.0)], vec![0.3], LAMBDA).unwrap();
        let field = sample_gain_field(&snap, 0.9, QuadratureGrid::new(18, 36)).unwrap();
        assert_eq!(field.samples.len(), 18 * 36);
        for g in &field.samples {
            assert_abs_diff_eq!(*g, 0.9, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(field.total_radiated_integral, 4.0 * PI * 0.9, epsilon = 1e-9);
    }

    #[test]
    fn field_csv_has_one_row_per_node() {
        let field =
            sample_gain_field(&pair(LAMBDA / 2.0), 1.0, QuadratureGrid::new(18, 36)).unwrap();
        let mut buf = Vec::new();
        field.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theta_rad,phi_rad,gain_linear,gain_dbi"));
        assert_eq!(lines.count(), 18 * 36);
    }

    #[test]
    fn direction_between_examples() {
        let (t, p) = direction_between(&Point3::new(0.0, 0.0, 10.0), &Point3::new(0.0, -5.0, 0.0));
        assert!(t > PI / 2.0);
        assert_abs_diff_eq!(p, 1.5 * PI, epsilon = 1e-12);
        let (t, _) = direction_between(&Point3::default(), &Point3::new(0.0, 0.0, 1.0));
        assert_abs_diff_eq!(t, 0.0, epsilon = 1e-12);
    }

    fn snapshot_strategy() -> impl Strategy<Value = BeamSnapshot> {
        prop::collection::vec(
            ((0.0f64..100.0, 0.0f64..100.0, 75.0f64..95.0), 0.05f64..=1.0),
            1..9,
        )
        .prop_map(|els| {
            let (pos, w): (Vec<_>, Vec<_>) = els
                .into_iter()
                .map(|((x, y, z), w)| (Point3::new(x, y, z), w))
                .unzip();
            BeamSnapshot::new(pos, w, LAMBDA).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn gain_is_translation_invariant(
            snap in snapshot_strategy(),
            shift in (-50.0f64..50.0, -50.0f64..50.0, -20.0f64..20.0),
            theta in 0.0f64..PI,
            phi in 0.0f64..(2.0 * PI),
        ) {
            let grid = QuadratureGrid::new(18, 36);
            let moved = BeamSnapshot::new(
                snap.positions().iter().map(|p| p.add(&Point3::new(shift.0, shift.1, shift.2))).collect(),
                snap.weights().to_vec(),
                LAMBDA,
            ).unwrap();
            for method in [GainNormalization::ClosedForm, GainNormalization::Quadrature] {
                let a = NormalizedBeam::new(snap.clone(), 1.0, method, grid).unwrap();
                let b = NormalizedBeam::new(moved.clone(), 1.0, method, grid).unwrap();
                let (ga, gb) = (a.gain(theta, phi), b.gain(theta, phi));
                let scale = ga.abs().max(1e-3);
                prop_assert!((ga - gb).abs() / scale < 1e-9, "{} vs {}", ga, gb);
            }
        }

        #[test]
        fn gain_is_weight_scale_invariant(
            snap in snapshot_strategy(),
            c in 0.05f64..1.0,
            theta in 0.0f64..PI,
            phi in 0.0f64..(2.0 * PI),
        ) {
            let scaled = BeamSnapshot::new(
                snap.positions().to_vec(),
                snap.weights().iter().map(|w| w * c).collect(),
                LAMBDA,
            ).unwrap();
            let grid = QuadratureGrid::new(18, 36);
            let a = NormalizedBeam::new(snap, 1.0, GainNormalization::ClosedForm, grid).unwrap();
            let b = NormalizedBeam::new(scaled, 1.0, GainNormalization::ClosedForm, grid).unwrap();
            let (ga, gb) = (a.gain(theta, phi), b.gain(theta, phi));
            prop_assert!((ga - gb).abs() <= 1e-9 * ga.max(1e-3));
        }
    }
}
