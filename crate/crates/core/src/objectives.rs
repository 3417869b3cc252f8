//! Genome encoding and evaluation of the three planning objectives.
//!
//! A genome holds, for every BS `j`, the excitation weights and hover
//! positions the swarm uses while serving `j`, plus the BS visiting order.
//! `f1` and `f2` depend only on the per-BS rows; `f3` depends on the rows
//! and on the order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beam::{direction_between, unit_vector, BeamError, BeamSnapshot, NormalizedBeam};
use crate::channel::{self, ChannelError};
use crate::energy::{self, Transition};
use crate::moea::{Fitness, Problem};
use crate::point::Point3;
use crate::scenario::Scenario;

#[derive(Debug, Error, PartialEq)]
pub enum GenomeError {
    #[error("genome has {got} rows, scenario has {expected} BSs")]
    Rows { got: usize, expected: usize },
    #[error("row {row} has {got} entries, scenario has {expected} UAVs")]
    RowLength {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("order {0:?} is not a permutation of the BS indices")]
    Order(Vec<usize>),
    #[error("flat vector has {got} values, expected {expected}")]
    FlatLength { got: usize, expected: usize },
}

/// One candidate plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Genome {
    /// `weights[j][i]`: excitation weight of UAV `i` while serving BS `j`.
    pub weights: Vec<Vec<f64>>,
    /// `positions[j][i]`: hover position of UAV `i` while serving BS `j`.
    pub positions: Vec<Vec<Point3>>,
    /// BS visiting order.
    pub order: Vec<usize>,
}

/// Values stored per (BS, UAV) in the flat continuous vector.
const GENES_PER_UAV: usize = 4;

impl Genome {
    /// Uniform unit weights at the initial positions, BSs in natural order.
    pub fn before_cb(scenario: &Scenario) -> Self {
        let n_b = scenario.n_bss();
        let n_u = scenario.n_uavs();
        Self {
            weights: vec![vec![1.0; n_u]; n_b],
            positions: vec![scenario.geom.uav_initial_positions.clone(); n_b],
            order: (0..n_b).collect(),
        }
    }

    pub fn n_bss(&self) -> usize {
        self.weights.len()
    }

    pub fn n_uavs(&self) -> usize {
        self.weights.first().map_or(0, Vec::len)
    }

    /// Checks shape against `scenario` and that `order` is a permutation.
    pub fn check_shape(&self, scenario: &Scenario) -> Result<(), GenomeError> {
        let (n_b, n_u) = (scenario.n_bss(), scenario.n_uavs());
        if self.weights.len() != n_b || self.positions.len() != n_b {
            return Err(GenomeError::Rows {
                got: self.weights.len().min(self.positions.len()),
                expected: n_b,
            });
        }
        for (row, (w, p)) in self.weights.iter().zip(&self.positions).enumerate() {
            for got in [w.len(), p.len()] {
                if got != n_u {
                    return Err(GenomeError::RowLength {
                        row,
                        got,
                        expected: n_u,
                    });
                }
            }
        }
        if !is_permutation(&self.order, n_b) {
            return Err(GenomeError::Order(self.order.clone()));
        }
        Ok(())
    }

    /// C1 to C5: weights in [0, 1], positions in the flight box, valid order.
    pub fn satisfies_box_constraints(&self, scenario: &Scenario) -> bool {
        self.check_shape(scenario).is_ok()
            && self
                .weights
                .iter()
                .flatten()
                .all(|w| (0.0..=1.0).contains(w))
            && self
                .positions
                .iter()
                .flatten()
                .all(|p| scenario.geom.contains(p))
    }

    /// Clamps weights and positions into their boxes.
    pub fn repair(&mut self, scenario: &Scenario) {
        for w in self.weights.iter_mut().flatten() {
            *w = w.clamp(0.0, 1.0);
        }
        for p in self.positions.iter_mut().flatten() {
            *p = scenario.geom.clamp(*p);
        }
    }

    /// Flattens to `[w_0..w_n, x_0, y_0, z_0, ..]` per BS row.
    pub fn to_continuous(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_bss() * self.n_uavs() * GENES_PER_UAV);
        for (w, p) in self.weights.iter().zip(&self.positions) {
            out.extend_from_slice(w);
            for q in p {
                out.extend_from_slice(&[q.x, q.y, q.z]);
            }
        }
        out
    }

    pub fn from_parts(
        continuous: &[f64],
        order: Vec<usize>,
        n_bss: usize,
        n_uavs: usize,
    ) -> Result<Self, GenomeError> {
        let row_len = n_uavs * GENES_PER_UAV;
        if continuous.len() != n_bss * row_len {
            return Err(GenomeError::FlatLength {
                got: continuous.len(),
                expected: n_bss * row_len,
            });
        }
        if !is_permutation(&order, n_bss) {
            return Err(GenomeError::Order(order));
        }
        let mut weights = Vec::with_capacity(n_bss);
        let mut positions = Vec::with_capacity(n_bss);
        for row in continuous.chunks_exact(row_len) {
            weights.push(row[..n_uavs].to_vec());
            positions.push(
                row[n_uavs..]
                    .chunks_exact(3)
                    .map(|c| Point3::new(c[0], c[1], c[2]))
                    .collect(),
            );
        }
        Ok(Self {
            weights,
            positions,
            order,
        })
    }
}

pub fn is_permutation(order: &[usize], n: usize) -> bool {
    if order.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &o in order {
        if o >= n || std::mem::replace(&mut seen[o], true) {
            return false;
        }
    }
    true
}

/// Objective values of one genome. `f2` is maximized, the others minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveVector {
    /// Total transmission time (s).
    pub f1_s: f64,
    /// Summed linear SINR of interfered BSs.
    pub f2_sinr: f64,
    /// Total propulsion energy (J).
    pub f3_j: f64,
    /// Aggregate minimum-separation shortfall (m).
    pub violation: f64,
}

impl ObjectiveVector {
    /// `(f1, -f2, f3)`, the all-minimization form.
    pub fn minimization(&self) -> [f64; 3] {
        [self.f1_s, -self.f2_sinr, self.f3_j]
    }

    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

/// Evaluates genomes against a scenario and exposes the problem to the
/// optimizer.
#[derive(Debug, Clone)]
pub struct PlanningProblem {
    scenario: Scenario,
    v_mr: f64,
    bounds: Vec<(f64, f64)>,
}

impl PlanningProblem {
    pub fn new(scenario: Scenario) -> Self {
        let g = &scenario.geom;
        let mut row = Vec::with_capacity(g.n_uavs * GENES_PER_UAV);
        row.extend(std::iter::repeat_n((0.0, 1.0), g.n_uavs));
        for _ in 0..g.n_uavs {
            row.push((g.area_min_m, g.area_max_m));
            row.push((g.area_min_m, g.area_max_m));
            row.push((g.alt_min_m, g.alt_max_m));
        }
        let bounds = row.repeat(g.n_bss);
        let v_mr = energy::max_range_speed(&scenario.energy);
        Self {
            scenario,
            v_mr,
            bounds,
        }
    }

    /// Same problem with every continuous gene pinned to `genome`'s value, so
    /// only the visiting order remains free.
    pub fn with_frozen_rows(scenario: Scenario, genome: &Genome) -> Self {
        let mut p = Self::new(scenario);
        p.bounds = genome.to_continuous().into_iter().map(|v| (v, v)).collect();
        p
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn max_range_speed(&self) -> f64 {
        self.v_mr
    }

    pub fn decode(&self, continuous: &[f64], order: &[usize]) -> Result<Genome, GenomeError> {
        Genome::from_parts(
            continuous,
            order.to_vec(),
            self.scenario.n_bss(),
            self.scenario.n_uavs(),
        )
    }

    /// Beam of the swarm while serving BS `j`.
    pub fn row_beam(&self, genome: &Genome, j: usize) -> Result<NormalizedBeam, BeamError> {
        let snap = BeamSnapshot::new(
            genome.positions[j].clone(),
            genome.weights[j].clone(),
            self.scenario.radio.wavelength_m,
        )?;
        NormalizedBeam::new(
            snap,
            self.scenario.radio.array_efficiency,
            self.scenario.gain_normalization,
            self.scenario.quadrature.into(),
        )
    }

    fn received_power(&self, beam: &NormalizedBeam, centroid: &Point3, bs: &Point3) -> Result<f64, ChannelError> {
        let radio = &self.scenario.radio;
        let link = channel::link_geometry(centroid, bs)?;
        let (theta, phi) = direction_between(centroid, bs);
        let gain = beam.gain_unit(&unit_vector(theta, phi));
        Ok(channel::received_power_from_gain(gain, channel::channel_gain(&link, radio), radio))
    }

    /// Rate (bit/s) toward BS `j` using row `j`; zero for a degenerate row.
    pub fn row_rate(&self, genome: &Genome, j: usize) -> f64 {
        let Ok(beam) = self.row_beam(genome, j) else {
            return 0.0;
        };
        let centroid = Point3::centroid(&genome.positions[j]);
        match self.received_power(&beam, &centroid, &self.scenario.geom.bs_positions[j]) {
            Ok(p) => channel::rate(p, &self.scenario.radio),
            Err(_) => 0.0,
        }
    }

    /// `sinr[j][k]`: SINR at BS `k` while the swarm serves BS `j`
    /// (`NaN` on the diagonal, 0 for a degenerate row).
    pub fn interfered_sinr_matrix(&self, genome: &Genome) -> Vec<Vec<f64>> {
        let bss = &self.scenario.geom.bs_positions;
        let radio = &self.scenario.radio;
        (0..bss.len())
            .map(|j| {
                let beam = self.row_beam(genome, j).ok();
                let centroid = Point3::centroid(&genome.positions[j]);
                bss.iter()
                    .enumerate()
                    .map(|(k, bs)| {
                        if k == j {
                            return f64::NAN;
                        }
                        beam.as_ref()
                            .and_then(|b| self.received_power(b, &centroid, bs).ok())
                            .map_or(0.0, |p| channel::interfered_sinr(p, radio))
                    })
                    .collect()
            })
            .collect()
    }

    /// Total transmission time; infinite when any row cannot transmit.
    pub fn eval_f1(&self, genome: &Genome) -> f64 {
        self.scenario
            .geom
            .data_bits_per_bs
            .iter()
            .enumerate()
            .map(|(j, bits)| {
                let r = self.row_rate(genome, j);
                if r > 0.0 {
                    bits / r
                } else {
                    f64::INFINITY
                }
            })
            .sum()
    }

    /// Summed linear SINR over every (served, interfered) BS pair.
    pub fn eval_f2(&self, genome: &Genome) -> f64 {
        self.interfered_sinr_matrix(genome)
            .iter()
            .flatten()
            .filter(|v| !v.is_nan())
            .sum()
    }

    /// Formation changes of the tour: start positions to the first served
    /// BS, then along `order`.
    pub fn flight_plan(&self, genome: &Genome) -> Vec<Transition> {
        let ep = &self.scenario.energy;
        let mut from: &[Point3] = &self.scenario.geom.uav_initial_positions;
        let mut out = Vec::with_capacity(genome.order.len());
        for &j in &genome.order {
            let to = &genome.positions[j];
            out.push(energy::transition(from, to, self.v_mr, ep).expect("genome shape checked"));
            from = to;
        }
        out
    }

    pub fn eval_f3(&self, genome: &Genome) -> f64 {
        self.flight_plan(genome).iter().map(Transition::energy_j).sum()
    }

    /// `sum_j sum_{i<k} max(0, D_min - |p_i - p_k|)`.
    pub fn violation(&self, genome: &Genome) -> f64 {
        let d_min = self.scenario.geom.min_sep_m;
        let mut total = 0.0;
        for row in &genome.positions {
            for (i, a) in row.iter().enumerate() {
                for b in &row[i + 1..] {
                    total += (d_min - a.distance(b)).max(0.0);
                }
            }
        }
        total
    }

    pub fn evaluate(&self, genome: &Genome) -> ObjectiveVector {
        ObjectiveVector {
            f1_s: self.eval_f1(genome),
            f2_sinr: self.eval_f2(genome),
            f3_j: self.eval_f3(genome),
            violation: self.violation(genome),
        }
    }

    pub fn fitness_of(objectives: &ObjectiveVector) -> Fitness {
        // a row that cannot transmit is dominated by everything
        let violation = if objectives.f1_s.is_finite() {
            objectives.violation
        } else {
            f64::INFINITY
        };
        Fitness {
            objectives: objectives.minimization().to_vec(),
            violation,
        }
    }
}

impl Problem for PlanningProblem {
    fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn permutation_len(&self) -> usize {
        self.scenario.n_bss()
    }

    fn evaluate(&self, continuous: &[f64], order: &[usize]) -> Fitness {
        let genome = self
            .decode(continuous, order)
            .expect("optimizer keeps chromosome shape");
        Self::fitness_of(&PlanningProblem::evaluate(self, &genome))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::GainNormalization;
    use crate::channel::{channel_gain, link_geometry};
    use crate::energy::energy_matrix;
    use crate::scenario::{build_default_scenario, build_scenario};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_genome(s: &Scenario, rng: &mut ChaCha8Rng) -> Genome {
        let (n_b, n_u) = (s.n_bss(), s.n_uavs());
        let g = &s.geom;
        let weights = (0..n_b)
            .map(|_| (0..n_u).map(|_| rng.random_range(0.05..=1.0)).collect())
            .collect();
        let positions = (0..n_b)
            .map(|_| {
                (0..n_u)
                    .map(|_| {
                        Point3::new(
                            rng.random_range(g.area_min_m..=g.area_max_m),
                            rng.random_range(g.area_min_m..=g.area_max_m),
                            rng.random_range(g.alt_min_m..=g.alt_max_m),
                        )
                    })
                    .collect()
            })
            .collect();
        let mut order: Vec<usize> = (0..n_b).collect();
        use rand::seq::SliceRandom;
        order.shuffle(rng);
        Genome {
            weights,
            positions,
            order,
        }
    }

    #[test]
    fn flat_round_trip() {
        let s = build_default_scenario(8, 1).unwrap();
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(3));
        let back = Genome::from_parts(&g.to_continuous(), g.order.clone(), 8, 8).unwrap();
        assert_eq!(back, g);
        assert!(Genome::from_parts(&[0.0; 3], vec![0], 1, 1).is_err());
        assert!(Genome::from_parts(&[0.0; 4], vec![1], 1, 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = build_default_scenario(8, 1).unwrap();
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(4));
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<Genome>(&text).unwrap(), g);
    }

    #[test]
    fn f1_is_linear_in_data() {
        let mut s = build_default_scenario(8, 1).unwrap();
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(5));
        let f1 = PlanningProblem::new(s.clone()).eval_f1(&g);
        for d in s.geom.data_bits_per_bs.iter_mut() {
            *d *= 2.0;
        }
        let f1x2 = PlanningProblem::new(s).eval_f1(&g);
        assert_abs_diff_eq!(f1x2 / f1, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn f1_single_uav_single_bs_hand_chain() {
        let s = build_scenario(1, 1, 300.0, 2).unwrap();
        let p = PlanningProblem::new(s.clone());
        let g = Genome::before_cb(&s);
        let r = &s.radio;
        let uav = s.geom.uav_initial_positions[0];
        let bs = s.geom.bs_positions[0];
        let link = link_geometry(&uav, &bs).unwrap();
        let p_rx = r.tx_power_w * r.array_efficiency * channel_gain(&link, r);
        let expect = s.geom.data_bits_per_bs[0] / (r.bandwidth_hz * (1.0 + p_rx / r.noise_power_w).log2());
        assert_abs_diff_eq!(p.eval_f1(&g) / expect, 1.0, epsilon = 1e-12);
        // single BS: nobody is interfered
        assert_eq!(p.eval_f2(&g), 0.0);
    }

    #[test]
    fn better_gain_shortens_transmission() {
        // Two elements half a wavelength apart in x: steering the pair's
        // broadside at the BS beats an endfire null.
        let s = build_scenario(2, 1, 300.0, 2).unwrap();
        let p = PlanningProblem::new(s.clone());
        let lam = s.radio.wavelength_m;
        // the BS sits at +x of the area center
        assert!(s.geom.bs_positions[0].x > 100.0);
        let mut broadside = Genome::before_cb(&s);
        broadside.positions[0] = vec![Point3::new(50.0, 50.0, 85.0), Point3::new(50.0, 50.0 + lam / 2.0, 85.0)];
        let mut offaxis = broadside.clone();
        offaxis.positions[0] = vec![Point3::new(50.0, 50.0, 85.0), Point3::new(50.0 + lam / 2.0, 50.0, 85.0)];
        let rb = p.row_rate(&broadside, 0);
        let ro = p.row_rate(&offaxis, 0);
        assert!(rb > ro, "{rb} vs {ro}");
        assert!(p.eval_f1(&broadside) < p.eval_f1(&offaxis));
    }

    #[test]
    fn f2_two_bs_hand_chain() {
        let s = build_scenario(3, 2, 300.0, 11).unwrap();
        let p = PlanningProblem::new(s.clone());
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(6));
        let r = &s.radio;
        let mut expect = 0.0;
        for (j, k) in [(0, 1), (1, 0)] {
            let pos = &g.positions[j];
            let w = &g.weights[j];
            let c = Point3::centroid(pos);
            let bs = s.geom.bs_positions[k];
            let v = bs.sub(&c);
            let u = Point3::new(v.x / v.norm(), v.y / v.norm(), v.z / v.norm());
            let kappa = 2.0 * std::f64::consts::PI / r.wavelength_m;
            let (mut re, mut im) = (0.0, 0.0);
            for (q, wi) in pos.iter().zip(w) {
                let ph = kappa * (q.x * u.x + q.y * u.y + q.z * u.z);
                re += wi * ph.cos();
                im += wi * ph.sin();
            }
            let mut den = 0.0;
            for (a, wa) in pos.iter().zip(w) {
                for (b, wb) in pos.iter().zip(w) {
                    let x = kappa * a.distance(b);
                    den += wa * wb * if x == 0.0 { 1.0 } else { x.sin() / x };
                }
            }
            let gain = (re * re + im * im) * r.array_efficiency / den;
            let d2 = c.horizontal_distance(&bs);
            let d3 = (d2 * d2 + c.z * c.z).sqrt();
            let el = (c.z / d2).min(1.0).asin().to_degrees();
            let plos = 1.0 / (1.0 + r.k1 * (-r.k2 * (el - r.k1)).exp());
            let ch = 1.0 / (r.pathloss_const * d3.powf(r.pathloss_exp) * (r.xi_los * plos + r.xi_nlos * (1.0 - plos)));
            expect += r.gu_rx_power_w / (r.noise_power_w + r.tx_power_w * gain * ch);
        }
        assert_abs_diff_eq!(p.eval_f2(&g) / expect, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn f2_upper_bound() {
        let s = build_default_scenario(8, 1).unwrap();
        let p = PlanningProblem::new(s.clone());
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(7));
        let bound = 8.0 * 7.0 * s.radio.gu_rx_power_w / s.radio.noise_power_w;
        assert!(p.eval_f2(&g) < bound);
    }

    #[test]
    fn degenerate_row_is_penalized() {
        let s = build_default_scenario(8, 1).unwrap();
        let p = PlanningProblem::new(s.clone());
        let mut g = Genome::before_cb(&s);
        g.weights[2] = vec![0.0; 8];
        let o = p.evaluate(&g);
        assert!(o.f1_s.is_infinite());
        assert_eq!(PlanningProblem::fitness_of(&o).violation, f64::INFINITY);
    }

    #[test]
    fn f3_is_zero_without_motion() {
        let s = build_default_scenario(8, 1).unwrap();
        let p = PlanningProblem::new(s.clone());
        let mut g = Genome::before_cb(&s);
        assert_eq!(p.eval_f3(&g), 0.0);
        g.order.reverse();
        assert_eq!(p.eval_f3(&g), 0.0);
    }

    #[test]
    fn f3_reversal_symmetric_at_equal_altitudes() {
        let s = build_default_scenario(4, 1).unwrap();
        let mut g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(8));
        for row in g.positions.iter_mut() {
            for q in row.iter_mut() {
                q.z = 85.0;
            }
        }
        // Start at the first visited formation so only tour legs remain.
        let mut s2 = s.clone();
        s2.geom.uav_initial_positions = g.positions[g.order[0]].clone();
        let f = PlanningProblem::new(s2).eval_f3(&g);
        let mut rev = g.clone();
        rev.order.reverse();
        let mut s3 = s.clone();
        s3.geom.uav_initial_positions = g.positions[rev.order[0]].clone();
        let f_rev = PlanningProblem::new(s3).eval_f3(&rev);
        assert_abs_diff_eq!(f, f_rev, epsilon = 1e-9 * f);
    }

    #[test]
    fn f3_matches_energy_matrix() {
        let s = build_scenario(5, 4, 300.0, 3).unwrap();
        let p = PlanningProblem::new(s.clone());
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(9));
        let m = energy_matrix(&g.positions, &s.energy).unwrap();
        let entry = energy_matrix(
            &[s.geom.uav_initial_positions.clone(), g.positions[g.order[0]].clone()],
            &s.energy,
        )
        .unwrap()
        .get(0, 1);
        assert_abs_diff_eq!(p.eval_f3(&g), entry + m.tour_cost(&g.order), epsilon = 1e-6);
    }

    #[test]
    fn violation_examples() {
        let s = build_default_scenario(8, 1).unwrap();
        let p = PlanningProblem::new(s.clone());
        let mut g = Genome::before_cb(&s);
        assert_eq!(p.violation(&g), 0.0);
        g.positions[1][4] = g.positions[1][0];
        assert_abs_diff_eq!(p.violation(&g), s.geom.min_sep_m, epsilon = 1e-12);
    }

    #[test]
    fn violation_matches_brute_force() {
        let s = build_default_scenario(8, 1).unwrap();
        let p = PlanningProblem::new(s.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let mut g = random_genome(&s, &mut rng);
            // squeeze a formation so some pairs are too close
            for q in g.positions[0].iter_mut() {
                q.x = 50.0 + (q.x - 50.0) * 0.02;
                q.y = 50.0 + (q.y - 50.0) * 0.02;
                q.z = 85.0;
            }
            let mut brute = 0.0;
            for row in &g.positions {
                for i in 0..row.len() {
                    for k in 0..row.len() {
                        if i < k {
                            let d = ((row[i].x - row[k].x).powi(2)
                                + (row[i].y - row[k].y).powi(2)
                                + (row[i].z - row[k].z).powi(2))
                            .sqrt();
                            if d < s.geom.min_sep_m {
                                brute += s.geom.min_sep_m - d;
                            }
                        }
                    }
                }
            }
            assert!(brute > 0.0);
            assert_abs_diff_eq!(p.violation(&g), brute, epsilon = 1e-9);
        }
    }

    #[test]
    fn evaluate_is_deterministic_and_sign_convention_holds() {
        let s = build_default_scenario(8, 1).unwrap();
        let p = PlanningProblem::new(s.clone());
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(12));
        let a = p.evaluate(&g);
        assert_eq!(a, p.evaluate(&g));
        let m = a.minimization();
        assert_eq!(m[1], -a.f2_sinr);
    }

    #[test]
    fn quadrature_and_closed_form_agree_at_swarm_scale() {
        let mut s = build_default_scenario(8, 1).unwrap();
        let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(13));
        let exact = PlanningProblem::new(s.clone()).evaluate(&g);
        s.gain_normalization = GainNormalization::Quadrature;
        let quad = PlanningProblem::new(s).evaluate(&g);
        assert!((exact.f1_s - quad.f1_s).abs() / exact.f1_s < 0.02);
        assert!((exact.f2_sinr - quad.f2_sinr).abs() / exact.f2_sinr < 0.02);
        assert_eq!(exact.f3_j, quad.f3_j);
    }

    #[test]
    fn before_cb_genome_is_feasible() {
        let s = build_default_scenario(8, 7).unwrap();
        let g = Genome::before_cb(&s);
        assert!(g.satisfies_box_constraints(&s));
        let o = PlanningProblem::new(s).evaluate(&g);
        assert!(o.f1_s.is_finite() && o.f1_s > 0.0);
        assert_eq!(o.f3_j, 0.0);
        assert_eq!(o.violation, 0.0);
    }

    #[test]
    fn repair_clamps_into_box() {
        let s = build_default_scenario(8, 7).unwrap();
        let mut g = Genome::before_cb(&s);
        g.weights[0][0] = 1.7;
        g.positions[3][2] = Point3::new(-5.0, 130.0, 10.0);
        assert!(!g.satisfies_box_constraints(&s));
        g.repair(&s);
        assert!(g.satisfies_box_constraints(&s));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn order_only_moves_f3(seed in 0u64..1000, a in 0usize..8, b in 0usize..8) {
            let s = build_default_scenario(8, 1).unwrap();
            let p = PlanningProblem::new(s.clone());
            let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut h = g.clone();
            h.order.swap(a, b);
            let (og, oh) = (p.evaluate(&g), p.evaluate(&h));
            prop_assert_eq!(og.f1_s, oh.f1_s);
            prop_assert_eq!(og.f2_sinr, oh.f2_sinr);
            if a != b {
                prop_assert!(og.f3_j != oh.f3_j);
            }
        }

        #[test]
        fn row_weight_scaling_leaves_f1_f2(seed in 0u64..1000, row in 0usize..8, c in 0.05f64..=1.0) {
            let s = build_default_scenario(8, 1).unwrap();
            let p = PlanningProblem::new(s.clone());
            let g = random_genome(&s, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut h = g.clone();
            for w in h.weights[row].iter_mut() {
                *w *= c;
            }
            let (og, oh) = (p.evaluate(&g), p.evaluate(&h));
            prop_assert!((og.f1_s - oh.f1_s).abs() <= 1e-9 * og.f1_s);
            prop_assert!((og.f2_sinr - oh.f2_sinr).abs() <= 1e-9 * og.f2_sinr);
        }
    }
}
