//! Rotary-wing propulsion power and the energy of moving the swarm between
//! hover formations.
//!
//! A move is split into a horizontal phase flown at constant speed and a
//! vertical phase charged as the signed potential-energy change `m g h`.
//! The formation is complete when the slowest UAV arrives; the others hover
//! for the remainder.

use thiserror::Error;

use crate::point::Point3;
use crate::scenario::EnergyParams;

#[derive(Debug, Error, PartialEq)]
pub enum EnergyError {
    #[error("formation {index} has {got} UAVs, expected {expected}")]
    FormationSize {
        index: usize,
        got: usize,
        expected: usize,
    },
}

/// Propulsion power (W) in level flight at speed `v`.
pub fn propulsion_power(v: f64, ep: &EnergyParams) -> f64 {
    let blade = ep.p1_w * (1.0 + 3.0 * v * v / (ep.v_tip_mps * ep.v_tip_mps));
    let induced = ep.p2_w * induced_ratio(v, ep).sqrt();
    let parasite = 0.5 * ep.air_density * ep.d0 * ep.s * ep.rotor_area_m2 * v.powi(3);
    blade + induced + parasite
}

// sqrt(1 + a^2) - a with a = V^2 / (2 v0^2), in the cancellation-free form.
fn induced_ratio(v: f64, ep: &EnergyParams) -> f64 {
    let a = v * v / (2.0 * ep.v0_mps * ep.v0_mps);
    1.0 / ((1.0 + a * a).sqrt() + a)
}

/// Analytic `dP/dV`.
pub fn propulsion_power_derivative(v: f64, ep: &EnergyParams) -> f64 {
    let v0_sq = ep.v0_mps * ep.v0_mps;
    let a = v * v / (2.0 * v0_sq);
    let inner = induced_ratio(v, ep);
    let d_inner = -(v / v0_sq) * inner / (1.0 + a * a).sqrt();
    let blade = ep.p1_w * 6.0 * v / (ep.v_tip_mps * ep.v_tip_mps);
    let induced = ep.p2_w * 0.5 * d_inner / inner.sqrt();
    let parasite = 1.5 * ep.air_density * ep.d0 * ep.s * ep.rotor_area_m2 * v * v;
    blade + induced + parasite
}

/// Hover power `P(0) = P1 + P2`.
pub fn hover_power(ep: &EnergyParams) -> f64 {
    propulsion_power(0.0, ep)
}

const V_SEARCH_LO: f64 = 0.1;
const V_SEARCH_HI: f64 = 60.0;

/// Speed maximizing distance per joule, `argmax V / P(V)` on (0.1, 60] m/s.
///
/// Golden-section search; iterates until the bracket is below 1e-9 m/s,
/// well inside the 1e-3 m/s requirement.
pub fn max_range_speed(ep: &EnergyParams) -> f64 {
    let range = |v: f64| v / propulsion_power(v, ep);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (V_SEARCH_LO, V_SEARCH_HI);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (range(c), range(d));
    while hi - lo > 1e-9 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = range(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = range(d);
        }
    }
    0.5 * (lo + hi)
}

/// One UAV's move between two hover points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightLeg {
    pub horizontal_dist_m: f64,
    /// Signed altitude change (positive is a climb).
    pub alt_change_m: f64,
    pub speed_mps: f64,
    /// Time spent in the horizontal phase.
    pub duration_s: f64,
}

impl FlightLeg {
    pub fn between(from: &Point3, to: &Point3, speed_mps: f64) -> Self {
        let d = from.horizontal_distance(to);
        Self {
            horizontal_dist_m: d,
            alt_change_m: to.z - from.z,
            speed_mps,
            duration_s: if d > 0.0 { d / speed_mps } else { 0.0 },
        }
    }
}

/// Energy (J) of a leg followed by `hover_tail_s` seconds of hovering.
pub fn leg_energy(leg: &FlightLeg, hover_tail_s: f64, ep: &EnergyParams) -> f64 {
    let horizontal = if leg.horizontal_dist_m > 0.0 {
        propulsion_power(leg.speed_mps, ep) * leg.horizontal_dist_m / leg.speed_mps
    } else {
        0.0
    };
    let vertical = ep.uav_mass_kg * ep.gravity_mps2 * leg.alt_change_m;
    horizontal + hover_power(ep) * hover_tail_s + vertical
}

/// Per-UAV breakdown of one formation change.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    /// Time for the slowest UAV to arrive.
    pub formation_time_s: f64,
    pub legs: Vec<LegEnergy>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegEnergy {
    pub leg: FlightLeg,
    pub hover_tail_s: f64,
    pub energy_j: f64,
}

impl Transition {
    pub fn energy_j(&self) -> f64 {
        self.legs.iter().map(|l| l.energy_j).sum()
    }
}

/// Moves every UAV `i` from `from[i]` to `to[i]` at `speed_mps`.
pub fn transition(
    from: &[Point3],
    to: &[Point3],
    speed_mps: f64,
    ep: &EnergyParams,
) -> Result<Transition, EnergyError> {
    if from.len() != to.len() {
        return Err(EnergyError::FormationSize {
            index: 1,
            got: to.len(),
            expected: from.len(),
        });
    }
    let legs: Vec<FlightLeg> = from
        .iter()
        .zip(to)
        .map(|(a, b)| FlightLeg::between(a, b, speed_mps))
        .collect();
    let formation_time_s = legs.iter().map(|l| l.duration_s).fold(0.0, f64::max);
    let legs = legs
        .into_iter()
        .map(|leg| {
            let hover_tail_s = formation_time_s - leg.duration_s;
            LegEnergy {
                leg,
                hover_tail_s,
                energy_j: leg_energy(&leg, hover_tail_s, ep),
            }
        })
        .collect();
    Ok(Transition {
        formation_time_s,
        legs,
    })
}

/// Swarm energy for every ordered pair of BS formations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl EnergyMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.n + to]
    }

    /// Sum of consecutive transitions along `order` (no entry leg).
    pub fn tour_cost(&self, order: &[usize]) -> f64 {
        order.windows(2).map(|w| self.get(w[0], w[1])).sum()
    }
}

/// Fills the matrix with transitions flown at the maximum-range speed.
pub fn energy_matrix(
    formations: &[Vec<Point3>],
    ep: &EnergyParams,
) -> Result<EnergyMatrix, EnergyError> {
    let n = formations.len();
    if let Some(first) = formations.first() {
        for (index, f) in formations.iter().enumerate() {
            if f.len() != first.len() {
                return Err(EnergyError::FormationSize {
                    index,
                    got: f.len(),
                    expected: first.len(),
                });
            }
        }
    }
    let v_mr = max_range_speed(ep);
    let mut entries = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                entries[a * n + b] = transition(&formations[a], &formations[b], v_mr, ep)?.energy_j();
            }
        }
    }
    Ok(EnergyMatrix { n, entries })
}
