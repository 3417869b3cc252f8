//! Planning toolkit for a UAV swarm acting as a virtual antenna array (VAA).
//!
//! The swarm uplinks collected data to a ring of remote base stations (BSs)
//! using collaborative beamforming. For each BS the swarm picks excitation
//! weights and hover positions, and it also picks the order in which BSs are
//! served. Three objectives compete:
//!
//! * `f1` total transmission time (minimize),
//! * `f2` summed SINR of the BSs that are *not* being served (maximize),
//! * `f3` total propulsion energy (minimize).
//!
//! The crate is organised bottom-up:
//!
//! * [`chaos`] chaotic sequence generators driving the optimizer operators,
//! * [`scenario`] physical configuration and defaults,
//! * [`beam`] array factor and normalized antenna gain,
//! * [`channel`] probabilistic line-of-sight air-to-ground channel,
//! * [`energy`] rotary-wing propulsion power and flight energy,
//! * [`objectives`] genome encoding and objective evaluation,
//! * [`moea`] NSGA-II machinery and the chaotic variant,
//! * [`hypervolume`] and [`experiment`] for reporting.

// `!(x > 0.0)` style checks deliberately reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod channel;
pub mod chaos;
pub mod energy;
pub mod experiment;
pub mod hypervolume;
pub mod moea;
pub mod objectives;
pub mod point;
pub mod scenario;

pub use beam::{BeamSnapshot, GainField, GainNormalization, NormalizedBeam, QuadratureGrid};
pub use chaos::{ChaosKind, ChaoticStream};
pub use objectives::{Genome, ObjectiveVector, PlanningProblem};
pub use point::Point3;
pub use scenario::{build_default_scenario, EnergyParams, Geometry, RadioParams, Scenario};
