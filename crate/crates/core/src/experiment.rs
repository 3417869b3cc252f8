//! Runs a planner on a scenario and writes the report artifacts.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::beam::{sample_gain_field_with, BeamSnapshot, QuadratureGrid};
use crate::channel::to_db;
use crate::hypervolume::normalized_hypervolumes;
use crate::moea::{self, AlgoConfig, GenerationLog};
use crate::objectives::{Genome, ObjectiveVector, PlanningProblem};
use crate::point::Point3;
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Cnsga2,
    Nsga2,
    /// Evaluates the before-CB genome only.
    Baseline,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cnsga2 => "cnsga2",
            Self::Nsga2 => "nsga2",
            Self::Baseline => "baseline",
        }
    }

    /// Feature flags of this algorithm applied to `config`.
    pub fn configure(self, mut config: AlgoConfig) -> AlgoConfig {
        match self {
            Self::Cnsga2 => config.features = moea::Features::ALL,
            Self::Nsga2 | Self::Baseline => config.features = moea::Features::NONE,
        }
        config
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub genome_id: usize,
    pub objectives: ObjectiveVector,
    /// Summed interfered SINR expressed per link in dB.
    pub f2_sum_db: f64,
    pub genome: Genome,
}

/// Log line emitted per generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLine {
    pub iter: usize,
    pub best_f1_s: f64,
    pub best_f2_linear: f64,
    pub best_f3_j: f64,
    pub feasible_count: usize,
    pub rank0_size: usize,
}

impl From<&GenerationLog> for LogLine {
    fn from(g: &GenerationLog) -> Self {
        Self {
            iter: g.iter,
            best_f1_s: g.best[0],
            best_f2_linear: -g.best[1],
            best_f3_j: g.best[2],
            feasible_count: g.feasible_count,
            rank0_size: g.rank0_size,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario_digest: String,
    pub algorithm: Algorithm,
    pub config: AlgoConfig,
    pub archive: Vec<ArchiveEntry>,
    pub before_cb: ObjectiveVector,
    /// Before-CB interfered SINR summed per link in dB.
    pub before_cb_f2_sum_db: f64,
    /// Archive member with the largest `f2`.
    pub best_f2_genome_id: usize,
    /// Best archive `f2` over the before-CB `f2`.
    pub sinr_improvement_factor: f64,
    /// Hypervolume of the feasible archive in the box spanned by its own
    /// ideal and nadir points, reference at 1.1.
    pub hypervolume: f64,
    pub wall_time_s: f64,
}

/// Archive and history of one optimizer run, before anything is written.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub entries: Vec<ArchiveEntry>,
    pub history: Vec<GenerationLog>,
    pub before_cb: ObjectiveVector,
}

impl PlanOutcome {
    /// Index into `entries` of the largest `f2`, preferring feasible members.
    pub fn best_f2_index(&self) -> usize {
        let feasible = self.entries.iter().any(|e| e.objectives.is_feasible());
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !feasible || e.objectives.is_feasible())
            .max_by(|a, b| a.1.objectives.f2_sinr.total_cmp(&b.1.objectives.f2_sinr))
            .map_or(0, |(i, _)| i)
    }

    pub fn best_f2(&self) -> f64 {
        self.entries[self.best_f2_index()].objectives.f2_sinr
    }

    pub fn improvement_factor(&self) -> f64 {
        self.best_f2() / self.before_cb.f2_sinr
    }

    /// Feasible archive objectives in minimization form.
    pub fn feasible_front(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .filter(|e| e.objectives.is_feasible() && e.objectives.f1_s.is_finite())
            .map(|e| e.objectives.minimization().to_vec())
            .collect()
    }
}

fn f2_sum_db(problem: &PlanningProblem, genome: &Genome) -> f64 {
    problem
        .interfered_sinr_matrix(genome)
        .iter()
        .flatten()
        .filter(|v| !v.is_nan())
        .map(|&v| to_db(v))
        .sum()
}

fn entry(problem: &PlanningProblem, genome_id: usize, genome: Genome) -> ArchiveEntry {
    ArchiveEntry {
        genome_id,
        objectives: problem.evaluate(&genome),
        f2_sum_db: f2_sum_db(problem, &genome),
        genome,
    }
}

/// Runs `algorithm` and re-evaluates every archive member.
pub fn plan(
    scenario: &Scenario,
    config: &AlgoConfig,
    algorithm: Algorithm,
    on_generation: impl FnMut(&GenerationLog),
) -> Result<PlanOutcome> {
    let problem = PlanningProblem::new(scenario.clone());
    let before = Genome::before_cb(scenario);
    let before_cb = problem.evaluate(&before);
    if algorithm == Algorithm::Baseline {
        return Ok(PlanOutcome {
            entries: vec![entry(&problem, 0, before)],
            history: Vec::new(),
            before_cb,
        });
    }
    let config = algorithm.configure(config.clone());
    let archive = moea::run_with_callback(&problem, &config, on_generation)?;
    let entries = archive
        .members
        .iter()
        .enumerate()
        .map(|(id, m)| {
            let g = problem
                .decode(&m.chromosome.continuous, &m.chromosome.order)
                .expect("archive chromosome has the problem's shape");
            entry(&problem, id, g)
        })
        .collect();
    Ok(PlanOutcome {
        entries,
        history: archive.history,
        before_cb,
    })
}

/// Formats `v` with 17 significant digits.
pub fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    /// `None` for the start position, otherwise the BS served here.
    pub bs: Option<usize>,
    pub position: Point3,
    /// Arrival time measured from the start of the tour.
    pub arrival_s: f64,
    /// Energy of the leg ending here, including hovering while the rest of
    /// the swarm arrives.
    pub leg_energy_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavPath {
    pub uav: usize,
    pub waypoints: Vec<Waypoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightPlan {
    pub genome_id: usize,
    pub speed_mps: f64,
    pub total_energy_j: f64,
    pub uavs: Vec<UavPath>,
}

/// Per-UAV waypoints of `genome`'s tour.
pub fn flight_plan(problem: &PlanningProblem, genome_id: usize, genome: &Genome) -> FlightPlan {
    let scenario = problem.scenario();
    let transitions = problem.flight_plan(genome);
    let mut uavs: Vec<UavPath> = scenario
        .geom
        .uav_initial_positions
        .iter()
        .enumerate()
        .map(|(uav, p)| UavPath {
            uav,
            waypoints: vec![Waypoint {
                bs: None,
                position: *p,
                arrival_s: 0.0,
                leg_energy_j: 0.0,
            }],
        })
        .collect();
    let mut clock = 0.0;
    for (&bs, t) in genome.order.iter().zip(&transitions) {
        for (uav, leg) in t.legs.iter().enumerate() {
            uavs[uav].waypoints.push(Waypoint {
                bs: Some(bs),
                position: genome.positions[bs][uav],
                arrival_s: clock + leg.leg.duration_s,
                leg_energy_j: leg.energy_j,
            });
        }
        clock += t.formation_time_s;
    }
    FlightPlan {
        genome_id,
        speed_mps: problem.max_range_speed(),
        total_energy_j: transitions.iter().map(|t| t.energy_j()).sum(),
        uavs,
    }
}

/// Writes the gain field of `genome`'s row `bs_index` as CSV.
pub fn export_beampattern(genome: &Genome, bs_index: usize, scenario: &Scenario, path: &Path) -> Result<()> {
    let snap = BeamSnapshot::new(
        genome.positions[bs_index].clone(),
        genome.weights[bs_index].clone(),
        scenario.radio.wavelength_m,
    )?;
    let field = sample_gain_field_with(
        &snap,
        scenario.radio.array_efficiency,
        scenario.gain_normalization,
        QuadratureGrid::from(scenario.quadrature),
    )?;
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    field.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_pareto_csv(path: &Path, entries: &[ArchiveEntry]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    writeln!(out, "f1_s,f2_linear,f3_j,violation,genome_id")?;
    for e in entries {
        let o = &e.objectives;
        writeln!(
            out,
            "{},{},{},{},{}",
            sig17(o.f1_s),
            sig17(o.f2_sinr),
            sig17(o.f3_j),
            sig17(o.violation),
            e.genome_id
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the planner and writes `report.json`, `pareto.csv`,
/// `solutions.json`, `flightpaths.json`, `beampattern.csv` and
/// `run_log.jsonl` into `out_dir`.
///
/// The beam pattern is that of the best-`f2` member toward its first
/// served BS.
pub fn run_experiment(
    scenario: &Scenario,
    config: &AlgoConfig,
    algorithm: Algorithm,
    out_dir: &Path,
) -> Result<RunReport> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let started = Instant::now();
    let log_path = out_dir.join("run_log.jsonl");
    let mut log = BufWriter::new(File::create(&log_path).with_context(|| format!("creating {}", log_path.display()))?);
    let mut log_err = None;
    let outcome = plan(scenario, config, algorithm, |g| {
        if log_err.is_none() {
            let line = serde_json::to_string(&LogLine::from(g)).expect("log line serializes");
            if let Err(e) = writeln!(log, "{line}") {
                log_err = Some(e);
            }
        }
    })?;
    if let Some(e) = log_err {
        return Err(e).context("writing run log");
    }
    log.flush()?;
    let wall_time_s = started.elapsed().as_secs_f64();

    let problem = PlanningProblem::new(scenario.clone());
    let best = outcome.best_f2_index();
    let front = outcome.feasible_front();
    let hypervolume = if front.is_empty() {
        0.0
    } else {
        normalized_hypervolumes(&[front])[0]
    };
    let config = if algorithm == Algorithm::Baseline {
        config.clone()
    } else {
        algorithm.configure(config.clone())
    };
    let report = RunReport {
        scenario_digest: scenario.digest(),
        algorithm,
        config,
        archive: outcome.entries.clone(),
        before_cb: outcome.before_cb,
        before_cb_f2_sum_db: f2_sum_db(&problem, &Genome::before_cb(scenario)),
        best_f2_genome_id: outcome.entries[best].genome_id,
        sinr_improvement_factor: outcome.improvement_factor(),
        hypervolume,
        wall_time_s,
    };

    write_pareto_csv(&out_dir.join("pareto.csv"), &outcome.entries)?;
    let solutions: Vec<(usize, &Genome)> = outcome.entries.iter().map(|e| (e.genome_id, &e.genome)).collect();
    write_json(
        &out_dir.join("solutions.json"),
        &solutions
            .iter()
            .map(|(id, g)| serde_json::json!({ "genome_id": id, "genome": g }))
            .collect::<Vec<_>>(),
    )?;
    let plans: Vec<FlightPlan> = outcome
        .entries
        .iter()
        .map(|e| flight_plan(&problem, e.genome_id, &e.genome))
        .collect();
    write_json(&out_dir.join("flightpaths.json"), &plans)?;
    let best_genome = &outcome.entries[best].genome;
    export_beampattern(best_genome, best_genome.order[0], scenario, &out_dir.join("beampattern.csv"))?;
    write_json(&out_dir.join("report.json"), &report)?;
    Ok(report)
}
