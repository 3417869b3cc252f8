//! Python bindings for `vaa_core`.
//!
//! Genomes cross the boundary as JSON strings in the same schema as
//! `solutions.json`, so scripts can round-trip planner output.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use vaa_core::experiment::{self, Algorithm};
use vaa_core::moea::AlgoConfig;
use vaa_core::objectives::{Genome, ObjectiveVector, PlanningProblem};
use vaa_core::{energy, hypervolume, scenario, BeamSnapshot, GainNormalization, NormalizedBeam, Point3};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

pub fn parse_algorithm(name: &str) -> Result<Algorithm, String> {
    match name {
        "cnsga2" => Ok(Algorithm::Cnsga2),
        "nsga2" => Ok(Algorithm::Nsga2),
        "baseline" => Ok(Algorithm::Baseline),
        other => Err(format!("unknown algorithm {other:?}, expected cnsga2, nsga2 or baseline")),
    }
}

/// Objective values of one plan.
#[pyclass(name = "Objectives", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyObjectives {
    pub f1_s: f64,
    pub f2_sinr: f64,
    pub f3_j: f64,
    pub violation: f64,
}

impl From<ObjectiveVector> for PyObjectives {
    fn from(o: ObjectiveVector) -> Self {
        Self {
            f1_s: o.f1_s,
            f2_sinr: o.f2_sinr,
            f3_j: o.f3_j,
            violation: o.violation,
        }
    }
}

#[pymethods]
impl PyObjectives {
    fn __repr__(&self) -> String {
        format!(
            "Objectives(f1_s={}, f2_sinr={}, f3_j={}, violation={})",
            self.f1_s, self.f2_sinr, self.f3_j, self.violation
        )
    }
}

#[pyclass(name = "Scenario", skip_from_py_object)]
#[derive(Clone)]
pub struct PyScenario {
    inner: scenario::Scenario,
}

#[pymethods]
impl PyScenario {
    /// Bundled scenario with 8 or 16 UAVs.
    #[staticmethod]
    fn bundled(n_uavs: usize) -> PyResult<Self> {
        scenario::bundled_scenario(n_uavs)
            .map(|inner| Self { inner })
            .ok_or_else(|| value_err(format!("no bundled scenario with {n_uavs} UAVs")))
    }

    #[staticmethod]
    fn generate(n_uavs: usize, seed: u64) -> PyResult<Self> {
        scenario::build_default_scenario(n_uavs, seed)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        scenario::Scenario::from_json_str(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    fn digest(&self) -> String {
        self.inner.digest()
    }

    #[getter]
    fn n_uavs(&self) -> usize {
        self.inner.n_uavs()
    }

    #[getter]
    fn n_bss(&self) -> usize {
        self.inner.n_bss()
    }

    /// JSON of the before-CB genome.
    fn before_cb_genome(&self) -> String {
        serde_json::to_string(&Genome::before_cb(&self.inner)).expect("genome serializes")
    }

    /// Objectives of a genome given as JSON.
    fn evaluate(&self, genome_json: &str) -> PyResult<PyObjectives> {
        let genome: Genome = serde_json::from_str(genome_json).map_err(value_err)?;
        genome.check_shape(&self.inner).map_err(value_err)?;
        Ok(PlanningProblem::new(self.inner.clone()).evaluate(&genome).into())
    }

    /// Runs a planner and returns `(objectives, genome_json)` per archive
    /// member.
    #[pyo3(signature = (algorithm="cnsga2", pop_size=50, max_iters=200, seed=7))]
    fn plan(
        &self,
        py: Python<'_>,
        algorithm: &str,
        pop_size: usize,
        max_iters: usize,
        seed: u64,
    ) -> PyResult<Vec<(PyObjectives, String)>> {
        let algo = parse_algorithm(algorithm).map_err(value_err)?;
        let config = AlgoConfig::cnsga2(pop_size, max_iters, seed);
        let scenario = self.inner.clone();
        let outcome = py
            .detach(move || experiment::plan(&scenario, &config, algo, |_| {}))
            .map_err(value_err)?;
        Ok(outcome
            .entries
            .into_iter()
            .map(|e| {
                let g = serde_json::to_string(&e.genome).expect("genome serializes");
                (e.objectives.into(), g)
            })
            .collect())
    }

    /// Runs a planner and writes the report artifacts into `out_dir`;
    /// returns the SINR improvement factor.
    #[pyo3(signature = (out_dir, algorithm="cnsga2", pop_size=50, max_iters=200, seed=7))]
    fn run_experiment(
        &self,
        py: Python<'_>,
        out_dir: PathBuf,
        algorithm: &str,
        pop_size: usize,
        max_iters: usize,
        seed: u64,
    ) -> PyResult<f64> {
        let algo = parse_algorithm(algorithm).map_err(value_err)?;
        let config = AlgoConfig::cnsga2(pop_size, max_iters, seed);
        let scenario = self.inner.clone();
        py.detach(move || experiment::run_experiment(&scenario, &config, algo, &out_dir))
            .map(|r| r.sinr_improvement_factor)
            .map_err(|e| value_err(format!("{e:#}")))
    }
}

/// Normalized array gain toward `(theta, phi)` for UAVs at `positions`
/// with weights `weights`.
#[pyfunction]
#[pyo3(signature = (positions, weights, wavelength_m, theta, phi, eta=1.0))]
fn array_gain(
    positions: Vec<(f64, f64, f64)>,
    weights: Vec<f64>,
    wavelength_m: f64,
    theta: f64,
    phi: f64,
    eta: f64,
) -> PyResult<f64> {
    let pts = positions.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect();
    let snap = BeamSnapshot::new(pts, weights, wavelength_m).map_err(value_err)?;
    let beam = NormalizedBeam::new(snap, eta, GainNormalization::ClosedForm, Default::default())
        .map_err(value_err)?;
    Ok(beam.gain(theta, phi))
}

/// Maximum-range speed of the default rotary-wing model.
#[pyfunction]
fn max_range_speed() -> f64 {
    energy::max_range_speed(&scenario::EnergyParams::default())
}

/// Propulsion power of the default rotary-wing model at speed `v`.
#[pyfunction]
fn propulsion_power(v: f64) -> f64 {
    energy::propulsion_power(v, &scenario::EnergyParams::default())
}

/// Exact hypervolume of minimization points against `reference`.
#[pyfunction]
fn hypervolume_of(points: Vec<Vec<f64>>, reference: Vec<f64>) -> PyResult<f64> {
    hypervolume::hypervolume(&points, &reference).map_err(value_err)
}

#[pymodule]
fn vaa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PyObjectives>()?;
    m.add_function(wrap_pyfunction!(array_gain, m)?)?;
    m.add_function(wrap_pyfunction!(max_range_speed, m)?)?;
    m.add_function(wrap_pyfunction!(propulsion_power, m)?)?;
    m.add_function(wrap_pyfunction!(hypervolume_of, m)?)?;
    Ok(())
}
