//! Constrained NSGA-II with optional chaotic operators and elimination.
//!
//! Chromosomes have a box-bounded real part and a permutation part. All
//! objectives are minimized; constraint handling follows the usual
//! feasible-first rule on an aggregate violation.

mod elimination;
mod operators;
mod sorting;

pub use elimination::eliminate;
pub use operators::{
    chaotic_init, exchange_mutation, pm_delta, pmx_crossover, pmx_with_cuts, polynomial_mutation,
    sbx_beta, sbx_crossover, sbx_pair, SbxParams,
};
pub use sorting::{
    constrained_dominates, crowding_distance, fast_nondominated_sort, tournament_select,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaos::{ChaosError, ChaoticStream, DEFAULT_CHEBYSHEV_ORDER, DEFAULT_LOGISTIC_R};

/// An optimization problem over a bounded real vector plus a permutation.
pub trait Problem: Sync {
    fn bounds(&self) -> &[(f64, f64)];
    fn permutation_len(&self) -> usize;
    fn evaluate(&self, continuous: &[f64], order: &[usize]) -> Fitness;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    /// Minimized objectives.
    pub objectives: Vec<f64>,
    /// Aggregate constraint violation, 0 when feasible.
    pub violation: f64,
}

impl Fitness {
    pub fn is_feasible(&self) -> bool {
        self.violation == 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chromosome {
    pub continuous: Vec<f64>,
    pub order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub fitness: Fitness,
    /// Front index, set by sorting.
    pub rank: Option<usize>,
    pub crowding: f64,
}

impl Individual {
    pub fn new(chromosome: Chromosome, fitness: Fitness) -> Self {
        Self {
            chromosome,
            fitness,
            rank: None,
            crowding: 0.0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("population size must be even and at least 4, got {0}")]
    PopSize(usize),
    #[error("tau1 + tau2 = {sum} exceeds the population size {pop}")]
    Elimination { sum: usize, pop: usize },
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("logistic_r must lie in (0, 4], got {0}")]
    LogisticR(f64),
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error("problem has a bound with lower > upper at index {0}")]
    Bounds(usize),
}

/// Which of the chaotic or elimination mechanisms are switched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Features {
    pub chaotic_init: bool,
    pub chaotic_sbx: bool,
    pub chaotic_pm: bool,
    pub elimination: bool,
}

impl Features {
    pub const ALL: Self = Self {
        chaotic_init: true,
        chaotic_sbx: true,
        chaotic_pm: true,
        elimination: true,
    };
    pub const NONE: Self = Self {
        chaotic_init: false,
        chaotic_sbx: false,
        chaotic_pm: false,
        elimination: false,
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgoConfig {
    pub pop_size: usize,
    pub max_iters: usize,
    pub crossover_prob: f64,
    /// Per-gene mutation probability; `None` means `1 / D`.
    #[serde(default)]
    pub mutation_prob: Option<f64>,
    /// Probability of crossing the permutation part of a mated pair.
    pub perm_crossover_prob: f64,
    /// Probability of one exchange mutation per child.
    pub perm_mutation_prob: f64,
    pub sbx_eta: f64,
    pub pm_eta: f64,
    /// Number eliminated by worst `f1`; `None` means `ceil(0.05 * 2N)`.
    #[serde(default)]
    pub tau1: Option<usize>,
    /// Number eliminated by smallest `f2`; `None` means `ceil(0.05 * 2N)`.
    #[serde(default)]
    pub tau2: Option<usize>,
    pub features: Features,
    pub master_seed: u64,
    pub logistic_r: f64,
    pub chebyshev_order: f64,
    /// Evaluate offspring on the rayon pool. Results do not depend on it.
    #[serde(default = "default_parallel")]
    pub parallel: bool,
}

fn default_parallel() -> bool {
    true
}

impl AlgoConfig {
    pub fn cnsga2(pop_size: usize, max_iters: usize, master_seed: u64) -> Self {
        Self {
            pop_size,
            max_iters,
            crossover_prob: 0.9,
            mutation_prob: None,
            perm_crossover_prob: 0.9,
            perm_mutation_prob: 0.2,
            sbx_eta: 20.0,
            pm_eta: 20.0,
            tau1: None,
            tau2: None,
            features: Features::ALL,
            master_seed,
            logistic_r: DEFAULT_LOGISTIC_R,
            chebyshev_order: DEFAULT_CHEBYSHEV_ORDER,
            parallel: true,
        }
    }

    pub fn nsga2(pop_size: usize, max_iters: usize, master_seed: u64) -> Self {
        Self {
            features: Features::NONE,
            ..Self::cnsga2(pop_size, max_iters, master_seed)
        }
    }

    /// Elimination counts actually used.
    pub fn taus(&self) -> (usize, usize) {
        let default = (0.05 * 2.0 * self.pop_size as f64).ceil() as usize;
        (self.tau1.unwrap_or(default), self.tau2.unwrap_or(default))
    }

    pub fn mutation_prob_for(&self, dims: usize) -> f64 {
        self.mutation_prob
            .unwrap_or(if dims == 0 { 0.0 } else { 1.0 / dims as f64 })
    }

    pub fn algorithm_id(&self) -> &'static str {
        match self.features {
            Features::ALL => "cnsga2",
            Features::NONE => "nsga2",
            _ => "custom",
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size < 4 || !self.pop_size.is_multiple_of(2) {
            return Err(ConfigError::PopSize(self.pop_size));
        }
        if self.features.elimination {
            let (t1, t2) = self.taus();
            if t1 + t2 > self.pop_size {
                return Err(ConfigError::Elimination {
                    sum: t1 + t2,
                    pop: self.pop_size,
                });
            }
        }
        for (name, value) in [
            ("crossover_prob", self.crossover_prob),
            ("perm_crossover_prob", self.perm_crossover_prob),
            ("perm_mutation_prob", self.perm_mutation_prob),
            ("mutation_prob", self.mutation_prob.unwrap_or(0.0)),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        for (name, value) in [("sbx_eta", self.sbx_eta), ("pm_eta", self.pm_eta)] {
            if !(value >= 0.0) {
                return Err(ConfigError::Negative { name, value });
            }
        }
        if !(self.logistic_r > 0.0 && self.logistic_r <= 4.0) {
            return Err(ConfigError::LogisticR(self.logistic_r));
        }
        Ok(())
    }
}

/// Summary of one generation, taken after environmental selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub iter: usize,
    /// Per-objective minimum over the feasible members (over all members
    /// when none is feasible).
    pub best: Vec<f64>,
    pub feasible_count: usize,
    pub rank0_size: usize,
}

/// Non-dominated members of the final population.
#[derive(Debug, Clone)]
pub struct ParetoArchive {
    pub members: Vec<Individual>,
    pub final_population: Vec<Individual>,
    pub seed: u64,
    pub iterations: usize,
    pub algorithm: String,
    pub history: Vec<GenerationLog>,
}

fn evaluate_all<P: Problem>(problem: &P, chromosomes: Vec<Chromosome>, parallel: bool) -> Vec<Individual> {
    let eval = |c: Chromosome| {
        let f = problem.evaluate(&c.continuous, &c.order);
        Individual::new(c, f)
    };
    if parallel {
        chromosomes.into_par_iter().map(eval).collect()
    } else {
        chromosomes.into_iter().map(eval).collect()
    }
}

/// Picks `n` survivors front by front, breaking the last front by crowding.
/// Ranks and crowding distances of the survivors are left set.
pub fn environmental_selection(mut pool: Vec<Individual>, n: usize) -> Vec<Individual> {
    let fronts = fast_nondominated_sort(&mut pool);
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    let mut out = Vec::with_capacity(n);
    for front in fronts {
        let mut members: Vec<Individual> = front.iter().map(|&i| slots[i].take().unwrap()).collect();
        crowding_distance(&mut members);
        if out.len() + members.len() <= n {
            out.extend(members);
        } else {
            // stable sort keeps pool order among equal distances
            members.sort_by(|a, b| b.crowding.total_cmp(&a.crowding));
            members.truncate(n - out.len());
            out.extend(members);
        }
        if out.len() == n {
            break;
        }
    }
    out
}

fn log_generation(iter: usize, pop: &[Individual]) -> GenerationLog {
    let feasible: Vec<&Individual> = pop.iter().filter(|i| i.fitness.is_feasible()).collect();
    let pool: Vec<&Individual> = if feasible.is_empty() {
        pop.iter().collect()
    } else {
        feasible.clone()
    };
    let m = pool.first().map_or(0, |i| i.fitness.objectives.len());
    let best = (0..m)
        .map(|k| {
            pool.iter()
                .map(|i| i.fitness.objectives[k])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    GenerationLog {
        iter,
        best,
        feasible_count: feasible.len(),
        rank0_size: pop.iter().filter(|i| i.rank == Some(0)).count(),
    }
}

fn rank0(pop: &[Individual]) -> Vec<Individual> {
    let mut all = pop.to_vec();
    let fronts = fast_nondominated_sort(&mut all);
    fronts
        .first()
        .map(|f| f.iter().map(|&i| all[i].clone()).collect())
        .unwrap_or_default()
}

/// Seed for a chaotic stream drawn from the master generator, kept off the
/// inadmissible Logistic fixed points.
fn stream_seed(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let x: f64 = rng.random();
        if ChaoticStream::is_admissible_logistic_seed(x) {
            return x;
        }
    }
}

/// Runs the optimizer. Identical config and problem give identical output,
/// whether or not evaluation is parallel.
pub fn run<P: Problem>(problem: &P, config: &AlgoConfig) -> Result<ParetoArchive, ConfigError> {
    run_with_callback(problem, config, |_| {})
}

/// Like [`run`], calling `on_generation` after every generation (and once
/// for the initial population, with `iter = 0`).
pub fn run_with_callback<P: Problem>(
    problem: &P,
    config: &AlgoConfig,
    mut on_generation: impl FnMut(&GenerationLog),
) -> Result<ParetoArchive, ConfigError> {
    config.validate()?;
    let bounds = problem.bounds();
    if let Some(i) = bounds.iter().position(|(lo, hi)| !(lo <= hi)) {
        return Err(ConfigError::Bounds(i));
    }
    let n = config.pop_size;
    let dims = bounds.len();
    let perm_len = problem.permutation_len();
    let f = config.features;

    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    let mut gauss = ChaoticStream::gauss_mouse(stream_seed(&mut rng))?;
    let mut logistic = ChaoticStream::logistic(stream_seed(&mut rng), config.logistic_r)?;
    let mut chebyshev =
        ChaoticStream::chebyshev(2.0 * stream_seed(&mut rng) - 1.0, config.chebyshev_order)?;

    let init = chaotic_init(bounds, perm_len, n, f.chaotic_init.then_some(&mut gauss), &mut rng);
    let mut pop = environmental_selection(evaluate_all(problem, init, config.parallel), n);
    let mut history = Vec::with_capacity(config.max_iters + 1);
    history.push(log_generation(0, &pop));
    on_generation(history.last().unwrap());

    let sbx = SbxParams {
        eta: config.sbx_eta,
        crossover_prob: config.crossover_prob,
    };
    let pm_prob = config.mutation_prob_for(dims);
    let (tau1, tau2) = config.taus();

    for t in 1..=config.max_iters {
        let parents = tournament_select(&pop, n, &mut rng);
        let mut children = Vec::with_capacity(n);
        for pair in parents.chunks_exact(2) {
            let (a, b) = (&pop[pair[0]].chromosome, &pop[pair[1]].chromosome);
            let (mut c1, mut c2) = (a.clone(), b.clone());
            if rng.random::<f64>() < config.crossover_prob {
                // chaotic streams advance once per operator use
                let threshold = if f.chaotic_sbx { logistic.next_value() } else { 0.5 };
                let (x1, x2) = sbx_crossover(&a.continuous, &b.continuous, bounds, sbx, threshold, &mut rng);
                c1.continuous = x1;
                c2.continuous = x2;
            }
            if perm_len > 1 && rng.random::<f64>() < config.perm_crossover_prob {
                let (o1, o2) = pmx_crossover(&a.order, &b.order, &mut rng);
                c1.order = o1;
                c2.order = o2;
            }
            for c in [&mut c1, &mut c2] {
                let threshold = if f.chaotic_pm { chebyshev.next_value() } else { 0.5 };
                polynomial_mutation(&mut c.continuous, bounds, config.pm_eta, pm_prob, threshold, &mut rng);
                if rng.random::<f64>() < config.perm_mutation_prob {
                    exchange_mutation(&mut c.order, &mut rng);
                }
            }
            children.push(c1);
            children.push(c2);
        }

        let mut pool = pop;
        pool.extend(evaluate_all(problem, children, config.parallel));
        if f.elimination {
            pool = eliminate(pool, tau1, tau2);
        }
        pop = environmental_selection(pool, n);
        history.push(log_generation(t, &pop));
        on_generation(history.last().unwrap());
    }

    Ok(ParetoArchive {
        members: rank0(&pop),
        final_population: pop,
        seed: config.master_seed,
        iterations: config.max_iters,
        algorithm: config.algorithm_id().to_string(),
        history,
    })
}
