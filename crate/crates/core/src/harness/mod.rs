//! Experiment orchestration.
//!
//! A cell fixes cost, pattern, method, dataset mode, depth and sizes. Each
//! repetition derives one 64-bit repetition seed from the master seed and
//! the data coordinates of the cell (pattern, mode, and in random mode the
//! training size and repetition index). The train, test and initialization
//! seeds all follow from that one value, so every stored repetition seed
//! reproduces its accuracies. Cost and method are deliberately left out of
//! the hash: every method and cost sees the same data and the same start.

pub mod config;
pub mod plot;
pub mod results;
pub mod sweep;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;

use crate::circuit::{self, CircuitShape, ParamVector, DEFAULT_BIAS};
use crate::cost::{CostKind, GradientMethod, TrainingObjective};
use crate::data::{self, Pattern};
use crate::error::{Error, Result};
use crate::optim::{self, Method, OptimizeOptions, OptimizerReport};

pub use plot::emit_svg;
pub use results::{emit_csv, load_results, ResultRow};
pub use sweep::{run_sweep, Preset};

pub const DEFAULT_MASTER_SEED: u64 = 42;
pub const DEFAULT_TEST_SIZE: usize = 4000;
pub const RANDOM_MODE_REPETITIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DatasetMode {
    Fixed,
    Random,
}

impl DatasetMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetMode::Fixed => "fixed",
            DatasetMode::Random => "random",
        }
    }

    pub fn default_repetitions(self) -> usize {
        match self {
            DatasetMode::Fixed => 1,
            DatasetMode::Random => RANDOM_MODE_REPETITIONS,
        }
    }

    /// Training sizes swept when none are given.
    pub fn default_train_sizes(self) -> Vec<usize> {
        match self {
            DatasetMode::Fixed => vec![1, 25, 50, 75, 100, 125, 150, 200, 250],
            DatasetMode::Random => (5..=70).step_by(5).collect(),
        }
    }

    fn tag(self) -> u64 {
        match self {
            DatasetMode::Fixed => 1,
            DatasetMode::Random => 2,
        }
    }
}

impl fmt::Display for DatasetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed" | "fix" => Ok(DatasetMode::Fixed),
            "random" => Ok(DatasetMode::Random),
            other => Err(Error::InvalidArgument(format!("unknown dataset mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentCell {
    pub cost: CostKind,
    pub pattern: Pattern,
    pub method: Method,
    pub mode: DatasetMode,
    pub layers: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Pick λ on the training set instead of using `P(0) > 0.5`.
    pub tune_bias: bool,
    pub gradient: GradientMethod,
    pub optimizer: OptimizeOptions,
}

impl ExperimentCell {
    /// A cell with the default sizes, seed and repetition count for `mode`.
    pub fn new(cost: CostKind, pattern: Pattern, method: Method, mode: DatasetMode, layers: usize, train_size: usize) -> Self {
        Self {
            cost,
            pattern,
            method,
            mode,
            layers,
            train_size,
            test_size: DEFAULT_TEST_SIZE,
            repetitions: mode.default_repetitions(),
            master_seed: DEFAULT_MASTER_SEED,
            tune_bias: false,
            gradient: GradientMethod::default(),
            optimizer: OptimizeOptions::default(),
        }
    }

    pub fn with_train_size(&self, train_size: usize) -> Self {
        Self {
            train_size,
            ..self.clone()
        }
    }

    pub fn shape(&self) -> Result<CircuitShape> {
        CircuitShape::planar(self.layers)
    }

    pub fn validate(&self) -> Result<()> {
        self.shape()?;
        if self.train_size == 0 || self.test_size == 0 {
            return Err(Error::InvalidArgument("train and test sizes must be positive".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be positive".into()));
        }
        if let GradientMethod::ParameterShift = self.gradient {
            if self.cost != CostKind::Fidelity {
                return Err(Error::InvalidArgument(
                    "parameter-shift gradient requires the fidelity cost".into(),
                ));
            }
        }
        self.optimizer.validate()
    }

    /// Seed of repetition `rep`.
    pub fn rep_seed(&self, rep: usize) -> u64 {
        let mut words = vec![self.pattern.tag(), self.mode.tag()];
        if self.mode == DatasetMode::Random {
            words.push(self.train_size as u64);
            words.push(rep as u64);
        }
        derive_seed(self.master_seed, &words)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive SplitMix64 hash of `master` and `words`.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(master), |h, &w| splitmix64(h ^ splitmix64(w)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RepSeeds {
    pub train: u64,
    pub test: u64,
    pub init: u64,
}

impl RepSeeds {
    pub fn from_rep_seed(seed: u64) -> Self {
        Self {
            train: derive_seed(seed, &[1]),
            test: derive_seed(seed, &[2]),
            init: derive_seed(seed, &[3]),
        }
    }
}

/// Angles uniform in `[−π, π]`, weights uniform in `[−1, 1]`.
pub fn initial_params(shape: &CircuitShape, seed: u64) -> ParamVector {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut values = Vec::with_capacity(shape.param_count());
    for _ in 0..shape.layers() {
        for _ in 0..3 {
            values.push(rng.random_range(-PI..=PI));
        }
        for _ in 0..shape.data_dim() {
            values.push(rng.random_range(-1.0..=1.0));
        }
    }
    ParamVector::new(values).expect("sampled parameters are finite")
}

#[derive(Debug, Clone)]
pub struct RepetitionOutcome {
    pub rep_index: usize,
    pub rep_seed: u64,
    pub seeds: RepSeeds,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    /// Test accuracy of the initial parameters.
    pub initial_test_accuracy: f64,
    pub bias: f64,
    pub params: ParamVector,
    pub final_cost: f64,
    pub report: Option<OptimizerReport>,
    pub error: Option<String>,
}

/// Runs repetition `rep` with seeds derived from the cell.
pub fn run_repetition(cell: &ExperimentCell, rep: usize) -> Result<RepetitionOutcome> {
    let rep_seed = cell.rep_seed(rep);
    run_repetition_with_seeds(cell, rep, rep_seed, RepSeeds::from_rep_seed(rep_seed))
}

/// Runs one repetition with explicit seeds. Optimizer failures are recorded
/// in the outcome and the initial parameters are scored instead.
pub fn run_repetition_with_seeds(cell: &ExperimentCell, rep: usize, rep_seed: u64, seeds: RepSeeds) -> Result<RepetitionOutcome> {
    cell.validate()?;
    let shape = cell.shape()?;
    let train = data::generate(cell.pattern, cell.train_size, seeds.train)?;
    let test = data::generate(cell.pattern, cell.test_size, seeds.test)?;
    let init = initial_params(&shape, seeds.init);
    let initial_test_accuracy = circuit::accuracy(&shape, &init, DEFAULT_BIAS, &test)?;

    let objective = TrainingObjective::new(cell.cost, shape, &train)?;
    let value = |p: &[f64]| objective.value(p);
    let gradient = |p: &[f64]| {
        objective
            .gradient(p, cell.gradient)
            .unwrap_or_else(|_| vec![f64::NAN; p.len()])
    };
    let (params, report, error) =
        match optim::minimize_with_gradient(value, gradient, init.as_slice(), cell.method, &cell.optimizer) {
            Ok(r) => match ParamVector::new(r.x_best.clone()) {
                Ok(p) => (p, Some(r), None),
                Err(e) => (init.clone(), Some(r), Some(e.to_string())),
            },
            Err(e) => (init.clone(), None, Some(e.to_string())),
        };

    let bias = if cell.tune_bias {
        circuit::tune_bias(&shape, &params, &train)?
    } else {
        DEFAULT_BIAS
    };
    Ok(RepetitionOutcome {
        rep_index: rep,
        rep_seed,
        seeds,
        train_accuracy: circuit::accuracy(&shape, &params, bias, &train)?,
        test_accuracy: circuit::accuracy(&shape, &params, bias, &test)?,
        initial_test_accuracy,
        bias,
        final_cost: objective.value(params.as_slice()),
        params,
        report,
        error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        Self {
            mean: values.iter().sum::<f64>() / n,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AccuracyRecord {
    pub cell: ExperimentCell,
    pub train: Summary,
    pub test: Summary,
    pub repetitions: Vec<RepetitionOutcome>,
    pub mean_final_cost: f64,
    pub total_evals: usize,
    pub wall_time: Duration,
}

impl AccuracyRecord {
    fn from_outcomes(cell: &ExperimentCell, repetitions: Vec<RepetitionOutcome>, wall_time: Duration) -> Self {
        let train: Vec<f64> = repetitions.iter().map(|r| r.train_accuracy).collect();
        let test: Vec<f64> = repetitions.iter().map(|r| r.test_accuracy).collect();
        let costs: Vec<f64> = repetitions.iter().map(|r| r.final_cost).collect();
        Self {
            cell: cell.clone(),
            train: Summary::of(&train),
            test: Summary::of(&test),
            mean_final_cost: Summary::of(&costs).mean,
            total_evals: repetitions
                .iter()
                .filter_map(|r| r.report.as_ref().map(|rep| rep.n_evals))
                .sum(),
            repetitions,
            wall_time,
        }
    }

    pub fn rep_seeds(&self) -> Vec<u64> {
        self.repetitions.iter().map(|r| r.rep_seed).collect()
    }

    pub fn test_accuracies(&self) -> Vec<f64> {
        self.repetitions.iter().map(|r| r.test_accuracy).collect()
    }
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Runs every repetition of `cell` on `workers` threads.
pub fn run_cell(cell: &ExperimentCell, workers: usize) -> Result<AccuracyRecord> {
    run_cell_seeded(cell, workers, |rep| {
        let s = cell.rep_seed(rep);
        (s, RepSeeds::from_rep_seed(s))
    })
}

/// Like [`run_cell`] with caller-chosen seeds per repetition.
pub fn run_cell_seeded<S>(cell: &ExperimentCell, workers: usize, seeds: S) -> Result<AccuracyRecord>
where
    S: Fn(usize) -> (u64, RepSeeds) + Sync,
{
    cell.validate()?;
    let started = Instant::now();
    let outcomes: Vec<RepetitionOutcome> = with_pool(workers, || {
        (0..cell.repetitions)
            .into_par_iter()
            .map(|rep| {
                let (rep_seed, s) = seeds(rep);
                run_repetition_with_seeds(cell, rep, rep_seed, s)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(AccuracyRecord::from_outcomes(cell, outcomes, started.elapsed()))
}

/// Runs many cells, repetitions of all cells sharing one worker pool.
/// Records come back in the order of `cells`.
pub fn run_cells(cells: &[ExperimentCell], workers: usize) -> Result<Vec<AccuracyRecord>> {
    for c in cells {
        c.validate()?;
    }
    let jobs: Vec<(usize, usize)> = cells
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.repetitions).map(move |r| (i, r)))
        .collect();
    let started = Instant::now();
    let outcomes: Vec<(usize, RepetitionOutcome)> = with_pool(workers, || {
        jobs.par_iter()
            .map(|&(i, r)| run_repetition(&cells[i], r).map(|o| (i, o)))
            .collect::<Result<Vec<_>>>()
    })??;
    let elapsed = started.elapsed();
    let mut grouped: Vec<Vec<RepetitionOutcome>> = vec![Vec::new(); cells.len()];
    for (i, o) in outcomes {
        grouped[i].push(o);
    }
    Ok(cells
        .iter()
        .zip(grouped)
        .map(|(c, reps)| AccuracyRecord::from_outcomes(c, reps, elapsed))
        .collect())
}
