//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys match the
//! long command-line flags with `-` or `_` as separator. Values given on
//! the command line override the file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{DatasetMode, ExperimentCell, DEFAULT_MASTER_SEED, DEFAULT_TEST_SIZE};
use crate::cost::{CostKind, GradientMethod};
use crate::data::Pattern;
use crate::error::{Error, Result};
use crate::optim::Method;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub cost: Option<CostKind>,
    pub pattern: Option<Pattern>,
    pub method: Option<Method>,
    pub mode: Option<DatasetMode>,
    pub layers: Option<usize>,
    pub train_sizes: Option<Vec<usize>>,
    pub test_size: Option<usize>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tune_bias: Option<bool>,
    pub workers: Option<usize>,
    pub gradient: Option<GradientMethod>,
    pub max_evals: Option<usize>,
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let sizes = s
        .split([',', ';', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad training size '{t}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidArgument(format!("training sizes must be positive: '{s}'")));
    }
    Ok(sizes)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::InvalidArgument(format!("bad boolean '{s}'"))),
    }
}

fn number<T: FromStr>(key: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value '{s}' for {key}")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "cost" => self.cost = Some(value.parse()?),
            "pattern" => self.pattern = Some(value.parse()?),
            "method" => self.method = Some(value.parse()?),
            "mode" => self.mode = Some(value.parse()?),
            "layers" => self.layers = Some(number(key, value)?),
            "train_sizes" => self.train_sizes = Some(parse_sizes(value)?),
            "test_size" => self.test_size = Some(number(key, value)?),
            "reps" | "repetitions" => self.reps = Some(number(key, value)?),
            "seed" | "master_seed" => self.seed = Some(number(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "tune_bias" => self.tune_bias = Some(parse_bool(value)?),
            "workers" => self.workers = Some(number(key, value)?),
            "gradient" => self.gradient = Some(value.parse()?),
            "max_evals" => self.max_evals = Some(number(key, value)?),
            other => return Err(Error::InvalidArgument(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i as u64 + 1,
                message,
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, found '{line}'")))?;
            cfg.set(k, v).map_err(|e| err(e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: RunConfig) -> Self {
        Self {
            cost: over.cost.or(self.cost),
            pattern: over.pattern.or(self.pattern),
            method: over.method.or(self.method),
            mode: over.mode.or(self.mode),
            layers: over.layers.or(self.layers),
            train_sizes: over.train_sizes.or(self.train_sizes),
            test_size: over.test_size.or(self.test_size),
            reps: over.reps.or(self.reps),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            tune_bias: over.tune_bias.or(self.tune_bias),
            workers: over.workers.or(self.workers),
            gradient: over.gradient.or(self.gradient),
            max_evals: over.max_evals.or(self.max_evals),
        }
    }

    /// Template cell plus the training sizes to sweep.
    pub fn resolve(&self) -> Result<(ExperimentCell, Vec<usize>)> {
        let mode = self.mode.unwrap_or(DatasetMode::Fixed);
        let sizes = self.train_sizes.clone().unwrap_or_else(|| mode.default_train_sizes());
        let mut cell = ExperimentCell::new(
            self.cost.unwrap_or(CostKind::Fidelity),
            self.pattern.unwrap_or(Pattern::Circle),
            self.method.unwrap_or(Method::Lbfgs),
            mode,
            self.layers.unwrap_or(5),
            sizes[0],
        );
        cell.test_size = self.test_size.unwrap_or(DEFAULT_TEST_SIZE);
        cell.repetitions = self.reps.unwrap_or(mode.default_repetitions());
        cell.master_seed = self.seed.unwrap_or(DEFAULT_MASTER_SEED);
        cell.tune_bias = self.tune_bias.unwrap_or(false);
        if let Some(g) = self.gradient {
            cell.gradient = g;
        }
        if let Some(m) = self.max_evals {
            cell.optimizer.max_evals = m;
        }
        for &n in &sizes {
            cell.with_train_size(n).validate()?;
        }
        Ok((cell, sizes))
    }
}
