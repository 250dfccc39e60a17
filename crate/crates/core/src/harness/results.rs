//! Result table: one row per cell.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::{AccuracyRecord, DatasetMode};
use crate::cost::CostKind;
use crate::data::Pattern;
use crate::error::{Error, Result};
use crate::optim::Method;

pub const HEADER: &str = "cost,pattern,method,mode,layers,train_size,test_size,reps,\
mean_train_acc,min_train_acc,max_train_acc,mean_test_acc,min_test_acc,max_test_acc,\
mean_final_cost,total_evals,master_seed,rep_seeds";

const COLUMNS: usize = 18;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub cost: CostKind,
    pub pattern: Pattern,
    pub method: Method,
    pub mode: DatasetMode,
    pub layers: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub reps: usize,
    pub mean_train_acc: f64,
    pub min_train_acc: f64,
    pub max_train_acc: f64,
    pub mean_test_acc: f64,
    pub min_test_acc: f64,
    pub max_test_acc: f64,
    pub mean_final_cost: f64,
    pub total_evals: usize,
    pub master_seed: u64,
    pub rep_seeds: Vec<u64>,
}

/// Columns that identify a cell.
pub type RowKey = (CostKind, Pattern, Method, DatasetMode, usize, usize, usize, usize, u64);

impl ResultRow {
    pub fn key(&self) -> RowKey {
        (
            self.cost,
            self.pattern,
            self.method,
            self.mode,
            self.layers,
            self.train_size,
            self.test_size,
            self.reps,
            self.master_seed,
        )
    }

    fn to_line(&self) -> String {
        let seeds: Vec<String> = self.rep_seeds.iter().map(u64::to_string).collect();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.cost.as_str(),
            self.pattern.as_str(),
            self.method.as_str(),
            self.mode.as_str(),
            self.layers,
            self.train_size,
            self.test_size,
            self.reps,
            self.mean_train_acc,
            self.min_train_acc,
            self.max_train_acc,
            self.mean_test_acc,
            self.min_test_acc,
            self.max_test_acc,
            self.mean_final_cost,
            self.total_evals,
            self.master_seed,
            seeds.join(";"),
        )
    }
}

impl From<&AccuracyRecord> for ResultRow {
    fn from(r: &AccuracyRecord) -> Self {
        let c = &r.cell;
        Self {
            cost: c.cost,
            pattern: c.pattern,
            method: c.method,
            mode: c.mode,
            layers: c.layers,
            train_size: c.train_size,
            test_size: c.test_size,
            reps: c.repetitions,
            mean_train_acc: r.train.mean,
            min_train_acc: r.train.min,
            max_train_acc: r.train.max,
            mean_test_acc: r.test.mean,
            min_test_acc: r.test.min,
            max_test_acc: r.test.max,
            mean_final_cost: r.mean_final_cost,
            total_evals: r.total_evals,
            master_seed: c.master_seed,
            rep_seeds: r.rep_seeds(),
        }
    }
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

/// Writes `rows` to `path`, replacing it atomically.
pub fn emit_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("csv.tmp");
    fs::write(&tmp, to_csv_string(rows)).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn field<T: FromStr>(path: &Path, line: u64, name: &str, raw: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("bad {name} '{raw}'"),
    })
}

fn accuracy(path: &Path, line: u64, name: &str, raw: &str) -> Result<f64> {
    let v: f64 = field(path, line, name, raw)?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Validation {
            path: path.to_path_buf(),
            line,
            message: format!("{name} {v} outside [0, 1]"),
        });
    }
    Ok(v)
}

pub fn parse_results(text: &str, path: &Path) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l));
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != COLUMNS {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: n,
                message: format!("expected {COLUMNS} fields, found {}", f.len()),
            });
        }
        let named = |i: usize, name: &str| -> Result<String> {
            Ok(f[i].trim().to_string()).and_then(|s| {
                if s.is_empty() {
                    Err(Error::Parse {
                        path: path.to_path_buf(),
                        line: n,
                        message: format!("empty {name}"),
                    })
                } else {
                    Ok(s)
                }
            })
        };
        let rep_seeds = if f[17].trim().is_empty() {
            Vec::new()
        } else {
            f[17]
                .split(';')
                .map(|s| field(path, n, "rep_seeds", s))
                .collect::<Result<Vec<u64>>>()?
        };
        let row = ResultRow {
            cost: named(0, "cost")?.parse()?,
            pattern: named(1, "pattern")?.parse()?,
            method: named(2, "method")?.parse()?,
            mode: named(3, "mode")?.parse()?,
            layers: field(path, n, "layers", f[4])?,
            train_size: field(path, n, "train_size", f[5])?,
            test_size: field(path, n, "test_size", f[6])?,
            reps: field(path, n, "reps", f[7])?,
            mean_train_acc: accuracy(path, n, "mean_train_acc", f[8])?,
            min_train_acc: accuracy(path, n, "min_train_acc", f[9])?,
            max_train_acc: accuracy(path, n, "max_train_acc", f[10])?,
            mean_test_acc: accuracy(path, n, "mean_test_acc", f[11])?,
            min_test_acc: accuracy(path, n, "min_test_acc", f[12])?,
            max_test_acc: accuracy(path, n, "max_test_acc", f[13])?,
            mean_final_cost: field(path, n, "mean_final_cost", f[14])?,
            total_evals: field(path, n, "total_evals", f[15])?,
            master_seed: field(path, n, "master_seed", f[16])?,
            rep_seeds,
        };
        if row.rep_seeds.len() != row.reps {
            return Err(Error::Validation {
                path: path.to_path_buf(),
                line: n,
                message: format!("{} seeds for {} repetitions", row.rep_seeds.len(), row.reps),
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn load_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_results(&text, path)
}
