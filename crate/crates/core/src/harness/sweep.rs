//! Training-size sweeps with a resumable checkpoint, and the named presets.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::results::{emit_csv, load_results, ResultRow};
use super::{emit_svg, run_cells, DatasetMode, ExperimentCell};
use crate::cost::CostKind;
use crate::data::Pattern;
use crate::error::{Error, Result};
use crate::optim::Method;

/// Runs `template` at every size in `sizes` and returns rows in that order.
///
/// With a checkpoint path, rows already present there are reused and the
/// file is rewritten after every batch of `workers` cells, so an
/// interrupted sweep resumes where it stopped and a finished one ends with
/// the same file either way. Rows in the file that belong to other cells
/// are dropped.
pub fn run_sweep(template: &ExperimentCell, sizes: &[usize], checkpoint: Option<&Path>, workers: usize) -> Result<Vec<ResultRow>> {
    let cells: Vec<ExperimentCell> = sizes.iter().map(|&n| template.with_train_size(n)).collect();
    for c in &cells {
        c.validate()?;
    }
    let previous = match checkpoint {
        Some(p) if p.exists() => load_results(p)?,
        _ => Vec::new(),
    };
    let key_of = |c: &ExperimentCell| {
        (c.cost, c.pattern, c.method, c.mode, c.layers, c.train_size, c.test_size, c.repetitions, c.master_seed)
    };
    let mut done: Vec<Option<ResultRow>> = cells
        .iter()
        .map(|c| previous.iter().find(|r| r.key() == key_of(c)).cloned())
        .collect();

    let pending: Vec<usize> = (0..cells.len()).filter(|&i| done[i].is_none()).collect();
    let batch = workers.max(1);
    let mut wrote = false;
    for chunk in pending.chunks(batch) {
        let batch_cells: Vec<ExperimentCell> = chunk.iter().map(|&i| cells[i].clone()).collect();
        for (&i, rec) in chunk.iter().zip(run_cells(&batch_cells, workers)?) {
            done[i] = Some(ResultRow::from(&rec));
        }
        if let Some(p) = checkpoint {
            emit_csv(&done.iter().flatten().cloned().collect::<Vec<_>>(), p)?;
            wrote = true;
        }
    }
    let rows: Vec<ResultRow> = done.into_iter().flatten().collect();
    if let (Some(p), false) = (checkpoint, wrote) {
        emit_csv(&rows, p)?;
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Every cost, pattern, method and mode at five layers.
    Fig4,
    /// Fidelity cost, circle, L-BFGS, fixed data, five layers.
    FigA1,
    /// Fidelity cost, circle, L-BFGS, random data, one to five layers.
    FigA2,
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::FigA1 => "figA1",
            Preset::FigA2 => "figA2",
        }
    }

    /// Named sweeps: a template cell and its training sizes.
    pub fn sweeps(self) -> Vec<(String, ExperimentCell, Vec<usize>)> {
        let named = |c: ExperimentCell, suffix: &str| {
            let name = format!(
                "{}_{}_{}_{}{}",
                c.cost.as_str(),
                c.pattern.as_str(),
                c.method.as_str(),
                c.mode.as_str(),
                suffix
            );
            let sizes = c.mode.default_train_sizes();
            (name, c.with_train_size(sizes[0]), sizes)
        };
        match self {
            Preset::Fig4 => {
                let mut out = Vec::new();
                for cost in [CostKind::Fidelity, CostKind::TraceDistance] {
                    for pattern in [Pattern::Circle, Pattern::Line] {
                        for method in Method::ALL {
                            for mode in [DatasetMode::Fixed, DatasetMode::Random] {
                                out.push(named(ExperimentCell::new(cost, pattern, method, mode, 5, 1), ""));
                            }
                        }
                    }
                }
                out
            }
            Preset::FigA1 => vec![named(
                ExperimentCell::new(CostKind::Fidelity, Pattern::Circle, Method::Lbfgs, DatasetMode::Fixed, 5, 1),
                "_l5",
            )],
            Preset::FigA2 => (1..=5)
                .map(|l| {
                    named(
                        ExperimentCell::new(CostKind::Fidelity, Pattern::Circle, Method::Lbfgs, DatasetMode::Random, l, 1),
                        &format!("_l{l}"),
                    )
                })
                .collect(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig4" => Ok(Preset::Fig4),
            "figa1" => Ok(Preset::FigA1),
            "figa2" => Ok(Preset::FigA2),
            _ => Err(Error::InvalidArgument(format!("unknown preset '{s}'"))),
        }
    }
}

/// Runs every sweep of `preset` into `out_dir`: one CSV and SVG per sweep
/// and a combined `<preset>.csv` / `<preset>.svg`. `adjust` may change each
/// template before it runs.
pub fn run_preset(
    preset: Preset,
    out_dir: &Path,
    workers: usize,
    adjust: impl Fn(&mut ExperimentCell),
) -> Result<Vec<(PathBuf, Vec<ResultRow>)>> {
    let mut out = Vec::new();
    let mut all = Vec::new();
    for (name, mut cell, sizes) in preset.sweeps() {
        adjust(&mut cell);
        let csv = out_dir.join(format!("{name}.csv"));
        let rows = run_sweep(&cell, &sizes, Some(&csv), workers)?;
        emit_svg(&rows, out_dir.join(format!("{name}.svg")))?;
        all.extend(rows.iter().cloned());
        out.push((csv, rows));
    }
    emit_csv(&all, out_dir.join(format!("{preset}.csv")))?;
    emit_svg(&all, out_dir.join(format!("{preset}.svg")))?;
    Ok(out)
}
