//! Benchmark datasets on the square `[-1, 1]²`.
//!
//! Points are drawn with `Xoshiro256PlusPlus` seeded through SplitMix64
//! (`SeedableRng::seed_from_u64`). Each point consumes two 64-bit outputs,
//! `x1` first, each mapped to `2u − 1` where `u` is the top 53 bits scaled
//! into `[0, 1)`. The stream is the same on every platform.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

/// Squared radius of the circle whose area is half the square: `πr² = 2`.
pub const CIRCLE_RADIUS_SQ: f64 = 2.0 / std::f64::consts::PI;

/// Binary class. `A` is inside the circle / above the line and maps to the
/// `|0⟩` label state; it is serialized as `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    A,
    B,
}

impl Class {
    pub fn as_bit(self) -> u8 {
        match self {
            Class::A => 0,
            Class::B => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Class::A),
            1 => Some(Class::B),
            _ => None,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Class::A => Class::B,
            Class::B => Class::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Circle,
    Line,
}

impl Pattern {
    pub fn label(self, x1: f64, x2: f64) -> Class {
        match self {
            Pattern::Circle => label_circle(x1, x2),
            Pattern::Line => label_line(x1, x2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pattern::Circle => "circle",
            Pattern::Line => "line",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            Pattern::Circle => 1,
            Pattern::Line => 2,
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" => Ok(Pattern::Circle),
            "line" => Ok(Pattern::Line),
            other => Err(Error::InvalidArgument(format!("unknown pattern '{other}'"))),
        }
    }
}

/// Inside the equal-area circle. The boundary belongs to `B`.
pub fn label_circle(x1: f64, x2: f64) -> Class {
    if x1 * x1 + x2 * x2 < CIRCLE_RADIUS_SQ {
        Class::A
    } else {
        Class::B
    }
}

/// Strictly above `x2 = x1`. Points on the line belong to `B`.
pub fn label_line(x1: f64, x2: f64) -> Class {
    if x2 > x1 {
        Class::A
    } else {
        Class::B
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledPoint {
    pub x1: f64,
    pub x2: f64,
    pub label: Class,
}

impl LabeledPoint {
    pub fn features(&self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    fn in_domain(&self) -> bool {
        (-1.0..=1.0).contains(&self.x1) && (-1.0..=1.0).contains(&self.x2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<LabeledPoint>,
    seed: u64,
    pattern: Pattern,
}

impl Dataset {
    /// Wraps arbitrary points. Labels are taken as given; coordinates must
    /// lie in `[-1, 1]`.
    pub fn from_points(pattern: Pattern, seed: u64, points: Vec<LabeledPoint>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !p.in_domain()) {
            return Err(Error::InvalidArgument(format!(
                "point ({}, {}) lies outside [-1, 1]^2",
                p.x1, p.x2
            )));
        }
        Ok(Self {
            points,
            seed,
            pattern,
        })
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn pattern(&self) -> Pattern {
        self.pattern
    }

    /// Fraction of points labeled `A`.
    pub fn class_a_fraction(&self) -> f64 {
        let a = self.points.iter().filter(|p| p.label == Class::A).count();
        a as f64 / self.points.len().max(1) as f64
    }

    /// Same coordinates with every label inverted.
    pub fn with_flipped_labels(&self) -> Self {
        let points = self
            .points
            .iter()
            .map(|p| LabeledPoint {
                label: p.label.flipped(),
                ..*p
            })
            .collect();
        Self { points, ..*self }
    }

    /// First `n` points (or all of them when `n` exceeds the length).
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            points: self.points[..n.min(self.points.len())].to_vec(),
            ..*self
        }
    }

    /// Concatenation, keeping this dataset's seed and pattern.
    pub fn concat(&self, other: &Dataset) -> Self {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        Self { points, ..*self }
    }

    pub(crate) fn require_non_empty(&self) -> Result<()> {
        if self.points.is_empty() {
            Err(Error::EmptyDataset)
        } else {
            Ok(())
        }
    }
}

fn uniform_coordinate(rng: &mut Xoshiro256PlusPlus) -> f64 {
    let u: f64 = rng.random();
    2.0 * u - 1.0
}

/// `n` i.i.d. uniform points labeled by `pattern`.
pub fn generate(pattern: Pattern, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "dataset size must be at least 1".into(),
        ));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x1 = uniform_coordinate(&mut rng);
            let x2 = uniform_coordinate(&mut rng);
            LabeledPoint {
                x1,
                x2,
                label: pattern.label(x1, x2),
            }
        })
        .collect();
    Ok(Dataset {
        points,
        seed,
        pattern,
    })
}

/// 17 significant digits; parses back to the identical `f64`.
pub(crate) fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

const METADATA_PREFIX: &str = "# ";

/// Writes `x1,x2,label` rows preceded by a `# pattern=...,seed=...` comment.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(
            out,
            "{METADATA_PREFIX}pattern={},seed={}",
            dataset.pattern, dataset.seed
        )?;
        writeln!(out, "x1,x2,label")?;
        for p in &dataset.points {
            writeln!(
                out,
                "{},{},{}",
                format_f64(p.x1),
                format_f64(p.x2),
                p.label.as_bit()
            )?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

fn parse_metadata(line: &str) -> Option<(Option<Pattern>, Option<u64>)> {
    let body = line.strip_prefix('#')?.trim();
    let mut pattern = None;
    let mut seed = None;
    for field in body.split(',') {
        let (key, value) = field.split_once('=')?;
        match key.trim() {
            "pattern" => pattern = value.trim().parse().ok(),
            "seed" => seed = value.trim().parse().ok(),
            _ => {}
        }
    }
    Some((pattern, seed))
}

/// Reads a dataset written by [`save_csv`].
///
/// The metadata comment is optional. Without it the seed defaults to 0 and
/// the pattern is whichever labeling rule reproduces every stored label.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut meta = (None, None);
    let mut header_seen = false;
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if !header_seen {
                if let Some(m) = parse_metadata(line) {
                    meta = m;
                }
            }
            continue;
        }
        if !header_seen {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols != ["x1", "x2", "label"] {
                return Err(parse_err(
                    line_no,
                    format!("expected header 'x1,x2,label', found '{line}'"),
                ));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected 3 fields, found {}", cols.len()),
            ));
        }
        let coord = |s: &str, name: &str| {
            s.parse::<f64>()
                .map_err(|e| parse_err(line_no, format!("bad {name} '{s}': {e}")))
        };
        let x1 = coord(cols[0], "x1")?;
        let x2 = coord(cols[1], "x2")?;
        let label = cols[2]
            .parse::<u8>()
            .ok()
            .and_then(Class::from_bit)
            .ok_or_else(|| parse_err(line_no, format!("label must be 0 or 1, found '{}'", cols[2])))?;
        let point = LabeledPoint { x1, x2, label };
        if !point.in_domain() {
            return Err(Error::Validation {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("coordinate ({x1}, {x2}) lies outside [-1, 1]^2"),
            });
        }
        points.push(point);
    }
    if !header_seen {
        return Err(parse_err(1, "missing 'x1,x2,label' header".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let consistent = |pattern: Pattern| {
        points
            .iter()
            .all(|p| pattern.label(p.x1, p.x2) == p.label)
    };
    let pattern = match meta.0 {
        Some(p) => p,
        None => [Pattern::Circle, Pattern::Line]
            .into_iter()
            .find(|&p| consistent(p))
            .ok_or_else(|| Error::Validation {
                path: path.to_path_buf(),
                line: 1,
                message: "no pattern metadata and labels match neither labeling rule".into(),
            })?,
    };
    Ok(Dataset {
        points,
        seed: meta.1.unwrap_or(0),
        pattern,
    })
}
