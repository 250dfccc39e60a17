//! Single-qubit data re-uploading classifier.
//!
//! * [`qstate`]: single-qubit states, rotations and metrics.
//! * [`circuit`]: the layered classifier and its decision rule.
//! * [`cost`]: fidelity and trace-distance objectives with gradients.
//! * [`data`]: circle and line datasets, seeding and CSV persistence.
//! * [`optim`]: L-BFGS, COBYLA, Nelder–Mead and SLSQP.
//! * [`harness`]: experiment cells, sweeps, result files and plots.

pub mod circuit;
pub mod cost;
pub mod data;
pub mod error;
pub mod harness;
pub mod optim;
pub mod qstate;

pub use error::{Error, Result};
