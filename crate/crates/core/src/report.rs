//! Per-run records. Field order here is the CSV column order and the JSON
//! key order; both are part of the CLI's output contract.

use serde::{Deserialize, Serialize};

/// One approximation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub algorithm: String,
    pub input: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub b: Option<usize>,
    pub seed: u64,
    pub rel_err_sampled: f64,
    pub rel_err_exact: Option<f64>,
    pub flops: u64,
    pub stage1_flops: Option<u64>,
    pub wall_ms: f64,
    pub rank_deficient: bool,
    pub adaptive_level: Option<usize>,
    pub retries: usize,
    pub converged: bool,
}

impl Report {
    pub(crate) fn new(algorithm: &str, (m, n): (usize, usize), seed: u64) -> Self {
        Report {
            algorithm: algorithm.to_string(),
            input: String::new(),
            m,
            n,
            k: 0,
            l: 0,
            r: 0,
            b: None,
            seed,
            rel_err_sampled: 0.0,
            rel_err_exact: None,
            flops: 0,
            stage1_flops: None,
            wall_ms: 0.0,
            rank_deficient: false,
            adaptive_level: None,
            retries: 0,
            converged: true,
        }
    }
}

/// One elimination run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenpReport {
    /// `genp`, `block`, or `preprocessed`.
    pub mode: String,
    pub input: String,
    pub n: usize,
    pub block: Option<usize>,
    pub multiplier: Option<String>,
    pub b: Option<usize>,
    pub seed: u64,
    pub ok: bool,
    /// Elimination step (or panel) at which a pivot failed.
    pub failed_at: Option<usize>,
    pub growth: Option<f64>,
    /// `||A x - rhs|| / (||A||_F ||x||)` for solves, `||LU - A||_F / ||A||_F`
    /// for factorizations.
    pub residual: Option<f64>,
    pub flops: u64,
    pub wall_ms: f64,
    pub retries: usize,
}
