//! Sublinear CUR: skeletonize a random `k x l` submatrix, then extend the
//! skeleton to the whole matrix. Also the adaptive oversampling wrapper and
//! alternating-maxvol cross-approximation.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cur::{sampled_errors, CurFactors, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::flops;
use crate::kernels::{pivot_columns, volume};
use crate::matrix::Matrix;
use crate::report::Report;
use crate::rng::{self, stream};
use crate::selection::{default_max_iters, maxvol, maxvol_from, select_rc, IndexSet};

/// Oversampling factor of the first adaptive level (`k = l = 4r`).
pub const OVERSAMPLING: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStageConfig {
    pub k: usize,
    pub l: usize,
    pub r: usize,
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Columns sampled for the a-posteriori error estimate.
    pub probe: usize,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// Probe size used when the caller does not pick one.
pub fn default_probe(n: usize, r: usize) -> usize {
    n.min(16.max(2 * r))
}

impl TwoStageConfig {
    pub fn new(k: usize, l: usize, r: usize, seed: u64) -> Self {
        Self {
            k,
            l,
            r,
            seed,
            tol: DEFAULT_TOL,
            probe: 16,
        }
    }

    pub fn with_probe(mut self, probe: usize) -> Self {
        self.probe = probe;
        self
    }

    pub fn validate(&self, (m, n): (usize, usize)) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.k == 0 || self.k > m {
            return bad(format!("k = {} must be in 1..={m}", self.k));
        }
        if self.l == 0 || self.l > n {
            return bad(format!("l = {} must be in 1..={n}", self.l));
        }
        if self.r == 0 || self.r > self.k.min(self.l) {
            return bad(format!("r = {} must be in 1..=min(k, l)", self.r));
        }
        if self.probe == 0 || self.probe > n {
            return bad(format!("probe = {} must be in 1..={n}", self.probe));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return bad(format!("tol = {} must be >= 0", self.tol));
        }
        Ok(())
    }
}

/// Uniform row and column samples shared by every two-stage variant.
pub(crate) fn sample_block(
    m: usize,
    n: usize,
    k: usize,
    l: usize,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let rows = rng::sample_sorted(&mut rng::rng(rng::derive(seed, stream::ROWS)), m, k);
    let cols = rng::sample_sorted(&mut rng::rng(rng::derive(seed, stream::COLS)), n, l);
    (rows, cols)
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Two-stage CUR.
///
/// Stage (i) skeletonizes the uniformly sampled block `W[I0, J0]` with
/// [`select_rc`]; its cost depends only on `(k, l, r)`. Stage (ii) lifts the
/// chosen positions to global indices and builds `U` from the intersection.
/// The report's error is the column-sampled estimate, so the whole call
/// stays far below `m n` operations.
pub fn two_stage_cur(w: &Matrix, cfg: &TwoStageConfig) -> Result<(CurFactors, Report)> {
    let (m, n) = w.shape();
    cfg.validate((m, n))?;
    let start = Instant::now();
    let (out, total) = flops::measure(|| -> Result<_> {
        let (i0, j0) = sample_block(m, n, cfg.k, cfg.l, cfg.seed);
        let block = w.select(&i0, &j0)?;
        let (sel, stage1) = flops::measure(|| select_rc(&block, cfg.r));
        let sel = sel?;
        let rows = sel.rows.lift(&i0, m)?;
        let cols = sel.cols.lift(&j0, n)?;
        let r = cfg.r.min(rows.len());
        let f = CurFactors::build(w, &rows, &cols, r, cfg.tol)?;
        let est = sampled_errors(w, &f, cfg.probe, cfg.seed)?;
        Ok((f, sel.rank_deficient, stage1, est.relative()))
    });
    let (f, rank_deficient, stage1, rel) = out?;
    let mut rep = Report::new("twostage", (m, n), cfg.seed);
    rep.k = cfg.k;
    rep.l = cfg.l;
    rep.r = cfg.r;
    rep.rel_err_sampled = rel;
    rep.flops = total;
    rep.stage1_flops = Some(stage1);
    rep.rank_deficient = rank_deficient;
    rep.wall_ms = elapsed_ms(start);
    Ok((f, rep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveConfig {
    pub r: usize,
    pub target_rel_err: f64,
    pub seed: u64,
    pub max_level: usize,
    /// Probe columns per attempt; `None` picks [`default_probe`].
    pub probe: Option<usize>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

impl AdaptiveConfig {
    pub fn new(r: usize, target_rel_err: f64, seed: u64, max_level: usize) -> Self {
        Self {
            r,
            target_rel_err,
            seed,
            max_level,
            probe: None,
            tol: DEFAULT_TOL,
        }
    }
}

/// Two-stage CUR with oversampling: starts at `k = l = 4r` and doubles both
/// after every attempt whose sampled relative error exceeds the target,
/// capped at `min(m, n)`. Returns the first success or, failing that, the
/// attempt with the smallest sampled error (`converged = false`).
pub fn adaptive_cur(w: &Matrix, cfg: &AdaptiveConfig) -> Result<(CurFactors, Report)> {
    let (m, n) = w.shape();
    if cfg.target_rel_err.is_nan() || cfg.target_rel_err <= 0.0 {
        return Err(Error::Config("target relative error must be > 0".into()));
    }
    if cfg.max_level == 0 {
        return Err(Error::Config("max_level must be >= 1".into()));
    }
    if cfg.r == 0 || cfg.r > m.min(n) {
        return Err(Error::Config(format!(
            "r = {} must be in 1..={}",
            cfg.r,
            m.min(n)
        )));
    }
    let cap = m.min(n);
    let probe = cfg.probe.unwrap_or_else(|| default_probe(n, cfg.r));
    let start = Instant::now();
    let mut total = 0u64;
    let mut best: Option<(CurFactors, Report)> = None;
    let mut success = false;

    for level in 0..cfg.max_level {
        let size = (OVERSAMPLING * cfg.r)
            .saturating_mul(1usize << level.min(40))
            .min(cap);
        let seed = if level == 0 {
            cfg.seed
        } else {
            rng::derive(cfg.seed, stream::LEVEL + level as u64)
        };
        let tcfg = TwoStageConfig {
            k: size,
            l: size,
            r: cfg.r,
            seed,
            tol: cfg.tol,
            probe,
        };
        let (f, mut rep) = two_stage_cur(w, &tcfg)?;
        total += rep.flops;
        rep.adaptive_level = Some(level);
        let ok = rep.rel_err_sampled <= cfg.target_rel_err;
        let better = best
            .as_ref()
            .is_none_or(|(_, b)| rep.rel_err_sampled < b.rel_err_sampled);
        if ok || better {
            best = Some((f, rep));
        }
        if ok {
            success = true;
            break;
        }
        if size == cap {
            break;
        }
    }

    let (f, mut rep) = best.expect("at least one adaptive level runs");
    rep.algorithm = "adaptive".into();
    rep.seed = cfg.seed;
    rep.flops = total;
    rep.converged = success;
    rep.wall_ms = elapsed_ms(start);
    Ok((f, rep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossConfig {
    pub l: usize,
    pub delta: f64,
    pub max_sweeps: usize,
    pub seed: u64,
    pub probe: Option<usize>,
}

impl CrossConfig {
    pub fn new(l: usize, seed: u64) -> Self {
        Self {
            l,
            delta: crate::selection::DEFAULT_DELTA,
            max_sweeps: 10,
            seed,
            probe: None,
        }
    }
}

/// Per-half-sweep history of a cross-approximation run.
#[derive(Debug, Clone)]
pub struct CrossTrace {
    /// `|det W[I, J]|` after every row and column update.
    pub volumes: Vec<f64>,
    pub sweeps: usize,
    /// Final size of the index sets (below the requested `l` after a rank
    /// collapse).
    pub l: usize,
}

/// Cross-approximation by alternating maxvol on `W[:, J]` and `W[I, :]^T`.
pub fn cross_approx(w: &Matrix, cfg: &CrossConfig) -> Result<(CurFactors, Report)> {
    cross_approx_traced(w, cfg).map(|(f, r, _)| (f, r))
}

pub fn cross_approx_traced(
    w: &Matrix,
    cfg: &CrossConfig,
) -> Result<(CurFactors, Report, CrossTrace)> {
    let (m, n) = w.shape();
    if cfg.l == 0 || cfg.l > m.min(n) {
        return Err(Error::Config(format!(
            "l = {} must be in 1..={}",
            cfg.l,
            m.min(n)
        )));
    }
    if cfg.max_sweeps == 0 {
        return Err(Error::Config("max_sweeps must be >= 1".into()));
    }
    let start = Instant::now();
    let (out, total) = flops::measure(|| cross_inner(w, cfg));
    let (f, trace, retries, converged) = out?;

    let mut rep = Report::new("cross", (m, n), cfg.seed);
    rep.k = trace.l;
    rep.l = trace.l;
    rep.r = trace.l;
    rep.retries = retries;
    rep.rank_deficient = trace.l < cfg.l;
    rep.converged = converged;
    let probe = cfg.probe.unwrap_or_else(|| default_probe(n, trace.l));
    let (est, probe_flops) = flops::measure(|| sampled_errors(w, &f, probe, cfg.seed));
    rep.rel_err_sampled = est?.relative();
    rep.flops = total + probe_flops;
    rep.wall_ms = elapsed_ms(start);
    Ok((f, rep, trace))
}

type CrossOut = (CurFactors, CrossTrace, usize, bool);

fn cross_inner(w: &Matrix, cfg: &CrossConfig) -> Result<CrossOut> {
    let (m, n) = w.shape();
    let mut g = rng::rng(rng::derive(cfg.seed, stream::CROSS_INIT));
    let mut l = cfg.l;
    let mut cols = rng::sample_sorted(&mut g, n, l);
    let mut retries = 0;

    // initial row set, handling rank collapse of W[:, J]
    let mut rows = loop {
        let wc = w.select_cols(&cols)?;
        match maxvol(&wc, cfg.delta, default_max_iters(l)) {
            Ok(mv) => break mv.rows.as_slice().to_vec(),
            Err(Error::RankDeficient { rank, .. }) => {
                if retries == 0 {
                    retries = 1;
                    cols = rng::sample_sorted(&mut g, n, l);
                } else if rank == 0 || l == 1 {
                    // W[:, J] is numerically zero: keep a single degenerate
                    // skeleton, which yields U = 0
                    l = 1;
                    cols.truncate(1);
                    let f = CurFactors::build(
                        w,
                        &IndexSet::rows(vec![0], m)?,
                        &IndexSet::cols(cols.clone(), n)?,
                        1,
                        DEFAULT_TOL,
                    )?;
                    let trace = CrossTrace {
                        volumes: vec![0.0],
                        sweeps: 0,
                        l,
                    };
                    return Ok((f, trace, retries, false));
                } else {
                    let piv = pivot_columns(&wc, rank)?;
                    l = rank;
                    cols = piv.perm.iter().map(|&c| cols[c]).collect();
                }
            }
            Err(e) => return Err(e),
        }
    };

    let mut volumes = vec![volume(&w.select(&rows, &cols)?)?];
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        if sweeps > 1 {
            let mv = maxvol_from(
                &w.select_cols(&cols)?,
                rows.clone(),
                cfg.delta,
                default_max_iters(l),
            )?;
            rows = mv.rows.as_slice().to_vec();
            volumes.push(volume(&w.select(&rows, &cols)?)?);
        }
        // column update, warm-started from the current J
        let wr = w.select_rows(&rows)?.transpose();
        let col_pos: Vec<usize> = cols.clone();
        let mv = maxvol_from(&wr, col_pos, cfg.delta, default_max_iters(l))?;
        let unchanged = mv.swaps.is_empty();
        cols = mv.rows.as_slice().to_vec();
        volumes.push(volume(&w.select(&rows, &cols)?)?);
        if unchanged {
            converged = true;
            break;
        }
    }

    let f = CurFactors::build(
        w,
        &IndexSet::rows(rows, m)?,
        &IndexSet::cols(cols, n)?,
        l,
        DEFAULT_TOL,
    )?;
    Ok((f, CrossTrace { volumes, sweeps, l }, retries, converged))
}
