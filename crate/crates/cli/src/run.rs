//! Batch execution. Seeds run in parallel; results come back in seed order.

use std::time::Instant;

use fastcur::cur::{error_exact, Norm};
use fastcur::elimination::{block_ge, genp, genp_preprocessed, solve_residual, LuFactors};
use fastcur::twostage::default_probe;
use fastcur::{
    adaptive_cur, cross_approx, flops, preprocessed_cur, read_matrix_market, two_stage_cur,
    AdaptiveConfig, Approximation, CrossConfig, Error, GenpReport, Matrix, Report, TwoStageConfig,
};
use rayon::prelude::*;

use crate::args::{Algorithm, GenpMode};
use crate::config::{ApproxPlan, GenpPlan, InputSource};
use crate::error::{CliError, CliResult};

/// Adaptive defaults when the plan leaves them open.
pub const DEFAULT_TARGET: f64 = 1e-4;
pub const DEFAULT_MAX_LEVEL: usize = 6;

enum Loaded {
    Fixed(Matrix),
    Generated(fastcur::GeneratorSpec),
}

impl Loaded {
    fn new(input: &InputSource) -> CliResult<Self> {
        Ok(match input {
            InputSource::File(p) => Loaded::Fixed(read_matrix_market(p)?),
            InputSource::Generator(g) => Loaded::Generated(*g),
        })
    }

    fn shape(&self) -> (usize, usize) {
        match self {
            Loaded::Fixed(m) => m.shape(),
            Loaded::Generated(g) => g.shape(),
        }
    }

    fn matrix(&self, seed: u64) -> CliResult<std::borrow::Cow<'_, Matrix>> {
        Ok(match self {
            Loaded::Fixed(m) => std::borrow::Cow::Borrowed(m),
            Loaded::Generated(g) => std::borrow::Cow::Owned(g.generate(seed)?),
        })
    }
}

fn need(v: Option<usize>, flag: &str, alg: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --alg {alg}")))
}

/// Checks every parameter once, before any seed runs, so that bad input is
/// a usage error rather than a per-seed failure.
fn check_approx(plan: &ApproxPlan, (m, n): (usize, usize)) -> CliResult<()> {
    match plan.alg {
        Algorithm::Twostage | Algorithm::Preprocessed => {
            let name = if plan.alg == Algorithm::Twostage {
                "twostage"
            } else {
                "preprocessed"
            };
            let r = need(plan.r, "r", name)?;
            let mut cfg =
                TwoStageConfig::new(need(plan.k, "k", name)?, need(plan.l, "l", name)?, r, 0);
            cfg.probe = plan.probe.unwrap_or_else(|| default_probe(n, r));
            if let Some(t) = plan.tol {
                cfg.tol = t;
            }
            cfg.validate((m, n))?;
        }
        Algorithm::Adaptive => {
            let r = need(plan.r, "r", "adaptive")?;
            if r > m.min(n) {
                return Err(CliError::Usage(format!(
                    "--r {r} exceeds min(m, n) = {}",
                    m.min(n)
                )));
            }
            if plan.max_level == Some(0) {
                return Err(CliError::Usage("--max-level must be >= 1".into()));
            }
            if let Some(p) = plan.probe {
                if p == 0 || p > n {
                    return Err(CliError::Usage(format!("--probe must be in 1..={n}")));
                }
            }
        }
        Algorithm::Cross => {
            let l = need(plan.l, "l", "cross")?;
            if l == 0 || l > m.min(n) {
                return Err(CliError::Usage(format!("--l must be in 1..={}", m.min(n))));
            }
            if plan.max_sweeps == Some(0) {
                return Err(CliError::Usage("--max-sweeps must be >= 1".into()));
            }
            if let Some(d) = plan.delta {
                if d.is_nan() || d < 0.0 {
                    return Err(CliError::Usage("--delta must be >= 0".into()));
                }
            }
        }
    }
    Ok(())
}

fn relative(w: &Matrix, f: &impl Approximation) -> fastcur::Result<f64> {
    let norm = w.frobenius_norm();
    let err = error_exact(w, f, Norm::Frobenius)?;
    Ok(if norm == 0.0 { err } else { err / norm })
}

fn approx_one(plan: &ApproxPlan, w: &Matrix, seed: u64) -> fastcur::Result<Report> {
    let (_, n) = w.shape();
    let exact =
        |f: &dyn Fn() -> fastcur::Result<f64>| if plan.exact { f().map(Some) } else { Ok(None) };
    let mut rep = match plan.alg {
        Algorithm::Twostage | Algorithm::Preprocessed => {
            let r = plan.r.expect("checked");
            let mut cfg =
                TwoStageConfig::new(plan.k.expect("checked"), plan.l.expect("checked"), r, seed);
            cfg.probe = plan.probe.unwrap_or_else(|| default_probe(n, r));
            if let Some(t) = plan.tol {
                cfg.tol = t;
            }
            if plan.alg == Algorithm::Twostage {
                let (f, mut rep) = two_stage_cur(w, &cfg)?;
                rep.rel_err_exact = exact(&|| relative(w, &f))?;
                rep
            } else {
                let (f, mut rep) = preprocessed_cur(w, &cfg, &plan.left, &plan.right)?;
                rep.rel_err_exact = exact(&|| relative(w, &f))?;
                rep
            }
        }
        Algorithm::Adaptive => {
            let mut cfg = AdaptiveConfig::new(
                plan.r.expect("checked"),
                plan.target.unwrap_or(DEFAULT_TARGET),
                seed,
                plan.max_level.unwrap_or(DEFAULT_MAX_LEVEL),
            );
            cfg.probe = plan.probe;
            if let Some(t) = plan.tol {
                cfg.tol = t;
            }
            let (f, mut rep) = adaptive_cur(w, &cfg)?;
            rep.rel_err_exact = exact(&|| relative(w, &f))?;
            rep
        }
        Algorithm::Cross => {
            let mut cfg = CrossConfig::new(plan.l.expect("checked"), seed);
            if let Some(d) = plan.delta {
                cfg.delta = d;
            }
            if let Some(s) = plan.max_sweeps {
                cfg.max_sweeps = s;
            }
            cfg.probe = plan.probe;
            let (f, mut rep) = cross_approx(w, &cfg)?;
            rep.rel_err_exact = exact(&|| relative(w, &f))?;
            rep
        }
    };
    rep.input = plan.input.label();
    Ok(rep)
}

/// One report per seed, in seed order. Stops at the first numerical error.
pub fn run_approx(plan: &ApproxPlan) -> CliResult<Vec<Report>> {
    let loaded = Loaded::new(&plan.input)?;
    check_approx(plan, loaded.shape())?;
    plan.output
        .seeds
        .par_iter()
        .map(|&seed| {
            let w = loaded.matrix(seed)?;
            approx_one(plan, &w, seed).map_err(CliError::from)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

fn genp_one(plan: &GenpPlan, a: &Matrix, seed: u64) -> fastcur::Result<GenpReport> {
    let n = a.rows();
    let rhs = vec![1.0; n];
    let start = Instant::now();
    let mut rep = GenpReport {
        mode: match plan.mode {
            GenpMode::Genp => "genp",
            GenpMode::Block => "block",
            GenpMode::Preprocessed => "preprocessed",
        }
        .into(),
        input: plan.input.label(),
        n,
        block: None,
        multiplier: None,
        b: None,
        seed,
        ok: false,
        failed_at: None,
        growth: None,
        residual: None,
        flops: 0,
        wall_ms: 0.0,
        retries: 0,
    };
    let factored = |lu: fastcur::Result<LuFactors>, rep: &mut GenpReport| -> fastcur::Result<()> {
        match lu {
            Ok(lu) => {
                let x = lu.solve(&rhs)?;
                rep.ok = true;
                rep.growth = Some(lu.growth);
                rep.residual = Some(solve_residual(a, &x, &rhs)?);
                Ok(())
            }
            Err(Error::ZeroPivot { step, .. }) => {
                rep.failed_at = Some(step);
                Ok(())
            }
            Err(Error::SingularBlock { panel, .. }) => {
                rep.failed_at = Some(panel);
                Ok(())
            }
            // overflow during elimination is a failed run, not a crash
            Err(Error::NonFinite(_)) => Ok(()),
            Err(e) => Err(e),
        }
    };
    let (res, count) = flops::measure(|| -> fastcur::Result<()> {
        match plan.mode {
            GenpMode::Genp => factored(genp(a, plan.pivot_tol), &mut rep),
            GenpMode::Block => {
                rep.block = plan.block;
                factored(
                    block_ge(a, plan.block.expect("checked"), plan.pivot_tol),
                    &mut rep,
                )
            }
            GenpMode::Preprocessed => {
                let label = if plan.left == plan.right {
                    plan.left.label()
                } else {
                    format!("{}|{}", plan.left.label(), plan.right.label())
                };
                rep.multiplier = Some(label);
                rep.b = plan.left.factors().or(plan.right.factors());
                match genp_preprocessed(a, &rhs, &plan.left, &plan.right, plan.pivot_tol, seed) {
                    Ok(s) => {
                        rep.ok = true;
                        rep.growth = Some(s.growth);
                        rep.retries = s.retries;
                        rep.residual = Some(solve_residual(a, &s.x, &rhs)?);
                    }
                    Err(Error::ZeroPivot { step, .. }) => {
                        rep.retries = 1;
                        rep.failed_at = Some(step);
                    }
                    Err(Error::NonFinite(_)) => rep.retries = 1,
                    Err(e) => return Err(e),
                }
                Ok(())
            }
        }
    });
    res?;
    rep.flops = count;
    rep.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rep)
}

pub fn run_genp(plan: &GenpPlan) -> CliResult<Vec<GenpReport>> {
    let loaded = Loaded::new(&plan.input)?;
    let (m, n) = loaded.shape();
    if m != n {
        return Err(CliError::Usage(format!(
            "genp needs a square input, got {m}x{n}"
        )));
    }
    if let Some(b) = plan.block {
        if b == 0 || b > n {
            return Err(CliError::Usage(format!("--block must be in 1..={n}")));
        }
    }
    plan.output
        .seeds
        .par_iter()
        .map(|&seed| {
            let a = loaded.matrix(seed)?;
            genp_one(plan, &a, seed).map_err(CliError::from)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}
