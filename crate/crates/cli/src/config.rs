//! JSON run configs, merged with flags into fully resolved plans.

use std::path::{Path, PathBuf};

use fastcur::{GeneratorSpec, MultiplierConfig, Permute};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::args::{Algorithm, ApproxArgs, GenpArgs, GenpMode, InputArgs, OutFormat, OutputArgs};
use crate::error::{CliError, CliResult};
use crate::seeds::parse_seeds;

pub const OUT_DIR_ENV: &str = "FASTCUR_OUT_DIR";

/// Generator given either as an object or as shorthand text.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum GenRepr {
    Spec(GeneratorSpec),
    Text(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum MultRepr {
    Spec(MultiplierConfig),
    Text(String),
}

#[derive(Debug, Default)]
struct FileInput {
    generator: Option<GenRepr>,
    input: Option<PathBuf>,
}

#[derive(Debug, Default)]
struct FileOutput {
    seeds: Option<Vec<u64>>,
    out: Option<OutFormat>,
    out_dir: Option<PathBuf>,
    name: Option<String>,
}

// serde's `flatten` cannot be combined with `deny_unknown_fields`, so the
// shared fields are repeated in each file struct and split out here.
macro_rules! split_common {
    ($f:expr) => {
        (
            FileInput {
                generator: $f.generator,
                input: $f.input,
            },
            FileOutput {
                seeds: $f.seeds,
                out: $f.out,
                out_dir: $f.out_dir,
                name: $f.name,
            },
        )
    };
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproxFile {
    #[serde(rename = "gen")]
    generator: Option<GenRepr>,
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    alg: Option<Algorithm>,
    k: Option<usize>,
    l: Option<usize>,
    r: Option<usize>,
    probe: Option<usize>,
    tol: Option<f64>,
    target: Option<f64>,
    max_level: Option<usize>,
    delta: Option<f64>,
    max_sweeps: Option<usize>,
    left: Option<MultRepr>,
    right: Option<MultRepr>,
    exact: Option<bool>,
    #[serde(default, deserialize_with = "crate::seeds::deserialize")]
    seeds: Option<Vec<u64>>,
    out: Option<OutFormat>,
    out_dir: Option<PathBuf>,
    name: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenpFile {
    #[serde(rename = "gen")]
    generator: Option<GenRepr>,
    #[serde(rename = "in")]
    input: Option<PathBuf>,
    mode: Option<GenpMode>,
    block: Option<usize>,
    left: Option<MultRepr>,
    right: Option<MultRepr>,
    pivot_tol: Option<f64>,
    #[serde(default, deserialize_with = "crate::seeds::deserialize")]
    seeds: Option<Vec<u64>>,
    out: Option<OutFormat>,
    out_dir: Option<PathBuf>,
    name: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Generator(GeneratorSpec),
    File(PathBuf),
}

impl InputSource {
    /// The label written into every report.
    pub fn label(&self) -> String {
        match self {
            InputSource::Generator(g) => g.to_string(),
            InputSource::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputPlan {
    pub seeds: Vec<u64>,
    pub format: OutFormat,
    pub dir: PathBuf,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxPlan {
    pub input: InputSource,
    pub alg: Algorithm,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub r: Option<usize>,
    pub probe: Option<usize>,
    pub tol: Option<f64>,
    pub target: Option<f64>,
    pub max_level: Option<usize>,
    pub delta: Option<f64>,
    pub max_sweeps: Option<usize>,
    pub left: MultiplierConfig,
    pub right: MultiplierConfig,
    pub exact: bool,
    pub output: OutputPlan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenpPlan {
    pub input: InputSource,
    pub mode: GenpMode,
    pub block: Option<usize>,
    pub left: MultiplierConfig,
    pub right: MultiplierConfig,
    pub pivot_tol: f64,
    pub output: OutputPlan,
}

/// `gaussian`, `identity`, `bidiagB` (no permutations) or `bidiagBp`
/// (interleaved permutations).
pub fn parse_multiplier(s: &str) -> CliResult<MultiplierConfig> {
    let bad = || {
        CliError::Usage(format!(
            "invalid multiplier `{s}` (gaussian, identity, bidiagB or bidiagBp)"
        ))
    };
    match s {
        "gaussian" => Ok(MultiplierConfig::gaussian()),
        "identity" => Ok(MultiplierConfig::identity()),
        _ => {
            let rest = s.strip_prefix("bidiag").ok_or_else(bad)?;
            let (digits, permute) = match rest.strip_suffix('p') {
                Some(d) => (d, Permute::Interleaved),
                None => (rest, Permute::None),
            };
            let b = digits.parse().map_err(|_| bad())?;
            Ok(MultiplierConfig::bidiag(b, permute))
        }
    }
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn resolve_input(flags: &InputArgs, file: FileInput) -> CliResult<InputSource> {
    if let Some(g) = &flags.generator {
        return Ok(InputSource::Generator(g.parse()?));
    }
    if let Some(p) = &flags.input {
        return Ok(InputSource::File(p.clone()));
    }
    match (file.generator, file.input) {
        (Some(_), Some(_)) => Err(CliError::Usage("config sets both `gen` and `in`".into())),
        (Some(GenRepr::Spec(g)), None) => {
            g.validate()?;
            Ok(InputSource::Generator(g))
        }
        (Some(GenRepr::Text(t)), None) => Ok(InputSource::Generator(t.parse()?)),
        (None, Some(p)) => Ok(InputSource::File(p)),
        (None, None) => Err(CliError::Usage(
            "an input is required (--gen SPEC or --in PATH)".into(),
        )),
    }
}

fn resolve_mult(
    flag: Option<&str>,
    file: Option<MultRepr>,
    default: MultiplierConfig,
) -> CliResult<MultiplierConfig> {
    match (flag, file) {
        (Some(s), _) => parse_multiplier(s),
        (None, Some(MultRepr::Text(s))) => parse_multiplier(&s),
        (None, Some(MultRepr::Spec(m))) => Ok(m),
        (None, None) => Ok(default),
    }
}

/// Seeds are required for generated inputs. A file input is deterministic
/// apart from the algorithm's own sampling and defaults to seed 0.
fn resolve_output(
    flags: &OutputArgs,
    file: FileOutput,
    input: &InputSource,
    default_name: &str,
) -> CliResult<OutputPlan> {
    let seeds = match (&flags.seeds, file.seeds) {
        (Some(s), _) => parse_seeds(s)?,
        (None, Some(v)) => v,
        (None, None) => match input {
            InputSource::File(_) => vec![0],
            InputSource::Generator(_) => {
                return Err(CliError::Usage(
                    "--seeds is required for generated inputs".into(),
                ));
            }
        },
    };
    let dir = flags
        .out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or(file.out_dir)
        .unwrap_or_else(|| PathBuf::from("."));
    let name = flags
        .name
        .clone()
        .or(file.name)
        .unwrap_or_else(|| default_name.to_string());
    if name.is_empty() || name.contains(['/', '\\']) {
        return Err(CliError::Usage(format!("invalid output name `{name}`")));
    }
    Ok(OutputPlan {
        seeds,
        format: flags.out.or(file.out).unwrap_or(OutFormat::Both),
        dir,
        name,
    })
}

fn positive(name: &str, v: Option<f64>) -> CliResult<Option<f64>> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(CliError::Usage(format!(
            "--{name} must be a positive number"
        ))),
        _ => Ok(v),
    }
}

pub fn approx_plan(a: &ApproxArgs) -> CliResult<ApproxPlan> {
    let f: ApproxFile = read_config(a.config.as_deref())?;
    let (fin, fout) = split_common!(f);
    let input = resolve_input(&a.input, fin)?;
    let output = resolve_output(&a.output, fout, &input, "approx")?;
    let alg = a.alg.or(f.alg).ok_or_else(|| {
        CliError::Usage("--alg is required (twostage, adaptive, cross, preprocessed)".into())
    })?;
    let gaussian = MultiplierConfig::gaussian();
    Ok(ApproxPlan {
        input,
        alg,
        k: a.k.or(f.k),
        l: a.l.or(f.l),
        r: a.r.or(f.r),
        probe: a.probe.or(f.probe),
        tol: a.tol.or(f.tol),
        target: positive("target", a.target.or(f.target))?,
        max_level: a.max_level.or(f.max_level),
        delta: a.delta.or(f.delta),
        max_sweeps: a.max_sweeps.or(f.max_sweeps),
        left: resolve_mult(a.left.as_deref(), f.left, gaussian)?,
        right: resolve_mult(a.right.as_deref(), f.right, gaussian)?,
        exact: if a.no_exact {
            false
        } else {
            f.exact.unwrap_or(true)
        },
        output,
    })
}

pub fn genp_plan(a: &GenpArgs) -> CliResult<GenpPlan> {
    let f: GenpFile = read_config(a.config.as_deref())?;
    let (fin, fout) = split_common!(f);
    let input = resolve_input(&a.input, fin)?;
    let output = resolve_output(&a.output, fout, &input, "genp")?;
    let mode = a.mode.or(f.mode).unwrap_or(GenpMode::Genp);
    let block = a.block.or(f.block);
    if mode == GenpMode::Block && block.is_none() {
        return Err(CliError::Usage(
            "--block is required with --mode block".into(),
        ));
    }
    let gaussian = MultiplierConfig::gaussian();
    Ok(GenpPlan {
        input,
        mode,
        block,
        left: resolve_mult(a.left.as_deref(), f.left, gaussian)?,
        right: resolve_mult(a.right.as_deref(), f.right, gaussian)?,
        pivot_tol: positive("pivot-tol", a.pivot_tol.or(f.pivot_tol))?
            .unwrap_or(fastcur::elimination::DEFAULT_PIVOT_TOL),
        output,
    })
}
