//! Sublinear-cost CUR and low-rank approximation, maxvol skeleton
//! selection, randomized multipliers, and pivot-free Gaussian elimination.
//!
//! Every public constructor validates its input; every kernel reports its
//! multiply-add count to [`flops`].

pub mod cur;
pub mod elimination;
pub mod error;
pub mod flops;
pub mod inputs;
pub mod kernels;
pub mod matrix;
pub mod preprocess;
pub mod report;
pub mod rng;
pub mod selection;
pub mod twostage;

pub use cur::{
    error_exact, error_sampled, sampled_errors, Approximation, CurFactors, Norm, SampledError,
};
pub use elimination::{
    block_ge, genp, genp_preprocessed, solve_residual, LuFactors, PreprocessedSolve,
};
pub use error::{Error, Result};
pub use inputs::{read_matrix_market, write_matrix_market, GeneratorSpec};
pub use matrix::Matrix;
pub use preprocess::{
    apply_mult, preprocessed_cur, solve_mult, LowRankFactors, Multiplier, MultiplierConfig,
    MultiplierKind, MultiplierSpec, Permute, Side, SparseVec,
};
pub use report::{GenpReport, Report};
pub use selection::{maxvol, select_rc, IndexSet, Maxvol, RcSelection};
pub use twostage::{
    adaptive_cur, cross_approx, two_stage_cur, AdaptiveConfig, CrossConfig, TwoStageConfig,
};
