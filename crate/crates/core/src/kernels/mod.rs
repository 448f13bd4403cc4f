//! Dense linear-algebra primitives. All of them report their multiply-add
//! pairs to [`crate::flops`].

mod lu;
mod norm;
mod qr;
mod svd;

pub use lu::{volume, Lu};
pub use norm::spectral_norm_est;
pub use qr::{pivot_columns, qr_cp, Pivots, QrCp};
pub use svd::{pinv_trunc, singular_values, svd, truncated_svd, Svd, TruncatedSvd};
