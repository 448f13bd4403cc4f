//! Random multipliers and the preprocessed CUR pipeline.
//!
//! A bidiagonal-product multiplier of length `b` is
//! `F = P_{b-1} B_{b-1} ... P_0 B_0`, where `B_t` is unit lower bidiagonal
//! for even `t` and unit upper bidiagonal for odd `t`, with standard normal
//! off-diagonals, and each `P_t` is either the identity or a uniform
//! permutation. Applying `F` to a vector applies `B_0` first.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cur::{sampled_errors, Approximation};
use crate::error::{Error, Result};
use crate::flops;
use crate::kernels::{pinv_trunc, Lu};
use crate::matrix::Matrix;
use crate::report::Report;
use crate::rng::{self, stream};
use crate::selection::select_rc;
use crate::twostage::{sample_block, TwoStageConfig};

/// Factor count used when a bidiagonal multiplier is requested without one.
pub const DEFAULT_B: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    Gaussian,
    BidiagProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Permute {
    #[default]
    None,
    Interleaved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Lower,
    Upper,
}

/// Multiplier recipe without dimension or seed, as used in run configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierConfig {
    pub kind: MultiplierKind,
    #[serde(default)]
    pub b: usize,
    #[serde(default)]
    pub permute: Permute,
}

impl MultiplierConfig {
    pub fn gaussian() -> Self {
        Self {
            kind: MultiplierKind::Gaussian,
            b: 0,
            permute: Permute::None,
        }
    }

    pub fn bidiag(b: usize, permute: Permute) -> Self {
        Self {
            kind: MultiplierKind::BidiagProduct,
            b,
            permute,
        }
    }

    /// The `b = 0` product, i.e. no preprocessing.
    pub fn identity() -> Self {
        Self::bidiag(0, Permute::None)
    }

    /// `b` for bidiagonal products, `None` for Gaussian.
    pub fn factors(&self) -> Option<usize> {
        match self.kind {
            MultiplierKind::Gaussian => None,
            MultiplierKind::BidiagProduct => Some(self.b),
        }
    }

    pub fn label(&self) -> String {
        match (self.kind, self.permute) {
            (MultiplierKind::Gaussian, _) => "gaussian".into(),
            (MultiplierKind::BidiagProduct, Permute::None) => format!("bidiag{}", self.b),
            (MultiplierKind::BidiagProduct, Permute::Interleaved) => format!("bidiag{}p", self.b),
        }
    }
}

/// Serialized form of a multiplier. Factors regenerate from the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub kind: MultiplierKind,
    pub n: usize,
    pub b: usize,
    pub seed: u64,
    pub permute: Permute,
}

#[derive(Debug, Clone, PartialEq)]
struct Perm {
    /// `P e_i = e_{fwd[i]}`
    fwd: Vec<usize>,
    inv: Vec<usize>,
}

impl Perm {
    fn new(fwd: Vec<usize>) -> Self {
        let mut inv = vec![0; fwd.len()];
        for (i, &p) in fwd.iter().enumerate() {
            inv[p] = i;
        }
        Self { fwd, inv }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    orientation: Orientation,
    /// Length `n - 1`; entry `t` sits at `(t+1, t)` (lower) or `(t, t+1)`
    /// (upper).
    off: Vec<f64>,
    perm: Option<Perm>,
}

impl Factor {
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }
    /// The permutation applied after this factor, as `P e_i = e_{p[i]}`.
    pub fn permutation(&self) -> Option<&[usize]> {
        self.perm.as_ref().map(|p| p.fwd.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Body {
    Dense(Matrix),
    Factors(Vec<Factor>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    spec: MultiplierSpec,
    body: Body,
}

/// Sparse vector with ascending, distinct indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVec {
    pub len: usize,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseVec {
    pub fn unit(len: usize, i: usize) -> Self {
        Self {
            len,
            indices: vec![i],
            values: vec![1.0],
        }
    }

    fn from_map(len: usize, map: BTreeMap<usize, f64>) -> Self {
        let (indices, values) = map.into_iter().unzip();
        Self {
            len,
            indices,
            values,
        }
    }

    fn from_dense(v: Vec<f64>) -> Self {
        Self {
            len: v.len(),
            indices: (0..v.len()).collect(),
            values: v,
        }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.len];
        for (&i, &x) in self.indices.iter().zip(&self.values) {
            v[i] = x;
        }
        v
    }

    fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }
}

impl Multiplier {
    /// Dense `n x n` standard normal matrix, drawn in column-major order.
    pub fn gaussian(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty { rows: 0, cols: 0 });
        }
        let mut g = rng::rng(seed);
        let mut data = vec![0.0; n * n];
        for j in 0..n {
            for i in 0..n {
                data[i * n + j] = rng::normal(&mut g);
            }
        }
        Ok(Self {
            spec: MultiplierSpec {
                kind: MultiplierKind::Gaussian,
                n,
                b: 0,
                seed,
                permute: Permute::None,
            },
            body: Body::Dense(Matrix::new(n, n, data)?),
        })
    }

    /// Product of `b` random unit bidiagonal factors. Each factor draws its
    /// `n - 1` off-diagonals and then, if interleaved, its permutation.
    pub fn bidiagonal_product(n: usize, b: usize, seed: u64, permute: Permute) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty { rows: 0, cols: 0 });
        }
        let mut g = rng::rng(seed);
        let factors = (0..b)
            .map(|t| {
                let off = rng::normals(&mut g, n - 1);
                let perm = match permute {
                    Permute::None => None,
                    Permute::Interleaved => Some(Perm::new(rng::permutation(&mut g, n))),
                };
                Factor {
                    orientation: if t % 2 == 0 {
                        Orientation::Lower
                    } else {
                        Orientation::Upper
                    },
                    off,
                    perm,
                }
            })
            .collect();
        Ok(Self {
            spec: MultiplierSpec {
                kind: MultiplierKind::BidiagProduct,
                n,
                b,
                seed,
                permute,
            },
            body: Body::Factors(factors),
        })
    }

    pub fn generate(spec: &MultiplierSpec) -> Result<Self> {
        match spec.kind {
            MultiplierKind::Gaussian => Self::gaussian(spec.n, spec.seed),
            MultiplierKind::BidiagProduct => {
                Self::bidiagonal_product(spec.n, spec.b, spec.seed, spec.permute)
            }
        }
    }

    pub fn from_config(cfg: &MultiplierConfig, n: usize, seed: u64) -> Result<Self> {
        Self::generate(&MultiplierSpec {
            kind: cfg.kind,
            n,
            b: cfg.b,
            seed,
            permute: cfg.permute,
        })
    }

    pub fn spec(&self) -> &MultiplierSpec {
        &self.spec
    }
    pub fn dim(&self) -> usize {
        self.spec.n
    }
    pub fn kind(&self) -> MultiplierKind {
        self.spec.kind
    }

    /// Bidiagonal factors in application order; empty for Gaussian.
    pub fn factors(&self) -> &[Factor] {
        match &self.body {
            Body::Factors(f) => f,
            Body::Dense(_) => &[],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("multiplier spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: MultiplierSpec =
            serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Self::generate(&spec)
    }

    /// Dense `n x n` form; for tests and small problems.
    pub fn to_dense(&self) -> Result<Matrix> {
        match &self.body {
            Body::Dense(d) => Ok(d.clone()),
            Body::Factors(_) => self.apply(&Matrix::identity(self.dim())?, Side::Left),
        }
    }

    fn check(&self, x: &Matrix, side: Side, op: &'static str) -> Result<()> {
        let n = self.dim();
        let ok = match side {
            Side::Left => x.rows() == n,
            Side::Right => x.cols() == n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::dims(op, (n, n), x.shape()))
        }
    }

    /// `M X` (left) or `X M` (right).
    pub fn apply(&self, x: &Matrix, side: Side) -> Result<Matrix> {
        self.check(x, side, "apply multiplier")?;
        match (&self.body, side) {
            (Body::Dense(d), Side::Left) => d.matmul(x),
            (Body::Dense(d), Side::Right) => x.matmul(d),
            (Body::Factors(fs), Side::Left) => {
                // columns of X become rows of the transpose
                let mut t = x.transpose();
                for f in fs {
                    rows_apply(&mut t, f, false);
                }
                Matrix::checked(t.rows(), t.cols(), t.into_data(), "apply multiplier")
                    .map(|m| m.transpose())
            }
            (Body::Factors(fs), Side::Right) => {
                // rows of X M are M^T applied to rows of X
                let mut t = x.clone();
                for f in fs.iter().rev() {
                    rows_apply_transposed(&mut t, f, false);
                }
                Matrix::checked(t.rows(), t.cols(), t.into_data(), "apply multiplier")
            }
        }
    }

    /// `M^{-1} X` (left) or `X M^{-1}` (right).
    pub fn solve(&self, x: &Matrix, side: Side) -> Result<Matrix> {
        self.check(x, side, "solve multiplier")?;
        match (&self.body, side) {
            (Body::Dense(d), _) => {
                let lu = Lu::factor(d)?;
                if lu.is_numerically_singular() {
                    return Err(Error::Singular);
                }
                match side {
                    Side::Left => lu.solve(x),
                    Side::Right => lu.solve_right(x),
                }
            }
            (Body::Factors(fs), Side::Left) => {
                let mut t = x.transpose();
                for f in fs.iter().rev() {
                    rows_apply(&mut t, f, true);
                }
                Matrix::checked(t.rows(), t.cols(), t.into_data(), "solve multiplier")
                    .map(|m| m.transpose())
            }
            (Body::Factors(fs), Side::Right) => {
                let mut t = x.clone();
                for f in fs {
                    rows_apply_transposed(&mut t, f, true);
                }
                Matrix::checked(t.rows(), t.cols(), t.into_data(), "solve multiplier")
            }
        }
    }

    /// Column `j` of a bidiagonal product, propagated sparsely through the
    /// factors. Gaussian multipliers are dense and are refused.
    pub fn sparse_col(&self, j: usize) -> Result<SparseVec> {
        let fs = self.require_factors("sparse_col")?;
        self.check_index(j)?;
        let n = self.dim();
        let mut v: BTreeMap<usize, f64> = BTreeMap::from([(j, 1.0)]);
        for f in fs {
            v = sparse_factor(&v, f, n, false);
            if let Some(p) = &f.perm {
                v = v.into_iter().map(|(i, x)| (p.fwd[i], x)).collect();
            }
        }
        Ok(SparseVec::from_map(n, v))
    }

    /// Row `i` of a bidiagonal product, i.e. `M^T e_i`.
    pub fn sparse_row(&self, i: usize) -> Result<SparseVec> {
        let fs = self.require_factors("sparse_row")?;
        self.check_index(i)?;
        let n = self.dim();
        let mut v: BTreeMap<usize, f64> = BTreeMap::from([(i, 1.0)]);
        for f in fs.iter().rev() {
            if let Some(p) = &f.perm {
                v = v.into_iter().map(|(k, x)| (p.inv[k], x)).collect();
            }
            v = sparse_factor(&v, f, n, true);
        }
        Ok(SparseVec::from_map(n, v))
    }

    fn require_factors(&self, op: &'static str) -> Result<&[Factor]> {
        match &self.body {
            Body::Factors(f) => Ok(f),
            Body::Dense(_) => Err(Error::Unsupported(match op {
                "sparse_col" => "sparse_col on a dense Gaussian multiplier",
                _ => "sparse_row on a dense Gaussian multiplier",
            })),
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.dim() {
            return Err(Error::OutOfRange {
                what: "multiplier index",
                value: i,
                expected: format!("< {}", self.dim()),
            });
        }
        Ok(())
    }

    /// Row `i`, dense Gaussian rows included.
    fn row_any(&self, i: usize) -> Result<SparseVec> {
        match &self.body {
            Body::Dense(d) => Ok(SparseVec::from_dense(d.row(i).to_vec())),
            Body::Factors(_) => self.sparse_row(i),
        }
    }

    fn col_any(&self, j: usize) -> Result<SparseVec> {
        match &self.body {
            Body::Dense(d) => Ok(SparseVec::from_dense(d.col(j))),
            Body::Factors(_) => self.sparse_col(j),
        }
    }
}

pub fn apply_mult(m: &Multiplier, x: &Matrix, side: Side) -> Result<Matrix> {
    m.apply(x, side)
}

pub fn solve_mult(m: &Multiplier, x: &Matrix, side: Side) -> Result<Matrix> {
    m.solve(x, side)
}

/// Applies `B`, then the permutation, to every row of `t` (each row taken as
/// a column vector). With `inverse`, undoes the permutation and then solves
/// with `B`.
fn rows_apply(t: &mut Matrix, f: &Factor, inverse: bool) {
    let n = t.cols();
    let rows = t.rows();
    let data = t.data_mut();
    let mut tmp = vec![0.0; n];
    for row in data.chunks_mut(n) {
        if inverse {
            if let Some(p) = &f.perm {
                // y = P^T x: y_i = x_{p(i)}
                for i in 0..n {
                    tmp[i] = row[p.fwd[i]];
                }
                row.copy_from_slice(&tmp);
            }
            bidiag_vec(row, f, false, true);
        } else {
            bidiag_vec(row, f, false, false);
            if let Some(p) = &f.perm {
                for i in 0..n {
                    tmp[p.fwd[i]] = row[i];
                }
                row.copy_from_slice(&tmp);
            }
        }
    }
    flops::add((rows * n.saturating_sub(1)) as u64);
}

/// Same as [`rows_apply`] for the transposed factor: applies `P^T`, then
/// `B^T` (or, with `inverse`, solves with `B^T` and then applies `P`).
fn rows_apply_transposed(t: &mut Matrix, f: &Factor, inverse: bool) {
    let n = t.cols();
    let rows = t.rows();
    let data = t.data_mut();
    let mut tmp = vec![0.0; n];
    for row in data.chunks_mut(n) {
        if inverse {
            bidiag_vec(row, f, true, true);
            if let Some(p) = &f.perm {
                for i in 0..n {
                    tmp[p.fwd[i]] = row[i];
                }
                row.copy_from_slice(&tmp);
            }
        } else {
            if let Some(p) = &f.perm {
                for i in 0..n {
                    tmp[i] = row[p.fwd[i]];
                }
                row.copy_from_slice(&tmp);
            }
            bidiag_vec(row, f, true, false);
        }
    }
    flops::add((rows * n.saturating_sub(1)) as u64);
}

/// In-place `x <- B x`, `B^T x`, `B^{-1} x` or `B^{-T} x` for a unit
/// bidiagonal `B`.
fn bidiag_vec(x: &mut [f64], f: &Factor, transposed: bool, inverse: bool) {
    let n = x.len();
    if n < 2 {
        return;
    }
    let lower = (f.orientation == Orientation::Lower) != transposed;
    let c = &f.off;
    match (lower, inverse) {
        // y_i = x_i + c_{i-1} x_{i-1}
        (true, false) => {
            for i in (1..n).rev() {
                x[i] += c[i - 1] * x[i - 1];
            }
        }
        (true, true) => {
            for i in 1..n {
                x[i] -= c[i - 1] * x[i - 1];
            }
        }
        // y_i = x_i + c_i x_{i+1}
        (false, false) => {
            for i in 0..n - 1 {
                x[i] += c[i] * x[i + 1];
            }
        }
        (false, true) => {
            for i in (0..n - 1).rev() {
                x[i] -= c[i] * x[i + 1];
            }
        }
    }
}

fn sparse_factor(
    v: &BTreeMap<usize, f64>,
    f: &Factor,
    n: usize,
    transposed: bool,
) -> BTreeMap<usize, f64> {
    let lower = (f.orientation == Orientation::Lower) != transposed;
    let mut out = BTreeMap::new();
    for (&i, &x) in v {
        *out.entry(i).or_insert(0.0) += x;
        if lower && i + 1 < n {
            *out.entry(i + 1).or_insert(0.0) += f.off[i] * x;
        } else if !lower && i >= 1 {
            *out.entry(i - 1).or_insert(0.0) += f.off[i - 1] * x;
        }
    }
    flops::add(v.len() as u64);
    out
}

/// `A B` with `A` m x r and `B` r x n; the output format of preprocessed
/// runs.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactors {
    pub a: Matrix,
    pub b: Matrix,
}

impl LowRankFactors {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if a.cols() != b.rows() {
            return Err(Error::dims("low-rank factors", a.shape(), b.shape()));
        }
        Ok(Self { a, b })
    }

    pub fn rank(&self) -> usize {
        self.a.cols()
    }

    pub fn product(&self) -> Result<Matrix> {
        self.a.matmul(&self.b)
    }
}

impl Approximation for LowRankFactors {
    fn shape(&self) -> (usize, usize) {
        (self.a.rows(), self.b.cols())
    }

    fn column(&self, _w: &Matrix, j: usize) -> Result<Vec<f64>> {
        if j >= self.b.cols() {
            return Err(Error::OutOfRange {
                what: "column",
                value: j,
                expected: format!("< {}", self.b.cols()),
            });
        }
        self.a.matvec(&self.b.col(j))
    }

    fn to_dense(&self, _w: &Matrix) -> Result<Matrix> {
        self.product()
    }
}

/// `sum_p sum_q x_p W[p, q] y_q`.
/// `x^T W` for a sparse `x`.
fn sparse_row_times(w: &Matrix, x: &SparseVec) -> Vec<f64> {
    let mut out = vec![0.0; w.cols()];
    for (p, xp) in x.iter() {
        for (o, &v) in out.iter_mut().zip(w.row(p)) {
            *o += xp * v;
        }
    }
    flops::add((w.cols() * x.nnz()) as u64);
    out
}

fn bilinear(w: &Matrix, x: &SparseVec, y: &SparseVec) -> f64 {
    let mut s = 0.0;
    for (p, xp) in x.iter() {
        let row = w.row(p);
        let mut t = 0.0;
        for (q, yq) in y.iter() {
            t += row[q] * yq;
        }
        s += xp * t;
    }
    flops::add((x.nnz() * (y.nnz() + 1)) as u64);
    s
}

/// CUR on `W' = F W H` without forming `W'`, returned as factors of `W`.
///
/// The sampled block `W'[I0, J0]` is assembled from rows of `F` and columns
/// of `H`; selection runs on it exactly as in [`crate::twostage::two_stage_cur`].
/// With `W' ~ C' U' R'`, `C' = F W H[:, J]` and `R' = F[I, :] W H`, so
/// `W ~ F^{-1} C' U' R' H^{-1} = (W H[:, J] U') (F[I, :] W)`; no multiplier
/// is ever inverted.
pub fn preprocessed_cur(
    w: &Matrix,
    cfg: &TwoStageConfig,
    left: &MultiplierConfig,
    right: &MultiplierConfig,
) -> Result<(LowRankFactors, Report)> {
    let (m, n) = w.shape();
    cfg.validate((m, n))?;
    let start = Instant::now();
    let (out, total) = flops::measure(|| -> Result<_> {
        let f = Multiplier::from_config(left, m, rng::derive(cfg.seed, stream::LEFT_MULTIPLIER))?;
        let h = Multiplier::from_config(right, n, rng::derive(cfg.seed, stream::RIGHT_MULTIPLIER))?;
        let (i0, j0) = sample_block(m, n, cfg.k, cfg.l, cfg.seed);
        let frows = i0
            .iter()
            .map(|&i| f.row_any(i))
            .collect::<Result<Vec<_>>>()?;
        let hcols = j0
            .iter()
            .map(|&j| h.col_any(j))
            .collect::<Result<Vec<_>>>()?;

        // Per-entry bilinear forms cost (sum nnz F rows)(sum nnz H cols); once
        // the supports are dense it is cheaper to form F[I0, :] W first.
        let nnz_f: usize = frows.iter().map(SparseVec::nnz).sum();
        let nnz_h: usize = hcols.iter().map(SparseVec::nnz).sum();
        let row_first = nnz_f * n + cfg.k * nnz_h < nnz_f * nnz_h;
        let fw0 = if row_first {
            Some(
                frows
                    .iter()
                    .map(|fr| sparse_row_times(w, fr))
                    .collect::<Vec<_>>(),
            )
        } else {
            None
        };
        let mut block = vec![0.0; cfg.k * cfg.l];
        for (a, fr) in frows.iter().enumerate() {
            for (b, hc) in hcols.iter().enumerate() {
                block[a * cfg.l + b] = match &fw0 {
                    Some(rows) => {
                        flops::add(hc.nnz() as u64);
                        hc.iter().map(|(q, y)| rows[a][q] * y).sum()
                    }
                    None => bilinear(w, fr, hc),
                };
            }
        }
        let block = Matrix::checked(cfg.k, cfg.l, block, "preprocessed sample")?;

        let (sel, stage1) = flops::measure(|| select_rc(&block, cfg.r));
        let sel = sel?;
        let ri = sel.rows.as_slice();
        let cj = sel.cols.as_slice();
        let r = cfg.r.min(ri.len());
        let u = pinv_trunc(&block.select(ri, cj)?, r, cfg.tol)?;

        // W H[:, J]: m x |J|
        let mut wh = vec![0.0; m * cj.len()];
        for (c, &jl) in cj.iter().enumerate() {
            let hc = &hcols[jl];
            for i in 0..m {
                let row = w.row(i);
                wh[i * cj.len() + c] = hc.iter().map(|(q, y)| row[q] * y).sum();
            }
            flops::add((m * hc.nnz()) as u64);
        }
        let a = Matrix::checked(m, cj.len(), wh, "preprocessed C")?.matmul(&u)?;

        // F[I, :] W: |I| x n
        let mut fw = Vec::with_capacity(ri.len() * n);
        for &il in ri {
            match &fw0 {
                Some(rows) => fw.extend_from_slice(&rows[il]),
                None => fw.extend(sparse_row_times(w, &frows[il])),
            }
        }
        let b = Matrix::checked(ri.len(), n, fw, "preprocessed R")?;
        let lr = LowRankFactors::new(a, b)?;
        let est = sampled_errors(w, &lr, cfg.probe, cfg.seed)?;
        Ok((lr, sel.rank_deficient, stage1, est.relative()))
    });
    let (lr, rank_deficient, stage1, rel) = out?;
    let mut rep = Report::new("preprocessed", (m, n), cfg.seed);
    rep.k = cfg.k;
    rep.l = cfg.l;
    rep.r = cfg.r;
    rep.b = left.factors().or(right.factors());
    rep.rel_err_sampled = rel;
    rep.flops = total;
    rep.stage1_flops = Some(stage1);
    rep.rank_deficient = rank_deficient;
    rep.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((lr, rep))
}
