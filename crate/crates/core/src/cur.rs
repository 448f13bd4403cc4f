//! CUR factors `W ~ C U R` with `C = W[:, J]`, `R = W[I, :]`.
//!
//! Only the index sets and the small middle factor are stored; `C` and `R`
//! are read from `W` on demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flops;
use crate::kernels::{pinv_trunc, spectral_norm_est};
use crate::matrix::{dot, Matrix};
use crate::rng;
use crate::selection::IndexSet;

pub const DEFAULT_TOL: f64 = 1e-10;
/// Power iterations used for exact spectral error reports.
pub const SPECTRAL_ITERS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Frobenius,
    Spectral,
}

/// Anything that can reproduce columns of an approximation of `W`.
pub trait Approximation {
    /// Shape of the approximated matrix.
    fn shape(&self) -> (usize, usize);
    /// Column `j` of the approximation.
    fn column(&self, w: &Matrix, j: usize) -> Result<Vec<f64>>;
    /// Dense approximation; O(mn) memory, validation only.
    fn to_dense(&self, w: &Matrix) -> Result<Matrix>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurFactors {
    m: usize,
    n: usize,
    rows: IndexSet,
    cols: IndexSet,
    /// l x k
    u: Matrix,
    rank: usize,
}

impl CurFactors {
    /// Builds the factors for explicit index sets. `U` is the rank-`r`
    /// truncated pseudo-inverse of the intersection `W[I, J]`.
    pub fn build(w: &Matrix, rows: &IndexSet, cols: &IndexSet, r: usize, tol: f64) -> Result<Self> {
        let (m, n) = w.shape();
        let rows = IndexSet::rows(rows.as_slice().to_vec(), m)?;
        let cols = IndexSet::cols(cols.as_slice().to_vec(), n)?;
        let (k, l) = (rows.len(), cols.len());
        if k == 0 || l == 0 {
            return Err(Error::InvalidIndexSet(
                "CUR index sets must be non-empty".into(),
            ));
        }
        if r > k.min(l) {
            return Err(Error::OutOfRange {
                what: "CUR rank",
                value: r,
                expected: format!("<= min(k, l) = {}", k.min(l)),
            });
        }
        let x = w.select(rows.as_slice(), cols.as_slice())?;
        let u = pinv_trunc(&x, r, tol)?;
        Ok(Self {
            m,
            n,
            rows,
            cols,
            u,
            rank: r,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.rows.len()
    }
    pub fn l(&self) -> usize {
        self.cols.len()
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn rows(&self) -> &IndexSet {
        &self.rows
    }
    pub fn cols(&self) -> &IndexSet {
        &self.cols
    }
    /// The l x k middle factor.
    pub fn u(&self) -> &Matrix {
        &self.u
    }

    fn check_source(&self, w: &Matrix) -> Result<()> {
        if w.shape() != (self.m, self.n) {
            return Err(Error::dims("CUR source", (self.m, self.n), w.shape()));
        }
        Ok(())
    }

    pub fn c(&self, w: &Matrix) -> Result<Matrix> {
        self.check_source(w)?;
        w.select_cols(self.cols.as_slice())
    }

    pub fn r(&self, w: &Matrix) -> Result<Matrix> {
        self.check_source(w)?;
        w.select_rows(self.rows.as_slice())
    }

    /// `C (U (R x))` touching only rows `I` and columns `J` of `W`.
    pub fn apply(&self, w: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
        self.check_source(w)?;
        if x.len() != self.n {
            return Err(Error::dims("CUR apply", (self.m, self.n), (x.len(), 1)));
        }
        let rx: Vec<f64> = self
            .rows
            .as_slice()
            .iter()
            .map(|&i| dot(w.row(i), x))
            .collect();
        flops::add((self.k() * self.n) as u64);
        let urx = self.u.matvec(&rx)?;
        let cols = self.cols.as_slice();
        let y: Vec<f64> = (0..self.m)
            .map(|i| {
                let row = w.row(i);
                cols.iter().zip(&urx).map(|(&j, &c)| row[j] * c).sum()
            })
            .collect();
        flops::add((self.m * self.l()) as u64);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("CUR apply"));
        }
        Ok(y)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CurJson::from(self)).expect("CUR factors serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: CurJson = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        j.try_into()
    }
}

impl Approximation for CurFactors {
    fn shape(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    fn column(&self, w: &Matrix, j: usize) -> Result<Vec<f64>> {
        self.check_source(w)?;
        let rj: Vec<f64> = self.rows.as_slice().iter().map(|&i| w.get(i, j)).collect();
        let urj = self.u.matvec(&rj)?;
        let cols = self.cols.as_slice();
        let out = (0..self.m)
            .map(|i| {
                let row = w.row(i);
                cols.iter().zip(&urj).map(|(&c, &v)| row[c] * v).sum()
            })
            .collect();
        flops::add((self.m * self.l()) as u64);
        Ok(out)
    }

    fn to_dense(&self, w: &Matrix) -> Result<Matrix> {
        self.c(w)?.matmul(&self.u)?.matmul(&self.r(w)?)
    }
}

/// JSON layout `{m, n, k, l, r, I, J, U}` with `U` row-major.
#[derive(Serialize, Deserialize)]
struct CurJson {
    m: usize,
    n: usize,
    k: usize,
    l: usize,
    r: usize,
    #[serde(rename = "I")]
    rows: Vec<usize>,
    #[serde(rename = "J")]
    cols: Vec<usize>,
    #[serde(rename = "U")]
    u: Vec<f64>,
}

impl From<&CurFactors> for CurJson {
    fn from(f: &CurFactors) -> Self {
        CurJson {
            m: f.m,
            n: f.n,
            k: f.k(),
            l: f.l(),
            r: f.rank,
            rows: f.rows.as_slice().to_vec(),
            cols: f.cols.as_slice().to_vec(),
            u: f.u.data().to_vec(),
        }
    }
}

impl TryFrom<CurJson> for CurFactors {
    type Error = Error;
    fn try_from(j: CurJson) -> Result<Self> {
        if j.rows.len() != j.k || j.cols.len() != j.l {
            return Err(Error::Config(
                "CUR JSON: k/l disagree with index lists".into(),
            ));
        }
        Ok(CurFactors {
            m: j.m,
            n: j.n,
            rows: IndexSet::rows(j.rows, j.m)?,
            cols: IndexSet::cols(j.cols, j.n)?,
            u: Matrix::new(j.l, j.k, j.u)?,
            rank: j.r,
        })
    }
}

/// `||W - approx||` in the requested norm. Costs O(mn) and more; use for
/// validation only.
pub fn error_exact(w: &Matrix, f: &impl Approximation, norm: Norm) -> Result<f64> {
    let e = w.sub(&f.to_dense(w)?)?;
    match norm {
        Norm::Frobenius => Ok(e.frobenius_norm()),
        Norm::Spectral => spectral_norm_est(&e, SPECTRAL_ITERS, 0),
    }
}

/// Column-sampled Frobenius estimates of the error and of `||W||_F`, both
/// from the same `s` columns drawn without replacement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledError {
    pub error: f64,
    pub norm: f64,
    pub s: usize,
}

impl SampledError {
    /// Relative error estimate; zero when both estimates vanish.
    pub fn relative(&self) -> f64 {
        if self.norm == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error / self.norm
        }
    }
}

pub fn sampled_errors(
    w: &Matrix,
    f: &impl Approximation,
    s: usize,
    seed: u64,
) -> Result<SampledError> {
    let (m, n) = w.shape();
    if f.shape() != (m, n) {
        return Err(Error::dims("error_sampled", f.shape(), (m, n)));
    }
    if s == 0 || s > n {
        return Err(Error::OutOfRange {
            what: "probe columns",
            value: s,
            expected: format!("1..={n}"),
        });
    }
    let mut g = rng::rng(rng::derive(seed, rng::stream::PROBE));
    let picks = rng::sample_sorted(&mut g, n, s);
    let mut err2 = 0.0;
    let mut norm2 = 0.0;
    for &j in &picks {
        let col = f.column(w, j)?;
        for (i, a) in col.iter().enumerate() {
            let wij = w.get(i, j);
            err2 += (wij - a) * (wij - a);
            norm2 += wij * wij;
        }
    }
    flops::add((2 * m * s) as u64);
    let scale = n as f64 / s as f64;
    Ok(SampledError {
        error: (scale * err2).sqrt(),
        norm: (scale * norm2).sqrt(),
        s,
    })
}

/// Frobenius error estimate from `s` uniformly sampled columns; exact when
/// `s = n`.
pub fn error_sampled(w: &Matrix, f: &impl Approximation, s: usize, seed: u64) -> Result<f64> {
    Ok(sampled_errors(w, f, s, seed)?.error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::select_rc;

    fn ones(m: usize, n: usize) -> Matrix {
        Matrix::from_fn(m, n, |_, _| 1.0).unwrap()
    }

    fn rank_r(m: usize, n: usize, r: usize, seed: u64) -> Matrix {
        let mut g = rng::rng(seed);
        let a = Matrix::new(m, r, rng::normals(&mut g, m * r)).unwrap();
        let b = Matrix::new(r, n, rng::normals(&mut g, r * n)).unwrap();
        a.matmul(&b).unwrap()
    }

    fn full(n: usize) -> IndexSet {
        IndexSet::rows((0..n).collect(), n).unwrap()
    }

    #[test]
    fn identity_is_reproduced() {
        let w = Matrix::identity(3).unwrap();
        let f = CurFactors::build(&w, &full(3), &full(3), 3, DEFAULT_TOL).unwrap();
        assert!(f.to_dense(&w).unwrap().sub(&w).unwrap().max_abs() < 1e-15);
        assert_eq!(error_exact(&w, &f, Norm::Frobenius).unwrap(), 0.0);
    }

    #[test]
    fn rank_one_skeleton_of_ones() {
        let w = ones(100, 100);
        let f = CurFactors::build(
            &w,
            &IndexSet::rows(vec![7], 100).unwrap(),
            &IndexSet::cols(vec![13], 100).unwrap(),
            1,
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(f.u().data(), &[1.0]);
        assert_eq!(error_exact(&w, &f, Norm::Frobenius).unwrap(), 0.0);
        let y = f.apply(&w, &vec![1.0; 100]).unwrap();
        assert!(y.iter().all(|&v| v == 100.0));
        assert!(f
            .apply(&w, &vec![0.0; 100])
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn exact_rank_reproduction() {
        let w = rank_r(200, 100, 5, 4);
        let mut g = rng::rng(1);
        let i0 = rng::sample_sorted(&mut g, 200, 20);
        let j0 = rng::sample_sorted(&mut g, 100, 20);
        let sel = select_rc(&w.select(&i0, &j0).unwrap(), 5).unwrap();
        let f = CurFactors::build(
            &w,
            &sel.rows.lift(&i0, 200).unwrap(),
            &sel.cols.lift(&j0, 100).unwrap(),
            5,
            DEFAULT_TOL,
        )
        .unwrap();
        let err = error_exact(&w, &f, Norm::Frobenius).unwrap();
        assert!(err <= 1e-10 * w.frobenius_norm(), "{err}");
    }

    #[test]
    fn zero_middle_factor_gives_full_error() {
        let w = rank_r(10, 8, 2, 2);
        let z = Matrix::zeros(5, 5).unwrap();
        // intersection of zero rows of a padded matrix yields U = 0
        let padded = Matrix::from_fn(15, 13, |i, j| {
            if i < 10 && j < 8 {
                w.get(i, j)
            } else {
                z.get(0, 0)
            }
        })
        .unwrap();
        let f = CurFactors::build(
            &padded,
            &IndexSet::rows(vec![12], 15).unwrap(),
            &IndexSet::cols(vec![11], 13).unwrap(),
            1,
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(f.u().max_abs(), 0.0);
        let e = error_exact(&padded, &f, Norm::Frobenius).unwrap();
        assert!((e - padded.frobenius_norm()).abs() < 1e-12 * e);
    }

    #[test]
    fn apply_matches_explicit_product() {
        let w = rank_r(20, 20, 4, 9)
            .add(&rank_r(20, 20, 20, 10).scale(1e-3).unwrap())
            .unwrap();
        let f = CurFactors::build(
            &w,
            &IndexSet::rows(vec![1, 5, 9, 14], 20).unwrap(),
            &IndexSet::cols(vec![0, 3, 8, 19], 20).unwrap(),
            4,
            DEFAULT_TOL,
        )
        .unwrap();
        let dense = f.to_dense(&w).unwrap();
        for j in 0..20 {
            let mut e = vec![0.0; 20];
            e[j] = 1.0;
            let y = f.apply(&w, &e).unwrap();
            let col = dense.col(j);
            let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in y.iter().zip(&col) {
                assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
            }
        }
        assert!(f.apply(&w, &[1.0; 3]).is_err());
    }

    #[test]
    fn apply_flop_bound() {
        let w = rank_r(30, 40, 3, 1);
        let f = CurFactors::build(
            &w,
            &IndexSet::rows(vec![0, 1, 2], 30).unwrap(),
            &IndexSet::cols(vec![5, 6, 7, 8], 40).unwrap(),
            3,
            DEFAULT_TOL,
        )
        .unwrap();
        let (_, fl) = flops::measure(|| f.apply(&w, &[1.0; 40]).unwrap());
        assert!(fl <= (3 * 40 + 4 * 3 + 30 * 4) as u64);
    }

    #[test]
    fn sampled_error_is_exact_with_all_columns() {
        let w = rank_r(30, 25, 3, 5)
            .add(&rank_r(30, 25, 25, 6).scale(1e-2).unwrap())
            .unwrap();
        let f = CurFactors::build(
            &w,
            &IndexSet::rows(vec![0, 4, 8], 30).unwrap(),
            &IndexSet::cols(vec![1, 2, 3], 25).unwrap(),
            3,
            DEFAULT_TOL,
        )
        .unwrap();
        let exact = error_exact(&w, &f, Norm::Frobenius).unwrap();
        let est = error_sampled(&w, &f, 25, 3).unwrap();
        assert!((exact - est).abs() <= 1e-12 * exact);
        assert!(error_sampled(&w, &f, 0, 3).is_err());
        assert!(error_sampled(&w, &f, 26, 3).is_err());
    }

    #[test]
    fn flop_count_of_build_ignores_matrix_size() {
        let small = rank_r(40, 40, 40, 3);
        let big = Matrix::from_fn(80, 80, |i, j| {
            if i < 40 && j < 40 {
                small.get(i, j)
            } else {
                1.0
            }
        })
        .unwrap();
        let rows = IndexSet::rows(vec![2, 9, 17, 30], 40).unwrap();
        let cols = IndexSet::cols(vec![1, 3, 20, 33, 39], 40).unwrap();
        let (_, f1) =
            flops::measure(|| CurFactors::build(&small, &rows, &cols, 4, DEFAULT_TOL).unwrap());
        let (_, f2) =
            flops::measure(|| CurFactors::build(&big, &rows, &cols, 4, DEFAULT_TOL).unwrap());
        assert_eq!(f1, f2);
    }

    #[test]
    fn json_layout() {
        let w = Matrix::identity(3).unwrap();
        let f = CurFactors::build(
            &w,
            &full(3),
            &IndexSet::cols(vec![0, 2], 3).unwrap(),
            2,
            DEFAULT_TOL,
        )
        .unwrap();
        let s = f.to_json();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let pos: Vec<usize> = ["m", "n", "k", "l", "r", "I", "J", "U"]
            .iter()
            .map(|k| s.find(&format!("\"{k}\":")).unwrap())
            .collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{s}");
        assert_eq!(v["U"].as_array().unwrap().len(), 6);
        assert_eq!(CurFactors::from_json(&s).unwrap(), f);
    }

    #[test]
    fn rank_above_intersection_is_rejected() {
        let w = Matrix::identity(4).unwrap();
        let r = CurFactors::build(
            &w,
            &full(4),
            &IndexSet::cols(vec![0], 4).unwrap(),
            2,
            DEFAULT_TOL,
        );
        assert!(matches!(r, Err(Error::OutOfRange { .. })));
    }
}
