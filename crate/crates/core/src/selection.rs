//! Row and column selection: maximal-volume row sets and pivoted-QR
//! skeletons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flops;
use crate::kernels::{pivot_columns, Lu};
use crate::matrix::Matrix;

/// Pivots below this fraction of the leading pivot count as rank loss.
pub const RANK_TOL: f64 = 1e-12;
pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Column,
}

/// Ordered list of distinct row or column indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    axis: Axis,
    indices: Vec<usize>,
}

impl IndexSet {
    /// Validates that indices are distinct and below `bound`.
    pub fn new(axis: Axis, indices: Vec<usize>, bound: usize) -> Result<Self> {
        if let Some(&i) = indices.iter().find(|&&i| i >= bound) {
            return Err(Error::InvalidIndexSet(format!(
                "{axis:?} index {i} out of range for dimension {bound}"
            )));
        }
        let mut seen = indices.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidIndexSet(format!(
                "duplicate {axis:?} indices"
            )));
        }
        Ok(Self { axis, indices })
    }

    pub fn rows(indices: Vec<usize>, bound: usize) -> Result<Self> {
        Self::new(Axis::Row, indices, bound)
    }

    pub fn cols(indices: Vec<usize>, bound: usize) -> Result<Self> {
        Self::new(Axis::Column, indices, bound)
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Same members, ignoring order.
    pub fn same_members(&self, other: &IndexSet) -> bool {
        let mut a = self.indices.clone();
        let mut b = other.indices.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }

    /// Maps local positions through `global`, e.g. from a sampled block back
    /// to the full matrix.
    pub fn lift(&self, global: &[usize], bound: usize) -> Result<Self> {
        Self::new(
            self.axis,
            self.indices.iter().map(|&i| global[i]).collect(),
            bound,
        )
    }
}

/// One maxvol exchange: row `row` replaced the row in position `slot`,
/// multiplying the volume by `factor`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Swap {
    pub slot: usize,
    pub row: usize,
    pub factor: f64,
}

#[derive(Debug, Clone)]
pub struct Maxvol {
    pub rows: IndexSet,
    /// Row set before any swap.
    pub initial: Vec<usize>,
    pub swaps: Vec<Swap>,
    /// False when `max_iters` swaps were exhausted before dominance.
    pub converged: bool,
    /// `max |A (A[I,:])^{-1}|` for the returned set.
    pub max_coefficient: f64,
}

/// Selects `r` rows of the tall `n x r` matrix `a` whose square submatrix is
/// dominant: every entry of `A (A[I,:])^{-1}` is at most `1 + delta` in
/// magnitude.
///
/// Starts from the row pivots of a pivoted QR of `A^T` and performs greedy
/// exchanges of the largest coefficient.
pub fn maxvol(a: &Matrix, delta: f64, max_iters: usize) -> Result<Maxvol> {
    let (n, r) = a.shape();
    if n < r {
        return Err(Error::dims(
            "maxvol (needs rows >= cols)",
            a.shape(),
            (r, r),
        ));
    }
    let piv = pivot_columns(&a.transpose(), r)?;
    let rank = piv.numerical_rank(RANK_TOL);
    if rank < r {
        return Err(Error::RankDeficient { rank, required: r });
    }
    maxvol_from(a, piv.perm, delta, max_iters)
}

/// Maxvol iteration from a caller-supplied nonsingular starting row set.
pub fn maxvol_from(a: &Matrix, init: Vec<usize>, delta: f64, max_iters: usize) -> Result<Maxvol> {
    let (n, r) = a.shape();
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::Config(format!(
            "maxvol delta must be >= 0, got {delta}"
        )));
    }
    if max_iters == 0 {
        return Err(Error::Config("maxvol max_iters must be >= 1".into()));
    }
    if init.len() != r {
        return Err(Error::InvalidIndexSet(format!(
            "maxvol start has {} rows, expected {r}",
            init.len()
        )));
    }
    let mut rows = IndexSet::rows(init, n)?.indices;
    let initial = rows.clone();

    let coefficients = |rows: &[usize]| -> Result<Vec<f64>> {
        let lu = Lu::factor(&a.select_rows(rows)?)?;
        Ok(lu.solve_right(a)?.into_data())
    };
    let mut b = coefficients(&rows)?;
    let mut fresh = true;
    let mut swaps = Vec::new();
    let bound = 1.0 + delta;

    let converged = loop {
        // largest |B(i,j)|, lowest (i, j) on ties
        let (mut bi, mut bj, mut best) = (0, 0, -1.0);
        for (idx, v) in b.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                bi = idx / r;
                bj = idx % r;
            }
        }
        if best <= bound {
            if fresh {
                break true;
            }
            // confirm against a freshly solved coefficient matrix
            b = coefficients(&rows)?;
            fresh = true;
            continue;
        }
        if swaps.len() == max_iters {
            break false;
        }
        let pivot = b[bi * r + bj];
        let prow: Vec<f64> = b[bi * r..(bi + 1) * r].to_vec();
        let pcol: Vec<f64> = (0..n).map(|i| b[i * r + bj]).collect();
        // B <- B - B(:,j) (B(i,:) - e_j^T) / B(i,j)
        for i in 0..n {
            let f = pcol[i] / pivot;
            if f == 0.0 {
                continue;
            }
            for (t, &p) in prow.iter().enumerate() {
                let e = if t == bj { 1.0 } else { 0.0 };
                b[i * r + t] -= f * (p - e);
            }
        }
        flops::add((n * r) as u64);
        rows[bj] = bi;
        swaps.push(Swap {
            slot: bj,
            row: bi,
            factor: best,
        });
        fresh = false;
    };

    let max_coefficient = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(Maxvol {
        rows: IndexSet::rows(rows, n)?,
        initial,
        swaps,
        converged,
        max_coefficient,
    })
}

/// Default swap budget for a rank-`r` maxvol run.
pub fn default_max_iters(r: usize) -> usize {
    10 * r.max(1)
}

/// Skeleton of a sampled block: local row and column positions.
#[derive(Debug, Clone)]
pub struct RcSelection {
    pub rows: IndexSet,
    pub cols: IndexSet,
    /// Numerical rank found, capped at the requested `r`.
    pub rank: usize,
    pub rank_deficient: bool,
}

/// Chooses `r` columns of `B` by pivoted QR, then `r` rows by pivoted QR of
/// the chosen columns' transpose.
///
/// When the numerical rank is below `r`, the returned sets shrink to the
/// rank (but never below one index) and `rank_deficient` is set.
pub fn select_rc(b: &Matrix, r: usize) -> Result<RcSelection> {
    let (k, l) = b.shape();
    if r == 0 || r > k.min(l) {
        return Err(Error::OutOfRange {
            what: "selection rank",
            value: r,
            expected: format!("1..={}", k.min(l)),
        });
    }
    let colp = pivot_columns(b, r)?;
    let col_rank = colp.numerical_rank(RANK_TOL);
    let q = col_rank.clamp(1, r);
    let cols = &colp.perm[..q];

    let rowp = pivot_columns(&b.select_cols(cols)?.transpose(), q)?;
    let row_rank = rowp.numerical_rank(RANK_TOL);
    let q2 = row_rank.clamp(1, q);

    let rank = col_rank.min(row_rank).min(r);
    Ok(RcSelection {
        rows: IndexSet::rows(rowp.perm[..q2].to_vec(), k)?,
        cols: IndexSet::cols(cols[..q2].to_vec(), l)?,
        rank,
        rank_deficient: rank < r,
    })
}
