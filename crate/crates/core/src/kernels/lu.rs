//! LU factorization with partial pivoting, used for volumes and small solves.

use crate::error::{Error, Result};
use crate::flops;
use crate::matrix::Matrix;

/// `P A = L U` packed in one buffer; `piv[i]` is the original row placed at
/// position `i`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
    /// True if an exactly zero pivot was met.
    exactly_singular: bool,
    max_abs: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::dims("lu", a.shape(), (a.cols(), a.rows())));
        }
        let n = a.rows();
        let mut lu = a.data().to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut exactly_singular = false;
        let mut cost = 0u64;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = lu[k * n + k];
            if pivot == 0.0 {
                exactly_singular = true;
                continue;
            }
            for i in (k + 1)..n {
                let l = lu[i * n + k] / pivot;
                lu[i * n + k] = l;
                if l != 0.0 {
                    for j in (k + 1)..n {
                        lu[i * n + j] -= l * lu[k * n + j];
                    }
                }
            }
            cost += ((n - k - 1) * (n - k)) as u64;
        }
        flops::add(cost);
        Ok(Lu {
            n,
            lu,
            piv,
            exactly_singular,
            max_abs: a.max_abs(),
        })
    }

    /// `|det A|`; zero when an exact zero pivot occurred.
    pub fn det_abs(&self) -> f64 {
        if self.exactly_singular {
            return 0.0;
        }
        (0..self.n).map(|i| self.lu[i * self.n + i].abs()).product()
    }

    /// Smallest `|U(i,i)|` relative to the largest input entry.
    pub fn min_pivot_ratio(&self) -> f64 {
        if self.max_abs == 0.0 {
            return 0.0;
        }
        (0..self.n)
            .map(|i| self.lu[i * self.n + i].abs())
            .fold(f64::INFINITY, f64::min)
            / self.max_abs
    }

    /// Rejects factorizations whose pivots are at roundoff level.
    pub fn is_numerically_singular(&self) -> bool {
        self.exactly_singular || self.min_pivot_ratio() <= self.n as f64 * f64::EPSILON
    }

    fn ensure_solvable(&self) -> Result<()> {
        if self.is_numerically_singular() {
            Err(Error::Singular)
        } else {
            Ok(())
        }
    }

    /// Solves `A x = b` in place.
    #[allow(clippy::needless_range_loop)]
    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.lu[i * n + k] * x[k];
            }
            x[i] = s / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
        flops::add((n * n) as u64);
    }

    /// Solves `y A = b` (row vector) in place.
    #[allow(clippy::needless_range_loop)]
    fn solve_row_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        // y P^T L U = b: solve w U = b, then z L = w, then y = z P
        let mut w = b.to_vec();
        for j in 0..n {
            let mut s = w[j];
            for k in 0..j {
                s -= w[k] * self.lu[k * n + j];
            }
            w[j] = s / self.lu[j * n + j];
        }
        for j in (0..n).rev() {
            let mut s = w[j];
            for k in (j + 1)..n {
                s -= w[k] * self.lu[k * n + j];
            }
            w[j] = s;
        }
        for (i, &p) in self.piv.iter().enumerate() {
            b[p] = w[i];
        }
        flops::add((n * n) as u64);
    }

    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.ensure_solvable()?;
        if b.len() != self.n {
            return Err(Error::dims("lu solve", (self.n, self.n), (b.len(), 1)));
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lu solve"));
        }
        Ok(x)
    }

    /// `A^{-1} B`.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        self.ensure_solvable()?;
        if b.rows() != self.n {
            return Err(Error::dims("lu solve", (self.n, self.n), b.shape()));
        }
        let bt = b.transpose();
        let mut data = bt.into_data();
        for col in data.chunks_mut(self.n) {
            self.solve_in_place(col);
        }
        Matrix::checked(b.cols(), self.n, data, "lu solve").map(|m| m.transpose())
    }

    /// `B A^{-1}`.
    pub fn solve_right(&self, b: &Matrix) -> Result<Matrix> {
        self.ensure_solvable()?;
        if b.cols() != self.n {
            return Err(Error::dims("lu solve_right", b.shape(), (self.n, self.n)));
        }
        let mut data = b.data().to_vec();
        for row in data.chunks_mut(self.n) {
            self.solve_row_in_place(row);
        }
        Matrix::checked(b.rows(), self.n, data, "lu solve_right")
    }
}

/// Volume of a square matrix: `|det A|` via partially pivoted LU.
pub fn volume(a: &Matrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::dims("volume", a.shape(), (a.cols(), a.rows())));
    }
    Ok(Lu::factor(a)?.det_abs())
}
