//! Householder QR with column pivoting.

use crate::error::{Error, Result};
use crate::flops;
use crate::matrix::{norm2, Matrix};

/// Result of [`qr_cp`]: `A[:, perm] = Q * R`.
#[derive(Debug, Clone)]
pub struct QrCp {
    /// m x p with orthonormal columns, p = min(m, n).
    pub q: Matrix,
    /// p x n upper triangular.
    pub r: Matrix,
    pub perm: Vec<usize>,
}

impl QrCp {
    pub fn diag_abs(&self) -> Vec<f64> {
        (0..self.r.rows()).map(|i| self.r.get(i, i).abs()).collect()
    }
}

/// Column pivots and `|R(t,t)|` from the first `steps` pivoted Householder
/// steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Pivots {
    pub perm: Vec<usize>,
    pub diag: Vec<f64>,
}

impl Pivots {
    /// Number of leading pivots with `|R(t,t)| >= rel_tol * |R(0,0)|`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let lead = match self.diag.first() {
            Some(&d) if d > 0.0 => d,
            _ => return 0,
        };
        self.diag
            .iter()
            .take_while(|&&d| d >= rel_tol * lead)
            .count()
    }
}

struct Factorization {
    a: Vec<f64>,
    m: usize,
    n: usize,
    tau: Vec<f64>,
    perm: Vec<usize>,
}

/// Runs `steps` pivoted Householder steps in place. The reflector vectors
/// are stored below the diagonal with an implicit unit leading entry.
///
/// Flop cost depends only on `(m, n, steps)`: the pivot norm scan, the
/// reflector, and its application are charged even for zero columns.
fn factor(a: &Matrix, steps: usize) -> Factorization {
    let (m, n) = a.shape();
    let mut w = a.data().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut tau = Vec::with_capacity(steps);
    let mut colbuf = vec![0.0; m];

    for t in 0..steps {
        let h = m - t;
        // pivot: largest trailing column norm, lowest index on ties
        let mut best = t;
        let mut best_norm = -1.0;
        for j in t..n {
            for (i, c) in colbuf[..h].iter_mut().enumerate() {
                *c = w[(t + i) * n + j];
            }
            let nrm = norm2(&colbuf[..h]);
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        flops::add((h * (n - t)) as u64);
        if best != t {
            for i in 0..m {
                w.swap(i * n + t, i * n + best);
            }
            perm.swap(t, best);
        }

        let alpha = w[t * n + t];
        let xnorm = best_norm;
        flops::add(h as u64);
        let tk = if xnorm == 0.0 {
            0.0
        } else {
            let beta = if alpha >= 0.0 { -xnorm } else { xnorm };
            let v0 = alpha - beta;
            for i in (t + 1)..m {
                w[i * n + t] /= v0;
            }
            w[t * n + t] = beta;
            (beta - alpha) / beta
        };
        tau.push(tk);

        // apply (I - tau v v^T) to the trailing columns
        if tk != 0.0 {
            for j in (t + 1)..n {
                let mut s = w[t * n + j];
                for i in (t + 1)..m {
                    s += w[i * n + t] * w[i * n + j];
                }
                let s = s * tk;
                w[t * n + j] -= s;
                for i in (t + 1)..m {
                    w[i * n + j] -= s * w[i * n + t];
                }
            }
        }
        flops::add((2 * h * (n - t - 1)) as u64);
    }
    Factorization {
        a: w,
        m,
        n,
        tau,
        perm,
    }
}

fn check_finite(a: &Matrix) -> Result<()> {
    if a.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("qr_cp input"));
    }
    Ok(())
}

/// First `steps` column pivots of `A` and the magnitudes of the
/// corresponding diagonal entries of `R`, without forming `Q`.
pub fn pivot_columns(a: &Matrix, steps: usize) -> Result<Pivots> {
    check_finite(a)?;
    let steps = steps.min(a.rows()).min(a.cols());
    let f = factor(a, steps);
    let diag = (0..steps).map(|t| f.a[t * f.n + t].abs()).collect();
    let mut perm = f.perm;
    perm.truncate(steps);
    Ok(Pivots { perm, diag })
}

/// Full pivoted QR factorization.
pub fn qr_cp(a: &Matrix) -> Result<QrCp> {
    check_finite(a)?;
    let (m, n) = a.shape();
    let p = m.min(n);
    let f = factor(a, p);

    let mut r = vec![0.0; p * n];
    for i in 0..p {
        for j in i..n {
            r[i * n + j] = f.a[i * f.n + j];
        }
    }

    // Q = H_0 H_1 ... H_{p-1} [I_p; 0], applied right to left.
    let mut q = vec![0.0; m * p];
    for i in 0..p {
        q[i * p + i] = 1.0;
    }
    for t in (0..p).rev() {
        let tk = f.tau[t];
        if tk != 0.0 {
            for j in t..p {
                let mut s = q[t * p + j];
                for i in (t + 1)..f.m {
                    s += f.a[i * f.n + t] * q[i * p + j];
                }
                let s = s * tk;
                q[t * p + j] -= s;
                for i in (t + 1)..f.m {
                    q[i * p + j] -= s * f.a[i * f.n + t];
                }
            }
        }
        flops::add((2 * (m - t) * (p - t)) as u64);
    }

    Ok(QrCp {
        q: Matrix::checked(m, p, q, "qr_cp")?,
        r: Matrix::checked(p, n, r, "qr_cp")?,
        perm: f.perm,
    })
}
