//! Gaussian elimination without pivoting, its block version, and solves
//! preprocessed by random multipliers.

use crate::error::{Error, Result};
use crate::flops;
use crate::kernels::{singular_values, Lu};
use crate::matrix::Matrix;
use crate::preprocess::{Multiplier, MultiplierConfig, Side};
use crate::rng::{self, stream};

pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// `A = L U`. With `block > 1`, `U` is block upper triangular: its diagonal
/// blocks are the (unfactored) pivot blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct LuFactors {
    pub l: Matrix,
    pub u: Matrix,
    /// Largest magnitude met in any Schur complement over `max |A|`.
    pub growth: f64,
    pub block: usize,
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.l.rows()
    }

    /// `||L U - A||_F / ||A||_F`.
    pub fn residual(&self, a: &Matrix) -> Result<f64> {
        let norm = a.frobenius_norm();
        let diff = self.l.matmul(&self.u)?.sub(a)?.frobenius_norm();
        Ok(if norm == 0.0 { diff } else { diff / norm })
    }

    /// Solves `L U x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::dims("lu solve", (n, n), (b.len(), 1)));
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let row = self.l.row(i);
            let mut s = y[i];
            for k in 0..i {
                s -= row[k] * y[k];
            }
            y[i] = s;
        }
        flops::add((n * n / 2) as u64);
        let nb = self.block;
        let starts: Vec<usize> = (0..n).step_by(nb).collect();
        for &k in starts.iter().rev() {
            let e = (k + nb).min(n);
            let mut rhs: Vec<f64> = (k..e)
                .map(|i| {
                    let row = self.u.row(i);
                    let mut s = y[i];
                    for j in e..n {
                        s -= row[j] * y[j];
                    }
                    s
                })
                .collect();
            flops::add(((e - k) * (n - e)) as u64);
            if e - k == 1 {
                rhs[0] /= self.u.get(k, k);
            } else {
                let idx: Vec<usize> = (k..e).collect();
                rhs = Lu::factor(&self.u.select(&idx, &idx)?)?.solve_vec(&rhs)?;
            }
            y[k..e].copy_from_slice(&rhs);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("lu solve"));
        }
        Ok(y)
    }
}

fn check_square(a: &Matrix, op: &'static str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims(op, a.shape(), (a.cols(), a.rows())));
    }
    Ok(())
}

/// Split the working buffer into unit `L` (strict lower part) and `U`.
fn unpack(s: Vec<f64>, n: usize, block: usize, growth: f64) -> Result<LuFactors> {
    let mut l = vec![0.0; n * n];
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        let bi = i / block;
        for j in 0..n {
            let v = s[i * n + j];
            if j / block < bi {
                l[i * n + j] = v;
            } else {
                u[i * n + j] = v;
            }
        }
        l[i * n + i] = 1.0;
    }
    Ok(LuFactors {
        l: Matrix::checked(n, n, l, "genp")?,
        u: Matrix::checked(n, n, u, "genp")?,
        growth,
        block,
    })
}

/// Classical LU without row exchanges. Fails at the first step whose pivot
/// is below `pivot_tol * max |A|` in magnitude.
pub fn genp(a: &Matrix, pivot_tol: f64) -> Result<LuFactors> {
    check_square(a, "genp")?;
    let n = a.rows();
    let amax = a.max_abs();
    let mut s = a.data().to_vec();
    let mut big = amax;
    for k in 0..n {
        let p = s[k * n + k];
        if p == 0.0 || p.abs() < pivot_tol * amax {
            return Err(Error::ZeroPivot {
                step: k,
                pivot: p.abs(),
            });
        }
        for i in (k + 1)..n {
            let l = s[i * n + k] / p;
            s[i * n + k] = l;
            for j in (k + 1)..n {
                let v = s[i * n + j] - l * s[k * n + j];
                s[i * n + j] = v;
                big = big.max(v.abs());
            }
        }
        let t = n - k - 1;
        flops::add((t + t * t) as u64);
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("genp"));
    }
    unpack(s, n, 1, if amax == 0.0 { 1.0 } else { big / amax })
}

/// Block elimination in panels of `block` columns via Schur complements.
/// A panel fails when the smallest singular value of its pivot block is
/// below `pivot_tol * max |A|`. With `block = 1` this is [`genp`].
pub fn block_ge(a: &Matrix, block: usize, pivot_tol: f64) -> Result<LuFactors> {
    check_square(a, "block_ge")?;
    let n = a.rows();
    if block == 0 || block > n {
        return Err(Error::OutOfRange {
            what: "block size",
            value: block,
            expected: format!("1..={n}"),
        });
    }
    let amax = a.max_abs();
    let mut s = a.data().to_vec();
    let mut big = amax;
    for (panel, k) in (0..n).step_by(block).enumerate() {
        let e = (k + block).min(n);
        let nb = e - k;
        let idx: Vec<usize> = (k..e).collect();
        let a11 = Matrix::raw(
            nb,
            nb,
            idx.iter()
                .flat_map(|&i| s[i * n + k..i * n + e].to_vec())
                .collect(),
        );
        let sigma_min = if nb == 1 {
            a11.get(0, 0).abs()
        } else {
            *singular_values(&a11)?.last().expect("non-empty block")
        };
        if sigma_min == 0.0 || sigma_min < pivot_tol * amax {
            return Err(Error::SingularBlock { panel, sigma_min });
        }
        if e == n {
            break;
        }
        // L21 = A21 A11^{-1}
        let a21 = Matrix::raw(
            n - e,
            nb,
            (e..n)
                .flat_map(|i| s[i * n + k..i * n + e].to_vec())
                .collect(),
        );
        let l21 = Lu::factor(&a11)?.solve_right(&a21)?;
        for (r, i) in (e..n).enumerate() {
            s[i * n + k..i * n + e].copy_from_slice(l21.row(r));
        }
        // S22 -= L21 A12
        for i in e..n {
            let li = l21.row(i - e);
            for j in e..n {
                let mut t = li[0] * s[k * n + j];
                for p in 1..nb {
                    t += li[p] * s[(k + p) * n + j];
                }
                let v = s[i * n + j] - t;
                s[i * n + j] = v;
                big = big.max(v.abs());
            }
        }
        flops::add(((n - e) * (n - e) * nb) as u64);
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("block_ge"));
    }
    unpack(s, n, block, if amax == 0.0 { 1.0 } else { big / amax })
}

/// Outcome of a preprocessed solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessedSolve {
    pub x: Vec<f64>,
    pub growth: f64,
    /// 0, or 1 if the first multiplier pair led to a failed elimination.
    pub retries: usize,
}

/// Solves `A x = rhs` by GENP on `A' = F A H`: `A' y = F rhs`, `x = H y`.
/// A failed elimination is retried once with fresh multipliers.
pub fn genp_preprocessed(
    a: &Matrix,
    rhs: &[f64],
    left: &MultiplierConfig,
    right: &MultiplierConfig,
    pivot_tol: f64,
    seed: u64,
) -> Result<PreprocessedSolve> {
    check_square(a, "genp_preprocessed")?;
    let n = a.rows();
    if rhs.len() != n {
        return Err(Error::dims(
            "genp_preprocessed rhs",
            a.shape(),
            (rhs.len(), 1),
        ));
    }
    let attempt = |s: u64| -> Result<(Vec<f64>, f64)> {
        let f = Multiplier::from_config(left, n, rng::derive(s, stream::LEFT_MULTIPLIER))?;
        let h = Multiplier::from_config(right, n, rng::derive(s, stream::RIGHT_MULTIPLIER))?;
        let ap = h.apply(&f.apply(a, Side::Left)?, Side::Right)?;
        let lu = genp(&ap, pivot_tol)?;
        let frhs = f.apply(&Matrix::column(rhs)?, Side::Left)?;
        let y = lu.solve(frhs.data())?;
        let x = h.apply(&Matrix::column(&y)?, Side::Left)?;
        Ok((x.into_data(), lu.growth))
    };
    match attempt(seed) {
        Ok((x, growth)) => Ok(PreprocessedSolve {
            x,
            growth,
            retries: 0,
        }),
        Err(Error::ZeroPivot { .. }) | Err(Error::NonFinite(_)) => {
            let (x, growth) = attempt(rng::derive(seed, stream::RETRY))?;
            Ok(PreprocessedSolve {
                x,
                growth,
                retries: 1,
            })
        }
        Err(e) => Err(e),
    }
}

/// `||A x - b|| / (||A||_F ||x||)`.
pub fn solve_residual(a: &Matrix, x: &[f64], b: &[f64]) -> Result<f64> {
    let ax = a.matvec(x)?;
    let r: f64 = ax
        .iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt();
    let xn: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let den = a.frobenius_norm() * xn;
    Ok(if den == 0.0 { r } else { r / den })
}
