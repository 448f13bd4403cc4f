//! Singular value decomposition by Householder bidiagonalization followed by
//! implicit-shift QR iteration on the bidiagonal (Golub-Kahan-Reinsch).

use crate::error::{Error, Result};
use crate::flops;
use crate::matrix::Matrix;

const MAX_SWEEPS: usize = 75;

/// Thin SVD `A = U diag(s) V^T` with `s` non-increasing.
#[derive(Debug, Clone)]
pub struct Svd {
    /// m x p, p = min(m, n).
    pub u: Matrix,
    pub s: Vec<f64>,
    /// n x p.
    pub v: Matrix,
}

/// Rank-`r` truncation of the SVD.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl TruncatedSvd {
    /// `U diag(s) V^T`.
    pub fn reconstruct(&self) -> Result<Matrix> {
        let us = Matrix::from_fn(self.u.rows(), self.u.cols(), |i, j| {
            self.u.get(i, j) * self.s[j]
        })?;
        us.matmul(&self.v.transpose())
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Full thin SVD.
pub fn svd(a: &Matrix) -> Result<Svd> {
    if a.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("svd input"));
    }
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    let (m, n) = a.shape();
    let mut u = a.data().to_vec();
    let mut v = vec![0.0; n * n];
    let mut w = vec![0.0; n];
    golub_reinsch(&mut u, &mut w, &mut v, m, n)?;

    // sort descending, carrying the singular vectors along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| w[y].total_cmp(&w[x]).then(x.cmp(&y)));
    let s = order.iter().map(|&k| w[k]).collect();
    let mut us = vec![0.0; m * n];
    let mut vs = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..m {
            us[i * n + dst] = u[i * n + src];
        }
        for i in 0..n {
            vs[i * n + dst] = v[i * n + src];
        }
    }
    Ok(Svd {
        u: Matrix::checked(m, n, us, "svd")?,
        s,
        v: Matrix::checked(n, n, vs, "svd")?,
    })
}

/// Singular values only, non-increasing.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.s)
}

/// The `r` leading singular triplets.
pub fn truncated_svd(a: &Matrix, r: usize) -> Result<TruncatedSvd> {
    let p = a.rows().min(a.cols());
    if r == 0 || r > p {
        return Err(Error::OutOfRange {
            what: "truncation rank",
            value: r,
            expected: format!("1..={p}"),
        });
    }
    let full = svd(a)?;
    let keep: Vec<usize> = (0..r).collect();
    Ok(TruncatedSvd {
        u: full.u.select_cols(&keep)?,
        s: full.s[..r].to_vec(),
        v: full.v.select_cols(&keep)?,
    })
}

/// Rank-`r` Moore-Penrose pseudo-inverse, dropping singular values at or
/// below `tol * s_1`. The result has the transposed shape of `a`; an all-zero
/// input (or `r = 0`) yields the zero matrix.
pub fn pinv_trunc(a: &Matrix, r: usize, tol: f64) -> Result<Matrix> {
    let (m, n) = a.shape();
    if r > m.min(n) {
        return Err(Error::OutOfRange {
            what: "truncation rank",
            value: r,
            expected: format!("<= {}", m.min(n)),
        });
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Config(format!(
            "pinv tolerance must be >= 0, got {tol}"
        )));
    }
    let f = svd(a)?;
    let s1 = f.s[0];
    let kept: Vec<usize> = (0..r).filter(|&i| s1 > 0.0 && f.s[i] > tol * s1).collect();
    let mut out = vec![0.0; n * m];
    for &t in &kept {
        let inv = 1.0 / f.s[t];
        for i in 0..n {
            let vi = f.v.get(i, t) * inv;
            for j in 0..m {
                out[i * m + j] += vi * f.u.get(j, t);
            }
        }
    }
    flops::add((kept.len() * m * n) as u64);
    Matrix::checked(n, m, out, "pinv_trunc")
}

/// Golub-Reinsch SVD of the row-major m x n (m >= n) matrix in `a`.
/// On return `a` holds U, `w` the (unsorted, non-negative) singular values
/// and `v` the n x n matrix V.
fn golub_reinsch(a: &mut [f64], w: &mut [f64], v: &mut [f64], m: usize, n: usize) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    let mut rv1 = vec![0.0; n];
    let mut g = 0.0f64;
    let mut scale = 0.0f64;
    let mut anorm = 0.0f64;
    let mut cost = 0u64;

    // Householder reduction to bidiagonal form.
    for i in 0..n {
        let l = i + 1;
        rv1[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        let mut s = 0.0;
        if i < m {
            for k in i..m {
                scale += a[at(k, i)].abs();
            }
            if scale != 0.0 {
                for k in i..m {
                    a[at(k, i)] /= scale;
                    s += a[at(k, i)] * a[at(k, i)];
                }
                let f = a[at(i, i)];
                g = -sign(s.sqrt(), f);
                let h = f * g - s;
                a[at(i, i)] = f - g;
                for j in l..n {
                    let mut s = 0.0;
                    for k in i..m {
                        s += a[at(k, i)] * a[at(k, j)];
                    }
                    let f = s / h;
                    for k in i..m {
                        a[at(k, j)] += f * a[at(k, i)];
                    }
                }
                for k in i..m {
                    a[at(k, i)] *= scale;
                }
                cost += (2 * (m - i) * (n - l) + 2 * (m - i)) as u64;
            }
        }
        w[i] = scale * g;
        g = 0.0;
        scale = 0.0;
        s = 0.0;
        if i < m && i + 1 != n {
            for k in l..n {
                scale += a[at(i, k)].abs();
            }
            if scale != 0.0 {
                for k in l..n {
                    a[at(i, k)] /= scale;
                    s += a[at(i, k)] * a[at(i, k)];
                }
                let f = a[at(i, l)];
                g = -sign(s.sqrt(), f);
                let h = f * g - s;
                a[at(i, l)] = f - g;
                for k in l..n {
                    rv1[k] = a[at(i, k)] / h;
                }
                for j in l..m {
                    let mut s = 0.0;
                    for k in l..n {
                        s += a[at(j, k)] * a[at(i, k)];
                    }
                    for k in l..n {
                        a[at(j, k)] += s * rv1[k];
                    }
                }
                for k in l..n {
                    a[at(i, k)] *= scale;
                }
                cost += (2 * (m - l) * (n - l) + 2 * (n - l)) as u64;
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Accumulate right-hand transformations.
    let mut l = n;
    for i in (0..n).rev() {
        if i + 1 < n {
            if g != 0.0 {
                for j in l..n {
                    v[at(j, i)] = (a[at(i, j)] / a[at(i, l)]) / g;
                }
                for j in l..n {
                    let mut s = 0.0;
                    for k in l..n {
                        s += a[at(i, k)] * v[at(k, j)];
                    }
                    for k in l..n {
                        v[at(k, j)] += s * v[at(k, i)];
                    }
                }
                cost += (2 * (n - l) * (n - l)) as u64;
            }
            for j in l..n {
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        }
        v[at(i, i)] = 1.0;
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations.
    for i in (0..m.min(n)).rev() {
        let l = i + 1;
        let g = w[i];
        for j in l..n {
            a[at(i, j)] = 0.0;
        }
        if g != 0.0 {
            let g = 1.0 / g;
            for j in l..n {
                let mut s = 0.0;
                for k in l..m {
                    s += a[at(k, i)] * a[at(k, j)];
                }
                let f = (s / a[at(i, i)]) * g;
                for k in i..m {
                    a[at(k, j)] += f * a[at(k, i)];
                }
            }
            for j in i..m {
                a[at(j, i)] *= g;
            }
            cost += (2 * (m - i) * (n - l) + (m - i)) as u64;
        } else {
            for j in i..m {
                a[at(j, i)] = 0.0;
            }
        }
        a[at(i, i)] += 1.0;
    }

    // Diagonalize the bidiagonal form with implicit-shift QR sweeps.
    let eps = f64::EPSILON;
    for k in (0..n).rev() {
        let mut its = 0;
        loop {
            its += 1;
            // find l such that rv1[l] is negligible (rv1[0] is always zero)
            let mut flag = true;
            let mut l = k;
            loop {
                if l == 0 || rv1[l].abs() <= eps * anorm {
                    flag = false;
                    break;
                }
                if w[l - 1].abs() <= eps * anorm {
                    break;
                }
                l -= 1;
            }
            if flag {
                // w[l-1] is negligible: chase rv1[l] out with rotations
                let nm = l - 1;
                let mut c = 0.0;
                let mut s = 1.0;
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if f.abs() <= eps * anorm {
                        break;
                    }
                    let g = w[i];
                    let h = f.hypot(g);
                    w[i] = h;
                    let hinv = 1.0 / h;
                    c = g * hinv;
                    s = -f * hinv;
                    for j in 0..m {
                        let y = a[at(j, nm)];
                        let z = a[at(j, i)];
                        a[at(j, nm)] = y * c + z * s;
                        a[at(j, i)] = z * c - y * s;
                    }
                    cost += (2 * m) as u64;
                }
            }
            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    for j in 0..n {
                        v[at(j, k)] = -v[at(j, k)];
                    }
                }
                break;
            }
            if its > MAX_SWEEPS {
                flops::add(cost);
                return Err(Error::NoConvergence(MAX_SWEEPS));
            }
            // Wilkinson-style shift from the trailing 2x2 minor
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = f.hypot(1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + sign(g, f))) - h)) / x;
            let mut c = 1.0;
            let mut s = 1.0;
            for j in l..=nm {
                let i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g *= c;
                let mut z = f.hypot(h);
                rv1[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                for jj in 0..n {
                    let x = v[at(jj, j)];
                    let z = v[at(jj, i)];
                    v[at(jj, j)] = x * c + z * s;
                    v[at(jj, i)] = z * c - x * s;
                }
                z = f.hypot(h);
                w[j] = z;
                if z != 0.0 {
                    let zinv = 1.0 / z;
                    c = f * zinv;
                    s = h * zinv;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                for jj in 0..m {
                    let y = a[at(jj, j)];
                    let z = a[at(jj, i)];
                    a[at(jj, j)] = y * c + z * s;
                    a[at(jj, i)] = z * c - y * s;
                }
                cost += (2 * (m + n) + 8) as u64;
            }
            rv1[l] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }
    flops::add(cost);
    Ok(())
}
