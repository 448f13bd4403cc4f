//! Test inputs: seeded generators and MatrixMarket files.

mod market;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;

pub use market::{parse_matrix_market, read_matrix_market, write_matrix_market};

fn default_spike_mag() -> f64 {
    1e6
}

/// A seeded input family. The seed is supplied per run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `G1 G2 + noise E`, all Gaussian.
    Average {
        m: usize,
        n: usize,
        r: usize,
        #[serde(default)]
        noise: f64,
    },
    /// Rank `r - 1` Gaussian background plus one large entry.
    Needle {
        m: usize,
        n: usize,
        r: usize,
        #[serde(default)]
        spike_pos: (usize, usize),
        #[serde(default = "default_spike_mag")]
        spike_mag: f64,
    },
    /// `1 / (i + j + 1)`; the seed is ignored.
    Hilbert { n: usize },
    /// Gaussian `n x n` whose leading `d x d` block has rank `d - 1`.
    SingularLeading { n: usize, d: usize },
}

impl GeneratorSpec {
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            Self::Average { m, n, .. } | Self::Needle { m, n, .. } => (m, n),
            Self::Hilbert { n } | Self::SingularLeading { n, .. } => (n, n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n) = self.shape();
        if m == 0 || n == 0 {
            return Err(Error::Empty { rows: m, cols: n });
        }
        match *self {
            Self::Average { r, noise, .. } => {
                if r > m.min(n) {
                    return Err(Error::Config(format!("rank {r} exceeds min({m}, {n})")));
                }
                if !(noise.is_finite() && noise >= 0.0) {
                    return Err(Error::Config(format!(
                        "noise must be finite and >= 0, got {noise}"
                    )));
                }
            }
            Self::Needle {
                r,
                spike_pos: (i, j),
                spike_mag,
                ..
            } => {
                if r == 0 || r > m.min(n) {
                    return Err(Error::Config(format!(
                        "rank {r} must be in 1..={}",
                        m.min(n)
                    )));
                }
                if i >= m || j >= n {
                    return Err(Error::Config(format!(
                        "spike position ({i}, {j}) outside {m}x{n}"
                    )));
                }
                if !spike_mag.is_finite() {
                    return Err(Error::Config("spike magnitude must be finite".into()));
                }
            }
            Self::Hilbert { .. } => {}
            Self::SingularLeading { d, .. } => {
                if d == 0 || d > n {
                    return Err(Error::Config(format!(
                        "leading block size {d} must be in 1..={n}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn generate(&self, seed: u64) -> Result<Matrix> {
        self.validate()?;
        match *self {
            Self::Average { m, n, r, noise } => average_matrix(m, n, r, noise, seed),
            Self::Needle {
                m,
                n,
                r,
                spike_pos,
                spike_mag,
            } => needle_matrix(m, n, r, spike_pos, spike_mag, seed),
            Self::Hilbert { n } => hilbert(n),
            Self::SingularLeading { n, d } => singular_leading(n, d, seed),
        }
    }
}

/// Shorthand: `average:MxN:rR[:noiseX]`, `needle:MxN:rR[:spikeX][:atI,J]`,
/// `hilbert:N`, `singular:N:dD`.
impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("generator `{s}`: {msg}"));
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let dims = parts.next().ok_or_else(|| bad("missing dimensions"))?;
        let num = |v: &str| v.parse::<usize>().map_err(|_| bad("bad integer"));
        let real = |v: &str| v.parse::<f64>().map_err(|_| bad("bad number"));
        let shape = |d: &str| -> Result<(usize, usize)> {
            let (a, b) = d
                .split_once('x')
                .ok_or_else(|| bad("dimensions must be MxN"))?;
            Ok((num(a)?, num(b)?))
        };
        let rest: Vec<&str> = parts.collect();
        let spec = match kind {
            "average" => {
                let (m, n) = shape(dims)?;
                let (mut r, mut noise) = (None, 0.0);
                for p in rest {
                    if let Some(v) = p.strip_prefix("noise") {
                        noise = real(v)?;
                    } else if let Some(v) = p.strip_prefix('r') {
                        r = Some(num(v)?);
                    } else {
                        return Err(bad(&format!("unknown field `{p}`")));
                    }
                }
                Self::Average {
                    m,
                    n,
                    r: r.ok_or_else(|| bad("missing rank rR"))?,
                    noise,
                }
            }
            "needle" => {
                let (m, n) = shape(dims)?;
                let (mut r, mut spike_mag, mut spike_pos) = (None, default_spike_mag(), (0, 0));
                for p in rest {
                    if let Some(v) = p.strip_prefix("spike") {
                        spike_mag = real(v)?;
                    } else if let Some(v) = p.strip_prefix("at") {
                        let (i, j) = v
                            .split_once(',')
                            .ok_or_else(|| bad("position must be atI,J"))?;
                        spike_pos = (num(i)?, num(j)?);
                    } else if let Some(v) = p.strip_prefix('r') {
                        r = Some(num(v)?);
                    } else {
                        return Err(bad(&format!("unknown field `{p}`")));
                    }
                }
                Self::Needle {
                    m,
                    n,
                    r: r.ok_or_else(|| bad("missing rank rR"))?,
                    spike_pos,
                    spike_mag,
                }
            }
            "hilbert" => {
                if !rest.is_empty() {
                    return Err(bad("hilbert takes only N"));
                }
                Self::Hilbert { n: num(dims)? }
            }
            "singular" => {
                let d = match rest.as_slice() {
                    [p] => num(p.strip_prefix('d').ok_or_else(|| bad("expected dD"))?)?,
                    _ => return Err(bad("expected singular:N:dD")),
                };
                Self::SingularLeading { n: num(dims)?, d }
            }
            _ => return Err(bad("unknown kind")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Average {
                m,
                n,
                r,
                noise: 0.0,
            } => write!(f, "average:{m}x{n}:r{r}"),
            Self::Average { m, n, r, noise } => write!(f, "average:{m}x{n}:r{r}:noise{noise:e}"),
            Self::Needle {
                m,
                n,
                r,
                spike_pos: (i, j),
                spike_mag,
            } => write!(f, "needle:{m}x{n}:r{r}:spike{spike_mag:e}:at{i},{j}"),
            Self::Hilbert { n } => write!(f, "hilbert:{n}"),
            Self::SingularLeading { n, d } => write!(f, "singular:{n}:d{d}"),
        }
    }
}

/// Gaussian matrix with entries drawn in column-major order.
fn gaussian_col_major(g: &mut rng::Rng, m: usize, n: usize) -> Vec<f64> {
    let mut data = vec![0.0; m * n];
    for j in 0..n {
        for i in 0..m {
            data[i * n + j] = rng::normal(g);
        }
    }
    data
}

/// `W = G1 G2 + noise E` with `G1` m x r, `G2` r x n and `E` m x n standard
/// normal. Draws `G1`, then `G2`, then `E` (only when `noise > 0`), each in
/// column-major order from a single stream.
pub fn average_matrix(m: usize, n: usize, r: usize, noise: f64, seed: u64) -> Result<Matrix> {
    let mut g = rng::rng(seed);
    let mut w = if r == 0 {
        Matrix::zeros(m, n)?
    } else {
        let g1 = Matrix::new(m, r, gaussian_col_major(&mut g, m, r))?;
        let g2 = Matrix::new(r, n, gaussian_col_major(&mut g, r, n))?;
        g1.matmul(&g2)?
    };
    if noise > 0.0 {
        let e = Matrix::new(m, n, gaussian_col_major(&mut g, m, n))?;
        w = w.add(&e.scale(noise)?)?;
    }
    Ok(w)
}

/// `spike e_i e_j^T + G1 G2 / sqrt(r - 1)`: a rank `r - 1` background of
/// unit-variance entries with one large entry on top.
pub fn needle_matrix(
    m: usize,
    n: usize,
    r: usize,
    (i, j): (usize, usize),
    spike: f64,
    seed: u64,
) -> Result<Matrix> {
    let mut w = average_matrix(m, n, r - 1, 0.0, seed)?;
    if r > 2 {
        w = w.scale(1.0 / ((r - 1) as f64).sqrt())?;
    }
    let mut data = w.into_data();
    data[i * n + j] += spike;
    Matrix::new(m, n, data)
}

pub fn hilbert(n: usize) -> Result<Matrix> {
    Matrix::from_fn(n, n, |i, j| 1.0 / (i + j + 1) as f64)
}

/// Gaussian `n x n` (row-major draws) whose leading `d x d` block has its
/// last row replaced by the sum of the others, so the block has rank
/// `d - 1` while the whole matrix stays nonsingular almost surely.
pub fn singular_leading(n: usize, d: usize, seed: u64) -> Result<Matrix> {
    let mut g = rng::rng(seed);
    let mut data = rng::normals(&mut g, n * n);
    for j in 0..d {
        data[(d - 1) * n + j] = (0..d - 1).map(|i| data[i * n + j]).sum();
    }
    Matrix::new(n, n, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::singular_values;

    #[test]
    fn noiseless_average_has_exact_rank() {
        let w = average_matrix(40, 30, 5, 0.0, 1).unwrap();
        let s = singular_values(&w).unwrap();
        assert!(s[5] <= 1e-10 * s[0]);
        assert!(s[4] > 1e-3 * s[0]);
        assert_eq!(w, average_matrix(40, 30, 5, 0.0, 1).unwrap());
    }

    #[test]
    fn draw_order_is_column_major_g1_g2_e() {
        let (m, n, r) = (4, 3, 2);
        let mut g = rng::rng(5);
        let draws = rng::normals(&mut g, (m + n) * r + m * n);
        let g1 = Matrix::from_fn(m, r, |i, j| draws[j * m + i]).unwrap();
        let g2 = Matrix::from_fn(r, n, |i, j| draws[m * r + j * r + i]).unwrap();
        let e = Matrix::from_fn(m, n, |i, j| draws[(m + n) * r + j * m + i]).unwrap();
        let want = g1.matmul(&g2).unwrap().add(&e.scale(0.5).unwrap()).unwrap();
        assert_eq!(average_matrix(m, n, r, 0.5, 5).unwrap(), want);
    }

    #[test]
    fn needle_without_spike_is_average() {
        let w = needle_matrix(20, 20, 2, (0, 0), 0.0, 3).unwrap();
        assert_eq!(w, average_matrix(20, 20, 1, 0.0, 3).unwrap());
    }

    #[test]
    fn needle_top_singular_value_is_the_spike() {
        let w = needle_matrix(200, 200, 2, (0, 0), 1e6, 1).unwrap();
        let s = singular_values(&w).unwrap();
        assert!((s[0] - 1e6).abs() <= 1e-3 * 1e6, "{}", s[0]);
    }

    #[test]
    fn singular_leading_block_rank() {
        let a = singular_leading(10, 3, 2).unwrap();
        let s = singular_values(&a.select(&[0, 1, 2], &[0, 1, 2]).unwrap()).unwrap();
        assert!(s[2] <= 1e-14 * s[0]);
        let full = singular_values(&a).unwrap();
        assert!(full[9] > 1e-6 * full[0]);
    }

    #[test]
    fn shorthand_roundtrip() {
        for s in [
            "average:200x200:r5:noise1e-10",
            "average:10x20:r3",
            "needle:200x200:r2:spike1e6:at0,0",
            "hilbert:100",
            "singular:100:d3",
        ] {
            let spec: GeneratorSpec = s.parse().unwrap();
            assert_eq!(
                spec.to_string().parse::<GeneratorSpec>().unwrap(),
                spec,
                "{s}"
            );
        }
        assert_eq!(
            "average:200x200:r5:noise1e-10"
                .parse::<GeneratorSpec>()
                .unwrap(),
            GeneratorSpec::Average {
                m: 200,
                n: 200,
                r: 5,
                noise: 1e-10
            }
        );
        for bad in [
            "average:200x200",
            "avg:3x3:r1",
            "hilbert:x",
            "average:3x3:r4",
            "needle:5x5:r2:at9,0",
        ] {
            assert!(bad.parse::<GeneratorSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn json_form() {
        let spec: GeneratorSpec =
            serde_json::from_str(r#"{"kind":"needle","m":5,"n":6,"r":2}"#).unwrap();
        assert_eq!(
            spec,
            GeneratorSpec::Needle {
                m: 5,
                n: 6,
                r: 2,
                spike_pos: (0, 0),
                spike_mag: 1e6
            }
        );
    }
}
