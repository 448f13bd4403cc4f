use crate::error::{Error, Result};
use crate::matrix::{norm2, Matrix};
use crate::rng;

/// Power-iteration estimate of the largest singular value.
///
/// The estimate is `||A v||` for a unit vector `v`, so it never exceeds
/// `sigma_1` beyond rounding.
pub fn spectral_norm_est(a: &Matrix, iters: usize, seed: u64) -> Result<f64> {
    if iters == 0 {
        return Err(Error::OutOfRange {
            what: "power iterations",
            value: 0,
            expected: ">= 1".into(),
        });
    }
    let mut g = rng::rng(rng::derive(seed, rng::stream::POWER_ITERATION));
    let mut v = rng::normals(&mut g, a.cols());
    normalize(&mut v);
    for _ in 0..iters {
        let w = a.matvec(&v)?;
        let mut u = a.t_matvec(&w)?;
        if normalize(&mut u) == 0.0 {
            return Ok(0.0);
        }
        v = u;
    }
    Ok(norm2(&a.matvec(&v)?))
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}
