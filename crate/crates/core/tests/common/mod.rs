#![allow(dead_code)]

use fastcur::{rng, Matrix};
use nalgebra::DMatrix;

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j))
}

pub fn gaussian(m: usize, n: usize, seed: u64) -> Matrix {
    let mut g = rng::rng(seed);
    Matrix::new(m, n, rng::normals(&mut g, m * n)).unwrap()
}

pub fn rank_r(m: usize, n: usize, r: usize, seed: u64) -> Matrix {
    gaussian(m, r, seed)
        .matmul(&gaussian(r, n, seed ^ 0x5555))
        .unwrap()
}

/// Singular values, non-increasing.
pub fn sigma(a: &Matrix) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(a).singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn spectral(a: &DMatrix<f64>) -> f64 {
    a.singular_values().max()
}

pub fn rel_frobenius(w: &Matrix, approx: &DMatrix<f64>) -> f64 {
    let w = to_na(w);
    (&w - approx).norm() / w.norm()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
