//! Shared fixtures for the criterion benches.

use fastcur::inputs::{average_matrix, needle_matrix};
use fastcur::{rng, Matrix};

/// Square average-model input of numerical rank `r`.
pub fn average(n: usize, r: usize) -> Matrix {
    average_matrix(n, n, r, 1e-8, 7).expect("valid average fixture")
}

pub fn needle(n: usize) -> Matrix {
    needle_matrix(n, n, 2, (0, 0), 1e6, 7).expect("valid needle fixture")
}

pub fn gaussian(m: usize, n: usize) -> Matrix {
    let mut g = rng::rng(11);
    Matrix::new(m, n, rng::normals(&mut g, m * n)).expect("valid gaussian fixture")
}
