//! Fixtures shared by the criterion benches.

use septensor_core::tensor_id::{random_vectors, Distribution, RandomTensorConfig};
use septensor_core::{Ctd, Matrix};

/// `r` Gaussian unit-vector terms with `σ_l = exp(−l/2)`.
pub fn decaying(d: usize, m: usize, r: usize, seed: u64) -> Ctd {
    let dims = vec![m; d];
    let cfg = RandomTensorConfig::new(Distribution::Normal, seed);
    let terms: Vec<Vec<Vec<f64>>> = (0..r)
        .map(|l| random_vectors(&dims, &cfg, l as u64))
        .collect();
    let comps = (0..d)
        .map(|j| Matrix::from_fn(m, r, |i, l| terms[l][j][i]))
        .collect();
    let w = (0..r).map(|l| (-(l as f64) / 2.0).exp()).collect();
    Ctd::from_raw(w, comps).expect("generic terms")
}

/// Dense `m × n` matrix of rank `k` with singular values `2^{-i}`.
pub fn low_rank(m: usize, n: usize, k: usize, seed: u64) -> Matrix {
    let u = decaying(2, m.max(n), k, seed);
    Matrix::from_fn(m, n, |i, c| {
        (0..k)
            .map(|l| 0.5f64.powi(l as i32) * u.vector(0, l)[i] * u.vector(1, l)[c])
            .sum()
    })
}
