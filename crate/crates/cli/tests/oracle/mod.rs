//! Dense reference computations, independent of the library kernels.

use nalgebra::DMatrix;
use septensor_core::{Ctd, Matrix};

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn norm2(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    singular_values(a)[0]
}

/// Entry `(i_1, …, i_d)` of term `l` times its weight, direction 0 fastest.
fn term_entries(u: &Ctd, l: usize) -> Vec<f64> {
    let dims = u.dims();
    let mut out = vec![u.svals()[l]];
    for (j, &m) in dims.iter().enumerate() {
        let v = u.vector(j, l);
        let mut next = Vec::with_capacity(out.len() * m);
        for &x in v {
            next.extend(out.iter().map(|&y| y * x));
        }
        out = next;
    }
    out
}

/// `N × r` matrix whose columns are the weighted, vectorized terms.
pub fn term_matrix(u: &Ctd) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = (0..u.rank()).map(|l| term_entries(u, l)).collect();
    let n = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, u.rank(), |i, l| cols[l][i])
}

pub fn dense(u: &Ctd) -> Vec<f64> {
    let t = term_matrix(u);
    (0..t.nrows()).map(|i| t.row(i).sum()).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Dense `Σ_k ⊗_j F_kj` with direction 0 as the fastest index.
pub fn kron_sum_dense(weights: &[f64], factors: &[Vec<DMatrix<f64>>]) -> DMatrix<f64> {
    let mut total: Option<DMatrix<f64>> = None;
    for (w, fs) in weights.iter().zip(factors) {
        let mut acc = DMatrix::from_element(1, 1, *w);
        for f in fs {
            acc = f.kronecker(&acc);
        }
        total = Some(match total {
            None => acc,
            Some(t) => t + acc,
        });
    }
    total.expect("at least one term")
}
