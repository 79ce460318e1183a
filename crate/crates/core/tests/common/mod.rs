#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use septensor_core::{Ctd, Matrix};

pub fn to_na(a: &Matrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a[(i, j)])
}

pub fn from_na(a: &DMatrix<f64>) -> Matrix {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Singular values, largest first.
pub fn svals(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn norm2(a: &DMatrix<f64>) -> f64 {
    svals(a).first().copied().unwrap_or(0.0)
}

/// Dense tensor with direction 0 fastest, built term by term.
pub fn dense(u: &Ctd) -> Vec<f64> {
    let mut total: Vec<f64> = Vec::new();
    for l in 0..u.rank() {
        let mut t = vec![u.svals()[l]];
        for j in 0..u.ndim() {
            t = u
                .vector(j, l)
                .iter()
                .flat_map(|&x| t.iter().map(move |&y| x * y))
                .collect();
        }
        if total.is_empty() {
            total = t;
        } else {
            total.iter_mut().zip(&t).for_each(|(a, b)| *a += b);
        }
    }
    total
}

pub fn l2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn matrix(
    rows: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Matrix> {
    (rows, cols).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-1.0f64..1.0, m * n)
            .prop_map(move |v| Matrix::from_col_major(m, n, v).unwrap())
    })
}

/// Random CTD with weights in `[0.1, 2]`; components are normalized by
/// the constructor.
pub fn ctd(
    d: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
    r: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = Ctd> {
    (proptest::collection::vec(m, d), r).prop_flat_map(|(dims, r)| {
        let comps: Vec<_> = dims
            .iter()
            .map(|&mj| {
                proptest::collection::vec(0.05f64..1.0, mj * r).prop_flat_map(move |mag| {
                    proptest::collection::vec(any::<bool>(), mj * r).prop_map(move |sign| {
                        let v = mag
                            .iter()
                            .zip(&sign)
                            .map(|(x, &s)| if s { *x } else { -*x })
                            .collect();
                        Matrix::from_col_major(mj, r, v).unwrap()
                    })
                })
            })
            .collect();
        (comps, proptest::collection::vec(0.1f64..2.0, r))
            .prop_map(|(c, w)| Ctd::from_raw(w, c).unwrap())
    })
}

/// Generic CTD from the crate's own random vectors, s-values `w`.
pub fn seeded_ctd(dims: &[usize], w: &[f64], seed: u64) -> Ctd {
    use septensor_core::tensor_id::{random_vectors, Distribution, RandomTensorConfig};
    let cfg = RandomTensorConfig::new(Distribution::Normal, seed ^ 0x5eed);
    let terms: Vec<Vec<Vec<f64>>> = (0..w.len())
        .map(|l| {
            random_vectors(dims, &cfg, l as u64)
                .into_iter()
                .map(|v| {
                    let n = l2(&v);
                    v.into_iter().map(|x| x / n).collect()
                })
                .collect()
        })
        .collect();
    let comps = dims
        .iter()
        .enumerate()
        .map(|(j, &m)| Matrix::from_fn(m, w.len(), |i, l| terms[l][j][i]))
        .collect();
    Ctd::from_raw(w.to_vec(), comps).unwrap()
}

/// `base` with every term repeated `copies` times at scaled weights.
pub fn with_duplicates(base: &Ctd, copies: usize) -> Ctd {
    let idx: Vec<usize> = (0..copies).flat_map(|_| 0..base.rank()).collect();
    let coeffs: Vec<f64> = idx
        .iter()
        .enumerate()
        .map(|(t, &l)| base.svals()[l] * (0.5 + t as f64 * 0.37 % 1.0) / copies as f64)
        .collect();
    base.select_terms(&idx)
        .unwrap()
        .with_coefficients(&coeffs)
        .unwrap()
}
