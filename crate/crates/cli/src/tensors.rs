//! Test tensors used by the experiments.

use rand::seq::index::sample;
use septensor_core::linalg::{householder_qr, norm, Matrix};
use septensor_core::tensor_id::{random_vectors, Distribution, RandomTensorConfig};
use septensor_core::{Ctd, Result};

/// Seed offset separating tensor construction from the projections.
const TENSOR_STREAM: u64 = 0x7e45_0000_0000_0000;

fn tensor_cfg(seed: u64) -> RandomTensorConfig {
    RandomTensorConfig::new(Distribution::Normal, seed ^ TENSOR_STREAM)
}

/// `σ_l = exp(−l/2)`, `l = 1..=r`.
pub fn exp_decay(r: usize) -> Vec<f64> {
    (1..=r).map(|l| (-(l as f64) / 2.0).exp()).collect()
}

fn unit_columns(m: usize, cols: &[Vec<f64>]) -> Matrix {
    let unit: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let n = norm(c);
            c.iter().map(|x| x / n).collect()
        })
        .collect();
    Matrix::from_columns(m, &unit.iter().map(Vec::as_slice).collect::<Vec<_>>())
}

/// `r` terms with independent Gaussian unit vectors and `σ_l = exp(−l/2)`.
pub fn decaying_random(d: usize, m: usize, r: usize, seed: u64) -> Result<Ctd> {
    let dims = vec![m; d];
    let cfg = tensor_cfg(seed);
    let vecs: Vec<Vec<Vec<f64>>> = (0..r)
        .map(|l| random_vectors(&dims, &cfg, l as u64))
        .collect();
    let comps = (0..d)
        .map(|j| unit_columns(m, &vecs.iter().map(|v| v[j].clone()).collect::<Vec<_>>()))
        .collect();
    Ctd::new(exp_decay(r), comps)
}

/// First `independent` terms as in [`decaying_random`]; each later term
/// repeats the vectors of a distinct, randomly chosen earlier term. All
/// terms keep `σ_l = exp(−l/2)`.
pub fn redundant(d: usize, m: usize, r: usize, independent: usize, seed: u64) -> Result<Ctd> {
    if independent == 0 || independent > r || r - independent > independent {
        return Err(septensor_core::Error::InvalidInput(format!(
            "need 0 < r - independent <= independent <= r, got r = {r}, independent = {independent}"
        )));
    }
    let base = decaying_random(d, m, independent, seed)?;
    let mut rng = tensor_cfg(seed).stream(u64::MAX);
    let picks = sample(&mut rng, independent, r - independent).into_vec();
    let cols: Vec<usize> = (0..independent).chain(picks).collect();
    let comps = base
        .components()
        .iter()
        .map(|c| c.select_columns(&cols))
        .collect();
    Ctd::new(exp_decay(r), comps)
}

/// Expansion of `⊗_j (Σ_l w_l u_j^(l))` with orthonormal `u_j^(l)` into its
/// `L^d` orthogonal terms. Term `(l_1, …, l_d)` has weight `Π w_{l_j}`;
/// terms are ordered with direction 0 varying fastest.
pub fn orthogonal_product(weights: &[f64], d: usize, m: usize, seed: u64) -> Result<Ctd> {
    let big_l = weights.len();
    if big_l == 0 || big_l > m || d == 0 {
        return Err(septensor_core::Error::InvalidInput(format!(
            "need 1 <= L <= m and d >= 1, got L = {big_l}, m = {m}, d = {d}"
        )));
    }
    let cfg = tensor_cfg(seed);
    let bases: Vec<Matrix> = (0..d)
        .map(|j| {
            let raw = random_vectors(&[m * big_l], &cfg, j as u64).remove(0);
            let a = Matrix::from_col_major(m, big_l, raw)?;
            let (q, _) = householder_qr(&a, big_l);
            Ok(q.select_columns(&(0..big_l).collect::<Vec<_>>()))
        })
        .collect::<Result<_>>()?;
    let count = big_l.pow(d as u32);
    let mut svals = Vec::with_capacity(count);
    let mut cols: Vec<Vec<usize>> = vec![Vec::with_capacity(count); d];
    for t in 0..count {
        let mut rest = t;
        let mut w = 1.0;
        for c in cols.iter_mut() {
            let l = rest % big_l;
            rest /= big_l;
            w *= weights[l];
            c.push(l);
        }
        svals.push(w);
    }
    let comps = bases
        .iter()
        .zip(&cols)
        .map(|(b, c)| b.select_columns(c))
        .collect();
    Ctd::new(svals, comps)
}

/// Terms kept by optimal Frobenius truncation of orthogonal terms: drop the
/// smallest while the dropped energy stays within `(eps·‖u‖_F)²`. Returns
/// `None` when `eps` lands inside a group of equal weights, where the kept
/// set is not unique.
pub fn parseval_set(svals: &[f64], eps: f64) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..svals.len()).collect();
    order.sort_by(|&a, &b| svals[a].total_cmp(&svals[b]));
    let total: f64 = svals.iter().map(|s| s * s).sum();
    let budget = eps * eps * total;
    let mut tail = 0.0;
    let mut n_drop = 0;
    while n_drop + 1 < order.len() {
        let next = tail + svals[order[n_drop]].powi(2);
        if next > budget {
            break;
        }
        tail = next;
        n_drop += 1;
    }
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if n_drop > 0 && n_drop < order.len() && rel(svals[order[n_drop - 1]], svals[order[n_drop]]) {
        return None;
    }
    let mut kept: Vec<usize> = order[n_drop..].to_vec();
    kept.sort_unstable();
    Some(kept)
}
