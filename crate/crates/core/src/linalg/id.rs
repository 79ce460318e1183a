//! Column interpolative decompositions, deterministic and randomized.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::qr::{householder_qr, pivoted_qr, solve_upper};
use crate::error::{Error, Result};

/// Target for a rank-revealing step: a fixed rank, or a relative accuracy
/// applied as the cutoff `|R_kk| ≤ ε·|R_11|` on the pivoted QR diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RankSpec {
    Fixed(usize),
    Accuracy(f64),
}

impl RankSpec {
    pub(crate) fn validate(self, max: usize) -> Result<()> {
        match self {
            RankSpec::Fixed(0) => Err(Error::InvalidRank("rank must be at least 1".into())),
            RankSpec::Fixed(k) if k > max => Err(Error::InvalidRank(format!(
                "requested rank {k} exceeds the maximum {max}"
            ))),
            RankSpec::Accuracy(eps) if !(eps > 0.0 && eps < 1.0) => {
                Err(Error::input(format!("accuracy {eps} outside (0, 1)")))
            }
            _ => Ok(()),
        }
    }

    fn qr_args(self) -> (f64, Option<usize>) {
        match self {
            RankSpec::Fixed(k) => (0.0, Some(k)),
            RankSpec::Accuracy(eps) => (eps, None),
        }
    }
}

/// `A ≈ A_c · P` with `A_c` a subset of the columns of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixId {
    pub skeleton_indices: Vec<usize>,
    /// k×n; identity on the skeleton columns.
    pub p: Matrix,
    /// m×k, copied bit-for-bit from the input.
    pub a_c: Matrix,
}

impl MatrixId {
    pub fn rank(&self) -> usize {
        self.skeleton_indices.len()
    }

    pub fn reconstruct(&self) -> Matrix {
        self.a_c.matmul(&self.p)
    }
}

/// Deterministic ID through pivoted QR.
///
/// The interpolation matrix `T = R₁₁⁻¹R₁₂` is post-processed by swapping a
/// skeleton column with a remaining one while some `|T_ij| > 1`. Each swap
/// grows `|det R₁₁|` by `|T_ij|`, so the loop ends; afterwards every entry
/// of `P` is bounded by one.
pub fn matrix_id(a: &Matrix, spec: RankSpec) -> Result<MatrixId> {
    let (m, n) = a.shape();
    spec.validate(m.min(n))?;
    let (tol, cap) = spec.qr_args();
    let qr = pivoted_qr(a, tol, cap)?;
    let k = qr.rank;
    let mut perm = qr.perm.clone();
    let mut t = solve_upper(&qr.r11(), &qr.r12());

    let max_swaps = 4 * n + 16;
    for _ in 0..max_swaps {
        let Some((i, j)) = largest_above_one(&t) else {
            break;
        };
        perm.swap(i, k + j);
        let (_, r) = householder_qr(&a.select_columns(&perm), k);
        let r11 = Matrix::from_fn(k, k, |i, j| r[(i, j)]);
        let r12 = Matrix::from_fn(k, n - k, |i, j| r[(i, k + j)]);
        t = solve_upper(&r11, &r12);
    }

    let skeleton = perm[..k].to_vec();
    let mut p = Matrix::zeros(k, n);
    for (i, &s) in skeleton.iter().enumerate() {
        p[(i, s)] = 1.0;
    }
    for (j, &c) in perm[k..].iter().enumerate() {
        p.col_mut(c).copy_from_slice(t.col(j));
    }
    Ok(MatrixId {
        a_c: a.select_columns(&skeleton),
        skeleton_indices: skeleton,
        p,
    })
}

fn largest_above_one(t: &Matrix) -> Option<(usize, usize)> {
    let mut best = None;
    let mut val = 1.0;
    for j in 0..t.cols() {
        for (i, x) in t.col(j).iter().enumerate() {
            if x.abs() > val {
                val = x.abs();
                best = Some((i, j));
            }
        }
    }
    best
}

/// m×ℓ orthonormal basis approximating the range of `a` from `A·R`,
/// `R` an n×ℓ standard Gaussian sketch.
pub fn randomized_range<R: Rng + ?Sized>(a: &Matrix, ell: usize, rng: &mut R) -> Result<Matrix> {
    let (m, n) = a.shape();
    if ell == 0 || ell > m.min(n) {
        return Err(Error::InvalidRank(format!(
            "sketch size {ell} must lie in 1..={}",
            m.min(n)
        )));
    }
    let r = gaussian(n, ell, rng);
    let (q, _) = householder_qr(&a.matmul(&r), ell);
    Ok(q)
}

/// ID of `Y = RᵀA` (R m×ℓ Gaussian) lifted back to `A`.
pub fn randomized_matrix_id<R: Rng + ?Sized>(
    a: &Matrix,
    ell: usize,
    spec: RankSpec,
    rng: &mut R,
) -> Result<MatrixId> {
    let (m, n) = a.shape();
    spec.validate(m.min(n))?;
    if ell == 0 {
        return Err(Error::InvalidRank("sketch size must be positive".into()));
    }
    if let RankSpec::Fixed(k) = spec {
        if k > ell {
            return Err(Error::InvalidRank(format!(
                "rank {k} exceeds sketch size {ell}"
            )));
        }
    }
    let r = gaussian(m, ell, rng);
    let y = r.tr_matmul(a);
    let spec = match spec {
        RankSpec::Fixed(k) => RankSpec::Fixed(k.min(ell.min(n))),
        s => s,
    };
    let id = matrix_id(&y, spec)?;
    Ok(MatrixId {
        a_c: a.select_columns(&id.skeleton_indices),
        skeleton_indices: id.skeleton_indices,
        p: id.p,
    })
}

fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
}
