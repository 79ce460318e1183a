use super::eigen::symmetric_eigenvalues;
use super::id::RankSpec;
use super::matrix::Matrix;
use super::qr::{householder_qr, pivoted_qr, solve_upper};
use crate::error::{Error, Result};

/// Symmetric ID `B ≈ Pᵀ·G_s·P`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymId {
    pub skeleton_indices: Vec<usize>,
    /// k×n; identity on the skeleton columns.
    pub p: Matrix,
    /// `B` restricted to the skeleton rows and columns.
    pub g_s: Matrix,
    /// Spectral norm of the trailing block of the pivoted QR of `B`.
    pub eps_k: f64,
    /// Set when `B` has an eigenvalue below `−1e-10·‖B‖₂`; the error bound
    /// is then not guaranteed.
    pub indefinite: bool,
}

impl SymId {
    pub fn rank(&self) -> usize {
        self.skeleton_indices.len()
    }

    pub fn reconstruct(&self) -> Matrix {
        self.p.tr_matmul(&self.g_s.matmul(&self.p))
    }
}

/// Symmetric ID of a PSD matrix.
///
/// Skeleton from a pivoted QR of `B`; then with `B_s = B[skel, :]` in pivot
/// order, an unpivoted QR `B_s = Q̃·[R̃₁₁ | R̃₁₂]` gives `S = R̃₁₁⁻¹·R̃₁₂`, so that
/// `B[skel, rest] = G_s·S` and `P = [I | S]` in pivot order.
pub fn sym_id(b: &Matrix, spec: RankSpec) -> Result<SymId> {
    let n = b.rows();
    if b.cols() != n {
        return Err(Error::shape(format!(
            "sym_id needs a square matrix, got {}x{}",
            n,
            b.cols()
        )));
    }
    if !b.is_finite() {
        return Err(Error::input("sym_id: non-finite entries"));
    }
    let scale = b.max_abs();
    for j in 0..n {
        for i in 0..j {
            if (b[(i, j)] - b[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::input(format!(
                    "sym_id: input not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    spec.validate(n)?;
    let ev = symmetric_eigenvalues(b);
    let bnorm = ev.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let indefinite = ev.first().is_some_and(|&l| l < -1e-10 * bnorm);

    let (tol, cap) = match spec {
        RankSpec::Fixed(k) => (0.0, Some(k)),
        RankSpec::Accuracy(eps) => (eps, None),
    };
    let qr = pivoted_qr(b, tol, cap)?;
    let k = qr.rank;
    let eps_k = qr.residual_norm();
    let skeleton = qr.perm[..k].to_vec();
    let rest = &qr.perm[k..];

    let bs = b.select(&skeleton, &qr.perm);
    let (_, r) = householder_qr(&bs, k);
    let r11 = Matrix::from_fn(k, k, |i, j| r[(i, j)]);
    let r12 = Matrix::from_fn(k, n - k, |i, j| r[(i, k + j)]);
    let s = solve_upper(&r11, &r12);

    let mut p = Matrix::zeros(k, n);
    for (i, &c) in skeleton.iter().enumerate() {
        p[(i, c)] = 1.0;
    }
    for (j, &c) in rest.iter().enumerate() {
        p.col_mut(c).copy_from_slice(s.col(j));
    }
    Ok(SymId {
        g_s: b.select(&skeleton, &skeleton),
        skeleton_indices: skeleton,
        p,
        eps_k,
        indefinite,
    })
}
