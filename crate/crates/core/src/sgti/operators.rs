use serde::{Deserialize, Serialize};

use crate::ctd::SepOperator;
use crate::error::{Error, Result};
use crate::linalg::{norm, Matrix};
use crate::tensor_id::truncate_by_svalue;

/// Accuracy order of the central second-difference stencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StencilOrder {
    Second,
    Eighth,
}

impl StencilOrder {
    pub fn from_order(order: u32) -> Result<Self> {
        match order {
            2 => Ok(StencilOrder::Second),
            8 => Ok(StencilOrder::Eighth),
            o => Err(Error::Config(format!(
                "stencil order must be 2 or 8, got {o}"
            ))),
        }
    }

    /// `[c_0, c_1, …]`, symmetric about the centre.
    fn coefficients(self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[-2.0, 1.0],
            StencilOrder::Eighth => &[
                -205.0 / 72.0,
                8.0 / 5.0,
                -1.0 / 5.0,
                8.0 / 315.0,
                -1.0 / 560.0,
            ],
        }
    }
}

/// Second-derivative matrix on the unit interval.
///
/// Periodic: `m` nodes with `h = 1/m`, circulant. Otherwise: `m` interior
/// nodes with `h = 1/(m+1)` and zero values outside (the stencil is simply
/// cut at the boundary).
pub fn build_laplacian_1d(m: usize, order: StencilOrder, periodic: bool) -> Result<Matrix> {
    let c = order.coefficients();
    let w = c.len() - 1;
    if m < 2 * w + 1 {
        return Err(Error::shape(format!(
            "{m} nodes are too few for a stencil of half-width {w}"
        )));
    }
    let h = if periodic {
        1.0 / m as f64
    } else {
        1.0 / (m + 1) as f64
    };
    let scale = 1.0 / (h * h);
    let mut a = Matrix::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = c[0] * scale;
        for (k, &ck) in c.iter().enumerate().skip(1) {
            if periodic {
                a[(i, (i + k) % m)] += ck * scale;
                a[(i, (i + m - k) % m)] += ck * scale;
            } else {
                if i + k < m {
                    a[(i, i + k)] = ck * scale;
                }
                if i >= k {
                    a[(i, i - k)] = ck * scale;
                }
            }
        }
    }
    Ok(a)
}

/// `Σ_j I ⊗ … ⊗ A ⊗ … ⊗ I` with `A` in direction `j`; rank `d`.
pub fn build_kronecker_sum(a: &Matrix, d: usize) -> Result<SepOperator> {
    if a.rows() != a.cols() || a.is_empty() {
        return Err(Error::shape(
            "Kronecker sum needs a non-empty square matrix",
        ));
    }
    if d == 0 {
        return Err(Error::input("dimension must be at least 1"));
    }
    let id = Matrix::identity(a.rows());
    let factors = (0..d)
        .map(|t| {
            (0..d)
                .map(|j| if j == t { a.clone() } else { id.clone() })
                .collect()
        })
        .collect();
    SepOperator::from_terms(vec![1.0; d], factors)
}

/// `I − ⊗_j c_j c_jᵀ` with `c_j` the normalized constant vector: the
/// orthogonal projector onto tensors with zero mean.
pub fn build_nullspace_projector(dims: &[usize]) -> Result<SepOperator> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::input(format!("invalid dims {dims:?}")));
    }
    let consts: Vec<Vec<f64>> = dims.iter().map(|&m| vec![1.0; m]).collect();
    build_rank_one_projector(&consts)
}

/// `I − ⊗_j c_j c_jᵀ` with `c_j = v_j/‖v_j‖`.
pub fn build_rank_one_projector(vectors: &[Vec<f64>]) -> Result<SepOperator> {
    if vectors.is_empty() {
        return Err(Error::input("at least one direction is required"));
    }
    let mut ident = Vec::with_capacity(vectors.len());
    let mut outer = Vec::with_capacity(vectors.len());
    for v in vectors {
        let n = norm(v);
        if v.is_empty() || !(n > 0.0 && n.is_finite()) {
            return Err(Error::input(
                "projector vectors must be non-zero and finite",
            ));
        }
        let m = v.len();
        ident.push(Matrix::identity(m));
        outer.push(Matrix::from_fn(m, m, |i, k| v[i] * v[k] / (n * n)));
    }
    SepOperator::from_terms(vec![1.0, -1.0], vec![ident, outer])
}

/// Orthonormal real Fourier basis on `m` periodic nodes, one mode per
/// column: the constant, then cosine/sine pairs of increasing frequency,
/// then the alternating mode when `m` is even.
pub fn fourier_basis(m: usize) -> Result<Matrix> {
    if m == 0 {
        return Err(Error::input("empty basis"));
    }
    let mf = m as f64;
    let mut cols: Vec<Vec<f64>> = vec![vec![1.0 / mf.sqrt(); m]];
    let c = (2.0 / mf).sqrt();
    for k in 1..=(m - 1) / 2 {
        let w = 2.0 * std::f64::consts::PI * k as f64 / mf;
        cols.push((0..m).map(|i| c * (w * i as f64).cos()).collect());
        cols.push((0..m).map(|i| c * (w * i as f64).sin()).collect());
    }
    if m.is_multiple_of(2) {
        cols.push(
            (0..m)
                .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 } / mf.sqrt())
                .collect(),
        );
    }
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    Ok(Matrix::from_columns(m, &refs))
}

/// Frequency of each column of [`fourier_basis`].
pub fn fourier_frequencies(m: usize) -> Vec<usize> {
    let mut f = vec![0];
    for k in 1..=(m.max(1) - 1) / 2 {
        f.extend([k, k]);
    }
    if m.is_multiple_of(2) && m > 0 {
        f.push(m / 2);
    }
    f
}

/// Diagonal scaling `1/(2π·2^⌊log₂ k⌋)` for each Fourier column of
/// frequency `k ≥ 1`, and `1` for the constant. With it the scaled second
/// derivative has its nonzero eigenvalues within a factor of about 4.
pub fn dyadic_band_scaling(m: usize) -> Vec<f64> {
    fourier_frequencies(m)
        .into_iter()
        .map(|k| match k {
            0 => 1.0,
            k => 1.0 / (2.0 * std::f64::consts::PI * (1u64 << k.ilog2()) as f64),
        })
        .collect()
}

/// `S·Qᵀ·A·Q·S` with `S = diag(s)`; `Q` must be orthogonal.
pub fn similarity_scale(a: &Matrix, q: &Matrix, s: &[f64]) -> Result<Matrix> {
    let m = a.rows();
    if a.cols() != m || q.shape() != (m, m) || s.len() != m {
        return Err(Error::shape(
            "similarity needs square A, Q of the same size and m scales",
        ));
    }
    let defect = q.tr_matmul(q).sub(&Matrix::identity(m)).max_abs();
    if defect > 1e-10 {
        return Err(Error::input(format!(
            "Q is not orthogonal (defect {defect:e})"
        )));
    }
    let t = q.tr_matmul(&a.matmul(q));
    Ok(Matrix::from_fn(m, m, |i, k| s[i] * t[(i, k)] * s[k]))
}

/// `I + G_c∘A_v`, then terms with small s-values dropped at `trunc_eps`
/// (relative, as in [`truncate_by_svalue`]).
pub fn precondition_compose(
    g_c: &SepOperator,
    a_v: &SepOperator,
    trunc_eps: f64,
) -> Result<SepOperator> {
    let id = SepOperator::identity(g_c.dims())?;
    let sum = id.add(&g_c.compose(a_v)?)?;
    let kept = truncate_by_svalue(sum.as_ctd(), trunc_eps)?;
    SepOperator::from_ctd(sum.dims().to_vec(), kept.reduced)
}

/// `−cos(π l/(n−1))`, `l = 0..n`: Clenshaw-Curtis nodes on `[−1, 1]`.
pub fn clenshaw_curtis_nodes(n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::input("at least one node is required")),
        1 => Ok(vec![0.0]),
        _ => Ok((0..n)
            .map(|l| -(std::f64::consts::PI * l as f64 / (n - 1) as f64).cos())
            .collect()),
    }
}
