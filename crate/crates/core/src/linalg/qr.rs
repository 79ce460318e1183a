//! Householder QR, with and without column pivoting.

use super::matrix::{norm, Matrix};
use crate::error::{Error, Result};

/// Squared ratio (downdated / last exactly computed) below which a column
/// norm is recomputed from scratch.
const NORM_RECOMPUTE_RATIO: f64 = 1e-8;

/// `A·P_c = Q·R` truncated at `rank` columns of `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotedQr {
    /// m×k, orthonormal columns.
    pub q: Matrix,
    /// k×n upper-trapezoidal, columns in pivoted order.
    pub r: Matrix,
    /// `perm[j]` is the original index of the column in position `j`.
    pub perm: Vec<usize>,
    pub rank: usize,
    /// The (m−k)×(n−k) trailing block left after `rank` reflections
    /// (`R₂₂` in the usual block notation). Its spectral norm is the exact
    /// truncation error `‖A·P_c − Q·R‖₂`.
    pub residual: Matrix,
}

impl PivotedQr {
    pub fn r11(&self) -> Matrix {
        let k = self.rank;
        Matrix::from_fn(k, k, |i, j| self.r[(i, j)])
    }

    pub fn r12(&self) -> Matrix {
        let k = self.rank;
        let n = self.r.cols();
        Matrix::from_fn(k, n - k, |i, j| self.r[(i, k + j)])
    }

    /// Spectral norm of the trailing block.
    pub fn residual_norm(&self) -> f64 {
        self.residual.norm2()
    }
}

/// Column-pivoted Householder QR.
///
/// Stops at the first step whose pivot column has trailing norm
/// `≤ tol·|R₁₁|` (or exactly zero), or after `max_rank` steps.
pub fn pivoted_qr(a: &Matrix, tol: f64, max_rank: Option<usize>) -> Result<PivotedQr> {
    if !a.is_finite() {
        return Err(Error::input("pivoted_qr: non-finite entries"));
    }
    if !(0.0..1.0).contains(&tol) {
        return Err(Error::input(format!(
            "pivoted_qr: tolerance {tol} outside [0, 1)"
        )));
    }
    let (m, n) = a.shape();
    let kmax = m.min(n).min(max_rank.unwrap_or(usize::MAX));
    let mut work = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<f64> = (0..n).map(|j| norm(work.col(j))).collect();
    let mut exact = norms.clone();
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(kmax);
    let mut r11 = 0.0;
    let mut rank = 0;

    for step in 0..kmax {
        // Strict comparison: ties go to the lowest index.
        let mut p = step;
        for j in step + 1..n {
            if norms[j] > norms[p] {
                p = j;
            }
        }
        if p != step {
            work.swap_cols(step, p);
            norms.swap(step, p);
            exact.swap(step, p);
            perm.swap(step, p);
        }
        let alpha = norm(&work.col(step)[step..]);
        if step == 0 {
            r11 = alpha;
        }
        if alpha == 0.0 || alpha <= tol * r11 {
            break;
        }
        let (v, beta) = householder(&work.col(step)[step..], alpha);
        apply_reflector(&mut work, step, step, &v, beta);
        reflectors.push((v, beta));
        rank = step + 1;

        for j in step + 1..n {
            if norms[j] == 0.0 {
                continue;
            }
            let rij = work[(step, j)];
            let downdated = norms[j] * norms[j] - rij * rij;
            if downdated <= NORM_RECOMPUTE_RATIO * exact[j] * exact[j] {
                let fresh = norm(&work.col(j)[step + 1..]);
                norms[j] = fresh;
                exact[j] = fresh;
            } else {
                norms[j] = downdated.sqrt();
            }
        }
    }

    Ok(assemble(work, perm, rank, &reflectors))
}

/// Unpivoted Householder QR, `steps` reflections (at most `min(m, n)`).
/// Returns the thin factors `Q` (m×steps) and `R` (steps×n).
pub fn householder_qr(a: &Matrix, steps: usize) -> (Matrix, Matrix) {
    let (m, n) = a.shape();
    let steps = steps.min(m).min(n);
    let mut work = a.clone();
    let mut reflectors = Vec::with_capacity(steps);
    for step in 0..steps {
        let alpha = norm(&work.col(step)[step..]);
        let (v, beta) = if alpha == 0.0 {
            (vec![0.0; m - step], 0.0)
        } else {
            householder(&work.col(step)[step..], alpha)
        };
        if beta != 0.0 {
            apply_reflector(&mut work, step, step, &v, beta);
        }
        reflectors.push((v, beta));
    }
    let qr = assemble(work, (0..n).collect(), steps, &reflectors);
    (qr.q, qr.r)
}

fn assemble(
    work: Matrix,
    perm: Vec<usize>,
    rank: usize,
    reflectors: &[(Vec<f64>, f64)],
) -> PivotedQr {
    let (m, n) = work.shape();
    let r = Matrix::from_fn(rank, n, |i, j| if i <= j { work[(i, j)] } else { 0.0 });
    let residual = Matrix::from_fn(m - rank, n - rank, |i, j| work[(rank + i, rank + j)]);
    let mut q = Matrix::zeros(m, rank);
    for i in 0..rank {
        q[(i, i)] = 1.0;
    }
    for (step, (v, beta)) in reflectors.iter().enumerate().rev() {
        if *beta != 0.0 {
            apply_reflector(&mut q, step, step, v, *beta);
        }
    }
    PivotedQr {
        q,
        r,
        perm,
        rank,
        residual,
    }
}

/// Reflector `H = I − β v vᵀ` mapping `x` onto `−sign(x₀)‖x‖ e₁`.
fn householder(x: &[f64], alpha: f64) -> (Vec<f64>, f64) {
    let mut v = x.to_vec();
    let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign * alpha;
    let vtv = alpha * (alpha + x[0].abs()) * 2.0;
    (v, 2.0 / vtv)
}

/// Applies `H` to rows `row0..` of columns `col0..` of `a`.
fn apply_reflector(a: &mut Matrix, row0: usize, col0: usize, v: &[f64], beta: f64) {
    for j in col0..a.cols() {
        let col = &mut a.col_mut(j)[row0..];
        let s: f64 = v.iter().zip(col.iter()).map(|(x, y)| x * y).sum();
        if s == 0.0 {
            continue;
        }
        let f = beta * s;
        for (c, &vi) in col.iter_mut().zip(v) {
            *c -= f * vi;
        }
    }
}

/// Solves `R·X = B` for upper-triangular square `R` by back substitution.
///
/// Diagonal entries below `1e-14·max|Rᵢᵢ|` are treated as zero and the
/// matching rows of `X` are set to zero (basic least-squares solution).
pub fn solve_upper(r: &Matrix, b: &Matrix) -> Matrix {
    let k = r.rows();
    assert_eq!(r.cols(), k);
    assert_eq!(b.rows(), k);
    let dmax = (0..k).fold(0.0_f64, |m, i| m.max(r[(i, i)].abs()));
    let cutoff = 1e-14 * dmax;
    let mut x = b.clone();
    for c in 0..b.cols() {
        let col = x.col_mut(c);
        for i in (0..k).rev() {
            let rii = r[(i, i)];
            if rii.abs() <= cutoff {
                col[i] = 0.0;
                continue;
            }
            let mut s = col[i];
            for j in i + 1..k {
                s -= r[(i, j)] * col[j];
            }
            col[i] = s / rii;
        }
    }
    x
}
