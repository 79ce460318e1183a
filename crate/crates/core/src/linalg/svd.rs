//! One-sided (Hestenes) Jacobi SVD.

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order.
///
/// Works on the orientation with fewer columns. One-sided Jacobi keeps high
/// relative accuracy for the small singular values, which the rank tests rely on.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(Error::input("singular_values: non-finite entries"));
    }
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let work = if a.cols() > a.rows() {
        a.transpose()
    } else {
        a.clone()
    };
    let (w, _) = jacobi(work, false);
    let mut s: Vec<f64> = (0..w.cols()).map(|j| norm(w.col(j))).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Thin SVD `A = U·diag(s)·Vᵀ` with `min(m, n)` triplets, descending.
pub fn svd(a: &Matrix) -> Result<(Matrix, Vec<f64>, Matrix)> {
    if !a.is_finite() {
        return Err(Error::input("svd: non-finite entries"));
    }
    if a.cols() > a.rows() {
        let (u, s, v) = svd(&a.transpose())?;
        return Ok((v, s, u));
    }
    let (w, v) = jacobi(a.clone(), true);
    let v = v.expect("vectors requested");
    let n = w.cols();
    let s: Vec<f64> = (0..n).map(|j| norm(w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]).then(i.cmp(&j)));

    let m = w.rows();
    let mut u = Matrix::zeros(m, n);
    for (dst, &src) in order.iter().enumerate() {
        let sj = s[src];
        if sj > 0.0 {
            for (o, x) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *o = x / sj;
            }
        }
    }
    let v = v.select_columns(&order);
    let s = order.iter().map(|&i| s[i]).collect();
    Ok((u, s, v))
}

/// Orthogonalizes the columns of `w` in place. Returns `(A·V, V)`.
fn jacobi(mut w: Matrix, want_v: bool) -> (Matrix, Option<Matrix>) {
    let n = w.cols();
    let mut v = want_v.then(|| Matrix::identity(n));
    let tol = f64::EPSILON * (w.rows() as f64).sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let app = dot(w.col(p), w.col(p));
                let aqq = dot(w.col(q), w.col(q));
                let apq = dot(w.col(p), w.col(q));
                if apq == 0.0 || apq.abs() <= tol * (app.sqrt() * aqq.sqrt()) {
                    continue;
                }
                rotated = true;
                // Rutishauser's stable rotation.
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + 1f64.hypot(zeta));
                let c = 1.0 / 1f64.hypot(t);
                let s = c * t;
                rotate(&mut w, p, q, c, s);
                if let Some(v) = v.as_mut() {
                    rotate(v, p, q, c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

fn rotate(a: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let m = a.rows();
    let data = a.as_mut_slice();
    let (left, right) = data.split_at_mut(q * m);
    let cp = &mut left[p * m..(p + 1) * m];
    let cq = &mut right[..m];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}
