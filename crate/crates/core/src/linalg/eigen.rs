use super::matrix::Matrix;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending.
///
/// Only the upper triangle is read.
pub fn symmetric_eigenvalues(b: &Matrix) -> Vec<f64> {
    let n = b.rows();
    assert_eq!(n, b.cols(), "symmetric_eigenvalues needs a square matrix");
    let mut a = Matrix::from_fn(n, n, |i, j| if i <= j { b[(i, j)] } else { b[(j, i)] });

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off <= 1e-32 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + 1f64.hypot(theta));
                let c = 1.0 / 1f64.hypot(t);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
