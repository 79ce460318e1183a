//! Dense kernels: pivoted QR, matrix IDs, symmetric ID, Jacobi SVD.

mod chol;
mod eigen;
mod id;
mod matrix;
mod qr;
mod svd;
mod sym_id;

pub use chol::{cholesky, cholesky_solve};
pub use eigen::symmetric_eigenvalues;
pub use id::{matrix_id, randomized_matrix_id, randomized_range, MatrixId, RankSpec};
pub use matrix::{dot, norm, Matrix};
pub use qr::{householder_qr, pivoted_qr, solve_upper, PivotedQr};
pub use svd::{singular_values, svd};
pub use sym_id::{sym_id, SymId};
