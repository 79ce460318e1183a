use super::Ctd;
use crate::error::Result;
use crate::linalg::{pivoted_qr, Matrix};

/// `U = Q·S`: per-direction orthonormal bases and a CTD of coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QFactorization {
    /// `Q_(j)`, `M_j × k_j` with orthonormal columns.
    pub q: Vec<Matrix>,
    /// Coefficients in the bases, direction sizes `k_j`.
    pub s: Ctd,
}

impl Ctd {
    /// Pivoted QR of each component matrix at `tol`. With `tol = 0` the
    /// factorization is exact and `‖S‖_F = ‖U‖_F`.
    pub fn q_factorize(&self, tol: f64) -> Result<QFactorization> {
        let r = self.rank();
        let mut q = Vec::with_capacity(self.ndim());
        let mut s = Vec::with_capacity(self.ndim());
        for c in self.components() {
            let qr = pivoted_qr(c, tol, None)?;
            let mut coeff = Matrix::zeros(qr.rank, r);
            for (pos, &orig) in qr.perm.iter().enumerate() {
                coeff.col_mut(orig).copy_from_slice(qr.r.col(pos));
            }
            q.push(qr.q);
            s.push(coeff);
        }
        Ok(QFactorization {
            q,
            s: Ctd::from_raw(self.svals().to_vec(), s)?,
        })
    }
}

impl QFactorization {
    /// `Q·S` as a CTD over the original direction sizes.
    pub fn reconstruct(&self) -> Result<Ctd> {
        self.expand(&self.s)
    }

    /// `Q·T` for any CTD `t` in the coefficient space (e.g. a reduced `S`).
    pub fn expand(&self, t: &Ctd) -> Result<Ctd> {
        let comps = self
            .q
            .iter()
            .zip(t.components())
            .map(|(q, c)| q.matmul(c))
            .collect();
        Ctd::from_raw(t.svals().to_vec(), comps)
    }
}
