use serde::{Deserialize, Serialize};

use super::{checked_size, Ctd};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Separated operator `Σ_l σ_l A_1^(l) ⊗ … ⊗ A_d^(l)`.
///
/// Stored as a [`Ctd`] whose direction-`j` "vectors" are the column-major
/// `M_j × M_j` factors, each of unit Frobenius norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SepOperator {
    dims: Vec<usize>,
    terms: Ctd,
}

impl SepOperator {
    pub fn from_ctd(dims: Vec<usize>, terms: Ctd) -> Result<Self> {
        let flat: Vec<usize> = dims.iter().map(|m| m * m).collect();
        if terms.dims() != flat {
            return Err(Error::shape(format!(
                "operator with dims {dims:?} needs vector sizes {flat:?}, got {:?}",
                terms.dims()
            )));
        }
        Ok(SepOperator { dims, terms })
    }

    /// `factors[l][j]` is the direction-`j` factor of term `l`; weights may
    /// be signed and factors need not be normalized.
    pub fn from_terms(weights: Vec<f64>, factors: Vec<Vec<Matrix>>) -> Result<Self> {
        let first = factors.first().ok_or(Error::ZeroTensor)?;
        let dims: Vec<usize> = first.iter().map(Matrix::rows).collect();
        if factors.len() != weights.len() {
            return Err(Error::shape("one factor list per weight is required"));
        }
        let mut comps: Vec<Vec<f64>> = dims.iter().map(|_| Vec::new()).collect();
        for term in &factors {
            if term.len() != dims.len() {
                return Err(Error::shape("every term needs one factor per direction"));
            }
            for (j, f) in term.iter().enumerate() {
                if f.shape() != (dims[j], dims[j]) {
                    return Err(Error::shape(format!(
                        "factor in direction {j} is {}x{}, expected {}x{}",
                        f.rows(),
                        f.cols(),
                        dims[j],
                        dims[j]
                    )));
                }
                comps[j].extend_from_slice(f.as_slice());
            }
        }
        let comps = comps
            .into_iter()
            .zip(&dims)
            .map(|(data, &m)| Matrix::from_col_major(m * m, weights.len(), data))
            .collect::<Result<Vec<_>>>()?;
        SepOperator::from_ctd(dims, Ctd::from_raw(weights, comps)?)
    }

    /// `I`, as one term of factors `I/√M_j` and `σ = Π √M_j`.
    pub fn identity(dims: &[usize]) -> Result<Self> {
        let factors = dims.iter().map(|&m| Matrix::identity(m)).collect();
        SepOperator::from_terms(vec![1.0], vec![factors])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.terms.rank()
    }

    pub fn svals(&self) -> &[f64] {
        self.terms.svals()
    }

    pub fn as_ctd(&self) -> &Ctd {
        &self.terms
    }

    pub fn into_ctd(self) -> Ctd {
        self.terms
    }

    /// Normalized factor of term `l` in direction `j`.
    pub fn factor(&self, l: usize, j: usize) -> Matrix {
        let m = self.dims[j];
        Matrix::from_col_major(m, m, self.terms.vector(j, l).to_vec())
            .expect("stored factors are finite and non-empty")
    }

    fn check_dims(&self, dims: &[usize]) -> Result<()> {
        if self.dims != dims {
            return Err(Error::shape(format!(
                "operator dims {:?} vs {dims:?}",
                self.dims
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &SepOperator) -> Result<SepOperator> {
        self.check_dims(&other.dims)?;
        SepOperator::from_ctd(self.dims.clone(), self.terms.add(&other.terms)?)
    }

    pub fn scale(&self, alpha: f64) -> Result<SepOperator> {
        SepOperator::from_ctd(self.dims.clone(), self.terms.scale(alpha)?)
    }

    /// Term-wise transpose of every factor.
    pub fn transpose(&self) -> SepOperator {
        let comps = self
            .dims
            .iter()
            .enumerate()
            .map(|(j, &m)| {
                let c = self.terms.component(j);
                Matrix::from_fn(m * m, c.cols(), |i, l| {
                    let (row, col) = (i % m, i / m);
                    c[(col + row * m, l)]
                })
            })
            .collect();
        let terms = Ctd::new(self.terms.svals().to_vec(), comps).expect("transpose keeps norms");
        SepOperator {
            dims: self.dims.clone(),
            terms,
        }
    }

    /// `op(u)`, one output term per (operator term, input term) pair,
    /// operator terms outermost.
    pub fn apply(&self, u: &Ctd) -> Result<Ctd> {
        self.check_dims(&u.dims())?;
        let (ro, ru) = (self.rank(), u.rank());
        let mut weights = Vec::with_capacity(ro * ru);
        let mut comps: Vec<Vec<f64>> = self
            .dims
            .iter()
            .map(|&m| Vec::with_capacity(m * ro * ru))
            .collect();
        for a in 0..ro {
            for l in 0..ru {
                weights.push(self.svals()[a] * u.svals()[l]);
                for (j, &m) in self.dims.iter().enumerate() {
                    let f = self.terms.vector(j, a);
                    let x = u.vector(j, l);
                    let out = &mut comps[j];
                    for i in 0..m {
                        out.push((0..m).map(|k| f[i + k * m] * x[k]).sum());
                    }
                }
            }
        }
        let comps = comps
            .into_iter()
            .zip(&self.dims)
            .map(|(data, &m)| Matrix::from_col_major(m, ro * ru, data))
            .collect::<Result<Vec<_>>>()?;
        Ctd::from_raw(weights, comps)
    }

    /// `self ∘ other`, one term per pair with `self`'s terms outermost.
    pub fn compose(&self, other: &SepOperator) -> Result<SepOperator> {
        self.check_dims(&other.dims)?;
        let (ra, rb) = (self.rank(), other.rank());
        let mut weights = Vec::with_capacity(ra * rb);
        let mut comps: Vec<Vec<f64>> = self
            .dims
            .iter()
            .map(|&m| Vec::with_capacity(m * m * ra * rb))
            .collect();
        let fa: Vec<Vec<Matrix>> = (0..ra)
            .map(|l| (0..self.dims.len()).map(|j| self.factor(l, j)).collect())
            .collect();
        let fb: Vec<Vec<Matrix>> = (0..rb)
            .map(|l| (0..self.dims.len()).map(|j| other.factor(l, j)).collect())
            .collect();
        for (sa, ta) in self.svals().iter().zip(&fa) {
            for (sb, tb) in other.svals().iter().zip(&fb) {
                weights.push(sa * sb);
                for ((c, x), y) in comps.iter_mut().zip(ta).zip(tb) {
                    c.extend_from_slice(x.matmul(y).as_slice());
                }
            }
        }
        let comps = comps
            .into_iter()
            .zip(&self.dims)
            .map(|(data, &m)| Matrix::from_col_major(m * m, ra * rb, data))
            .collect::<Result<Vec<_>>>()?;
        SepOperator::from_ctd(self.dims.clone(), Ctd::from_raw(weights, comps)?)
    }

    /// Dense `N × N` matrix, `N = Π M_j`, first index fastest.
    pub fn densify(&self) -> Result<Matrix> {
        let n = checked_size(&self.dims)?;
        checked_size(&[n, n])?;
        let mut out = Matrix::zeros(n, n);
        for l in 0..self.rank() {
            let mut k = Matrix::from_col_major(1, 1, vec![self.svals()[l]])?;
            for j in 0..self.dims.len() {
                k = kron(&self.factor(l, j), &k);
            }
            out = out.add(&k);
        }
        Ok(out)
    }

    /// Frobenius norm of the operator as a tensor.
    pub fn frob_norm(&self) -> f64 {
        self.terms.frob_norm()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<SepOperator> {
        let op: SepOperator =
            serde_json::from_str(s).map_err(|e| Error::input(format!("operator JSON: {e}")))?;
        SepOperator::from_ctd(op.dims, op.terms)
    }
}

/// `a ⊗ b` with `b`'s index varying fastest.
pub(crate) fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}
