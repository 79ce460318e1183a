//! Canonical tensor decompositions and separated operators.

mod operator;
mod qfact;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, Matrix};

pub use operator::SepOperator;
pub use qfact::QFactorization;

/// Upper bound on the number of entries `densify` will materialize.
pub const DENSE_LIMIT: usize = 10_000_000;

const NORMALIZATION_TOL: f64 = 1e-12;

/// `U = Σ_l σ_l u_1^(l) ⊗ … ⊗ u_d^(l)` with `σ_l > 0` and unit columns.
///
/// Direction `j` is stored as an `M_j × r` matrix whose column `l` is
/// `u_j^(l)`. Term order is significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CtdJson", into = "CtdJson")]
pub struct Ctd {
    svals: Vec<f64>,
    components: Vec<Matrix>,
}

#[derive(Serialize, Deserialize)]
struct CtdJson {
    dims: Vec<usize>,
    rank: usize,
    svals: Vec<f64>,
    components: Vec<Vec<f64>>,
}

impl From<Ctd> for CtdJson {
    fn from(u: Ctd) -> Self {
        CtdJson {
            dims: u.dims(),
            rank: u.rank(),
            svals: u.svals,
            components: u.components.into_iter().map(Matrix::into_vec).collect(),
        }
    }
}

impl TryFrom<CtdJson> for Ctd {
    type Error = Error;

    fn try_from(j: CtdJson) -> Result<Self> {
        if j.svals.len() != j.rank || j.components.len() != j.dims.len() {
            return Err(Error::input(
                "inconsistent rank or dims in serialized tensor",
            ));
        }
        let comps = j
            .dims
            .iter()
            .zip(j.components)
            .map(|(&m, data)| Matrix::from_col_major(m, j.rank, data))
            .collect::<Result<Vec<_>>>()?;
        Ctd::new(j.svals, comps)
    }
}

impl Ctd {
    /// Validating constructor: positive finite s-values, consistent shapes,
    /// unit-norm columns.
    pub fn new(svals: Vec<f64>, components: Vec<Matrix>) -> Result<Self> {
        let r = svals.len();
        check_shapes(r, &components)?;
        if let Some(s) = svals.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::input(format!(
                "s-values must be positive and finite, got {s}"
            )));
        }
        for (j, c) in components.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::input(format!(
                    "direction {j} has non-finite entries"
                )));
            }
            for l in 0..r {
                let n = norm(c.col(l));
                if (n - 1.0).abs() > NORMALIZATION_TOL {
                    return Err(Error::input(format!(
                        "column {l} of direction {j} has norm {n}, expected 1"
                    )));
                }
            }
        }
        Ok(Ctd { svals, components })
    }

    /// Builds from arbitrary weights and columns, moving magnitudes into the
    /// s-values and signs into direction 0. Terms that vanish are dropped.
    pub fn from_raw(weights: Vec<f64>, mut components: Vec<Matrix>) -> Result<Self> {
        let r = weights.len();
        check_shapes(r, &components)?;
        if weights.iter().any(|w| !w.is_finite()) || components.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("non-finite weights or components"));
        }
        let mut svals = Vec::with_capacity(r);
        let mut keep = Vec::with_capacity(r);
        for (l, &w) in weights.iter().enumerate() {
            let mut s = w.abs();
            for c in components.iter_mut() {
                let col = c.col_mut(l);
                let n = norm(col);
                s *= n;
                if n > 0.0 {
                    col.iter_mut().for_each(|x| *x /= n);
                }
            }
            if s > 0.0 && s.is_finite() {
                if w < 0.0 {
                    components[0].col_mut(l).iter_mut().for_each(|x| *x = -*x);
                }
                svals.push(s);
                keep.push(l);
            }
        }
        if keep.is_empty() {
            return Err(Error::ZeroTensor);
        }
        if keep.len() < r {
            components = components.iter().map(|c| c.select_columns(&keep)).collect();
        }
        Ok(Ctd { svals, components })
    }

    /// Rank-one tensor `σ·⊗ x_j`; the vectors need not be normalized.
    pub fn rank_one(sigma: f64, vectors: &[Vec<f64>]) -> Result<Self> {
        let comps = vectors
            .iter()
            .map(|v| Matrix::from_col_major(v.len(), 1, v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ctd::from_raw(vec![sigma], comps)
    }

    pub fn rank(&self) -> usize {
        self.svals.len()
    }

    pub fn ndim(&self) -> usize {
        self.components.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(Matrix::rows).collect()
    }

    pub fn svals(&self) -> &[f64] {
        &self.svals
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &Matrix {
        &self.components[j]
    }

    /// `u_j^(l)`.
    pub fn vector(&self, j: usize, l: usize) -> &[f64] {
        self.components[j].col(l)
    }

    /// `(Σ σ_l²)^{1/2}`, the Frobenius norm of the matrix of scaled terms.
    pub fn sval_norm(&self) -> f64 {
        norm(&self.svals)
    }

    /// Largest deviation of a column norm from one.
    pub fn normalization_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for c in &self.components {
            for l in 0..c.cols() {
                worst = worst.max((norm(c.col(l)) - 1.0).abs());
            }
        }
        worst
    }

    /// The sub-tensor made of terms `idx`, columns copied bit-for-bit.
    pub fn select_terms(&self, idx: &[usize]) -> Result<Ctd> {
        if idx.is_empty() {
            return Err(Error::ZeroTensor);
        }
        if let Some(&l) = idx.iter().find(|&&l| l >= self.rank()) {
            return Err(Error::input(format!("term index {l} out of range")));
        }
        Ok(Ctd {
            svals: idx.iter().map(|&l| self.svals[l]).collect(),
            components: self
                .components
                .iter()
                .map(|c| c.select_columns(idx))
                .collect(),
        })
    }

    /// Replaces the s-values by signed `coeffs`. Negative coefficients flip
    /// direction 0; zero coefficients drop their term.
    pub fn with_coefficients(&self, coeffs: &[f64]) -> Result<Ctd> {
        if coeffs.len() != self.rank() {
            return Err(Error::shape(format!(
                "{} coefficients for a rank-{} tensor",
                coeffs.len(),
                self.rank()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::input("non-finite coefficient"));
        }
        let keep: Vec<usize> = (0..coeffs.len()).filter(|&m| coeffs[m] != 0.0).collect();
        let mut out = self.select_terms(&keep)?;
        for (i, &m) in keep.iter().enumerate() {
            out.svals[i] = coeffs[m].abs();
            if coeffs[m] < 0.0 {
                out.components[0]
                    .col_mut(i)
                    .iter_mut()
                    .for_each(|x| *x = -*x);
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Ctd) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::shape(format!(
                "direction sizes {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(())
    }

    /// Frobenius inner product.
    ///
    /// The operands are put in a canonical order first, so the result is
    /// bit-identical to `v.inner(u)`.
    pub fn inner(&self, other: &Ctd) -> Result<f64> {
        self.check_compatible(other)?;
        let (a, b) = match canonical_cmp(self, other) {
            Ordering::Greater => (other, self),
            _ => (self, other),
        };
        Ok(weighted_cross_gram(a, b).as_slice().iter().sum())
    }

    /// Through the Gram matrix, so cancellation limits the relative
    /// resolution to about `√ε_mach·Σσ_l/‖u‖_F`.
    pub fn frob_norm(&self) -> f64 {
        self.inner(self).map_or(0.0, |x| x.max(0.0).sqrt())
    }

    /// Term concatenation, `self`'s terms first.
    pub fn add(&self, other: &Ctd) -> Result<Ctd> {
        self.check_compatible(other)?;
        let svals = self.svals.iter().chain(&other.svals).copied().collect();
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| {
                let mut data = a.as_slice().to_vec();
                data.extend_from_slice(b.as_slice());
                Matrix::from_col_major(a.rows(), a.cols() + b.cols(), data)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ctd { svals, components })
    }

    pub fn scale(&self, alpha: f64) -> Result<Ctd> {
        if !alpha.is_finite() {
            return Err(Error::input("scale factor must be finite"));
        }
        if alpha == 0.0 {
            return Err(Error::ZeroTensor);
        }
        let mut out = self.clone();
        out.svals.iter_mut().for_each(|s| *s *= alpha.abs());
        if alpha < 0.0 {
            out.components[0]
                .as_mut_slice()
                .iter_mut()
                .for_each(|x| *x = -*x);
        }
        Ok(out)
    }

    /// r×r Gram matrix `G_lm = σ_l σ_m Π_j ⟨u_j^(l), u_j^(m)⟩`, symmetric by
    /// construction.
    pub fn gram_matrix(&self) -> Matrix {
        let g = weighted_cross_gram(self, self);
        let r = self.rank();
        Matrix::from_fn(r, r, |i, j| if i <= j { g[(i, j)] } else { g[(j, i)] })
    }

    /// Dense entries, first index fastest.
    pub fn densify(&self) -> Result<Vec<f64>> {
        let dims = self.dims();
        let size = checked_size(&dims)?;
        let mut out = vec![0.0; size];
        let mut term = Vec::with_capacity(size);
        for l in 0..self.rank() {
            term.clear();
            term.push(self.svals[l]);
            for c in &self.components {
                let v = c.col(l);
                let prev = std::mem::take(&mut term);
                term.reserve(prev.len() * v.len());
                for &x in v {
                    term.extend(prev.iter().map(|p| p * x));
                }
            }
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("tensor serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Ctd> {
        serde_json::from_str(s).map_err(|e| Error::input(format!("tensor JSON: {e}")))
    }
}

/// `σ_a σ_bᵀ ∘ Π_j A_jᵀB_j`, accumulated in direction order.
pub(crate) fn weighted_cross_gram(a: &Ctd, b: &Ctd) -> Matrix {
    let mut h = Matrix::from_fn(a.rank(), b.rank(), |l, m| a.svals[l] * b.svals[m]);
    for (ca, cb) in a.components.iter().zip(&b.components) {
        for m in 0..b.rank() {
            let bm = cb.col(m);
            for (l, x) in h.col_mut(m).iter_mut().enumerate() {
                *x *= dot(ca.col(l), bm);
            }
        }
    }
    h
}

fn canonical_cmp(u: &Ctd, v: &Ctd) -> Ordering {
    u.rank()
        .cmp(&v.rank())
        .then_with(|| cmp_bits(&u.svals, &v.svals))
        .then_with(|| {
            u.components
                .iter()
                .zip(&v.components)
                .map(|(a, b)| cmp_bits(a.as_slice(), b.as_slice()))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

fn cmp_bits(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .map(|x| x.to_bits())
        .cmp(b.iter().map(|x| x.to_bits()))
}

fn check_shapes(r: usize, components: &[Matrix]) -> Result<()> {
    if r == 0 {
        return Err(Error::ZeroTensor);
    }
    if components.is_empty() {
        return Err(Error::input("a tensor needs at least one direction"));
    }
    for (j, c) in components.iter().enumerate() {
        if c.rows() == 0 {
            return Err(Error::input(format!("direction {j} has size 0")));
        }
        if c.cols() != r {
            return Err(Error::shape(format!(
                "direction {j} has {} columns, expected {r}",
                c.cols()
            )));
        }
    }
    Ok(())
}

pub(crate) fn checked_size(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &m| acc.checked_mul(m))
        .filter(|&n| n <= DENSE_LIMIT)
        .ok_or_else(|| {
            Error::SizeLimit(format!(
                "dense size of {dims:?} exceeds {DENSE_LIMIT} entries"
            ))
        })
}
