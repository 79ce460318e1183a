//! Tensor interpolative decomposition: choose a subset of the terms of a
//! CTD and recombine their s-values.

mod gram;
mod random;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ctd::Ctd;
use crate::error::{Error, Result};
use crate::linalg::{matrix_id, randomized_matrix_id, Matrix, MatrixId, RankSpec};
use crate::snorm::{s_norm, s_norm_diff};

pub use gram::{tensor_id_gram, truncate_by_svalue, GRAM_ACCURACY_FLOOR};
pub use random::{
    projection_matrix, random_rank_one, random_vectors, Distribution, RandomTensorConfig,
};

/// Smallest Y cutoff tried by [`tensor_id_verified`].
pub const CUTOFF_FLOOR: f64 = 1e-20;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorIdResult {
    pub reduced: Ctd,
    /// Positions in the input of the kept terms, in the order of `reduced`.
    pub skeleton_indices: Vec<usize>,
    /// Signed recombined coefficients; `reduced.svals()` holds their
    /// absolute values.
    pub coeffs: Vec<f64>,
    /// `‖u − reduced‖_s` when it was evaluated.
    pub residual_estimate: Option<f64>,
    /// Number of random projections used (0 for the deterministic paths).
    pub ell: usize,
    /// Set when the Gram path was asked for an accuracy its squared
    /// conditioning cannot deliver.
    pub accuracy_floor: bool,
    /// Set when the Gram matrix was numerically indefinite.
    pub indefinite: bool,
}

impl TensorIdResult {
    pub fn rank(&self) -> usize {
        self.reduced.rank()
    }

    /// Fills `residual_estimate` with `‖u − reduced‖_s`.
    pub fn verify(&mut self, u: &Ctd) -> Result<f64> {
        let r = s_norm_diff(u, &self.reduced)?;
        self.residual_estimate = Some(r);
        Ok(r)
    }
}

/// Which matrix ID is applied to the projection matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerId {
    #[default]
    Deterministic,
    /// Sketch `Y` again with this many Gaussian rows first.
    Randomized { ell: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorIdOptions {
    pub inner: InnerId,
    pub estimate_residual: bool,
}

impl Default for TensorIdOptions {
    fn default() -> Self {
        TensorIdOptions {
            inner: InnerId::Deterministic,
            estimate_residual: true,
        }
    }
}

/// `ℓ` random rank-one projections of `u`, rows added on demand.
struct Projections<'a> {
    u: &'a Ctd,
    cfg: RandomTensorConfig,
    rows: Vec<Vec<f64>>,
}

impl<'a> Projections<'a> {
    fn new(u: &'a Ctd, cfg: RandomTensorConfig) -> Self {
        Projections {
            u,
            cfg,
            rows: Vec::new(),
        }
    }

    fn matrix(&mut self, ell: usize) -> Result<Matrix> {
        let have = self.rows.len();
        if ell > have {
            let dims = self.u.dims();
            let new: Vec<Vec<f64>> = (have..ell)
                .into_par_iter()
                .map(|l| {
                    let r = random_rank_one(&dims, &self.cfg, l as u64)?;
                    Ok(random::projection_row(self.u, &r))
                })
                .collect::<Result<_>>()?;
            self.rows.extend(new);
        }
        let y = Matrix::from_fn(ell, self.u.rank(), |l, m| self.rows[l][m]);
        if y.max_abs() == 0.0 {
            return Err(Error::DegenerateProjection);
        }
        Ok(y)
    }
}

/// Tensor ID by random projection: `ℓ` random rank-one tensors, the ℓ×r
/// matrix `Y` of their inner products with the terms of `u`, a matrix ID of
/// `Y` at `spec`, and `α_m = σ_{l_m}·Σ_l P_{ml}`. The residual is then
/// estimated in the s-norm.
pub fn tensor_id_randomized(
    u: &Ctd,
    ell: usize,
    spec: RankSpec,
    cfg: &RandomTensorConfig,
) -> Result<TensorIdResult> {
    tensor_id_with(u, ell, spec, cfg, &TensorIdOptions::default())
}

pub fn tensor_id_with(
    u: &Ctd,
    ell: usize,
    spec: RankSpec,
    cfg: &RandomTensorConfig,
    opts: &TensorIdOptions,
) -> Result<TensorIdResult> {
    check_ell(u, ell, spec)?;
    let y = Projections::new(u, *cfg).matrix(ell)?;
    let id = id_of_projection(&y, spec, cfg, opts.inner)?;
    let mut out = recombine(u, &id.skeleton_indices, &id.p)?;
    out.ell = ell;
    if opts.estimate_residual {
        out.verify(u)?;
    }
    Ok(out)
}

fn check_ell(u: &Ctd, ell: usize, spec: RankSpec) -> Result<()> {
    if ell == 0 {
        return Err(Error::InvalidRank(
            "at least one projection is required".into(),
        ));
    }
    if let RankSpec::Fixed(k) = spec {
        if k > ell {
            return Err(Error::InvalidRank(format!("rank {k} exceeds ell = {ell}")));
        }
        if k > u.rank() {
            return Err(Error::InvalidRank(format!(
                "rank {k} exceeds the input rank {}",
                u.rank()
            )));
        }
    }
    Ok(())
}

fn id_of_projection(
    y: &Matrix,
    spec: RankSpec,
    cfg: &RandomTensorConfig,
    inner: InnerId,
) -> Result<MatrixId> {
    let spec = match spec {
        RankSpec::Fixed(k) => RankSpec::Fixed(k.min(y.rows()).min(y.cols())),
        s => s,
    };
    match inner {
        InnerId::Deterministic => matrix_id(y, spec),
        InnerId::Randomized { ell } => {
            let mut rng = cfg.stream(u64::MAX);
            randomized_matrix_id(y, ell, spec, &mut rng)
        }
    }
}

/// Builds the reduced tensor from a skeleton and a k×r coefficient matrix.
pub(crate) fn recombine(u: &Ctd, skeleton: &[usize], p: &Matrix) -> Result<TensorIdResult> {
    if skeleton.is_empty() {
        return Err(Error::DegenerateProjection);
    }
    let alpha: Vec<f64> = skeleton
        .iter()
        .enumerate()
        .map(|(m, &l)| {
            let row_sum: f64 = (0..p.cols()).map(|c| p[(m, c)]).sum();
            u.svals()[l] * row_sum
        })
        .collect();
    let kept: Vec<usize> = (0..alpha.len()).filter(|&m| alpha[m] != 0.0).collect();
    let skeleton_indices: Vec<usize> = kept.iter().map(|&m| skeleton[m]).collect();
    let coeffs: Vec<f64> = kept.iter().map(|&m| alpha[m]).collect();
    let reduced = u
        .select_terms(&skeleton_indices)?
        .with_coefficients(&coeffs)?;
    Ok(TensorIdResult {
        reduced,
        skeleton_indices,
        coeffs,
        residual_estimate: None,
        ell: 0,
        accuracy_floor: false,
        indefinite: false,
    })
}

/// Accuracy-driven tensor ID with automatic `ℓ`: start from
/// `min(r, 2⌈√r⌉ + 10)` and double until two consecutive sizes give the same
/// rank, or `ℓ` reaches `r`.
pub fn tensor_id_adaptive(
    u: &Ctd,
    eps: f64,
    cfg: &RandomTensorConfig,
    opts: &TensorIdOptions,
) -> Result<TensorIdResult> {
    let spec = RankSpec::Accuracy(eps);
    let r = u.rank();
    let mut ell = r.min(2 * (r as f64).sqrt().ceil() as usize + 10);
    let mut proj = Projections::new(u, *cfg);
    let mut prev: Option<usize> = None;
    loop {
        let y = proj.matrix(ell)?;
        let id = id_of_projection(&y, spec, cfg, opts.inner)?;
        let k = id.rank();
        if prev == Some(k) || ell >= r {
            let mut out = recombine(u, &id.skeleton_indices, &id.p)?;
            out.ell = ell;
            if opts.estimate_residual {
                out.verify(u)?;
            }
            return Ok(out);
        }
        prev = Some(k);
        ell = (2 * ell).min(r);
    }
}

/// Tensor ID at fixed `ℓ` with an a posteriori check: the cutoff on `Y`
/// starts at `eps` and is tightened tenfold until
/// `‖u − u_k‖_s ≤ eps·‖u‖_s`, the rank reaches `min(ℓ, r)`, or the cutoff
/// passes [`CUTOFF_FLOOR`].
pub fn tensor_id_verified(
    u: &Ctd,
    ell: usize,
    eps: f64,
    cfg: &RandomTensorConfig,
) -> Result<TensorIdResult> {
    RankSpec::Accuracy(eps).validate(usize::MAX)?;
    check_ell(u, ell, RankSpec::Accuracy(eps))?;
    let target = eps * s_norm(u);
    let y = Projections::new(u, *cfg).matrix(ell)?;
    let full = ell.min(u.rank());
    let mut cutoff = eps;
    loop {
        let id = matrix_id(&y, RankSpec::Accuracy(cutoff))?;
        let mut out = recombine(u, &id.skeleton_indices, &id.p)?;
        out.ell = ell;
        let res = out.verify(u)?;
        if res <= target || id.rank() >= full || cutoff / 10.0 < CUTOFF_FLOOR {
            return Ok(out);
        }
        cutoff /= 10.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonal_with_duplicates() -> Ctd {
        // Three orthogonal terms followed by two repeats.
        let base = Matrix::identity(4);
        let cols = [0usize, 1, 2, 0, 2];
        let comps = (0..3).map(|_| base.select_columns(&cols)).collect();
        Ctd::from_raw(vec![3.0, 2.0, 1.0, 0.5, 0.25], comps).unwrap()
    }

    #[test]
    fn exact_duplicates_collapse() {
        let u = orthogonal_with_duplicates();
        let cfg = RandomTensorConfig::new(Distribution::Normal, 5);
        let out = tensor_id_randomized(&u, 5, RankSpec::Accuracy(1e-12), &cfg).unwrap();
        assert_eq!(out.rank(), 3);
        assert!(out.residual_estimate.unwrap() <= 1e-12 * u.frob_norm());
        let mut s = out.reduced.svals().to_vec();
        s.sort_by(f64::total_cmp);
        for (a, b) in s.iter().zip([1.25, 2.0, 3.5]) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn skeleton_columns_are_copied() {
        let u = orthogonal_with_duplicates();
        let cfg = RandomTensorConfig::new(Distribution::Bernoulli, 1);
        let out = tensor_id_randomized(&u, 5, RankSpec::Fixed(3), &cfg).unwrap();
        for (m, &l) in out.skeleton_indices.iter().enumerate() {
            for j in 1..u.ndim() {
                assert_eq!(out.reduced.vector(j, m), u.vector(j, l));
            }
        }
    }

    #[test]
    fn rank_larger_than_ell() {
        let u = orthogonal_with_duplicates();
        let cfg = RandomTensorConfig::default();
        assert!(matches!(
            tensor_id_randomized(&u, 2, RankSpec::Fixed(3), &cfg),
            Err(Error::InvalidRank(_))
        ));
    }

    #[test]
    fn adaptive_and_verified_agree_on_exact_case() {
        let u = orthogonal_with_duplicates();
        let cfg = RandomTensorConfig::new(Distribution::Uniform, 9);
        let a = tensor_id_adaptive(&u, 1e-12, &cfg, &TensorIdOptions::default()).unwrap();
        let v = tensor_id_verified(&u, 5, 1e-12, &cfg).unwrap();
        assert_eq!(a.rank(), 3);
        assert_eq!(v.rank(), 3);
    }
}
