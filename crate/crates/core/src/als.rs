//! Fixed-sweep alternating least squares for CTD refinement.

use serde::{Deserialize, Serialize};

use crate::ctd::Ctd;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, norm, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlsConfig {
    pub target_rank: usize,
    pub sweeps: usize,
    /// Added to the diagonal of every normal matrix.
    pub regularization: f64,
}

impl AlsConfig {
    pub fn new(target_rank: usize) -> Self {
        AlsConfig {
            target_rank,
            sweeps: 3,
            regularization: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sweeps == 0 {
            return Err(Error::Config("ALS needs at least one sweep".into()));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::Config(format!(
                "regularization must be non-negative, got {}",
                self.regularization
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlsOutcome {
    pub approx: Ctd,
    /// `‖u − approx‖_F²` at the start and after every direction update.
    pub fit_history: Vec<f64>,
}

/// Refines `init` toward `u` with `cfg.sweeps` sweeps.
///
/// Terms whose directional column collapses to zero are dropped, so the
/// output rank can be below `target_rank`.
pub fn als_reduce(u: &Ctd, init: &Ctd, cfg: &AlsConfig) -> Result<Ctd> {
    als_reduce_traced(u, init, cfg).map(|o| o.approx)
}

pub fn als_reduce_traced(u: &Ctd, init: &Ctd, cfg: &AlsConfig) -> Result<AlsOutcome> {
    cfg.validate()?;
    if init.rank() != cfg.target_rank {
        return Err(Error::InvalidRank(format!(
            "initial guess has rank {}, target is {}",
            init.rank(),
            cfg.target_rank
        )));
    }
    if u.dims() != init.dims() {
        return Err(Error::shape(format!("{:?} vs {:?}", u.dims(), init.dims())));
    }
    let d = u.ndim();
    let uu = u.frob_norm().powi(2);
    let mut svals = init.svals().to_vec();
    let mut v: Vec<Matrix> = init.components().to_vec();
    // Cached per-direction Grams: vv[j] = V_jᵀV_j (k×k), uv[j] = U_jᵀV_j (r×k).
    let mut vv: Vec<Matrix> = v.iter().map(|c| c.tr_matmul(c)).collect();
    let mut uv: Vec<Matrix> = u
        .components()
        .iter()
        .zip(&v)
        .map(|(a, b)| a.tr_matmul(b))
        .collect();
    let mut history = vec![fit(uu, u.svals(), &svals, &vv, &uv)];

    for _ in 0..cfg.sweeps {
        for j in 0..d {
            let k = svals.len();
            let r = u.rank();
            let mut h = Matrix::from_fn(k, k, |_, _| 1.0);
            let mut kmat = Matrix::from_fn(r, k, |l, _| u.svals()[l]);
            for i in (0..d).filter(|&i| i != j) {
                hadamard_in_place(&mut h, &vv[i]);
                hadamard_in_place(&mut kmat, &uv[i]);
            }
            // W_jᵀ = H⁻¹·(U_j·diag(σ)·K)ᵀ
            let rhs = u.component(j).matmul(&kmat).transpose();
            let wt = solve_normal(&h, &rhs, cfg.regularization)?;

            let m = u.dims()[j];
            let mut keep = Vec::with_capacity(k);
            let mut new_svals = Vec::with_capacity(k);
            let mut col_data = Vec::with_capacity(m * k);
            for t in 0..k {
                let col: Vec<f64> = (0..m).map(|i| wt[(t, i)]).collect();
                let n = norm(&col);
                if n > 0.0 && n.is_finite() {
                    keep.push(t);
                    new_svals.push(n);
                    col_data.extend(col.iter().map(|x| x / n));
                }
            }
            if keep.is_empty() {
                return Err(Error::ZeroTensor);
            }
            if keep.len() < k {
                for (i, c) in v.iter_mut().enumerate() {
                    if i != j {
                        *c = c.select_columns(&keep);
                        vv[i] = vv[i].select(&keep, &keep);
                        uv[i] = uv[i].select_columns(&keep);
                    }
                }
            }
            v[j] = Matrix::from_col_major(m, keep.len(), col_data)?;
            svals = new_svals;
            vv[j] = v[j].tr_matmul(&v[j]);
            uv[j] = u.component(j).tr_matmul(&v[j]);
            history.push(fit(uu, u.svals(), &svals, &vv, &uv));
        }
    }
    Ok(AlsOutcome {
        approx: Ctd::from_raw(svals, v)?,
        fit_history: history,
    })
}

fn hadamard_in_place(a: &mut Matrix, b: &Matrix) {
    a.as_mut_slice()
        .iter_mut()
        .zip(b.as_slice())
        .for_each(|(x, y)| *x *= y);
}

fn solve_normal(h: &Matrix, rhs: &Matrix, lambda: f64) -> Result<Matrix> {
    let k = h.rows();
    let shifted = |mu: f64| {
        let mut a = h.clone();
        for i in 0..k {
            a[(i, i)] += mu;
        }
        a
    };
    if let Some(l) = cholesky(&shifted(lambda)) {
        return Ok(cholesky_solve(&l, rhs));
    }
    let trace: f64 = (0..k).map(|i| h[(i, i)]).sum();
    let mu = lambda + 1e-12 * trace;
    match cholesky(&shifted(mu)) {
        Some(l) => Ok(cholesky_solve(&l, rhs)),
        None => Err(Error::Conditioning(format!(
            "normal matrix of order {k} not positive definite even with shift {mu:e}"
        ))),
    }
}

/// `‖U − V‖_F² = ‖U‖² − 2⟨U,V⟩ + ‖V‖²` from cached Grams.
fn fit(uu: f64, su: &[f64], sv: &[f64], vv: &[Matrix], uv: &[Matrix]) -> f64 {
    let k = sv.len();
    let r = su.len();
    let mut vnorm = 0.0;
    for a in 0..k {
        for b in 0..k {
            vnorm += vv.iter().fold(sv[a] * sv[b], |p, g| p * g[(a, b)]);
        }
    }
    let mut cross = 0.0;
    for l in 0..r {
        for a in 0..k {
            cross += uv.iter().fold(su[l] * sv[a], |p, g| p * g[(l, a)]);
        }
    }
    uu - 2.0 * cross + vnorm
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(r: usize) -> Ctd {
        let comps = (0..3)
            .map(|j| Matrix::from_fn(5, r, |i, l| ((i * 7 + l * 3 + j) as f64 * 0.37).sin()))
            .collect();
        Ctd::from_raw((0..r).map(|l| 1.0 / (l + 1) as f64).collect(), comps).unwrap()
    }

    #[test]
    fn exact_rank_is_recovered() {
        let u = sample(3);
        let cfg = AlsConfig {
            sweeps: 1,
            ..AlsConfig::new(3)
        };
        let out = als_reduce(&u, &u, &cfg).unwrap();
        let err = crate::snorm::s_norm_diff(&u, &out).unwrap();
        assert!(err <= 1e-12 * u.frob_norm(), "{err}");
    }

    #[test]
    fn fit_is_monotone() {
        let u = sample(6);
        let init = u.select_terms(&[0, 2]).unwrap();
        let cfg = AlsConfig {
            sweeps: 5,
            ..AlsConfig::new(2)
        };
        let out = als_reduce_traced(&u, &init, &cfg).unwrap();
        for w in out.fit_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * u.frob_norm().powi(2));
        }
        assert!(out.approx.normalization_error() < 1e-14);
    }

    #[test]
    fn rank_mismatch_and_bad_config() {
        let u = sample(3);
        assert!(matches!(
            als_reduce(&u, &u, &AlsConfig::new(2)),
            Err(Error::InvalidRank(_))
        ));
        let cfg = AlsConfig {
            sweeps: 0,
            ..AlsConfig::new(3)
        };
        assert!(matches!(als_reduce(&u, &u, &cfg), Err(Error::Config(_))));
    }
}
