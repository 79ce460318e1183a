//! Schulz iteration for separated operators with tensor-ID rank control.

mod operators;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::als::{als_reduce, AlsConfig};
use crate::ctd::SepOperator;
use crate::error::{Error, Result};
use crate::linalg::RankSpec;
use crate::snorm::{operator_s_norm, s_norm, s_norm_diff};
use crate::tensor_id::{tensor_id_with, Distribution, RandomTensorConfig, TensorIdOptions};

pub use operators::{
    build_kronecker_sum, build_laplacian_1d, build_nullspace_projector, build_rank_one_projector,
    clenshaw_curtis_nodes, dyadic_band_scaling, fourier_basis, fourier_frequencies,
    precondition_compose, similarity_scale, StencilOrder,
};

/// Norm used for the Schulz error `E_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorNorm {
    /// `sup Σ σ_l Π ⟨y_j, A_j x_j⟩` over unit vectors: a lower estimate of
    /// the operator 2-norm.
    #[default]
    OperatorS,
    /// s-norm of the operator viewed as a tensor of flattened factors.
    TensorS,
    /// Gram-based; reads zero once the error falls to about `1e-8`.
    Frobenius,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchulzConfig {
    /// `X_0 = α·Bᵀ`. When absent, `α = 1/β²` with
    /// `β = Σ_l σ_l Π_j ‖A_j^(l)‖₂ ≥ ‖B‖₂`.
    pub alpha: Option<f64>,
    pub eps_reduce: f64,
    pub max_rank: usize,
    pub als_sweeps: usize,
    pub max_iters: usize,
    /// Projector onto the complement of the null space of `B`; also the
    /// target of `X·B` when set.
    pub nullspace: Option<SepOperator>,
    pub error_norm: ErrorNorm,
    /// Stop once `E_n` falls to this value.
    pub target: f64,
    /// Random projections per reduction; `max_rank + 10` when absent.
    pub ell: Option<usize>,
    pub distribution: Distribution,
    pub seed: u64,
    /// Keep the ALS result only when it does not worsen the s-norm
    /// distance to the unreduced product. Off by default: once the
    /// iterate is ill-conditioned that distance is dominated by round-off,
    /// and rejecting ALS lets the conditioning run away.
    pub als_guard: bool,
}

impl Default for SchulzConfig {
    fn default() -> Self {
        SchulzConfig {
            alpha: None,
            eps_reduce: 1e-10,
            max_rank: 60,
            als_sweeps: 1,
            max_iters: 40,
            nullspace: None,
            error_norm: ErrorNorm::OperatorS,
            target: 1e-9,
            ell: None,
            distribution: Distribution::Normal,
            seed: 0,
            als_guard: false,
        }
    }
}

impl SchulzConfig {
    fn validate(&self) -> Result<()> {
        if !(self.eps_reduce > 0.0 && self.eps_reduce < 1.0) {
            return Err(Error::Config(format!(
                "eps_reduce {} outside (0, 1)",
                self.eps_reduce
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if self.max_rank == 0 {
            return Err(Error::Config("max_rank must be at least 1".into()));
        }
        if let Some(a) = self.alpha {
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::Config(format!("alpha must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchulzRecord {
    pub iter: usize,
    pub error: f64,
    pub rank_pre: usize,
    pub rank_post_id: usize,
    pub rank_post_als: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SchulzTrace {
    pub records: Vec<SchulzRecord>,
    pub alpha: f64,
}

impl SchulzTrace {
    pub fn final_error(&self) -> Option<f64> {
        self.records.last().map(|r| r.error)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("iter,error,rank_pre,rank_post_id,rank_post_als\n");
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{:e},{},{},{}",
                r.iter, r.error, r.rank_pre, r.rank_post_id, r.rank_post_als
            );
        }
        s
    }
}

/// `β = Σ_l σ_l Π_j ‖A_j^(l)‖₂`, an upper bound on `‖B‖₂`.
pub fn termwise_norm_bound(b: &SepOperator) -> f64 {
    (0..b.rank())
        .map(|l| (0..b.dims().len()).fold(b.svals()[l], |p, j| p * b.factor(l, j).norm2()))
        .sum()
}

/// `½(‖T − X·B‖ + ‖T − B·X‖)/‖T‖` with `T` the identity or the projector.
pub fn schulz_error(
    x: &SepOperator,
    b: &SepOperator,
    target: &SepOperator,
    norm: ErrorNorm,
) -> Result<f64> {
    let left = target.add(&x.compose(b)?.scale(-1.0)?)?;
    let right = target.add(&b.compose(x)?.scale(-1.0)?)?;
    let measure = |op: &SepOperator| match norm {
        ErrorNorm::OperatorS => operator_s_norm(op, 200, 1e-10),
        ErrorNorm::TensorS => s_norm(op.as_ctd()),
        ErrorNorm::Frobenius => op.frob_norm(),
    };
    Ok(0.5 * (measure(&left) + measure(&right)) / measure(target))
}

/// `X_{n+1} = 2X_n − X_n·B·X_n` from `X_0 = α·Bᵀ`.
///
/// Each step reduces `Z = 2I − B·X` and `X·Z` (after the optional projector
/// `P·(X·Z)·P`) by tensor ID at `eps_reduce`, then refines `X` with ALS.
/// With `als_guard`, the ALS result is kept only if its s-norm distance to
/// the unreduced product does not exceed that of the tensor-ID result: the
/// normal equations are squared-conditioned and can push round-off into
/// the factors. Stops at `target`, at `max_iters`, when the error stops
/// decreasing for two consecutive steps once below 0.5, or when it climbs
/// back to 1 or above.
pub fn schulz_invert(b: &SepOperator, cfg: &SchulzConfig) -> Result<(SepOperator, SchulzTrace)> {
    cfg.validate()?;
    if let Some(p) = &cfg.nullspace {
        if p.dims() != b.dims() {
            return Err(Error::shape("projector and operator dims differ"));
        }
    }
    let ident = SepOperator::identity(b.dims())?;
    let target = cfg.nullspace.clone().unwrap_or_else(|| ident.clone());
    let alpha = match cfg.alpha {
        Some(a) => a,
        None => termwise_norm_bound(b).powi(-2),
    };
    let mut trace = SchulzTrace {
        records: Vec::new(),
        alpha,
    };
    let mut x = b.transpose().scale(alpha)?;
    let e0 = schulz_error(&x, b, &target, cfg.error_norm)?;
    trace.records.push(SchulzRecord {
        iter: 0,
        error: e0,
        rank_pre: x.rank(),
        rank_post_id: x.rank(),
        rank_post_als: x.rank(),
    });
    if !(e0 < 1.0) {
        return Err(Error::DivergentInit(e0));
    }

    let mut stalls = 0;
    let mut prev = e0;
    for n in 1..=cfg.max_iters {
        let seed = cfg.seed.wrapping_add(2 * n as u64);
        let z = ident.scale(2.0)?.add(&b.compose(&x)?.scale(-1.0)?)?;
        let z_pre = z.rank();
        let z = reduce(&z, cfg, seed)?;
        if z.rank() > cfg.max_rank {
            return Err(overflow(trace, n, z_pre, z.rank(), cfg.max_rank));
        }
        let mut xz = x.compose(&z)?;
        if let Some(p) = &cfg.nullspace {
            xz = p.compose(&xz)?.compose(p)?;
        }
        let rank_pre = xz.rank();
        let x_id = reduce(&xz, cfg, seed + 1)?;
        let rank_post_id = x_id.rank();
        if rank_post_id > cfg.max_rank {
            return Err(overflow(trace, n, rank_pre, rank_post_id, cfg.max_rank));
        }
        x = if cfg.als_sweeps > 0 && rank_post_id < rank_pre {
            let als = AlsConfig {
                target_rank: rank_post_id,
                sweeps: cfg.als_sweeps,
                regularization: 0.0,
            };
            let refined = als_reduce(xz.as_ctd(), x_id.as_ctd(), &als)?;
            let accept = !cfg.als_guard
                || s_norm_diff(xz.as_ctd(), &refined)? <= s_norm_diff(xz.as_ctd(), x_id.as_ctd())?;
            if accept {
                SepOperator::from_ctd(b.dims().to_vec(), refined)?
            } else {
                x_id
            }
        } else {
            x_id
        };
        let err = schulz_error(&x, b, &target, cfg.error_norm)?;
        log::debug!(
            "schulz iter {n}: error {err:e}, rank {rank_pre} -> {rank_post_id} -> {}",
            x.rank()
        );
        trace.records.push(SchulzRecord {
            iter: n,
            error: err,
            rank_pre,
            rank_post_id,
            rank_post_als: x.rank(),
        });
        if err <= cfg.target {
            break;
        }
        if !(err < 1.0) {
            log::warn!("schulz iteration diverged at step {n} (error {err:e})");
            break;
        }
        // Far from convergence the error estimate is too coarse to judge.
        stalls = if err >= prev && err < 0.5 {
            stalls + 1
        } else {
            0
        };
        if stalls >= 2 {
            break;
        }
        prev = err;
    }
    Ok((x, trace))
}

/// Closes the trace with a record without error value.
fn overflow(
    mut trace: SchulzTrace,
    iter: usize,
    rank_pre: usize,
    rank: usize,
    cap: usize,
) -> Error {
    trace.records.push(SchulzRecord {
        iter,
        error: f64::NAN,
        rank_pre,
        rank_post_id: rank,
        rank_post_als: rank,
    });
    Error::RankOverflow {
        rank,
        cap,
        trace: Box::new(trace),
    }
}

fn reduce(op: &SepOperator, cfg: &SchulzConfig, seed: u64) -> Result<SepOperator> {
    let rcfg = RandomTensorConfig::new(cfg.distribution, seed);
    let opts = TensorIdOptions {
        estimate_residual: false,
        ..TensorIdOptions::default()
    };
    let u = op.as_ctd();
    // Ranks above the cap are fatal anyway, so `max_rank + 10` projections
    // are enough to detect them.
    let ell = cfg.ell.unwrap_or(cfg.max_rank + 10).min(u.rank());
    let out = tensor_id_with(u, ell, RankSpec::Accuracy(cfg.eps_reduce), &rcfg, &opts)?;
    SepOperator::from_ctd(op.dims().to_vec(), out.reduced)
}
