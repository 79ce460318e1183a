use super::{recombine, TensorIdResult};
use crate::ctd::Ctd;
use crate::error::Result;
use crate::linalg::{sym_id, RankSpec};

/// Smallest relative accuracy requested from the symmetric ID of `G`.
pub const GRAM_ACCURACY_FLOOR: f64 = 1e-15;

/// Tensor ID from a symmetric ID of the Gram matrix.
///
/// An accuracy `ε` on the tensor needs `ε²` on `G`; requests below
/// [`GRAM_ACCURACY_FLOOR`] are clamped there and flagged.
pub fn tensor_id_gram(u: &Ctd, spec: RankSpec) -> Result<TensorIdResult> {
    let g = u.gram_matrix();
    let (gspec, floor) = match spec {
        RankSpec::Accuracy(eps) => {
            RankSpec::Accuracy(eps).validate(usize::MAX)?;
            let e2 = eps * eps;
            (
                RankSpec::Accuracy(e2.max(GRAM_ACCURACY_FLOOR)),
                e2 < GRAM_ACCURACY_FLOOR,
            )
        }
        s => (s, false),
    };
    let id = sym_id(&g, gspec)?;
    let mut out = recombine(u, &id.skeleton_indices, &id.p)?;
    out.accuracy_floor = floor;
    out.indefinite = id.indefinite;
    Ok(out)
}

/// Drops the smallest terms while `(Σ_dropped σ²)^{1/2} ≤ eps·(Σ σ²)^{1/2}`.
/// Kept terms stay in input order with unchanged s-values; at least one
/// term is always kept.
pub fn truncate_by_svalue(u: &Ctd, eps: f64) -> Result<TensorIdResult> {
    let s = u.svals();
    let budget = (eps.max(0.0) * u.sval_norm()).powi(2);
    let mut order: Vec<usize> = (0..s.len()).collect();
    // Smallest first; among equal values the later term goes first.
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(b.cmp(&a)));
    let mut dropped = vec![false; s.len()];
    let mut tail = 0.0;
    for &l in order.iter().take(s.len() - 1) {
        let next = tail + s[l] * s[l];
        if next > budget {
            break;
        }
        tail = next;
        dropped[l] = true;
    }
    let kept: Vec<usize> = (0..s.len()).filter(|&l| !dropped[l]).collect();
    Ok(TensorIdResult {
        reduced: u.select_terms(&kept)?,
        coeffs: kept.iter().map(|&l| s[l]).collect(),
        skeleton_indices: kept,
        residual_estimate: None,
        ell: 0,
        accuracy_floor: false,
        indefinite: false,
    })
}
