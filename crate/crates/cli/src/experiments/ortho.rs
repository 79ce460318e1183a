//! Tensor ID on the orthogonal expansion of a rank-one tensor.

use septensor_core::tensor_id::{
    tensor_id_gram, tensor_id_verified, truncate_by_svalue, Distribution, RandomTensorConfig,
    TensorIdResult,
};
use septensor_core::{Ctd, RankSpec};

use crate::table::num;
use crate::tensors::{orthogonal_product, parseval_set};
use crate::{CliError, Config, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    /// Terms per direction.
    pub l: usize,
    pub d: usize,
    pub m: usize,
    pub flat_eps: Vec<f64>,
    pub decay_eps: Vec<f64>,
    /// Random projections for the randomized path.
    pub ell: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            l: 2,
            d: 3,
            m: 4,
            flat_eps: vec![0.01, 0.1, 0.2, 0.29],
            decay_eps: vec![0.05, 0.15, 0.4, 0.8],
            ell: 1024,
            distribution: Distribution::Normal,
            seed: 0,
        }
    }
}

impl Params {
    pub fn from_config(c: &Config) -> Result<Self, CliError> {
        let d = Params::default();
        Ok(Params {
            l: c.get("l", d.l)?,
            d: c.get("d", d.d)?,
            m: c.get("m", d.m)?,
            flat_eps: c.get_list("flat_eps", d.flat_eps)?,
            decay_eps: c.get_list("decay_eps", d.decay_eps)?,
            ell: c.get("ell", d.ell)?,
            distribution: c.get("distribution", d.distribution)?,
            seed: c.get("seed", d.seed)?,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    Flat,
    /// Weights `2^{-l}`, `l = 1..=L`.
    Decaying,
}

impl Case {
    pub fn name(self) -> &'static str {
        match self {
            Case::Flat => "flat",
            Case::Decaying => "decaying",
        }
    }

    pub fn weights(self, l: usize) -> Vec<f64> {
        match self {
            Case::Flat => vec![1.0; l],
            Case::Decaying => (1..=l).map(|i| 0.5f64.powi(i as i32)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Path {
    Randomized,
    Gram,
    Truncation,
}

impl Path {
    pub fn name(self) -> &'static str {
        match self {
            Path::Randomized => "randomized",
            Path::Gram => "gram",
            Path::Truncation => "truncation",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub case: Case,
    pub path: Path,
    pub eps: f64,
    pub rank: usize,
    pub skeleton: Vec<usize>,
    /// Optimal truncation set, `None` when `eps` splits a group of equal weights.
    pub parseval: Option<Vec<usize>>,
    pub frob_rel_err: f64,
}

impl Row {
    pub fn matches_parseval(&self) -> bool {
        self.parseval.as_ref() == Some(&self.skeleton)
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub params: Params,
    pub rows: Vec<Row>,
}

fn evaluate(
    u: &Ctd,
    case: Case,
    path: Path,
    eps: f64,
    res: TensorIdResult,
) -> Result<Row, CliError> {
    let mut skeleton = res.skeleton_indices.clone();
    skeleton.sort_unstable();
    let diff = u.add(&res.reduced.scale(-1.0)?)?;
    Ok(Row {
        case,
        path,
        eps,
        rank: res.rank(),
        skeleton,
        parseval: parseval_set(u.svals(), eps),
        frob_rel_err: diff.frob_norm() / u.frob_norm(),
    })
}

pub fn run(p: &Params) -> Result<Outcome, CliError> {
    let cfg = RandomTensorConfig::new(p.distribution, p.seed);
    let mut rows = Vec::new();
    for (case, eps_list) in [(Case::Flat, &p.flat_eps), (Case::Decaying, &p.decay_eps)] {
        let u = orthogonal_product(&case.weights(p.l), p.d, p.m, p.seed)?;
        for &eps in eps_list {
            let r = tensor_id_verified(&u, p.ell, eps, &cfg)?;
            rows.push(evaluate(&u, case, Path::Randomized, eps, r)?);
            let g = tensor_id_gram(&u, RankSpec::Accuracy(eps))?;
            rows.push(evaluate(&u, case, Path::Gram, eps, g)?);
            let t = truncate_by_svalue(&u, eps)?;
            rows.push(evaluate(&u, case, Path::Truncation, eps, t)?);
        }
    }
    Ok(Outcome {
        params: p.clone(),
        rows,
    })
}

impl Outcome {
    pub fn table(&self) -> Table {
        let p = &self.params;
        let mut t = Table::new(&[
            "case",
            "path",
            "eps",
            "rank",
            "parseval_rank",
            "matches_parseval",
            "frob_rel_err",
        ]);
        t.comment("experiment: ortho-limit")
            .comment(format!(
                "L={} d={} m={} ell={} distribution={} seed={}",
                p.l, p.d, p.m, p.ell, p.distribution, p.seed
            ))
            .comment("parseval_rank is empty when eps splits a group of equal weights");
        for r in &self.rows {
            t.push(vec![
                r.case.name().into(),
                r.path.name().into(),
                num(r.eps),
                r.rank.to_string(),
                r.parseval
                    .as_ref()
                    .map_or(String::new(), |s| s.len().to_string()),
                r.matches_parseval().to_string(),
                num(r.frob_rel_err),
            ]);
        }
        t
    }
}
