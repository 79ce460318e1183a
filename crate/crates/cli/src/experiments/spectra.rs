//! Singular values of the Gram matrix and of the projection matrix for a
//! random tensor with exponentially decaying s-values.

use std::time::Instant;

use septensor_core::tensor_id::{
    projection_matrix, random_rank_one, Distribution, RandomTensorConfig,
};
use septensor_core::{Ctd, Result as CoreResult};

use super::{numerical_rank, svals};
use crate::table::num;
use crate::{tensors, CliError, Config, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub d: usize,
    pub m: usize,
    pub r: usize,
    /// Defaults to `r`.
    pub ell: Option<usize>,
    pub cutoff: f64,
    pub distribution: Distribution,
    pub seed: u64,
    pub snapshot: bool,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            d: 20,
            m: 128,
            r: 100,
            ell: None,
            cutoff: 1e-15,
            distribution: Distribution::Normal,
            seed: 0,
            snapshot: false,
        }
    }
}

impl Params {
    pub fn from_config(c: &Config) -> Result<Self, CliError> {
        let d = Params::default();
        let p = Params {
            d: c.get("d", d.d)?,
            m: c.get("m", d.m)?,
            r: c.get("r", d.r)?,
            ell: c.get_opt("ell")?,
            cutoff: c.get("cutoff", d.cutoff)?,
            distribution: c.get("distribution", d.distribution)?,
            seed: c.get("seed", d.seed)?,
            snapshot: c.get("snapshot", d.snapshot)?,
        };
        if p.d == 0 || p.m == 0 || p.r == 0 || p.ell == Some(0) {
            return Err(CliError::Config("d, m, r and ell must be positive".into()));
        }
        Ok(p)
    }

    pub fn ell(&self) -> usize {
        self.ell.unwrap_or(self.r)
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub params: Params,
    pub tensor: Ctd,
    pub sv_gram: Vec<f64>,
    pub sv_proj: Vec<f64>,
    pub rank_gram: usize,
    pub rank_proj: usize,
    pub seconds: f64,
}

/// `ℓ` random rank-one tensors and their projection matrix against `u`.
pub fn projections(
    u: &Ctd,
    ell: usize,
    cfg: &RandomTensorConfig,
) -> CoreResult<septensor_core::Matrix> {
    let dims = u.dims();
    let rs = (0..ell as u64)
        .map(|l| random_rank_one(&dims, cfg, l))
        .collect::<CoreResult<Vec<_>>>()?;
    projection_matrix(u, &rs)
}

pub fn run(p: &Params) -> Result<Outcome, CliError> {
    let t0 = Instant::now();
    let u = tensors::decaying_random(p.d, p.m, p.r, p.seed)?;
    let sv_gram = svals(&u.gram_matrix())?;
    let y = projections(
        &u,
        p.ell(),
        &RandomTensorConfig::new(p.distribution, p.seed),
    )?;
    let sv_proj = svals(&y)?;
    Ok(Outcome {
        rank_gram: numerical_rank(&sv_gram, p.cutoff),
        rank_proj: numerical_rank(&sv_proj, p.cutoff),
        params: p.clone(),
        tensor: u,
        sv_gram,
        sv_proj,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

impl Outcome {
    /// `sv(Y)` rescaled so that its leading value equals `σ_1`.
    pub fn sv_proj_scaled(&self) -> Vec<f64> {
        let s = self.tensor.svals()[0] / self.sv_proj[0];
        self.sv_proj.iter().map(|x| x * s).collect()
    }

    pub fn table(&self) -> Table {
        let p = &self.params;
        let mut t = Table::new(&["index", "sigma", "sv_gram", "sv_proj"]);
        t.comment("experiment: spectra")
            .comment(format!(
                "d={} m={} r={} ell={} distribution={} seed={}",
                p.d,
                p.m,
                p.r,
                p.ell(),
                p.distribution,
                p.seed
            ))
            .comment(format!(
                "numerical rank at relative cutoff {:e}: gram={} proj={}",
                p.cutoff, self.rank_gram, self.rank_proj
            ))
            .comment("sv_proj is rescaled so that its first value equals sigma_1");
        let scaled = self.sv_proj_scaled();
        let n = self.tensor.rank().max(scaled.len());
        let at = |v: &[f64], i: usize| v.get(i).map_or(String::new(), |x| num(*x));
        for i in 0..n {
            t.push(vec![
                (i + 1).to_string(),
                at(self.tensor.svals(), i),
                at(&self.sv_gram, i),
                at(&scaled, i),
            ]);
        }
        t
    }
}
