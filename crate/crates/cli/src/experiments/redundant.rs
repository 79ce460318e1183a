//! Recovery of a tensor whose last terms repeat earlier ones, by the
//! randomized and Gram paths, over a sweep of `ℓ`.

use std::time::Instant;

use septensor_core::snorm::s_norm;
use septensor_core::tensor_id::{
    tensor_id_gram, tensor_id_verified, Distribution, RandomTensorConfig, TensorIdResult,
};
use septensor_core::{Ctd, RankSpec};

use crate::table::num;
use crate::{tensors, CliError, Config, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub d: usize,
    pub m: usize,
    pub r: usize,
    pub independent: usize,
    pub ell_min: usize,
    pub ell_max: usize,
    pub ell_step: usize,
    pub eps: f64,
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
            independent: 70,
            ell_min: 40,
            ell_max: 100,
            ell_step: 5,
            eps: 1e-15,
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
            independent: c.get("independent", d.independent)?,
            ell_min: c.get("ell_min", d.ell_min)?,
            ell_max: c.get("ell_max", d.ell_max)?,
            ell_step: c.get("ell_step", d.ell_step)?,
            eps: c.get("eps", d.eps)?,
            distribution: c.get("distribution", d.distribution)?,
            seed: c.get("seed", d.seed)?,
            snapshot: c.get("snapshot", d.snapshot)?,
        };
        if p.ell_min == 0 || p.ell_step == 0 || p.ell_max < p.ell_min {
            return Err(CliError::Config(
                "need 0 < ell_min <= ell_max and ell_step > 0".into(),
            ));
        }
        Ok(p)
    }

    pub fn ells(&self) -> Vec<usize> {
        (self.ell_min..=self.ell_max)
            .step_by(self.ell_step)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    /// 0 for the Gram path.
    pub ell: usize,
    pub rank: usize,
    pub snorm_rel_err: f64,
    pub frob_rel_err: f64,
    pub accuracy_floor: bool,
    pub result: TensorIdResult,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub params: Params,
    pub randomized: Vec<Row>,
    pub gram: Row,
    pub seconds: f64,
}

fn row(u: &Ctd, unorm_s: f64, mut res: TensorIdResult, ell: usize) -> Result<Row, CliError> {
    let s_err = match res.residual_estimate {
        Some(e) => e,
        None => res.verify(u)?,
    };
    let diff = u.add(&res.reduced.scale(-1.0)?)?;
    Ok(Row {
        ell,
        rank: res.rank(),
        snorm_rel_err: s_err / unorm_s,
        frob_rel_err: diff.frob_norm() / u.frob_norm(),
        accuracy_floor: res.accuracy_floor,
        result: res,
    })
}

pub fn run(p: &Params) -> Result<Outcome, CliError> {
    let t0 = Instant::now();
    let u = tensors::redundant(p.d, p.m, p.r, p.independent, p.seed)?;
    let us = s_norm(&u);
    let cfg = RandomTensorConfig::new(p.distribution, p.seed);
    let randomized = p
        .ells()
        .into_iter()
        .map(|ell| row(&u, us, tensor_id_verified(&u, ell, p.eps, &cfg)?, ell))
        .collect::<Result<Vec<_>, _>>()?;
    let gram = row(&u, us, tensor_id_gram(&u, RankSpec::Accuracy(p.eps))?, 0)?;
    Ok(Outcome {
        params: p.clone(),
        randomized,
        gram,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

impl Outcome {
    /// Reduced tensor from the largest `ℓ`.
    pub fn best_reduced(&self) -> &Ctd {
        &self.randomized.last().unwrap_or(&self.gram).result.reduced
    }

    pub fn table(&self) -> Table {
        let p = &self.params;
        let mut t = Table::new(&[
            "path",
            "ell",
            "rank",
            "snorm_rel_err",
            "frob_rel_err",
            "accuracy_floor",
        ]);
        t.comment("experiment: redundant")
            .comment(format!(
                "d={} m={} r={} independent={} eps={:e} distribution={} seed={}",
                p.d, p.m, p.r, p.independent, p.eps, p.distribution, p.seed
            ))
            .comment(
                "randomized rows tighten the projection cutoff until the s-norm residual meets eps",
            )
            .comment("the gram row uses ell=0; frob_rel_err is computed through inner products");
        let mut push = |path: &str, r: &Row| {
            t.push(vec![
                path.to_string(),
                r.ell.to_string(),
                r.rank.to_string(),
                num(r.snorm_rel_err),
                num(r.frob_rel_err),
                r.accuracy_floor.to_string(),
            ])
        };
        for r in &self.randomized {
            push("randomized", r);
        }
        push("gram", &self.gram);
        t
    }
}
