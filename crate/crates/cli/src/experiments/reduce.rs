//! Reduce a CTD stored as JSON.

use std::path::PathBuf;
use std::str::FromStr;

use septensor_core::als::{als_reduce, AlsConfig};
use septensor_core::snorm::{s_norm, s_norm_diff};
use septensor_core::tensor_id::{
    tensor_id_adaptive, tensor_id_gram, tensor_id_verified, truncate_by_svalue, Distribution,
    RandomTensorConfig, TensorIdOptions,
};
use septensor_core::{Ctd, RankSpec};

use crate::table::num;
use crate::{CliError, Config, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Randomized,
    Gram,
    Truncate,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "randomized" => Ok(Method::Randomized),
            "gram" => Ok(Method::Gram),
            "truncate" => Ok(Method::Truncate),
            _ => Err("expected randomized, gram or truncate".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub input: PathBuf,
    pub method: Method,
    pub eps: f64,
    /// Fixed projection count; adaptive when absent.
    pub ell: Option<usize>,
    pub als_sweeps: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

impl Params {
    pub fn from_config(c: &Config) -> Result<Self, CliError> {
        let input: Option<PathBuf> = c.get_opt("input")?;
        Ok(Params {
            input: input.ok_or_else(|| CliError::Config("'input' is required".into()))?,
            method: c.get("method", Method::Randomized)?,
            eps: c.get("eps", 1e-10)?,
            ell: c.get_opt("ell")?,
            als_sweeps: c.get("als_sweeps", 0)?,
            distribution: c.get("distribution", Distribution::Normal)?,
            seed: c.get("seed", 0)?,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub input_rank: usize,
    pub reduced: Ctd,
    pub snorm_rel_err: f64,
}

pub fn reduce(u: &Ctd, p: &Params) -> Result<Outcome, CliError> {
    let cfg = RandomTensorConfig::new(p.distribution, p.seed);
    let res = match p.method {
        Method::Randomized => match p.ell {
            Some(ell) => tensor_id_verified(u, ell, p.eps, &cfg)?,
            None => tensor_id_adaptive(u, p.eps, &cfg, &TensorIdOptions::default())?,
        },
        Method::Gram => tensor_id_gram(u, RankSpec::Accuracy(p.eps))?,
        Method::Truncate => truncate_by_svalue(u, p.eps)?,
    };
    let mut reduced = res.reduced;
    if p.als_sweeps > 0 && reduced.rank() < u.rank() {
        let als = AlsConfig {
            target_rank: reduced.rank(),
            sweeps: p.als_sweeps,
            regularization: 0.0,
        };
        reduced = als_reduce(u, &reduced, &als)?;
    }
    Ok(Outcome {
        input_rank: u.rank(),
        snorm_rel_err: s_norm_diff(u, &reduced)? / s_norm(u),
        reduced,
    })
}

pub fn run(p: &Params) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&p.input)?;
    let u = Ctd::from_json(&text)?;
    reduce(&u, p)
}

impl Outcome {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["input_rank", "rank", "snorm_rel_err"]);
        t.comment("experiment: reduce");
        t.push(vec![
            self.input_rank.to_string(),
            self.reduced.rank().to_string(),
            num(self.snorm_rel_err),
        ]);
        t
    }
}
