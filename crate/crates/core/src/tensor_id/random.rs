use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::ctd::Ctd;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};

/// Entry distribution of the random rank-one tensors. All variants have
/// zero mean and unit variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distribution {
    Normal,
    /// Uniform on `(−√3, √3)`.
    Uniform,
    /// `±1` with equal probability.
    Bernoulli,
    /// `sign(g)·|g|^{1/d}` for standard normal `g`, rescaled to unit
    /// variance; `d` is the number of directions.
    PowerOneOverD,
}

impl Distribution {
    pub const ALL: [Distribution; 4] = [
        Distribution::Normal,
        Distribution::Uniform,
        Distribution::Bernoulli,
        Distribution::PowerOneOverD,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Normal => "normal",
            Distribution::Uniform => "uniform",
            Distribution::Bernoulli => "bernoulli",
            Distribution::PowerOneOverD => "power-1-over-d",
        }
    }

    /// One draw for a tensor with `d` directions.
    pub fn sample<R: Rng + ?Sized>(self, d: usize, rng: &mut R) -> f64 {
        match self {
            Distribution::Normal => rng.sample(StandardNormal),
            Distribution::Uniform => rng.random_range(-3f64.sqrt()..3f64.sqrt()),
            Distribution::Bernoulli => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Distribution::PowerOneOverD => {
                let g: f64 = rng.sample(StandardNormal);
                let p = 1.0 / d as f64;
                g.signum() * g.abs().powf(p) / power_std(p)
            }
        }
    }
}

/// Standard deviation of `|g|^p` for standard normal `g`:
/// `E|g|^{2p} = 2^p Γ(p + ½) / √π`.
fn power_std(p: f64) -> f64 {
    (2f64.powf(p) * gamma(p + 0.5) / std::f64::consts::PI.sqrt()).sqrt()
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(Distribution::Normal),
            "uniform" => Ok(Distribution::Uniform),
            "bernoulli" | "rademacher" => Ok(Distribution::Bernoulli),
            "power" | "power-1-over-d" | "power1d" => Ok(Distribution::PowerOneOverD),
            other => Err(Error::Config(format!("unknown distribution '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomTensorConfig {
    pub distribution: Distribution,
    pub seed: u64,
}

impl RandomTensorConfig {
    pub fn new(distribution: Distribution, seed: u64) -> Self {
        RandomTensorConfig { distribution, seed }
    }

    /// Generator for the random tensor with the given index. Each index gets
    /// its own ChaCha stream, so tensors can be built in any order.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

impl Default for RandomTensorConfig {
    fn default() -> Self {
        RandomTensorConfig::new(Distribution::Normal, 0)
    }
}

/// Raw direction vectors of random tensor `index`, before normalization.
pub fn random_vectors(dims: &[usize], cfg: &RandomTensorConfig, index: u64) -> Vec<Vec<f64>> {
    let mut rng = cfg.stream(index);
    let d = dims.len();
    dims.iter()
        .map(|&m| {
            (0..m)
                .map(|_| cfg.distribution.sample(d, &mut rng))
                .collect()
        })
        .collect()
}

/// Random rank-one tensor number `index`, normalized with the magnitude in
/// the s-value.
pub fn random_rank_one(dims: &[usize], cfg: &RandomTensorConfig, index: u64) -> Result<Ctd> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::input(format!("invalid direction sizes {dims:?}")));
    }
    Ctd::rank_one(1.0, &random_vectors(dims, cfg, index))
}

/// `Y_lm = ⟨R^(l), σ_m U^(m)⟩` for rank-one `rs`. Rows are computed in
/// parallel, each with a fixed accumulation order.
pub fn projection_matrix(u: &Ctd, rs: &[Ctd]) -> Result<Matrix> {
    let dims = u.dims();
    for r in rs {
        if r.rank() != 1 || r.dims() != dims {
            return Err(Error::shape(
                "random tensors must be rank one with matching dims",
            ));
        }
    }
    let rows: Vec<Vec<f64>> = rs.par_iter().map(|r| projection_row(u, r)).collect();
    Ok(Matrix::from_fn(rs.len(), u.rank(), |l, m| rows[l][m]))
}

pub(crate) fn projection_row(u: &Ctd, r: &Ctd) -> Vec<f64> {
    let sr = r.svals()[0];
    let mut row: Vec<f64> = u.svals().iter().map(|s| sr * s).collect();
    for j in 0..u.ndim() {
        let x = r.vector(j, 0);
        for (m, y) in row.iter_mut().enumerate() {
            *y *= dot(x, u.vector(j, m));
        }
    }
    row
}
