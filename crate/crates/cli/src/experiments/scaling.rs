//! Wall time of the randomized tensor ID as the dimension grows.

use std::time::Instant;

use septensor_core::als::{als_reduce_traced, AlsConfig};
use septensor_core::tensor_id::{
    tensor_id_with, Distribution, RandomTensorConfig, TensorIdOptions,
};
use septensor_core::RankSpec;

use super::spectra::projections;
use crate::table::num;
use crate::{tensors, CliError, Config, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub dims: Vec<usize>,
    pub r: usize,
    pub ell: usize,
    pub m: usize,
    pub eps: f64,
    /// Timings report the minimum over this many runs.
    pub repeats: usize,
    pub als_sweeps: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            dims: vec![4, 8, 16],
            r: 100,
            ell: 40,
            m: 64,
            eps: 1e-10,
            repeats: 3,
            als_sweeps: 50,
            distribution: Distribution::Normal,
            seed: 0,
        }
    }
}

impl Params {
    pub fn from_config(c: &Config) -> Result<Self, CliError> {
        let d = Params::default();
        let p = Params {
            dims: c.get_list("dims", d.dims)?,
            r: c.get("r", d.r)?,
            ell: c.get("ell", d.ell)?,
            m: c.get("m", d.m)?,
            eps: c.get("eps", d.eps)?,
            repeats: c.get("repeats", d.repeats)?,
            als_sweeps: c.get("als_sweeps", d.als_sweeps)?,
            distribution: c.get("distribution", d.distribution)?,
            seed: c.get("seed", d.seed)?,
        };
        if p.dims.is_empty() || p.dims.contains(&0) || p.repeats == 0 || p.ell == 0 {
            return Err(CliError::Config(
                "dims, ell and repeats must be positive".into(),
            ));
        }
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Full randomized tensor ID without the residual estimate.
    TensorId,
    /// Projection matrix only.
    FormY,
    /// Fixed-sweep ALS from a random start at the ID rank; illustrative.
    Als,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::TensorId => "tensor_id",
            Stage::FormY => "form_y",
            Stage::Als => "als",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Row {
    pub stage: Stage,
    pub d: usize,
    pub r: usize,
    pub rank: usize,
    pub rel_err: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub params: Params,
    pub rows: Vec<Row>,
}

fn min_time<T>(
    repeats: usize,
    mut f: impl FnMut() -> Result<T, CliError>,
) -> Result<(T, f64), CliError> {
    let mut best = f64::INFINITY;
    let mut out = None;
    for _ in 0..repeats {
        let t0 = Instant::now();
        let v = f()?;
        best = best.min(t0.elapsed().as_secs_f64());
        out = Some(v);
    }
    Ok((out.expect("repeats > 0"), best))
}

pub fn run(p: &Params) -> Result<Outcome, CliError> {
    let cfg = RandomTensorConfig::new(p.distribution, p.seed);
    let opts = TensorIdOptions {
        estimate_residual: false,
        ..TensorIdOptions::default()
    };
    let mut rows = Vec::new();
    for &d in &p.dims {
        let u = tensors::decaying_random(d, p.m, p.r, p.seed)?;
        let ell = p.ell.min(p.r);
        let (res, secs) = min_time(p.repeats, || {
            Ok(tensor_id_with(
                &u,
                ell,
                RankSpec::Accuracy(p.eps),
                &cfg,
                &opts,
            )?)
        })?;
        let diff = u.add(&res.reduced.scale(-1.0)?)?;
        rows.push(Row {
            stage: Stage::TensorId,
            d,
            r: p.r,
            rank: res.rank(),
            rel_err: diff.frob_norm() / u.frob_norm(),
            seconds: secs,
        });
    }

    // Projection cost at r and 2r in the smallest dimension.
    let d0 = p.dims[0];
    for r in [p.r, 2 * p.r] {
        let u = tensors::decaying_random(d0, p.m, r, p.seed)?;
        let (_, secs) = min_time(p.repeats, || Ok(projections(&u, p.ell, &cfg)?))?;
        rows.push(Row {
            stage: Stage::FormY,
            d: d0,
            r,
            rank: 0,
            rel_err: f64::NAN,
            seconds: secs,
        });
    }

    if p.als_sweeps > 0 {
        let u = tensors::decaying_random(d0, p.m, p.r, p.seed)?;
        let k = rows[0].rank;
        let init = tensors::decaying_random(d0, p.m, k, p.seed.wrapping_add(1))?;
        let als = AlsConfig {
            target_rank: k,
            sweeps: p.als_sweeps,
            regularization: 0.0,
        };
        let t0 = Instant::now();
        let out = als_reduce_traced(&u, &init, &als)?;
        let secs = t0.elapsed().as_secs_f64();
        let fit = out.fit_history.last().copied().unwrap_or(f64::NAN).max(0.0);
        rows.push(Row {
            stage: Stage::Als,
            d: d0,
            r: p.r,
            rank: out.approx.rank(),
            rel_err: fit.sqrt() / u.frob_norm(),
            seconds: secs,
        });
    }
    Ok(Outcome {
        params: p.clone(),
        rows,
    })
}

impl Outcome {
    pub fn rows_for(&self, stage: Stage) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(move |r| r.stage == stage)
    }

    pub fn table(&self) -> Table {
        let p = &self.params;
        let mut t = Table::new(&["stage", "d", "r", "ell", "m", "rank", "rel_err", "seconds"]);
        t.comment("experiment: scaling")
            .comment(format!(
                "eps={:e} repeats={} distribution={} seed={} threads={}",
                p.eps,
                p.repeats,
                p.distribution,
                p.seed,
                rayon::current_num_threads()
            ))
            .comment(
                "tensor_id rows exclude the residual estimate; the als row is illustrative only",
            );
        for r in &self.rows {
            t.push(vec![
                r.stage.name().into(),
                r.d.to_string(),
                r.r.to_string(),
                p.ell.to_string(),
                p.m.to_string(),
                r.rank.to_string(),
                num(r.rel_err),
                num(r.seconds),
            ]);
        }
        t
    }
}
