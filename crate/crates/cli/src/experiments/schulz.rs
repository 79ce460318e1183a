//! Schulz inversion of the periodic Poisson operator.

use std::time::Instant;

use std::str::FromStr;

use septensor_core::linalg::Matrix;
use septensor_core::sgti::{
    build_kronecker_sum, build_laplacian_1d, build_rank_one_projector, dyadic_band_scaling,
    fourier_basis, schulz_invert, similarity_scale, ErrorNorm, SchulzConfig, SchulzTrace,
    StencilOrder,
};
use septensor_core::tensor_id::Distribution;
use septensor_core::SepOperator;

use crate::{CliError, Config, Table};

/// Per-direction change of variables applied before the Kronecker sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    /// Real Fourier basis with dyadic band scaling; periodic grids only.
    Band,
}

impl FromStr for Preconditioner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Preconditioner::None),
            "band" => Ok(Preconditioner::Band),
            _ => Err("expected none or band".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub m: usize,
    pub order: u32,
    pub d: usize,
    pub periodic: bool,
    pub projector: bool,
    pub preconditioner: Preconditioner,
    pub alpha: Option<f64>,
    pub eps_reduce: f64,
    pub max_rank: usize,
    pub als_sweeps: usize,
    pub max_iters: usize,
    pub target: f64,
    pub error_norm: ErrorNorm,
    pub ell: Option<usize>,
    pub distribution: Distribution,
    pub seed: u64,
    pub als_guard: bool,
    pub snapshot: bool,
}

impl Default for Params {
    fn default() -> Self {
        let s = SchulzConfig::default();
        Params {
            m: 32,
            order: 8,
            d: 3,
            periodic: true,
            projector: true,
            preconditioner: Preconditioner::Band,
            alpha: None,
            eps_reduce: s.eps_reduce,
            max_rank: s.max_rank,
            als_sweeps: s.als_sweeps,
            max_iters: s.max_iters,
            target: s.target,
            error_norm: s.error_norm,
            ell: None,
            distribution: s.distribution,
            seed: 0,
            als_guard: s.als_guard,
            snapshot: false,
        }
    }
}

fn parse_norm(s: &str) -> Result<ErrorNorm, CliError> {
    match s {
        "operator-s" => Ok(ErrorNorm::OperatorS),
        "tensor-s" => Ok(ErrorNorm::TensorS),
        "frobenius" => Ok(ErrorNorm::Frobenius),
        _ => Err(CliError::Config(format!(
            "unknown error_norm '{s}' (operator-s, tensor-s, frobenius)"
        ))),
    }
}

impl Params {
    pub fn from_config(c: &Config) -> Result<Self, CliError> {
        let d = Params::default();
        let error_norm = match c.get_opt::<String>("error_norm")? {
            Some(s) => parse_norm(&s)?,
            None => d.error_norm,
        };
        let p = Params {
            m: c.get("m", d.m)?,
            order: c.get("order", d.order)?,
            d: c.get("d", d.d)?,
            periodic: c.get("periodic", d.periodic)?,
            projector: c.get("projector", d.projector)?,
            preconditioner: c.get("preconditioner", d.preconditioner)?,
            alpha: c.get_opt("alpha")?,
            eps_reduce: c.get("eps_reduce", d.eps_reduce)?,
            max_rank: c.get("max_rank", d.max_rank)?,
            als_sweeps: c.get("als_sweeps", d.als_sweeps)?,
            max_iters: c.get("max_iters", d.max_iters)?,
            target: c.get("target", d.target)?,
            error_norm,
            ell: c.get_opt("ell")?,
            distribution: c.get("distribution", d.distribution)?,
            seed: c.get("seed", d.seed)?,
            als_guard: c.get("als_guard", d.als_guard)?,
            snapshot: c.get("snapshot", d.snapshot)?,
        };
        if p.preconditioner == Preconditioner::Band && !p.periodic {
            return Err(CliError::Config(
                "the band preconditioner needs a periodic grid".into(),
            ));
        }
        Ok(p)
    }

    /// Fourier basis and scaling, or `None` without preconditioning.
    fn change_of_variables(&self) -> Result<Option<(Matrix, Vec<f64>)>, CliError> {
        match self.preconditioner {
            Preconditioner::None => Ok(None),
            Preconditioner::Band => Ok(Some((fourier_basis(self.m)?, dyadic_band_scaling(self.m)))),
        }
    }

    /// One-dimensional factor of the Kronecker sum.
    pub fn factor(&self) -> Result<Matrix, CliError> {
        let a = build_laplacian_1d(self.m, StencilOrder::from_order(self.order)?, self.periodic)?;
        match self.change_of_variables()? {
            None => Ok(a),
            Some((q, s)) => Ok(similarity_scale(&a, &q, &s)?),
        }
    }

    pub fn operator(&self) -> Result<SepOperator, CliError> {
        Ok(build_kronecker_sum(&self.factor()?, self.d)?)
    }

    /// Null vector of [`Params::factor`]: the constant, mapped through the
    /// change of variables.
    pub fn null_vector(&self) -> Result<Vec<f64>, CliError> {
        let ones = vec![1.0; self.m];
        match self.change_of_variables()? {
            None => Ok(ones),
            Some((q, s)) => Ok(q
                .transpose()
                .matvec(&ones)
                .iter()
                .zip(&s)
                .map(|(x, si)| x / si)
                .collect()),
        }
    }

    pub fn schulz_config(&self) -> Result<SchulzConfig, CliError> {
        let nullspace = if self.projector {
            Some(build_rank_one_projector(&vec![
                self.null_vector()?;
                self.d
            ])?)
        } else {
            None
        };
        Ok(SchulzConfig {
            alpha: self.alpha,
            eps_reduce: self.eps_reduce,
            max_rank: self.max_rank,
            als_sweeps: self.als_sweeps,
            max_iters: self.max_iters,
            nullspace,
            error_norm: self.error_norm,
            target: self.target,
            ell: self.ell,
            distribution: self.distribution,
            seed: self.seed,
            als_guard: self.als_guard,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub params: Params,
    pub inverse: SepOperator,
    pub trace: SchulzTrace,
    pub seconds: f64,
}

pub fn run(p: &Params) -> Result<Outcome, CliError> {
    let t0 = Instant::now();
    let b = p.operator()?;
    let (inverse, trace) = schulz_invert(&b, &p.schulz_config()?)?;
    Ok(Outcome {
        params: p.clone(),
        inverse,
        trace,
        seconds: t0.elapsed().as_secs_f64(),
    })
}

impl Outcome {
    pub fn table(&self) -> Table {
        let p = &self.params;
        let mut t = Table::new(&["iter", "error", "rank_pre", "rank_post_id", "rank_post_als"]);
        t.comment("experiment: schulz-poisson")
            .comment(format!(
                "m={} order={} d={} periodic={} projector={} preconditioner={:?} seed={}",
                p.m, p.order, p.d, p.periodic, p.projector, p.preconditioner, p.seed
            ))
            .comment(format!(
                "alpha={:e} eps_reduce={:e} max_rank={} als_sweeps={} error_norm={:?}",
                self.trace.alpha, p.eps_reduce, p.max_rank, p.als_sweeps, p.error_norm
            ))
            .comment("desk scale: m=32 grid points per direction instead of 512")
            .comment("band preconditioner: real Fourier basis with dyadic band scaling in place of a wavelet basis with diagonal scaling");
        for line in self.trace.to_csv().lines().skip(1) {
            t.push(line.split(',').map(str::to_string).collect());
        }
        t
    }
}
