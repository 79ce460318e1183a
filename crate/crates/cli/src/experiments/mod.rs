//! The experiments behind each subcommand.

pub mod ortho;
pub mod reduce;
pub mod redundant;
pub mod scaling;
pub mod schulz;
pub mod spectra;

use std::fmt;
use std::str::FromStr;

use septensor_core::linalg::singular_values;
use septensor_core::Matrix;

use crate::{CliError, Config, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Spectra,
    Redundant,
    OrthoLimit,
    SchulzPoisson,
    Scaling,
    Reduce,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Spectra,
        Experiment::Redundant,
        Experiment::OrthoLimit,
        Experiment::SchulzPoisson,
        Experiment::Scaling,
        Experiment::Reduce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Spectra => "spectra",
            Experiment::Redundant => "redundant",
            Experiment::OrthoLimit => "ortho-limit",
            Experiment::SchulzPoisson => "schulz-poisson",
            Experiment::Scaling => "scaling",
            Experiment::Reduce => "reduce",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown experiment '{s}'")))
    }
}

/// CSV data plus an optional JSON snapshot.
#[derive(Clone, Debug)]
pub struct Output {
    pub table: Table,
    pub snapshot: Option<String>,
}

/// Reads the parameters of `exp` from `cfg`, rejects unknown keys, and runs.
pub fn run(exp: Experiment, cfg: &Config) -> Result<Output, CliError> {
    match exp {
        Experiment::Spectra => {
            let p = spectra::Params::from_config(cfg)?;
            cfg.finish()?;
            let res = spectra::run(&p)?;
            Ok(Output {
                table: res.table(),
                snapshot: p.snapshot.then(|| res.tensor.to_json()),
            })
        }
        Experiment::Redundant => {
            let p = redundant::Params::from_config(cfg)?;
            cfg.finish()?;
            let res = redundant::run(&p)?;
            Ok(Output {
                table: res.table(),
                snapshot: p.snapshot.then(|| res.best_reduced().to_json()),
            })
        }
        Experiment::OrthoLimit => {
            let p = ortho::Params::from_config(cfg)?;
            cfg.finish()?;
            Ok(Output {
                table: ortho::run(&p)?.table(),
                snapshot: None,
            })
        }
        Experiment::SchulzPoisson => {
            let p = schulz::Params::from_config(cfg)?;
            cfg.finish()?;
            let res = schulz::run(&p)?;
            Ok(Output {
                table: res.table(),
                snapshot: p.snapshot.then(|| res.inverse.to_json()),
            })
        }
        Experiment::Scaling => {
            let p = scaling::Params::from_config(cfg)?;
            cfg.finish()?;
            Ok(Output {
                table: scaling::run(&p)?.table(),
                snapshot: None,
            })
        }
        Experiment::Reduce => {
            let p = reduce::Params::from_config(cfg)?;
            cfg.finish()?;
            let res = reduce::run(&p)?;
            Ok(Output {
                table: res.table(),
                snapshot: Some(res.reduced.to_json()),
            })
        }
    }
}

/// Number of singular values above `cutoff` times the largest.
pub fn numerical_rank(sv: &[f64], cutoff: f64) -> usize {
    let top = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > cutoff * top).count()
}

pub(crate) fn svals(a: &Matrix) -> Result<Vec<f64>, CliError> {
    Ok(singular_values(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!("nope".parse::<Experiment>().is_err());
    }

    #[test]
    fn rank_counts_relative_cutoff() {
        assert_eq!(numerical_rank(&[1.0, 1e-3, 1e-9, 0.0], 1e-6), 2);
        assert_eq!(numerical_rank(&[], 1e-6), 0);
    }
}
