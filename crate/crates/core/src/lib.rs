//! Separation-rank reduction for canonical tensor decompositions.
//!
//! The central routine is [`tensor_id::tensor_id_randomized`], which picks a
//! subset of the terms of a [`Ctd`] by projecting onto random rank-one
//! tensors and running a matrix interpolative decomposition on the result.
//! Around it sit the dense kernels ([`linalg`]), an s-norm estimator
//! ([`snorm`]), an ALS refinement step ([`als`]) and a Schulz inversion
//! driver for separated operators ([`sgti`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod als;
pub mod ctd;
mod error;
pub mod linalg;
pub mod sgti;
pub mod snorm;
pub mod tensor_id;

pub use ctd::{Ctd, QFactorization, SepOperator};
pub use error::{Error, Result};
pub use linalg::{Matrix, MatrixId, RankSpec, SymId};
