//! Phase-space quasiprobabilities of one and two light modes in a truncated
//! Fock basis, classical field ensembles, linear-optics channels and
//! nonclassicality criteria.

// `!(x <= tol)` style guards are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod cli;
pub mod error;
pub mod filters;
pub mod fock;
pub mod grid;
pub mod nonclassical;
pub mod optics;
pub mod quasiprob;
pub mod special;
pub mod theorems;

pub use classical::{BeamSplitterParams, ClassicalEnsemble, TwoModeEnsemble};
pub use error::{Error, Result};
pub use filters::FilterSpec;
pub use fock::DensityMatrix;
pub use grid::Lattice;
