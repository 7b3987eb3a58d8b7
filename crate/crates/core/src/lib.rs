//! Truth inference for redundant crowd-sourced classification labels.
//!
//! The crate provides a sparse label store ([`dataset`]), the Bayesian weighted
//! average aggregator with its one-versus-rest multi-class wrapper ([`bwa`]),
//! majority vote and Dawid-Skene baselines ([`baselines`]), accuracy and
//! one-sided Wilcoxon signed-rank evaluation ([`evaluation`]) and a seeded
//! confusion-matrix crowd simulator ([`synthetic`]).

pub mod baselines;
pub mod bwa;
pub mod dataset;
pub mod error;
pub mod evaluation;
mod numeric;
pub mod synthetic;

pub use error::{Error, Result};
