//! Bayesian weighted average (BWA) aggregation.
//!
//! Each item carries a continuous truth estimate `z_i` with a Gaussian prior
//! N(mu, 1/lambda); each worker has a precision `v_j` with a Gamma(a_v/2, b_v/2)
//! prior, and labels are modelled as N(z_i, 1/v_j). Integrating the precisions
//! out leaves the objective
//!
//! ```text
//! sum_i lambda/2 (z_i - mu)^2 + sum_j (a_v + |N_j|)/2 * ln(b_v + SSE_j)
//! ```
//!
//! which [`run_em_binary`] minimises by alternating a Gamma-posterior E-step
//! with a weighted-average M-step. Multi-class data is handled one class at a
//! time by [`aggregate_multiclass`].

mod em;
mod error_rate;
mod multiclass;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::LabelMatrix;
use crate::error::{Error, Result};

pub use em::{run_em_binary, run_em_binary_with, BinaryResult, BwaState, CONVERGENCE_FLOOR};
pub use error_rate::{adjust_error_rate, derive_bv, estimate_error_rate, raw_error_rate};
pub use multiclass::{aggregate_multiclass, MultiClassResult};

pub const DEFAULT_LAMBDA: f64 = 1.0;
pub const DEFAULT_TOLERANCE: f64 = 1e-3;
pub const DEFAULT_MAX_ITERS: usize = 500;
pub const DEFAULT_EPSILON_FLOOR: f64 = 1e-6;

/// How the prior mistake count `b_v` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "b_v")]
pub enum EpsilonStrategy {
    /// Use the given `b_v` as is.
    FixedBv(f64),
    /// `b_v = a_v * eps` with `eps` the majority-vote disagreement rate.
    Original,
    /// As `Original`, with `eps` scaled by `4 (1 - 1/K)`.
    Adjusted,
}

impl fmt::Display for EpsilonStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonStrategy::FixedBv(b) => write!(f, "fixed({b})"),
            EpsilonStrategy::Original => f.write_str("original"),
            EpsilonStrategy::Adjusted => f.write_str("adjusted"),
        }
    }
}

/// The two configurations used for the benchmark comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    /// a_v = 30, unadjusted error rate.
    Av30Original,
    /// a_v = 15, error rate scaled by 4 (1 - 1/K).
    Av15Adjusted,
}

impl Profile {
    pub fn name(self) -> &'static str {
        match self {
            Profile::Av30Original => "av30-original",
            Profile::Av15Adjusted => "av15-adjusted",
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "av30-original" => Ok(Profile::Av30Original),
            "av15-adjusted" => Ok(Profile::Av15Adjusted),
            other => Err(Error::InvalidParameter(format!(
                "unknown BWA profile '{other}' (expected av30-original or av15-adjusted)"
            ))),
        }
    }
}

/// User-facing BWA configuration. `b_v` is resolved per dataset by
/// [`em_params`](Self::em_params).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BwaHyperParams {
    pub lambda: f64,
    pub a_v: f64,
    pub strategy: EpsilonStrategy,
    pub tolerance: f64,
    pub max_iters: usize,
    pub epsilon_floor: f64,
}

impl Default for BwaHyperParams {
    fn default() -> Self {
        Self::profile(Profile::Av15Adjusted)
    }
}

impl BwaHyperParams {
    pub fn profile(profile: Profile) -> Self {
        let (a_v, strategy) = match profile {
            Profile::Av30Original => (30.0, EpsilonStrategy::Original),
            Profile::Av15Adjusted => (15.0, EpsilonStrategy::Adjusted),
        };
        Self {
            lambda: DEFAULT_LAMBDA,
            a_v,
            strategy,
            tolerance: DEFAULT_TOLERANCE,
            max_iters: DEFAULT_MAX_ITERS,
            epsilon_floor: DEFAULT_EPSILON_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("lambda", self.lambda)?;
        check_positive("a_v", self.a_v)?;
        check_positive("tolerance", self.tolerance)?;
        check_positive("epsilon_floor", self.epsilon_floor)?;
        if let EpsilonStrategy::FixedBv(b_v) = self.strategy {
            check_positive("b_v", b_v)?;
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Resolves `b_v` for `labels` and returns the parameters of the binary solver.
    pub fn em_params(&self, labels: &LabelMatrix) -> Result<EmParams> {
        self.validate()?;
        let b_v = match self.strategy {
            EpsilonStrategy::FixedBv(b_v) => b_v,
            EpsilonStrategy::Original => {
                let eps = estimate_error_rate(labels, self.epsilon_floor)?;
                derive_bv(self.a_v, eps, self.epsilon_floor)
            }
            EpsilonStrategy::Adjusted => {
                let eps = estimate_error_rate(labels, self.epsilon_floor)?;
                let eps = adjust_error_rate(eps, labels.num_classes().max(2));
                derive_bv(self.a_v, eps, self.epsilon_floor)
            }
        };
        let params = EmParams {
            lambda: self.lambda,
            a_v: self.a_v,
            b_v,
            tolerance: self.tolerance,
            max_iters: self.max_iters,
        };
        params.validate()?;
        Ok(params)
    }
}

/// Fully resolved parameters of one binary EM run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmParams {
    pub lambda: f64,
    pub a_v: f64,
    pub b_v: f64,
    pub tolerance: f64,
    pub max_iters: usize,
}

impl EmParams {
    pub fn new(lambda: f64, a_v: f64, b_v: f64) -> Self {
        Self { lambda, a_v, b_v, tolerance: DEFAULT_TOLERANCE, max_iters: DEFAULT_MAX_ITERS }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("lambda", self.lambda)?;
        check_positive("a_v", self.a_v)?;
        check_positive("b_v", self.b_v)?;
        check_positive("tolerance", self.tolerance)?;
        if self.max_iters < 1 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {value}")))
    }
}

/// Maps a worker precision to the accuracy of the equivalent logistic worker,
/// `sqrt(e^v) / (1 + sqrt(e^v))`.
pub fn worker_accuracy(v: f64) -> Result<f64> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::InvalidParameter(format!("precision must be non-negative, got {v}")));
    }
    Ok(1.0 / (1.0 + (-0.5 * v).exp()))
}
