use anyhow::{bail, Context, Result};
use clap::Args;

use crowdtruth::baselines::{dawid_skene, majority_vote, DsParams};
use crowdtruth::bwa::{aggregate_multiclass, BwaHyperParams, EpsilonStrategy, MultiClassResult, Profile};
use crowdtruth::dataset::LabelMatrix;

/// BWA settings: a named profile, optionally overridden field by field.
#[derive(Debug, Clone, Args)]
pub struct BwaArgs {
    /// av30-original, av15-adjusted or custom (av15-adjusted defaults).
    #[arg(long, default_value = "av15-adjusted")]
    pub profile: String,
    #[arg(long = "a-v")]
    pub a_v: Option<f64>,
    /// original, adjusted or fixed (requires --b-v).
    #[arg(long)]
    pub epsilon_strategy: Option<String>,
    #[arg(long = "b-v")]
    pub b_v: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

impl BwaArgs {
    pub fn hyper_params(&self) -> Result<BwaHyperParams> {
        let profile = match self.profile.as_str() {
            "custom" => Profile::Av15Adjusted,
            other => other.parse::<Profile>()?,
        };
        let mut hp = BwaHyperParams::profile(profile);
        if let Some(a_v) = self.a_v {
            hp.a_v = a_v;
        }
        if let Some(lambda) = self.lambda {
            hp.lambda = lambda;
        }
        if let Some(tolerance) = self.tolerance {
            hp.tolerance = tolerance;
        }
        if let Some(max_iters) = self.max_iters {
            hp.max_iters = max_iters;
        }
        match (self.epsilon_strategy.as_deref(), self.b_v) {
            (Some("original"), None) => hp.strategy = EpsilonStrategy::Original,
            (Some("adjusted"), None) => hp.strategy = EpsilonStrategy::Adjusted,
            (Some("fixed") | None, Some(b_v)) => hp.strategy = EpsilonStrategy::FixedBv(b_v),
            (Some("fixed"), None) => bail!("--epsilon-strategy fixed requires --b-v"),
            (None, None) => {}
            (Some(s @ ("original" | "adjusted")), Some(_)) => bail!("--b-v conflicts with --epsilon-strategy {s}"),
            (Some(other), _) => bail!("unknown epsilon strategy '{other}' (expected original, adjusted or fixed)"),
        }
        hp.validate()?;
        Ok(hp)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Mv,
    Ds,
    Bwa { name: String, params: BwaHyperParams },
}

impl Method {
    pub fn parse(name: &str, bwa: &BwaArgs) -> Result<Self> {
        Ok(match name {
            "mv" => Method::Mv,
            "ds" => Method::Ds,
            "bwa" => Method::Bwa { name: "bwa".into(), params: bwa.hyper_params()? },
            other => match other.strip_prefix("bwa-").map(str::parse::<Profile>) {
                Some(Ok(profile)) => Method::Bwa { name: other.into(), params: BwaHyperParams::profile(profile) },
                _ => bail!("unknown method '{other}' (expected mv, ds, bwa, bwa-av30-original or bwa-av15-adjusted)"),
            },
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Method::Mv => "mv",
            Method::Ds => "ds",
            Method::Bwa { name, .. } => name,
        }
    }

    pub fn run(&self, labels: &LabelMatrix) -> Result<Outcome> {
        Ok(match self {
            Method::Mv => Outcome { predictions: majority_vote(labels).labels, bwa: None },
            Method::Ds => Outcome { predictions: dawid_skene(labels, &DsParams::default()).hard_labels, bwa: None },
            Method::Bwa { params, .. } => {
                let result = aggregate_multiclass(labels, params).context("BWA aggregation failed")?;
                Outcome { predictions: result.hard_labels.clone(), bwa: Some(result) }
            }
        })
    }
}

pub struct Outcome {
    pub predictions: Vec<usize>,
    pub bwa: Option<MultiClassResult>,
}
