//! The subcommands as library functions. Each is deterministic in its inputs.

use anyhow::{bail, Context, Result};
use rand::seq::SliceRandom;
use robust_mallows::contamination::{corrupt, AdversaryStrategy};
use robust_mallows::estimator::{full_pipeline, naive_estimate, normalized_error, EstimationReport, EstimatorConfig};
use robust_mallows::mallows::combined_tv_upper_bound;
use robust_mallows::oracle::suites::{self, SuiteReport};
use robust_mallows::perm::{kendall_tau, l2_distance};
use robust_mallows::{seed, MallowsModel, Permutation};
use serde::{Deserialize, Serialize};

use crate::io::{MaskFile, Truth};

/// How the central ranking of a sampled model is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CentralSpec {
    Explicit(Permutation),
    Keyword(CentralKeyword),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralKeyword {
    Random,
    Identity,
}

impl std::str::FromStr for CentralSpec {
    type Err = anyhow::Error;

    /// `random`, `identity`, or a comma-separated order such as `3,1,2`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Keyword(CentralKeyword::Random)),
            "identity" => Ok(Self::Keyword(CentralKeyword::Identity)),
            _ => {
                let order = s
                    .split(',')
                    .map(|x| x.trim().parse::<u32>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .with_context(|| format!("central ranking {s:?}"))?;
                Ok(Self::Explicit(Permutation::new(order)?))
            }
        }
    }
}

impl CentralSpec {
    pub fn resolve(&self, n: usize, master: u64) -> Result<Permutation> {
        match self {
            Self::Explicit(p) => {
                if p.len() != n {
                    bail!("central ranking has {} elements, expected {n}", p.len());
                }
                Ok(p.clone())
            }
            Self::Keyword(CentralKeyword::Identity) => Ok(Permutation::identity(n)),
            Self::Keyword(CentralKeyword::Random) => {
                let mut order: Vec<u32> = (1..=n as u32).collect();
                order.shuffle(&mut seed::rng(master, seed::tags::SAMPLE, u64::MAX));
                Ok(Permutation::new(order)?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub n: usize,
    pub phi: f64,
    pub central: CentralSpec,
}

/// Draws `samples` permutations; stream 0 of the sampling tag under `seed`.
pub fn sample(model: &ModelSpec, samples: usize, seed: u64) -> Result<(Vec<Permutation>, Truth)> {
    let central = model.central.resolve(model.n, seed)?;
    let m = MallowsModel::new(model.phi, central.clone())?;
    let draws = m.sample_many(samples, &mut seed::rng(seed, seed::tags::SAMPLE, 0));
    let truth = Truth {
        n: model.n,
        phi: model.phi,
        central,
        samples,
        seed,
    };
    Ok((draws, truth))
}

/// `{"kind": name, ...params}` as a strategy.
pub fn parse_strategy(name: &str, params: Option<&str>) -> Result<AdversaryStrategy> {
    let mut obj = match params {
        Some(p) => match serde_json::from_str::<serde_json::Value>(p).context("strategy parameters")? {
            serde_json::Value::Object(m) => m,
            _ => bail!("strategy parameters must be a JSON object"),
        },
        None => serde_json::Map::new(),
    };
    obj.insert("kind".into(), serde_json::Value::String(name.replace('-', "_")));
    serde_json::from_value(serde_json::Value::Object(obj)).with_context(|| format!("strategy {name:?}"))
}

pub fn strategy_name(strategy: &AdversaryStrategy) -> String {
    serde_json::to_value(strategy)
        .ok()
        .and_then(|v| v.get("kind").and_then(|k| k.as_str()).map(str::to_owned))
        .unwrap_or_default()
}

pub fn corrupt_samples(
    honest: &[Permutation],
    eps: f64,
    strategy: &AdversaryStrategy,
    seed: u64,
) -> Result<(Vec<Permutation>, MaskFile)> {
    if honest.is_empty() {
        bail!("cannot corrupt an empty dataset");
    }
    let data = corrupt(honest, eps, strategy, &mut seed::rng(seed, seed::tags::CORRUPT, 0))?;
    let mask = MaskFile {
        evaluation_only: true,
        eps,
        strategy: strategy.clone(),
        seed,
        corrupted_count: data.corrupted_count(),
        mask: data.mask,
    };
    Ok((data.samples, mask))
}

/// The naive coordinate-mean estimate, for comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub central: Permutation,
    pub l2_error: Option<f64>,
    pub kt_error: Option<u64>,
    pub normalized_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    #[serde(flatten)]
    pub report: EstimationReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<Baseline>,
}

pub fn estimate(
    samples: &[Permutation],
    config: &EstimatorConfig,
    truth: Option<&MallowsModel>,
    with_baseline: bool,
) -> Result<EstimateOutput> {
    if samples.is_empty() {
        bail!("cannot estimate from an empty dataset");
    }
    let report = full_pipeline(samples, config, truth)?;
    let baseline = if with_baseline {
        let central = naive_estimate(samples)?;
        let (l2, kt, norm) = match truth {
            Some(m) => {
                let l2 = l2_distance(&central.position_vector(), &m.central().position_vector())?;
                (
                    Some(l2),
                    Some(kendall_tau(&central, m.central())?),
                    normalized_error(l2, m.phi(), config.eps),
                )
            }
            None => (None, None, None),
        };
        Some(Baseline {
            central,
            l2_error: l2,
            kt_error: kt,
            normalized_error: norm,
        })
    } else {
        None
    };
    Ok(EstimateOutput { report, baseline })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n: usize,
    pub eps: f64,
    pub phi: f64,
    pub phi_hat: f64,
    pub l2_error: f64,
    pub kt_error: u64,
    pub phi_error: f64,
    pub tv_upper_bound: f64,
    /// `(1−φ)·l2_error/(ε·log(1/ε))`; `null` when `ε = 0`.
    pub normalized_error: Option<f64>,
}

pub fn evaluate(central_hat: &Permutation, phi_hat: f64, truth: &Truth, eps: f64) -> Result<Metrics> {
    if central_hat.len() != truth.n {
        bail!("report has {} elements, truth has {}", central_hat.len(), truth.n);
    }
    let model = truth.model()?;
    let recovered = MallowsModel::new(phi_hat, central_hat.clone())?;
    let l2 = l2_distance(&central_hat.position_vector(), &truth.central.position_vector())?;
    Ok(Metrics {
        n: truth.n,
        eps,
        phi: truth.phi,
        phi_hat,
        l2_error: l2,
        kt_error: kendall_tau(central_hat, &truth.central)?,
        phi_error: (phi_hat - truth.phi).abs(),
        tv_upper_bound: combined_tv_upper_bound(&recovered, &model)?,
        normalized_error: normalized_error(l2, truth.phi, eps),
    })
}

pub fn oracle_check(suite: &str) -> Result<SuiteReport> {
    Ok(suites::run(suite)?)
}
