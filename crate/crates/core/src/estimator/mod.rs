//! The learning pipeline.
//!
//! 1. Bracket `φ` robustly from adjacent-pair inversion rates.
//! 2. If the bracket lies below ½, pairwise majority recovers the central ranking.
//! 3. Otherwise pad, take the rough spectral estimate and refine it for
//!    `⌈10·log(1/ε)⌉` rounds, at one or more `φ` guesses.
//! 4. Choose among the resulting candidate models with a Scheffé tournament.

pub mod padding;
pub mod refine;
pub mod tournament;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::mallows::MallowsModel;
use crate::perm::{kendall_tau, l2_distance, sort_to_permutation, Permutation};
use crate::robust_mean::{FilterReport, FilterSettings};
use crate::seed;

pub use padding::{default_theta, embed, extract_middle, pad, pad_with, trunc, PaddedInstance};
pub use refine::{coordinate_scale, refine, rough_estimate, stability_delta, RefineStep};
pub use tournament::{default_mc_size, hypothesis_select, TournamentReport};

/// Coordinate-wise mean of the position vectors, sorted. No filtering.
pub fn naive_estimate(samples: &[Permutation]) -> Result<Permutation> {
    let n = samples.first().ok_or(Error::Empty("samples"))?.len();
    let mut sum = vec![0u64; n];
    for p in samples {
        check_len(n, p.len())?;
        for (acc, &r) in sum.iter_mut().zip(p.ranks()) {
            *acc += r as u64;
        }
    }
    let mean: Vec<f64> = sum.iter().map(|&x| x as f64 / samples.len() as f64).collect();
    Ok(sort_to_permutation(&mean, 0, 0))
}

/// `before[x·n + y]`: number of samples placing element `x+1` before `y+1`.
pub fn pairwise_counts(samples: &[Permutation]) -> Result<Vec<u32>> {
    let n = samples.first().ok_or(Error::Empty("samples"))?.len();
    let mut before = vec![0u32; n * n];
    for p in samples {
        check_len(n, p.len())?;
        let order = p.order();
        for (i, &x) in order.iter().enumerate() {
            let row = (x as usize - 1) * n;
            for &y in &order[i + 1..] {
                before[row + y as usize - 1] += 1;
            }
        }
    }
    Ok(before)
}

/// Copeland order: elements sorted by number of strict pairwise-majority wins
/// (descending), ties by element index. Equals the pairwise-majority order
/// whenever that relation is transitive.
pub fn majority_order(samples: &[Permutation]) -> Result<Permutation> {
    let n = samples.first().ok_or(Error::Empty("samples"))?.len();
    let before = pairwise_counts(samples)?;
    let wins: Vec<f64> = (0..n)
        .map(|x| {
            let w = (0..n).filter(|&y| y != x && before[x * n + y] > before[y * n + x]).count();
            -(w as f64)
        })
        .collect();
    Ok(sort_to_permutation(&wins, 0, 0))
}

/// Robust bracket for `φ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiBracket {
    pub low: f64,
    pub high: f64,
    /// Point estimate from the unwidened median statistic.
    pub point: f64,
    /// Median over adjacent pairs of the minority fraction.
    pub statistic: f64,
}

fn phi_from_rate(p: f64) -> f64 {
    if p >= 0.5 {
        1.0
    } else if p <= 0.0 {
        0.0
    } else {
        (p / (1.0 - p)).clamp(0.0, 1.0)
    }
}

/// Brackets `φ` from the median, over pairs adjacent in the majority order, of
/// the fraction of samples inverting the pair.
///
/// For adjacent central elements that fraction is exactly `φ/(1+φ)`. An
/// `ε`-fraction of replaced samples moves an observed rate `p̂` only within
/// `[(1−ε)p, (1−ε)p + ε]`, so the true rate lies in
/// `[(p̂ − ε)/(1−ε), p̂/(1−ε)]`, which is further widened by a sampling slack
/// of `3·√(1/(4s))` and mapped through `p ↦ p/(1−p)`. Fewer than 100 samples
/// or fewer than two elements give `[0, 1]`.
pub fn estimate_phi_robust(samples: &[Permutation], eps: f64) -> Result<PhiBracket> {
    if !(0.0..0.5).contains(&eps) {
        return Err(invalid("eps", "must lie in [0, 0.5)"));
    }
    let s = samples.len();
    let n = samples.first().map_or(0, Permutation::len);
    let uninformative = PhiBracket {
        low: 0.0,
        high: 1.0,
        point: 0.5,
        statistic: f64::NAN,
    };
    if s < 100 || n < 2 {
        return Ok(uninformative);
    }
    let before = pairwise_counts(samples)?;
    let reference = majority_order(samples)?;
    let mut rates: Vec<f64> = reference
        .order()
        .windows(2)
        .map(|w| {
            let (x, y) = (w[0] as usize - 1, w[1] as usize - 1);
            before[y * n + x] as f64 / s as f64
        })
        .collect();
    rates.sort_unstable_by(f64::total_cmp);
    let m = rates.len();
    let median = if m % 2 == 1 {
        rates[m / 2]
    } else {
        0.5 * (rates[m / 2 - 1] + rates[m / 2])
    };
    let slack = 3.0 * libm::sqrt(0.25 / s as f64);
    let low_rate = (median - eps) / (1.0 - eps) - slack;
    let high_rate = median / (1.0 - eps) + slack;
    Ok(PhiBracket {
        low: phi_from_rate(low_rate),
        high: phi_from_rate(high_rate),
        point: phi_from_rate(median),
        statistic: median,
    })
}

/// `φ` grid over `[low, high]` with step `ε/n²`, or `cap` evenly spaced points
/// (endpoints included) if that step would give more. Empty when `cap = 0`.
pub fn phi_grid(low: f64, high: f64, n: usize, eps: f64, cap: usize) -> Vec<f64> {
    if cap == 0 {
        return Vec::new();
    }
    if !(high > low) || cap == 1 {
        return vec![0.5 * (low + high)];
    }
    let step = crate::mallows::phi_perturbation_tv(n.max(1), eps);
    let fine = if step > 0.0 {
        libm::floor((high - low) / step) as usize + 1
    } else {
        usize::MAX
    };
    if fine <= cap {
        let mut g: Vec<f64> = (0..fine).map(|i| low + i as f64 * step).collect();
        if g.last().map_or(true, |&x| x < high) && g.len() < cap {
            g.push(high);
        }
        g
    } else {
        (0..cap)
            .map(|i| if i + 1 == cap { high } else { low + (high - low) * i as f64 / (cap - 1) as f64 })
            .collect()
    }
}

/// Estimator settings. Every field has a default, so `{}` is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub eps: f64,
    pub seed: u64,
    /// Padding width is `⌈theta_coeff · log(n/ε)/(1−φ)⌉`.
    pub theta_coeff: f64,
    pub theta_override: Option<usize>,
    /// Maximum number of `φ` hypotheses.
    pub grid_cap: usize,
    /// How many grid points (nearest the robust point estimate of `φ`) run the
    /// full pad/rough/refine pipeline; the remaining hypotheses reuse the central
    /// ranking of the nearest such point. Set it to `grid_cap` to run every point.
    pub pipeline_points: usize,
    /// Grid points above this `φ` do not run the pipeline (the padding width diverges as `φ → 1`).
    pub pipeline_phi_max: f64,
    /// Defaults to `⌈10·log(1/ε)⌉`, with `ε` floored at `1/s`.
    pub refinement_rounds: Option<usize>,
    /// Stop refining once a round moves the ranking by less than this L2 distance.
    pub early_stop: Option<f64>,
    /// Defaults to [`default_mc_size`].
    pub mc_size: Option<usize>,
    /// Known `φ`: skips the bracket and the grid.
    pub phi: Option<f64>,
    pub majority_shortcut: bool,
    /// Covariance bound for the scaled truncated position vectors.
    pub rough_sigma_sq: f64,
    pub rough_filter: FilterSettings,
    pub refine_filter: FilterSettings,
    pub c_delta: f64,
    /// Proxy cap `c_rough·√ε/(1−φ)` for the distance to the truth.
    pub c_rough: f64,
}

/// Calibrated filter constants; see the notes on [`EstimatorConfig::default`].
pub const ROUGH_SIGMA_SQ: f64 = 3.5;
pub const ROUGH_C_STOP: f64 = 0.1;
pub const REFINE_C_STOP: f64 = 0.09;

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            eps: 0.05,
            seed: 0,
            theta_coeff: 10.0,
            theta_override: None,
            grid_cap: 32,
            pipeline_points: 1,
            pipeline_phi_max: 0.99,
            refinement_rounds: None,
            early_stop: Some(0.5),
            mc_size: None,
            phi: None,
            majority_shortcut: true,
            rough_sigma_sq: ROUGH_SIGMA_SQ,
            rough_filter: FilterSettings {
                c_stop: ROUGH_C_STOP,
                ..FilterSettings::default()
            },
            refine_filter: FilterSettings {
                c_stop: REFINE_C_STOP,
                ..FilterSettings::default()
            },
            c_delta: 1.0,
            c_rough: 1.0,
        }
    }
}

/// Ground-truth comparison, filled only when the truth is supplied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthErrors {
    pub l2_error: f64,
    pub kt_error: u64,
    pub phi_error: f64,
    /// `(1−φ)·l2/(ε·log(1/ε))`; `None` when `ε = 0`.
    pub normalized_error: Option<f64>,
}

impl TruthErrors {
    pub fn compute(central_hat: &Permutation, phi_hat: f64, truth: &MallowsModel, eps: f64) -> Result<Self> {
        let l2 = l2_distance(&central_hat.position_vector(), &truth.central().position_vector())?;
        Ok(Self {
            l2_error: l2,
            kt_error: kendall_tau(central_hat, truth.central())?,
            phi_error: (phi_hat - truth.phi()).abs(),
            normalized_error: normalized_error(l2, truth.phi(), eps),
        })
    }
}

/// `(1−φ)·l2/(ε·log(1/ε))`, or `None` for `ε ∉ (0, 1)`.
pub fn normalized_error(l2: f64, phi: f64, eps: f64) -> Option<f64> {
    if eps > 0.0 && eps < 1.0 {
        Some((1.0 - phi) * l2 / (eps * libm::log(1.0 / eps)))
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundReport {
    pub movement: f64,
    pub proxy: f64,
    pub delta: f64,
    pub aborted: bool,
    /// L2 distance to the true central ranking after this round, if known.
    pub l2_error: Option<f64>,
    pub front_filter: Option<FilterReport>,
    pub back_filter: Option<FilterReport>,
}

/// One run of pad → rough → refine at a fixed `φ` guess.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub phi_guess: f64,
    pub theta: usize,
    pub rough_filter: Option<FilterReport>,
    pub rough_l2_error: Option<f64>,
    /// Set when the rough filter diverged; the guess then yields no candidate.
    pub rough_failure: Option<String>,
    pub planned_rounds: usize,
    pub rounds: Vec<RoundReport>,
    pub central: Option<Permutation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub phi: f64,
    pub central: Permutation,
    /// Index into `pipelines`, or `None` for the majority order.
    pub source: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationPath {
    Majority,
    Spectral,
    KnownPhi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    pub n: usize,
    pub samples: usize,
    pub eps: f64,
    pub path: EstimationPath,
    pub phi_hat: f64,
    pub central_hat: Permutation,
    pub bracket: PhiBracket,
    pub grid: Vec<f64>,
    pub pipelines: Vec<PipelineReport>,
    pub candidates: Vec<CandidateReport>,
    /// Tournament over the grid with the majority order as every central; picks
    /// where the pipeline runs.
    pub pilot: Option<TournamentReport>,
    pub tournament: TournamentReport,
    pub truth: Option<TruthErrors>,
}

impl EstimationReport {
    pub fn model(&self) -> Result<MallowsModel> {
        MallowsModel::new(self.phi_hat, self.central_hat.clone())
    }
}

/// `ε` used where the algorithm needs `log(1/ε)` to be finite.
fn effective_eps(eps: f64, s: usize) -> f64 {
    eps.max(1.0 / s.max(2) as f64)
}

/// Runs pad → rough → refinement at one `φ` guess.
pub fn run_pipeline(
    samples: &[Permutation],
    phi: f64,
    config: &EstimatorConfig,
    stream: u64,
    truth: Option<&MallowsModel>,
) -> Result<PipelineReport> {
    let n = samples.first().ok_or(Error::Empty("samples"))?.len();
    let eps = config.eps;
    let eps_eff = effective_eps(eps, samples.len());
    let theta = config
        .theta_override
        .unwrap_or_else(|| default_theta(n, phi, eps_eff, config.theta_coeff));
    let planned_rounds = config
        .refinement_rounds
        .unwrap_or_else(|| libm::ceil(10.0 * libm::log(1.0 / eps_eff)) as usize);
    let mut report = PipelineReport {
        phi_guess: phi,
        theta,
        rough_filter: None,
        rough_l2_error: None,
        rough_failure: None,
        planned_rounds,
        rounds: Vec::new(),
        central: None,
    };
    let error_to_truth = |p: &Permutation| -> Option<f64> {
        truth.and_then(|m| l2_distance(&p.position_vector(), &m.central().position_vector()).ok())
    };

    let inst = pad_with(samples, phi, theta, seed::derive(config.seed, seed::tags::PADDING, stream))?;
    let (rough, rough_filter) = match rough_estimate(&inst, eps, config.rough_sigma_sq, &config.rough_filter) {
        Ok(r) => r,
        Err(e @ Error::FilterDivergence { .. }) => {
            report.rough_failure = Some(alloc::format!("{e}"));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    let mut current = inst.extract_middle(&rough)?;
    report.rough_filter = Some(rough_filter);
    report.rough_l2_error = error_to_truth(&current);

    let scale_free = 1.0 - phi;
    let cap = config.c_rough * libm::sqrt(eps_eff) / scale_free;
    let floor = eps_eff * libm::log(1.0 / eps_eff) / scale_free;
    let mut proxy = cap.max(floor);
    for _ in 0..planned_rounds {
        let step = refine(&inst, eps, &current, proxy, config.c_delta, &config.refine_filter)?;
        let movement = l2_distance(&step.next.position_vector(), &current.position_vector())?;
        current = step.next;
        report.rounds.push(RoundReport {
            movement,
            proxy,
            delta: step.delta,
            aborted: step.aborted,
            l2_error: error_to_truth(&current),
            front_filter: step.front_filter,
            back_filter: step.back_filter,
        });
        proxy = movement.max(floor).min(cap.max(floor));
        if step.aborted || config.early_stop.is_some_and(|t| movement < t) {
            break;
        }
    }
    report.central = Some(current);
    Ok(report)
}

/// The full estimator.
///
/// `truth`, when given, is used only to fill the error fields of the report.
pub fn full_pipeline(
    samples: &[Permutation],
    config: &EstimatorConfig,
    truth: Option<&MallowsModel>,
) -> Result<EstimationReport> {
    let eps = config.eps;
    if !(0.0..=0.1).contains(&eps) {
        return Err(invalid("eps", alloc::format!("{eps} is outside [0, 0.1]")));
    }
    let n = samples.first().ok_or(Error::Empty("samples"))?.len();
    for p in samples {
        check_len(n, p.len())?;
    }
    if let Some(m) = truth {
        check_len(n, m.n())?;
    }
    let s = samples.len();

    let bracket = match config.phi {
        Some(phi) => {
            crate::mallows::check_phi(phi)?;
            PhiBracket {
                low: phi,
                high: phi,
                point: phi,
                statistic: f64::NAN,
            }
        }
        None => estimate_phi_robust(samples, eps)?,
    };
    let grid = match config.phi {
        Some(phi) => vec![phi],
        None => phi_grid(bracket.low, bracket.high, n, effective_eps(eps, s), config.grid_cap),
    };
    if grid.is_empty() {
        return Err(Error::NoHypothesis {
            reason: "empty phi grid".into(),
        });
    }

    let majority = config.majority_shortcut && config.phi.is_none() && bracket.high < 0.5;
    let path = if config.phi.is_some() {
        EstimationPath::KnownPhi
    } else if majority {
        EstimationPath::Majority
    } else {
        EstimationPath::Spectral
    };

    // Pilot tournament: every grid φ paired with the majority order. The
    // pipeline then runs at the grid points nearest the pilot winner, within
    // [½, pipeline_phi_max].
    let mc = config.mc_size.unwrap_or_else(|| default_mc_size(eps, s));
    let pilot = if !majority && grid.len() > 1 {
        let central = majority_order(samples)?;
        let models: Vec<MallowsModel> = grid
            .iter()
            .map(|&phi| MallowsModel::new(phi, central.clone()))
            .collect::<Result<_>>()?;
        Some(hypothesis_select(&models, samples, mc, seed::derive(config.seed, seed::tags::TOURNAMENT, 1))?)
    } else {
        None
    };
    let mut pipeline_idx: Vec<usize> = if majority {
        Vec::new()
    } else {
        (0..grid.len())
            .filter(|&i| grid[i] >= 0.5 && grid[i] <= config.pipeline_phi_max && grid[i] < 1.0)
            .collect()
    };
    let target = pilot
        .as_ref()
        .map_or(bracket.point, |p| grid[p.winner])
        .clamp(0.5, config.pipeline_phi_max);
    pipeline_idx.sort_by(|&a, &b| (grid[a] - target).abs().total_cmp(&(grid[b] - target).abs()).then(a.cmp(&b)));
    pipeline_idx.truncate(config.pipeline_points.max(1));
    pipeline_idx.sort_unstable();

    let mut pipelines = Vec::new();
    let mut divergence = None;
    for &i in &pipeline_idx {
        match run_pipeline(samples, grid[i], config, i as u64, truth) {
            Ok(r) => pipelines.push(r),
            Err(e @ Error::FilterDivergence { .. }) => divergence = Some(e),
            Err(e) => return Err(e),
        }
    }
    let sources: Vec<(f64, usize)> = pipelines
        .iter()
        .enumerate()
        .filter(|(_, r)| r.central.is_some())
        .map(|(k, r)| (r.phi_guess, k))
        .collect();
    if !pipeline_idx.is_empty() && sources.is_empty() {
        return Err(divergence.unwrap_or(Error::FilterDivergence {
            removed: f64::NAN,
            budget: config.rough_filter.budget_multiplier * eps,
        }));
    }

    let majority_central = if sources.is_empty() { Some(majority_order(samples)?) } else { None };
    let candidates: Vec<CandidateReport> = grid
        .iter()
        .map(|&phi| {
            let nearest = sources
                .iter()
                .min_by(|a, b| (a.0 - phi).abs().total_cmp(&(b.0 - phi).abs()))
                .map(|&(_, k)| k);
            match nearest {
                Some(k) => CandidateReport {
                    phi,
                    central: pipelines[k].central.clone().expect("source has a central"),
                    source: Some(k),
                },
                None => CandidateReport {
                    phi,
                    central: majority_central.clone().expect("set when there are no sources"),
                    source: None,
                },
            }
        })
        .collect();
    let models: Vec<MallowsModel> = candidates
        .iter()
        .map(|c| MallowsModel::new(c.phi, c.central.clone()))
        .collect::<Result<_>>()?;
    let tournament = hypothesis_select(&models, samples, mc, seed::derive(config.seed, seed::tags::TOURNAMENT, 0))?;
    let winner = &candidates[tournament.winner];
    let truth_errors = truth
        .map(|m| TruthErrors::compute(&winner.central, winner.phi, m, eps))
        .transpose()?;
    Ok(EstimationReport {
        n,
        samples: s,
        eps,
        path,
        phi_hat: winner.phi,
        central_hat: winner.central.clone(),
        bracket,
        grid,
        pipelines,
        candidates,
        pilot,
        tournament,
        truth: truth_errors,
    })
}
