//! Spectral filtering for robust mean estimation.
//!
//! Both estimators share one loop: while the top eigenvalue of the weighted
//! covariance exceeds a threshold, zero the weights of the points with the
//! largest squared projections on the top eigenvector. They differ only in
//! the threshold: `σ²(1 + c_stop)` for bounded covariance, `1 + c_stop·δ²/ε`
//! for stable (identity-covariance) inliers.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::seed::mix;

/// Dense row-major `s × d` matrix of points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl PointMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * dim, data.len())?;
        Ok(Self { rows, dim, data })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            check_len(dim, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            dim,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Unweighted coordinate mean.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for i in 0..self.rows {
            for (acc, x) in m.iter_mut().zip(self.row(i)) {
                *acc += x;
            }
        }
        if self.rows > 0 {
            m.iter_mut().for_each(|x| *x /= self.rows as f64);
        }
        m
    }
}

/// Points with per-point weights in `[0, 1/s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPointSet {
    pub points: PointMatrix,
    pub weights: Vec<f64>,
}

impl WeightedPointSet {
    pub fn uniform(points: PointMatrix) -> Self {
        let s = points.rows();
        Self {
            weights: vec![1.0 / s.max(1) as f64; s],
            points,
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weighted mean. When all surviving weights are equal this is the plain
    /// mean of the survivors, summed exactly as [`PointMatrix::mean`] does.
    pub fn weighted_mean(&self) -> Vec<f64> {
        let d = self.points.dim();
        let mut m = vec![0.0; d];
        let first = self.weights.iter().copied().find(|&w| w > 0.0);
        if let Some(w0) = first {
            if self.weights.iter().all(|&w| w == 0.0 || w == w0) {
                let mut count = 0usize;
                for (i, &w) in self.weights.iter().enumerate() {
                    if w > 0.0 {
                        count += 1;
                        for (acc, x) in m.iter_mut().zip(self.points.row(i)) {
                            *acc += x;
                        }
                    }
                }
                m.iter_mut().for_each(|x| *x /= count as f64);
                return m;
            }
        }
        let mut total = 0.0;
        for (i, &w) in self.weights.iter().enumerate() {
            if w > 0.0 {
                total += w;
                for (acc, x) in m.iter_mut().zip(self.points.row(i)) {
                    *acc += w * x;
                }
            }
        }
        if total > 0.0 {
            m.iter_mut().for_each(|x| *x /= total);
        }
        m
    }

    /// Weighted covariance about `mean`, as a dense `d × d` row-major matrix.
    pub fn weighted_covariance(&self, mean: &[f64]) -> Vec<f64> {
        let d = self.points.dim();
        let mut cov = vec![0.0; d * d];
        let mut centered = vec![0.0; d];
        let mut total = 0.0;
        for (i, &w) in self.weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            total += w;
            for ((c, x), m) in centered.iter_mut().zip(self.points.row(i)).zip(mean) {
                *c = x - m;
            }
            for a in 0..d {
                let wa = w * centered[a];
                let row = &mut cov[a * d..a * d + a + 1];
                for (b, slot) in row.iter_mut().enumerate() {
                    *slot += wa * centered[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..=a {
                let v = if total > 0.0 { cov[a * d + b] / total } else { 0.0 };
                cov[a * d + b] = v;
                cov[b * d + a] = v;
            }
        }
        cov
    }
}

/// Tuning of the filter loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterSettings {
    /// Slack multiplier in the stopping threshold.
    pub c_stop: f64,
    /// Per-iteration removal cap as a fraction of `ε`.
    pub removal_fraction: f64,
    /// Points scoring above this multiple of the median score are eligible for removal.
    pub score_multiplier: f64,
    /// Total removable mass as a multiple of `ε`.
    pub budget_multiplier: f64,
    pub power_tolerance: f64,
    pub power_max_iterations: usize,
}

impl Default for FilterSettings {
    fn default() -> Self {
        Self {
            c_stop: 10.0,
            removal_fraction: 0.25,
            score_multiplier: 2.0,
            budget_multiplier: 3.0,
            power_tolerance: 1e-6,
            power_max_iterations: 1000,
        }
    }
}

/// One filtering iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterStep {
    pub eigenvalue: f64,
    pub removed_mass: f64,
    pub removed_points: usize,
    /// Indices zeroed in this step.
    #[serde(skip)]
    pub removed_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub estimate: Vec<f64>,
    pub iterations: usize,
    pub removed_mass: f64,
    pub final_top_eigenvalue: f64,
    pub threshold: f64,
    pub trace: Vec<FilterStep>,
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..=0.1).contains(&eps) {
        Ok(())
    } else {
        Err(invalid("eps", alloc::format!("{eps} is outside [0, 0.1]")))
    }
}

/// Robust mean for inliers with covariance at most `σ² I`.
pub fn robust_mean_bounded_cov(
    data: &PointMatrix,
    eps: f64,
    sigma: f64,
    settings: &FilterSettings,
) -> Result<FilterReport> {
    check_eps(eps)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", "must be positive and finite"));
    }
    let threshold = sigma * sigma * (1.0 + settings.c_stop);
    spectral_filter(&mut WeightedPointSet::uniform(data.clone()), eps, threshold, settings)
}

/// Robust mean for `(3ε, δ)`-stable inliers with identity covariance.
pub fn robust_mean_stable(data: &PointMatrix, eps: f64, delta: f64, settings: &FilterSettings) -> Result<FilterReport> {
    check_eps(eps)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid("delta", "must be positive and finite"));
    }
    let threshold = if eps > 0.0 {
        1.0 + settings.c_stop * delta * delta / eps
    } else {
        f64::INFINITY
    };
    spectral_filter(&mut WeightedPointSet::uniform(data.clone()), eps, threshold, settings)
}

/// The filter loop on an explicit weighted set; weights are updated in place.
///
/// With `eps = 0` nothing can be removed and the weighted mean is returned
/// without computing any spectrum.
pub fn spectral_filter(
    set: &mut WeightedPointSet,
    eps: f64,
    threshold: f64,
    settings: &FilterSettings,
) -> Result<FilterReport> {
    let s = set.points.rows();
    if s == 0 {
        return Err(Error::Empty("points"));
    }
    let d = set.points.dim();
    let budget = settings.budget_multiplier * eps;
    let mut report = FilterReport {
        estimate: Vec::new(),
        iterations: 0,
        removed_mass: 0.0,
        final_top_eigenvalue: 0.0,
        threshold,
        trace: Vec::new(),
    };
    if eps == 0.0 {
        report.estimate = set.weighted_mean();
        report.final_top_eigenvalue = f64::NAN;
        return Ok(report);
    }
    let mut scores: Vec<(f64, usize)> = Vec::with_capacity(s);
    loop {
        let mean = set.weighted_mean();
        let cov = set.weighted_covariance(&mean);
        let (lambda, v) = top_eigenpair(&cov, d, settings, report.iterations as u64);
        report.final_top_eigenvalue = lambda;
        if lambda <= threshold {
            report.estimate = mean;
            return Ok(report);
        }

        scores.clear();
        for (i, &w) in set.weights.iter().enumerate() {
            if w > 0.0 {
                let proj: f64 = set.points.row(i).iter().zip(&mean).zip(&v).map(|((x, m), u)| (x - m) * u).sum();
                scores.push((proj * proj, i));
            }
        }
        if scores.is_empty() {
            report.estimate = mean;
            return Ok(report);
        }
        scores.sort_unstable_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let median = scores[scores.len() / 2].0;
        let cutoff = settings.score_multiplier * median;
        let tail_mass: f64 = scores
            .iter()
            .take_while(|(t, _)| *t > cutoff)
            .map(|&(_, i)| set.weights[i])
            .sum();
        let target = (settings.removal_fraction * eps).min(tail_mass);

        let mut step = FilterStep {
            eigenvalue: lambda,
            removed_mass: 0.0,
            removed_points: 0,
            removed_indices: Vec::new(),
        };
        for &(_, i) in &scores {
            if step.removed_points > 0 && step.removed_mass >= target {
                break;
            }
            step.removed_mass += set.weights[i];
            step.removed_points += 1;
            step.removed_indices.push(i);
            set.weights[i] = 0.0;
        }
        report.removed_mass += step.removed_mass;
        report.iterations += 1;
        report.trace.push(step);
        if report.removed_mass > budget {
            return Err(Error::FilterDivergence {
                removed: report.removed_mass,
                budget,
            });
        }
    }
}

/// Deterministic pseudo-random unit vector for power-iteration starts.
fn start_vector(d: usize, salt: u64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d as u64)
        .map(|k| (mix(salt.wrapping_mul(0x1000_0000_01B3) ^ k) >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

fn mat_vec(m: &[f64], d: usize, v: &[f64], out: &mut [f64]) {
    for (a, slot) in out.iter_mut().enumerate() {
        *slot = m[a * d..(a + 1) * d].iter().zip(v).map(|(x, y)| x * y).sum();
    }
}

/// Top eigenvalue and unit eigenvector of a symmetric PSD `d × d` matrix by power iteration.
///
/// Restarts from a fresh start vector if the iterate collapses; returns
/// `(0, e_1)` for the zero matrix.
pub fn top_eigenpair(m: &[f64], d: usize, settings: &FilterSettings, salt: u64) -> (f64, Vec<f64>) {
    if d == 0 {
        return (0.0, Vec::new());
    }
    let mut next = vec![0.0; d];
    for attempt in 0..4u64 {
        let mut v = start_vector(d, salt ^ (attempt << 32));
        let mut collapsed = false;
        for _ in 0..settings.power_max_iterations {
            mat_vec(m, d, &v, &mut next);
            if normalize(&mut next) <= 1e-300 {
                collapsed = true;
                break;
            }
            let change = libm::sqrt(v.iter().zip(&next).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
            core::mem::swap(&mut v, &mut next);
            if change < settings.power_tolerance {
                break;
            }
        }
        if collapsed {
            continue;
        }
        mat_vec(m, d, &v, &mut next);
        let lambda: f64 = v.iter().zip(&next).map(|(a, b)| a * b).sum();
        return (lambda.max(0.0), v);
    }
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    (0.0, e1)
}

/// Heuristic stability certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityDiagnostic {
    /// Largest `|u·(μ_{S'} − μ)|` found.
    pub mean_dev: f64,
    /// Largest `|u^T Σ_{S'}(μ) u − 1|` found, second moments taken about `mu`.
    pub var_dev: f64,
}

/// Greedy worst-subset search for the two stability deviations.
///
/// Probes the coordinate axes (at most 64), 16 pseudo-random directions and the
/// top eigenvector of the second-moment matrix about `mu`. Along each direction
/// the extremal subsets of size at least `(1−ε)s` remove the most extreme
/// projections from one side, and every removal count up to `⌊εs⌋` is tried.
pub fn stability_diagnostic(data: &PointMatrix, mu: &[f64], eps: f64) -> Result<StabilityDiagnostic> {
    let (s, d) = (data.rows(), data.dim());
    check_len(d, mu.len())?;
    if s == 0 {
        return Err(Error::Empty("points"));
    }
    let max_removed = libm::floor(eps.max(0.0) * s as f64 + 1e-9) as usize;
    let max_removed = max_removed.min(s - 1);

    let mut directions: Vec<Vec<f64>> = Vec::new();
    for a in 0..d.min(64) {
        let mut e = vec![0.0; d];
        e[a] = 1.0;
        directions.push(e);
    }
    for k in 0..16 {
        directions.push(start_vector(d, 0xD1A6 + k));
    }
    let mut set = WeightedPointSet::uniform(data.clone());
    set.weights.iter_mut().for_each(|w| *w = 1.0);
    let second = set.weighted_covariance(mu);
    directions.push(top_eigenpair(&second, d, &FilterSettings::default(), 0xD1A6).1);

    let mut out = StabilityDiagnostic {
        mean_dev: 0.0,
        var_dev: 0.0,
    };
    let mut proj = vec![0.0; s];
    for u in &directions {
        for (i, p) in proj.iter_mut().enumerate() {
            *p = data.row(i).iter().zip(mu).zip(u).map(|((x, m), c)| (x - m) * c).sum();
        }
        proj.sort_unstable_by(f64::total_cmp);
        let total: f64 = proj.iter().sum();
        let total_sq: f64 = proj.iter().map(|p| p * p).sum();
        // Drop k from the bottom or the top.
        let (mut low, mut high) = (0.0, 0.0);
        for k in 0..=max_removed {
            if k > 0 {
                low += proj[k - 1];
                high += proj[s - k];
            }
            let kept = (s - k) as f64;
            out.mean_dev = out.mean_dev.max(((total - low) / kept).abs()).max(((total - high) / kept).abs());
        }
        let mut sq: Vec<f64> = proj.iter().map(|p| p * p).collect();
        sq.sort_unstable_by(f64::total_cmp);
        let (mut small, mut large) = (0.0, 0.0);
        for k in 0..=max_removed {
            if k > 0 {
                small += sq[k - 1];
                large += sq[s - k];
            }
            let kept = (s - k) as f64;
            out.var_dev = out
                .var_dev
                .max(((total_sq - small) / kept - 1.0).abs())
                .max(((total_sq - large) / kept - 1.0).abs());
        }
    }
    Ok(out)
}
