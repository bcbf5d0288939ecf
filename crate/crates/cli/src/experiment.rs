//! Grid experiments: sample → corrupt → estimate → evaluate for every
//! (replicate, ε, strategy) cell, plus a CSV summary.
//!
//! Each replicate draws one honest dataset that all of its cells corrupt, so
//! cells differ only in the contamination. Cells run on worker threads; every
//! random stream is keyed by the master seed and the cell index, so the output
//! does not depend on scheduling.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use robust_mallows::contamination::AdversaryStrategy;
use robust_mallows::estimator::EstimatorConfig;
use robust_mallows::{seed, Error};
use serde::{Deserialize, Serialize};

use crate::commands::{corrupt_samples, estimate, evaluate, sample, strategy_name, EstimateOutput, Metrics, ModelSpec};
use crate::io::write_json;

fn default_replicates() -> usize {
    1
}

/// Everything a grid run depends on besides the master seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    pub samples: usize,
    pub eps: Vec<f64>,
    pub strategies: Vec<AdversaryStrategy>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub baseline: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub replicate: usize,
    pub eps: f64,
    pub strategy: AdversaryStrategy,
}

impl ExperimentSpec {
    /// Replicate-major, then ε, then strategy.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for replicate in 0..self.replicates {
            for &eps in &self.eps {
                for strategy in &self.strategies {
                    out.push(Cell {
                        index: out.len(),
                        replicate,
                        eps,
                        strategy: strategy.clone(),
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    FilterDivergence,
    NoHypothesis,
}

/// One row of the summary table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub cell: usize,
    pub replicate: usize,
    pub eps: f64,
    pub strategy: String,
    pub status: CellStatus,
    pub corrupted: usize,
    pub phi_hat: Option<f64>,
    pub l2_error: Option<f64>,
    pub kt_error: Option<u64>,
    pub phi_error: Option<f64>,
    pub normalized_error: Option<f64>,
    pub tv_upper_bound: Option<f64>,
    pub naive_l2_error: Option<f64>,
}

struct CellOutput {
    row: SummaryRow,
    report: Option<EstimateOutput>,
    metrics: Option<Metrics>,
}

fn run_cell(spec: &ExperimentSpec, master: u64, cell: &Cell) -> Result<CellOutput> {
    let sample_seed = seed::derive(master, seed::tags::SAMPLE, cell.replicate as u64);
    let model_seed = seed::derive(master, seed::tags::SAMPLE, u64::MAX);
    let central = spec.model.central.resolve(spec.model.n, model_seed)?;
    let model = ModelSpec {
        central: crate::commands::CentralSpec::Explicit(central),
        ..spec.model.clone()
    };
    let (honest, truth) = sample(&model, spec.samples, sample_seed)?;
    let (samples, mask) = corrupt_samples(
        &honest,
        cell.eps,
        &cell.strategy,
        seed::derive(master, seed::tags::CORRUPT, cell.index as u64),
    )?;
    let config = EstimatorConfig {
        eps: cell.eps,
        seed: seed::derive(master, seed::tags::CANDIDATE, cell.index as u64),
        ..spec.estimator.clone()
    };
    let true_model = truth.model()?;
    let mut row = SummaryRow {
        cell: cell.index,
        replicate: cell.replicate,
        eps: cell.eps,
        strategy: strategy_name(&cell.strategy),
        status: CellStatus::Ok,
        corrupted: mask.corrupted_count,
        phi_hat: None,
        l2_error: None,
        kt_error: None,
        phi_error: None,
        normalized_error: None,
        tv_upper_bound: None,
        naive_l2_error: None,
    };
    let out = match estimate(&samples, &config, Some(&true_model), spec.baseline) {
        Ok(out) => out,
        Err(e) => {
            row.status = match e.downcast_ref::<Error>() {
                Some(Error::FilterDivergence { .. }) => CellStatus::FilterDivergence,
                Some(Error::NoHypothesis { .. }) => CellStatus::NoHypothesis,
                _ => return Err(e),
            };
            return Ok(CellOutput {
                row,
                report: None,
                metrics: None,
            });
        }
    };
    let metrics = evaluate(&out.report.central_hat, out.report.phi_hat, &truth, cell.eps)?;
    row.phi_hat = Some(metrics.phi_hat);
    row.l2_error = Some(metrics.l2_error);
    row.kt_error = Some(metrics.kt_error);
    row.phi_error = Some(metrics.phi_error);
    row.normalized_error = metrics.normalized_error;
    row.tv_upper_bound = Some(metrics.tv_upper_bound);
    row.naive_l2_error = out.baseline.as_ref().and_then(|b| b.l2_error);
    Ok(CellOutput {
        row,
        report: Some(out),
        metrics: Some(metrics),
    })
}

/// Runs every cell on up to `threads` workers and writes
/// `cell-NNN.report.json`, `cell-NNN.metrics.json` and `summary.csv` into `out_dir`.
pub fn run(spec: &ExperimentSpec, master: u64, out_dir: &Path, threads: usize) -> Result<Vec<SummaryRow>> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let cells = spec.cells();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<SummaryRow>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.clamp(1, cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let result = run_cell(spec, master, cell).and_then(|out| {
                    if let Some(report) = &out.report {
                        write_json(&out_dir.join(format!("cell-{i:03}.report.json")), report)?;
                    }
                    if let Some(metrics) = &out.metrics {
                        write_json(&out_dir.join(format!("cell-{i:03}.metrics.json")), metrics)?;
                    }
                    Ok(out.row)
                });
                results.lock().expect("no worker panicked")[i] = Some(result);
            });
        }
    });
    let rows = results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect::<Result<Vec<_>>>()?;
    let csv_path = out_dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&csv_path).with_context(|| format!("creating {}", csv_path.display()))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(rows)
}
