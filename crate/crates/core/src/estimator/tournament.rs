//! Scheffé tournament between candidate Mallows models.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::mallows::MallowsModel;
use crate::perm::{kendall_tau, Permutation};
use crate::seed;

/// Monte Carlo draws per candidate: `⌈50/ε²⌉` capped at `10⁶`.
///
/// With `eps = 0` the sample size `s` (capped the same way) is used instead,
/// since the empirical masses are only accurate to `1/√s` anyway.
pub fn default_mc_size(eps: f64, s: usize) -> usize {
    const CAP: usize = 1_000_000;
    if eps > 0.0 {
        (libm::ceil(50.0 / (eps * eps)) as usize).min(CAP)
    } else {
        s.clamp(1, CAP)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentReport {
    pub winner: usize,
    /// Pairwise losses per candidate.
    pub losses: Vec<usize>,
    pub mc_size: usize,
}

/// Distances from every permutation to every distinct central ranking.
struct DistanceTable {
    centrals: Vec<Permutation>,
    /// `central_of[c]`: index into `centrals` for candidate `c`.
    central_of: Vec<usize>,
}

impl DistanceTable {
    fn new(candidates: &[MallowsModel]) -> Self {
        let mut centrals: Vec<Permutation> = Vec::new();
        let central_of = candidates
            .iter()
            .map(|m| match centrals.iter().position(|c| c == m.central()) {
                Some(i) => i,
                None => {
                    centrals.push(m.central().clone());
                    centrals.len() - 1
                }
            })
            .collect();
        Self { centrals, central_of }
    }

    /// Row-major `len × centrals` distance matrix.
    fn distances(&self, perms: &[Permutation]) -> Result<Vec<u32>> {
        let mut out = Vec::with_capacity(perms.len() * self.centrals.len());
        for p in perms {
            for c in &self.centrals {
                out.push(kendall_tau(c, p)? as u32);
            }
        }
        Ok(out)
    }
}

/// Picks the candidate with the fewest pairwise Scheffé losses on `samples`.
///
/// For each pair `(i, j)` the witness set is `{π : log p_i(π) > log p_j(π)}`;
/// its empirical mass on `samples` is compared with Monte Carlo estimates of
/// its mass under both candidates (fresh draws per candidate, seeded from
/// `seed`). The candidate whose estimate is farther from the empirical mass
/// loses; exact ties cost neither. Ties in loss count go to the smaller index.
pub fn hypothesis_select(
    candidates: &[MallowsModel],
    samples: &[Permutation],
    mc_size: usize,
    seed: u64,
) -> Result<TournamentReport> {
    let first = candidates.first().ok_or(Error::NoHypothesis {
        reason: "no candidates".into(),
    })?;
    let n = first.n();
    for c in candidates {
        check_len(n, c.n())?;
    }
    let c = candidates.len();
    if c == 1 {
        return Ok(TournamentReport {
            winner: 0,
            losses: vec![0],
            mc_size: 0,
        });
    }
    if samples.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let table = DistanceTable::new(candidates);
    let k = table.centrals.len();
    let data = table.distances(samples)?;
    let draws: Vec<Vec<u32>> = candidates
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let mut rng = seed::rng(seed, seed::tags::TOURNAMENT, i as u64);
            table.distances(&m.sample_many(mc_size, &mut rng))
        })
        .collect::<Result<_>>()?;
    // Log-likelihood of every candidate at every possible distance.
    let max_d = n * n.saturating_sub(1) / 2;
    let log_pmf: Vec<Vec<f64>> = candidates
        .iter()
        .map(|m| (0..=max_d as u64).map(|d| m.log_pmf_at_distance(d)).collect())
        .collect();
    let mass = |rows: &[u32], i: usize, j: usize| -> f64 {
        let (ci, cj) = (table.central_of[i], table.central_of[j]);
        let (ti, tj) = (&log_pmf[i], &log_pmf[j]);
        let count = rows.len() / k;
        let hits = rows
            .chunks_exact(k)
            .filter(|r| ti[r[ci] as usize] > tj[r[cj] as usize])
            .count();
        hits as f64 / count as f64
    };

    let mut losses = vec![0usize; c];
    for i in 0..c {
        for j in i + 1..c {
            let empirical = mass(&data, i, j);
            let gap_i = (mass(&draws[i], i, j) - empirical).abs();
            let gap_j = (mass(&draws[j], i, j) - empirical).abs();
            if gap_i > gap_j {
                losses[i] += 1;
            } else if gap_j > gap_i {
                losses[j] += 1;
            }
        }
    }
    let winner = (0..c).min_by_key(|&i| (losses[i], i)).expect("c >= 2");
    Ok(TournamentReport {
        winner,
        losses,
        mc_size,
    })
}
