//! Strong contamination: an adversary that sees every honest sample, replaces
//! an `ε`-fraction of them, and reorders the result.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::estimator::naive_estimate;
use crate::mallows::MallowsModel;
use crate::perm::{sort_to_permutation, Permutation};

/// Samples after corruption, with the ground-truth mask of replaced entries.
///
/// The mask is for evaluation only; estimators take `samples` alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorruptedDataset {
    pub samples: Vec<Permutation>,
    pub eps: f64,
    pub mask: Vec<bool>,
}

impl CorruptedDataset {
    pub fn corrupted_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDirection {
    Earlier,
    Later,
}

/// How the adversary picks its replacements.
///
/// Strategies that need a reference ranking fall back to the naive estimate
/// of the honest samples when none is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversaryStrategy {
    /// Uniformly random permutations.
    UniformJunk,
    /// The reverse of the reference ranking.
    Reversal {
        #[serde(default)]
        reference: Option<Permutation>,
    },
    /// The reference ranking with one element moved `amount` places.
    TargetedShift {
        element: u32,
        direction: ShiftDirection,
        amount: usize,
        #[serde(default)]
        reference: Option<Permutation>,
    },
    /// One permutation, repeated, that drags the coordinate mean along `direction`.
    ///
    /// Each element moves from its reference rank by at most about `budget`
    /// places in the sign of its direction entry, scaled by its magnitude. The
    /// default direction alternates by reference rank (odd ranks later, even
    /// ranks earlier), which pushes every adjacent pair of the naive mean
    /// towards a swap. Without a budget the permutation simply sorts by
    /// direction, which maximizes the projection of its position vector.
    ///
    /// Replaced samples are random unless `targeted_removal` is set, in which
    /// case the honest samples projecting lowest on `direction` are dropped.
    MeanAttack {
        #[serde(default)]
        direction: Option<Vec<f64>>,
        #[serde(default)]
        budget: Option<usize>,
        #[serde(default)]
        reference: Option<Permutation>,
        #[serde(default)]
        targeted_removal: bool,
    },
    /// Every colluder reports the same preferred ranking.
    Coalition { preferred: Permutation },
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..0.5).contains(&eps) {
        Ok(())
    } else {
        Err(invalid("eps", alloc::format!("{eps} is outside [0, 0.5)")))
    }
}

fn uniform_length(samples: &[Permutation]) -> Result<usize> {
    let n = samples.first().ok_or(Error::Empty("samples"))?.len();
    for s in samples {
        check_len(n, s.len())?;
    }
    Ok(n)
}

/// Number of samples replaced at rate `eps`.
pub fn replacement_count(eps: f64, s: usize) -> usize {
    libm::floor(eps * s as f64 + 1e-9) as usize
}

/// The alternating attack direction relative to `reference`.
pub fn alternating_direction(reference: &Permutation) -> Vec<f64> {
    reference
        .ranks()
        .iter()
        .map(|&r| if r % 2 == 1 { 1.0 } else { -1.0 })
        .collect()
}

/// Sorts elements by `rank_ref(e) + budget·u_e / max|u|`, ties by element.
pub fn mean_attack_permutation(reference: &Permutation, direction: &[f64], budget: usize) -> Result<Permutation> {
    check_len(reference.len(), direction.len())?;
    let scale = direction.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let keys: Vec<f64> = reference
        .ranks()
        .iter()
        .zip(direction)
        .map(|(&r, &u)| {
            let push = if scale > 0.0 { budget as f64 * u / scale } else { 0.0 };
            r as f64 + push
        })
        .collect();
    Ok(sort_to_permutation(&keys, 0, 0))
}

fn shifted(reference: &Permutation, element: u32, direction: ShiftDirection, amount: usize) -> Result<Permutation> {
    let n = reference.len();
    if element == 0 || element as usize > n {
        return Err(Error::ElementOutOfRange { element, n });
    }
    let mut order = reference.order().to_vec();
    let from = reference.rank_of(element) as usize - 1;
    let to = match direction {
        ShiftDirection::Earlier => from.saturating_sub(amount),
        ShiftDirection::Later => (from + amount).min(n - 1),
    };
    let e = order.remove(from);
    order.insert(to, e);
    Permutation::new(order)
}

/// Replaces `⌊eps·s⌋` honest samples according to `strategy` and shuffles the result.
pub fn corrupt<R: Rng + ?Sized>(
    honest: &[Permutation],
    eps: f64,
    strategy: &AdversaryStrategy,
    rng: &mut R,
) -> Result<CorruptedDataset> {
    check_eps(eps)?;
    let n = uniform_length(honest)?;
    let s = honest.len();
    let count = replacement_count(eps, s);
    let reference = |given: &Option<Permutation>| -> Result<Permutation> {
        match given {
            Some(p) => {
                check_len(n, p.len())?;
                Ok(p.clone())
            }
            None => naive_estimate(honest),
        }
    };

    let mut samples = honest.to_vec();
    let mut mask = alloc::vec![false; s];
    let random_indices = |rng: &mut R| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..s).collect();
        let (chosen, _) = idx.partial_shuffle(rng, count);
        let mut chosen = chosen.to_vec();
        chosen.sort_unstable();
        chosen
    };

    match strategy {
        AdversaryStrategy::UniformJunk => {
            for i in random_indices(rng) {
                let mut order: Vec<u32> = (1..=n as u32).collect();
                order.shuffle(rng);
                samples[i] = Permutation::new(order)?;
                mask[i] = true;
            }
        }
        AdversaryStrategy::Reversal { reference: r } => {
            let replacement = reference(r)?.reversed();
            for i in random_indices(rng) {
                samples[i] = replacement.clone();
                mask[i] = true;
            }
        }
        AdversaryStrategy::TargetedShift {
            element,
            direction,
            amount,
            reference: r,
        } => {
            let replacement = shifted(&reference(r)?, *element, *direction, *amount)?;
            for i in random_indices(rng) {
                samples[i] = replacement.clone();
                mask[i] = true;
            }
        }
        AdversaryStrategy::MeanAttack {
            direction,
            budget,
            reference: r,
            targeted_removal,
        } => {
            let reference = reference(r)?;
            let u = match direction {
                Some(u) => {
                    check_len(n, u.len())?;
                    u.clone()
                }
                None => alternating_direction(&reference),
            };
            let budget = budget.unwrap_or(n);
            let replacement = mean_attack_permutation(&reference, &u, budget)?;
            let victims = if *targeted_removal {
                // The honest samples that pull hardest against the attack.
                let mut by_projection: Vec<(f64, usize)> = honest
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let proj: f64 = p.ranks().iter().zip(&u).map(|(&r, &c)| r as f64 * c).sum();
                        (proj, i)
                    })
                    .collect();
                by_projection.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                by_projection.iter().take(count).map(|&(_, i)| i).collect()
            } else {
                random_indices(rng)
            };
            for i in victims {
                samples[i] = replacement.clone();
                mask[i] = true;
            }
        }
        AdversaryStrategy::Coalition { preferred } => {
            check_len(n, preferred.len())?;
            for i in random_indices(rng) {
                samples[i] = preferred.clone();
                mask[i] = true;
            }
        }
    }

    let mut paired: Vec<(Permutation, bool)> = samples.into_iter().zip(mask).collect();
    paired.shuffle(rng);
    let (samples, mask) = paired.into_iter().unzip();
    Ok(CorruptedDataset { samples, eps, mask })
}

/// What the colluders submit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoalitionVote {
    /// Each colluder reports the preferred ranking.
    #[default]
    Preferred,
    /// Each colluder reports the mean-attack permutation aimed at the preferred
    /// ranking's position vector.
    MeanAttack,
}

/// `m − c` honest draws from `model` plus `c` strategic votes, shuffled.
pub fn coalition_scenario<R: Rng + ?Sized>(
    m: usize,
    c: usize,
    model: &MallowsModel,
    preferred: &Permutation,
    vote: CoalitionVote,
    rng: &mut R,
) -> Result<CorruptedDataset> {
    if c as f64 > 0.1 * m as f64 {
        return Err(invalid("c", alloc::format!("{c} colluders exceed 10% of {m} voters")));
    }
    check_len(model.n(), preferred.len())?;
    let honest = model.sample_many(m - c, rng);
    let strategic = match vote {
        CoalitionVote::Preferred => preferred.clone(),
        CoalitionVote::MeanAttack => {
            let reference = if honest.is_empty() {
                model.central().clone()
            } else {
                naive_estimate(&honest)?
            };
            let u: Vec<f64> = preferred
                .ranks()
                .iter()
                .zip(reference.ranks())
                .map(|(&a, &b)| a as f64 - b as f64)
                .collect();
            mean_attack_permutation(&reference, &u, model.n())?
        }
    };
    let mut paired: Vec<(Permutation, bool)> = honest.into_iter().map(|p| (p, false)).collect();
    paired.extend((0..c).map(|_| (strategic.clone(), true)));
    paired.shuffle(rng);
    let (samples, mask) = paired.into_iter().unzip();
    Ok(CorruptedDataset {
        samples,
        eps: if m > 0 { c as f64 / m as f64 } else { 0.0 },
        mask,
    })
}
