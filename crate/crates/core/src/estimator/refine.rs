//! Rough estimate and iterative refinement on a padded instance.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::padding::PaddedInstance;
use crate::error::{check_len, invalid, Error, Result};
use crate::perm::{front_back_counts, sort_to_permutation, Fenwick, Permutation};
use crate::robust_mean::{robust_mean_bounded_cov, robust_mean_stable, FilterReport, FilterSettings, PointMatrix};

/// `(1 − φ)/√φ`, the factor that gives the limiting insertion law unit variance.
pub fn coordinate_scale(phi: f64) -> f64 {
    if phi > 0.0 {
        (1.0 - phi) / libm::sqrt(phi)
    } else {
        1.0
    }
}

/// Scaled truncated position vectors of every padded sample.
pub fn scaled_positions(inst: &PaddedInstance) -> PointMatrix {
    let (s, n) = (inst.len(), inst.inner_n());
    let scale = coordinate_scale(inst.phi());
    let mut points = PointMatrix::zeros(s, n);
    let mut pos = vec![0u32; n];
    for k in 0..s {
        inst.truncated_positions(k, &mut pos);
        for (x, &p) in points.row_mut(k).iter_mut().zip(&pos) {
            *x = scale * p as f64;
        }
    }
    points
}

/// Robust mean of the scaled truncated positions, sorted.
///
/// `sigma_sq` bounds the inlier covariance of the scaled positions. The
/// result is a padded ranking, identity on both dummy blocks.
pub fn rough_estimate(
    inst: &PaddedInstance,
    eps: f64,
    sigma_sq: f64,
    settings: &FilterSettings,
) -> Result<(Permutation, FilterReport)> {
    if inst.is_empty() {
        return Err(Error::Empty("samples"));
    }
    let points = scaled_positions(inst);
    let report = robust_mean_bounded_cov(&points, eps, libm::sqrt(sigma_sq), settings)?;
    let theta = inst.theta();
    Ok((sort_to_permutation(&report.estimate, theta, theta), report))
}

/// Scaled truncated front and back adjustment vectors relative to the padded
/// embedding of `reference`.
pub fn scaled_adjustments(inst: &PaddedInstance, reference: &Permutation) -> Result<(PointMatrix, PointMatrix)> {
    let (s, n) = (inst.len(), inst.inner_n());
    check_len(n, reference.len())?;
    let scale = coordinate_scale(inst.phi());
    let mut front = PointMatrix::zeros(s, n);
    let mut back = PointMatrix::zeros(s, n);
    let mut seq = vec![0u32; n];
    let (mut f, mut b) = (vec![0u32; n], vec![0u32; n]);
    let mut tree = Fenwick::new(n);
    for k in 0..s {
        let sample = inst.original(k);
        for (slot, &e) in seq.iter_mut().zip(reference.order()) {
            *slot = sample.rank_of(e);
        }
        front_back_counts(&seq, &mut f, &mut b, &mut tree);
        let (pa, sb) = (inst.prefix_after(k), inst.suffix_before(k));
        let (row_f, row_b) = (front.row_mut(k), back.row_mut(k));
        for (t, &e) in reference.order().iter().enumerate() {
            let e0 = e as usize - 1;
            row_f[e0] = scale * (pa[e0] + f[t]) as f64;
            row_b[e0] = scale * (sb[e0] + b[t]) as f64;
        }
    }
    Ok((front, back))
}

/// `δ = c_δ·(√(ε·proxy·(1−φ)) + ε·log(1/ε))`.
pub fn stability_delta(eps: f64, proxy: f64, phi: f64, c_delta: f64) -> f64 {
    if eps <= 0.0 {
        return 1.0;
    }
    c_delta * (libm::sqrt(eps * proxy.max(0.0) * (1.0 - phi)) + eps * libm::log(1.0 / eps))
}

/// One refinement round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineStep {
    /// Next middle ranking; equals the input when the round aborted.
    pub next: Permutation,
    pub delta: f64,
    pub aborted: bool,
    pub front_filter: Option<FilterReport>,
    pub back_filter: Option<FilterReport>,
}

/// Re-estimates the central ranking from robust means of the adjustment
/// vectors relative to `current` (a middle ranking on the original elements):
/// `v̂ = trunc(v_current) − f̂ + b̂`, then sorts.
///
/// A filter divergence aborts the round and returns `current` unchanged.
pub fn refine(
    inst: &PaddedInstance,
    eps: f64,
    current: &Permutation,
    proxy: f64,
    c_delta: f64,
    settings: &FilterSettings,
) -> Result<RefineStep> {
    if inst.is_empty() {
        return Err(Error::Empty("samples"));
    }
    if !(proxy >= 0.0) {
        return Err(invalid("proxy", "must be nonnegative"));
    }
    let (front, back) = scaled_adjustments(inst, current)?;
    let delta = stability_delta(eps, proxy, inst.phi(), c_delta);
    let aborted = |front_filter, back_filter| RefineStep {
        next: current.clone(),
        delta,
        aborted: true,
        front_filter,
        back_filter,
    };
    let f = match robust_mean_stable(&front, eps, delta, settings) {
        Ok(r) => r,
        Err(Error::FilterDivergence { .. }) => return Ok(aborted(None, None)),
        Err(e) => return Err(e),
    };
    let b = match robust_mean_stable(&back, eps, delta, settings) {
        Ok(r) => r,
        Err(Error::FilterDivergence { .. }) => return Ok(aborted(Some(f), None)),
        Err(e) => return Err(e),
    };
    let scale = coordinate_scale(inst.phi());
    let theta = inst.theta() as f64;
    let v: Vec<f64> = (0..inst.inner_n())
        .map(|e0| theta + current.ranks()[e0] as f64 + (b.estimate[e0] - f.estimate[e0]) / scale)
        .collect();
    Ok(RefineStep {
        next: sort_to_permutation(&v, 0, 0),
        delta,
        aborted: false,
        front_filter: Some(f),
        back_filter: Some(b),
    })
}

#[cfg(test)]
mod tests {
    use super::super::padding::pad_with;
    use super::*;
    use crate::mallows::MallowsModel;
    use crate::perm::l2_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(n: usize, s: usize, phi: f64, seed: u64) -> (PaddedInstance, Permutation) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<u32> = (1..=n as u32).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let central = Permutation::new(order).unwrap();
        let xs = MallowsModel::new(phi, central.clone()).unwrap().sample_many(s, &mut rng);
        let theta = super::super::padding::default_theta(n, phi, 0.05, 10.0);
        (pad_with(&xs, phi, theta, seed).unwrap(), central)
    }

    #[test]
    fn adjustment_identity_holds_on_padded_coordinates() {
        let (inst, central) = instance(8, 50, 0.7, 1);
        let (f, b) = scaled_adjustments(&inst, &central).unwrap();
        let scale = coordinate_scale(0.7);
        let mut pos = vec![0u32; 8];
        for k in 0..inst.len() {
            inst.truncated_positions(k, &mut pos);
            for e0 in 0..8 {
                let rebuilt = inst.theta() as f64 + central.ranks()[e0] as f64 + (b.row(k)[e0] - f.row(k)[e0]) / scale;
                assert!((rebuilt - pos[e0] as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn clean_rough_estimate_recovers_central() {
        let (inst, central) = instance(12, 20_000, 0.8, 2);
        let (rough, _) = rough_estimate(&inst, 0.0, 4.0, &FilterSettings::default()).unwrap();
        assert_eq!(inst.extract_middle(&rough).unwrap(), central);
        let theta = inst.theta() as u32;
        assert!((1..=theta).all(|d| rough.rank_of(d) == d));
    }

    #[test]
    fn refinement_fixes_an_adjacent_swap() {
        let (inst, central) = instance(12, 20_000, 0.8, 3);
        let mut order = central.order().to_vec();
        order.swap(4, 5);
        let start = Permutation::new(order).unwrap();
        let step = refine(&inst, 0.0, &start, 1.0, 1.0, &FilterSettings::default()).unwrap();
        assert!(!step.aborted);
        assert_eq!(step.next, central);
        let again = refine(&inst, 0.0, &central, 1.0, 1.0, &FilterSettings::default()).unwrap();
        assert_eq!(again.next, central);
        assert_eq!(l2_distance(&again.next.position_vector(), &central.position_vector()).unwrap(), 0.0);
    }

    #[test]
    fn clean_adjustments_are_nearly_white() {
        let (inst, central) = instance(10, 20_000, 0.9, 4);
        let (f, _) = scaled_adjustments(&inst, &central).unwrap();
        let set = crate::robust_mean::WeightedPointSet::uniform(f);
        let mean = set.weighted_mean();
        let cov = set.weighted_covariance(&mean);
        for a in 0..10 {
            assert!((cov[a * 10 + a] - 1.0).abs() < 0.1, "var {}", cov[a * 10 + a]);
            assert!((mean[a] - libm::sqrt(0.9)).abs() < 0.05);
        }
    }
}
