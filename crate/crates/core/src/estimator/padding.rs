//! Padding with dummy elements and truncation back to the original coordinates.
//!
//! A sample `σ` on `1..=n` is embedded into `1..=n+2θ`: original element `e`
//! becomes `e + θ`, dummies `1..=θ` sit before the central ranking and
//! `n+θ+1..=n+2θ` after it. Suffix dummies are inserted forward, each at a
//! displacement from the right drawn from `D_{L+1}` (`L` = current length);
//! prefix dummies are inserted in reverse order, each at a displacement from
//! the left. Both are the insertion procedure, so the padded sample is a draw
//! from the padded Mallows model whenever `σ` is a draw from the original one.
//!
//! The estimator never needs the dummies themselves, only how many of each
//! kind land on the far side of every original element, so those counts are
//! tracked directly in `O(θ + moves)` per sample.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, invalid, Error, Result};
use crate::mallows::DisplacementSampler;
use crate::perm::Permutation;
use crate::seed;

/// `⌈coeff · log(n/ε) / (1 − φ)⌉`.
pub fn default_theta(n: usize, phi: f64, eps: f64, coeff: f64) -> usize {
    if n == 0 || phi <= 0.0 {
        return 0;
    }
    let ratio = n as f64 / eps;
    if !(ratio > 1.0) {
        return 0;
    }
    libm::ceil(coeff * libm::log(ratio) / (1.0 - phi)) as usize
}

/// Samples padded with `θ` dummies on each side, stored as per-element counts.
#[derive(Clone, Debug)]
pub struct PaddedInstance {
    theta: usize,
    inner_n: usize,
    phi: f64,
    base_seed: u64,
    samples: Vec<Permutation>,
    /// `prefix_after[k·n + e − 1]`: prefix dummies placed after element `e` in sample `k`.
    prefix_after: Vec<u32>,
    /// `suffix_before[k·n + e − 1]`: suffix dummies placed before element `e` in sample `k`.
    suffix_before: Vec<u32>,
}

/// Pads with the default width `⌈10·log(n/ε)/(1−φ)⌉` unless overridden.
///
/// `eps = 0` has no finite default width; pass `theta_override` or use
/// [`pad_with`] with an explicit width in that case.
pub fn pad<R: rand::Rng + ?Sized>(
    samples: &[Permutation],
    phi: f64,
    eps: f64,
    theta_override: Option<usize>,
    rng: &mut R,
) -> Result<PaddedInstance> {
    let n = samples.first().map_or(0, Permutation::len);
    let theta = match theta_override {
        Some(t) => t,
        None if eps > 0.0 => default_theta(n, phi, eps, 10.0),
        None => return Err(invalid("eps", "default padding width needs eps > 0")),
    };
    pad_with(samples, phi, theta, rng.gen())
}

pub fn pad_with(samples: &[Permutation], phi: f64, theta: usize, base_seed: u64) -> Result<PaddedInstance> {
    if !(0.0..1.0).contains(&phi) {
        return Err(invalid("phi", "padding needs 0 <= phi < 1"));
    }
    let n = samples.first().ok_or(Error::Empty("samples"))?.len();
    let s = samples.len();
    let mut prefix_after = vec![0u32; s * n];
    let mut suffix_before = vec![0u32; s * n];
    let sampler = DisplacementSampler::new(phi);
    // Per-slot offsets (distance to the relevant end minus insertions so far).
    let mut offset = vec![0i64; n];
    let mut sb = vec![0u32; n];
    for (k, sample) in samples.iter().enumerate() {
        check_len(n, sample.len())?;
        let mut rng = seed::rng(base_seed, seed::tags::PADDING, k as u64);
        let order = sample.order();

        // Suffix: slot i of the middle order starts n−1−i elements from the right.
        for (i, o) in offset.iter_mut().enumerate() {
            *o = (n - 1 - i) as i64;
        }
        sb.iter_mut().for_each(|x| *x = 0);
        // A dummy only matters if its displacement reaches the nearest slot,
        // which has probability about φ^distance; track both powers incrementally.
        // After a hit the distance stays put (one more dummy, one step closer).
        let mut phi_support = libm::pow(phi, n as f64);
        let mut phi_d = phi;
        for g in 0..theta * usize::from(n > 0) {
            phi_support *= phi;
            let d = (offset[n - 1] + g as i64 + 1) as usize;
            let Some(j) = sampler.draw_at_least(n + g + 1, d, phi_d, phi_support, &mut rng) else {
                phi_d *= phi;
                continue;
            };
            // The dummy lands before every slot closer than j to the right end.
            let j = j as i64;
            let mut i = n;
            while i > 0 && offset[i - 1] + (g as i64) < j {
                offset[i - 1] -= 1;
                sb[i - 1] += 1;
                i -= 1;
            }
        }

        // Prefix: slot i starts i + sb[i] elements from the left.
        for (i, o) in offset.iter_mut().enumerate() {
            *o = i as i64 + sb[i] as i64;
        }
        let row_pa = &mut prefix_after[k * n..(k + 1) * n];
        let mut phi_support = libm::pow(phi, (n + theta) as f64);
        let mut phi_d = libm::pow(phi, offset.first().map_or(1, |&o| o + 1) as f64);
        for g in 0..theta * usize::from(n > 0) {
            phi_support *= phi;
            let d = (offset[0] + g as i64 + 1) as usize;
            let Some(j) = sampler.draw_at_least(n + theta + g + 1, d, phi_d, phi_support, &mut rng) else {
                phi_d *= phi;
                continue;
            };
            let j = j as i64;
            let mut i = 0;
            while i < n && offset[i] + (g as i64) < j {
                offset[i] -= 1;
                row_pa[order[i] as usize - 1] += 1;
                i += 1;
            }
        }
        let row_sb = &mut suffix_before[k * n..(k + 1) * n];
        for (i, &e) in order.iter().enumerate() {
            row_sb[e as usize - 1] = sb[i];
        }
    }
    Ok(PaddedInstance {
        theta,
        inner_n: n,
        phi,
        base_seed,
        samples: samples.to_vec(),
        prefix_after,
        suffix_before,
    })
}

impl PaddedInstance {
    pub fn theta(&self) -> usize {
        self.theta
    }

    pub fn inner_n(&self) -> usize {
        self.inner_n
    }

    /// Total element count `n + 2θ`.
    pub fn padded_n(&self) -> usize {
        self.inner_n + 2 * self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn original(&self, k: usize) -> &Permutation {
        &self.samples[k]
    }

    pub fn prefix_after(&self, k: usize) -> &[u32] {
        &self.prefix_after[k * self.inner_n..(k + 1) * self.inner_n]
    }

    pub fn suffix_before(&self, k: usize) -> &[u32] {
        &self.suffix_before[k * self.inner_n..(k + 1) * self.inner_n]
    }

    /// `trunc(v)` of padded sample `k`: padded rank of each original element.
    pub fn truncated_positions(&self, k: usize, out: &mut [u32]) {
        let (pa, sb) = (self.prefix_after(k), self.suffix_before(k));
        for (e0, slot) in out.iter_mut().enumerate() {
            *slot = self.samples[k].ranks()[e0] + sb[e0] + self.theta as u32 - pa[e0];
        }
    }

    /// Materializes padded sample `k` by replaying its dummy insertions.
    pub fn padded_sample(&self, k: usize) -> Permutation {
        let (n, theta) = (self.inner_n, self.theta as u32);
        let sampler = DisplacementSampler::new(self.phi);
        let mut rng = seed::rng(self.base_seed, seed::tags::PADDING, k as u64);
        let mut order: Vec<u32> = Vec::with_capacity(self.padded_n());
        order.extend(self.samples[k].order().iter().map(|&e| e + theta));
        for g in 0..theta {
            let len = order.len();
            let j = sampler.draw(len + 1, &mut rng);
            order.insert(len - j, n as u32 + theta + g + 1);
        }
        for dummy in (1..=theta).rev() {
            let len = order.len();
            let j = sampler.draw(len + 1, &mut rng);
            order.insert(j, dummy);
        }
        Permutation::new(order).expect("insertion builds a bijection")
    }

    /// Padded ranking with `middle` between identity dummy blocks.
    pub fn embed(&self, middle: &Permutation) -> Result<Permutation> {
        embed(middle, self.theta)
    }

    /// The original-element part of a padded ranking.
    pub fn extract_middle(&self, padded: &Permutation) -> Result<Permutation> {
        extract_middle(padded, self.theta)
    }
}

pub fn embed(middle: &Permutation, theta: usize) -> Result<Permutation> {
    let n = middle.len() as u32;
    let t = theta as u32;
    let mut order: Vec<u32> = (1..=t).collect();
    order.extend(middle.order().iter().map(|&e| e + t));
    order.extend(n + t + 1..=n + 2 * t);
    Permutation::new(order)
}

pub fn extract_middle(padded: &Permutation, theta: usize) -> Result<Permutation> {
    let total = padded.len();
    if total < 2 * theta {
        return Err(invalid("theta", "padded ranking is shorter than 2θ"));
    }
    let n = (total - 2 * theta) as u32;
    let t = theta as u32;
    let order = padded
        .order()
        .iter()
        .filter(|&&e| e > t && e <= t + n)
        .map(|&e| e - t)
        .collect();
    Permutation::new(order)
}

/// Middle `len − 2θ` entries of `v`.
pub fn trunc<T: Copy>(v: &[T], theta: usize) -> Result<Vec<T>> {
    if v.len() < 2 * theta {
        return Err(invalid("theta", "vector is shorter than 2θ"));
    }
    Ok(v[theta..v.len() - theta].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mallows::MallowsModel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn samples(n: usize, s: usize, phi: f64, seed: u64) -> Vec<Permutation> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let central = Permutation::new((1..=n as u32).rev().collect()).unwrap();
        MallowsModel::new(phi, central).unwrap().sample_many(s, &mut rng)
    }

    #[test]
    fn zero_width_is_a_relabel() {
        let xs = samples(5, 20, 0.6, 1);
        let inst = pad(&xs, 0.6, 0.1, Some(0), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        for (k, x) in xs.iter().enumerate() {
            assert_eq!(inst.padded_sample(k), *x);
            let mut pos = vec![0; 5];
            inst.truncated_positions(k, &mut pos);
            assert_eq!(pos, x.ranks());
        }
    }

    #[test]
    fn zero_phi_keeps_dummies_in_place() {
        let xs = samples(4, 10, 0.5, 2);
        let inst = pad_with(&xs, 0.0, 3, 9).unwrap();
        for (k, x) in xs.iter().enumerate() {
            let p = inst.padded_sample(k);
            assert_eq!(&p.order()[..3], &[1, 2, 3]);
            assert_eq!(&p.order()[7..], &[8, 9, 10]);
            assert_eq!(inst.extract_middle(&p).unwrap(), *x);
        }
    }

    #[test]
    fn restriction_recovers_originals() {
        let xs = samples(4, 1000, 0.8, 3);
        let inst = pad_with(&xs, 0.8, 3, 17).unwrap();
        let middle: Vec<u32> = (4..=7).collect();
        for (k, x) in xs.iter().enumerate() {
            assert_eq!(inst.padded_sample(k).restrict(&middle).unwrap(), *x);
        }
    }

    #[test]
    fn counts_match_materialized_samples() {
        for &(n, theta, phi) in &[(6usize, 25usize, 0.9), (10, 7, 0.5), (3, 40, 0.97)] {
            let xs = samples(n, 200, phi, 4);
            let inst = pad_with(&xs, phi, theta, 5).unwrap();
            let mut pos = vec![0; n];
            for k in 0..xs.len() {
                let full = inst.padded_sample(k);
                inst.truncated_positions(k, &mut pos);
                assert_eq!(pos, trunc(full.ranks(), theta).unwrap());
                for e in 1..=n as u32 {
                    let at = full.rank_of(e + theta as u32);
                    let prefix_after = (1..=theta as u32).filter(|&d| full.rank_of(d) > at).count() as u32;
                    let suffix_before = (n as u32 + theta as u32 + 1..=(n + 2 * theta) as u32)
                        .filter(|&d| full.rank_of(d) < at)
                        .count() as u32;
                    assert_eq!(inst.prefix_after(k)[e as usize - 1], prefix_after);
                    assert_eq!(inst.suffix_before(k)[e as usize - 1], suffix_before);
                }
            }
        }
    }

    #[test]
    fn padded_samples_follow_padded_model() {
        // n = 2, θ = 1: the padded law must be M(φ, (1, c+1, 4)) on S_4.
        let phi = 0.6;
        let central = Permutation::new(vec![2, 1]).unwrap();
        let xs = MallowsModel::new(phi, central.clone())
            .unwrap()
            .sample_many(200_000, &mut ChaCha8Rng::seed_from_u64(6));
        let inst = pad_with(&xs, phi, 1, 7).unwrap();
        let padded_model = MallowsModel::new(phi, embed(&central, 1).unwrap()).unwrap();
        let mut counts = vec![0usize; 24];
        for k in 0..xs.len() {
            counts[crate::perm::lex_index(&inst.padded_sample(k))] += 1;
        }
        let tv: f64 = crate::perm::lex_permutations(4)
            .zip(&counts)
            .map(|(p, &c)| (c as f64 / xs.len() as f64 - padded_model.pmf(&p).unwrap()).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.01, "tv = {tv}");
    }

    #[test]
    fn trunc_examples() {
        assert_eq!(trunc(&[1, 2, 3], 0).unwrap(), vec![1, 2, 3]);
        let v: Vec<u32> = (1..=10).collect();
        assert_eq!(trunc(&v, 2).unwrap(), (3..=8).collect::<Vec<_>>());
        assert!(trunc(&[1, 2, 3], 2).is_err());
        let padded_id = embed(&Permutation::identity(4), 3).unwrap();
        assert!(padded_id.is_identity());
        assert_eq!(trunc(padded_id.ranks(), 3).unwrap(), vec![4, 5, 6, 7]);
    }

    #[test]
    fn default_width() {
        let t = default_theta(30, 0.9, 0.05, 10.0);
        assert_eq!(t, libm::ceil(10.0 * libm::log(600.0) / 0.1) as usize);
        assert_eq!(default_theta(30, 0.0, 0.05, 10.0), 0);
    }
}
