//! The Mallows distribution: density, normalizer, insertion sampler, the
//! insertion distributions `D_{i,φ}`, and the analytic distance bounds.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::perm::{kendall_tau, lex_permutations, l2_distance, Permutation};

/// `M(φ, π*)`: `P(π) = φ^{d_KT(π, π*)} / Z_n(φ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelSpec", into = "ModelSpec")]
pub struct MallowsModel {
    n: usize,
    phi: f64,
    central: Permutation,
    log_normalizer: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelSpec {
    n: usize,
    phi: f64,
    central: Permutation,
}

impl TryFrom<ModelSpec> for MallowsModel {
    type Error = Error;

    fn try_from(spec: ModelSpec) -> Result<Self> {
        check_len(spec.n, spec.central.len())?;
        Self::new(spec.phi, spec.central)
    }
}

impl From<MallowsModel> for ModelSpec {
    fn from(m: MallowsModel) -> Self {
        Self {
            n: m.n,
            phi: m.phi,
            central: m.central,
        }
    }
}

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&phi) {
        Ok(())
    } else {
        Err(invalid("phi", alloc::format!("{phi} is outside [0, 1]")))
    }
}

/// `log Z_n(φ) = Σ_{i=1}^n log(1 + φ + … + φ^{i-1})`, stable near `φ = 1`.
pub fn log_normalizer(n: usize, phi: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    if phi == 1.0 {
        return (2..=n).map(|i| libm::log(i as f64)).sum();
    }
    let ln_phi = libm::log(phi);
    let ln_one_minus_phi = libm::log1p(-phi);
    (1..=n)
        .map(|i| libm::log(-libm::expm1(i as f64 * ln_phi)) - ln_one_minus_phi)
        .sum()
}

impl MallowsModel {
    pub fn new(phi: f64, central: Permutation) -> Result<Self> {
        check_phi(phi)?;
        let n = central.len();
        Ok(Self {
            n,
            phi,
            central,
            log_normalizer: log_normalizer(n, phi),
        })
    }

    /// The uniform distribution on `S_n`, written as `M(1, id)`.
    pub fn uniform(n: usize) -> Self {
        Self::new(1.0, Permutation::identity(n)).expect("phi = 1 is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn central(&self) -> &Permutation {
        &self.central
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    /// Log-probability of `p`; `-inf` off the central ranking when `φ = 0`.
    pub fn log_pmf(&self, p: &Permutation) -> Result<f64> {
        let d = kendall_tau(&self.central, p)?;
        Ok(self.log_pmf_at_distance(d))
    }

    pub(crate) fn log_pmf_at_distance(&self, d: u64) -> f64 {
        if d == 0 {
            -self.log_normalizer
        } else if self.phi == 0.0 {
            f64::NEG_INFINITY
        } else {
            d as f64 * libm::log(self.phi) - self.log_normalizer
        }
    }

    pub fn pmf(&self, p: &Permutation) -> Result<f64> {
        Ok(libm::exp(self.log_pmf(p)?))
    }

    /// One draw via the insertion procedure.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Permutation {
        let sampler = DisplacementSampler::new(self.phi);
        let mut order: Vec<u32> = Vec::with_capacity(self.n);
        for (a, &e) in self.central.order().iter().enumerate() {
            let j = sampler.draw(a + 1, rng);
            order.insert(a - j, e);
        }
        Permutation::from_order_unchecked(order)
    }

    pub fn sample_many<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Permutation> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

/// Draws displacements from `D_{a,φ}` (pmf ∝ φ^j on `0..a`) by inverse CDF.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DisplacementSampler {
    phi: f64,
    ln_phi: f64,
}

impl DisplacementSampler {
    pub(crate) fn new(phi: f64) -> Self {
        Self {
            phi,
            ln_phi: libm::log(phi),
        }
    }

    /// `support = usize::MAX` draws from the limiting distribution `D_{∞,φ}`.
    pub(crate) fn draw<R: Rng + ?Sized>(&self, support: usize, rng: &mut R) -> usize {
        if support <= 1 || self.phi == 0.0 {
            return 0;
        }
        self.invert(support, rng.gen())
    }

    /// Same draw as [`Self::draw`] (one uniform consumed), but only reports it
    /// when it is at least `d`. `phi_d ≈ φ^d` and `phi_support ≈ φ^support`
    /// only gate the exact inversion, so small rounding in them is harmless.
    pub(crate) fn draw_at_least<R: Rng + ?Sized>(
        &self,
        support: usize,
        d: usize,
        phi_d: f64,
        phi_support: f64,
        rng: &mut R,
    ) -> Option<usize> {
        if support <= 1 || self.phi == 0.0 {
            return (d == 0).then_some(0);
        }
        let u: f64 = rng.gen();
        // J >= d  iff  u·(1 − φ^support) >= 1 − φ^d.
        if u * (1.0 - phi_support) < (1.0 - phi_d) - 1e-9 {
            return None;
        }
        let j = self.invert(support, u);
        (j >= d).then_some(j)
    }

    fn invert(&self, support: usize, u: f64) -> usize {
        if self.phi == 1.0 {
            return ((u * support as f64) as usize).min(support - 1);
        }
        // P(J <= j) = (1 - φ^{j+1}) / (1 - φ^support).
        let mass = if support == usize::MAX {
            1.0
        } else {
            -libm::expm1(support as f64 * self.ln_phi)
        };
        let j = libm::floor(libm::log1p(-u * mass) / self.ln_phi);
        if j.is_finite() && j >= 0.0 {
            (j as usize).min(support - 1)
        } else {
            0
        }
    }
}

/// Support of an insertion distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Finite(usize),
    Infinite,
}

/// `D_{i,φ}`: the displacement law of the `i`-th insertion, or its limit `i → ∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InsertionDistribution {
    pub support: Support,
    pub phi: f64,
    /// Explicit pmf on `0..i`; empty for the infinite case.
    pub probabilities: Vec<f64>,
}

pub fn insertion_distribution(support: Support, phi: f64) -> Result<InsertionDistribution> {
    check_phi(phi)?;
    let probabilities = match support {
        Support::Finite(0) => return Err(invalid("i", "support size must be positive")),
        Support::Finite(i) => {
            let mut w = vec![0.0; i];
            let mut power = 1.0;
            for slot in w.iter_mut() {
                *slot = power;
                power *= phi;
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= total);
            w
        }
        Support::Infinite if phi >= 1.0 => {
            return Err(invalid("phi", "D_inf requires phi < 1"));
        }
        Support::Infinite => Vec::new(),
    };
    Ok(InsertionDistribution {
        support,
        phi,
        probabilities,
    })
}

impl InsertionDistribution {
    pub fn pmf(&self, j: usize) -> f64 {
        match self.support {
            Support::Finite(_) => self.probabilities.get(j).copied().unwrap_or(0.0),
            Support::Infinite => libm::pow(self.phi, j as f64) * (1.0 - self.phi),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.support {
            Support::Finite(_) => self
                .probabilities
                .iter()
                .enumerate()
                .map(|(j, p)| j as f64 * p)
                .sum(),
            Support::Infinite => self.phi / (1.0 - self.phi),
        }
    }

    pub fn variance(&self) -> f64 {
        match self.support {
            Support::Finite(_) => {
                let mean = self.mean();
                self.probabilities
                    .iter()
                    .enumerate()
                    .map(|(j, p)| {
                        let d = j as f64 - mean;
                        d * d * p
                    })
                    .sum()
            }
            Support::Infinite => self.phi / ((1.0 - self.phi) * (1.0 - self.phi)),
        }
    }
}

/// Whether `i ≥ 100·log(1/δ)/(1−φ)`, the size past which `D_{i,φ}` has
/// essentially the moments of `D_{∞,φ}`.
pub fn moment_gap(i: usize, phi: f64, delta: f64) -> bool {
    if phi >= 1.0 || !(delta > 0.0 && delta < 1.0) {
        return false;
    }
    i as f64 >= 100.0 * libm::log(1.0 / delta) / (1.0 - phi)
}

/// Probability that `π*(b)` precedes `π*(a)`, with its Monte Carlo error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InversionProbability {
    pub value: f64,
    /// Zero when exact.
    pub std_error: f64,
    pub exact: bool,
}

/// Largest block size evaluated by enumeration.
pub const EXACT_BLOCK_MAX: usize = 8;

pub const DEFAULT_INVERSION_DRAWS: usize = 100_000;

/// Inversion probability of the ranks `a < b` (1-based) of the central ranking.
///
/// Only the block of ranks `a..=b` matters: its restriction is Mallows with the
/// same `φ` on `d = b - a + 1` elements. Blocks up to [`EXACT_BLOCK_MAX`] are
/// enumerated; larger ones use [`DEFAULT_INVERSION_DRAWS`] samples from `rng`.
pub fn pair_inversion_probability<R: Rng + ?Sized>(
    m: &MallowsModel,
    a: usize,
    b: usize,
    rng: &mut R,
) -> Result<InversionProbability> {
    pair_inversion_probability_with(m, a, b, DEFAULT_INVERSION_DRAWS, rng)
}

pub fn pair_inversion_probability_with<R: Rng + ?Sized>(
    m: &MallowsModel,
    a: usize,
    b: usize,
    draws: usize,
    rng: &mut R,
) -> Result<InversionProbability> {
    if a == 0 || a >= b {
        return Err(invalid("a", "ranks must satisfy 1 <= a < b"));
    }
    if b > m.n {
        return Err(invalid("b", alloc::format!("rank {b} exceeds n = {}", m.n)));
    }
    let exact = |value| InversionProbability {
        value,
        std_error: 0.0,
        exact: true,
    };
    if m.phi == 1.0 {
        return Ok(exact(0.5));
    }
    if m.phi == 0.0 {
        return Ok(exact(0.0));
    }
    let d = b - a + 1;
    if d <= EXACT_BLOCK_MAX {
        let (mut inverted, mut total) = (0.0, 0.0);
        for p in lex_permutations(d) {
            let inversions = kendall_tau(&Permutation::identity(d), &p)?;
            let w = libm::pow(m.phi, inversions as f64);
            total += w;
            if p.rank_of(d as u32) < p.rank_of(1) {
                inverted += w;
            }
        }
        return Ok(exact(inverted / total));
    }
    if draws == 0 {
        return Err(invalid("draws", "must be positive"));
    }
    let block = MallowsModel::new(m.phi, Permutation::identity(d))?;
    let hits = (0..draws)
        .filter(|_| {
            let p = block.sample(rng);
            p.rank_of(d as u32) < p.rank_of(1)
        })
        .count();
    let value = hits as f64 / draws as f64;
    Ok(InversionProbability {
        value,
        std_error: libm::sqrt(value * (1.0 - value) / draws as f64),
        exact: false,
    })
}

fn same_phi(m1: &MallowsModel, m2: &MallowsModel) -> Result<()> {
    check_len(m1.n, m2.n)?;
    if m1.phi != m2.phi {
        return Err(invalid(
            "phi",
            alloc::format!("models differ in phi ({} vs {})", m1.phi, m2.phi),
        ));
    }
    Ok(())
}

fn central_distance(m1: &MallowsModel, m2: &MallowsModel) -> Result<f64> {
    l2_distance(&m1.central.position_vector(), &m2.central.position_vector())
}

/// `min(1, 2(1−φ)‖v_{π*} − v_{σ*}‖)` for two models sharing `φ`.
pub fn tv_upper_bound(m1: &MallowsModel, m2: &MallowsModel) -> Result<f64> {
    same_phi(m1, m2)?;
    Ok((2.0 * (1.0 - m1.phi) * central_distance(m1, m2)?).min(1.0))
}

/// TV bound for models that may also differ in `φ`: the central-ranking term
/// at `φ₁` plus `n²·|φ₁ − φ₂|` for moving `φ`, capped at 1.
pub fn combined_tv_upper_bound(m1: &MallowsModel, m2: &MallowsModel) -> Result<f64> {
    check_len(m1.n, m2.n)?;
    let central = 2.0 * (1.0 - m1.phi) * central_distance(m1, m2)?;
    let n = m1.n as f64;
    Ok((central + n * n * (m1.phi - m2.phi).abs()).min(1.0))
}

/// `4(1−φ)(−log φ)‖v_{π*} − v_{σ*}‖²` for two models sharing `φ ∈ (0, 1)`.
pub fn kl_upper_bound(m1: &MallowsModel, m2: &MallowsModel) -> Result<f64> {
    same_phi(m1, m2)?;
    if m1.phi <= 0.0 || m1.phi >= 1.0 {
        return Err(invalid("phi", "KL bound needs 0 < phi < 1"));
    }
    let sq = m1
        .central
        .position_vector()
        .squared_distance(&m2.central.position_vector())? as f64;
    Ok(4.0 * (1.0 - m1.phi) * -libm::log(m1.phi) * sq)
}

/// `d_KT(p, π*) − d_KT(p, σ*)`; the log-likelihood ratio of the two models at `p`
/// is this value times `log φ`.
pub fn delta_statistic(pi_star: &Permutation, sigma_star: &Permutation, p: &Permutation) -> Result<i64> {
    Ok(kendall_tau(p, pi_star)? as i64 - kendall_tau(p, sigma_star)? as i64)
}

/// Grid step `ε/n²`: models on `n` elements whose `φ` differ by at most this are within `ε` in TV.
pub fn phi_perturbation_tv(n: usize, eps: f64) -> f64 {
    eps / (n * n) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm(order: &[u32]) -> Permutation {
        Permutation::new(order.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn combined_bound_dominates_exact_tv() {
        let a = MallowsModel::new(0.8, perm(&[1, 2, 3, 4])).unwrap();
        assert_eq!(combined_tv_upper_bound(&a, &a).unwrap(), 0.0);
        for (phi, order) in [(0.81, [1, 2, 3, 4]), (0.79, [2, 1, 3, 4]), (0.8, [1, 3, 2, 4]), (0.75, [4, 3, 2, 1])] {
            let b = MallowsModel::new(phi, perm(&order)).unwrap();
            let exact = crate::oracle::exact_tv(&crate::oracle::enumerate_pmf(&a).unwrap(), &crate::oracle::enumerate_pmf(&b).unwrap()).unwrap();
            let bound = combined_tv_upper_bound(&a, &b).unwrap();
            assert!(exact <= bound + 1e-12, "{exact} > {bound}");
            if phi == 0.8 {
                assert_eq!(bound, tv_upper_bound(&a, &b).unwrap());
            }
        }
    }

    #[test]
    fn log_pmf_examples() {
        let uniform = MallowsModel::uniform(3);
        for p in lex_permutations(3) {
            assert!(close(uniform.log_pmf(&p).unwrap(), libm::log(1.0 / 6.0), 1e-12));
        }
        let m = MallowsModel::new(0.5, Permutation::identity(3)).unwrap();
        assert!(close(m.log_pmf(&Permutation::identity(3)).unwrap(), -0.96508, 1e-5));
        assert!(close(m.log_pmf(&perm(&[3, 2, 1])).unwrap(), -3.04452, 1e-5));
        assert!(close(m.log_normalizer(), libm::log(2.625), 1e-12));
    }

    #[test]
    fn point_mass_at_zero() {
        let central = perm(&[2, 3, 1]);
        let m = MallowsModel::new(0.0, central.clone()).unwrap();
        assert_eq!(m.log_pmf(&central).unwrap(), 0.0);
        assert_eq!(m.log_pmf(&Permutation::identity(3)).unwrap(), f64::NEG_INFINITY);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| m.sample(&mut rng) == central));
    }

    #[test]
    fn normalizer_matches_product_form() {
        for &phi in &[0.1, 0.5, 0.9, 0.999, 1.0 - 1e-9] {
            for n in [1usize, 5, 40] {
                let direct: f64 = (1..=n)
                    .map(|i| libm::log((0..i).map(|k| libm::pow(phi, k as f64)).sum::<f64>()))
                    .sum();
                assert!(close(log_normalizer(n, phi), direct, 1e-9 * direct.abs().max(1.0)));
            }
        }
        assert!(close(log_normalizer(5, 1.0), libm::log(120.0), 1e-12));
    }

    #[test]
    fn rejects_bad_phi_and_dimensions() {
        assert!(MallowsModel::new(1.5, Permutation::identity(2)).is_err());
        assert!(MallowsModel::new(f64::NAN, Permutation::identity(2)).is_err());
        let m = MallowsModel::uniform(3);
        assert!(m.log_pmf(&Permutation::identity(4)).is_err());
    }

    #[test]
    fn uniform_sampler_frequencies() {
        let m = MallowsModel::uniform(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 6];
        let draws = 1_000_000;
        for _ in 0..draws {
            counts[crate::perm::lex_index(&m.sample(&mut rng))] += 1;
        }
        for c in counts {
            assert!(close(c as f64 / draws as f64, 1.0 / 6.0, 0.002));
        }
    }

    #[test]
    fn insertion_distribution_examples() {
        let d = insertion_distribution(Support::Finite(3), 0.5).unwrap();
        for (p, want) in d.probabilities.iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert!(close(*p, want, 1e-12));
        }
        assert!(close(d.mean(), 4.0 / 7.0, 1e-12));

        let inf = insertion_distribution(Support::Infinite, 0.5).unwrap();
        assert!(close(inf.mean(), 1.0, 1e-12));
        assert!(close(inf.variance(), 2.0, 1e-12));

        let one = insertion_distribution(Support::Finite(1), 0.3).unwrap();
        assert_eq!(one.probabilities, vec![1.0]);
        assert_eq!(one.mean(), 0.0);

        assert!(insertion_distribution(Support::Infinite, 1.0).is_err());
        assert!(insertion_distribution(Support::Finite(0), 0.5).is_err());
    }

    #[test]
    fn finite_moments_approach_limit() {
        for &phi in &[0.3, 0.7, 0.95] {
            let inf = insertion_distribution(Support::Infinite, phi).unwrap();
            for i in [1usize, 2, 10, 100, 1000] {
                let d = insertion_distribution(Support::Finite(i), phi).unwrap();
                assert!(close(d.probabilities.iter().sum::<f64>(), 1.0, 1e-12));
                assert!(d.mean() <= inf.mean() + 1e-12);
            }
            // Past the moment-gap size the means agree to δ/(1−φ).
            let delta = 0.1;
            let i = libm::ceil(100.0 * libm::log(1.0 / delta) / (1.0 - phi)) as usize;
            assert!(moment_gap(i, phi, delta));
            let d = insertion_distribution(Support::Finite(i), phi).unwrap();
            assert!((d.mean() - inf.mean()).abs() <= delta / (1.0 - phi));
            assert!((d.variance() - inf.variance()).abs() <= delta / ((1.0 - phi) * (1.0 - phi)));
        }
    }

    #[test]
    fn moment_gap_examples() {
        let i = libm::ceil(100.0 * libm::log(10.0) / 0.5) as usize;
        assert!(moment_gap(i, 0.5, 0.1));
        assert!(!moment_gap(i - 1, 0.5, 0.1));
        assert!(!moment_gap(1, 0.5, 0.1));
        // As δ → 1 the threshold vanishes.
        assert!(moment_gap(1, 0.5, 1.0 - 1e-6));
        assert!(!moment_gap(1_000_000, 1.0, 0.1));
    }

    #[test]
    fn limiting_sampler_matches_geometric() {
        let s = DisplacementSampler::new(0.8);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 200_000;
        let mean = (0..draws).map(|_| s.draw(usize::MAX, &mut rng) as f64).sum::<f64>() / draws as f64;
        assert!(close(mean, 4.0, 0.05));
    }

    #[test]
    fn inversion_probability_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = MallowsModel::new(0.5, Permutation::identity(5)).unwrap();
        let p = pair_inversion_probability(&m, 2, 3, &mut rng).unwrap();
        assert!(p.exact);
        assert!(close(p.value, 1.0 / 3.0, 1e-12));

        let u = MallowsModel::uniform(12);
        assert_eq!(pair_inversion_probability(&u, 1, 12, &mut rng).unwrap().value, 0.5);
        let z = MallowsModel::new(0.0, Permutation::identity(12)).unwrap();
        assert_eq!(pair_inversion_probability(&z, 1, 12, &mut rng).unwrap().value, 0.0);

        assert!(pair_inversion_probability(&m, 3, 3, &mut rng).is_err());
        assert!(pair_inversion_probability(&m, 1, 6, &mut rng).is_err());
    }

    #[test]
    fn inversion_probability_depends_only_on_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let central = perm(&[4, 1, 6, 2, 5, 3]);
        let m = MallowsModel::new(0.7, central).unwrap();
        let first = pair_inversion_probability(&m, 1, 3, &mut rng).unwrap().value;
        let later = pair_inversion_probability(&m, 4, 6, &mut rng).unwrap().value;
        assert!(close(first, later, 1e-15));
    }

    #[test]
    fn monte_carlo_path_for_wide_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = MallowsModel::new(0.9, Permutation::identity(12)).unwrap();
        let p = pair_inversion_probability_with(&m, 1, 10, 50_000, &mut rng).unwrap();
        assert!(!p.exact);
        assert!(p.std_error > 0.0);
        // Sandwich with d = 9.
        assert!(p.value <= 0.5 - 0.01 * (9.0 * 0.1f64).min(1.0) + 4.0 * p.std_error);
        assert!(p.value >= 0.5 - 8.0 * 9.0 * 0.1 - 4.0 * p.std_error);
    }

    #[test]
    fn tv_and_kl_bound_examples() {
        let id = Permutation::identity(3);
        let a = MallowsModel::new(0.9, id.clone()).unwrap();
        assert_eq!(tv_upper_bound(&a, &a).unwrap(), 0.0);
        let b = MallowsModel::new(0.9, perm(&[2, 1, 3])).unwrap();
        assert!(close(tv_upper_bound(&a, &b).unwrap(), 0.2 * libm::sqrt(2.0), 1e-12));

        let far_a = MallowsModel::new(0.5, Permutation::identity(60)).unwrap();
        let far_b = MallowsModel::new(0.5, Permutation::identity(60).reversed()).unwrap();
        assert_eq!(tv_upper_bound(&far_a, &far_b).unwrap(), 1.0);

        let c = MallowsModel::new(0.5, id.clone()).unwrap();
        assert!(tv_upper_bound(&a, &c).is_err());

        let d = MallowsModel::new(0.5, perm(&[2, 1, 3])).unwrap();
        assert_eq!(kl_upper_bound(&c, &c).unwrap(), 0.0);
        assert!(close(kl_upper_bound(&c, &d).unwrap(), 4.0 * 0.5 * libm::log(2.0) * 2.0, 1e-12));
        assert!(close(kl_upper_bound(&c, &d).unwrap(), 2.7726, 1e-4));
        let u = MallowsModel::uniform(3);
        assert!(kl_upper_bound(&u, &u).is_err());
    }

    #[test]
    fn delta_statistic_examples() {
        let id = Permutation::identity(3);
        let s = perm(&[2, 1, 3]);
        assert_eq!(delta_statistic(&id, &s, &id).unwrap(), -1);
        assert_eq!(delta_statistic(&id, &s, &s).unwrap(), 1);
        assert_eq!(delta_statistic(&s, &s, &perm(&[3, 1, 2])).unwrap(), 0);

        // Log-likelihood ratio identity.
        let m1 = MallowsModel::new(0.6, id.clone()).unwrap();
        let m2 = MallowsModel::new(0.6, s.clone()).unwrap();
        for p in lex_permutations(3) {
            let ratio = m1.log_pmf(&p).unwrap() - m2.log_pmf(&p).unwrap();
            let delta = delta_statistic(&id, &s, &p).unwrap();
            assert!(close(ratio, delta as f64 * libm::log(0.6), 1e-12));
        }
    }

    #[test]
    fn perturbation_step_examples() {
        assert!(close(phi_perturbation_tv(10, 0.1), 0.001, 1e-15));
        assert_eq!(phi_perturbation_tv(1, 0.5), 0.5);
    }

    #[test]
    fn serde_shape_round_trips() {
        let m = MallowsModel::new(0.25, perm(&[2, 3, 1])).unwrap();
        let spec: ModelSpec = m.clone().into();
        assert_eq!(spec.n, 3);
        assert_eq!(MallowsModel::try_from(spec).unwrap(), m);
        let bad = ModelSpec {
            n: 4,
            phi: 0.5,
            central: perm(&[1, 2]),
        };
        assert!(MallowsModel::try_from(bad).is_err());
    }
}
