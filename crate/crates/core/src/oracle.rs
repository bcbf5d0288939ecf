//! Exhaustive computations over `S_n` for `n ≤ 8`.
//!
//! Nothing here reuses the closed-form normalizer or the merge-sort distance:
//! probabilities are `φ^{d}` weights with a pairwise-count distance, normalized
//! by brute-force summation, so the oracle can check the fast paths.
//! Tables are indexed by the lexicographic rank of the permutation.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, invalid, Error, Result};
use crate::mallows::MallowsModel;
use crate::perm::{lex_index, lex_permutations, Permutation};

/// Largest `n` the oracle will enumerate.
pub const MAX_N: usize = 8;

fn check_size(n: usize) -> Result<()> {
    if n > MAX_N {
        Err(Error::TooLarge { n, max: MAX_N })
    } else {
        Ok(())
    }
}

/// `O(n²)` pair count, kept separate from the fast merge-sort path.
pub fn naive_kendall_tau(a: &Permutation, b: &Permutation) -> u64 {
    let n = a.len() as u32;
    let mut count = 0;
    for x in 1..=n {
        for y in x + 1..=n {
            if (a.rank_of(x) < a.rank_of(y)) != (b.rank_of(x) < b.rank_of(y)) {
                count += 1;
            }
        }
    }
    count
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// A probability table over `S_n` in lexicographic order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl ExactDistribution {
    pub fn from_weights(n: usize, weights: Vec<f64>) -> Result<Self> {
        check_size(n)?;
        check_len(factorial(n), weights.len())?;
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("weights", "total mass must be positive"));
        }
        Ok(Self {
            n,
            probs: weights.into_iter().map(|w| w / total).collect(),
        })
    }

    pub fn point_mass(p: &Permutation) -> Result<Self> {
        let n = p.len();
        check_size(n)?;
        let mut probs = vec![0.0; factorial(n)];
        probs[lex_index(p)] = 1.0;
        Ok(Self { n, probs })
    }

    pub fn prob(&self, p: &Permutation) -> f64 {
        self.probs[lex_index(p)]
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Law of the restriction to `subset` (relabelled ascending), as a table over `S_{|subset|}`.
    pub fn restriction_law(&self, subset: &[u32]) -> Result<ExactDistribution> {
        let k = {
            let mut s = subset.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len()
        };
        let mut probs = vec![0.0; factorial(k)];
        for (p, &mass) in lex_permutations(self.n).zip(&self.probs) {
            probs[lex_index(&p.restrict(subset)?)] += mass;
        }
        Ok(ExactDistribution { n: k, probs })
    }
}

pub fn enumerate_pmf(m: &MallowsModel) -> Result<ExactDistribution> {
    check_size(m.n())?;
    let weights = lex_permutations(m.n())
        .map(|p| libm::pow(m.phi(), naive_kendall_tau(&p, m.central()) as f64))
        .collect();
    ExactDistribution::from_weights(m.n(), weights)
}

pub fn exact_tv(d1: &ExactDistribution, d2: &ExactDistribution) -> Result<f64> {
    check_len(d1.n, d2.n)?;
    Ok(0.5 * d1.probs.iter().zip(&d2.probs).map(|(p, q)| (p - q).abs()).sum::<f64>())
}

pub fn exact_kl(d1: &ExactDistribution, d2: &ExactDistribution) -> Result<f64> {
    check_len(d1.n, d2.n)?;
    let mut kl = 0.0;
    for (&p, &q) in d1.probs.iter().zip(&d2.probs) {
        if p > 0.0 {
            if q <= 0.0 {
                return Err(Error::SupportViolation);
            }
            kl += p * libm::log(p / q);
        }
    }
    Ok(kl)
}

/// Exact mean and covariance of the position vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionMoments {
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub top_eigenvalue: f64,
}

pub fn exact_position_moments(m: &MallowsModel) -> Result<PositionMoments> {
    let dist = enumerate_pmf(m)?;
    let n = m.n();
    let mut mean = vec![0.0; n];
    let mut second = vec![vec![0.0; n]; n];
    for (p, &w) in lex_permutations(n).zip(&dist.probs) {
        let v = p.ranks();
        for i in 0..n {
            mean[i] += w * v[i] as f64;
            for j in 0..n {
                second[i][j] += w * (v[i] as f64) * (v[j] as f64);
            }
        }
    }
    let covariance: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| second[i][j] - mean[i] * mean[j]).collect())
        .collect();
    let top_eigenvalue = jacobi_eigenvalues(&covariance)
        .into_iter()
        .fold(0.0, f64::max);
    Ok(PositionMoments {
        mean,
        covariance,
        top_eigenvalue,
    })
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Kemeny ranking: the permutation minimizing total Kendall-tau distance to
/// `samples`, ties broken by lexicographic order. For `φ ≥ 1` every ranking is
/// equally likely and the lexicographically first (the identity) is returned.
pub fn exact_mle(samples: &[Permutation], phi: f64) -> Result<Permutation> {
    let first = samples.first().ok_or(Error::Empty("samples"))?;
    let n = first.len();
    check_size(n)?;
    if phi >= 1.0 {
        return Ok(Permutation::identity(n));
    }
    // against[x][y]: samples placing y before x.
    let mut against = vec![vec![0u64; n]; n];
    for s in samples {
        check_len(n, s.len())?;
        let order = s.order();
        for (i, &y) in order.iter().enumerate() {
            for &x in &order[i + 1..] {
                against[x as usize - 1][y as usize - 1] += 1;
            }
        }
    }
    let mut best: Option<(u64, Permutation)> = None;
    for p in lex_permutations(n) {
        let order = p.order();
        let mut cost = 0;
        for (i, &x) in order.iter().enumerate() {
            for &y in &order[i + 1..] {
                cost += against[x as usize - 1][y as usize - 1];
            }
        }
        if best.as_ref().map_or(true, |(c, _)| cost < *c) {
            best = Some((cost, p));
        }
    }
    Ok(best.expect("S_n is nonempty").1)
}

/// Probability that `π*(b)` precedes `π*(a)`, summed over the full table.
pub fn exact_pair_inversion(m: &MallowsModel, a: usize, b: usize) -> Result<f64> {
    if a == 0 || a >= b || b > m.n() {
        return Err(invalid("a, b", "ranks must satisfy 1 <= a < b <= n"));
    }
    let dist = enumerate_pmf(m)?;
    let (x, y) = (m.central().element_at(a as u32), m.central().element_at(b as u32));
    Ok(lex_permutations(m.n())
        .zip(&dist.probs)
        .filter(|(p, _)| p.rank_of(y) < p.rank_of(x))
        .map(|(_, &w)| w)
        .sum())
}

/// Largest deviation between the joint law of the restrictions to two disjoint
/// blocks of consecutive central ranks and the product of Mallows laws on the blocks.
pub fn block_factorization_error(
    m: &MallowsModel,
    first: core::ops::RangeInclusive<usize>,
    second: core::ops::RangeInclusive<usize>,
) -> Result<f64> {
    let n = m.n();
    if *first.start() == 0 || *second.end() > n || first.end() >= second.start() || first.is_empty() || second.is_empty() {
        return Err(invalid("blocks", "need 1 <= first < second <= n, disjoint and ordered"));
    }
    let dist = enumerate_pmf(m)?;
    let c = m.central();
    let b1: Vec<u32> = first.map(|r| c.element_at(r as u32)).collect();
    let b2: Vec<u32> = second.map(|r| c.element_at(r as u32)).collect();
    let (k1, k2) = (b1.len(), b2.len());
    let mut joint = vec![0.0; factorial(k1) * factorial(k2)];
    for (p, &w) in lex_permutations(n).zip(&dist.probs) {
        let i = lex_index(&p.restrict(&b1)?);
        let j = lex_index(&p.restrict(&b2)?);
        joint[i * factorial(k2) + j] += w;
    }
    let law1 = enumerate_pmf(&MallowsModel::new(m.phi(), c.restrict(&b1)?)?)?;
    let law2 = enumerate_pmf(&MallowsModel::new(m.phi(), c.restrict(&b2)?)?)?;
    let mut worst: f64 = 0.0;
    for (i, p) in law1.probs.iter().enumerate() {
        for (j, q) in law2.probs.iter().enumerate() {
            worst = worst.max((joint[i * factorial(k2) + j] - p * q).abs());
        }
    }
    Ok(worst)
}

/// Outcome of the two-sided TV check over every pair of central rankings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichScan {
    pub n: usize,
    pub phi: f64,
    pub pairs_checked: usize,
    pub upper_violations: usize,
    /// Smallest `C` with `TV ≥ (1−φ)‖Δv‖/C` on every checked pair; 0 if none.
    pub required_constant: f64,
    /// Largest observed `TV / (2(1−φ)‖Δv‖)`.
    pub max_upper_ratio: f64,
}

/// Checks `(1−φ)‖Δv‖/C ≤ TV ≤ 2(1−φ)‖Δv‖` on all ordered pairs of distinct
/// centrals with `‖Δv‖ ≤ 1/(2(1−φ))`.
pub fn tv_sandwich_scan(n: usize, phi: f64) -> Result<SandwichScan> {
    check_size(n)?;
    if !(0.0..1.0).contains(&phi) {
        return Err(invalid("phi", "scan needs 0 <= phi < 1"));
    }
    let perms: Vec<Permutation> = lex_permutations(n).collect();
    let size = perms.len();
    let mut weight = vec![0.0; n * (n - 1) / 2 + 1];
    for (d, w) in weight.iter_mut().enumerate() {
        *w = libm::pow(phi, d as f64);
    }
    let z: f64 = perms.iter().map(|p| weight[naive_kendall_tau(&perms[0], p) as usize]).sum();
    let mut distance = vec![0u8; size * size];
    for i in 0..size {
        for j in i..size {
            let d = naive_kendall_tau(&perms[i], &perms[j]) as u8;
            distance[i * size + j] = d;
            distance[j * size + i] = d;
        }
    }
    let radius_sq = {
        let r = 1.0 / (2.0 * (1.0 - phi));
        r * r
    };
    let mut scan = SandwichScan {
        n,
        phi,
        pairs_checked: 0,
        upper_violations: 0,
        required_constant: 0.0,
        max_upper_ratio: 0.0,
    };
    for i in 0..size {
        let vi = perms[i].position_vector();
        for j in 0..size {
            if i == j {
                continue;
            }
            let sq = vi.squared_distance(&perms[j].position_vector())? as f64;
            if sq > radius_sq {
                continue;
            }
            let (ri, rj) = (&distance[i * size..(i + 1) * size], &distance[j * size..(j + 1) * size]);
            let tv = 0.5
                * ri.iter()
                    .zip(rj)
                    .map(|(&a, &b)| (weight[a as usize] - weight[b as usize]).abs())
                    .sum::<f64>()
                / z;
            let scale = (1.0 - phi) * libm::sqrt(sq);
            scan.pairs_checked += 1;
            if tv > 2.0 * scale * (1.0 + 1e-12) {
                scan.upper_violations += 1;
            }
            scan.max_upper_ratio = scan.max_upper_ratio.max(tv / (2.0 * scale));
            scan.required_constant = scan.required_constant.max(scale / tv);
        }
    }
    Ok(scan)
}

/// Local-versus-global indistinguishability of two models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImpossibilityReport {
    pub n: usize,
    pub k: usize,
    pub phi: f64,
    pub global_tv: f64,
    /// Maximum over all `k`-element subsets of the TV between restricted laws.
    pub max_restricted_tv: f64,
    /// `1 − φ^k`.
    pub restricted_bound: f64,
    /// `(1−φ)‖Δv‖ / TV`, the constant in the global lower bound.
    pub empirical_constant: f64,
    pub l2_distance: f64,
}

/// Restricted and global TV between `M(φ, π)` and `M(φ, σ)` over all `k`-subsets.
pub fn impossibility_diagnostic(pi: &Permutation, sigma: &Permutation, phi: f64, k: usize) -> Result<ImpossibilityReport> {
    check_len(pi.len(), sigma.len())?;
    let n = pi.len();
    if k == 0 || k > n {
        return Err(invalid("k", "need 1 <= k <= n"));
    }
    let d1 = enumerate_pmf(&MallowsModel::new(phi, pi.clone())?)?;
    let d2 = enumerate_pmf(&MallowsModel::new(phi, sigma.clone())?)?;
    let global_tv = exact_tv(&d1, &d2)?;
    let mut max_restricted_tv: f64 = 0.0;
    for subset in combinations(n, k) {
        let tv = exact_tv(&d1.restriction_law(&subset)?, &d2.restriction_law(&subset)?)?;
        max_restricted_tv = max_restricted_tv.max(tv);
    }
    let l2 = crate::perm::l2_distance(&pi.position_vector(), &sigma.position_vector())?;
    Ok(ImpossibilityReport {
        n,
        k,
        phi,
        global_tv,
        max_restricted_tv,
        restricted_bound: 1.0 - libm::pow(phi, k as f64),
        empirical_constant: if global_tv > 0.0 { (1.0 - phi) * l2 / global_tv } else { 0.0 },
        l2_distance: l2,
    })
}

/// `φ = 1 − ε/(2k)`, `π* = id`, `σ* = (2,1,4,3,…)`.
pub fn impossibility_construction(n: usize, eps: f64, k: usize) -> Result<ImpossibilityReport> {
    if n % 2 != 0 {
        return Err(invalid("n", "construction pairs adjacent elements; n must be even"));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("eps", "must lie in (0, 1]"));
    }
    let phi = 1.0 - eps / (2.0 * k.max(1) as f64);
    let swapped: Vec<u32> = (0..n as u32).map(|i| if i % 2 == 0 { i + 2 } else { i }).collect();
    impossibility_diagnostic(&Permutation::identity(n), &Permutation::new(swapped)?, phi, k)
}

/// All `k`-element subsets of `1..=n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = (1..=k as u32).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let mut i = k;
        while i > 0 && current[i - 1] as usize == n - k + i {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        current[i - 1] += 1;
        for j in i..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

pub mod suites {
    //! Named oracle suites with per-case verdicts.

    use super::*;
    use crate::mallows::pair_inversion_probability;
    use rand::SeedableRng;

    pub const NAMES: [&str; 6] = ["pmf", "tv-sandwich", "inversion", "blocks", "moments", "impossibility"];

    #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
    pub struct CaseVerdict {
        pub name: String,
        pub passed: bool,
        pub metrics: BTreeMap<String, f64>,
    }

    #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
    pub struct SuiteReport {
        pub suite: String,
        pub passed: bool,
        pub cases: Vec<CaseVerdict>,
    }

    fn case(name: String, passed: bool, metrics: &[(&str, f64)]) -> CaseVerdict {
        CaseVerdict {
            name,
            passed,
            metrics: metrics.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn run(name: &str) -> Result<SuiteReport> {
        let cases = match name {
            "pmf" => pmf()?,
            "tv-sandwich" => tv_sandwich()?,
            "inversion" => inversion()?,
            "blocks" => blocks()?,
            "moments" => moments()?,
            "impossibility" => impossibility()?,
            other => return Err(invalid("suite", alloc::format!("unknown suite `{other}`"))),
        };
        Ok(SuiteReport {
            suite: name.to_string(),
            passed: cases.iter().all(|c| c.passed),
            cases,
        })
    }

    /// A fixed non-identity central ranking on `n` elements.
    fn shuffled_central(n: usize) -> Permutation {
        let mut order: Vec<u32> = (1..=n as u32).collect();
        order.rotate_left(n / 3);
        order.swap(0, n - 1);
        Permutation::new(order).expect("rotation and swap keep a bijection")
    }

    fn pmf() -> Result<Vec<CaseVerdict>> {
        let mut cases = Vec::new();
        for n in 1..=6 {
            for &phi in &[0.0, 0.3, 0.7, 0.95, 1.0] {
                let m = MallowsModel::new(phi, shuffled_central(n))?;
                let dist = enumerate_pmf(&m)?;
                let mut max_gap: f64 = 0.0;
                for (p, &q) in lex_permutations(n).zip(&dist.probs) {
                    max_gap = max_gap.max((m.pmf(&p)? - q).abs());
                }
                let sum = dist.total_mass();
                let passed = (sum - 1.0).abs() <= 1e-9 && max_gap <= 1e-10;
                cases.push(case(
                    alloc::format!("n={n} phi={phi}"),
                    passed,
                    &[("total_mass", sum), ("max_pointwise_gap", max_gap)],
                ));
            }
        }
        Ok(cases)
    }

    fn tv_sandwich() -> Result<Vec<CaseVerdict>> {
        let mut cases = Vec::new();
        for n in 2..=6 {
            for &phi in &[0.5, 0.8, 0.9] {
                let scan = tv_sandwich_scan(n, phi)?;
                cases.push(case(
                    alloc::format!("n={n} phi={phi}"),
                    scan.upper_violations == 0 && scan.required_constant <= 100.0,
                    &[
                        ("pairs_checked", scan.pairs_checked as f64),
                        ("upper_violations", scan.upper_violations as f64),
                        ("required_constant", scan.required_constant),
                        ("max_upper_ratio", scan.max_upper_ratio),
                    ],
                ));
            }
        }
        Ok(cases)
    }

    fn inversion() -> Result<Vec<CaseVerdict>> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let mut cases = Vec::new();
        for n in 2..=MAX_N {
            for &phi in &[0.5, 0.8, 0.95] {
                let m = MallowsModel::new(phi, Permutation::identity(n))?;
                let (mut violations, mut worst_margin) = (0usize, f64::INFINITY);
                for a in 1..n {
                    for b in a + 1..=n {
                        let p = pair_inversion_probability(&m, a, b, &mut rng)?.value;
                        let d = (b - a) as f64;
                        let lower = 0.5 - 8.0 * d * (1.0 - phi);
                        let upper = 0.5 - 0.01 * (d * (1.0 - phi)).min(1.0);
                        if p < lower || p > upper {
                            violations += 1;
                        }
                        worst_margin = worst_margin.min((p - lower).min(upper - p));
                    }
                }
                cases.push(case(
                    alloc::format!("n={n} phi={phi}"),
                    violations == 0,
                    &[("violations", violations as f64), ("min_margin", worst_margin)],
                ));
            }
        }
        Ok(cases)
    }

    fn blocks() -> Result<Vec<CaseVerdict>> {
        let mut cases = Vec::new();
        for &phi in &[0.3, 0.7, 0.95] {
            for central in [Permutation::identity(6), shuffled_central(6)] {
                let m = MallowsModel::new(phi, central)?;
                let err = block_factorization_error(&m, 1..=2, 4..=6)?;
                cases.push(case(
                    alloc::format!("phi={phi} central={:?}", m.central().order()),
                    err <= 1e-9,
                    &[("max_abs_error", err)],
                ));
            }
        }
        Ok(cases)
    }

    fn moments() -> Result<Vec<CaseVerdict>> {
        let mut cases = Vec::new();
        for n in [3usize, 5, 8] {
            for &phi in &[0.0, 0.5, 0.9] {
                let m = MallowsModel::new(phi, shuffled_central(n))?;
                let mom = exact_position_moments(&m)?;
                let bound = 1e4 / ((1.0 - phi) * (1.0 - phi));
                let mut passed = mom.top_eigenvalue <= bound;
                if phi == 0.0 {
                    let center = m.central().position_vector().to_f64();
                    passed &= mom.mean.iter().zip(&center).all(|(a, b)| (a - b).abs() < 1e-12);
                    passed &= mom.top_eigenvalue.abs() < 1e-12;
                }
                cases.push(case(
                    alloc::format!("n={n} phi={phi}"),
                    passed,
                    &[("top_eigenvalue", mom.top_eigenvalue), ("bound", bound)],
                ));
            }
        }
        let uniform = exact_position_moments(&MallowsModel::uniform(3))?;
        let passed = uniform.mean.iter().all(|&x| (x - 2.0).abs() < 1e-12)
            && (0..3).all(|i| (uniform.covariance[i][i] - 2.0 / 3.0).abs() < 1e-12);
        cases.push(case("n=3 phi=1".into(), passed, &[("top_eigenvalue", uniform.top_eigenvalue)]));
        Ok(cases)
    }

    fn impossibility() -> Result<Vec<CaseVerdict>> {
        let (eps, k) = (0.2, 2);
        let mut cases = Vec::new();
        for n in [4usize, 6, 8] {
            let r = impossibility_construction(n, eps, k)?;
            let global_floor = eps * libm::sqrt(n as f64) / (2.0 * k as f64 * 100.0);
            let passed = r.max_restricted_tv < eps
                && r.max_restricted_tv <= r.restricted_bound
                && r.restricted_bound < eps
                && r.global_tv >= global_floor;
            cases.push(case(
                alloc::format!("n={n} k={k} eps={eps}"),
                passed,
                &[
                    ("phi", r.phi),
                    ("global_tv", r.global_tv),
                    ("global_floor", global_floor),
                    ("max_restricted_tv", r.max_restricted_tv),
                    ("restricted_bound", r.restricted_bound),
                    ("empirical_constant", r.empirical_constant),
                ],
            ));
        }
        Ok(cases)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(order: &[u32]) -> Permutation {
        Permutation::new(order.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let u = enumerate_pmf(&MallowsModel::uniform(3)).unwrap();
        assert!(u.probs.iter().all(|&p| (p - 1.0 / 6.0).abs() < 1e-15));

        let c = perm(&[2, 3, 1]);
        let z = enumerate_pmf(&MallowsModel::new(0.0, c.clone()).unwrap()).unwrap();
        assert_eq!(z, ExactDistribution::point_mass(&c).unwrap());

        // Lex order of S_3: 123 132 213 231 312 321, distances 0 1 1 2 2 3.
        let h = enumerate_pmf(&MallowsModel::new(0.5, Permutation::identity(3)).unwrap()).unwrap();
        for (p, w) in h.probs.iter().zip([1.0, 0.5, 0.5, 0.25, 0.25, 0.125]) {
            assert!((p - w / 2.625).abs() < 1e-15);
        }
        assert!(matches!(
            enumerate_pmf(&MallowsModel::uniform(9)),
            Err(Error::TooLarge { n: 9, max: 8 })
        ));
    }

    #[test]
    fn tv_and_kl_examples() {
        let a = enumerate_pmf(&MallowsModel::new(0.5, Permutation::identity(3)).unwrap()).unwrap();
        assert_eq!(exact_tv(&a, &a).unwrap(), 0.0);
        assert_eq!(exact_kl(&a, &a).unwrap(), 0.0);
        let p = ExactDistribution::point_mass(&Permutation::identity(3)).unwrap();
        let q = ExactDistribution::point_mass(&perm(&[3, 2, 1])).unwrap();
        assert_eq!(exact_tv(&p, &q).unwrap(), 1.0);
        assert_eq!(exact_kl(&p, &q), Err(Error::SupportViolation));

        let b = enumerate_pmf(&MallowsModel::new(0.5, perm(&[2, 1, 3])).unwrap()).unwrap();
        let tv = exact_tv(&a, &b).unwrap();
        let dv = libm::sqrt(2.0);
        assert!(tv <= 2.0 * 0.5 * dv);
        assert!(tv >= 0.5 * dv / 100.0);
        assert!(exact_kl(&a, &b).unwrap() >= 2.0 * tv * tv);
    }

    #[test]
    fn moments_examples() {
        let u = exact_position_moments(&MallowsModel::uniform(3)).unwrap();
        assert!(u.mean.iter().all(|&x| (x - 2.0).abs() < 1e-12));
        for i in 0..3 {
            assert!((u.covariance[i][i] - 2.0 / 3.0).abs() < 1e-12);
        }
        // The uniform rank covariance is (n+1)/12 · (nI − J); top eigenvalue n(n+1)/12.
        assert!((u.top_eigenvalue - 1.0).abs() < 1e-9);
    }

    #[test]
    fn jacobi_on_known_matrix() {
        let mut ev = jacobi_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn mle_examples() {
        let p = perm(&[3, 1, 4, 2]);
        assert_eq!(exact_mle(core::slice::from_ref(&p), 0.5).unwrap(), p);
        // Two samples disagreeing on one pair: tie between them, lexicographic winner.
        let s = [Permutation::identity(3), perm(&[2, 1, 3])];
        assert_eq!(exact_mle(&s, 0.5).unwrap(), Permutation::identity(3));
        assert!(exact_mle(&[], 0.5).is_err());
    }

    #[test]
    fn combinations_enumerate() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![1, 2, 3]]);
        assert_eq!(combinations(8, 2).len(), 28);
    }

    #[test]
    fn impossibility_degenerate_case() {
        let id = Permutation::identity(4);
        let r = impossibility_diagnostic(&id, &id, 0.9, 2).unwrap();
        assert_eq!(r.global_tv, 0.0);
        assert_eq!(r.max_restricted_tv, 0.0);
        assert!(impossibility_construction(5, 0.2, 2).is_err());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(suites::run("nope").is_err());
    }
}
