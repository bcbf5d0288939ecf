//! The sampler against exact enumeration, and the tail behaviour of
//! adjustment vectors, at sizes small enough for the default test run.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use robust_mallows::oracle::enumerate_pmf;
use robust_mallows::perm::{adjustment_vectors, lex_index};
use robust_mallows::robust_mean::{robust_mean_bounded_cov, FilterSettings, PointMatrix};
use robust_mallows::seed::{self, tags};
use robust_mallows::{MallowsModel, Permutation};

fn random_perm<R: Rng>(n: usize, rng: &mut R) -> Permutation {
    let mut order: Vec<u32> = (1..=n as u32).collect();
    order.shuffle(rng);
    Permutation::new(order).unwrap()
}

fn unit_direction<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let norm = v.iter().map(|x: &f64| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

#[test]
fn sampler_frequencies_fit_exact_pmf() {
    let draws = 200_000;
    for (k, (n, phi)) in [3, 4, 5]
        .into_iter()
        .flat_map(|n| [0.3, 0.7, 0.95].map(|phi| (n, phi)))
        .enumerate()
    {
        let mut rng = seed::rng(21, tags::SAMPLE, k as u64);
        let m = MallowsModel::new(phi, random_perm(n, &mut rng)).unwrap();
        let pmf = enumerate_pmf(&m).unwrap();
        let mut counts = vec![0u64; pmf.probs.len()];
        for _ in 0..draws {
            counts[lex_index(&m.sample(&mut rng))] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .zip(&pmf.probs)
            .map(|(&c, &p)| {
                let e = p * draws as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let df = (pmf.probs.len() - 1) as f64;
        assert!(chi2 < df + 6.0 * (2.0 * df).sqrt(), "n={n} phi={phi}: chi2 {chi2:.1} with {df} dof");
    }
}

#[test]
fn front_adjustment_projections_have_light_tails() {
    let (n, phi, s) = (20, 0.8, 20_000);
    let mut rng = seed::rng(22, tags::SAMPLE, 0);
    let central = random_perm(n, &mut rng);
    let m = MallowsModel::new(phi, central.clone()).unwrap();
    let fronts: Vec<Vec<f64>> = (0..s)
        .map(|_| {
            let p = m.sample(&mut rng);
            adjustment_vectors(&p, &central).unwrap().front.iter().map(|&x| x as f64).collect()
        })
        .collect();
    let mean: Vec<f64> = (0..n).map(|i| fronts.iter().map(|f| f[i]).sum::<f64>() / s as f64).collect();
    for _ in 0..5 {
        let dir = unit_direction(n, &mut rng);
        for t in [2.0, 5.0, 10.0] {
            let over = fronts
                .iter()
                .filter(|f| {
                    let proj: f64 = f.iter().zip(&mean).zip(&dir).map(|((x, m), d)| (x - m) * d).sum();
                    proj.abs() >= t / (1.0 - phi)
                })
                .count();
            assert!(over as f64 / s as f64 <= 4.0 * (-0.2 * t).exp(), "t={t}: {over} of {s}");
        }
    }
}

#[test]
fn filter_removes_planted_cluster() {
    let (d, s, eps) = (10, 20_000, 0.05);
    let mut rng = seed::rng(23, tags::SAMPLE, 0);
    let mut data: Vec<f64> = (0..s * d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let dir = unit_direction(d, &mut rng);
    for i in rand::seq::index::sample(&mut rng, s, (eps * s as f64) as usize) {
        for (x, u) in data[i * d..(i + 1) * d].iter_mut().zip(&dir) {
            *x = 100.0 * u;
        }
    }
    let points = PointMatrix::new(s, d, data).unwrap();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let report = robust_mean_bounded_cov(&points, eps, 1.0, &FilterSettings::default()).unwrap();
    assert!(norm(&points.mean()) > 4.0);
    assert!(norm(&report.estimate) < 10.0 * eps.sqrt(), "{}", norm(&report.estimate));
}
