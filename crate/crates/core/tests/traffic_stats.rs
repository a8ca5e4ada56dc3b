//! Statistical checks of the degree sampler and the traffic generator.

use crdsa::traffic::ArrivalProcess;
use crdsa::{next_frame_start, place_fb, place_sw, DegreeDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn degree_sample_mean_within_three_standard_errors() {
    let dists = [
        DegreeDistribution::regular(2).unwrap(),
        DegreeDistribution::irsa8(),
        "0.5x^2+0.5x^3".parse().unwrap(),
        "0.25x+0.25x^4+0.5x^16".parse().unwrap(),
    ];
    let n = 1_000_000;
    for (k, d) in dists.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let x = f64::from(d.sample(rng.random()));
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        let var: f64 = d.terms().iter().map(|&(l, p)| p * (f64::from(l) - d.mean_degree()).powi(2)).sum();
        let se = (var / n as f64).sqrt();
        assert!((mean - d.mean_degree()).abs() <= 3.0 * se.max(1e-12), "{d}: {mean}");
        assert!((sq / n as f64 - mean * mean - var).abs() < 0.05 * var.max(1e-3), "{d}");
    }
}

#[test]
fn regular_mean_is_exact() {
    for l in 1..=16 {
        assert_eq!(DegreeDistribution::regular(l).unwrap().mean_degree(), f64::from(l));
    }
}

#[test]
fn poisson_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in [0.1, 0.5, 1.0, 3.0] {
        let p = ArrivalProcess::new(g).unwrap();
        let n = 400_000;
        let draws: Vec<u64> = (0..n).map(|_| p.draw(&mut rng)).collect();
        let mean = draws.iter().sum::<u64>() as f64 / n as f64;
        let zeros = draws.iter().filter(|&&c| c == 0).count() as f64 / n as f64;
        assert!((mean - g).abs() < 4.0 * (g / n as f64).sqrt(), "{g}: {mean}");
        let p0 = (-g).exp();
        assert!((zeros - p0).abs() < 4.0 * (p0 * (1.0 - p0) / n as f64).sqrt(), "{g}: {zeros}");
    }
    let idle = ArrivalProcess::new(0.0).unwrap();
    assert!((0..1000).all(|_| idle.draw(&mut rng) == 0));
}

fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let e = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum()
}

// 99.9% quantile of chi-square with 199 and 198 degrees of freedom is about 272.
const CHI2_LIMIT: f64 = 275.0;

#[test]
fn frame_placement_is_uniform_within_the_next_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 200;
    let mut counts = vec![0u64; n as usize];
    for i in 0..100_000u64 {
        let ready = rng.random_range(0..10 * n);
        let start = next_frame_start(ready, n);
        assert!(start > ready && start - ready <= n);
        assert_eq!(start % n, 0);
        let p = place_fb(i, 3, start, n, &mut rng).unwrap();
        assert_eq!(p.degree(), 3);
        for &s in &p.slots {
            assert!((start..start + n).contains(&s));
            counts[(s - start) as usize] += 1;
        }
    }
    assert!(chi_square(&counts) < CHI2_LIMIT, "{}", chi_square(&counts));
}

#[test]
fn sliding_placement_is_uniform_after_the_first_copy() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = 200;
    let mut counts = vec![0u64; (w - 1) as usize];
    for i in 0..100_000u64 {
        let ready = rng.random_range(0..1_000_000);
        let p = place_sw(i, 3, ready, w, &mut rng).unwrap();
        assert_eq!(p.first_slot(), ready + 1);
        assert!(p.last_slot() <= ready + w);
        for &s in &p.slots[1..] {
            counts[(s - ready - 2) as usize] += 1;
        }
    }
    assert!(chi_square(&counts) < CHI2_LIMIT, "{}", chi_square(&counts));
}
