mod common;

use std::f64::consts::FRAC_PI_2;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sectorlab::gaussian::{arg_mod_quarter, canonicalize, gaussian_primes_by_norm, rough_weights, RoughNumberFilter};
use sectorlab::sector::{
    covered_measure, exact_window_variance, pair_proximity_sum, sector_count_bound_check, window_sum, window_sum_exact,
    SectorWindow, WeightedPoint, WeightedPointSet,
};
use sectorlab::GaussianInt;

fn prime_set(x: u64, eta: f64) -> WeightedPointSet {
    let hi = ((1.0 + eta) * x as f64) as u64;
    let points = gaussian_primes_by_norm(x, hi)
        .unwrap()
        .into_iter()
        .map(|z| WeightedPoint { z, weight: Ratio::new(1, z.norm() as u64) })
        .collect();
    WeightedPointSet::new(points, x, "primes").unwrap()
}

fn reflected(set: &WeightedPointSet) -> WeightedPointSet {
    let points = set
        .points
        .iter()
        .map(|p| WeightedPoint { z: canonicalize(p.z.conj()).unwrap().value, weight: p.weight })
        .collect();
    WeightedPointSet::new(points, set.x, "reflected").unwrap()
}

#[test]
fn variance_matches_monte_carlo() {
    let filter = RoughNumberFilter::new(&[], 10_000).unwrap();
    let set = WeightedPointSet::new(rough_weights(&filter, 10_000, 0.3).unwrap(), 10_000, "rough").unwrap();
    let width = 0.05;
    let report = exact_window_variance(&set, width).unwrap();
    let mu = width / FRAC_PI_2 * set.total_weight();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 20_000;
    let samples: Vec<f64> = (0..n)
        .map(|_| {
            let theta = rng.gen_range(0.0..FRAC_PI_2);
            let s = window_sum(&set, SectorWindow::new(theta, width).unwrap());
            FRAC_PI_2 * (s - mu) * (s - mu)
        })
        .collect();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!((report.variance - mean).abs() <= 4.0 * se, "{} vs {mean} ± {se}", report.variance);
    assert!((report.mean_window_sum - mu).abs() <= 1e-12 * mu.max(1.0));
}

#[test]
fn single_point_variance_closed_form() {
    for &((a, b), num, den, width) in &[((3i64, 1i64), 1u64, 7u64, 0.1), ((1, 0), 2, 1, 0.7), ((5, 5), 3, 4, 1.2)] {
        let set = WeightedPointSet::new(
            vec![WeightedPoint { z: GaussianInt::new(a, b), weight: Ratio::new(num, den) }],
            10,
            "one",
        )
        .unwrap();
        let w = num as f64 / den as f64;
        let expect = w * w * width * (1.0 - width / FRAC_PI_2);
        let got = exact_window_variance(&set, width).unwrap().variance;
        assert!((got - expect).abs() <= 1e-14 * expect.max(1.0), "{got} vs {expect}");
    }
}

#[test]
fn covered_measure_against_grid() {
    let set = prime_set(5000, 0.05);
    let args = set.args();
    for &width in &[1e-4, 3e-3, 2e-2] {
        let m = covered_measure(&set, width);
        assert!(m <= FRAC_PI_2.min(set.len() as f64 * width) + 1e-15);
        let grid = 200_000;
        let hit = (0..grid)
            .filter(|&i| {
                let theta = (i as f64 + 0.5) * FRAC_PI_2 / grid as f64;
                let win = SectorWindow::new(theta, width).unwrap();
                args.iter().any(|&a| win.contains(a))
            })
            .count();
        let approx = hit as f64 / grid as f64 * FRAC_PI_2;
        let cell = FRAC_PI_2 / grid as f64;
        assert!((m - approx).abs() <= 2.0 * set.len() as f64 * cell, "width {width}: {m} vs {approx}");
    }
    let empty = WeightedPointSet::new(Vec::new(), 10, "none").unwrap();
    assert_eq!(covered_measure(&empty, 0.1), 0.0);
    let single =
        WeightedPointSet::new(vec![WeightedPoint { z: GaussianInt::new(2, 1), weight: Ratio::new(1, 5) }], 10, "one")
            .unwrap();
    assert!((covered_measure(&single, 0.3) - 0.3).abs() < 1e-15);
}

#[test]
fn pair_sum_matches_double_loop() {
    let x = 100_000u64;
    let eta = 0.2;
    let set = prime_set(x, eta);
    let log_x = (x as f64).ln();
    let t = (x as f64 / (20.0 * log_x)).floor() as u64;
    let pts: Vec<(GaussianInt, f64)> = set.points.iter().map(|p| (p.z, 1.0 / p.z.norm() as f64)).collect();
    let fast = pair_proximity_sum(&set, t).unwrap().value;
    let slow = common::brute_pair_sum(&pts, t);
    assert!((fast - slow).abs() <= 1e-12 * slow, "{fast} vs {slow}");
    assert!(fast <= 8.0 * eta * eta / (log_x * log_x), "{fast}");
    let diagonal: f64 = pts.iter().map(|p| p.1 * p.1).sum::<f64>() * t as f64;
    assert!(fast >= diagonal * (1.0 - 1e-12));
}

#[test]
fn pair_sum_ignores_order() {
    let set = prime_set(20_000, 0.3);
    let base = pair_proximity_sum(&set, 200).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let mut shuffled = set.clone();
        shuffled.points.shuffle(&mut rng);
        let again = pair_proximity_sum(&shuffled, 200).unwrap();
        assert_eq!(again.value.to_bits(), base.value.to_bits());
        assert_eq!(again.pairs, base.pairs);
    }
}

#[test]
fn windows_partition_the_total() {
    let set = prime_set(30_000, 0.1);
    for m in [1usize, 7, 64, 1000] {
        let top = f64::from_bits(FRAC_PI_2.to_bits() - 1);
        let cuts: Vec<f64> = (0..m).map(|j| j as f64 * FRAC_PI_2 / m as f64).chain([top]).collect();
        let mut sum = BigRational::zero();
        for c in cuts.windows(2) {
            sum += window_sum_exact(&set, SectorWindow::new(c[0], c[1] - c[0]).unwrap());
        }
        assert_eq!(sum, set.total_weight_exact(), "m = {m}");
    }
}

#[test]
fn reflection_preserves_statistics() {
    let set = prime_set(50_000, 0.1);
    let mirror = reflected(&set);
    for &width in &[0.003, 0.05] {
        let a = exact_window_variance(&set, width).unwrap().variance;
        let b = exact_window_variance(&mirror, width).unwrap().variance;
        assert!((a - b).abs() <= 1e-10 * a, "{a} vs {b}");
        let ca = covered_measure(&set, width);
        let cb = covered_measure(&mirror, width);
        assert!((ca - cb).abs() <= 1e-12);
    }
    assert_eq!(pair_proximity_sum(&set, 300).unwrap().pairs, pair_proximity_sum(&mirror, 300).unwrap().pairs);
}

fn brute_sector_count(n: GaussianInt, big_n: i64, v: f64) -> u64 {
    let target = arg_mod_quarter(n).unwrap();
    let limit = v / big_n as f64;
    let r = (big_n as f64).sqrt() as i64 + 1;
    let mut count = 0;
    for a in -r..=r {
        for b in -r..=r {
            if a * a + b * b > big_n || (a == 0 && b == 0) {
                continue;
            }
            let d = common::circular_distance(arg_mod_quarter(GaussianInt::new(a, b)).unwrap(), target);
            if d > 0.0 && d < limit {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn sector_count_matches_lattice_walk() {
    let n = GaussianInt::new(3, 4);
    assert_eq!(sector_count_bound_check(n, 100, 10.0).unwrap().count, brute_sector_count(n, 100, 10.0));
    for &(a, b, big_n, v) in &[(7i64, 2i64, 2000i64, 30.0), (1, 0, 500, 4.5), (12, 5, 5000, 17.0)] {
        let n = GaussianInt::new(a, b);
        assert_eq!(
            sector_count_bound_check(n, big_n as u64, v).unwrap().count,
            brute_sector_count(n, big_n, v),
            "{n} N={big_n} v={v}"
        );
    }
    for v in [1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let r = sector_count_bound_check(n, 10_000, v).unwrap();
        assert!(r.ratio <= 20.0, "v = {v}: {}", r.ratio);
    }
    assert!(sector_count_bound_check(GaussianInt::new(100, 1), 100, 1.0).is_err());
}

#[test]
fn weights_round_trip_exactly() {
    let set = prime_set(1000, 0.5);
    let exact = set.total_weight_exact();
    let direct: BigRational = set
        .points
        .iter()
        .map(|p| BigRational::new(BigInt::from(1), BigInt::from(p.z.norm() as u64)))
        .fold(BigRational::zero(), |a, b| a + b);
    assert_eq!(exact, direct);
}
