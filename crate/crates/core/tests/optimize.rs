use std::f64::consts::{PI, TAU};

use bergfrac::interaction::{stationarity_n2a3, Interaction};
use bergfrac::norms::config_energy;
use bergfrac::optimize::{
    brent_min, brent_root, energy_gradient, energy_gradient_with, local_descent, npoint_minimize_with,
    random_start, two_point_minimize, two_point_minimize_with, DescentOptions,
};
use bergfrac::{CircleConfig, SpaceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(n: u32, a: f64) -> SpaceParams {
    SpaceParams::new(n, a).unwrap()
}

#[test]
fn stationarity_root_and_minimum_agree() {
    let root = brent_root(stationarity_n2a3, 0.5, 1.5, 1e-15).unwrap();
    assert!((root - 0.9198141).abs() < 1e-7, "{root}");
    let phi = Interaction::new(p(2, 3.0)).unwrap();
    let (x, fx) = brent_min(|t| phi.value(t).value, 0.1, PI, 1e-10).unwrap();
    assert!((x - root).abs() < 1e-7);
    assert!((fx + 1.14963).abs() < 5e-6);
}

#[test]
fn two_point_counterexample() {
    let r = two_point_minimize(p(2, 3.0)).unwrap();
    let theta = r.config.angles()[1];
    assert!((theta - 0.91981).abs() < 1e-5);
    assert!((r.energy + 2.29926).abs() < 1e-5);
    assert!(r.below_equidistribution);
    assert!(r.energy < r.equidistribution_energy);
}

#[test]
fn two_point_n1_is_antipodal() {
    let r = two_point_minimize(p(1, 1.0)).unwrap();
    assert!((r.config.angles()[1] - PI).abs() < 1e-6);
    assert!(!r.below_equidistribution);
}

#[test]
fn two_point_beats_fine_grid() {
    let phi = Interaction::new(p(2, 3.0)).unwrap();
    let r = two_point_minimize_with(&phi).unwrap();
    let grid_min = (1..=100_000)
        .map(|k| 2.0 * phi.value(PI * k as f64 / 100_000.0).value)
        .fold(f64::INFINITY, f64::min);
    assert!(r.energy <= grid_min + 1e-12);
    assert!(r.energy >= grid_min - 1e-8);
}

#[test]
fn multistart_matches_brent_for_two_points() {
    let phi = Interaction::new(p(2, 3.0)).unwrap();
    let brent = two_point_minimize_with(&phi).unwrap();
    let multi = npoint_minimize_with(&phi, 2, 64, 17).unwrap();
    assert!((multi.energy - brent.energy).abs() <= 1e-6);
    assert_eq!(multi.config.angles()[0], 0.0);
}

#[test]
fn three_point_counterexample() {
    let phi = Interaction::new(p(2, 3.0)).unwrap();
    let r = npoint_minimize_with(&phi, 3, 64, 1).unwrap();
    let big_phi = |t: f64| 2.0 * (2.0 * phi.value(t).value + phi.value(2.0 * t).value);
    assert!(r.energy <= big_phi(PI / 6.0) + 1e-9);
    assert!(r.equidistribution_energy - r.energy >= 1.0);
    assert!((r.equidistribution_energy - big_phi(2.0 * PI / 3.0)).abs() < 1e-9);
}

#[test]
fn n1_recovers_equidistribution() {
    let phi = Interaction::new(p(1, 1.0)).unwrap();
    for n in [4usize, 5] {
        let r = npoint_minimize_with(&phi, n, 32, 3).unwrap();
        assert!((r.energy - r.equidistribution_energy).abs() < 1e-6);
        assert!(!r.below_equidistribution);
        for (k, a) in r.config.angles().iter().enumerate() {
            assert!((a - TAU * k as f64 / n as f64).abs() < 1e-4, "{:?}", r.config);
        }
    }
}

#[test]
fn seeds_agree_on_small_problems() {
    let phi = Interaction::new(p(2, 3.0)).unwrap();
    for n in 2..=4 {
        let a = npoint_minimize_with(&phi, n, 64, 1).unwrap();
        let b = npoint_minimize_with(&phi, n, 64, 99).unwrap();
        assert!((a.energy - b.energy).abs() <= 1e-7, "n={n}: {} vs {}", a.energy, b.energy);
    }
}

#[test]
fn runs_are_reproducible() {
    let phi = Interaction::new(p(2, 3.0)).unwrap();
    let a = npoint_minimize_with(&phi, 4, 16, 5).unwrap();
    let b = npoint_minimize_with(&phi, 4, 16, 5).unwrap();
    assert_eq!(a, b);
}

#[test]
fn descent_is_monotone() {
    let phi = Interaction::new(p(2, 3.0)).unwrap();
    for i in 0..8 {
        let run = local_descent(&phi, &random_start(5, 11, i), DescentOptions::default()).unwrap();
        assert!(run.trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(run.angles[0], 0.0);
    }
}

#[test]
fn gradient_vanishes_by_symmetry() {
    for n in [2usize, 3, 5, 8] {
        let g = energy_gradient(p(2, 3.0), &CircleConfig::equidistributed(n).unwrap()).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-6), "n={n}: {g:?}");
    }
    let c = CircleConfig::new(vec![0.0, 0.9198141089]).unwrap();
    let g = energy_gradient(p(2, 3.0), &c).unwrap();
    assert!(g[1].abs() < 1e-5);
}

#[test]
fn gradient_matches_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let phis = [Interaction::new(p(2, 3.0)).unwrap(), Interaction::new(p(3, 6.0)).unwrap()];
    for trial in 0..50 {
        let phi = &phis[trial % 2];
        let n = rng.gen_range(2..=6);
        let c = loop {
            let c = CircleConfig::new((0..n).map(|_| rng.gen_range(0.0..TAU)).collect()).unwrap();
            if c.min_gap() > 0.05 {
                break c;
            }
        };
        let g = energy_gradient_with(phi, c.angles()).unwrap();
        let h = 1e-5;
        for j in 0..n {
            let shifted = |d: f64| {
                let mut a = c.angles().to_vec();
                a[j] += d;
                config_energy(phi, &CircleConfig::new(a).unwrap()).unwrap().value
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let scale = g[j].abs().max(1.0);
            assert!((g[j] - fd).abs() <= 1e-5 * scale, "trial {trial} j={j}: {} vs {fd}", g[j]);
        }
    }
}
