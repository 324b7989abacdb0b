//! Shared fixtures for the benchmarks.

use bergfrac::SpaceParams;

/// Parameter sets exercised by the benchmarks: the counterexample case, a
/// slowly decaying case near the membership boundary and a higher degree.
pub fn fixtures() -> Vec<(&'static str, SpaceParams)> {
    vec![
        ("n2_a3", SpaceParams::new(2, 3.0).expect("valid")),
        ("n2_a2.5", SpaceParams::new(2, 2.5).expect("valid")),
        ("n3_a5", SpaceParams::new(3, 5.0).expect("valid")),
    ]
}

/// Angles spread over `(0, 2π)` avoiding the origin.
pub fn sample_angles(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| std::f64::consts::TAU * k as f64 / (count + 1) as f64)
        .collect()
}
