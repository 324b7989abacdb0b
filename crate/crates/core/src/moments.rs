//! Power sums of unimodular configurations and the moment-constrained set
//! `W_n = {n distinct points with p_m = 0 for m = 1..N²−2}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::interaction::{Interaction, SpaceParams};
use crate::norms::{config_energy, CircleConfig, MIN_POLE_GAP};

/// Default moment tolerance for membership in `W_n`.
pub const MOMENT_TOL: f64 = 1e-9;

/// `p_s = Σ_k e^{isθ_k}` for `s = 1..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSums {
    pub values: Vec<Complex64>,
}

impl PowerSums {
    /// `p_s` for `s ≥ 1`.
    pub fn get(&self, s: usize) -> Complex64 {
        self.values[s - 1]
    }
}

pub fn power_sums(c: &CircleConfig, m: usize) -> Result<PowerSums> {
    if m == 0 {
        return domain("need at least one power sum");
    }
    let values = (1..=m)
        .map(|s| {
            c.angles()
                .iter()
                .map(|&t| {
                    let (sn, cs) = (s as f64 * t).sin_cos();
                    Complex64::new(cs, sn)
                })
                .sum()
        })
        .collect();
    Ok(PowerSums { values })
}

/// Number of vanishing moments required for degree `N`.
pub fn moment_count(n_degree: u32) -> usize {
    (n_degree * n_degree) as usize - 2
}

/// Distinct points with `|p_m| ≤ tol` for `m = 1..N²−2`.
pub fn in_wn(c: &CircleConfig, n_degree: u32, tol: f64) -> Result<bool> {
    if n_degree < 2 {
        return domain("W_n is defined for N ≥ 2");
    }
    if c.min_gap() < MIN_POLE_GAP {
        return Ok(false);
    }
    let ps = power_sums(c, moment_count(n_degree))?;
    Ok(ps.values.iter().all(|p| p.norm() <= tol))
}

/// Smallest divisor `q` of `n` with `q ≥ N² − 1`.
pub fn structured_polygon_size(n: usize, n_degree: u32) -> Option<usize> {
    let min_q = (n_degree * n_degree) as usize - 1;
    (min_q.max(1)..=n).find(|q| n.is_multiple_of(*q))
}

const MAX_RESAMPLES: usize = 100;

/// Union of `n/q` independently rotated regular `q`-gons with `q` the
/// smallest admissible divisor of `n`.
pub fn sample_wn_structured(n: usize, n_degree: u32, seed: u64) -> Result<CircleConfig> {
    if n_degree < 2 {
        return domain("W_n is defined for N ≥ 2");
    }
    let q = structured_polygon_size(n, n_degree).ok_or_else(|| {
        Error::Domain(format!(
            "n = {n} has no divisor q ≥ N² − 1 = {}",
            n_degree * n_degree - 1
        ))
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESAMPLES {
        let mut angles = Vec::with_capacity(n);
        for _ in 0..n / q {
            let shift = rng.gen_range(0.0..TAU / q as f64);
            angles.extend((0..q).map(|k| shift + TAU * k as f64 / q as f64));
        }
        let c = CircleConfig::new(angles)?;
        if c.min_gap() >= MIN_POLE_GAP {
            return Ok(c);
        }
    }
    Err(Error::NonConvergence {
        what: format!("distinct structured sample after {MAX_RESAMPLES} draws"),
        achieved: 0.0,
    })
}

/// `Σ_{j≠k} cos(m(θ_j − θ_k))`, computed pairwise.
pub fn pair_cosine_sum(c: &CircleConfig, m: usize) -> f64 {
    let a = c.angles();
    let mut s = 0.0;
    for j in 0..a.len() {
        for k in j + 1..a.len() {
            s += 2.0 * (m as f64 * (a[j] - a[k])).cos();
        }
    }
    s
}

/// Energy of a constrained configuration against equidistribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentCheck {
    pub energy: f64,
    pub equi_energy: f64,
    pub holds: bool,
    /// Largest `|Σ_{j≠k} cos(m(θ_j−θ_k)) + n|` over the constrained `m`.
    pub pair_cosine_residual: f64,
}

/// Check that a configuration in `W_n` has energy at least that of the
/// `n`-th roots of unity at the critical exponent.
pub fn thm14_verify(p: SpaceParams, c: &CircleConfig) -> Result<MomentCheck> {
    let phi = Interaction::new(p)?;
    thm14_verify_with(&phi, c)
}

pub fn thm14_verify_with(phi: &Interaction, c: &CircleConfig) -> Result<MomentCheck> {
    let p = phi.params();
    if p.alpha != p.critical_alpha() {
        return domain(format!("the moment check needs α = 2N − 1, got {}", p.alpha));
    }
    if !in_wn(c, p.degree, MOMENT_TOL)? {
        return domain("configuration is not in W_n");
    }
    let n = c.len();
    let energy = config_energy(phi, c)?.value;
    let equi_energy = config_energy(phi, &CircleConfig::equidistributed(n)?)?.value;
    let pair_cosine_residual = (1..=moment_count(p.degree))
        .map(|m| (pair_cosine_sum(c, m) + n as f64).abs())
        .fold(0.0, f64::max);
    Ok(MomentCheck {
        energy,
        equi_energy,
        holds: energy >= equi_energy - 1e-9,
        pair_cosine_residual,
    })
}

/// Both sides of `Σ_{s=1}^{2nN} |p_s|² ≥ n(2nN − n + 1)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSumBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn powersum_lower_bound_check(c: &CircleConfig, n_degree: u32) -> Result<PowerSumBound> {
    if n_degree == 0 {
        return domain("N must be at least 1");
    }
    let n = c.len();
    let m = 2 * n * n_degree as usize;
    let lhs = power_sums(c, m)?.values.iter().map(|p| p.norm_sqr()).sum();
    let rhs = n as f64 * (m as f64 - n as f64 + 1.0) / 2.0;
    Ok(PowerSumBound {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-9,
    })
}
