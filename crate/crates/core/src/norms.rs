//! Squared Bergman norms of simple partial fractions `Σ_k (z − e^{iθ_k})^{−N}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interaction::{self, coefficient_model, Interaction, SpaceParams};
use crate::quadrature;
use crate::special::{factorial, falling_factorial, gamma_quotient, ln_gamma, zeta_real};
use crate::trig_series::{angle_gap, reduce_angle, ValueWithError};

/// Smallest admissible gap between two poles.
pub const MIN_POLE_GAP: f64 = 1e-9;

/// Pole angles on the unit circle, reduced to `[0, 2π)` and sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleConfig {
    angles: Vec<f64>,
}

impl CircleConfig {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return domain("a configuration needs at least one pole");
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return domain("pole angles must be finite");
        }
        let mut angles: Vec<f64> = angles.into_iter().map(reduce_angle).collect();
        angles.sort_by(f64::total_cmp);
        Ok(Self { angles })
    }

    /// The `n`-th roots of unity.
    pub fn equidistributed(n: usize) -> Result<Self> {
        Self::new(interaction::equidistributed_angles(n))
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Smallest circular distance between two poles (`+∞` for a single pole).
    pub fn min_gap(&self) -> f64 {
        let n = self.angles.len();
        if n < 2 {
            return f64::INFINITY;
        }
        let inner = self
            .angles
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        inner.min(self.angles[0] + TAU - self.angles[n - 1])
    }

    /// Rotate every pole by `shift`.
    pub fn rotated(&self, shift: f64) -> Self {
        Self::new(self.angles.iter().map(|a| a + shift).collect()).expect("finite angles")
    }

    fn require_distinct(&self) -> Result<()> {
        if self.min_gap() < MIN_POLE_GAP {
            return domain(format!(
                "poles closer than {MIN_POLE_GAP} collide; the configuration must have distinct poles"
            ));
        }
        Ok(())
    }
}

/// `‖z^s‖²_α = Γ(α+2)Γ(s+1)/Γ(s+α+2)`.
pub fn monomial_norm_sq(p: SpaceParams, s: u64) -> f64 {
    ln_gamma(p.alpha + 2.0).exp() * gamma_quotient(s as f64 + 1.0, p.alpha + 1.0)
}

/// `b_m` assembled from the monomial norm of `z^{m−N}`.
fn weighted_monomial(p: SpaceParams, m: u64) -> f64 {
    let n1 = p.degree - 1;
    let binom = falling_factorial(m as f64 - 1.0, n1) / factorial(n1);
    binom * binom * monomial_norm_sq(p, m - p.degree as u64)
}

/// Largest number of progression terms summed directly.
pub const PSI_TERM_CAP: usize = 1_000_000;

const PSI_REL_TOL: f64 = 1e-12;

/// Deterministic parallel sum of `f(lo..hi)`.
fn chunked_sum(lo: u64, hi: u64, f: impl Fn(u64) -> f64 + Sync) -> f64 {
    const CHUNK: u64 = 4096;
    if hi <= lo {
        return 0.0;
    }
    let chunks: Vec<u64> = (lo..hi).step_by(CHUNK as usize).collect();
    let partial: Vec<f64> = chunks
        .par_iter()
        .map(|&start| (start..(start + CHUNK).min(hi)).map(&f).rev().sum::<f64>())
        .collect();
    partial.iter().rev().sum()
}

/// `‖Ψ_n^N‖²_α` for the equidistributed configuration:
/// `n² Σ_{j≥1, nj≥N} b_{nj}`.
///
/// The progression is summed up to an adaptively chosen `J`. For the convex
/// decreasing remainder `f(j) = b_{nj}`, `Σ_{j>J} f(j) − ∫_{J+1}^∞ f − f(J+1)/2`
/// lies in `[0, −f'(J+1)/12]`; the midpoint is used and the half-width is
/// the error.
pub fn psi_norm_sq(p: SpaceParams, n: u64) -> Result<ValueWithError> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let model = coefficient_model(p, 0);
    let first_j = (p.degree as u64).div_ceil(n);
    let n2 = (n as f64) * (n as f64);
    if n == 1 {
        let head = weighted_monomial(p, p.degree as u64);
        let tail = model.tail_sum(p.degree as f64 + 1.0).expect("orders exceed one");
        let v = head + tail;
        return Ok(ValueWithError::new(v, 4.0 * f64::EPSILON * v));
    }
    let f = |j: f64| model.value(n as f64 * j);
    let beta = 2.0 / (p.decay_exponent() - 1.0);
    let mut last_j = (first_j + 63).max(64);
    loop {
        let start = (last_j + 1) as f64;
        let h = 1e-3 * start;
        let slope = (f(start + h) - f(start - h)) / (2.0 * h);
        let half_width = 1.01 * slope.abs() / 24.0;
        let head = chunked_sum(first_j, last_j + 1, |j| weighted_monomial(p, n * j));
        if half_width <= PSI_REL_TOL * head || last_j as usize >= PSI_TERM_CAP {
            // ∫_J^∞ f(t) dt with t = J u^{−β}
            let integrand = |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                f(start * u.powf(-beta)) * beta * start * u.powf(-beta - 1.0)
            };
            let integral = quadrature::integrate(integrand, 0.0, 1.0, 1e-15 * head, 4000)?;
            let tail = integral.value + 0.5 * f(start) - slope / 24.0;
            let value = n2 * (head + tail);
            let err = n2 * (half_width + integral.err) + 8.0 * f64::EPSILON * value;
            if err > 1e-6 * value {
                return Err(Error::NonConvergence {
                    what: format!("norm of the equidistributed {n}-point configuration"),
                    achieved: err,
                });
            }
            return Ok(ValueWithError::new(value, err));
        }
        last_j = (last_j * 2).min(PSI_TERM_CAP as u64);
    }
}

/// Default power-sum cutoff `max(4nN, 2000)`.
pub fn default_powersum_cap(p: SpaceParams, n: usize) -> usize {
    (4 * n * p.n()).max(2000)
}

/// `‖f‖² = Σ_{m≥N} b_m |p_m|²` with `p_m = Σ_k e^{imθ_k}` and
/// `b_m = ((m−1)_{N−1}/(N−1)!)² ‖z^{m−N}‖²`.
///
/// Terms up to `cap` (raised if needed to resolve the closest pair) are
/// summed directly. The remainder is split into pair contributions
/// `Σ_{m>cap} b_m cos(m(θ_j−θ_k))`, each resummed from the exact
/// coefficient model with a certified bound.
pub fn config_norm_sq_powersum(p: SpaceParams, c: &CircleConfig, cap: usize) -> Result<ValueWithError> {
    if cap + 1 < p.n() {
        return domain(format!("cap {cap} is below N − 1 = {}", p.degree - 1));
    }
    c.require_distinct()?;
    let angles = c.angles();
    let n = angles.len();
    let gap = c.min_gap().min(std::f64::consts::PI);
    let resolve = (40.0 / (2.0 * (0.5 * gap).sin())).ceil();
    let cap = if resolve.is_finite() {
        cap.max(resolve as usize).min(interaction::COEFFICIENT_CAP)
    } else {
        cap
    };
    let lo = p.degree as u64;
    let head = chunked_sum(lo, cap as u64 + 1, |m| {
        let ps: Complex64 = angles
            .iter()
            .map(|&t| {
                let (s, co) = (m as f64 * t).sin_cos();
                Complex64::new(co, s)
            })
            .sum();
        weighted_monomial(p, m) * ps.norm_sqr()
    });
    let model = coefficient_model(p, 0);
    let first = cap as u64 + 1;
    let diag = model.tail_sum(first as f64).expect("orders exceed one");
    let mut tail = ValueWithError::exact(n as f64 * diag);
    for j in 0..n {
        for k in j + 1..n {
            let delta = angles[k] - angles[j];
            let (t, bound) = model.oscillatory_tail(first, delta);
            let trivial = diag;
            tail = tail + if bound <= trivial {
                ValueWithError::new(2.0 * t.re, 2.0 * bound)
            } else {
                ValueWithError::new(0.0, 2.0 * trivial)
            };
        }
    }
    let value = head + tail.value;
    Ok(ValueWithError::new(value, tail.err + 16.0 * f64::EPSILON * value))
}

/// `Σ_{j≠k} φ(θ_j − θ_k)` using a prebuilt interaction function.
pub fn config_energy(phi: &Interaction, c: &CircleConfig) -> Result<ValueWithError> {
    c.require_distinct()?;
    let a = c.angles();
    let mut total = ValueWithError::exact(0.0);
    for j in 0..a.len() {
        for k in j + 1..a.len() {
            total = total + phi.value(a[k] - a[j]) * 2.0;
        }
    }
    Ok(total)
}

/// `E = Σ_{j≠k} φ(θ_j − θ_k)`; then `‖f‖² = n·φ(0) + E`.
pub fn config_energy_interaction(p: SpaceParams, c: &CircleConfig, tol: f64) -> Result<ValueWithError> {
    let phi = Interaction::from_series(interaction::build_series(p, tol)?);
    config_energy(&phi, c)
}

/// `lim n^{α+1−2N} ‖Ψ_n^N‖² = Γ(α+2) ζ(α+1−2(N−1)) / ((N−1)!)²`.
pub fn asymptotic_limit_constant(p: SpaceParams) -> Result<f64> {
    let nf = factorial(p.degree - 1);
    Ok(ln_gamma(p.alpha + 2.0).exp() * zeta_real(p.decay_exponent())? / (nf * nf))
}

/// One row of the scaled norm table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledNorm {
    pub n: u64,
    pub scaled: ValueWithError,
}

/// `n^{α+1−2N} ‖Ψ_n^N‖²` for each `n`.
pub fn scaled_norm_sequence(p: SpaceParams, ns: &[u64]) -> Result<Vec<ScaledNorm>> {
    let exponent = p.alpha + 1.0 - 2.0 * p.degree as f64;
    ns.iter()
        .map(|&n| {
            let v = psi_norm_sq(p, n)?;
            Ok(ScaledNorm {
                n,
                scaled: v * (n as f64).powf(exponent),
            })
        })
        .collect()
}

/// Whether two angles coincide on the circle up to `tol`.
pub fn same_angle(a: f64, b: f64, tol: f64) -> bool {
    angle_gap(a - b) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    fn p(n: u32, a: f64) -> SpaceParams {
        SpaceParams::new(n, a).unwrap()
    }

    #[test]
    fn config_normalises_angles() {
        let c = CircleConfig::new(vec![7.0, -1.0, 0.5]).unwrap();
        let a = c.angles();
        assert!(a.windows(2).all(|w| w[0] <= w[1]));
        assert!(a.iter().all(|&x| (0.0..TAU).contains(&x)));
        assert!(CircleConfig::new(vec![]).is_err());
        assert!(CircleConfig::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn min_gap_wraps() {
        let c = CircleConfig::new(vec![0.1, TAU - 0.1, 3.0]).unwrap();
        assert!((c.min_gap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn monomial_examples() {
        assert!((monomial_norm_sq(p(1, 7.3), 0) - 1.0).abs() < 1e-14);
        assert!((monomial_norm_sq(p(2, 3.0), 1) - 0.2).abs() < 1e-15);
        assert!((monomial_norm_sq(p(2, 3.0), 2) - 1.0 / 15.0).abs() < 1e-15);
        let q = p(2, 3.0);
        assert!((1..200).all(|s| monomial_norm_sq(q, s) < monomial_norm_sq(q, s - 1)));
    }

    #[test]
    fn weighted_monomial_is_series_coefficient() {
        for (n, a) in [(1u32, 1.0), (2, 3.0), (3, 5.5)] {
            let q = p(n, a);
            for m in [n as u64, 10, 1000] {
                let b = interaction::series_coefficient(q, m).unwrap();
                assert!(((weighted_monomial(q, m) - b) / b).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn psi_small_cases() {
        assert!((psi_norm_sq(p(2, 3.0), 1).unwrap().value - 6.0).abs() < 1e-12);
        assert!((psi_norm_sq(p(1, 1.0), 1).unwrap().value - 2.0).abs() < 1e-12);
        let v = psi_norm_sq(p(2, 3.0), 2).unwrap();
        assert!((v.value - (192.0 * LN_2 - 120.0)).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn energy_examples() {
        let q = p(2, 3.0);
        let two = CircleConfig::new(vec![0.0, PI]).unwrap();
        let e = config_energy_interaction(q, &two, 1e-10).unwrap();
        assert!((e.value - (192.0 * LN_2 - 132.0)).abs() < 1e-9);
        let one = CircleConfig::new(vec![1.0]).unwrap();
        assert_eq!(config_energy_interaction(q, &one, 1e-10).unwrap().value, 0.0);
        let clash = CircleConfig::new(vec![1.0, 1.0]).unwrap();
        assert!(config_energy_interaction(q, &clash, 1e-10).is_err());
    }

    #[test]
    fn limit_constants() {
        assert!((asymptotic_limit_constant(p(2, 3.0)).unwrap() - 4.0 * PI * PI).abs() < 1e-11);
        assert!((asymptotic_limit_constant(p(1, 1.0)).unwrap() - PI * PI / 3.0).abs() < 1e-12);
        let z3 = zeta_real(3.0).unwrap();
        assert!((asymptotic_limit_constant(p(2, 4.0)).unwrap() - 120.0 * z3).abs() < 1e-10);
    }

    #[test]
    fn powersum_matches_psi() {
        let q = p(2, 3.0);
        let two = CircleConfig::equidistributed(2).unwrap();
        let v = config_norm_sq_powersum(q, &two, default_powersum_cap(q, 2)).unwrap();
        assert!((v.value - (192.0 * LN_2 - 120.0)).abs() < 1e-9, "{v:?}");
        let single = CircleConfig::new(vec![0.0]).unwrap();
        let v = config_norm_sq_powersum(q, &single, 2000).unwrap();
        assert!(((v.value - 6.0) / 6.0).abs() < 1e-9);
    }
}
