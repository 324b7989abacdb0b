//! The interaction function `φ_{α,N}(θ)`: the real part of the Bergman inner
//! product of two degree-`N` single-pole fractions whose poles sit at angular
//! distance `θ` on the unit circle.
//!
//! Three independent evaluation routes are provided:
//!
//! * the cosine series `Σ_{m≥N} b_m cos(mθ)` with an exact coefficient model
//!   for the tail (see [`crate::trig_series`]),
//! * a radial integral over `r ∈ [0,1]` of the Poisson-like kernel `U_N`,
//! * for `N = 2, α = 3`, the logarithmic form and the closed-form derivative.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature;
use crate::sequences;
use crate::special::{beta_unchecked, factorial, falling_factorial, ln_gamma};
use crate::trig_series::{angle_gap, poly_mul, reduce_angle, GammaRatioModel, ModelSeries, Trig, ValueWithError};

/// Degree `N` of the partial fraction and the weight exponent `α` of `(1−|z|²)^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub degree: u32,
    pub alpha: f64,
}

impl SpaceParams {
    /// Validates `N ≥ 1` and the membership condition `α > 2(N−1)`.
    pub fn new(degree: u32, alpha: f64) -> Result<Self> {
        if degree == 0 {
            return domain("degree N must be at least 1");
        }
        if !alpha.is_finite() || alpha <= 2.0 * (degree as f64 - 1.0) {
            return domain(format!(
                "α = {alpha} violates the membership condition α > 2(N−1) = {}",
                2 * (degree - 1)
            ));
        }
        Ok(Self { degree, alpha })
    }

    /// Normalisation constant `k_α = α + 1`.
    pub fn k_alpha(&self) -> f64 {
        self.alpha + 1.0
    }

    /// Critical exponent `α* = 2N − 1` for this degree.
    pub fn critical_alpha(&self) -> f64 {
        2.0 * self.degree as f64 - 1.0
    }

    /// Decay exponent of the coefficients: `b_m ≍ m^{−(α+3−2N)}`.
    pub fn decay_exponent(&self) -> f64 {
        self.alpha + 3.0 - 2.0 * self.degree as f64
    }

    pub(crate) fn n(&self) -> usize {
        self.degree as usize
    }
}

/// `((m−1)_{N−1})² · Γ(x)/Γ(x+α+1)` scaled by `Γ(α+2)/((N−1)!)²`, as a
/// polynomial in `x = m − N + 1` times a gamma quotient; `power` multiplies
/// by `m^power`.
pub(crate) fn coefficient_model(p: SpaceParams, power: u32) -> GammaRatioModel {
    let n = p.n();
    // x^{(N−1)} = x(x+1)⋯(x+N−2), squared
    let mut rising = vec![1.0];
    for i in 0..n.saturating_sub(1) {
        rising = poly_mul(&rising, &[i as f64, 1.0]);
    }
    let mut poly = poly_mul(&rising, &rising);
    for _ in 0..power {
        // m = x + N − 1
        poly = poly_mul(&poly, &[n as f64 - 1.0, 1.0]);
    }
    let nf = factorial(p.degree - 1);
    let scale = (ln_gamma(p.alpha + 2.0)).exp() / (nf * nf);
    GammaRatioModel::from_polynomial(&poly, 1.0 - n as f64, scale, p.alpha + 1.0)
}

/// The cosine coefficient
/// `b_m = k_α/((N−1)!)² · ((m−1)_{N−1})² · B(m−N+1, α+1)` for `m ≥ N`.
pub fn series_coefficient(p: SpaceParams, m: u64) -> Result<f64> {
    if (m as usize) < p.n() {
        return domain(format!("coefficient index m = {m} below N = {}", p.degree));
    }
    Ok(coefficient_unchecked(p, m))
}

fn coefficient_unchecked(p: SpaceParams, m: u64) -> f64 {
    let mf = m as f64;
    let n1 = p.degree - 1;
    let binom = falling_factorial(mf - 1.0, n1) / factorial(n1);
    p.k_alpha() * binom * binom * beta_unchecked(mf - n1 as f64, p.alpha + 1.0)
}

/// Smallest angular gap for which [`build_series`] guarantees its tolerance.
pub const RESOLVED_GAP: f64 = 1e-3;

/// Hard cap on the number of stored coefficients.
pub const COEFFICIENT_CAP: usize = 10_000_000;

/// Default construction tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Coefficients `b_N..b_M` of the interaction series together with the
/// exact value of the dropped mass `Σ_{m>M} b_m`.
#[derive(Debug, Clone)]
pub struct TruncatedCosineSeries {
    pub start: usize,
    pub coeffs: Vec<f64>,
    pub tail_bound: f64,
    params: SpaceParams,
    models: [GammaRatioModel; 3],
}

impl TruncatedCosineSeries {
    pub fn params(&self) -> SpaceParams {
        self.params
    }

    /// Index of the last stored coefficient.
    pub fn last_index(&self) -> usize {
        self.start + self.coeffs.len() - 1
    }

    /// Exact model of `m^power · b_m`, `power ∈ {0,1,2}`.
    pub fn model(&self, power: usize) -> &GammaRatioModel {
        &self.models[power]
    }

    fn view(&self, power: usize) -> ModelSeries<'_> {
        ModelSeries {
            head: &self.coeffs,
            start: self.start,
            power: power as i32,
            model: &self.models[power],
            model_from: self.start,
        }
    }

    /// `Σ_{m ≥ from} b_m cos(mθ)`, used to splice other heads onto this tail.
    pub fn tail_from(&self, from: usize, theta: f64) -> ValueWithError {
        let model = &self.models[0];
        let theta = reduce_angle(theta);
        if angle_gap(theta) == 0.0 {
            return ValueWithError::exact(model.tail_sum(from as f64).unwrap_or(f64::INFINITY));
        }
        let view = ModelSeries {
            head: &self.coeffs[from.saturating_sub(self.start)..],
            start: from.max(self.start),
            power: 0,
            model,
            model_from: from,
        };
        view.eval(theta, Trig::Cos)
    }
}

fn generate_coefficients(p: SpaceParams, last: usize) -> Vec<f64> {
    let n = p.n();
    let mut out = Vec::with_capacity(last + 1 - n);
    let mut b = coefficient_unchecked(p, n as u64);
    for m in n..=last {
        if m > n && (m - n).is_multiple_of(256) {
            b = coefficient_unchecked(p, m as u64);
        }
        out.push(b);
        // b_{m+1}/b_m = m² / ((m−N+1)(m−N+α+2))
        let mf = m as f64;
        let nf = n as f64;
        b *= mf * mf / ((mf - nf + 1.0) * (mf - nf + p.alpha + 2.0));
    }
    out
}

/// Build the interaction series so that evaluation is accurate to `tol` at
/// `θ = 0` and for every angle at least [`RESOLVED_GAP`] away from it.
///
/// The stored head grows by doubling until either the dropped mass is below
/// `tol` or the Euler-transformed tail is certified below `tol` at the
/// smallest resolved gap.
pub fn build_series(p: SpaceParams, tol: f64) -> Result<TruncatedCosineSeries> {
    if !(tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let models = [coefficient_model(p, 0), coefficient_model(p, 1), coefficient_model(p, 2)];
    let n = p.n();
    let mut last = 1024usize.max(4 * n * n);
    loop {
        let dropped = models[0].tail_sum((last + 1) as f64).unwrap_or(f64::INFINITY);
        let resolved = 2.0 * (0.5 * RESOLVED_GAP).sin() * last as f64 >= 40.0;
        let euler = if resolved {
            models[0].oscillatory_tail((last + 1) as u64, RESOLVED_GAP).1
        } else {
            f64::INFINITY
        };
        if dropped <= tol || euler <= tol {
            let coeffs = generate_coefficients(p, last);
            return Ok(TruncatedCosineSeries {
                start: n,
                coeffs,
                tail_bound: dropped,
                params: p,
                models,
            });
        }
        if last * 2 > COEFFICIENT_CAP {
            return Err(Error::NonConvergence {
                what: format!("interaction series for N={}, α={} within the coefficient cap", p.degree, p.alpha),
                achieved: dropped.min(euler),
            });
        }
        last *= 2;
    }
}

/// `φ(θ) = Σ_{m≥N} b_m cos(mθ)`.
pub fn phi_series(s: &TruncatedCosineSeries, theta: f64) -> ValueWithError {
    s.view(0).eval(theta, Trig::Cos)
}

/// `φ'(θ) = −Σ m b_m sin(mθ)`; the tail is resummed, so this converges for every `α > 2(N−1)`.
pub fn phi_series_prime(s: &TruncatedCosineSeries, theta: f64) -> ValueWithError {
    let v = s.view(1).eval(theta, Trig::Sin);
    ValueWithError::new(-v.value, v.err)
}

/// `φ''(θ) = −Σ m² b_m cos(mθ)` (Abel sense when `α ≤ 2N−1`).
pub fn phi_series_second(s: &TruncatedCosineSeries, theta: f64) -> ValueWithError {
    let v = s.view(2).eval(theta, Trig::Cos);
    ValueWithError::new(-v.value, v.err)
}

/// Minimum angular gap accepted by the radial quadrature.
pub const QUADRATURE_MIN_GAP: f64 = 1e-3;

/// `φ(θ)` from the radial integral
/// `k_α/(N−1)! ∫₀¹ U_N(r,θ) r^{N−1} (α)_{N−1} (1−r)^{α−N+1} dr`.
pub fn phi_quadrature(p: SpaceParams, theta: f64) -> Result<ValueWithError> {
    let theta = reduce_angle(theta);
    if angle_gap(theta) < QUADRATURE_MIN_GAP {
        return domain(format!(
            "θ = {theta} is within {QUADRATURE_MIN_GAP} of 0 mod 2π; use phi_series there"
        ));
    }
    let n = p.degree;
    let prefactor = p.k_alpha() / factorial(n - 1) * falling_factorial(p.alpha, n - 1);
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let e = Complex64::from_polar(1.0, theta);
    let sin_half = (0.5 * theta).sin();
    let exponent = p.alpha - n as f64 + 1.0;
    let integrand = |r: f64| {
        // w − 1 with w = r e^{iθ}; the real part is formed without cancellation
        let w_minus_1 = Complex64::new(-((1.0 - r) + 2.0 * r * sin_half * sin_half), r * theta.sin());
        let ratio = (e / w_minus_1).powu(n);
        sign * r.powi(n as i32 - 1) * ratio.re * (1.0 - r).powf(exponent)
    };
    let v = quadrature::integrate(integrand, 0.0, 1.0, 1e-12 / prefactor.max(1.0), 2000)?;
    Ok(v * prefactor)
}

/// `φ_{3,2}(θ) = 12 ∫₀¹ ln(1 + r² − 2r cos θ)(2 − 3r) dr`.
pub fn phi_closed_n2a3(theta: f64) -> Result<f64> {
    let theta = reduce_angle(theta);
    if angle_gap(theta) == 0.0 {
        return domain("the logarithmic form needs θ ∈ (0, 2π)");
    }
    let s2 = (0.5 * theta).sin().powi(2);
    let f = |r: f64| {
        let q = (1.0 - r) * (1.0 - r) + 4.0 * r * s2;
        q.ln() * (2.0 - 3.0 * r)
    };
    Ok(12.0 * quadrature::integrate(f, 0.0, 1.0, 1e-14, 2000)?.value)
}

/// `sin θ · ∫₀¹ (2r − 3r²)/(1 + r² − 2r cos θ) dr` in closed form, i.e.
/// `φ'_{3,2}(θ)/24`. Its zero in `(0, π)` is the two-point minimiser.
///
/// The arctangent term simplifies on `(0, 2π)`:
/// `arctan((1+cos θ)/sin θ) = (π − θ)/2`.
pub fn stationarity_n2a3(theta: f64) -> f64 {
    let theta = reduce_angle(theta);
    let (s, c) = theta.sin_cos();
    let log_term = (4.0 * (0.5 * theta).sin().powi(2)).ln();
    -3.0 * s + s * (1.0 - 3.0 * c) * log_term + (2.0 * c * (1.0 - 3.0 * c) + 3.0) * 0.5 * (PI - theta)
}

fn is_n2a3(p: SpaceParams) -> bool {
    p.degree == 2 && p.alpha == 3.0
}

/// `φ'(θ)` for `θ ∈ (0, 2π)`; closed form for `N=2, α=3`, resummed
/// termwise series otherwise.
pub fn phi_prime(p: SpaceParams, theta: f64) -> Result<ValueWithError> {
    let theta = reduce_angle(theta);
    if angle_gap(theta) == 0.0 {
        return domain("φ' is requested on (0, 2π)");
    }
    if is_n2a3(p) {
        return Ok(ValueWithError::new(24.0 * stationarity_n2a3(theta), 1e-13));
    }
    let s = build_series(p, DEFAULT_TOL)?;
    Ok(phi_series_prime(&s, theta))
}

/// `φ''_{α*,N}(θ)` at the critical exponent `α* = 2N − 1` from
/// `(2N)!/((N−1)!)² · (½ + Σ_{m<N} cos mθ + Σ_{m≥N} a_m cos mθ)`.
pub fn phi_second_derivative(p: SpaceParams, theta: f64) -> Result<ValueWithError> {
    if p.alpha != p.critical_alpha() {
        return domain(format!(
            "second-derivative decomposition needs α = 2N−1 = {}, got {}",
            p.critical_alpha(),
            p.alpha
        ));
    }
    let theta = reduce_angle(theta);
    if angle_gap(theta) == 0.0 {
        return domain("φ'' is requested on (0, 2π)");
    }
    let n = p.n();
    let nf = factorial(p.degree - 1);
    let scale = factorial(2 * p.degree) / (nf * nf);
    let head_last = (2.0 * 40.0 / RESOLVED_GAP) as usize;
    let seq = sequences::thm14_coefficients(p.degree, head_last)?;
    let model = sequences::thm14_model(p.degree);
    let view = ModelSeries {
        head: &seq.values()[n..],
        start: n,
        power: 0,
        model: &model,
        model_from: n,
    };
    let tail = view.eval(theta, Trig::Cos);
    let low: f64 = 0.5 + (1..n).map(|m| (m as f64 * theta).cos()).sum::<f64>();
    Ok(ValueWithError::new(scale * (low + tail.value), scale * tail.err))
}

/// Cached interaction function for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Interaction {
    series: TruncatedCosineSeries,
}

impl Interaction {
    pub fn new(p: SpaceParams) -> Result<Self> {
        Ok(Self { series: build_series(p, DEFAULT_TOL)? })
    }

    pub fn from_series(series: TruncatedCosineSeries) -> Self {
        Self { series }
    }

    pub fn params(&self) -> SpaceParams {
        self.series.params
    }

    pub fn series(&self) -> &TruncatedCosineSeries {
        &self.series
    }

    pub fn value(&self, theta: f64) -> ValueWithError {
        phi_series(&self.series, theta)
    }

    /// `φ(0)`, the squared norm of a single pole.
    pub fn at_zero(&self) -> ValueWithError {
        phi_series(&self.series, 0.0)
    }

    pub fn derivative(&self, theta: f64) -> ValueWithError {
        if is_n2a3(self.series.params) && angle_gap(theta) > 0.0 {
            return ValueWithError::new(24.0 * stationarity_n2a3(theta), 1e-13);
        }
        phi_series_prime(&self.series, theta)
    }
}

/// Angles `2πk/n`, `k = 0..n`.
pub fn equidistributed_angles(n: usize) -> Vec<f64> {
    (0..n).map(|k| TAU * k as f64 / n as f64).collect()
}
