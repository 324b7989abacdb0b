//! Cosine/sine series whose coefficients are finite sums of gamma quotients.
//!
//! Every coefficient family in this crate (the interaction coefficients, their
//! derivative weights, the convexity sequence) can be written exactly as
//!
//! ```text
//! c_m = Σ_j w_j · G_{s_j}(m + h_j),      G_s(y) = Γ(y) / Γ(y + s)
//! ```
//!
//! and `G_s` has closed-form forward differences, `Δ^k G_s = (−1)^k (s)^{(k)} G_{s+k}`,
//! and a closed-form tail sum, `Σ_{y'≥y} G_s(y') = G_{s−1}(y)/(s−1)` for `s > 1`.
//! That turns slowly convergent series into a short head (evaluated with the
//! Reinsch form of Clenshaw's recurrence) plus a tail evaluated by the Euler
//! transform, with a rigorous remainder bound from the Dirichlet test.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::gamma_quotient;

/// A computed real value with an error-bound estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueWithError {
    pub value: f64,
    pub err: f64,
}

impl ValueWithError {
    pub fn new(value: f64, err: f64) -> Self {
        debug_assert!(err >= 0.0);
        Self { value, err }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, err: 0.0 }
    }

    /// Whether `other` lies within `err + extra` of this value.
    pub fn contains(&self, other: f64, extra: f64) -> bool {
        (self.value - other).abs() <= self.err + extra
    }
}

impl std::ops::Add for ValueWithError {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.err + rhs.err)
    }
}

impl std::ops::Mul<f64> for ValueWithError {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        Self::new(self.value * rhs, self.err * rhs.abs())
    }
}

impl std::iter::Sum for ValueWithError {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ValueWithError::exact(0.0), |a, b| a + b)
    }
}

/// One term `weight · Γ(m + shift) / Γ(m + shift + order)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaRatioTerm {
    pub weight: f64,
    pub shift: f64,
    pub order: f64,
}

/// Coefficient model `c_m = Σ_j w_j Γ(m + h_j) / Γ(m + h_j + s_j)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GammaRatioModel {
    terms: Vec<GammaRatioTerm>,
}

/// Which trigonometric series to sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Cos,
    Sin,
}

/// Monomial coefficients of the rising factorial `x^{(d)} = x(x+1)⋯(x+d−1)`.
fn rising_factorial_poly(d: usize) -> Vec<f64> {
    let mut p = vec![1.0];
    for i in 0..d {
        // multiply by (x + i)
        let mut next = vec![0.0; p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k] += c * i as f64;
            next[k + 1] += c;
        }
        p = next;
    }
    p
}

/// Expand a polynomial given by monomial coefficients into the rising
/// factorial basis: `P(x) = Σ_j q_j x^{(j)}`.
pub(crate) fn to_rising_basis(monomial: &[f64]) -> Vec<f64> {
    let mut rem: Vec<f64> = monomial.to_vec();
    while rem.len() > 1 && rem[rem.len() - 1] == 0.0 {
        rem.pop();
    }
    let mut q = vec![0.0; rem.len()];
    for d in (0..rem.len()).rev() {
        let lead = rem[d];
        if lead == 0.0 {
            continue;
        }
        q[d] = lead;
        for (k, c) in rising_factorial_poly(d).iter().enumerate() {
            rem[k] -= lead * c;
        }
    }
    q
}

/// Product of two monomial-coefficient polynomials.
pub(crate) fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl GammaRatioModel {
    pub fn new(terms: Vec<GammaRatioTerm>) -> Self {
        Self {
            terms: terms.into_iter().filter(|t| t.weight != 0.0).collect(),
        }
    }

    /// Model for `c_m = scale · P(x) · Γ(x) / Γ(x + a)` with `x = m + offset`.
    pub fn from_polynomial(poly: &[f64], offset: f64, scale: f64, a: f64) -> Self {
        let q = to_rising_basis(poly);
        let terms = q
            .iter()
            .enumerate()
            .map(|(j, &qj)| GammaRatioTerm {
                weight: scale * qj,
                shift: offset + j as f64,
                order: a - j as f64,
            })
            .collect();
        Self::new(terms)
    }

    pub fn terms(&self) -> &[GammaRatioTerm] {
        &self.terms
    }

    /// Smallest order among the terms (governs the decay rate `m^{−order}`).
    pub fn min_order(&self) -> f64 {
        self.terms.iter().map(|t| t.order).fold(f64::INFINITY, f64::min)
    }

    pub fn value(&self, m: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * gamma_quotient(m + t.shift, t.order))
            .sum()
    }

    /// Exact `Σ_{m ≥ first} c_m`, available when every order exceeds 1.
    pub fn tail_sum(&self, first: f64) -> Option<f64> {
        if self.terms.iter().any(|t| t.order <= 1.0) {
            return None;
        }
        Some(
            self.terms
                .iter()
                .map(|t| {
                    let y = first + t.shift;
                    t.weight * gamma_quotient(y, t.order - 1.0) / (t.order - 1.0)
                })
                .sum(),
        )
    }

    /// Upper bound on `Σ_{m ≥ first} |c_m|` via the triangle inequality.
    pub fn tail_abs_bound(&self, first: f64) -> Option<f64> {
        if self.terms.iter().any(|t| t.order <= 1.0) {
            return None;
        }
        Some(
            self.terms
                .iter()
                .map(|t| {
                    let y = first + t.shift;
                    t.weight.abs() * gamma_quotient(y, t.order - 1.0) / (t.order - 1.0)
                })
                .sum(),
        )
    }

    /// `Σ_{m ≥ first} c_m e^{imθ}` for `θ ≢ 0 (mod 2π)` by the Euler transform.
    ///
    /// Returns the value and a certified bound on the truncation remainder.
    /// Every order must be nonnegative and `first + shift > 0` for each term.
    pub fn oscillatory_tail(&self, first: u64, theta: f64) -> (Complex64, f64) {
        let half = 0.5 * theta;
        let sin_half = half.sin().abs();
        if sin_half == 0.0 || self.terms.is_empty() {
            return (Complex64::new(0.0, 0.0), if self.terms.is_empty() { 0.0 } else { f64::INFINITY });
        }
        let z = Complex64::from_polar(1.0, theta);
        let one_minus_z = Complex64::new(1.0, 0.0) - z;
        let w0 = one_minus_z.inv();
        let rho = z * w0;
        let rho_abs = 0.5 / sin_half;

        // Per-term state: magnitude |w| (s)^{(k)} G_{s+k}(y) and its sign.
        struct State {
            mag: f64,
            sign: f64,
            y: f64,
            order: f64,
        }
        let firstf = first as f64;
        let mut states: Vec<State> = self
            .terms
            .iter()
            .map(|t| {
                let y = firstf + t.shift;
                State {
                    mag: t.weight.abs() * gamma_quotient(y, t.order),
                    sign: t.weight.signum(),
                    y,
                    order: t.order,
                }
            })
            .collect();

        let mut sum = Complex64::new(0.0, 0.0);
        let mut rho_k = w0; // ρ^k / (1 − z)
        let mut rho_abs_k = 1.0;
        let mut best_sum = sum;
        let mut best_bound = f64::INFINITY;
        let mut k = 0usize;
        loop {
            // bound on the remainder after terms 0..k−1 have been added
            let mass: f64 = states.iter().map(|s| s.mag).sum();
            let bound = rho_abs_k * mass / sin_half;
            if bound < best_bound {
                best_bound = bound;
                best_sum = sum;
            } else if k > 2 {
                break;
            }
            if bound <= 1e-18 * sum.norm() || mass == 0.0 || k >= 120 {
                break;
            }
            let parity = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            let delta: f64 = states.iter().map(|s| parity * s.sign * s.mag).sum();
            sum += rho_k * delta;
            for s in states.iter_mut() {
                let kf = k as f64;
                s.mag *= (s.order + kf) / (s.y + s.order + kf);
            }
            rho_k *= rho;
            rho_abs_k *= rho_abs;
            k += 1;
        }
        let phase = Complex64::from_polar(1.0, firstf * theta);
        (phase * best_sum, best_bound)
    }
}

/// Clenshaw sums `Σ_{k} a_k cos(kθ)` and `Σ_k a_k sin(kθ)` for coefficients
/// indexed from `start`, using Reinsch's modification so that angles near
/// `0` and `π` stay well conditioned.
pub fn reinsch_sums(coeffs: &[f64], start: usize, theta: f64) -> (f64, f64) {
    let n = start + coeffs.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let coeff = |k: usize| if k >= start { coeffs[k - start] } else { 0.0 };
    let c = theta.cos();
    let mut b_next = 0.0; // b_{k+1}
    let mut d_next = 0.0; // d_{k+1}
    let mut b1 = 0.0;
    let d0;
    if c >= 0.0 {
        let s = (0.5 * theta).sin();
        let lambda = -4.0 * s * s;
        let mut k = n;
        loop {
            k -= 1;
            let d = coeff(k) + d_next + lambda * b_next;
            let b = d + b_next;
            if k == 1 {
                b1 = b;
            }
            if k == 0 {
                d0 = d;
                break;
            }
            d_next = d;
            b_next = b;
        }
        (d0 - 0.5 * lambda * b1, b1 * theta.sin())
    } else {
        let ch = (0.5 * theta).cos();
        let mu = 4.0 * ch * ch;
        let mut k = n;
        loop {
            k -= 1;
            let d = coeff(k) - d_next + mu * b_next;
            let b = d - b_next;
            if k == 1 {
                b1 = b;
            }
            if k == 0 {
                d0 = d;
                break;
            }
            d_next = d;
            b_next = b;
        }
        (d0 - 0.5 * mu * b1, b1 * theta.sin())
    }
}

/// Reduce an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = theta.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}

/// Distance from `θ` to the nearest multiple of `2π`.
pub fn angle_gap(theta: f64) -> f64 {
    let r = reduce_angle(theta);
    r.min(std::f64::consts::TAU - r)
}

/// Euler-transform resolution: the tail starts where `2 sin(δ/2)·L ≥` this.
const SPLIT_SCALE: f64 = 40.0;

/// A series `Σ_{m ≥ start} c_m trig(mθ)` described by stored head
/// coefficients and an exact coefficient model for the remainder.
#[derive(Debug, Clone, Copy)]
pub struct ModelSeries<'a> {
    /// Stored coefficients for `m = start .. start + head.len()`.
    pub head: &'a [f64],
    pub start: usize,
    /// Extra multiplier `m^power` applied to stored coefficients.
    pub power: i32,
    /// Model for `m^power · c_m`, valid from `model_from` on.
    pub model: &'a GammaRatioModel,
    pub model_from: usize,
}

impl ModelSeries<'_> {
    fn last_index(&self) -> usize {
        self.start + self.head.len() - 1
    }

    /// Split index: terms `m ≤ split` are summed directly.
    fn split_for(&self, gap: f64) -> usize {
        let want = (SPLIT_SCALE / (2.0 * (0.5 * gap).sin())).ceil();
        let floor = self.model_from.max(64);
        let want = if want.is_finite() { want as usize } else { usize::MAX };
        want.max(floor).min(self.last_index())
    }

    /// Evaluate at `θ`, returning value and error bound.
    pub fn eval(&self, theta: f64, kind: Trig) -> ValueWithError {
        let theta = reduce_angle(theta);
        let gap = angle_gap(theta);
        if gap == 0.0 {
            if kind == Trig::Sin {
                return ValueWithError::exact(0.0);
            }
            let split = self.last_index();
            let head: f64 = self
                .head
                .iter()
                .enumerate()
                .map(|(i, c)| c * ((self.start + i) as f64).powi(self.power))
                .rev()
                .sum();
            return match self.model.tail_sum((split + 1) as f64) {
                Some(t) => {
                    let v = head + t;
                    ValueWithError::new(v, 4.0 * f64::EPSILON * (head.abs() + t.abs()))
                }
                None => ValueWithError::new(f64::INFINITY, f64::INFINITY),
            };
        }
        let split = self.split_for(gap);
        let n_head = split + 1 - self.start;
        let (c, s, abs_head) = if self.power == 0 {
            let (c, s) = reinsch_sums(&self.head[..n_head], self.start, theta);
            (c, s, self.head[..n_head].iter().map(|x| x.abs()).sum::<f64>())
        } else {
            let scaled: Vec<f64> = self.head[..n_head]
                .iter()
                .enumerate()
                .map(|(i, c)| c * ((self.start + i) as f64).powi(self.power))
                .collect();
            let (c, s) = reinsch_sums(&scaled, self.start, theta);
            (c, s, scaled.iter().map(|x| x.abs()).sum::<f64>())
        };
        let (tail, mut bound) = self.model.oscillatory_tail((split + 1) as u64, theta);
        if let Some(trivial) = self.model.tail_abs_bound((split + 1) as f64) {
            if trivial < bound {
                // the Euler transform did not resolve this angle; fall back
                // to dropping the tail altogether
                let head = match kind {
                    Trig::Cos => c,
                    Trig::Sin => s,
                };
                let round = 16.0 * f64::EPSILON * abs_head;
                return ValueWithError::new(head, trivial + round);
            }
        }
        let round = 16.0 * f64::EPSILON * (abs_head + tail.norm());
        bound += round;
        match kind {
            Trig::Cos => ValueWithError::new(c + tail.re, bound),
            Trig::Sin => ValueWithError::new(s + tail.im, bound),
        }
    }
}
