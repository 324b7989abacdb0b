//! Convex sequences and the coefficient sequence of the critical exponent.
//!
//! Conventions: `Δa_n = a_n − a_{n+1}`, `Δ²a_n = a_n − 2a_{n+1} + a_{n+2}`.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::interaction::{self, SpaceParams};
use crate::special::factorial;
use crate::trig_series::{
    angle_gap, poly_mul, reduce_angle, GammaRatioModel, GammaRatioTerm, ModelSeries, Trig, ValueWithError,
};

/// First differences `Δa_n`, one shorter than the input.
pub fn delta(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[0] - w[1]).collect()
}

/// Second differences `Δ²a_n`, two shorter than the input.
pub fn delta2(values: &[f64]) -> Vec<f64> {
    values.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect()
}

/// Finite prefix `a_0..a_M`, optionally continued by an exact model
/// `a_m = model.value(m)` valid from `model_from` on.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSequencePrefix {
    values: Vec<f64>,
    tail: Option<(GammaRatioModel, usize)>,
}

impl RealSequencePrefix {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return domain("sequence prefix is empty");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("sequence prefix has non-finite entries");
        }
        Ok(Self { values, tail: None })
    }

    /// Attach an exact continuation valid for `m ≥ from`.
    pub fn with_model(mut self, model: GammaRatioModel, from: usize) -> Self {
        self.tail = Some((model, from));
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn model(&self) -> Option<(&GammaRatioModel, usize)> {
        self.tail.as_ref().map(|(m, f)| (m, *f))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `a_n`, from the prefix or the model.
    pub fn get(&self, n: usize) -> Option<f64> {
        if let Some(v) = self.values.get(n) {
            return Some(*v);
        }
        match &self.tail {
            Some((model, from)) if n >= *from => Some(model.value(n as f64)),
            _ => None,
        }
    }
}

/// `R_m = Π_{i=1}^N (m−N+i)/(m+i) = 1 − a_m` for `m ≥ N`.
fn one_minus_a(n: u32, m: usize) -> f64 {
    let nf = n as f64;
    let s: f64 = (1..=n).map(|i| (-nf / (m as f64 + i as f64)).ln_1p()).sum();
    s.exp()
}

fn a_value(n: u32, m: usize) -> f64 {
    if m < n as usize {
        return 1.0;
    }
    let nf = n as f64;
    let s: f64 = (1..=n).map(|i| (-nf / (m as f64 + i as f64)).ln_1p()).sum();
    -s.exp_m1()
}

/// `a_m = 1 − (m!)²/((m−N)!(m+N)!)` for `m ≥ N`, `a_m = 1` below, for `m = 0..=last`.
pub fn thm14_coefficients(n: u32, last: usize) -> Result<RealSequencePrefix> {
    if n == 0 {
        return domain("N must be at least 1");
    }
    if last < n as usize {
        return domain(format!("prefix end {last} is below N = {n}"));
    }
    let values = (0..=last).map(|m| a_value(n, m)).collect();
    Ok(RealSequencePrefix { values, tail: None }.with_model(thm14_model(n), n as usize))
}

/// Exact model of `a_m` for `m ≥ N`: with `y = m + 1` and
/// `Π_{i=1}^N (y − i) = Σ_j p_j y^{(j)}`, `a_m = −Σ_{j<N} p_j Γ(y+j)/Γ(y+N)`.
pub fn thm14_model(n: u32) -> GammaRatioModel {
    let mut poly = vec![1.0];
    for i in 1..=n {
        poly = poly_mul(&poly, &[-(i as f64), 1.0]);
    }
    let full = GammaRatioModel::from_polynomial(&poly, 1.0, -1.0, n as f64);
    // the order-zero term is the constant −1 that cancels the leading 1
    let terms: Vec<GammaRatioTerm> = full.terms().iter().copied().filter(|t| t.order != 0.0).collect();
    GammaRatioModel::new(terms)
}

/// `t_m = a_m + mΔa_m = (m+1)a_m − m a_{m+1}`.
fn t_value(values: &[f64], m: usize) -> f64 {
    (m as f64 + 1.0) * values[m] - m as f64 * values[m + 1]
}

/// Outcome of the threshold check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// Smallest `m ≥ N` with `(m+1)a_m − m a_{m+1} ≤ 1`.
    pub threshold: usize,
    /// `|(m+1)a_m − m a_{m+1} − 1|` at `m = N² − 1`.
    pub residual: f64,
}

/// Locate the first `m ≥ N` where `(m+1)a_m − m a_{m+1} ≤ a_0 = 1` and
/// confirm it is `N² − 1` with equality there.
pub fn threshold_check(n: u32) -> Result<ThresholdReport> {
    if n < 2 {
        return domain("threshold check needs N ≥ 2");
    }
    let n2 = (n * n) as usize;
    let seq = thm14_coefficients(n, 10 * n2 + 2)?;
    let v = seq.values();
    let threshold = (n as usize..v.len() - 1)
        .find(|&m| t_value(v, m) <= 1.0 + 1e-12)
        .ok_or_else(|| Error::InvariantViolation(format!("no threshold found for N = {n}")))?;
    let residual = (t_value(v, n2 - 1) - 1.0).abs();
    if threshold != n2 - 1 || residual > 1e-12 {
        return Err(Error::InvariantViolation(format!(
            "threshold for N = {n} is {threshold} (residual {residual:e}), expected {}",
            n2 - 1
        )));
    }
    Ok(ThresholdReport { threshold, residual })
}

/// Convex modification of a prefix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexifyResult {
    pub n0: usize,
    /// `ã_0..ã_{N0−1}`.
    pub modified: Vec<f64>,
    /// `ã_n = a_n` from this index on.
    pub original_tail_start: usize,
    /// Last index at which `a_n + nΔa_n` was checked to be decreasing.
    pub certified_to: usize,
}

impl ConvexifyResult {
    /// The modified sequence as a prefix, keeping any exact continuation.
    pub fn apply(&self, seq: &RealSequencePrefix) -> RealSequencePrefix {
        let mut values = seq.values.clone();
        values[..self.n0].copy_from_slice(&self.modified);
        RealSequencePrefix {
            values,
            tail: seq.tail.clone().map(|(m, f)| (m, f.max(self.n0))),
        }
    }
}

const T_SLACK: f64 = 1e-12;

/// Replace `a_1..a_{N0−1}` by the linear extension of slope `Δa_{N0}` so
/// that the whole sequence becomes convex, where `N0` is the first index
/// with `a_0 ≥ a_{N0} + N0·Δa_{N0}` and `a_n + nΔa_n` decreasing from there.
pub fn convexify(seq: &RealSequencePrefix) -> Result<ConvexifyResult> {
    let v = seq.values();
    if v.len() < 4 {
        return Err(Error::InsufficientData("convexify needs at least four terms".into()));
    }
    if v.iter().any(|&x| x <= 0.0) {
        return domain("convexify needs a positive sequence");
    }
    if v.windows(2).any(|w| w[1] > w[0]) {
        return domain("convexify needs a non-increasing sequence");
    }
    let last_t = v.len() - 2;
    let t: Vec<f64> = (0..=last_t).map(|m| t_value(v, m)).collect();
    // decreasing_from[n]: t is non-increasing on n..=last_t
    let mut decreasing_from = vec![true; t.len()];
    for n in (0..t.len() - 1).rev() {
        decreasing_from[n] = decreasing_from[n + 1] && t[n] >= t[n + 1] - T_SLACK;
    }
    // at least one checked step of t beyond N0 is required
    let n0 = (1..t.len() - 1)
        .find(|&n| v[0] >= t[n] - T_SLACK && decreasing_from[n])
        .ok_or_else(|| {
            Error::InsufficientData(format!(
                "no convexification index certified within a prefix of {} terms",
                v.len()
            ))
        })?;
    let slope = v[n0] - v[n0 + 1];
    let mut modified = Vec::with_capacity(n0);
    modified.push(v[0]);
    for k in 1..n0 {
        modified.push(v[n0] + (n0 - k) as f64 * slope);
    }
    Ok(ConvexifyResult {
        n0,
        modified,
        original_tail_start: n0,
        certified_to: last_t,
    })
}

/// The five properties of a convex modification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConvexityClauses {
    pub nonnegative: bool,
    pub decreasing: bool,
    pub convex: bool,
    pub first_preserved: bool,
    pub tail_agrees: bool,
}

impl ConvexityClauses {
    pub fn all(&self) -> bool {
        self.nonnegative && self.decreasing && self.convex && self.first_preserved && self.tail_agrees
    }
}

/// Check a convexification against its input over the whole prefix.
pub fn check_convexify(seq: &RealSequencePrefix, res: &ConvexifyResult) -> ConvexityClauses {
    let out = res.apply(seq);
    let a = seq.values();
    let b = out.values();
    let strictly = |w: &[f64]| w[0] > w[1];
    ConvexityClauses {
        nonnegative: b.iter().all(|&x| x >= 0.0),
        decreasing: b.windows(2).all(|w| w[1] <= w[0])
            && (res.n0..a.len() - 1).all(|n| !strictly(&a[n..n + 2]) || strictly(&b[n..n + 2])),
        convex: delta2(b).iter().all(|&d| d >= -1e-15),
        first_preserved: b[0] == a[0],
        tail_agrees: a[res.n0..] == b[res.n0..],
    }
}

/// `F_n(θ) = (1/n)(sin(nθ/2)/sin(θ/2))²`.
pub fn fejer_kernel(n: usize, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    if s == 0.0 {
        return n as f64;
    }
    let q = (0.5 * n as f64 * theta).sin() / s;
    q * q / n as f64
}

/// Both sides of the Fejér decomposition, truncated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FejerCheck {
    /// `a_0/2 + Σ_{n=1}^{T} a_n cos(nθ)`.
    pub lhs: f64,
    /// `½ Σ_{n=0}^{T} (n+1) Δ²a_n F_{n+1}(θ)`.
    pub rhs: f64,
    /// Bound on `|lhs − rhs|` from the two truncations.
    pub bound: f64,
}

/// Compare the cosine series with its Fejér-kernel expansion on `terms`
/// terms. The sequence is assumed positive, decreasing and convex.
pub fn fejer_identity_check(seq: &RealSequencePrefix, theta: f64, terms: usize) -> Result<FejerCheck> {
    let theta = reduce_angle(theta);
    if angle_gap(theta) == 0.0 {
        return domain("Fejér check needs θ ≠ 0 mod 2π");
    }
    let a: Vec<f64> = (0..terms + 3)
        .map(|n| seq.get(n))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InsufficientData(format!("Fejér check needs {} terms", terms + 3)))?;
    let lhs = 0.5 * a[0] + (1..=terms).map(|n| a[n] * (n as f64 * theta).cos()).sum::<f64>();
    let d2 = delta2(&a);
    let rhs = 0.5
        * (0..=terms)
            .map(|n| (n as f64 + 1.0) * d2[n] * fejer_kernel(n + 1, theta))
            .sum::<f64>();
    let s = (0.5 * theta).sin().abs();
    let t = terms;
    let bound = a[t + 1].abs() / s + 0.5 * (a[t + 1] - a[t + 2]).abs() / (s * s);
    Ok(FejerCheck { lhs, rhs, bound })
}

/// Minimum of a cosine series over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BariCheck {
    /// Smallest `value − err` over the samples.
    pub min_value: f64,
    pub argmin: f64,
}

fn cosine_series(seq: &RealSequencePrefix, theta: f64) -> ValueWithError {
    let v = seq.values();
    match seq.model() {
        Some((model, from)) if from < v.len() => {
            let tail = ModelSeries {
                head: &v[1..],
                start: 1,
                power: 0,
                model,
                model_from: from,
            }
            .eval(theta, Trig::Cos);
            ValueWithError::new(0.5 * v[0] + tail.value, tail.err)
        }
        _ => {
            let sum = 0.5 * v[0] + (1..v.len()).map(|n| v[n] * (n as f64 * theta).cos()).sum::<f64>();
            let s = (0.5 * theta).sin().abs();
            let last = *v.last().expect("non-empty");
            ValueWithError::new(sum, last.abs() / s.max(f64::MIN_POSITIVE))
        }
    }
}

/// Sample `a_0/2 + Σ a_n cos(nθ)` at `samples` equispaced angles in
/// `(0, 2π)` and report the smallest lower bound.
pub fn bari_positivity_check(seq: &RealSequencePrefix, samples: usize) -> Result<BariCheck> {
    if samples == 0 {
        return domain("need at least one sample");
    }
    let mut best = BariCheck {
        min_value: f64::INFINITY,
        argmin: f64::NAN,
    };
    for k in 1..=samples {
        let theta = TAU * k as f64 / (samples + 1) as f64;
        let v = cosine_series(seq, theta);
        let low = v.value - v.err;
        if low < best.min_value {
            best = BariCheck { min_value: low, argmin: theta };
        }
    }
    Ok(best)
}

/// Length of the stored prefix used for the critical-exponent sequence.
const PREFIX_LEN: usize = 80_000;

/// `φ_{α*,N} = C·(φ̃ − Σ_{m=1}^{N²−2} c_m cos(mθ))` with `C = (2N)!/((N−1)!)²`,
/// `φ̃` the cosine series with coefficients `(1 − ã_m)/m²` and
/// `c_m = (a_m − ã_m)/m²`.
#[derive(Debug, Clone)]
pub struct PhiStarDecomposition {
    pub degree: u32,
    pub scale: f64,
    /// Coefficients `(1 − ã_m)/m²` for `m = 1..`.
    pub psi_coeffs: Vec<f64>,
    /// `c_m` for `m = 1..=N²−2`.
    pub correction: Vec<f64>,
    pub convexified: ConvexifyResult,
    model: GammaRatioModel,
}

impl PhiStarDecomposition {
    /// `φ̃(θ)`.
    pub fn phi_tilde(&self, theta: f64) -> ValueWithError {
        ModelSeries {
            head: &self.psi_coeffs,
            start: 1,
            power: 0,
            model: &self.model,
            model_from: self.convexified.n0,
        }
        .eval(theta, Trig::Cos)
    }

    /// `Σ c_m cos(mθ)`.
    pub fn correction_sum(&self, theta: f64) -> f64 {
        self.correction
            .iter()
            .enumerate()
            .map(|(i, c)| c * ((i + 1) as f64 * theta).cos())
            .sum()
    }

    /// `φ_{α*,N}(θ)` rebuilt from the two parts.
    pub fn reconstruct(&self, theta: f64) -> ValueWithError {
        let t = self.phi_tilde(theta);
        ValueWithError::new(self.scale * (t.value - self.correction_sum(theta)), self.scale * t.err)
    }
}

/// Split `φ_{α*,N}` into its convexified part and the finite correction,
/// then confirm the reconstruction against the interaction series to `tol`
/// on 100 angles.
pub fn phi_star_decomposition(n: u32, tol: f64) -> Result<PhiStarDecomposition> {
    if n < 2 {
        return domain("the decomposition needs N ≥ 2");
    }
    let seq = thm14_coefficients(n, PREFIX_LEN)?;
    let conv = convexify(&seq)?;
    let n2 = (n * n) as usize;
    if conv.n0 != n2 - 1 {
        return Err(Error::InvariantViolation(format!(
            "convexification index {} differs from N² − 1 = {}",
            conv.n0,
            n2 - 1
        )));
    }
    let a = seq.values();
    let tilde = conv.apply(&seq);
    let at = tilde.values();
    let psi_coeffs: Vec<f64> = (1..a.len())
        .map(|m| {
            let one_minus = if m < conv.n0 { 1.0 - at[m] } else { one_minus_a(n, m) };
            one_minus / (m * m) as f64
        })
        .collect();
    let correction: Vec<f64> = (1..conv.n0).map(|m| (a[m] - at[m]) / (m * m) as f64).collect();
    let nf = factorial(n - 1);
    let scale = factorial(2 * n) / (nf * nf);
    let p = SpaceParams::new(n, 2.0 * n as f64 - 1.0)?;
    let b_model = interaction::coefficient_model(p, 0);
    // (1 − a_m)/m² = b_m / C
    let model = GammaRatioModel::new(
        b_model
            .terms()
            .iter()
            .map(|t| GammaRatioTerm { weight: t.weight / scale, ..*t })
            .collect(),
    );
    let dec = PhiStarDecomposition {
        degree: n,
        scale,
        psi_coeffs,
        correction,
        convexified: conv,
        model,
    };
    let series = interaction::build_series(p, interaction::DEFAULT_TOL)?;
    for k in 0..100 {
        let theta = TAU * (k as f64 + 0.5) / 100.0;
        let want = interaction::phi_series(&series, theta);
        let got = dec.reconstruct(theta);
        let diff = (want.value - got.value).abs();
        if diff > tol {
            return Err(Error::InvariantViolation(format!(
                "decomposition differs from the series by {diff:e} at θ = {theta}"
            )));
        }
    }
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn differences() {
        assert_eq!(delta(&[3.0, 1.0, 0.5]), vec![2.0, 0.5]);
        assert_eq!(delta2(&[3.0, 1.0, 0.5]), vec![1.5]);
    }

    #[test]
    fn coefficient_examples() {
        let s = thm14_coefficients(2, 10).unwrap();
        let v = s.values();
        assert_eq!(v[0], 1.0);
        assert_eq!(v[1], 1.0);
        assert!((v[2] - 5.0 / 6.0).abs() < 1e-15);
        assert!((v[3] - 0.7).abs() < 1e-15);
        assert!((v[4] - 0.6).abs() < 1e-15);
        assert!(thm14_coefficients(3, 2).is_err());
    }

    #[test]
    fn model_matches_prefix() {
        for n in 1..=5u32 {
            let s = thm14_coefficients(n, 3000).unwrap();
            let model = thm14_model(n);
            for m in [n as usize, n as usize + 1, 40, 2999] {
                let want = s.values()[m];
                assert!(((model.value(m as f64) - want) / want).abs() < 1e-12, "N={n} m={m}");
            }
        }
    }

    #[test]
    fn n2_closed_form() {
        let s = thm14_coefficients(2, 200).unwrap();
        for m in 2..200 {
            let mf = m as f64;
            let want = (4.0 * mf + 2.0) / ((mf + 1.0) * (mf + 2.0));
            assert!((s.values()[m] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn thresholds() {
        for n in 2..=6u32 {
            let r = threshold_check(n).unwrap();
            assert_eq!(r.threshold, (n * n - 1) as usize);
        }
        assert!(threshold_check(1).is_err());
    }

    #[test]
    fn convexify_n2() {
        let s = thm14_coefficients(2, 400).unwrap();
        let r = convexify(&s).unwrap();
        assert_eq!(r.n0, 3);
        let want = [1.0, 0.9, 0.8];
        for (g, w) in r.modified.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
        assert!(check_convexify(&s, &r).all());
    }

    #[test]
    fn convexify_already_convex() {
        let harmonic = RealSequencePrefix::new((0..100).map(|m| 1.0 / (m as f64 + 1.0)).collect()).unwrap();
        let r = convexify(&harmonic).unwrap();
        assert_eq!(r.n0, 1);
        assert_eq!(r.modified, vec![1.0]);
        let geometric = RealSequencePrefix::new((0..60).map(|m| 0.5f64.powi(m)).collect()).unwrap();
        assert_eq!(convexify(&geometric).unwrap().n0, 1);
    }

    #[test]
    fn convexify_rejects_bad_input() {
        let up = RealSequencePrefix::new(vec![1.0, 2.0, 0.5, 0.1]).unwrap();
        assert!(matches!(convexify(&up), Err(Error::Domain(_))));
        let short = RealSequencePrefix::new(vec![1.0, 0.5]).unwrap();
        assert!(matches!(convexify(&short), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn fejer_geometric() {
        let g = RealSequencePrefix::new((0..200).map(|m| 0.5f64.powi(m)).collect()).unwrap();
        let c = fejer_identity_check(&g, PI, 100).unwrap();
        assert!((c.lhs - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.rhs - 1.0 / 6.0).abs() < 1e-12);
        let c = fejer_identity_check(&g, PI / 2.0, 100).unwrap();
        assert!((c.lhs - 0.3).abs() < 1e-12);
        assert!((c.lhs - c.rhs).abs() <= c.bound + 1e-14);
    }

    #[test]
    fn bari_convexified() {
        let s = thm14_coefficients(2, PREFIX_LEN).unwrap();
        let r = convexify(&s).unwrap();
        let b = bari_positivity_check(&r.apply(&s), 2000).unwrap();
        assert!(b.min_value >= -1e-8, "{b:?}");
    }

    #[test]
    fn bari_non_convex_reports_negative() {
        let s = RealSequencePrefix::new(vec![1.0, 0.9, 0.9, 0.0, 0.0]).unwrap();
        let b = bari_positivity_check(&s, 1000).unwrap();
        assert!(b.min_value < 0.0);
    }

    #[test]
    fn decomposition_n2() {
        let d = phi_star_decomposition(2, 1e-7).unwrap();
        assert_eq!(d.correction.len(), 2);
        assert!((d.correction[0] - 0.1).abs() < 1e-15);
        assert!((d.correction[1] - 1.0 / 120.0).abs() < 1e-15);
        let at_pi = d.reconstruct(PI).value;
        assert!((at_pi - (96.0 * 2f64.ln() - 66.0)).abs() < 1e-8);
    }
}
