//! Minimisation of the pair energy `Σ_{j≠k} φ(θ_j − θ_k)` over pole
//! configurations, with the first pole pinned at angle 0.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::interaction::{Interaction, SpaceParams};
use crate::norms::{config_energy, CircleConfig, MIN_POLE_GAP};

const GOLDEN: f64 = 0.381_966_011_250_105_1;
const MAX_BRENT_ITER: usize = 200;

/// Local minimiser of `f` on `[a, b]` by Brent's method (golden section
/// with parabolic steps). Returns `(x, f(x))`.
pub fn brent_min(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    if !(a < b) {
        return domain(format!("brent_min needs a < b, got [{a}, {b}]"));
    }
    let (mut a, mut b) = (a, b);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..MAX_BRENT_ITER {
        let m = 0.5 * (a + b);
        let tol1 = tol.max(f64::EPSILON.sqrt() * x.abs() * 1e-3) + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, fx));
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(Error::NonConvergence {
        what: format!("brent_min stopped after {MAX_BRENT_ITER} iterations near x = {x}"),
        achieved: b - a,
    })
}

/// Root of `f` in `[a, b]` by the Brent–Dekker method; needs a sign change.
pub fn brent_root(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return domain(format!("no sign change on [{a}, {b}]"));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_BRENT_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(m) };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        what: format!("brent_root stopped after {MAX_BRENT_ITER} iterations"),
        achieved: fb.abs(),
    })
}

/// Outcome of an energy minimisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    pub config: CircleConfig,
    pub energy: f64,
    pub norm_sq: f64,
    pub n_starts: usize,
    pub converged: bool,
    pub iterations: usize,
    pub equidistribution_energy: f64,
    pub below_equidistribution: bool,
}

/// Margin by which an energy must undercut equidistribution to count.
const BELOW_MARGIN: f64 = 1e-7;

fn finish(
    phi: &Interaction,
    config: CircleConfig,
    energy: f64,
    n_starts: usize,
    converged: bool,
    iterations: usize,
) -> Result<OptimizationResult> {
    let n = config.len();
    let equi = config_energy(phi, &CircleConfig::equidistributed(n)?)?.value;
    Ok(OptimizationResult {
        norm_sq: n as f64 * phi.at_zero().value + energy,
        config,
        energy,
        n_starts,
        converged,
        iterations,
        equidistribution_energy: equi,
        below_equidistribution: energy < equi - BELOW_MARGIN,
    })
}

const TWO_POINT_GRID: usize = 256;

/// Minimise `2φ(θ)` over `θ ∈ (0, π]`: scan a grid to bracket every local
/// minimum, refine each with Brent and keep the best.
pub fn two_point_minimize(p: SpaceParams) -> Result<OptimizationResult> {
    let phi = Interaction::new(p)?;
    two_point_minimize_with(&phi)
}

pub fn two_point_minimize_with(phi: &Interaction) -> Result<OptimizationResult> {
    let f = |t: f64| phi.value(t).value;
    let grid: Vec<f64> = (1..=TWO_POINT_GRID).map(|k| PI * k as f64 / TWO_POINT_GRID as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let mut best = (grid[0], vals[0]);
    let mut iterations = TWO_POINT_GRID;
    for k in 0..grid.len() {
        let left = if k == 0 { f64::INFINITY } else { vals[k - 1] };
        let right = vals.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if vals[k] > left || vals[k] > right {
            continue;
        }
        let candidate = if k + 1 == grid.len() {
            // π is a critical point by symmetry; refine only inside
            let (x, fx) = brent_min(f, grid[k - 1], PI, 1e-10)?;
            if fx < vals[k] {
                (x, fx)
            } else {
                (PI, vals[k])
            }
        } else {
            let lo = if k == 0 { 1e-6 } else { grid[k - 1] };
            brent_min(f, lo, grid[k + 1], 1e-10)?
        };
        iterations += 1;
        if candidate.1 < best.1 {
            best = candidate;
        }
    }
    let config = CircleConfig::new(vec![0.0, best.0])?;
    finish(phi, config, 2.0 * best.1, 1, true, iterations)
}

/// `∂E/∂θ_j = 2 Σ_{k≠j} φ'(θ_j − θ_k)`, in the sorted order of the configuration.
pub fn energy_gradient(p: SpaceParams, c: &CircleConfig) -> Result<Vec<f64>> {
    let phi = Interaction::new(p)?;
    energy_gradient_with(&phi, c.angles())
}

pub fn energy_gradient_with(phi: &Interaction, angles: &[f64]) -> Result<Vec<f64>> {
    let n = angles.len();
    let mut g = vec![0.0; n];
    for j in 0..n {
        for k in j + 1..n {
            let d = phi.derivative(angles[j] - angles[k]).value;
            // φ' is odd
            g[j] += 2.0 * d;
            g[k] -= 2.0 * d;
        }
    }
    Ok(g)
}

fn energy_of(phi: &Interaction, angles: &[f64]) -> f64 {
    let mut e = 0.0;
    for j in 0..angles.len() {
        for k in j + 1..angles.len() {
            e += 2.0 * phi.value(angles[k] - angles[j]).value;
        }
    }
    e
}

fn min_circular_gap(angles: &[f64]) -> f64 {
    let mut s: Vec<f64> = angles.iter().map(|&a| a.rem_euclid(TAU)).collect();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let inner = s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    inner.min(s[0] + TAU - s[n - 1])
}

/// Settings for [`local_descent`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentOptions {
    pub max_iter: usize,
    pub step_tol: f64,
    pub grad_tol: f64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            max_iter: 5000,
            step_tol: 1e-10,
            grad_tol: 1e-9,
        }
    }
}

/// One local run of gradient descent.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRun {
    pub angles: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Energy after every accepted step, starting with the initial energy.
    pub trace: Vec<f64>,
}

/// Gradient descent with Armijo backtracking; `angles[0]` stays fixed.
pub fn local_descent(phi: &Interaction, start: &[f64], opts: DescentOptions) -> Result<LocalRun> {
    if min_circular_gap(start) < MIN_POLE_GAP {
        return domain("starting configuration has colliding poles");
    }
    let mut x = start.to_vec();
    let mut e = energy_of(phi, &x);
    let mut trace = vec![e];
    let mut step = 0.1;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut g = energy_gradient_with(phi, &x)?;
        g[0] = 0.0;
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2.sqrt() <= opts.grad_tol {
            converged = true;
            break;
        }
        let mut accepted = false;
        step *= 2.0;
        while step * g2.sqrt() > opts.step_tol {
            let trial: Vec<f64> = x.iter().zip(&g).map(|(a, d)| (a - step * d).rem_euclid(TAU)).collect();
            if min_circular_gap(&trial) >= MIN_POLE_GAP {
                let et = energy_of(phi, &trial);
                if et <= e - 1e-4 * step * g2 {
                    x = trial;
                    e = et;
                    trace.push(e);
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true;
            break;
        }
    }
    Ok(LocalRun {
        angles: x,
        energy: e,
        iterations,
        converged,
        trace,
    })
}

/// Deterministic generator for start `index` of a multistart run.
fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Random start with the first pole at 0 and the rest uniform.
pub fn random_start(n: usize, seed: u64, index: usize) -> Vec<f64> {
    let mut rng = start_rng(seed, index);
    loop {
        let mut a = vec![0.0];
        a.extend((1..n).map(|_| rng.gen_range(0.0..TAU)));
        if min_circular_gap(&a) >= 1e-6 {
            return a;
        }
    }
}

/// Multistart local minimisation of the `n`-point energy.
pub fn npoint_minimize(p: SpaceParams, n: usize, starts: usize, seed: u64) -> Result<OptimizationResult> {
    let phi = Interaction::new(p)?;
    npoint_minimize_with(&phi, n, starts, seed)
}

pub fn npoint_minimize_with(phi: &Interaction, n: usize, starts: usize, seed: u64) -> Result<OptimizationResult> {
    if n < 2 {
        return domain("n-point minimisation needs n ≥ 2");
    }
    if starts == 0 {
        return domain("at least one start is required");
    }
    let runs: Vec<Result<LocalRun>> = (0..starts)
        .into_par_iter()
        .map(|i| local_descent(phi, &random_start(n, seed, i), DescentOptions::default()))
        .collect();
    let mut best: Option<LocalRun> = None;
    let mut total_iter = 0;
    for run in runs {
        let run = run?;
        total_iter += run.iterations;
        let better = match &best {
            None => true,
            Some(b) => run.energy < b.energy,
        };
        if better {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    if !best.converged {
        return Err(Error::NonConvergence {
            what: format!("multistart minimisation of {n} points"),
            achieved: best.energy,
        });
    }
    let config = CircleConfig::new(best.angles)?;
    finish(phi, config, best.energy, starts, best.converged, total_iter)
}
