//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::{LN_2, PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bergfrac::interaction::{build_series, phi_quadrature, phi_series, stationarity_n2a3, Interaction, DEFAULT_TOL};
use bergfrac::moments::{powersum_lower_bound_check, sample_wn_structured, thm14_verify_with};
use bergfrac::norms::{
    asymptotic_limit_constant, config_energy, config_norm_sq_powersum, default_powersum_cap, psi_norm_sq,
};
use bergfrac::optimize::{brent_root, energy_gradient_with, npoint_minimize_with, two_point_minimize_with};
use bergfrac::sequences::{
    check_convexify, convexify, fejer_identity_check, phi_star_decomposition, thm14_coefficients, threshold_check,
};
use bergfrac::{CircleConfig, RealSequencePrefix, SpaceParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_time(t: Duration, limit_s: f64, what: &str) -> Result<(), String> {
    check(
        t.as_secs_f64() <= limit_s,
        format!("{what} took {:.2} s (limit {limit_s} s)", t.as_secs_f64()),
    )
}

fn p23() -> SpaceParams {
    SpaceParams::new(2, 3.0).unwrap()
}

fn closed_form_table() -> Vec<(&'static str, f64, f64)> {
    let s3 = 3f64.sqrt();
    vec![
        ("π", PI, 96.0 * LN_2 - 66.0),
        ("π/2", PI / 2.0, -30.0 + 12.0 * PI - 12.0 * LN_2),
        ("π/3", PI / 3.0, -12.0 + 2.0 * PI * s3),
        ("2π/3", 2.0 * PI / 3.0, -48.0 + 7.0 * PI * s3 + 9.0 * 3f64.ln()),
        (
            "π/6",
            PI / 6.0,
            -48.0 + 18.0 * (1.0 + s3) + (15.0 - 12.0 * s3) * (2.0 - s3).ln() - 2.5 * PI * (3.0 * s3 - 4.0),
        ),
    ]
}

fn c1_closed_forms() -> Outcome {
    let t = Instant::now();
    let s = build_series(p23(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let zero = phi_series(&s, 0.0).value;
    check((zero - 6.0).abs() <= 1e-8, format!("series φ(0) = {zero}"))?;
    within_time(t.elapsed(), 1.0, "series φ(0)")?;
    let mut worst_s: f64 = 0.0;
    let mut worst_q: f64 = 0.0;
    for (name, theta, want) in closed_form_table() {
        let t = Instant::now();
        let v = phi_series(&s, theta).value;
        within_time(t.elapsed(), 1.0, "series evaluation")?;
        let t = Instant::now();
        let q = phi_quadrature(p23(), theta).map_err(|e| e.to_string())?.value;
        within_time(t.elapsed(), 1.0, "quadrature evaluation")?;
        check((v - want).abs() <= 1e-8, format!("series φ({name}) = {v}, want {want}"))?;
        check((q - want).abs() <= 1e-6, format!("quadrature φ({name}) = {q}, want {want}"))?;
        worst_s = worst_s.max((v - want).abs());
        worst_q = worst_q.max((q - want).abs());
    }
    Ok(format!("max |series − closed| = {worst_s:.1e}, max |quadrature − closed| = {worst_q:.1e}"))
}

fn c2_minimizer() -> Outcome {
    let t = Instant::now();
    let root = brent_root(stationarity_n2a3, 0.5, 1.5, 1e-14).map_err(|e| e.to_string())?;
    let s = build_series(p23(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let v = phi_series(&s, root).value;
    within_time(t.elapsed(), 5.0, "minimizer")?;
    check((root - 0.9198).abs() <= 2e-3, format!("root {root}"))?;
    check((v + 1.14963).abs() <= 5e-4, format!("φ(root) = {v}"))?;
    Ok(format!("θ_min = {root:.10}, φ(θ_min) = {v:.8}"))
}

fn c3_orderings() -> Outcome {
    let s = build_series(p23(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let phi = |t: f64| phi_series(&s, t).value;
    let big = |t: f64| 2.0 * (2.0 * phi(t) + phi(2.0 * t));
    let s3 = 3f64.sqrt();
    let table = closed_form_table();
    let cf = |i: usize| table[i].2;
    let (pi, half, third, two_third, sixth) = (cf(0), cf(1), cf(2), cf(3), cf(4));
    check(phi(PI / 2.0) < phi(PI), "φ(π/2) < φ(π) fails")?;
    check(big(PI / 6.0) < big(PI / 3.0), "Φ(π/6) < Φ(π/3) fails")?;
    check(big(PI / 3.0) < big(2.0 * PI / 3.0), "Φ(π/3) < Φ(2π/3) fails")?;
    let gaps = [
        ("φ(π) − φ(π/2)", phi(PI) - phi(PI / 2.0), pi - half),
        ("φ(2π/3) − φ(π/3)", phi(2.0 * PI / 3.0) - phi(PI / 3.0), -36.0 + 5.0 * PI * s3 + 9.0 * 3f64.ln()),
        ("Φ(π/3) − Φ(π/6)", big(PI / 3.0) - big(PI / 6.0), 2.0 * (third + two_third - 2.0 * sixth)),
        ("Φ(2π/3) − Φ(π/3)", big(2.0 * PI / 3.0) - big(PI / 3.0), 4.0 * (two_third - third)),
    ];
    for (name, got, want) in gaps {
        check((got - want).abs() <= 1e-6, format!("{name} = {got}, closed form {want}"))?;
    }
    Ok(format!("φ(2π/3) − φ(π/3) = {:.6}", gaps[1].1))
}

fn c4_oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let params = [(2, 3.0), (2, 4.5), (2, 5.0), (3, 5.0), (3, 4.5)];
    let phis: Vec<Interaction> = params
        .iter()
        .map(|&(n, a)| Interaction::new(SpaceParams::new(n, a).unwrap()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let phi = &phis[trial % phis.len()];
        let n = rng.gen_range(1..=8);
        let c = loop {
            let c = CircleConfig::new((0..n).map(|_| rng.gen_range(0.0..TAU)).collect()).unwrap();
            if c.min_gap() > 1e-3 {
                break c;
            }
        };
        let ps = config_norm_sq_powersum(phi.params(), &c, default_powersum_cap(phi.params(), n))
            .map_err(|e| e.to_string())?;
        let e = config_energy(phi, &c).map_err(|e| e.to_string())?;
        let via = n as f64 * phi.at_zero().value + e.value;
        let rel = (ps.value - via).abs() / ps.value;
        worst = worst.max(rel);
        check(rel <= 1e-8, format!("trial {trial}: relative discrepancy {rel:e}"))?;
    }
    within_time(t.elapsed(), 60.0, "oracle equivalence")?;
    Ok(format!("100 configs, max relative discrepancy {worst:.1e}"))
}

fn c5_asymptotics() -> Outcome {
    let p = p23();
    let limit = asymptotic_limit_constant(p).map_err(|e| e.to_string())?;
    check((limit - 4.0 * PI * PI).abs() < 1e-10, format!("limit constant {limit}"))?;
    let v = |n: u64| psi_norm_sq(p, n).map(|v| v.value).map_err(|e| e.to_string());
    let one = v(1)?;
    check((one - 6.0).abs() <= 1e-9, format!("‖Ψ_1‖² = {one}"))?;
    let (a, b, c) = (v(200)?, v(1000)?, v(2000)?);
    check((b - limit).abs() / limit <= 0.05, format!("n=1000 value {b} vs {limit}"))?;
    check((c - limit).abs() < (a - limit).abs(), "gap at n=2000 not below gap at n=200")?;
    Ok(format!("n=200: {a:.6}, n=1000: {b:.6}, n=2000: {c:.6}, limit 4π² = {limit:.6}"))
}

fn c6_threshold() -> Outcome {
    for n in 2..=6u32 {
        let r = threshold_check(n).map_err(|e| e.to_string())?;
        check(r.threshold == (n * n - 1) as usize, format!("N={n}: threshold {}", r.threshold))?;
        check(r.residual <= 1e-12, format!("N={n}: residual {:e}", r.residual))?;
    }
    let seq = thm14_coefficients(2, 102).map_err(|e| e.to_string())?;
    let a = seq.values();
    for m in 2..=100usize {
        let mf = m as f64;
        let t = (mf + 1.0) * a[m] - mf * a[m + 1];
        let want = (8.0 * mf + 6.0) / ((mf + 2.0) * (mf + 3.0));
        check((t - want).abs() <= 1e-12, format!("m={m}: {t} vs {want}"))?;
    }
    Ok("thresholds 3, 8, 15, 24, 35 for N = 2..6".into())
}

fn c7_convexify() -> Outcome {
    let seq = thm14_coefficients(2, 10_000).map_err(|e| e.to_string())?;
    let r = convexify(&seq).map_err(|e| e.to_string())?;
    check(r.n0 == 3, format!("N0 = {}", r.n0))?;
    for (got, want) in r.modified.iter().zip([1.0, 0.9, 0.8]) {
        check((got - want).abs() <= 1e-15, format!("modified prefix {:?}", r.modified))?;
    }
    let c = check_convexify(&seq, &r);
    check(c.all(), format!("clauses {c:?}"))?;
    Ok(format!("N0 = 3, prefix {:?}, all five clauses hold", r.modified))
}

fn c8_moment_sampling() -> Outcome {
    let t = Instant::now();
    let phi = Interaction::new(p23()).map_err(|e| e.to_string())?;
    let mut worst = f64::INFINITY;
    for n in [6usize, 9] {
        for seed in 0..1000u64 {
            let c = sample_wn_structured(n, 2, seed).map_err(|e| e.to_string())?;
            let r = thm14_verify_with(&phi, &c).map_err(|e| e.to_string())?;
            check(r.holds, format!("n={n} seed={seed}: energy {} < {}", r.energy, r.equi_energy))?;
            worst = worst.min(r.energy - r.equi_energy);
        }
    }
    within_time(t.elapsed(), 180.0, "moment sampling")?;
    Ok(format!("2000 samples, min(energy − equidistribution) = {worst:.3e}"))
}

fn c9_powersum_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1000 {
        let n = rng.gen_range(1..=20);
        let n_degree = rng.gen_range(1..=3);
        let c = CircleConfig::new((0..n).map(|_| rng.gen_range(0.0..TAU)).collect()).unwrap();
        let b = powersum_lower_bound_check(&c, n_degree).map_err(|e| e.to_string())?;
        check(b.holds, format!("config {i}: {} < {}", b.lhs, b.rhs))?;
    }
    let tri = powersum_lower_bound_check(&CircleConfig::equidistributed(3).unwrap(), 2).map_err(|e| e.to_string())?;
    check((tri.lhs - 36.0).abs() < 1e-9 && tri.rhs == 15.0, format!("3-gon gives ({}, {})", tri.lhs, tri.rhs))?;
    Ok("1000 random configs, zero violations; 3-gon (36, 15)".into())
}

fn c10_optimizer() -> Outcome {
    let phi = Interaction::new(p23()).map_err(|e| e.to_string())?;
    let brent = two_point_minimize_with(&phi).map_err(|e| e.to_string())?;
    let multi = npoint_minimize_with(&phi, 2, 64, 0).map_err(|e| e.to_string())?;
    let diff = (multi.energy - brent.energy).abs();
    check(diff <= 1e-6, format!("multistart {} vs Brent {}", multi.energy, brent.energy))?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=6);
        let c = loop {
            let c = CircleConfig::new((0..n).map(|_| rng.gen_range(0.0..TAU)).collect()).unwrap();
            if c.min_gap() > 0.05 {
                break c;
            }
        };
        let g = energy_gradient_with(&phi, c.angles()).map_err(|e| e.to_string())?;
        for j in 0..n {
            let e = |d: f64| {
                let mut a = c.angles().to_vec();
                a[j] += d;
                config_energy(&phi, &CircleConfig::new(a).unwrap()).map(|v| v.value)
            };
            let h = 1e-5;
            let fd = (e(h).map_err(|e| e.to_string())? - e(-h).map_err(|e| e.to_string())?) / (2.0 * h);
            let rel = (g[j] - fd).abs() / g[j].abs().max(1.0);
            worst = worst.max(rel);
            check(rel <= 1e-5, format!("gradient {} vs difference {fd}", g[j]))?;
        }
    }
    Ok(format!("|multistart − Brent| = {diff:.1e}, max gradient rel err {worst:.1e}"))
}

fn c11_fejer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let c1: f64 = rng.gen_range(0.1..2.0);
        let r: f64 = rng.gen_range(0.05..0.95);
        let c2: f64 = rng.gen_range(0.0..2.0);
        let q: f64 = rng.gen_range(0.5..3.0);
        let values = (0..4003)
            .map(|n| c1 * r.powi(n) + c2 / (n as f64 + 1.0).powf(q))
            .collect();
        let seq = RealSequencePrefix::new(values).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let theta = rng.gen_range(0.05..TAU - 0.05);
            let f = fejer_identity_check(&seq, theta, 4000).map_err(|e| e.to_string())?;
            check((f.lhs - f.rhs).abs() <= f.bound, format!("θ={theta}: {f:?}"))?;
            worst_ratio = worst_ratio.max((f.lhs - f.rhs).abs() / f.bound);
        }
    }
    let g = RealSequencePrefix::new((0..300).map(|m| 0.5f64.powi(m)).collect()).map_err(|e| e.to_string())?;
    for (theta, want) in [(PI, 1.0 / 6.0), (PI / 2.0, 0.3)] {
        let f = fejer_identity_check(&g, theta, 200).map_err(|e| e.to_string())?;
        check(
            (f.lhs - want).abs() <= 1e-8 && (f.rhs - want).abs() <= 1e-8,
            format!("geometric at {theta}: {f:?}"),
        )?;
    }
    Ok(format!("400 cases within bounds (max |lhs − rhs|/bound = {worst_ratio:.2}); geometric 1/6 and 0.3"))
}

fn c12_reconstruction() -> Outcome {
    let d = phi_star_decomposition(2, 1e-6).map_err(|e| e.to_string())?;
    let s = build_series(p23(), DEFAULT_TOL).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let theta = rng.gen_range(0.0..TAU);
        let diff = (d.reconstruct(theta).value - phi_series(&s, theta).value).abs();
        worst = worst.max(diff);
        check(diff <= 1e-6, format!("θ={theta}: difference {diff:e}"))?;
    }
    Ok(format!("100 angles, max difference {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("closed-form φ values", c1_closed_forms),
        ("counterexample minimizer", c2_minimizer),
        ("counterexample orderings", c3_orderings),
        ("oracle equivalence of norm formulas", c4_oracle_equivalence),
        ("asymptotic norm constant", c5_asymptotics),
        ("threshold N²−1", c6_threshold),
        ("convexification", c7_convexify),
        ("moment-constrained sampling", c8_moment_sampling),
        ("power-sum inequality", c9_powersum_bound),
        ("optimizer quality", c10_optimizer),
        ("Bari/Fejér identity", c11_fejer),
        ("φ reconstruction at α*", c12_reconstruction),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
