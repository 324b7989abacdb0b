//! Check suites behind `verify`.

use std::f64::consts::{LN_2, PI};

use bergfrac::interaction::{build_series, phi_series, stationarity_n2a3, Interaction, DEFAULT_TOL};
use bergfrac::moments::{powersum_lower_bound_check, sample_wn_structured, thm14_verify_with};
use bergfrac::norms::{asymptotic_limit_constant, psi_norm_sq};
use bergfrac::optimize::{brent_root, npoint_minimize_with, two_point_minimize_with};
use bergfrac::sequences::{
    check_convexify, convexify, fejer_identity_check, phi_star_decomposition, thm14_coefficients, threshold_check,
};
use bergfrac::{CircleConfig, RealSequencePrefix, SpaceParams};
use clap::ValueEnum;
use rayon::prelude::*;

use crate::output::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(alias = "paper")]
    Full,
    Convexity,
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Relation {
    /// `|got − expected| ≤ tolerance`
    Approx,
    /// `got < expected`
    Less,
}

#[derive(Debug, Clone)]
pub struct Check {
    name: String,
    relation: Relation,
    expected: f64,
    got: f64,
    tolerance: f64,
    error: Option<String>,
}

impl Check {
    fn approx(name: impl Into<String>, got: f64, expected: f64, tolerance: f64) -> Self {
        Self { name: name.into(), relation: Relation::Approx, expected, got, tolerance, error: None }
    }

    fn less(name: impl Into<String>, got: f64, bound: f64) -> Self {
        Self { name: name.into(), relation: Relation::Less, expected: bound, got, tolerance: 0.0, error: None }
    }

    fn failed(name: &str, why: String) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Approx,
            expected: f64::NAN,
            got: f64::NAN,
            tolerance: 0.0,
            error: Some(why),
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none()
            && match self.relation {
                Relation::Approx => (self.got - self.expected).abs() <= self.tolerance,
                Relation::Less => self.got < self.expected,
            }
    }

    pub fn row(&self) -> Vec<Cell> {
        let relation = match self.relation {
            Relation::Approx => "approx",
            Relation::Less => "less",
        };
        let status = match (&self.error, self.passed()) {
            (Some(e), _) => format!("error: {e}"),
            (None, true) => "pass".into(),
            (None, false) => "fail".into(),
        };
        vec![
            Cell::Text(self.name.clone()),
            Cell::Text(relation.into()),
            Cell::Float(self.expected),
            Cell::Float(self.got),
            Cell::Float(self.tolerance),
            Cell::Text(status),
        ]
    }
}

pub const HEADER: [&str; 6] = ["check", "relation", "expected", "got", "tolerance", "status"];

type Group = fn() -> bergfrac::Result<Vec<Check>>;

fn p23() -> SpaceParams {
    SpaceParams::new(2, 3.0).expect("(2, 3) is admissible")
}

fn closed_forms() -> bergfrac::Result<Vec<Check>> {
    let s = build_series(p23(), DEFAULT_TOL)?;
    let phi = |t: f64| phi_series(&s, t).value;
    let s3 = 3f64.sqrt();
    let sixth = -48.0 + 18.0 * (1.0 + s3) + (15.0 - 12.0 * s3) * (2.0 - s3).ln() - 2.5 * PI * (3.0 * s3 - 4.0);
    let exact = [
        ("phi(0) = 6", 0.0, 6.0),
        ("phi(pi) = 96 ln2 - 66", PI, 96.0 * LN_2 - 66.0),
        ("phi(pi/2) = -30 + 12pi - 12 ln2", PI / 2.0, -30.0 + 12.0 * PI - 12.0 * LN_2),
        ("phi(pi/3) = -12 + 2pi sqrt3", PI / 3.0, -12.0 + 2.0 * PI * s3),
        ("phi(2pi/3) = -48 + 7pi sqrt3 + 9 ln3", 2.0 * PI / 3.0, -48.0 + 7.0 * PI * s3 + 9.0 * 3f64.ln()),
        ("phi(pi/6) closed form", PI / 6.0, sixth),
    ];
    let quoted = [
        ("phi(pi) ~ 0.542", PI, 0.542),
        ("phi(pi/2) ~ -0.618", PI / 2.0, -0.618),
        ("phi(pi/3) ~ -1.117", PI / 3.0, -1.117),
        ("phi(2pi/3) ~ -0.022", 2.0 * PI / 3.0, -0.022),
        ("phi(pi/6) ~ -0.6", PI / 6.0, -0.6),
    ];
    let mut out: Vec<Check> = exact.iter().map(|&(n, t, v)| Check::approx(n, phi(t), v, 1e-8)).collect();
    out.extend(quoted.iter().map(|&(n, t, v)| Check::approx(n, phi(t), v, 1e-3)));
    Ok(out)
}

fn minimizer() -> bergfrac::Result<Vec<Check>> {
    let phi = Interaction::new(p23())?;
    let root = brent_root(stationarity_n2a3, 0.5, 1.5, 1e-14)?;
    let two = two_point_minimize_with(&phi)?;
    Ok(vec![
        Check::approx("stationarity root ~ 0.91981", root, 0.91981, 1e-5),
        Check::approx("two-point minimizer ~ 0.91981", two.config.angles()[1], 0.91981, 1e-5),
        Check::approx("phi(theta_min) ~ -1.14963", phi.value(root).value, -1.14963, 1e-5),
        Check::less("two-point energy < 2 phi(pi)", two.energy, two.equidistribution_energy),
    ])
}

fn counterexample() -> bergfrac::Result<Vec<Check>> {
    let phi = Interaction::new(p23())?;
    let f = |t: f64| phi.value(t).value;
    let big = |t: f64| 2.0 * (2.0 * f(t) + f(2.0 * t));
    let three = npoint_minimize_with(&phi, 3, 64, 0)?;
    Ok(vec![
        Check::less("phi(pi/2) < phi(pi)", f(PI / 2.0), f(PI)),
        Check::less("Phi(pi/6) < Phi(pi/3)", big(PI / 6.0), big(PI / 3.0)),
        Check::less("Phi(pi/3) < Phi(2pi/3)", big(PI / 3.0), big(2.0 * PI / 3.0)),
        Check::less("three-point energy < Phi(2pi/3)", three.energy, big(2.0 * PI / 3.0)),
    ])
}

fn norms() -> bergfrac::Result<Vec<Check>> {
    let p = p23();
    let tri = powersum_lower_bound_check(&CircleConfig::equidistributed(3)?, 2)?;
    Ok(vec![
        Check::approx("|Psi_1|^2 = 6", psi_norm_sq(p, 1)?.value, 6.0, 1e-9),
        Check::approx("|Psi_2|^2 = 192 ln2 - 120", psi_norm_sq(p, 2)?.value, 192.0 * LN_2 - 120.0, 1e-8),
        Check::approx("limit constant (2,3) = 4pi^2", asymptotic_limit_constant(p)?, 4.0 * PI * PI, 1e-10),
        Check::approx(
            "limit constant (1,1) = pi^2/3",
            asymptotic_limit_constant(SpaceParams::new(1, 1.0)?)?,
            PI * PI / 3.0,
            1e-10,
        ),
        Check::approx("power sums of 3-gon, N=2", tri.lhs, 36.0, 1e-9),
        Check::approx("power-sum lower bound of 3-gon, N=2", tri.rhs, 15.0, 0.0),
    ])
}

fn threshold() -> bergfrac::Result<Vec<Check>> {
    (2..=6u32)
        .map(|n| {
            let r = threshold_check(n)?;
            Ok(Check::approx(
                format!("threshold N={n} is N^2-1"),
                r.threshold as f64,
                (n * n - 1) as f64,
                0.0,
            ))
        })
        .collect()
}

fn convexification() -> bergfrac::Result<Vec<Check>> {
    let seq = thm14_coefficients(2, 10_000)?;
    let r = convexify(&seq)?;
    let clauses = check_convexify(&seq, &r);
    let geometric = RealSequencePrefix::new((0..300).map(|m| 0.5f64.powi(m)).collect())?;
    let fejer = fejer_identity_check(&geometric, PI, 200)?;
    let mut out = vec![Check::approx("convexify N=2: N0", r.n0 as f64, 3.0, 0.0)];
    for (k, want) in [1.0, 0.9, 0.8].into_iter().enumerate() {
        let got = r.modified.get(k).copied().unwrap_or(f64::NAN);
        out.push(Check::approx(format!("convexify N=2: a~_{k}"), got, want, 1e-15));
    }
    out.push(Check::approx(
        "convexify N=2: all five clauses",
        clauses.all() as u8 as f64,
        1.0,
        0.0,
    ));
    out.push(Check::approx("Fejer identity, 2^-n at pi: lhs", fejer.lhs, 1.0 / 6.0, 1e-8));
    out.push(Check::approx("Fejer identity, 2^-n at pi: rhs", fejer.rhs, 1.0 / 6.0, 1e-8));
    Ok(out)
}

fn moments() -> bergfrac::Result<Vec<Check>> {
    let phi = Interaction::new(p23())?;
    let mut worst = f64::INFINITY;
    for n in [6usize, 9] {
        for seed in 0..50u64 {
            let r = thm14_verify_with(&phi, &sample_wn_structured(n, 2, seed)?)?;
            worst = worst.min(r.energy - r.equi_energy);
        }
    }
    Ok(vec![Check::less("W_n samples: equidistribution energy - sample energy", -worst, 1e-9)])
}

fn reconstruction() -> bergfrac::Result<Vec<Check>> {
    let d = phi_star_decomposition(2, 1e-6)?;
    Ok(vec![
        Check::approx("reconstruction at pi", d.reconstruct(PI).value, 96.0 * LN_2 - 66.0, 1e-6),
        Check::approx(
            "reconstruction at pi/2",
            d.reconstruct(PI / 2.0).value,
            -30.0 + 12.0 * PI - 12.0 * LN_2,
            1e-6,
        ),
    ])
}

fn groups(suite: Suite) -> Vec<(&'static str, Group)> {
    let counter: Vec<(&'static str, Group)> = vec![("minimizer", minimizer), ("counterexample", counterexample)];
    let convex: Vec<(&'static str, Group)> = vec![("threshold", threshold), ("convexification", convexification)];
    match suite {
        Suite::Counterexample => counter,
        Suite::Convexity => convex,
        Suite::Full => {
            let mut all: Vec<(&'static str, Group)> = vec![("closed forms", closed_forms)];
            all.extend(counter);
            all.push(("norms", norms));
            all.extend(convex);
            all.push(("moments", moments));
            all.push(("reconstruction", reconstruction));
            all
        }
    }
}

/// Run a suite; groups run in parallel and are merged in declaration order.
pub fn run(suite: Suite) -> Vec<Check> {
    groups(suite)
        .par_iter()
        .map(|(name, g)| g().unwrap_or_else(|e| vec![Check::failed(name, e.to_string())]))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}
