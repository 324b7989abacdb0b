//! `bergfrac`: Bergman-space norms and pole interaction energies from the
//! command line.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical non-convergence,
//! 3 verification failure.

mod output;
mod verify;

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bergfrac::interaction::{build_series, phi_closed_n2a3, phi_quadrature, phi_series, Interaction, DEFAULT_TOL};
use bergfrac::norms::{
    asymptotic_limit_constant, config_energy, config_norm_sq_powersum, default_powersum_cap, psi_norm_sq,
    scaled_norm_sequence,
};
use bergfrac::optimize::{npoint_minimize_with, two_point_minimize_with};
use bergfrac::{CircleConfig, Error, SpaceParams, ValueWithError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use output::{num, params, value_err, write_csv, Cell, Report};

#[derive(Parser)]
#[command(name = "bergfrac", version, about = "Norms and interaction energies of simple partial fractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Space {
    /// Pole order N of each partial fraction
    #[arg(long = "N", value_name = "N")]
    degree: u32,
    /// Weight exponent, must exceed 2(N-1)
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
}

impl Space {
    fn params(self) -> Result<SpaceParams, Failure> {
        Ok(SpaceParams::new(self.degree, self.alpha)?)
    }

    fn json(self) -> [(&'static str, Value); 2] {
        [("N", self.degree.into()), ("alpha", num(self.alpha))]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Series,
    Quadrature,
    Closed,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Quadrature => "quadrature",
            Method::Closed => "closed",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the interaction function at one angle or on a grid over [0, pi]
    Phi {
        #[command(flatten)]
        space: Space,
        /// Angle in radians
        #[arg(long, allow_negative_numbers = true, conflicts_with = "table", required_unless_present = "table")]
        theta: Option<f64>,
        /// Number of equally spaced samples on [0, pi]; writes CSV
        #[arg(long, value_name = "SAMPLES")]
        table: Option<usize>,
        #[arg(long, value_enum, default_value = "series")]
        method: Method,
        /// Truncation tolerance for the cosine series
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Minimize the pairwise energy of n poles
    Minimize {
        #[command(flatten)]
        space: Space,
        /// Number of poles
        #[arg(long)]
        n: usize,
        /// Number of random starts
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Squared norm of a pole configuration
    Norm {
        #[command(subcommand)]
        which: NormCommand,
    },
    /// Scaled norms of equidistributed configurations against their limit
    Asymptotics {
        #[command(flatten)]
        space: Space,
        /// Comma-separated list of pole counts
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
    },
    /// Run a check suite and print a pass/fail table
    Verify {
        #[arg(long, value_enum, default_value = "full")]
        suite: verify::Suite,
    },
}

#[derive(Subcommand)]
enum NormCommand {
    /// n equidistributed poles
    Psi {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        n: u64,
    },
    /// Poles read from a file, one angle in radians per line
    Config {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        angles_file: PathBuf,
        /// Number of monomial terms in the power-sum formula
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    NonConvergence(String),
    Verify(usize),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::NonConvergence(_) => 2,
            Failure::Verify(_) => 3,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            Failure::Invalid(_) => "invalid",
            Failure::NonConvergence(_) => "non-convergence",
            Failure::Verify(_) => "fail",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Invalid(m) | Failure::NonConvergence(m) => m.clone(),
            Failure::Verify(n) => format!("{n} check(s) failed"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::InsufficientData(_) => Failure::Invalid(e.to_string()),
            Error::NonConvergence { .. } | Error::InvariantViolation(_) => Failure::NonConvergence(e.to_string()),
        }
    }
}

/// What a command prints on success.
enum Output {
    Json(Report),
    Csv(Vec<&'static str>, Vec<Vec<Cell>>),
}

/// Result of a JSON command: the report so far plus how it ended.
type JsonRun = (Report, Result<(), Failure>);

fn json(mut r: Report, body: impl FnOnce(&mut Report) -> Result<(), Failure>) -> JsonRun {
    let res = body(&mut r);
    let res = res.and_then(|()| {
        if r.is_finite() {
            Ok(())
        } else {
            Err(Failure::NonConvergence("a computed value is not finite".into()))
        }
    });
    match &res {
        Ok(()) => r.status("ok"),
        Err(f) => r.status(f.status()).set("message", f.message().into()),
    };
    (r, res)
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("tolerance must be positive and finite, got {tol}")))
    }
}

fn phi_at(p: SpaceParams, method: Method, series: Option<&bergfrac::TruncatedCosineSeries>, theta: f64) -> Result<ValueWithError, Failure> {
    match method {
        Method::Series => Ok(phi_series(series.expect("series built for series method"), theta)),
        Method::Quadrature => Ok(phi_quadrature(p, theta)?),
        Method::Closed => {
            if p.degree != 2 || p.alpha != 3.0 {
                return Err(Failure::Invalid("the closed form exists only for N = 2, alpha = 3".into()));
            }
            Ok(ValueWithError::new(phi_closed_n2a3(theta)?, 1e-12))
        }
    }
}

fn cmd_phi(space: Space, theta: Option<f64>, table: Option<usize>, method: Method, tol: f64) -> Result<Output, Failure> {
    let prepare = || -> Result<_, Failure> {
        check_tol(tol)?;
        let p = space.params()?;
        let series = match method {
            Method::Series => Some(build_series(p, tol)?),
            _ => None,
        };
        Ok((p, series))
    };
    if let Some(samples) = table {
        if samples < 2 {
            return Err(Failure::Invalid("a table needs at least 2 samples".into()));
        }
        let (p, series) = prepare()?;
        let rows = (0..samples)
            .map(|k| {
                let theta = PI * k as f64 / (samples - 1) as f64;
                let v = phi_at(p, method, series.as_ref(), theta)?;
                Ok(vec![Cell::Float(theta), Cell::Float(v.value), Cell::Float(v.err)])
            })
            .collect::<Result<_, Failure>>()?;
        return Ok(Output::Csv(vec!["theta", "value", "err"], rows));
    }
    let theta = theta.expect("clap requires --theta without --table");
    let mut ps = params(space.json());
    ps.insert("theta".into(), num(theta));
    ps.insert("method".into(), method.name().into());
    ps.insert("tol".into(), num(tol));
    let (r, res) = json(Report::new("phi", ps), |r| {
        if !theta.is_finite() {
            return Err(Failure::Invalid("theta must be finite".into()));
        }
        let (p, series) = prepare()?;
        let v = phi_at(p, method, series.as_ref(), theta)?;
        r.value(v.value, v.err);
        Ok(())
    });
    finish_json(r, res)
}

fn finish_json(r: Report, res: Result<(), Failure>) -> Result<Output, Failure> {
    match res {
        Ok(()) => Ok(Output::Json(r)),
        Err(f) => {
            print_stdout(&r.render());
            Err(f)
        }
    }
}

fn cmd_minimize(space: Space, n: usize, starts: usize, seed: u64) -> Result<Output, Failure> {
    let mut ps = params(space.json());
    ps.insert("n".into(), n.into());
    ps.insert("starts".into(), starts.into());
    ps.insert("seed".into(), seed.into());
    let (r, res) = json(Report::new("minimize", ps), |r| {
        if n < 2 {
            return Err(Failure::Invalid("minimization needs at least 2 poles".into()));
        }
        if starts == 0 {
            return Err(Failure::Invalid("need at least one start".into()));
        }
        let phi = Interaction::new(space.params()?)?;
        let best = if n == 2 {
            two_point_minimize_with(&phi)?
        } else {
            npoint_minimize_with(&phi, n, starts, seed)?
        };
        let e = config_energy(&phi, &best.config)?;
        r.value(best.energy, e.err)
            .set("angles", Value::Array(best.config.angles().iter().map(|&a| num(a)).collect()))
            .set("norm_sq", num(best.norm_sq))
            .set("equidistribution_energy", num(best.equidistribution_energy))
            .set("below_equidistribution", best.below_equidistribution.into())
            .set("converged", best.converged.into())
            .set("iterations", best.iterations.into())
            .set("n_starts", best.n_starts.into());
        if n == 2 {
            r.set("theta_min", num(best.config.angles()[1]));
        }
        if best.converged {
            Ok(())
        } else {
            Err(Failure::NonConvergence("no local descent met its tolerances".into()))
        }
    });
    finish_json(r, res)
}

/// Largest pole count for which `norm psi` also runs the pairwise formulas.
const CROSS_CHECK_MAX_N: u64 = 200;

/// Fill the norm report from both formulas for configuration `c`.
fn norm_both(r: &mut Report, p: SpaceParams, c: &CircleConfig, cap: usize) -> Result<(ValueWithError, ValueWithError), Failure> {
    let phi = Interaction::new(p)?;
    let e = config_energy(&phi, c)?;
    let n = c.len() as f64;
    let zero = phi.at_zero();
    let via_phi = ValueWithError::new(n * zero.value + e.value, n * zero.err + e.err);
    let ps = config_norm_sq_powersum(p, c, cap)?;
    r.set("interaction", value_err(via_phi.value, via_phi.err))
        .set("powersum", value_err(ps.value, ps.err))
        .set("discrepancy", num((via_phi.value - ps.value).abs()));
    Ok((via_phi, ps))
}

fn cmd_norm_psi(space: Space, n: u64) -> Result<Output, Failure> {
    let mut ps = params(space.json());
    ps.insert("kind".into(), "psi".into());
    ps.insert("n".into(), n.into());
    let (r, res) = json(Report::new("norm", ps), |r| {
        if n == 0 {
            return Err(Failure::Invalid("n must be at least 1".into()));
        }
        let p = space.params()?;
        let v = psi_norm_sq(p, n)?;
        r.value(v.value, v.err);
        if n <= CROSS_CHECK_MAX_N {
            let c = CircleConfig::equidistributed(n as usize)?;
            norm_both(r, p, &c, default_powersum_cap(p, n as usize))?;
        }
        Ok(())
    });
    finish_json(r, res)
}

/// Angles from a text file: one decimal radian per line, `#` starts a comment.
fn read_angles(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let mut angles = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = || Failure::Invalid(format!("{}:{}: expected an angle in radians, got {body:?}", path.display(), i + 1));
        let a: f64 = body.parse().map_err(|_| bad())?;
        if !a.is_finite() {
            return Err(bad());
        }
        angles.push(a);
    }
    if angles.is_empty() {
        return Err(Failure::Invalid(format!("{}: no angles", path.display())));
    }
    Ok(angles)
}

fn cmd_norm_config(space: Space, file: &Path, cap: Option<usize>) -> Result<Output, Failure> {
    let mut ps = params(space.json());
    ps.insert("kind".into(), "config".into());
    ps.insert("angles_file".into(), file.display().to_string().into());
    if let Some(cap) = cap {
        ps.insert("cap".into(), cap.into());
    }
    let (r, res) = json(Report::new("norm", ps), |r| {
        let p = space.params()?;
        let c = CircleConfig::new(read_angles(file)?)?;
        let cap = cap.unwrap_or_else(|| default_powersum_cap(p, c.len()));
        let (v, _) = norm_both(r, p, &c, cap)?;
        r.value(v.value, v.err).set("n", c.len().into());
        Ok(())
    });
    finish_json(r, res)
}

fn cmd_asymptotics(space: Space, ns: &[u64]) -> Result<Output, Failure> {
    if ns.contains(&0) {
        return Err(Failure::Invalid("pole counts must be at least 1".into()));
    }
    let p = space.params()?;
    let limit = asymptotic_limit_constant(p)?;
    let rows = scaled_norm_sequence(p, ns)?
        .into_iter()
        .map(|s| {
            vec![
                Cell::Int(s.n),
                Cell::Float(s.scaled.value),
                Cell::Float(limit),
                Cell::Float(s.scaled.value / limit),
            ]
        })
        .collect();
    Ok(Output::Csv(vec!["n", "scaled", "limit", "ratio"], rows))
}

fn cmd_verify(suite: verify::Suite) -> Result<Output, Failure> {
    let checks = verify::run(suite);
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let rows: Vec<_> = checks.iter().map(verify::Check::row).collect();
    if failed > 0 {
        print_csv(&verify::HEADER, &rows);
        return Err(Failure::Verify(failed));
    }
    Ok(Output::Csv(verify::HEADER.to_vec(), rows))
}

fn print_stdout(s: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(s.as_bytes());
    let _ = out.flush();
}

fn print_csv(header: &[&str], rows: &[Vec<Cell>]) {
    if let Err(e) = write_csv(io::stdout().lock(), header, rows) {
        eprintln!("bergfrac: writing CSV failed: {e}");
    }
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Phi { space, theta, table, method, tol } => cmd_phi(space, theta, table, method, tol),
        Command::Minimize { space, n, starts, seed } => cmd_minimize(space, n, starts, seed),
        Command::Norm { which: NormCommand::Psi { space, n } } => cmd_norm_psi(space, n),
        Command::Norm { which: NormCommand::Config { space, angles_file, cap } } => {
            cmd_norm_config(space, &angles_file, cap)
        }
        Command::Asymptotics { space, n_list } => cmd_asymptotics(space, &n_list),
        Command::Verify { suite } => cmd_verify(suite),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Output::Json(r)) => {
            print_stdout(&r.render());
            ExitCode::SUCCESS
        }
        Ok(Output::Csv(header, rows)) => {
            print_csv(&header, &rows);
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("bergfrac: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
