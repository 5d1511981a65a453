//! Command-line front end. The binary is a thin wrapper over [`run`], which
//! takes its output streams as arguments so tests can drive it in-process.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::profile::{OdeTolerances, Profile, ProfileSolution};
use crate::report::{self, Format};
use crate::verifier::{self, VerificationConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hpkahler",
    version,
    about = "Build and verify cohomogeneity-one Kähler metrics on CP^n"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the profile ODE and tabulate t, h, h', f, phi on [0, L].
    Profile(ProfileArgs),
    /// Check a profile polynomial against the admissibility conditions.
    Validate(SourceArgs),
    /// Run every check for one (alpha, n).
    Verify(VerifyArgs),
    /// Run `verify` over a list of alpha values.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Family parameter: P = (1 - t^2)(1 + alpha t^2 (1 - t^2)).
    #[arg(
        long,
        allow_hyphen_values = true,
        conflicts_with = "coeffs",
        required_unless_present = "coeffs"
    )]
    pub alpha: Option<f64>,
    /// Raw ascending polynomial coefficients, comma separated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the full output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Number of uniformly spaced rows in the table.
    #[arg(long, default_value_t = 101)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Complex dimension of CP^n.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub samples_t: usize,
    #[arg(long, default_value_t = 2)]
    pub samples_base: usize,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Override a check threshold, e.g. `--tol hp=1e-8`. Repeatable.
    #[arg(long = "tol", value_parser = parse_tol)]
    pub tol: Vec<(String, f64)>,
    /// Distance kept from both singular orbits, as a fraction of L.
    #[arg(long, default_value_t = crate::geometry::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Absolute floor in the denominator of the relative HP residual.
    #[arg(long, default_value_t = crate::algebra::DEFAULT_HP_FLOOR)]
    pub hp_floor: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma separated alpha values.
    #[arg(
        long,
        allow_hyphen_values = true,
        value_delimiter = ',',
        required = true
    )]
    pub alphas: Vec<f64>,
    #[command(flatten)]
    pub run: RunArgs,
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|e| format!("bad value in {s:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

impl RunArgs {
    pub fn config(&self, alpha: f64) -> VerificationConfig {
        let mut cfg = VerificationConfig::new(alpha, self.n);
        cfg.samples_t = self.samples_t;
        cfg.samples_base = self.samples_base;
        cfg.seed = self.seed;
        cfg.margin = self.margin;
        cfg.hp_floor = self.hp_floor;
        for (k, v) in &self.tol {
            cfg.tolerances.insert(k.clone(), *v);
        }
        cfg
    }
}

impl SourceArgs {
    fn profile(&self) -> Result<Profile> {
        match (&self.alpha, &self.coeffs) {
            (Some(a), _) => Profile::p_alpha(*a),
            (None, Some(c)) => Ok(Profile::from_coeffs(c.clone())),
            (None, None) => Err(Error::Config("pass --alpha or --coeffs".into())),
        }
    }
}

/// Input problems exit with 2; numerical breakdowns count as failed checks.
fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::PositivityViolation { .. }
        | Error::InvalidProfile(_)
        | Error::Config(_)
        | Error::DimensionMismatch { .. }
        | Error::Io(_) => EXIT_INPUT_ERROR,
        Error::AtPoint { source, .. } => exit_code_for(source),
        _ => EXIT_CHECK_FAILED,
    }
}

fn report_error(e: &Error, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if let Error::PositivityViolation { witness_t, value } = e {
        let _ = writeln!(err, "witness: t = {witness_t:.16}, P(t) = {value:.16e}");
    }
    exit_code_for(e)
}

fn emit(output: &OutputArgs, body: &str, out: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(path) => report::write_atomic(path, body),
        None => out.write_all(body.as_bytes()).map_err(Error::from),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_PASS
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_INPUT_ERROR
                }
            };
        }
    };
    match dispatch(&cli.command, out) {
        Ok(code) => code,
        Err(e) => report_error(&e, err),
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Profile(a) => cmd_profile(a, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    }
}

pub fn cmd_profile(a: &ProfileArgs, out: &mut dyn Write) -> Result<i32> {
    let profile = a.source.profile()?;
    let sol = ProfileSolution::solve(&profile, &OdeTolerances::default())?;
    let dump = report::profile_dump(&sol, a.points)?;
    emit(
        &a.output,
        &report::render_profile(&dump, a.output.format),
        out,
    )?;
    if a.output.out.is_some() {
        writeln!(out, "L = {}", report::num(dump.length))?;
        writeln!(
            out,
            "max boundary residual = {:.3e}",
            dump.boundary.max_endpoint()
        )?;
    }
    Ok(EXIT_PASS)
}

pub fn cmd_validate(a: &SourceArgs, out: &mut dyn Write) -> Result<i32> {
    let profile = match &a.alpha {
        Some(alpha) => Profile::p_alpha_unchecked(*alpha),
        None => Profile::from_coeffs(a.coeffs.clone().unwrap_or_default()),
    };
    let outcome = profile.validate();
    for c in &outcome.clauses {
        writeln!(
            out,
            "{:<20} {:<4} residual {:.3e}",
            c.name,
            if c.passed { "ok" } else { "FAIL" },
            c.residual
        )?;
    }
    if let Some(w) = outcome.witness {
        writeln!(out, "witness: t = {w:.16}, P(t) = {:.16e}", profile.eval(w))?;
    }
    Ok(if outcome.passed() {
        EXIT_PASS
    } else {
        EXIT_INPUT_ERROR
    })
}

fn summary_line(r: &verifier::VerificationReport) -> String {
    let failed: Vec<&str> = r
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    format!(
        "alpha = {} n = {} L = {:.12} min phi = {:.3e} max hp = {:.2e} max qch = {:.2e}: {}",
        r.config.alpha,
        r.config.n,
        r.profile.length,
        r.phi_sign_summary.min,
        r.check("hp").map_or(f64::NAN, |c| c.max),
        r.check("qch").map_or(f64::NAN, |c| c.max),
        if failed.is_empty() {
            "PASS".to_string()
        } else {
            format!("FAIL ({})", failed.join(", "))
        }
    )
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = a.run.config(a.alpha);
    let r = verifier::run_verification(&cfg)?;
    let body = report::render_report(&r, a.run.output.format);
    emit(&a.run.output, &body, out)?;
    if a.run.output.out.is_some() {
        writeln!(out, "{}", summary_line(&r))?;
    }
    Ok(if r.passed() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    })
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<i32> {
    let template = a.run.config(0.0);
    template.validate()?;
    let entries = verifier::sweep(&a.alphas, a.run.n, &template);
    let rows = report::sweep_rows(&entries);
    emit(
        &a.run.output,
        &report::render_sweep(&rows, a.run.output.format),
        out,
    )?;
    if a.run.output.out.is_some() {
        out.write_all(report::render_sweep(&rows, Format::Md).as_bytes())?;
    }
    Ok(if rows.iter().all(|r| r.passed) {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    })
}
