//! `nlcs` command-line front end.
//!
//! Settings come from flags, then an optional `--config` file of
//! `key = value` lines, then built-in defaults, in that order of precedence.
//!
//! Exit status: 0 on success, 1 when a moment verification fails (the report
//! is still written), 2 for usage and parameter errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::families::{make_family, FamilyId, FamilyParams, FamilySpec};
use crate::measures::measure_for;
use crate::states::build_state;
use crate::verify::{real_str, verify_moments};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_N_MAX: usize = 20;
pub const DEFAULT_VERIFY_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_STATE_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_GRID: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    ListFamilies,
    VerifyMoments,
    MeasureEval,
    StateCoeffs,
    Radius,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::ListFamilies => "list-families",
            Command::VerifyMoments => "verify-moments",
            Command::MeasureEval => "measure-eval",
            Command::StateCoeffs => "state-coeffs",
            Command::Radius => "radius",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Command as ValueEnum>::from_str(s.trim(), true)
            .map_err(|_| Error::Parse(format!("unknown command '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Structured,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "structured" => Ok(Format::Structured),
            "json" => Ok(Format::Json),
            _ => Err(Error::Parse(format!(
                "unknown format '{s}' (expected csv, structured or json)"
            ))),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "nlcs",
    version,
    about = "Nonlinear coherent states: Borel measures and completeness checks",
    allow_negative_numbers = true
)]
struct Cli {
    /// Subcommand; may instead come from the config file's `command` key.
    #[arg(value_enum)]
    command: Option<Command>,
    /// glauber, su11, barut-girardello, nc-oscillator or nc-poschl-teller
    #[arg(long)]
    family: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    j: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<f64>,
    /// Highest moment checked by verify-moments [default: 20]
    #[arg(long)]
    n_max: Option<usize>,
    /// Report tolerance (verify-moments, default 1e-8) or truncation
    /// tolerance (state-coeffs, default 1e-12)
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_im: Option<f64>,
    /// Number of points for measure-eval [default: 200]
    #[arg(long)]
    grid: Option<usize>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, structured or json
    #[arg(long)]
    format: Option<String>,
    /// File of `key = value` settings
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Settings before defaults are applied; every field may be absent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub command: Option<Command>,
    pub family: Option<String>,
    pub params: FamilyParams,
    pub n_max: Option<usize>,
    pub tolerance: Option<f64>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub grid: Option<usize>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RawConfig {
    /// Parse a config file body. Keys: `command family tau j gamma epsilon
    /// n_max tolerance alpha_re alpha_im grid out format`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RawConfig::default();
        let mut seen: Vec<String> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "config line {}: expected 'key = value', got '{raw}'",
                    i + 1
                ))
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            if seen.contains(&key) {
                return Err(Error::Parse(format!(
                    "config line {}: duplicate key '{key}'",
                    i + 1
                )));
            }
            let bad = || {
                Error::Parse(format!(
                    "config line {}: bad value for {key}: '{value}'",
                    i + 1
                ))
            };
            match key.as_str() {
                "command" => cfg.command = Some(value.parse()?),
                "family" => cfg.family = Some(value.to_string()),
                "tau" => cfg.params.tau = Some(value.parse().map_err(|_| bad())?),
                "j" => cfg.params.j = Some(value.parse().map_err(|_| bad())?),
                "gamma" => cfg.params.gamma = Some(value.parse().map_err(|_| bad())?),
                "epsilon" => cfg.params.epsilon = Some(value.parse().map_err(|_| bad())?),
                "n_max" => cfg.n_max = Some(value.parse().map_err(|_| bad())?),
                "tolerance" | "tol" => cfg.tolerance = Some(value.parse().map_err(|_| bad())?),
                "alpha_re" => cfg.alpha_re = Some(value.parse().map_err(|_| bad())?),
                "alpha_im" => cfg.alpha_im = Some(value.parse().map_err(|_| bad())?),
                "grid" => cfg.grid = Some(value.parse().map_err(|_| bad())?),
                "out" | "output_path" => cfg.output_path = Some(PathBuf::from(value)),
                "format" => cfg.format = Some(value.parse()?),
                _ => {
                    return Err(Error::Parse(format!(
                        "config line {}: unknown key '{key}'",
                        i + 1
                    )))
                }
            }
            seen.push(key);
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RawConfig) -> RawConfig {
        RawConfig {
            command: over.command.or(self.command),
            family: over.family.or(self.family),
            params: FamilyParams {
                tau: over.params.tau.or(self.params.tau),
                j: over.params.j.or(self.params.j),
                gamma: over.params.gamma.or(self.params.gamma),
                epsilon: over.params.epsilon.or(self.params.epsilon),
            },
            n_max: over.n_max.or(self.n_max),
            tolerance: over.tolerance.or(self.tolerance),
            alpha_re: over.alpha_re.or(self.alpha_re),
            alpha_im: over.alpha_im.or(self.alpha_im),
            grid: over.grid.or(self.grid),
            output_path: over.output_path.or(self.output_path),
            format: over.format.or(self.format),
        }
    }
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    /// `None` only for `list-families`.
    pub family: Option<FamilySpec>,
    pub n_max: usize,
    pub tolerance: f64,
    pub alpha: Complex64,
    pub grid: usize,
    pub output_path: Option<PathBuf>,
    /// `None` for the plain-text commands `list-families` and `radius`.
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn resolve(raw: RawConfig) -> Result<Self> {
        let command = raw.command.ok_or_else(|| {
            Error::Parse(
                "no command given (list-families, verify-moments, measure-eval, state-coeffs, radius)"
                    .into(),
            )
        })?;
        let family = match (&raw.family, command) {
            (_, Command::ListFamilies) => None,
            (Some(name), _) => Some(make_family(name.parse()?, &raw.params)?),
            (None, _) => {
                return Err(Error::param(format!(
                    "{} requires --family",
                    command.name()
                )))
            }
        };
        let tolerance = raw.tolerance.unwrap_or(match command {
            Command::StateCoeffs => DEFAULT_STATE_TOLERANCE,
            _ => DEFAULT_VERIFY_TOLERANCE,
        });
        let format = match (command, raw.format) {
            (Command::VerifyMoments, f) => Some(f.unwrap_or(Format::Structured)),
            (Command::MeasureEval | Command::StateCoeffs, None | Some(Format::Csv)) => {
                Some(Format::Csv)
            }
            (Command::ListFamilies | Command::Radius, None) => None,
            (c, Some(f)) => {
                return Err(Error::param(format!(
                    "{} does not support the {f:?} output format",
                    c.name()
                )))
            }
        };
        Ok(RunConfig {
            command,
            family,
            n_max: raw.n_max.unwrap_or(DEFAULT_N_MAX),
            tolerance,
            alpha: Complex64::new(raw.alpha_re.unwrap_or(0.0), raw.alpha_im.unwrap_or(0.0)),
            grid: raw.grid.unwrap_or(DEFAULT_GRID),
            output_path: raw.output_path,
            format,
        })
    }

    fn family(&self) -> FamilySpec {
        self.family.expect("resolved family")
    }
}

/// Rendered output of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    /// `false` only for a failed verification.
    pub passed: bool,
}

/// Compute the output of `config` without writing it anywhere.
pub fn render(config: &RunConfig) -> Result<Output> {
    let ok = |text| Ok(Output { text, passed: true });
    match config.command {
        Command::ListFamilies => {
            let mut text = String::new();
            for id in FamilyId::ALL {
                let params = match id.parameter_names() {
                    [] => "-".to_string(),
                    names => names.join(","),
                };
                let _ = writeln!(
                    text,
                    "{:<18} {:<18} {}",
                    id.name(),
                    params,
                    id.description()
                );
            }
            ok(text)
        }
        Command::Radius => ok(format!("{}\n", config.family().radius_of_convergence())),
        Command::MeasureEval => {
            let measure = measure_for(&config.family());
            let mut text = String::from("t,omega,log_omega\n");
            for t in measure.log_spaced_grid(config.grid)? {
                let ln = measure.log_density(t)?;
                let _ = writeln!(
                    text,
                    "{},{},{}",
                    real_str(t),
                    real_str(ln.exp()),
                    real_str(ln)
                );
            }
            ok(text)
        }
        Command::StateCoeffs => {
            let state = build_state(&config.family(), config.alpha, config.tolerance)?;
            let mut text = String::from("n,prob,phase\n");
            for (n, (lm, ph)) in state
                .log_magnitudes()
                .iter()
                .zip(state.phases())
                .enumerate()
            {
                let _ = writeln!(text, "{n},{},{}", real_str((2.0 * lm).exp()), real_str(*ph));
            }
            ok(text)
        }
        Command::VerifyMoments => {
            let report = verify_moments(&config.family(), config.n_max, config.tolerance)?;
            let text = match config.format {
                Some(Format::Csv) => report.to_csv(),
                Some(Format::Json) => report.to_json(),
                _ => report.to_records(),
            };
            Ok(Output {
                text,
                passed: report.passed,
            })
        }
    }
}

/// Render `config`, write it to its destination and return the exit status.
pub fn run(config: &RunConfig) -> Result<i32> {
    let output = render(config)?;
    match &config.output_path {
        Some(path) => fs::write(path, &output.text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(output.text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Error::Parse(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(if output.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION_FAILED
    })
}

fn raw_from_flags(cli: &Cli) -> Result<RawConfig> {
    Ok(RawConfig {
        command: cli.command,
        family: cli.family.clone(),
        params: FamilyParams {
            tau: cli.tau,
            j: cli.j,
            gamma: cli.gamma,
            epsilon: cli.epsilon,
        },
        n_max: cli.n_max,
        tolerance: cli.tol,
        alpha_re: cli.alpha_re,
        alpha_im: cli.alpha_im,
        grid: cli.grid,
        output_path: cli.out.clone(),
        format: cli.format.as_deref().map(str::parse).transpose()?,
    })
}

/// Resolve the full configuration for a command line (without running it).
pub fn config_from_args<I, T>(args: I) -> std::result::Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(CliError::Clap)?;
    let flags = raw_from_flags(&cli).map_err(CliError::Config)?;
    let base = match &cli.config {
        Some(path) => RawConfig::load(path).map_err(CliError::Config)?,
        None => RawConfig::default(),
    };
    RunConfig::resolve(base.overlay(flags)).map_err(CliError::Config)
}

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Config(Error),
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match config_from_args(args) {
        Ok(c) => c,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            return e.exit_code();
        }
        Err(CliError::Config(e)) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match run(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn main_from_env() -> i32 {
    main_with_args(std::env::args_os())
}
