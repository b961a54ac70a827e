//! `compfade`: curves, samples and the self-check battery from the command line.

mod curve;
mod output;

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compfade::validate::{self, Fault, Level};
use compfade::{mc, AefParams, AkfParams, Format, SeriesControl};
use thiserror::Error;

use curve::{CurveSpec, Grid, Quantity, Scale};

#[derive(Parser, Debug)]
#[command(name = "compfade", version, about = "Alpha-eta-F and alpha-kappa-F fading distributions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a density, CDF or outage curve on a grid.
    Curve(CurveArgs),
    /// Draw envelope samples from the physical model.
    Sample(SampleArgs),
    /// Run the self-check battery and print a JSON report.
    Validate(ValidateArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Dist {
    Aef,
    Akf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    NegateH2,
}

/// Shape parameters shared by `curve` and `sample`.
#[derive(Args, Debug)]
struct ShapeArgs {
    #[arg(long, value_enum)]
    dist: Dist,
    #[arg(long)]
    alpha: f64,
    /// Alpha-eta-F only.
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Alpha-kappa-F only.
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    mu: f64,
    #[arg(long)]
    ms: f64,
    /// Alpha-eta-F parameter format: 1 (power ratio) or 2 (correlation).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    fmt: Option<u8>,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long, value_enum)]
    quantity: Quantity,
    /// Mean SNR for the SNR and outage quantities (default 1).
    #[arg(long)]
    gamma_bar: Option<f64>,
    /// Mean envelope power E[R^2] for envelope-pdf (default 1).
    #[arg(long)]
    omega: Option<f64>,
    /// First grid point (r, gamma or gamma_th / gamma_bar).
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    #[arg(long)]
    points: usize,
    /// Logarithmic grid spacing.
    #[arg(long)]
    log: bool,
    /// Print x as 10 log10(x); the grid itself stays linear in x.
    #[arg(long)]
    db: bool,
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    shape: ShapeArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallel work partitions; never changes the output.
    #[arg(long)]
    partitions: Option<usize>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "quick")]
    level: LevelArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, hide = true)]
    inject_fault: Option<FaultArg>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Library(#[from] compfade::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("one or more grid points did not converge")]
    NonConvergence,
    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Library(_) | CliError::Io(_) => 1,
            CliError::NonConvergence => 2,
            CliError::Validation(_) => 3,
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Clone, Copy)]
enum Params {
    Aef(AefParams),
    Akf(AkfParams),
}

impl ShapeArgs {
    fn params(&self) -> Result<Params, CliError> {
        match self.dist {
            Dist::Aef => {
                if self.kappa.is_some() {
                    return usage("--kappa does not apply to --dist aef (use --eta)");
                }
                let Some(eta) = self.eta else { return usage("--dist aef requires --eta") };
                let format = if self.fmt == Some(2) { Format::FormatII } else { Format::FormatI };
                Ok(Params::Aef(AefParams::new(self.alpha, eta, self.mu, self.ms, format)?))
            }
            Dist::Akf => {
                if self.eta.is_some() {
                    return usage("--eta does not apply to --dist akf (use --kappa)");
                }
                if self.fmt.is_some() {
                    return usage("--fmt does not apply to --dist akf");
                }
                let Some(kappa) = self.kappa else { return usage("--dist akf requires --kappa") };
                Ok(Params::Akf(AkfParams::new(self.alpha, kappa, self.mu, self.ms)?))
            }
        }
    }
}

fn run_curve(args: &CurveArgs, ctrl: &SeriesControl) -> Result<(), CliError> {
    let params = args.shape.params()?;
    let envelope = args.quantity == Quantity::EnvelopePdf;
    if envelope && args.gamma_bar.is_some() {
        return usage("--gamma-bar does not apply to envelope-pdf (use --omega)");
    }
    if !envelope && args.omega.is_some() {
        return usage("--omega applies to envelope-pdf only (use --gamma-bar)");
    }
    let scale = if args.log { Scale::Log } else { Scale::Linear };
    let grid = Grid::new(args.from, args.to, args.points, scale).map_err(CliError::Usage)?;
    let spec = CurveSpec::new(params, args.quantity, args.gamma_bar.or(args.omega).unwrap_or(1.0), grid, args.db)
        .map_err(CliError::Usage)?;
    let rows = curve::evaluate(&spec, ctrl)?;
    let mut out = BufWriter::new(io::stdout().lock());
    match args.out {
        OutFormat::Csv => output::write_csv(&mut out, &rows)?,
        OutFormat::Json => output::write_json(&mut out, &spec, &rows)?,
    }
    out.flush()?;
    if rows.iter().all(|r| r.converged) {
        Ok(())
    } else {
        Err(CliError::NonConvergence)
    }
}

fn run_sample(args: &SampleArgs) -> Result<(), CliError> {
    let partitions = match args.partitions {
        Some(0) => return usage("--partitions must be at least 1"),
        Some(p) => p,
        None => rayon::current_num_threads(),
    };
    let samples = match args.shape.params()? {
        Params::Aef(p) => mc::sample_aef_envelope_partitioned(&mc::make_phys_aef(&p, None)?, args.n, args.seed, partitions)?,
        Params::Akf(p) => mc::sample_akf_envelope_partitioned(&mc::make_phys_akf(&p, None)?, args.n, args.seed, partitions)?,
    };
    let mut out = BufWriter::new(io::stdout().lock());
    output::write_samples(&mut out, &samples)?;
    out.flush()?;
    Ok(())
}

fn run_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let level = match args.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let fault = match args.inject_fault {
        Some(FaultArg::NegateH2) => Fault::NegateH2,
        None => Fault::None,
    };
    let report = validate::run(level, args.seed, fault);
    let mut out = BufWriter::new(io::stdout().lock());
    serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(failed.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctrl = match SeriesControl::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Curve(a) => run_curve(a, &ctrl),
        Command::Sample(a) => run_sample(a),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
