use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use decaylab::character::{estimate_decay_character, DecayEstimate};
use decaylab::experiment::{
    continuum_series, norm_name, rebuild_report, run_experiment, write_two_column,
    ExperimentConfig, FitResult, Report, CONTINUUM_TOLERANCE, REPORT_FILE,
};
use decaylab::field_file::{read_field, MAGIC};
use decaylab::fit::{fit_power_law, Verdict};
use decaylab::profile::ProfileSpec;

#[derive(Parser)]
#[command(
    name = "decaylab",
    version,
    about = "Decay-rate experiments for Navier-Stokes and Navier-Stokes-Coriolis flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run { config: PathBuf },
    /// Estimate the decay character of a stored field or a profile spec.
    Character {
        /// Field file, JSON file with a profile spec, or inline JSON.
        source: String,
    },
    /// Fit the continuum heat-flow decay of a radial profile.
    Linear {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, allow_negative_numbers = true)]
        r_star: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        exponent: Option<f64>,
        #[arg(long)]
        cutoff: Option<f64>,
        /// Sobolev order of the norm.
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long, default_value_t = 10.0)]
        t0: f64,
        #[arg(long, default_value_t = 1e4)]
        t1: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        /// Write the sampled curve as a two-column file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Recompute the report of a finished run directory.
    Report { run_dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Family {
    PowerGauss,
    Indicator,
    PowerCut,
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let config = ExperimentConfig::load(&config)?;
            let report = run_experiment(&config)?;
            Ok(summarize(&report, &config.output_dir))
        }
        Command::Report { run_dir } => {
            let report = rebuild_report(&run_dir)?;
            Ok(summarize(&report, &run_dir))
        }
        Command::Character { source } => {
            let estimate = character(&source)?;
            println!("{}", serde_json::to_string_pretty(&estimate)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Linear {
            family,
            r_star,
            exponent,
            cutoff,
            s,
            t0,
            t1,
            samples,
            output,
        } => {
            let spec = profile_spec(family, r_star, exponent, cutoff)?;
            let fit = linear(&spec, s, [t0, t1], samples, output.as_deref())?;
            print_fits(std::slice::from_ref(&fit));
            Ok(exit_for(fit.verdict == Verdict::ViolatesBound))
        }
    }
}

fn exit_for(violation: bool) -> ExitCode {
    if violation {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn summarize(report: &Report, dir: &Path) -> ExitCode {
    println!("experiment: {}", report.experiment);
    print_fits(&report.fits);
    if let Some(spread) = report.l2_spread {
        println!("L² spread across Ω: {:.3}%", 100.0 * spread);
    }
    println!("report: {}", dir.join(REPORT_FILE).display());
    exit_for(report.has_violation())
}

fn print_fits(fits: &[FitResult]) {
    if fits.is_empty() {
        println!("no fits");
        return;
    }
    println!(
        "{:<28} {:<10} {:>9} {:>9} {:>9}  verdict",
        "label", "norm", "beta", "predicted", "r²"
    );
    for f in fits {
        println!(
            "{:<28} {:<10} {:>9.4} {:>9.4} {:>9.6}  {}",
            f.label, f.norm, f.beta, f.predicted, f.r_squared, f.verdict
        );
    }
}

fn profile_spec(
    family: Family,
    r_star: Option<f64>,
    exponent: Option<f64>,
    cutoff: Option<f64>,
) -> Result<ProfileSpec> {
    let need = |v: Option<f64>, flag: &str| {
        v.with_context(|| format!("--{flag} is required for this family"))
    };
    Ok(match family {
        Family::PowerGauss => ProfileSpec::PowerGauss {
            r_star: need(r_star, "r-star")?,
        },
        Family::Indicator => ProfileSpec::Indicator {
            cutoff: need(cutoff, "cutoff")?,
        },
        Family::PowerCut => ProfileSpec::PowerCut {
            exponent: need(exponent, "exponent")?,
            cutoff: need(cutoff, "cutoff")?,
        },
    })
}

fn linear(
    spec: &ProfileSpec,
    s: f64,
    window: [f64; 2],
    samples: usize,
    output: Option<&Path>,
) -> Result<FitResult> {
    let points = continuum_series(spec, s, window, samples)?;
    if let Some(path) = output {
        write_two_column(path, &points)?;
    }
    let fit = fit_power_law(&points, window)?;
    let predicted = 1.5 + spec.decay_character() + s;
    let label = spec.build()?.label().to_string();
    Ok(FitResult::new(
        &norm_name(s),
        label,
        fit,
        predicted,
        CONTINUUM_TOLERANCE,
    ))
}

fn character(source: &str) -> Result<DecayEstimate> {
    let path = Path::new(source);
    let json = if path.is_file() {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        if bytes.starts_with(MAGIC) {
            return Ok(estimate_decay_character(&read_field(path)?, None)?);
        }
        String::from_utf8(bytes)
            .with_context(|| format!("{} is neither a field file nor JSON", path.display()))?
    } else {
        source.to_string()
    };
    let spec: ProfileSpec = serde_json::from_str(&json).context("parsing the profile spec")?;
    Ok(estimate_decay_character(&spec.build()?, None)?)
}
