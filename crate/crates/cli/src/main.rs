use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fockport::metrics::{teleport_report, TeleportReport};
use fockport::resources::{build_resource, parse_resource};
use fockport::sweep::{evaluate_row, format_real, preset, run_sweep, write_csv, ResultRow, SweepConfig};
use fockport::validation::{run_validation, ValidationOptions};

#[derive(Parser)]
#[command(name = "fockport", version, about = "Number-conserving teleportation of bosonic modes")]
struct Cli {
    /// Default seed for Monte Carlo sampling.
    #[arg(long, global = true, env = "FOCKPORT_SEED", default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; overrides the config's `output`, defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Monte Carlo samples per row; 0 disables sampling.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run a built-in figure sweep (fig1 to fig8).
    Preset {
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Check every acceptance criterion and module invariant.
    Validate {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Closed-form and per-outcome figures for one resource.
    Report {
        /// Resource descriptor, e.g. `maxent` or `su2:xi=0.5,theta=0`.
        #[arg(long)]
        resource: String,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        nu: usize,
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

fn write_rows(rows: &[ResultRow], out: Option<&Path>) -> AnyResult<()> {
    match out {
        Some(path) => write_csv(rows, BufWriter::new(File::create(path)?))?,
        None => write_csv(rows, io::stdout().lock())?,
    }
    Ok(())
}

fn check_samples(samples: usize) -> AnyResult<()> {
    if samples == 1 {
        return Err("--samples must be 0 or at least 2".into());
    }
    Ok(())
}

fn opt(x: Option<f64>) -> String {
    x.map(format_real).unwrap_or_else(|| "-".into())
}

fn print_report(row: &ResultRow, rep: &TeleportReport, format: Format) -> AnyResult<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Csv => {
            write_csv(std::slice::from_ref(row), &mut out)?;
            writeln!(out)?;
            writeln!(out, "l,lambda,probability,conditional_fidelity,conditional_negativity")?;
            for o in &rep.per_outcome {
                let cell = |x: Option<f64>| x.map(format_real).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    o.outcome.l,
                    o.outcome.lambda,
                    format_real(o.probability),
                    cell(o.conditional_fidelity),
                    cell(o.conditional_negativity)
                )?;
            }
        }
        Format::Text => {
            writeln!(out, "resource   {}", row.resource)?;
            writeln!(out, "N, nu      {}, {}", row.n, row.nu)?;
            writeln!(out, "fidelity   {}", format_real(row.f_closed))?;
            if let Some(e) = row.f_mc {
                writeln!(out, "  sampled  {} ± {}", format_real(e.mean), format_real(e.std_error))?;
            }
            writeln!(out, "E          {}", opt(row.e_closed))?;
            if let Some(e) = row.e_mc {
                writeln!(out, "  sampled  {} ± {}", format_real(e.mean), format_real(e.std_error))?;
            }
            writeln!(out, "f_sep      {}", format_real(2.0 / (row.n as f64 + 2.0)))?;
            writeln!(out, "p_perfect  {}", format_real(row.p_perfect))?;
            if let Some(g) = row.regime {
                writeln!(out, "regime     {g}")?;
            }
            writeln!(out, "\n{:>4} {:>6} {:>24} {:>24} {:>24}", "l", "lambda", "probability", "cond. fidelity", "cond. negativity")?;
            for o in &rep.per_outcome {
                writeln!(
                    out,
                    "{:>4} {:>6} {:>24} {:>24} {:>24}",
                    o.outcome.l,
                    o.outcome.lambda,
                    format_real(o.probability),
                    opt(o.conditional_fidelity),
                    opt(o.conditional_negativity)
                )?;
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> AnyResult<ExitCode> {
    match cli.command {
        Command::Sweep { config, out, samples } => {
            let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
            let mut cfg = SweepConfig::parse(&text, cli.seed).map_err(|e| format!("{}: {e}", config.display()))?;
            if let Some(s) = samples {
                check_samples(s)?;
                cfg.samples = s;
            }
            let rows = run_sweep(&cfg)?;
            write_rows(&rows, out.or(cfg.output).as_deref())?;
        }
        Command::Preset { name, out, samples } => {
            check_samples(samples)?;
            let mut cfg = preset(&name, cli.seed)?;
            cfg.samples = samples;
            let rows = run_sweep(&cfg)?;
            write_rows(&rows, Some(&out))?;
            eprintln!("{name}: {} rows written to {}", rows.len(), out.display());
        }
        Command::Validate { samples } => {
            check_samples(samples)?;
            let results = run_validation(&ValidationOptions { samples: samples.max(2), seed: cli.seed });
            let failed = results.iter().filter(|r| !r.passed).count();
            for r in &results {
                println!("{r}");
            }
            println!("\n{} checks, {failed} failed", results.len());
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Report { resource, n, nu, samples, format } => {
            check_samples(samples)?;
            let spec = parse_resource(&resource, nu)?;
            let rep = teleport_report(&build_resource(&spec)?, n)?;
            let row = evaluate_row(&resource, n, nu, 1, samples, cli.seed)?;
            print_report(&row, &rep, format)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
