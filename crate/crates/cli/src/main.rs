use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tdde_cli::config::{RunConfig, SweepSpec};
use tdde_cli::error::CliError;
use tdde_cli::run::{eigen, run, write_eigen_csv, write_failure, write_run};
use tdde_cli::scale::{scale, ScaleArgs};
use tdde_cli::sweep::run_sweep;
use tdde_cli::validate::{validate, ValidateOptions};

/// Laser-driven hydrogenlike ions in a B-spline spectral basis.
#[derive(Parser)]
#[command(name = "tdde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field-free spectrum as CSV (channel,index,class,energy_au) plus a JSON summary.
    Eigen {
        config: PathBuf,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// JSON summary destination; stderr when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// One propagation through the pulse.
    Propagate {
        config: PathBuf,
        /// Output prefix; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-axis sweep written as long-format CSV; completed points are skipped.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stop after computing this many points.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Ionization-potential shift, scaled charge, Keldysh parameter and rate-table transform.
    Scale {
        #[arg(long)]
        z: f64,
        #[arg(long, conflicts_with = "wavelength_nm")]
        photon_energy_au: Option<f64>,
        #[arg(long)]
        wavelength_nm: Option<f64>,
        #[arg(long, conflicts_with = "field_au")]
        intensity_wcm2: Option<f64>,
        #[arg(long)]
        field_au: Option<f64>,
        #[arg(long, default_value_t = 20)]
        cycles: u32,
        /// Treat the pulse as a hydrogen pulse and map it to `z`.
        #[arg(long)]
        from_hydrogen: bool,
        /// CSV with header `f0_z3au,gamma_z2au`.
        #[arg(long)]
        rate_table: Option<PathBuf>,
        /// Write the transformed rate table here as CSV.
        #[arg(long, requires = "rate_table")]
        rate_out: Option<PathBuf>,
    },
    /// Invariant suite; exits with 4 when any check fails.
    Validate {
        #[arg(long, default_value_t = 200)]
        basis_n: usize,
        /// Flip a sign in the velocity integrals; the gauge checks must then fail.
        #[arg(long)]
        mutate_velocity: bool,
        /// Skip the propagation-based checks.
        #[arg(long)]
        quick: bool,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Eigen { config, csv, summary } => {
            let cfg = RunConfig::parse(&read(&config)?)?;
            let (rows, sum) = eigen(&cfg)?;
            match csv {
                Some(p) => write_eigen_csv(&rows, std::fs::File::create(p)?)?,
                None => write_eigen_csv(&rows, std::io::stdout().lock())?,
            }
            let json = serde_json::to_string_pretty(&sum)?;
            match summary {
                Some(p) => std::fs::write(p, json)?,
                None => eprintln!("{json}"),
            }
        }
        Command::Propagate { config, out } => {
            let cfg = RunConfig::parse(&read(&config)?)?;
            let prefix = out.or_else(|| cfg.output.clone());
            match run(&cfg) {
                Ok(rec) => {
                    println!("{}", serde_json::to_string_pretty(&serde_json::json!({
                        "yield": rec.ionization,
                        "survival": rec.survival,
                        "negative_energy": rec.negative_energy,
                        "steps": rec.stats.steps,
                        "wall_seconds": rec.total_wall_seconds,
                    }))?);
                    if let Some(p) = prefix {
                        write_run(&rec, &p)?;
                    }
                }
                Err(e) => {
                    if let Some(p) = prefix {
                        write_failure(&cfg, &e, &p)?;
                    }
                    return Err(e);
                }
            }
        }
        Command::Sweep { spec, out, limit } => {
            let s = SweepSpec::parse(&read(&spec)?)?;
            let out = out
                .or_else(|| s.base.output.clone().map(|p| p.with_extension("csv")))
                .ok_or_else(|| CliError::Config("`output`: a sweep needs --out or `output`".into()))?;
            let summary = run_sweep(&s, &out, limit)?;
            eprintln!("computed {} reused {} failed {} -> {}", summary.computed, summary.reused, summary.failed, out.display());
        }
        Command::Scale { z, photon_energy_au, wavelength_nm, intensity_wcm2, field_au, cycles, from_hydrogen, rate_table, rate_out } => {
            let omega = photon_energy_au.or(wavelength_nm.map(tdde::pulse::wavelength_to_omega));
            let args = ScaleArgs { z, omega, f0: field_au, intensity_wcm2, cycles, from_hydrogen, rate_table };
            let report = scale(&args)?;
            if let (Some(p), Some(t)) = (rate_out, &report.rate_table) {
                std::fs::write(p, t.to_csv())?;
            }
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Validate { basis_n, mutate_velocity, quick } => {
            let report = validate(ValidateOptions { basis_n, mutate_velocity, skip_propagation: quick })?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.passed {
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).map(|c| format!("{} ({})", c.name, c.detail)).collect();
                return Err(CliError::Validation(failed.join("; ")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
