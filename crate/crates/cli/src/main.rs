use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use hyperac::plateau::{CertifyConfig, WindowSpec};
use hyperac::runner::{audit_field, certify_partition, report, run, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Discrete Allen-Cahn experiments on Cayley graphs.
#[derive(Parser)]
#[command(name = "hyperac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every enabled stage of a TOML experiment.
    Run {
        config: PathBuf,
        /// Output directory; defaults to `output_dir` of the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a run's checksums and print its report; writes `report/`.
    Report { manifest: PathBuf },
    /// Re-check a stored field file.
    Audit { field: PathBuf },
    /// Certify a stored partition, e.g. `ball:3` or `ball:3+random:50:3:11`.
    Certify { partition: PathBuf, windows: String },
}

fn verdict(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main_inner(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
            let manifest = run(&cfg, &dir).with_context(|| format!("run {}", config.display()))?;
            for a in &manifest.audits {
                println!("{} {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.detail);
            }
            println!("manifest: {}", dir.join("manifest.json").display());
            Ok(verdict(manifest.all_pass))
        }
        Command::Report { manifest } => {
            let r = report(&manifest)?;
            print!("{}", r.text);
            Ok(verdict(r.all_pass))
        }
        Command::Audit { field } => {
            let a = audit_field(&field)?;
            println!("checksum ok ({})", a.header.sha256);
            println!("middle-band sites: {}", a.middle_band);
            println!("components: {}", if a.components_pass { "pass" } else { "fail" });
            println!("quasi-minimality slack: {}", a.quasi_min_slack);
            println!("max free-site residual: {:.3e}", a.max_residual);
            println!("{}", if a.pass { "PASS" } else { "FAIL" });
            Ok(verdict(a.pass))
        }
        Command::Certify { partition, windows } => {
            let spec: WindowSpec = windows.parse()?;
            let certs = certify_partition(&partition, &spec, &CertifyConfig::default())?;
            let mut pass = true;
            for c in &certs {
                pass &= c.is_minimal();
                println!(
                    "{} {}: b={} min={} free={} exhaustive={:?} oracle={:?}",
                    if c.is_minimal() { "PASS" } else { "FAIL" },
                    c.window,
                    c.b_omega,
                    c.min,
                    c.free_sites,
                    c.exhaustive,
                    c.oracle
                );
            }
            Ok(verdict(pass))
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
