//! Manifest-driven CLI for the spectral shallow water toolkit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use swlp::manifest::{apply_override, error_exit_code, run, RunManifest};

/// Run a reproducible experiment described by a TOML manifest.
#[derive(Parser)]
#[command(name = "swlp", version, about)]
struct Cli {
    /// Path to the run manifest.
    #[arg(long)]
    manifest: PathBuf,

    /// Override the manifest's base seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory (overrides the manifest's output_dir).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Override a manifest entry by dotted path, e.g. `config.nu=0.3`.
    /// May be repeated.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn execute(cli: &Cli) -> swlp::error::Result<swlp::manifest::RunReport> {
    let text = std::fs::read_to_string(&cli.manifest)?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| swlp::error::Error::Config(format!("manifest is not valid TOML: {e}")))?;
    for item in &cli.overrides {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            swlp::error::Error::Config(format!("override '{item}' is not of the form key=value"))
        })?;
        apply_override(&mut table, key, value)?;
    }
    if let Some(seed) = cli.seed {
        apply_override(&mut table, "seed", &seed.to_string())?;
    }
    let manifest = RunManifest::from_table(table)?;
    run(&manifest, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(report) => {
            for flag in &report.flags {
                eprintln!("flag: {flag}");
            }
            for artifact in &report.artifacts {
                println!("wrote {}", artifact.display());
            }
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            // leave a machine-readable record next to the other artifacts
            if let Some(dir) = cli.out.as_deref() {
                if std::fs::create_dir_all(dir).is_ok() {
                    let body = serde_json::json!({ "error": e.to_string() });
                    let _ = std::fs::write(
                        dir.join("error_report.json"),
                        serde_json::to_string_pretty(&body).unwrap(),
                    );
                }
            }
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
