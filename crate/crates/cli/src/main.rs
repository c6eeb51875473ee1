use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use cfgwc_cli::pipeline;
use cfgwc_core::{generate_synthetic, write_csv, FeatureSpec, GeoSpec};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cfgwc",
    version,
    about = "Context-constrained fuzzy geographically weighted clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a TOML config and write its artifacts.
    Run { config: PathBuf },
    /// Compare context methods over paired seeds.
    Compare {
        config: PathBuf,
        #[arg(long, default_value_t = 20)]
        seeds: usize,
    },
    /// Write a synthetic area dataset as CSV.
    Synth(SynthArgs),
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 60)]
    areas: usize,
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    /// Distance between blob means along each feature.
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Standard deviation of each blob.
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    #[arg(long, default_value_t = 100.0)]
    extent: f64,
    #[arg(long, default_value_t = 10.0)]
    region_radius: f64,
    #[arg(long, default_value_t = 100.0)]
    pop_min: f64,
    #[arg(long, default_value_t = 1000.0)]
    pop_max: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { config } => {
            let s = pipeline::run(&config)?;
            println!(
                "{} areas, {} iterations (converged: {}), J = {:.6}, IFV = {:.6}",
                s.dataset.n, s.iterations, s.converged, s.objective, s.ifv.ifv
            );
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            println!("artifacts in {}", s.config.output.dir.display());
        }
        Command::Compare { config, seeds } => {
            let (report, path) = pipeline::compare(&config, seeds)?;
            print!("{}", pipeline::render_report(&report));
            println!("report written to {}", path.display());
        }
        Command::Synth(a) => {
            let spec = FeatureSpec::well_separated(a.clusters, a.dim, a.separation, a.spread);
            let geo = GeoSpec {
                extent: a.extent,
                region_radius: a.region_radius,
                population: (a.pop_min, a.pop_max),
            };
            let s = generate_synthetic(a.areas, a.clusters, &spec, &geo, a.seed)?;
            write_csv(&s.dataset, &a.output)?;
            println!(
                "{} areas written to {}",
                s.dataset.len(),
                a.output.display()
            );
        }
    }
    Ok(())
}
