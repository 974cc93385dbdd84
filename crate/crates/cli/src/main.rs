mod commands;
mod preview;
mod scene;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{DatasetArgs, DsmArgs};

#[derive(Parser)]
#[command(name = "sarhp", version, about = "Slant-range height maps from surface models and SAR scenes")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic scene from a key = value spec.
    Synth {
        spec: PathBuf,
        out_dir: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Project the surface model into slant-range geometry.
    Project {
        scene_dir: PathBuf,
        /// Use the brute-force reference renderer instead.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert the complex samples into normalized intensity.
    Calibrate {
        scene_dir: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resample, tile and split a scene into training pairs.
    MakeDataset {
        scene_dir: PathBuf,
        #[arg(long)]
        heights: Option<PathBuf>,
        #[arg(long)]
        intensity: Option<PathBuf>,
        /// Target ground sampling distance in metres.
        #[arg(long)]
        gsd: Option<f64>,
        #[arg(long, default_value_t = 256)]
        tile_size: usize,
        #[arg(long, default_value_t = 0.5)]
        overlap: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare a predicted height raster with a reference.
    Eval {
        pred: PathBuf,
        reference: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Directory for false-color previews.
        #[arg(long)]
        png: Option<PathBuf>,
    },
    /// Grid a text point cloud (x y h per line) into a surface model.
    Dsm {
        cloud: PathBuf,
        out: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        cell: f64,
        /// Odd median window size; 0 or 1 disables the filter.
        #[arg(long, default_value_t = 3)]
        median: usize,
        /// Geoid undulation added to every height.
        #[arg(long, default_value_t = 0.0)]
        undulation: f64,
    },
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Synth { spec, out_dir, seed } => commands::synth(&spec, &out_dir, seed),
        Command::Project { scene_dir, oracle, out } => commands::project(&scene_dir, oracle, out),
        Command::Calibrate { scene_dir, out } => commands::calibrate(&scene_dir, out),
        Command::MakeDataset {
            scene_dir,
            heights,
            intensity,
            gsd,
            tile_size,
            overlap,
            out,
            seed,
        } => commands::make_dataset(
            &scene_dir,
            DatasetArgs {
                heights,
                intensity,
                gsd,
                tile_size,
                overlap,
                out,
                seed,
            },
        ),
        Command::Eval {
            pred,
            reference,
            json,
            png,
        } => commands::eval(&pred, &reference, json, png),
        Command::Dsm {
            cloud,
            out,
            cell,
            median,
            undulation,
        } => commands::dsm(
            &cloud,
            &out,
            DsmArgs {
                cell,
                median,
                undulation,
            },
        ),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SARHP_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
