//! `additive-designs`: build, verify and search for translation-invariant
//! designs over `Z_p^n`.
//!
//! Exit status: 0 all checks pass, 1 a check failed, 2 input or configuration
//! error, 3 search budget ran out.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "additive-designs", version, about)]
struct Cli {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Develop the sixteen embedded base blocks into the 432-block 2-(81,6,2)
    /// design, write it and verify it.
    Generate {
        #[arg(long)]
        out_dir: PathBuf,
        /// Defaults to <out-dir>/manifest.json.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Verify a design file.
    Verify {
        path: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: u32,
        /// Defaults to the λ in the file header.
        #[arg(long)]
        lambda: Option<u32>,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Search for base-block families by λ-fold difference cover over Z_3^n.
    Search {
        #[arg(long, default_value_t = 16)]
        family_size: usize,
        /// Per-difference total, λ·3.
        #[arg(long, default_value_t = 6)]
        target: u32,
        /// Number of solutions to collect, or `all`.
        #[arg(long, default_value = "1")]
        limit: String,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 4)]
        n: u32,
        #[arg(long)]
        out_dir: PathBuf,
        /// Defaults to <out-dir>/manifest.json.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Build and verify all unions of two parallel lines of AG(2, q).
    Ag2 {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        out_dir: PathBuf,
        /// Defaults to <out-dir>/manifest.json.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Summary statistics of a design file.
    Stats {
        path: PathBuf,
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
}

pub enum Outcome {
    Pass,
    CheckFailed,
    Incomplete,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { out_dir, manifest } => {
            commands::generate(&out_dir, manifest, cli.format)
        }
        Command::Verify {
            path,
            t,
            lambda,
            manifest,
        } => commands::verify(&path, t, lambda, manifest, cli.format),
        Command::Search {
            family_size,
            target,
            limit,
            budget,
            workers,
            n,
            out_dir,
            manifest,
        } => commands::search(
            commands::SearchArgs {
                family_size,
                target,
                limit,
                budget,
                workers,
                n,
            },
            &out_dir,
            manifest,
            cli.format,
        ),
        Command::Ag2 {
            q,
            out_dir,
            manifest,
        } => commands::ag2(q, &out_dir, manifest, cli.format),
        Command::Stats { path, manifest } => commands::stats(&path, manifest, cli.format),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Ok(Outcome::Incomplete) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
