//! Batch command surface for the Maskit-slice / Koebe-family library:
//! rays, cusps, elliptic points, circle chains, Jorgensen scans, the
//! conjugacy check, limit-set rendering, and triangle signatures.
//!
//! Exit codes: 0 success, 1 verification or computation failure, 2 usage
//! error. Diagnostics go to stderr; result files are byte-deterministic
//! for fixed inputs.

mod commands;
mod config;
mod writers;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "maskit", version, about = "Punctured-torus groups in the Maskit slice: pleating rays, Koebe groups, circle chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; unset values fall back to the config
/// file, then to defaults.
#[derive(Args, Debug, Default)]
struct Common {
    /// Fraction p/q (reduced; 1/0 denotes infinity)
    #[arg(long)]
    frac: Option<String>,
    /// Order n, or a comma list for `elliptic` (e.g. 2,3,4)
    #[arg(long)]
    n: Option<String>,
    /// Family: maskit or koebe
    #[arg(long)]
    family: Option<String>,
    /// Numeric tolerance for pass/fail checks
    #[arg(long)]
    tol: Option<f64>,
    /// Word-enumeration depth (limitset)
    #[arg(long)]
    depth: Option<u32>,
    /// Cells per side (scan)
    #[arg(long)]
    grid: Option<usize>,
    /// Output path (or base path for commands writing several files)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Viewport x0,y0,x1,y1
    #[arg(long, allow_hyphen_values = true)]
    viewport: Option<String>,
    /// Explicit parameter re,im (mu or tau), overriding the ray solve
    #[arg(long, allow_hyphen_values = true)]
    param: Option<String>,
    /// Pruning cell size (limitset)
    #[arg(long)]
    min_cell: Option<f64>,
    /// Raster size in pixels (limitset)
    #[arg(long)]
    size: Option<usize>,
    /// Disk count for cusp-chain windows
    #[arg(long)]
    window: Option<usize>,
    /// JSON config file with the same keys as the flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Trace a pleating ray (and its extension, Maskit family) to CSV
    Ray(Common),
    /// Find the cusp parameter mu_{p/q}
    Cusp(Common),
    /// Solve for elliptic points mu_{p/q}(n) on the extended ray
    Elliptic(Common),
    /// Build and verify a circle chain; writes JSON and SVG
    Chain(Common),
    /// Jorgensen-inequality grid scan; writes CSV and a PPM heat map
    Scan(Common),
    /// Verify the Mobius conjugacy between the two families at m = 0
    Conjugacy(Common),
    /// Render a limit set to a PPM raster (and optional CSV)
    Limitset(Common),
    /// Triangle-group signature of the disk-preserving subgroup
    Signature(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ray(c) => commands::ray(c),
        Command::Cusp(c) => commands::cusp(c),
        Command::Elliptic(c) => commands::elliptic(c),
        Command::Chain(c) => commands::chain(c),
        Command::Scan(c) => commands::scan(c),
        Command::Conjugacy(c) => commands::conjugacy(c),
        Command::Limitset(c) => commands::limitset(c),
        Command::Signature(c) => commands::signature(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
