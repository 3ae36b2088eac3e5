use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fln_trader::synthetic::{random_walk_raw, write_klines_csv, WalkParams};

/// Writes a driftless random-walk kline CSV whose filtered length is exact.
#[derive(Debug, Parser)]
#[command(name = "synth-klines", version)]
struct Args {
    /// Number of points that survive the price filter.
    #[arg(long, default_value_t = 5000)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-minute relative step scale.
    #[arg(long, default_value_t = 0.03)]
    step: f64,
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    #[arg(long, default_value_t = 1e-7)]
    volume_scale: f64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let params = WalkParams {
        step: args.step,
        ..WalkParams::default()
    };
    let result = random_walk_raw(args.points, args.threshold, &params, args.seed)
        .and_then(|raw| write_klines_csv(&raw, args.volume_scale, &args.out).map(|()| raw.len()));
    match result {
        Ok(n) => {
            println!("wrote {n} rows to {}", args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("synth-klines: {e}");
            ExitCode::from(2)
        }
    }
}
