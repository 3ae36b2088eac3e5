use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fln_trader::data_ingest::DatasetSlice;
use fln_trader::harness::{
    emit_report, emit_summary_table, run_experiment_on, ExperimentConfig, RunMode,
};
use fln_trader::{Config, Result};
use log::info;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Agent,
    Random,
    /// Agent and random baseline on the same data, with a combined table.
    Both,
}

/// Monte-Carlo backtest of the online double Q-learning trader on kline data.
#[derive(Debug, Parser)]
#[command(name = "backtest", version)]
struct Args {
    /// Kline CSV (open time, open, high, low, close, volume, ...).
    #[arg(long)]
    data: PathBuf,
    /// Sub-range of the filtered series, `start:end` (either side optional).
    #[arg(long)]
    slice: Option<String>,
    #[arg(long, value_enum, default_value = "agent")]
    mode: Mode,
    #[arg(long, default_value_t = 1000)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// TOML (or .json) file overriding configuration keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the per-step trace of run 0 to trace.jsonl.
    #[arg(long)]
    trace: bool,
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long)]
    workers: Option<usize>,
}

fn run(args: Args) -> Result<()> {
    let params = match &args.config {
        Some(path) => Config::from_file(path)?,
        None => Config::default(),
    };
    let mut exp = ExperimentConfig::new(RunMode::Agent, args.runs, args.seed);
    exp.data = Some(args.data.clone());
    exp.workers = args.workers;
    exp.trace = args.trace;
    exp.params = params;
    exp.validate()?;

    // parse and filter once, then slice against the filtered length
    let full = {
        let mut unsliced = exp.clone();
        unsliced.slice = None;
        unsliced.load_series()?
    };
    let series = match &args.slice {
        Some(spec) => {
            let slice = DatasetSlice::parse(spec, full.len())?;
            let s = full.slice(&slice)?;
            exp.slice = Some(slice);
            s
        }
        None => full,
    };
    info!("{} filtered points after slicing", series.len());

    let modes: &[(RunMode, Option<&str>)] = match args.mode {
        Mode::Agent => &[(RunMode::Agent, None)],
        Mode::Random => &[(RunMode::Random, None)],
        Mode::Both => &[(RunMode::Agent, Some("agent")), (RunMode::Random, Some("random"))],
    };
    let mut outputs = Vec::new();
    for &(mode, sub) in modes {
        exp.mode = mode;
        exp.trace = args.trace && mode == RunMode::Agent;
        let out = run_experiment_on(&exp, &series)?;
        let dir = sub.map_or_else(|| args.out.clone(), |s| args.out.join(s));
        emit_report(&exp, &out, &dir)?;
        println!(
            "{mode}: {} runs, mean twth {:.3}, median {:.3}, sd {:.3}, P(twth<={}) {:.3} -> {}",
            out.results.len(),
            out.twth.mean,
            out.twth.median,
            out.twth.std_dev,
            exp.params.initial_mon,
            out.twth.p_loss,
            dir.display()
        );
        outputs.push(out);
    }

    if let [agent, random] = outputs.as_slice() {
        let sav = agent.sav.as_ref().expect("agent mode reports sav");
        let table = emit_summary_table(
            &[
                ("Non-random twth", &agent.twth, true),
                ("Random twth", &random.twth, true),
                ("sav", sav, false),
            ],
            exp.params.initial_mon,
        );
        let path = args.out.join("summary.txt");
        std::fs::write(&path, &table)
            .map_err(|e| fln_trader::Error::Io { path, source: e })?;
        print!("{table}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("backtest: {e}");
            ExitCode::from(2)
        }
    }
}
