//! Monte-Carlo backtests: many independently seeded runs over one series,
//! either with the learning agent or with uniformly random actions.

mod report;
mod stats;

use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{run_random_baseline, Agent, StepRecord, MIN_SERIES_LEN};
use crate::data_ingest::{load_series, DatasetSlice, FilteredSeries};
use crate::error::{Error, Result};
use crate::Config;

pub use report::{emit_report, emit_summary_table, write_trace, Report, StatsBlock, REPORT_VERSION};
pub use stats::{aggregate, histogram, AggregateStats, Histogram, MIN_BINS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Agent,
    Random,
}

impl std::fmt::Display for RunMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RunMode::Agent => "agent",
            RunMode::Random => "random",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: Option<PathBuf>,
    pub slice: Option<DatasetSlice>,
    pub mode: RunMode,
    pub runs: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses rayon's default. Results do not depend
    /// on this.
    pub workers: Option<usize>,
    /// Collect the per-step trace of run 0.
    pub trace: bool,
    pub params: Config,
}

impl ExperimentConfig {
    pub fn new(mode: RunMode, runs: usize, master_seed: u64) -> Self {
        Self {
            data: None,
            slice: None,
            mode,
            runs,
            master_seed,
            workers: None,
            trace: false,
            params: Config::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.params.validate()
    }

    /// Loads, filters and slices the configured dataset.
    pub fn load_series(&self) -> Result<FilteredSeries> {
        let path = self
            .data
            .as_ref()
            .ok_or_else(|| Error::Config("no dataset path given".into()))?;
        let series = load_series(path, &self.params)?;
        match &self.slice {
            Some(s) => series.slice(s),
            None => Ok(series),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run_index: usize,
    pub final_sav: f64,
    pub final_twth: f64,
    pub steps_taken: usize,
    pub episodes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub results: Vec<RunResult>,
    pub twth: AggregateStats,
    /// Absent in random mode.
    pub sav: Option<AggregateStats>,
    /// Step records of run 0 when tracing was requested.
    pub trace: Option<Vec<StepRecord>>,
    pub series_len: usize,
}

impl ExperimentOutput {
    pub fn twth_values(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.final_twth).collect()
    }

    pub fn sav_values(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.final_sav).collect()
    }
}

/// Independent random stream for one run: the master seed keys a ChaCha8
/// generator and the run index selects its stream, so a run's draws never
/// depend on how runs are scheduled.
pub fn run_rng(master_seed: u64, run_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run_index as u64);
    rng
}

fn check_series(series: &FilteredSeries) -> Result<()> {
    if series.len() < MIN_SERIES_LEN {
        return Err(Error::InsufficientData {
            needed: MIN_SERIES_LEN,
            got: series.len(),
        });
    }
    Ok(())
}

/// One run; `trace` receives every step record in agent mode.
pub fn run_once_traced(
    exp: &ExperimentConfig,
    series: &FilteredSeries,
    run_index: usize,
    trace: Option<&mut Vec<StepRecord>>,
) -> Result<RunResult> {
    check_series(series)?;
    let mut rng = run_rng(exp.master_seed, run_index);
    let summary = match exp.mode {
        RunMode::Agent => {
            let agent = Agent::new(&exp.params, series, rng)?;
            match trace {
                Some(sink) => agent.run_with(|r| sink.push(r.clone()))?,
                None => agent.run()?,
            }
        }
        RunMode::Random => run_random_baseline(&exp.params, series, &mut rng)?,
    };
    if !summary.final_twth.is_finite() {
        return Err(Error::NonFinite("final total wealth"));
    }
    Ok(RunResult {
        run_index,
        final_sav: summary.final_sav,
        final_twth: summary.final_twth,
        steps_taken: summary.steps,
        episodes: summary.episodes,
    })
}

pub fn run_once(exp: &ExperimentConfig, series: &FilteredSeries, run_index: usize) -> Result<RunResult> {
    run_once_traced(exp, series, run_index, None)
}

/// Runs `exp.runs` seeded runs over `series` in parallel and aggregates.
pub fn run_experiment_on(exp: &ExperimentConfig, series: &FilteredSeries) -> Result<ExperimentOutput> {
    exp.validate()?;
    check_series(series)?;

    let mut trace = exp.trace.then(Vec::new);
    let first = run_once_traced(exp, series, 0, trace.as_mut())?;

    let job = || -> Result<Vec<RunResult>> {
        (1..exp.runs)
            .into_par_iter()
            .map(|k| run_once(exp, series, k))
            .collect()
    };
    let rest = match exp.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(job)?,
        None => job()?,
    };
    let mut results = Vec::with_capacity(exp.runs);
    results.push(first);
    results.extend(rest);

    let loss = exp.params.initial_mon;
    let twth: Vec<f64> = results.iter().map(|r| r.final_twth).collect();
    let twth = aggregate(&twth, loss)?;
    let sav = match exp.mode {
        RunMode::Agent => {
            let sav: Vec<f64> = results.iter().map(|r| r.final_sav).collect();
            Some(aggregate(&sav, loss)?)
        }
        RunMode::Random => None,
    };
    Ok(ExperimentOutput {
        results,
        twth,
        sav,
        trace,
        series_len: series.len(),
    })
}

/// Loads the configured dataset, then runs the experiment on it.
pub fn run_experiment(exp: &ExperimentConfig) -> Result<ExperimentOutput> {
    exp.validate()?;
    let series = exp.load_series()?;
    run_experiment_on(exp, &series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{random_walk_series, WalkParams};

    fn series() -> FilteredSeries {
        random_walk_series(400, 0.01, &WalkParams::default(), 9).unwrap()
    }

    #[test]
    fn constant_price_random_mode() {
        let flat = FilteredSeries::new(vec![0.5; 100], vec![1.0; 100]).unwrap();
        let mut exp = ExperimentConfig::new(RunMode::Random, 1, 1);
        exp.params.fee_rate = 0.0;
        let r = run_once(&exp, &flat, 0).unwrap();
        assert!((r.final_twth - 100.0).abs() < 1e-9);

        exp.params.fee_rate = 0.001;
        let r = run_once(&exp, &flat, 0).unwrap();
        assert!(r.final_twth < 100.0);
    }

    #[test]
    fn same_seed_same_run() {
        let s = series();
        let exp = ExperimentConfig::new(RunMode::Agent, 1, 77);
        assert_eq!(run_once(&exp, &s, 3).unwrap(), run_once(&exp, &s, 3).unwrap());
        assert_ne!(run_once(&exp, &s, 3).unwrap(), run_once(&exp, &s, 4).unwrap());
    }

    #[test]
    fn single_run_stats_are_degenerate() {
        let s = series();
        let out = run_experiment_on(&ExperimentConfig::new(RunMode::Agent, 1, 5), &s).unwrap();
        let t = &out.twth;
        let v = out.results[0].final_twth;
        assert_eq!((t.mean, t.median, t.min, t.max, t.std_dev), (v, v, v, v, 0.0));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let s = series();
        let mut exp = ExperimentConfig::new(RunMode::Agent, 12, 21);
        exp.workers = Some(1);
        let one = run_experiment_on(&exp, &s).unwrap();
        exp.workers = Some(4);
        let four = run_experiment_on(&exp, &s).unwrap();
        assert_eq!(one.results, four.results);
        assert_eq!(one.twth, four.twth);
        assert!(one.results.iter().enumerate().all(|(k, r)| r.run_index == k));
    }

    #[test]
    fn random_mode_has_no_sav_stats() {
        let out = run_experiment_on(&ExperimentConfig::new(RunMode::Random, 5, 5), &series()).unwrap();
        assert!(out.sav.is_none());
        assert!(out.results.iter().all(|r| r.final_sav == 0.0));
    }

    #[test]
    fn zero_runs_and_short_series_rejected() {
        let s = series();
        assert!(run_experiment_on(&ExperimentConfig::new(RunMode::Agent, 0, 1), &s).is_err());
        let short = s.slice(&DatasetSlice::new(0, 9)).unwrap();
        assert!(matches!(
            run_experiment_on(&ExperimentConfig::new(RunMode::Agent, 2, 1), &short),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn trace_collected_for_run_zero() {
        let s = series();
        let mut exp = ExperimentConfig::new(RunMode::Agent, 3, 2);
        exp.trace = true;
        let out = run_experiment_on(&exp, &s).unwrap();
        let trace = out.trace.unwrap();
        assert_eq!(trace.len(), out.results[0].steps_taken);
    }

    #[test]
    fn missing_dataset_is_reported() {
        let mut exp = ExperimentConfig::new(RunMode::Agent, 1, 1);
        exp.data = Some("/nonexistent/klines.csv".into());
        assert!(matches!(run_experiment(&exp), Err(Error::Io { .. })));
    }
}
