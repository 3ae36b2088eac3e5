//! Output files of an experiment.
//!
//! * `total.txt`, `sav.txt`: one value per line in run order.
//! * `report.json`: configuration echo, statistics and histogram counts.
//! * `summary.txt`: mean / median / standard deviation / P(twth <= loss).
//! * `trace.jsonl` (optional): one step record per line for run 0.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::stats::{histogram, AggregateStats, Histogram};
use super::{ExperimentConfig, ExperimentOutput, RunMode};
use crate::agent::StepRecord;
use crate::error::{Error, Result};
use crate::Config;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsBlock {
    pub stats: AggregateStats,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub mode: RunMode,
    pub runs: usize,
    pub master_seed: u64,
    pub data: Option<String>,
    pub slice: Option<[usize; 2]>,
    pub series_len: usize,
    pub loss_threshold: f64,
    pub config: Config,
    pub twth: StatsBlock,
    pub sav: Option<StatsBlock>,
}

impl Report {
    pub fn new(exp: &ExperimentConfig, out: &ExperimentOutput) -> Self {
        let sav = out.sav.as_ref().map(|stats| StatsBlock {
            stats: stats.clone(),
            histogram: histogram(&out.sav_values()),
        });
        Report {
            version: REPORT_VERSION,
            mode: exp.mode,
            runs: out.results.len(),
            master_seed: exp.master_seed,
            data: exp.data.as_ref().map(|p| p.display().to_string()),
            slice: exp.slice.as_ref().map(|s| [s.start_index, s.end_index]),
            series_len: out.series_len,
            loss_threshold: exp.params.initial_mon,
            config: exp.params.clone(),
            twth: StatsBlock {
                stats: out.twth.clone(),
                histogram: histogram(&out.twth_values()),
            },
            sav,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn lines(values: impl Iterator<Item = f64>) -> String {
    let mut s = String::new();
    for v in values {
        writeln!(s, "{v}").expect("writing to a String");
    }
    s
}

/// Plain-text table; rows are `(label, stats, show_loss_probability)`.
pub fn emit_summary_table(rows: &[(&str, &AggregateStats, bool)], loss_threshold: f64) -> String {
    let loss_header = format!("P(twth<={loss_threshold})");
    let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(8);
    let mut s = String::new();
    writeln!(
        s,
        "{:<label_w$}  {:>12}  {:>12}  {:>12}  {:>14}",
        "", "Mean", "Median", "St. Dev.", loss_header
    )
    .unwrap();
    for (label, st, show_loss) in rows {
        let loss = if *show_loss {
            format!("{:.3}", st.p_loss)
        } else {
            "-".to_string()
        };
        writeln!(
            s,
            "{:<label_w$}  {:>12.3}  {:>12.3}  {:>12.3}  {:>14}",
            label, st.mean, st.median, st.std_dev, loss
        )
        .unwrap();
    }
    s
}

/// Writes `total.txt`, `sav.txt`, `report.json` and `summary.txt` into `dir`,
/// creating it if needed, plus `trace.jsonl` when the output carries a trace.
pub fn emit_report(exp: &ExperimentConfig, out: &ExperimentOutput, dir: &Path) -> Result<Report> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join("total.txt"), &lines(out.results.iter().map(|r| r.final_twth)))?;
    write_file(&dir.join("sav.txt"), &lines(out.results.iter().map(|r| r.final_sav)))?;

    let report = Report::new(exp, out);
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_file(&dir.join("report.json"), &json)?;

    let twth_label = match exp.mode {
        RunMode::Agent => "Non-random twth",
        RunMode::Random => "Random twth",
    };
    let mut rows = vec![(twth_label, &out.twth, true)];
    if let Some(sav) = &out.sav {
        rows.push(("sav", sav, false));
    }
    write_file(
        &dir.join("summary.txt"),
        &emit_summary_table(&rows, exp.params.initial_mon),
    )?;

    if let Some(trace) = &out.trace {
        write_trace(trace, &dir.join("trace.jsonl"))?;
    }
    Ok(report)
}

pub fn write_trace(records: &[StepRecord], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_experiment_on, ExperimentConfig};
    use crate::synthetic::{random_walk_series, WalkParams};

    #[test]
    fn files_match_results() {
        let series = random_walk_series(300, 0.01, &WalkParams::default(), 4).unwrap();
        let mut exp = ExperimentConfig::new(RunMode::Agent, 7, 3);
        exp.trace = true;
        let out = run_experiment_on(&exp, &series).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = emit_report(&exp, &out, dir.path()).unwrap();

        let total = std::fs::read_to_string(dir.path().join("total.txt")).unwrap();
        let parsed: Vec<f64> = total.lines().map(|l| l.parse().unwrap()).collect();
        assert_eq!(parsed, out.twth_values());
        assert_eq!(
            std::fs::read_to_string(dir.path().join("sav.txt")).unwrap().lines().count(),
            7
        );

        let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.twth.stats.mean, out.twth.mean);
        assert_eq!(back.twth.histogram.counts.iter().sum::<usize>(), 7);
        assert!(back.sav.is_some());

        let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(summary.contains("Non-random twth") && summary.contains("sav"));
        let trace = std::fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
        assert_eq!(trace.lines().count(), out.results[0].steps_taken);
    }

    #[test]
    fn unwritable_directory_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let series = random_walk_series(50, 0.01, &WalkParams::default(), 4).unwrap();
        let exp = ExperimentConfig::new(RunMode::Random, 2, 3);
        let out = run_experiment_on(&exp, &series).unwrap();
        assert!(matches!(
            emit_report(&exp, &out, &blocker.join("sub")),
            Err(Error::Io { .. })
        ));
    }
}
