//! Synthetic kline data: zero-drift multiplicative random walks.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data_ingest::{filter_series, FilteredSeries, RawKlineRow};
use crate::error::{Error, Result};

const MINUTE_MS: i64 = 60_000;
const START_TIME_MS: i64 = 1_523_923_200_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub start_price: f64,
    /// Per-minute relative step scale; each step multiplies the price by
    /// `1 + step * z` with `z` uniform on [-1, 1].
    pub step: f64,
    /// Scaled volumes are drawn uniformly from this range.
    pub volume_range: (f64, f64),
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            start_price: 1.0,
            step: 0.03,
            volume_range: (5.0, 15.0),
        }
    }
}

/// `n` one-minute rows of a driftless walk. Volumes are already scaled.
pub fn random_walk_klines<R: Rng + ?Sized>(n: usize, params: &WalkParams, rng: &mut R) -> Vec<RawKlineRow> {
    let mut price = params.start_price;
    let (vlo, vhi) = params.volume_range;
    (0..n)
        .map(|k| {
            let row = RawKlineRow {
                open_time: START_TIME_MS + k as i64 * MINUTE_MS,
                open_price: price,
                volume: rng.random_range(vlo..vhi),
            };
            price *= 1.0 + params.step * rng.random_range(-1.0..=1.0);
            row
        })
        .collect()
}

/// Raw walk long enough that exactly `n_filtered` points survive the filter.
pub fn random_walk_raw(
    n_filtered: usize,
    threshold: f64,
    params: &WalkParams,
    seed: u64,
) -> Result<Vec<RawKlineRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = random_walk_klines(n_filtered * 2 + 16, params, &mut rng);
    loop {
        let f = filter_series(&raw, threshold)?;
        if f.len() >= n_filtered {
            let cut = f.raw_indices[n_filtered - 1] + 1;
            raw.truncate(cut);
            return Ok(raw);
        }
        if raw.len() > 1_000 * (n_filtered + 16) {
            return Err(Error::Config(format!(
                "walk step {} too small to reach {n_filtered} filtered points",
                params.step
            )));
        }
        let last = *raw.last().expect("non-empty");
        let more = random_walk_klines(
            raw.len(),
            &WalkParams {
                start_price: last.open_price,
                ..*params
            },
            &mut rng,
        );
        let offset = raw.len() as i64;
        raw.extend(more.into_iter().skip(1).map(|r| RawKlineRow {
            open_time: r.open_time + (offset - 1) * MINUTE_MS,
            ..r
        }));
    }
}

/// Filtered series of exactly `n_filtered` points.
pub fn random_walk_series(
    n_filtered: usize,
    threshold: f64,
    params: &WalkParams,
    seed: u64,
) -> Result<FilteredSeries> {
    let raw = random_walk_raw(n_filtered, threshold, params, seed)?;
    filter_series(&raw, threshold)
}

/// Writes rows in Binance kline layout (open time, open, high, low, close,
/// volume), with the volume unscaled by `volume_scale`.
pub fn write_klines_csv(rows: &[RawKlineRow], volume_scale: f64, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    for (k, r) in rows.iter().enumerate() {
        let close = rows.get(k + 1).map_or(r.open_price, |n| n.open_price);
        let high = r.open_price.max(close);
        let low = r.open_price.min(close);
        writeln!(
            out,
            "{},{},{},{},{},{:.0}",
            r.open_time,
            r.open_price,
            high,
            low,
            close,
            r.volume / volume_scale
        )
        .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
