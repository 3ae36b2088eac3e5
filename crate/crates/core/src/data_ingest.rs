//! Kline CSV ingestion and the relative-change price filter.

use std::path::Path;

use log::warn;

use crate::error::{Error, Result};

/// One 1-minute kline reduced to what the agent observes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawKlineRow {
    pub open_time: i64,
    pub open_price: f64,
    pub volume: f64,
}

/// Prices that survived the filter, each paired with the volume of the raw
/// interval immediately preceding it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FilteredSeries {
    pub prices: Vec<f64>,
    pub volumes: Vec<f64>,
    /// Position of each retained price in the raw input (0-based).
    pub raw_indices: Vec<usize>,
}

impl FilteredSeries {
    pub fn new(prices: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        if prices.len() != volumes.len() {
            return Err(Error::Config(format!(
                "{} prices but {} volumes",
                prices.len(),
                volumes.len()
            )));
        }
        if let Some(k) = prices.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(Error::Parse {
                row: k + 1,
                msg: format!("price must be positive, got {}", prices[k]),
            });
        }
        let raw_indices = (0..prices.len()).collect();
        Ok(Self {
            prices,
            volumes,
            raw_indices,
        })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Contiguous sub-series `[slice.start_index, slice.end_index)`.
    pub fn slice(&self, slice: &DatasetSlice) -> Result<FilteredSeries> {
        let (start, end) = (slice.start_index, slice.end_index);
        if start >= end || end > self.len() {
            return Err(Error::Bounds {
                start,
                end,
                len: self.len(),
            });
        }
        Ok(FilteredSeries {
            prices: self.prices[start..end].to_vec(),
            volumes: self.volumes[start..end].to_vec(),
            raw_indices: self.raw_indices[start..end].to_vec(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSlice {
    pub start_index: usize,
    pub end_index: usize,
    pub label: String,
}

impl DatasetSlice {
    pub fn new(start_index: usize, end_index: usize) -> Self {
        Self {
            start_index,
            end_index,
            label: String::new(),
        }
    }

    /// Parses `start:end`; either side may be empty (`:500`, `100:`).
    pub fn parse(spec: &str, len: usize) -> Result<Self> {
        let (lo, hi) = spec
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("slice {spec:?} is not of the form start:end")))?;
        let bound = |s: &str, default: usize| -> Result<usize> {
            let s = s.trim();
            if s.is_empty() {
                Ok(default)
            } else {
                s.parse()
                    .map_err(|_| Error::Config(format!("bad slice bound {s:?}")))
            }
        };
        Ok(Self {
            start_index: bound(lo, 0)?,
            end_index: bound(hi, len)?,
            label: spec.to_string(),
        })
    }
}

/// Reads kline rows from a headerless CSV. A non-numeric first row is taken
/// to be a header and skipped. Columns are 1-based.
pub fn parse_klines(
    path: &Path,
    price_column: usize,
    volume_column: usize,
    volume_scale: f64,
) -> Result<Vec<RawKlineRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let rows = parse_klines_from_reader(file, price_column, volume_column, volume_scale)?;
    if rows.is_empty() {
        return Err(Error::EmptyInput(path.display().to_string()));
    }
    Ok(rows)
}

pub fn parse_klines_from_reader<R: std::io::Read>(
    reader: R,
    price_column: usize,
    volume_column: usize,
    volume_scale: f64,
) -> Result<Vec<RawKlineRow>> {
    if price_column == 0 || volume_column == 0 {
        return Err(Error::Config("CSV columns are 1-based".into()));
    }
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows: Vec<RawKlineRow> = Vec::new();
    for (idx, record) in csv.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            msg: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let field = |col: usize, what: &str| -> Result<&str> {
            record.get(col - 1).ok_or_else(|| Error::Parse {
                row,
                msg: format!("missing {what} column {col}"),
            })
        };
        let price_str = field(price_column, "price")?;
        let price: f64 = match price_str.parse() {
            Ok(p) => p,
            Err(_) if row == 1 => {
                warn!("skipping non-numeric first row (assumed header): {price_str:?}");
                continue;
            }
            Err(_) => {
                return Err(Error::Parse {
                    row,
                    msg: format!("non-numeric price {price_str:?}"),
                })
            }
        };
        let volume_str = field(volume_column, "volume")?;
        let volume: f64 = volume_str.parse().map_err(|_| Error::Parse {
            row,
            msg: format!("non-numeric volume {volume_str:?}"),
        })?;
        let open_time_str = field(1, "open time")?;
        let open_time: i64 = open_time_str.parse().map_err(|_| Error::Parse {
            row,
            msg: format!("non-integer open time {open_time_str:?}"),
        })?;

        if !(price > 0.0 && price.is_finite()) {
            return Err(Error::Parse {
                row,
                msg: format!("price must be positive, got {price}"),
            });
        }
        if !(volume >= 0.0 && volume.is_finite()) {
            return Err(Error::Parse {
                row,
                msg: format!("volume must be non-negative, got {volume}"),
            });
        }
        if let Some(prev) = rows.last() {
            if open_time <= prev.open_time {
                return Err(Error::Parse {
                    row,
                    msg: format!(
                        "open time {open_time} does not follow previous {}",
                        prev.open_time
                    ),
                });
            }
        }
        rows.push(RawKlineRow {
            open_time,
            open_price: price,
            volume: volume * volume_scale,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput("CSV input".into()));
    }
    Ok(rows)
}

/// Keeps a raw price only when it moved by more than `threshold` relative to
/// the last kept price.
///
/// The first kept point is the second raw price paired with the first raw
/// volume; every later kept price at raw index `i` is paired with the volume
/// at `i - 1`.
pub fn filter_series(raw: &[RawKlineRow], threshold: f64) -> Result<FilteredSeries> {
    if raw.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: raw.len(),
        });
    }
    let mut out = FilteredSeries {
        prices: vec![raw[1].open_price],
        volumes: vec![raw[0].volume],
        raw_indices: vec![1],
    };
    let mut reference = raw[1].open_price;
    for i in 2..raw.len() {
        let p = raw[i].open_price;
        if (p - reference).abs() / reference > threshold {
            reference = p;
            out.prices.push(p);
            out.volumes.push(raw[i - 1].volume);
            out.raw_indices.push(i);
        }
    }
    Ok(out)
}

/// Parse and filter in one go, using the column/scale/threshold settings of
/// `cfg`.
pub fn load_series(path: &Path, cfg: &crate::Config) -> Result<FilteredSeries> {
    let raw = parse_klines(path, cfg.price_column, cfg.volume_column, cfg.volume_scale)?;
    filter_series(&raw, cfg.filter_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(prices: &[f64]) -> Vec<RawKlineRow> {
        prices
            .iter()
            .enumerate()
            .map(|(i, &p)| RawKlineRow {
                open_time: i as i64 * 60_000,
                open_price: p,
                volume: (i + 1) as f64,
            })
            .collect()
    }

    #[test]
    fn parses_price_and_scaled_volume() {
        let csv = "1523923200000,0.2612,0.2655,0.2601,0.2633,183456123\n";
        let rows = parse_klines_from_reader(csv.as_bytes(), 2, 6, 1e-7).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].open_price, 0.2612);
        assert!((rows[0].volume - 18.3456123).abs() < 1e-9);
    }

    #[test]
    fn empty_input_is_an_error() {
        let err = parse_klines_from_reader("".as_bytes(), 2, 6, 1e-7).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
    }

    #[test]
    fn non_numeric_price_names_row() {
        let csv = "1,0.5,0,0,0,10\n2,abc,0,0,0,10\n";
        match parse_klines_from_reader(csv.as_bytes(), 2, 6, 1.0).unwrap_err() {
            Error::Parse { row, .. } => assert_eq!(row, 2),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn header_row_skipped() {
        let csv = "open_time,open,high,low,close,volume\n1,0.5,0,0,0,10\n2,0.6,0,0,0,20\n";
        let rows = parse_klines_from_reader(csv.as_bytes(), 2, 6, 1.0).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].volume, 20.0);
    }

    #[test]
    fn unordered_times_rejected() {
        let csv = "2,0.5,0,0,0,10\n1,0.6,0,0,0,20\n";
        assert!(matches!(
            parse_klines_from_reader(csv.as_bytes(), 2, 6, 1.0),
            Err(Error::Parse { row: 2, .. })
        ));
    }

    #[test]
    fn filter_hand_trace() {
        let raw = rows(&[1.000, 1.000, 1.005, 1.011, 1.020, 1.0201]);
        let f = filter_series(&raw, 0.01).unwrap();
        assert_eq!(f.prices, vec![1.000, 1.011]);
        // v1 and v3 in 1-based raw numbering
        assert_eq!(f.volumes, vec![1.0, 3.0]);
        assert_eq!(f.raw_indices, vec![1, 3]);
    }

    #[test]
    fn constant_series_keeps_one_point() {
        let f = filter_series(&rows(&[2.0; 50]), 0.01).unwrap();
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn alternating_two_percent_moves_all_kept() {
        let mut p = vec![1.0];
        for k in 1..40 {
            let last = *p.last().unwrap();
            p.push(if k % 2 == 1 { last * 1.02 } else { last * 0.98 });
        }
        let f = filter_series(&rows(&p), 0.01).unwrap();
        assert_eq!(f.len(), p.len() - 1);
        assert_eq!(f.prices, p[1..].to_vec());
    }

    #[test]
    fn too_short_for_filter() {
        assert!(matches!(
            filter_series(&rows(&[1.0]), 0.01),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn slicing() {
        let s = FilteredSeries::new((1..=20).map(f64::from).collect(), vec![1.0; 20]).unwrap();
        assert_eq!(s.slice(&DatasetSlice::new(0, 20)).unwrap(), s);
        let sub = s.slice(&DatasetSlice::new(5, 10)).unwrap();
        assert_eq!(sub.prices, vec![6.0, 7.0, 8.0, 9.0, 10.0]);
        assert_eq!(sub.raw_indices, vec![5, 6, 7, 8, 9]);
        assert!(matches!(
            s.slice(&DatasetSlice::new(10, 5)),
            Err(Error::Bounds { .. })
        ));
        assert!(s.slice(&DatasetSlice::new(0, 21)).is_err());
    }

    #[test]
    fn slice_spec_parsing() {
        assert_eq!(DatasetSlice::parse("5:10", 20).unwrap().end_index, 10);
        let open = DatasetSlice::parse("5:", 20).unwrap();
        assert_eq!((open.start_index, open.end_index), (5, 20));
        assert!(DatasetSlice::parse("5-10", 20).is_err());
    }
}
