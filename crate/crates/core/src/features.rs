//! Per-asset criteria computed over overlapping moving windows.
//!
//! Six quantities per asset and window length: mean and standard deviation
//! of the window return, mean and standard deviation of the window volume,
//! and the mean slope and mean R² of a per-window least-squares fit between
//! closing price and traded volume.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{OhlcvRecord, OhlcvSeries};
use crate::stats::{self, Ddof};

/// Window geometry: `length` counts consecutive records (not calendar days),
/// `stride` is the offset between successive window starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub length: usize,
    pub stride: usize,
}

impl WindowSpec {
    pub fn new(length: usize, stride: usize) -> Result<Self> {
        if length < 2 {
            return Err(Error::Config(format!(
                "window length must be >= 2, got {length}"
            )));
        }
        if stride < 1 {
            return Err(Error::Config("window stride must be >= 1".into()));
        }
        Ok(WindowSpec { length, stride })
    }

    /// Maximal-overlap windows (stride 1).
    pub fn overlapping(length: usize) -> Result<Self> {
        WindowSpec::new(length, 1)
    }
}

/// Which variable regresses on which in the per-window trend fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TrendOrientation {
    /// Close is the response, volume the regressor.
    #[default]
    CloseOnVolume,
    /// Volume is the response, close the regressor.
    VolumeOnClose,
}

/// Slope and fit quality of one window's trend regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    pub slope: f64,
    pub r_squared: f64,
    /// Set when the fit was undefined (zero variance in regressor or
    /// response) and the 0/0 convention produced the values above.
    pub degenerate: bool,
}

/// The per-window quantities the criteria aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    pub window_return: f64,
    pub window_volume: f64,
    pub trend: TrendFit,
}

/// One asset's six criteria values for one window length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaRow {
    pub symbol: String,
    pub mean_return: f64,
    pub std_return: f64,
    pub mean_volume: f64,
    pub std_volume: f64,
    pub mean_slope: f64,
    pub mean_r2: f64,
    /// Number of windows whose trend fit hit the degenerate convention.
    pub degenerate_fits: usize,
    pub window_count: usize,
}

impl CriteriaRow {
    /// Criteria values in the fixed matrix column order.
    pub fn values(&self) -> [f64; 6] {
        [
            self.mean_return,
            self.std_return,
            self.mean_volume,
            self.std_volume,
            self.mean_slope,
            self.mean_r2,
        ]
    }
}

/// All length-`spec.length` slices of consecutive records, advancing by
/// `spec.stride`. With stride 1 this yields exactly `n - length + 1` windows.
pub fn enumerate_windows<'a>(
    series: &'a OhlcvSeries,
    spec: &WindowSpec,
) -> Result<Vec<&'a [OhlcvRecord]>> {
    let n = series.len();
    if n < spec.length {
        return Err(Error::InsufficientData {
            context: format!("windows of length {} over '{}'", spec.length, series.symbol),
            needed: spec.length,
            got: n,
        });
    }
    Ok(series
        .records
        .windows(spec.length)
        .step_by(spec.stride)
        .collect())
}

/// Relative change of the closing price from the first to the last record.
pub fn window_return(slice: &[OhlcvRecord]) -> Result<f64> {
    let first = slice.first().ok_or_else(|| Error::InsufficientData {
        context: "window return".into(),
        needed: 1,
        got: 0,
    })?;
    let last = slice.last().unwrap();
    if first.close <= 0.0 {
        return Err(Error::DegeneratePrice {
            symbol: String::new(),
            message: format!("first close of window is {}", first.close),
        });
    }
    Ok((last.close - first.close) / first.close)
}

/// Sum of traded volume over the window.
pub fn window_volume(slice: &[OhlcvRecord]) -> f64 {
    slice.iter().map(|r| r.volume).sum()
}

/// Least-squares trend between close and volume within one window.
///
/// With [`TrendOrientation::CloseOnVolume`] volume is the regressor and
/// close the response. Degenerate fits (zero variance on either axis) map
/// to slope 0 and R² 0 with the `degenerate` flag set, keeping the pipeline
/// total.
pub fn window_trend(slice: &[OhlcvRecord], orientation: TrendOrientation) -> Result<TrendFit> {
    if slice.len() < 2 {
        return Err(Error::InsufficientData {
            context: "trend fit".into(),
            needed: 2,
            got: slice.len(),
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = match orientation {
        TrendOrientation::CloseOnVolume => slice.iter().map(|r| (r.volume, r.close)).unzip(),
        TrendOrientation::VolumeOnClose => slice.iter().map(|r| (r.close, r.volume)).unzip(),
    };

    let mx = stats::mean(&xs);
    let my = stats::mean(&ys);
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }

    if sxx == 0.0 || syy == 0.0 {
        return Ok(TrendFit {
            slope: 0.0,
            r_squared: 0.0,
            degenerate: true,
        });
    }
    Ok(TrendFit {
        slope: sxy / sxx,
        r_squared: (sxy * sxy) / (sxx * syy),
        degenerate: false,
    })
}

/// Per-window stats for every window of the series.
pub fn window_stats(
    series: &OhlcvSeries,
    spec: &WindowSpec,
    orientation: TrendOrientation,
) -> Result<Vec<WindowStats>> {
    enumerate_windows(series, spec)?
        .into_iter()
        .map(|slice| {
            Ok(WindowStats {
                window_return: window_return(slice).map_err(|e| match e {
                    Error::DegeneratePrice { message, .. } => Error::DegeneratePrice {
                        symbol: series.symbol.clone(),
                        message,
                    },
                    other => other,
                })?,
                window_volume: window_volume(slice),
                trend: window_trend(slice, orientation)?,
            })
        })
        .collect()
}

/// Aggregate the per-window stats into the asset's six criteria.
/// Standard deviations need at least two windows.
pub fn criteria_row(
    series: &OhlcvSeries,
    spec: &WindowSpec,
    orientation: TrendOrientation,
    ddof: Ddof,
) -> Result<CriteriaRow> {
    let stats_per_window = window_stats(series, spec, orientation)?;
    if stats_per_window.len() < 2 {
        return Err(Error::InsufficientData {
            context: format!("criteria for '{}'", series.symbol),
            needed: spec.length + spec.stride,
            got: series.len(),
        });
    }

    let returns: Vec<f64> = stats_per_window.iter().map(|w| w.window_return).collect();
    let volumes: Vec<f64> = stats_per_window.iter().map(|w| w.window_volume).collect();
    let slopes: Vec<f64> = stats_per_window.iter().map(|w| w.trend.slope).collect();
    let r2s: Vec<f64> = stats_per_window.iter().map(|w| w.trend.r_squared).collect();
    let degenerate_fits = stats_per_window.iter().filter(|w| w.trend.degenerate).count();

    Ok(CriteriaRow {
        symbol: series.symbol.clone(),
        mean_return: stats::mean(&returns),
        std_return: stats::stddev(&returns, ddof),
        mean_volume: stats::mean(&volumes),
        std_volume: stats::stddev(&volumes, ddof),
        mean_slope: stats::mean(&slopes),
        mean_r2: stats::mean(&r2s),
        degenerate_fits,
        window_count: stats_per_window.len(),
    })
}
