//! Run configuration: defaults, TOML config file, environment overrides.
//!
//! Precedence, lowest to highest: built-in defaults, config file, `COINRANK_*`
//! environment variables, command-line flags. The defaults reproduce the
//! reference experiment: nine majors over 2018-10-09..2021-07-06 with 7- and
//! 15-day windows, so `run --data-dir <dir>` needs nothing else.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::decision::MinTransform;
use crate::error::{Error, Result};
use crate::features::TrendOrientation;
use crate::stats::Ddof;
use crate::weighting::CriticConstantColumn;

/// Environment variable prefix recognized by [`RunConfig::apply_env`].
pub const ENV_PREFIX: &str = "COINRANK_";

/// Which export families to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(Error::Config(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub data_dir: PathBuf,
    pub symbols: Vec<String>,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub window_lengths: Vec<usize>,
    pub stride: usize,
    pub ddof: Ddof,
    pub min_transform: MinTransform,
    pub min_transform_epsilon: Option<f64>,
    pub trend_orientation: TrendOrientation,
    pub critic_constant_column: CriticConstantColumn,
    pub output_dir: Option<PathBuf>,
    pub format: OutputFormat,
    /// Explicit ticker → file path overrides for files without a usable
    /// Symbol column.
    pub symbol_files: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data_dir: PathBuf::from("."),
            symbols: ["ADA", "BNB", "BTC", "DOGE", "ETH", "LINK", "LTC", "XLM", "XRP"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            start_date: NaiveDate::from_ymd_opt(2018, 10, 9).unwrap(),
            end_date: NaiveDate::from_ymd_opt(2021, 7, 6).unwrap(),
            window_lengths: vec![7, 15],
            stride: 1,
            ddof: Ddof::Sample,
            min_transform: MinTransform::Reciprocal,
            min_transform_epsilon: None,
            trend_orientation: TrendOrientation::CloseOnVolume,
            critic_constant_column: CriticConstantColumn::Error,
            output_dir: None,
            format: OutputFormat::Both,
            symbol_files: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    /// Load a TOML config file over the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        toml::from_str(&raw).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Apply `COINRANK_*` environment overrides (values parsed like the
    /// corresponding CLI flags).
    pub fn apply_env(&mut self) -> Result<()> {
        self.apply_env_from(|key| std::env::var(key).ok())
    }

    /// Same as [`apply_env`](Self::apply_env) with an injectable lookup, for tests.
    pub fn apply_env_from<F>(&mut self, lookup: F) -> Result<()>
    where
        F: Fn(&str) -> Option<String>,
    {
        let get = |suffix: &str| lookup(&format!("{ENV_PREFIX}{suffix}"));
        if let Some(v) = get("DATA_DIR") {
            self.data_dir = PathBuf::from(v);
        }
        if let Some(v) = get("SYMBOLS") {
            self.symbols = parse_symbol_list(&v);
        }
        if let Some(v) = get("START_DATE") {
            self.start_date = parse_date_arg(&v)?;
        }
        if let Some(v) = get("END_DATE") {
            self.end_date = parse_date_arg(&v)?;
        }
        if let Some(v) = get("WINDOW") {
            self.window_lengths = parse_window_list(&v)?;
        }
        if let Some(v) = get("STRIDE") {
            self.stride = v
                .parse()
                .map_err(|_| Error::Config(format!("invalid stride '{v}'")))?;
        }
        if let Some(v) = get("DDOF") {
            self.ddof = parse_ddof_arg(&v)?;
        }
        if let Some(v) = get("MIN_TRANSFORM") {
            self.min_transform = parse_min_transform_arg(&v)?;
        }
        if let Some(v) = get("MIN_TRANSFORM_EPSILON") {
            self.min_transform_epsilon = Some(
                v.parse()
                    .map_err(|_| Error::Config(format!("invalid epsilon '{v}'")))?,
            );
        }
        if let Some(v) = get("TREND_ORIENTATION") {
            self.trend_orientation = parse_orientation_arg(&v)?;
        }
        if let Some(v) = get("CRITIC_CONSTANT_COLUMN") {
            self.critic_constant_column = parse_critic_policy_arg(&v)?;
        }
        if let Some(v) = get("OUT") {
            self.output_dir = Some(PathBuf::from(v));
        }
        if let Some(v) = get("FORMAT") {
            self.format = v.parse()?;
        }
        Ok(())
    }

    /// Validate cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        if self.start_date > self.end_date {
            return Err(Error::InvalidRange {
                start: self.start_date,
                end: self.end_date,
            });
        }
        if self.window_lengths.is_empty() {
            return Err(Error::Config("window_lengths must be nonempty".into()));
        }
        if let Some(w) = self.window_lengths.iter().find(|w| **w < 2) {
            return Err(Error::Config(format!(
                "window length must be >= 2, got {w}"
            )));
        }
        if self.stride < 1 {
            return Err(Error::Config("stride must be >= 1".into()));
        }
        if self.symbols.len() < 2 {
            return Err(Error::Config(
                "need at least 2 symbols to rank alternatives".into(),
            ));
        }
        if let Some(eps) = self.min_transform_epsilon {
            if !(eps > 0.0) {
                return Err(Error::Config(format!("epsilon must be > 0, got {eps}")));
            }
        }
        Ok(())
    }
}

pub fn parse_date_arg(raw: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(raw.trim(), "%Y-%m-%d")
        .map_err(|_| Error::Config(format!("invalid date '{raw}', expected YYYY-MM-DD")))
}

pub fn parse_symbol_list(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(|s| s.trim().to_uppercase())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_window_list(raw: &str) -> Result<Vec<usize>> {
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Config(format!("invalid window length '{s}'")))
        })
        .collect()
}

pub fn parse_ddof_arg(raw: &str) -> Result<Ddof> {
    raw.trim()
        .parse::<u8>()
        .ok()
        .and_then(Ddof::from_u8)
        .ok_or_else(|| Error::Config(format!("ddof must be 0 or 1, got '{raw}'")))
}

pub fn parse_min_transform_arg(raw: &str) -> Result<MinTransform> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "reciprocal" => Ok(MinTransform::Reciprocal),
        "max-complement" => Ok(MinTransform::MaxComplement),
        other => Err(Error::Config(format!("unknown min-transform '{other}'"))),
    }
}

pub fn parse_orientation_arg(raw: &str) -> Result<TrendOrientation> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "close-on-volume" => Ok(TrendOrientation::CloseOnVolume),
        "volume-on-close" => Ok(TrendOrientation::VolumeOnClose),
        other => Err(Error::Config(format!("unknown trend orientation '{other}'"))),
    }
}

pub fn parse_critic_policy_arg(raw: &str) -> Result<CriticConstantColumn> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "error" => Ok(CriticConstantColumn::Error),
        "drop" => Ok(CriticConstantColumn::Drop),
        other => Err(Error::Config(format!(
            "unknown critic constant-column policy '{other}'"
        ))),
    }
}
