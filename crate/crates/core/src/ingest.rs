//! Parsing, validation and date-filtering of per-asset OHLCV CSV files.
//!
//! The expected input is one CSV file per asset in the common historical-
//! prices layout (`SNo,Name,Symbol,Date,High,Low,Open,Close,Volume,Marketcap`).
//! Only `Date`, `Close` and `Volume` are required; the remaining columns are
//! kept when their values parse and dropped otherwise. Dates may carry a
//! time-of-day suffix (`2021-07-06 23:59:59`), which is stripped: all
//! downstream computation is daily.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One daily bar. `close` and `volume` drive every criterion; the other
/// fields are retained for inspection and re-serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhlcvRecord {
    pub date: NaiveDate,
    pub open: Option<f64>,
    pub high: Option<f64>,
    pub low: Option<f64>,
    pub close: f64,
    pub volume: f64,
    pub market_cap: Option<f64>,
}

impl OhlcvRecord {
    /// Sanity rules for a single bar: positive close, nonnegative volume,
    /// and when all four prices are present, high/low must bracket open and
    /// close.
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.close > 0.0) {
            return Err(format!("close must be > 0, got {}", self.close));
        }
        if !(self.volume >= 0.0) {
            return Err(format!("volume must be >= 0, got {}", self.volume));
        }
        if let (Some(open), Some(high), Some(low)) = (self.open, self.high, self.low) {
            if high < open.max(self.close) {
                return Err(format!(
                    "high {} is below max(open, close) = {}",
                    high,
                    open.max(self.close)
                ));
            }
            if low > open.min(self.close) {
                return Err(format!(
                    "low {} is above min(open, close) = {}",
                    low,
                    open.min(self.close)
                ));
            }
        }
        Ok(())
    }
}

/// Dated price/volume history for one asset. Records are strictly
/// increasing by date with no duplicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OhlcvSeries {
    pub symbol: String,
    pub name: String,
    pub records: Vec<OhlcvRecord>,
}

impl OhlcvSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.records.first().map(|r| r.date)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.records.last().map(|r| r.date)
    }

    pub fn closes(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.close)
    }

    /// Serialize back to the input CSV layout. Optional fields serialize as
    /// empty cells. Round-trips (date, close, volume) exactly.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("SNo,Name,Symbol,Date,High,Low,Open,Close,Volume,Marketcap\n");
        for (i, r) in self.records.iter().enumerate() {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                i + 1,
                self.name,
                self.symbol,
                r.date.format("%Y-%m-%d 23:59:59"),
                opt(r.high),
                opt(r.low),
                opt(r.open),
                r.close,
                r.volume,
                opt(r.market_cap),
            ));
        }
        out
    }
}

fn parse_date(raw: &str) -> Option<NaiveDate> {
    let trimmed = raw.trim();
    // Timestamp suffix is dropped: take the leading date token.
    let token = trimmed.split_whitespace().next()?;
    NaiveDate::parse_from_str(token, "%Y-%m-%d").ok()
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
}

/// Parse a CSV byte stream into a validated, date-sorted series.
///
/// The ticker comes from the `Symbol` column when present, otherwise
/// `fallback_symbol` is used; likewise `Name` falls back to the symbol.
pub fn parse_csv<R: Read>(reader: R, fallback_symbol: &str) -> Result<OhlcvSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let date_col = column_index(&headers, "Date").ok_or_else(|| Error::MissingColumn {
        column: "Date".into(),
    })?;
    let close_col = column_index(&headers, "Close").ok_or_else(|| Error::MissingColumn {
        column: "Close".into(),
    })?;
    let volume_col = column_index(&headers, "Volume").ok_or_else(|| Error::MissingColumn {
        column: "Volume".into(),
    })?;
    let symbol_col = column_index(&headers, "Symbol");
    let name_col = column_index(&headers, "Name");
    let open_col = column_index(&headers, "Open");
    let high_col = column_index(&headers, "High");
    let low_col = column_index(&headers, "Low");
    let cap_col = column_index(&headers, "Marketcap");

    let mut symbol = String::new();
    let mut name = String::new();
    let mut records = Vec::new();

    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1; // 1-based data row, header excluded
        let row = row?;

        let get = |col: Option<usize>| col.and_then(|c| row.get(c)).unwrap_or("");
        let opt_num = |col: Option<usize>| get(col).parse::<f64>().ok().filter(|v| v.is_finite());

        let date = parse_date(get(Some(date_col))).ok_or_else(|| Error::Row {
            row: row_no,
            message: format!("unparseable date '{}'", get(Some(date_col))),
        })?;
        let close: f64 = get(Some(close_col)).parse().map_err(|_| Error::Row {
            row: row_no,
            message: format!("unparseable close '{}'", get(Some(close_col))),
        })?;
        let volume: f64 = get(Some(volume_col)).parse().map_err(|_| Error::Row {
            row: row_no,
            message: format!("unparseable volume '{}'", get(Some(volume_col))),
        })?;

        let record = OhlcvRecord {
            date,
            open: opt_num(open_col),
            high: opt_num(high_col),
            low: opt_num(low_col),
            close,
            volume,
            market_cap: opt_num(cap_col),
        };
        record.validate().map_err(|message| Error::Row {
            row: row_no,
            message,
        })?;

        if symbol.is_empty() {
            symbol = get(symbol_col).to_string();
        }
        if name.is_empty() {
            name = get(name_col).to_string();
        }
        records.push(record);
    }

    if symbol.is_empty() {
        symbol = fallback_symbol.to_string();
    }
    if name.is_empty() {
        name = symbol.clone();
    }

    records.sort_by_key(|r| r.date);
    for pair in records.windows(2) {
        if pair[0].date == pair[1].date {
            return Err(Error::DuplicateDate {
                symbol,
                date: pair[0].date,
            });
        }
    }

    Ok(OhlcvSeries {
        symbol,
        name,
        records,
    })
}

/// Convenience wrapper: parse a file, using the file stem as the fallback
/// ticker (a `coin_` prefix is dropped first).
pub fn parse_csv_path(path: &Path) -> Result<OhlcvSeries> {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    let fallback = stem.strip_prefix("coin_").unwrap_or(&stem).to_string();
    let file = std::fs::File::open(path)?;
    parse_csv(std::io::BufReader::new(file), &fallback)
}

/// Keep only records with `start <= date <= end` (inclusive both ends).
pub fn filter_date_range(
    series: &OhlcvSeries,
    start: NaiveDate,
    end: NaiveDate,
) -> Result<OhlcvSeries> {
    if start > end {
        return Err(Error::InvalidRange { start, end });
    }
    let records: Vec<OhlcvRecord> = series
        .records
        .iter()
        .filter(|r| r.date >= start && r.date <= end)
        .cloned()
        .collect();
    if records.is_empty() {
        return Err(Error::EmptyRange {
            symbol: series.symbol.clone(),
            start,
            end,
        });
    }
    Ok(OhlcvSeries {
        symbol: series.symbol.clone(),
        name: series.name.clone(),
        records,
    })
}

/// Per-asset gap diagnostics relative to the union of all dates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlignmentReport {
    /// True when every asset covers exactly the same date set.
    pub aligned: bool,
    /// Number of distinct dates across all assets.
    pub union_dates: usize,
    pub per_asset: Vec<AssetAlignment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssetAlignment {
    pub symbol: String,
    pub records: usize,
    /// Dates present in some other asset but missing here.
    pub missing_dates: Vec<NaiveDate>,
}

/// Diagnostic only: report which dates each asset is missing relative to the
/// union of dates across all assets.
pub fn check_alignment(series_set: &[OhlcvSeries]) -> AlignmentReport {
    let union: BTreeSet<NaiveDate> = series_set
        .iter()
        .flat_map(|s| s.records.iter().map(|r| r.date))
        .collect();

    let mut per_asset = Vec::with_capacity(series_set.len());
    let mut aligned = true;
    for series in series_set {
        let own: BTreeSet<NaiveDate> = series.records.iter().map(|r| r.date).collect();
        let missing: Vec<NaiveDate> = union.difference(&own).copied().collect();
        if !missing.is_empty() {
            aligned = false;
        }
        per_asset.push(AssetAlignment {
            symbol: series.symbol.clone(),
            records: series.len(),
            missing_dates: missing,
        });
    }

    AlignmentReport {
        aligned,
        union_dates: union.len(),
        per_asset,
    }
}

/// Scan a directory for `*.csv` files and index the parsed series by ticker.
/// `overrides` maps a ticker to an explicit file path and wins over the scan.
pub fn load_directory(
    dir: &Path,
    overrides: &BTreeMap<String, String>,
) -> Result<BTreeMap<String, OhlcvSeries>> {
    let mut by_symbol = BTreeMap::new();

    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|x| x.eq_ignore_ascii_case("csv"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();

    for path in paths {
        let series = parse_csv_path(&path).map_err(|e| {
            e.in_stage("ingest", &path.file_name().unwrap_or_default().to_string_lossy())
        })?;
        by_symbol.insert(series.symbol.clone(), series);
    }

    for (symbol, path) in overrides {
        let file = std::fs::File::open(Path::new(path))?;
        let series = parse_csv(std::io::BufReader::new(file), symbol)?;
        by_symbol.insert(symbol.clone(), series);
    }

    Ok(by_symbol)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
SNo,Name,Symbol,Date,High,Low,Open,Close,Volume,Marketcap
1,Bitcoin,BTC,2021-01-01 23:59:59,29600.0,28800.0,29000.0,29400.0,1000.0,5.4e11
2,Bitcoin,BTC,2021-01-02 23:59:59,33300.0,29000.0,29400.0,32200.0,2000.0,6.0e11
3,Bitcoin,BTC,2021-01-03 23:59:59,34800.0,32000.0,32200.0,33000.0,1500.0,6.1e11
";

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
    }

    #[test]
    fn parses_well_formed_csv() {
        let series = parse_csv(SAMPLE.as_bytes(), "X").unwrap();
        assert_eq!(series.symbol, "BTC");
        assert_eq!(series.name, "Bitcoin");
        assert_eq!(series.len(), 3);
        assert_eq!(series.first_date().unwrap(), date("2021-01-01"));
        assert_eq!(series.records[1].close, 32200.0);
        assert_eq!(series.records[2].volume, 1500.0);
        assert!(series.records.windows(2).all(|w| w[0].date < w[1].date));
    }

    #[test]
    fn missing_close_column_is_schema_error() {
        let raw = "Date,Volume\n2021-01-01,10\n";
        match parse_csv(raw.as_bytes(), "X") {
            Err(Error::MissingColumn { column }) => assert_eq!(column, "Close"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_order_rows_are_sorted() {
        let raw = "\
Date,Close,Volume
2021-01-02,2.0,20
2021-01-01,1.0,10
";
        let series = parse_csv(raw.as_bytes(), "X").unwrap();
        assert_eq!(series.records[0].date, date("2021-01-01"));
        assert_eq!(series.records[1].date, date("2021-01-02"));
    }

    #[test]
    fn duplicate_date_rejected() {
        let raw = "\
Date,Close,Volume
2021-01-01,1.0,10
2021-01-01,2.0,20
";
        match parse_csv(raw.as_bytes(), "X") {
            Err(Error::DuplicateDate { date: d, .. }) => assert_eq!(d, date("2021-01-01")),
            other => panic!("expected duplicate-date error, got {other:?}"),
        }
    }

    #[test]
    fn unparseable_close_names_row() {
        let raw = "\
Date,Close,Volume
2021-01-01,1.0,10
2021-01-02,oops,20
";
        match parse_csv(raw.as_bytes(), "X") {
            Err(Error::Row { row, .. }) => assert_eq!(row, 2),
            other => panic!("expected row error, got {other:?}"),
        }
    }

    #[test]
    fn nonpositive_close_rejected_zero_volume_kept() {
        let bad = "Date,Close,Volume\n2021-01-01,0.0,10\n";
        assert!(matches!(
            parse_csv(bad.as_bytes(), "X"),
            Err(Error::Row { row: 1, .. })
        ));
        let ok = "Date,Close,Volume\n2021-01-01,1.0,0\n";
        let series = parse_csv(ok.as_bytes(), "X").unwrap();
        assert_eq!(series.records[0].volume, 0.0);
    }

    #[test]
    fn ohlc_sanity_enforced_when_all_prices_present() {
        let raw = "\
Date,High,Low,Open,Close,Volume
2021-01-01,0.9,0.5,1.0,1.0,10
";
        assert!(matches!(
            parse_csv(raw.as_bytes(), "X"),
            Err(Error::Row { row: 1, .. })
        ));
    }

    #[test]
    fn unparseable_optional_column_is_dropped() {
        let raw = "\
Date,High,Low,Open,Close,Volume,Marketcap
2021-01-01,,,,1.0,10,n/a
";
        let series = parse_csv(raw.as_bytes(), "X").unwrap();
        assert_eq!(series.records[0].market_cap, None);
        assert_eq!(series.records[0].open, None);
    }

    #[test]
    fn fallback_symbol_used_without_symbol_column() {
        let raw = "Date,Close,Volume\n2021-01-01,1.0,10\n";
        let series = parse_csv(raw.as_bytes(), "DOGE").unwrap();
        assert_eq!(series.symbol, "DOGE");
        assert_eq!(series.name, "DOGE");
    }

    fn daily_series(n: usize) -> OhlcvSeries {
        let records = (0..n)
            .map(|i| OhlcvRecord {
                date: date("2021-01-01") + chrono::Days::new(i as u64),
                open: None,
                high: None,
                low: None,
                close: 1.0 + i as f64,
                volume: 10.0 * (i + 1) as f64,
                market_cap: None,
            })
            .collect();
        OhlcvSeries {
            symbol: "X".into(),
            name: "X".into(),
            records,
        }
    }

    #[test]
    fn filter_keeps_inclusive_interval() {
        let series = daily_series(10);
        let filtered =
            filter_date_range(&series, date("2021-01-04"), date("2021-01-07")).unwrap();
        assert_eq!(filtered.len(), 4);
        assert_eq!(filtered.first_date().unwrap(), date("2021-01-04"));
        assert_eq!(filtered.last_date().unwrap(), date("2021-01-07"));
    }

    #[test]
    fn filter_full_span_is_identity() {
        let series = daily_series(10);
        let filtered =
            filter_date_range(&series, date("2021-01-01"), date("2021-01-10")).unwrap();
        assert_eq!(filtered, series);
    }

    #[test]
    fn filter_before_first_record_is_empty_range_error() {
        let series = daily_series(10);
        match filter_date_range(&series, date("2020-01-01"), date("2020-02-01")) {
            Err(Error::EmptyRange { symbol, .. }) => assert_eq!(symbol, "X"),
            other => panic!("expected empty-range error, got {other:?}"),
        }
    }

    #[test]
    fn filter_rejects_inverted_range() {
        let series = daily_series(3);
        assert!(matches!(
            filter_date_range(&series, date("2021-01-05"), date("2021-01-01")),
            Err(Error::InvalidRange { .. })
        ));
    }

    #[test]
    fn alignment_identical_dates() {
        let a = daily_series(5);
        let mut b = daily_series(5);
        b.symbol = "Y".into();
        let report = check_alignment(&[a, b]);
        assert!(report.aligned);
        assert!(report.per_asset.iter().all(|a| a.missing_dates.is_empty()));
    }

    #[test]
    fn alignment_flags_missing_interior_date() {
        let a = daily_series(5);
        let mut b = daily_series(5);
        b.symbol = "Y".into();
        b.records.remove(2);
        let removed = date("2021-01-03");
        let report = check_alignment(&[a, b]);
        assert!(!report.aligned);
        let y = report.per_asset.iter().find(|a| a.symbol == "Y").unwrap();
        assert_eq!(y.missing_dates, vec![removed]);
    }

    #[test]
    fn alignment_single_series_is_vacuously_aligned() {
        let report = check_alignment(&[daily_series(4)]);
        assert!(report.aligned);
        assert_eq!(report.union_dates, 4);
    }

    #[test]
    fn csv_round_trip_preserves_date_close_volume() {
        let series = parse_csv(SAMPLE.as_bytes(), "X").unwrap();
        let reparsed = parse_csv(series.to_csv_string().as_bytes(), "X").unwrap();
        assert_eq!(series.len(), reparsed.len());
        for (a, b) in series.records.iter().zip(&reparsed.records) {
            assert_eq!(a.date, b.date);
            assert_eq!(a.close, b.close);
            assert_eq!(a.volume, b.volume);
        }
    }
}
