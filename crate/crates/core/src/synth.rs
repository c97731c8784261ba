//! Deterministic synthetic OHLCV data for tests, benchmarks and smoke runs.
//!
//! The generator is a small xorshift PRNG seeded from the symbol name, so a
//! given (symbol, length) pair always produces the same series. Prices
//! follow a geometric walk with mild positive drift and volume is positively
//! coupled to price, which keeps every criterion column usable by all four
//! weighting methods (no constant columns, no negative means).

use chrono::NaiveDate;

use crate::ingest::{OhlcvRecord, OhlcvSeries};

/// Minimal xorshift64* generator; enough randomness for test fixtures.
#[derive(Debug, Clone)]
pub struct SplitMix(u64);

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Roughly standard normal (Irwin–Hall with 12 uniforms).
    pub fn next_gaussian(&mut self) -> f64 {
        (0..12).map(|_| self.next_f64()).sum::<f64>() - 6.0
    }
}

fn seed_from_symbol(symbol: &str) -> u64 {
    symbol
        .bytes()
        .fold(0xcbf29ce484222325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100000001b3)
        })
}

/// A daily series of `n_days` records starting at `start`, deterministic in
/// `(symbol, start, n_days)`.
pub fn synthetic_series(symbol: &str, name: &str, start: NaiveDate, n_days: usize) -> OhlcvSeries {
    let mut rng = SplitMix::new(seed_from_symbol(symbol));
    let base_price = 0.05 + 2000.0 * rng.next_f64();
    let base_volume = 1e6 + 1e9 * rng.next_f64();
    let drift = 0.0015 + 0.0020 * rng.next_f64();
    let vol = 0.015 + 0.030 * rng.next_f64();

    let mut price = base_price;
    let records = (0..n_days)
        .map(|i| {
            let shock = rng.next_gaussian();
            price *= (drift + vol * shock).exp();
            // volume tracks price with multiplicative noise
            let volume = base_volume * (price / base_price) * (0.2 * rng.next_gaussian()).exp();
            let spread = price * (0.005 + 0.01 * rng.next_f64());
            let open = price * (1.0 + 0.004 * rng.next_gaussian());
            let high = open.max(price) + spread;
            let low = (open.min(price) - spread).max(price * 0.01);
            OhlcvRecord {
                date: start + chrono::Days::new(i as u64),
                open: Some(open),
                high: Some(high),
                low: Some(low),
                close: price,
                volume,
                market_cap: Some(price * 1e7),
            }
        })
        .collect();

    OhlcvSeries {
        symbol: symbol.to_string(),
        name: name.to_string(),
        records,
    }
}

/// Write one `coin_<Name>.csv` per symbol under `dir`, covering `n_days`
/// daily records from `start`. Returns the written paths.
pub fn write_synthetic_dataset(
    dir: &std::path::Path,
    symbols: &[(&str, &str)],
    start: NaiveDate,
    n_days: usize,
) -> std::io::Result<Vec<std::path::PathBuf>> {
    let mut paths = Vec::new();
    for (symbol, name) in symbols {
        let series = synthetic_series(symbol, name, start, n_days);
        let path = dir.join(format!("coin_{name}.csv"));
        std::fs::write(&path, series.to_csv_string())?;
        paths.push(path);
    }
    Ok(paths)
}

/// The nine default tickers with display names, handy for fixtures.
pub const DEFAULT_UNIVERSE: [(&str, &str); 9] = [
    ("ADA", "Cardano"),
    ("BNB", "BinanceCoin"),
    ("BTC", "Bitcoin"),
    ("DOGE", "Dogecoin"),
    ("ETH", "Ethereum"),
    ("LINK", "Chainlink"),
    ("LTC", "Litecoin"),
    ("XLM", "Stellar"),
    ("XRP", "XRP"),
];
