//! Small statistics helpers used by the feature, weighting and comparison
//! modules. Everything operates on plain `&[f64]` slices.

use serde::{Deserialize, Serialize};

/// Degrees-of-freedom correction for standard deviations.
///
/// `Sample` divides squared deviations by `n - 1`, `Population` by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ddof {
    Population,
    #[default]
    Sample,
}

impl Ddof {
    pub fn offset(self) -> usize {
        match self {
            Ddof::Population => 0,
            Ddof::Sample => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Ddof::Population),
            1 => Some(Ddof::Sample),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        self.offset() as u8
    }
}

pub fn mean(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard deviation with the requested degrees-of-freedom correction.
/// Requires `values.len() > ddof.offset()`.
pub fn stddev(values: &[f64], ddof: Ddof) -> f64 {
    let n = values.len();
    debug_assert!(n > ddof.offset());
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (n - ddof.offset()) as f64).sqrt()
}

/// Pearson correlation coefficient. Returns `None` when either input has
/// zero variance (the coefficient is undefined there).
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    debug_assert_eq!(x.len(), y.len());
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Spearman rank correlation between two rank vectors.
///
/// The inputs are already ranks (permutations of 1..n with no ties), so the
/// closed form `1 - 6 * sum(d^2) / (n * (n^2 - 1))` applies directly.
pub fn spearman_from_ranks(ranks_a: &[usize], ranks_b: &[usize]) -> f64 {
    debug_assert_eq!(ranks_a.len(), ranks_b.len());
    let n = ranks_a.len();
    debug_assert!(n >= 2);
    let d2: f64 = ranks_a
        .iter()
        .zip(ranks_b)
        .map(|(a, b)| {
            let d = *a as f64 - *b as f64;
            d * d
        })
        .sum();
    let nf = n as f64;
    1.0 - 6.0 * d2 / (nf * (nf * nf - 1.0))
}
