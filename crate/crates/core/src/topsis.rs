//! Ranking alternatives by similarity to the ideal solution, and comparing
//! rankings produced under different weight vectors.
//!
//! The classic construction: weight the normalized matrix (v_ij = w_j·r_ij),
//! take the per-column maximum as the ideal point and the per-column minimum
//! as the anti-ideal (every criterion is a maximization one by this stage),
//! and score each alternative by C_i = S_i⁻ / (S_i⁺ + S_i⁻) where S_i± are
//! Euclidean distances to the two points.

use serde::{Deserialize, Serialize};

use crate::decision::{DecisionMatrix, Sense, Stage};
use crate::error::{Error, Result};
use crate::stats;
use crate::weighting::WeightVector;

/// One alternative's distances, similarity index and rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopsisEntry {
    pub symbol: String,
    /// Euclidean distance to the ideal point (S⁺).
    pub d_ideal: f64,
    /// Euclidean distance to the anti-ideal point (S⁻).
    pub d_anti: f64,
    /// C = S⁻ / (S⁺ + S⁻), in [0, 1]; 1 means coincident with the ideal.
    pub similarity: f64,
    /// 1-based position; higher similarity means a smaller rank.
    pub rank: usize,
    /// Set when S⁺ + S⁻ was zero and the 0.5 convention was applied.
    pub degenerate: bool,
}

/// A full ranking of the matrix's alternatives under one weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopsisRanking {
    /// Entries in matrix (symbol) order.
    pub entries: Vec<TopsisEntry>,
}

impl TopsisRanking {
    /// Symbols ordered by rank (best first).
    pub fn symbols_by_rank(&self) -> Vec<String> {
        let mut sorted: Vec<&TopsisEntry> = self.entries.iter().collect();
        sorted.sort_by_key(|e| e.rank);
        sorted.iter().map(|e| e.symbol.clone()).collect()
    }

    /// The best `k` symbols as a sorted set.
    pub fn top_k(&self, k: usize) -> Vec<String> {
        let mut top: Vec<String> = self
            .entries
            .iter()
            .filter(|e| e.rank <= k)
            .map(|e| e.symbol.clone())
            .collect();
        top.sort();
        top
    }

    /// Ranks aligned with `entries` order (symbol order).
    pub fn ranks(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.rank).collect()
    }
}

/// Rank all alternatives of a normalized, maximize-only matrix under the
/// given weights. Ties in similarity break by ascending symbol, so the
/// ranking is a deterministic permutation of 1..n.
pub fn topsis_rank(matrix: &DecisionMatrix, weights: &WeightVector) -> Result<TopsisRanking> {
    matrix.require_stage(Stage::Normalized)?;
    if let Some(c) = matrix.criteria().iter().find(|c| c.sense != Sense::Maximize) {
        return Err(Error::Validation(format!(
            "criterion '{}' still has minimize sense; transform the matrix first",
            c.id
        )));
    }
    let m = matrix.n_criteria();
    if weights.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: weights.len(),
        });
    }

    let n = matrix.n_alternatives();
    let mut ideal = vec![f64::NEG_INFINITY; m];
    let mut anti = vec![f64::INFINITY; m];
    let mut weighted = vec![vec![0.0f64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let v = weights.weights[j] * matrix.value(i, j);
            weighted[i][j] = v;
            ideal[j] = ideal[j].max(v);
            anti[j] = anti[j].min(v);
        }
    }

    if ideal.iter().zip(&anti).all(|(a, b)| a == b) {
        return Err(Error::DegenerateRanking);
    }

    let mut entries: Vec<TopsisEntry> = (0..n)
        .map(|i| {
            let mut d_plus = 0.0;
            let mut d_minus = 0.0;
            for j in 0..m {
                let dp = weighted[i][j] - ideal[j];
                let dm = weighted[i][j] - anti[j];
                d_plus += dp * dp;
                d_minus += dm * dm;
            }
            let d_ideal = d_plus.sqrt();
            let d_anti = d_minus.sqrt();
            let denom = d_ideal + d_anti;
            let (similarity, degenerate) = if denom == 0.0 {
                (0.5, true)
            } else {
                (d_anti / denom, false)
            };
            TopsisEntry {
                symbol: matrix.alternatives()[i].clone(),
                d_ideal,
                d_anti,
                similarity,
                rank: 0,
                degenerate,
            }
        })
        .collect();

    // descending similarity, ties by ascending symbol
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        entries[b]
            .similarity
            .total_cmp(&entries[a].similarity)
            .then_with(|| entries[a].symbol.cmp(&entries[b].symbol))
    });
    for (pos, &idx) in order.iter().enumerate() {
        entries[idx].rank = pos + 1;
    }

    Ok(TopsisRanking { entries })
}

/// Pairwise agreement between rankings over the same alternatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub labels: Vec<String>,
    /// Full symmetric Spearman matrix, indexed like `labels`.
    pub spearman: Vec<Vec<f64>>,
    /// Per-alternative rank spread (max rank − min rank across rankings),
    /// in symbol order.
    pub rank_spread: Vec<RankSpread>,
    /// Alternatives ranked in the top 2 by every ranking, sorted.
    pub common_top2: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSpread {
    pub symbol: String,
    pub min_rank: usize,
    pub max_rank: usize,
    pub spread: usize,
}

impl AgreementReport {
    /// Spearman correlation for a labelled pair.
    pub fn spearman_between(&self, a: &str, b: &str) -> Option<f64> {
        let ia = self.labels.iter().position(|l| l == a)?;
        let ib = self.labels.iter().position(|l| l == b)?;
        Some(self.spearman[ia][ib])
    }

    /// Smallest off-diagonal Spearman value among the given labels.
    pub fn min_spearman_among(&self, labels: &[&str]) -> Option<f64> {
        let mut min: Option<f64> = None;
        for (i, a) in labels.iter().enumerate() {
            for b in &labels[i + 1..] {
                let rho = self.spearman_between(a, b)?;
                min = Some(min.map_or(rho, |m: f64| m.min(rho)));
            }
        }
        min
    }
}

/// Compare rankings produced by different methods (or window sizes) over
/// the same alternative set.
pub fn compare_rankings(
    rankings: &[TopsisRanking],
    labels: &[String],
) -> Result<AgreementReport> {
    if rankings.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: rankings.len(),
            got: labels.len(),
        });
    }
    if rankings.len() < 2 {
        return Err(Error::Validation(
            "need at least two rankings to compare".into(),
        ));
    }
    let symbols: Vec<String> = rankings[0].entries.iter().map(|e| e.symbol.clone()).collect();
    for (ranking, label) in rankings.iter().zip(labels) {
        let other: Vec<String> = ranking.entries.iter().map(|e| e.symbol.clone()).collect();
        if other != symbols {
            return Err(Error::MismatchedAlternatives {
                message: format!("ranking '{label}' covers a different alternative set"),
            });
        }
    }

    let rank_vectors: Vec<Vec<usize>> = rankings.iter().map(|r| r.ranks()).collect();
    let k = rankings.len();
    let mut spearman = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let rho = stats::spearman_from_ranks(&rank_vectors[i], &rank_vectors[j]);
            spearman[i][j] = rho;
            spearman[j][i] = rho;
        }
    }

    let rank_spread = symbols
        .iter()
        .enumerate()
        .map(|(idx, symbol)| {
            let ranks: Vec<usize> = rank_vectors.iter().map(|rv| rv[idx]).collect();
            let min_rank = *ranks.iter().min().unwrap();
            let max_rank = *ranks.iter().max().unwrap();
            RankSpread {
                symbol: symbol.clone(),
                min_rank,
                max_rank,
                spread: max_rank - min_rank,
            }
        })
        .collect();

    let mut common_top2: Vec<String> = symbols
        .iter()
        .enumerate()
        .filter(|(idx, _)| rank_vectors.iter().all(|rv| rv[*idx] <= 2))
        .map(|(_, s)| s.clone())
        .collect();
    common_top2.sort();

    Ok(AgreementReport {
        labels: labels.to_vec(),
        spearman,
        rank_spread,
        common_top2,
    })
}
