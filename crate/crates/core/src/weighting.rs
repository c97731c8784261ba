//! Criterion weight vectors computed from a normalized decision matrix by
//! four methods: a uniform constant, contrast intensity (standard
//! deviation), information entropy, and CRITIC.
//!
//! All methods read the matrix after the minimization transform and the
//! vector-modulus normalization. The entropy method weights by H_j / Σ H_k
//! directly, which favours high-entropy (less discriminating) criteria; the
//! more common divergence variant (1 - e_j) is intentionally not used here.

use serde::{Deserialize, Serialize};

use crate::decision::{DecisionMatrix, Stage};
use crate::error::{Error, Result};
use crate::stats::{self, Ddof};

/// The four weighting methods, in their fixed output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMethod {
    Mean,
    StdDev,
    Entropy,
    Critic,
}

impl WeightMethod {
    pub const ALL: [WeightMethod; 4] = [
        WeightMethod::Mean,
        WeightMethod::StdDev,
        WeightMethod::Entropy,
        WeightMethod::Critic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightMethod::Mean => "mean",
            WeightMethod::StdDev => "stddev",
            WeightMethod::Entropy => "entropy",
            WeightMethod::Critic => "critic",
        }
    }
}

impl std::fmt::Display for WeightMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-criterion nonnegative weights summing to one, tagged with the method
/// that produced them. `raw_scores` are the pre-normalization scores
/// (σ_j, H_j, C_j as applicable).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub method: WeightMethod,
    pub weights: Vec<f64>,
    pub raw_scores: Vec<f64>,
}

impl WeightVector {
    /// Normalize nonnegative raw scores into weights summing to 1.
    fn from_raw_scores(method: WeightMethod, raw_scores: Vec<f64>) -> Result<Self> {
        let total: f64 = raw_scores.iter().sum();
        if total <= 0.0 {
            return Err(Error::DegenerateWeights {
                method: method.name().into(),
                message: "all raw scores are zero".into(),
            });
        }
        let weights = raw_scores.iter().map(|s| s / total).collect();
        Ok(WeightVector {
            method,
            weights,
            raw_scores,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Every criterion gets the same weight 1/m. Values are unused, so any
/// stage is accepted.
pub fn mean_weights(matrix: &DecisionMatrix) -> WeightVector {
    let m = matrix.n_criteria();
    WeightVector {
        method: WeightMethod::Mean,
        weights: vec![1.0 / m as f64; m],
        raw_scores: vec![1.0; m],
    }
}

/// w_j = σ_j / Σ_k σ_k over the normalized columns.
pub fn stddev_weights(matrix: &DecisionMatrix, ddof: Ddof) -> Result<WeightVector> {
    matrix.require_stage(Stage::Normalized)?;
    let sigmas: Vec<f64> = (0..matrix.n_criteria())
        .map(|j| stats::stddev(&matrix.column(j), ddof))
        .collect();
    WeightVector::from_raw_scores(WeightMethod::StdDev, sigmas).map_err(|_| {
        Error::DegenerateWeights {
            method: "stddev".into(),
            message: "every column is constant".into(),
        }
    })
}

/// Logarithm base for the entropy computation. The weight vector is
/// invariant to this choice (the base cancels in H_j / Σ H_k); it exists so
/// that invariance is testable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    Natural,
    Two,
}

impl LogBase {
    fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// Shannon entropy of each column's share distribution, normalized to
/// weights: p_ij = r_ij / Σ_i r_ij, H_j = Σ_i p_ij·log(1/p_ij),
/// w_j = H_j / Σ_k H_k. Zero shares contribute zero.
pub fn entropy_weights_with_base(
    matrix: &DecisionMatrix,
    base: LogBase,
) -> Result<WeightVector> {
    matrix.require_stage(Stage::Normalized)?;
    let mut entropies = Vec::with_capacity(matrix.n_criteria());
    for j in 0..matrix.n_criteria() {
        let col = matrix.column(j);
        let id = &matrix.criteria()[j].id;
        if let Some(v) = col.iter().find(|v| **v < 0.0) {
            return Err(Error::NegativeEntry {
                criterion: id.clone(),
                value: *v,
            });
        }
        let total: f64 = col.iter().sum();
        if total == 0.0 {
            return Err(Error::ZeroColumn { criterion: id.clone() });
        }
        let h: f64 = col
            .iter()
            .map(|v| {
                let p = v / total;
                if p > 0.0 {
                    -p * base.log(p)
                } else {
                    0.0
                }
            })
            .sum();
        entropies.push(h);
    }
    WeightVector::from_raw_scores(WeightMethod::Entropy, entropies).map_err(|_| {
        Error::DegenerateWeights {
            method: "entropy".into(),
            message: "every column is concentrated on a single alternative".into(),
        }
    })
}

pub fn entropy_weights(matrix: &DecisionMatrix) -> Result<WeightVector> {
    entropy_weights_with_base(matrix, LogBase::Natural)
}

/// What CRITIC does when a column is constant (Pearson undefined).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CriticConstantColumn {
    /// Fail with an error naming the criterion.
    #[default]
    Error,
    /// Exclude the column from the computation; it receives weight 0 and is
    /// reported to the caller.
    Drop,
}

/// C_j = σ_j · Σ_k (1 − r_jk) with Pearson correlations between columns,
/// normalized to weights. Returns the weights together with the ids of any
/// columns dropped under [`CriticConstantColumn::Drop`].
pub fn critic_weights_with_policy(
    matrix: &DecisionMatrix,
    ddof: Ddof,
    policy: CriticConstantColumn,
) -> Result<(WeightVector, Vec<String>)> {
    matrix.require_stage(Stage::Normalized)?;
    let m = matrix.n_criteria();
    let columns: Vec<Vec<f64>> = (0..m).map(|j| matrix.column(j)).collect();

    let is_constant =
        |col: &[f64]| col.windows(2).all(|pair| pair[0] == pair[1]);

    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        if is_constant(col) {
            match policy {
                CriticConstantColumn::Error => {
                    return Err(Error::ConstantColumn {
                        criterion: matrix.criteria()[j].id.clone(),
                    })
                }
                CriticConstantColumn::Drop => dropped.push(matrix.criteria()[j].id.clone()),
            }
        } else {
            kept.push(j);
        }
    }
    if kept.is_empty() {
        return Err(Error::DegenerateWeights {
            method: "critic".into(),
            message: "every column is constant".into(),
        });
    }

    let mut raw_scores = vec![0.0; m];
    for &j in &kept {
        let sigma = stats::stddev(&columns[j], ddof);
        let decorrelation: f64 = kept
            .iter()
            .map(|&k| {
                let r = stats::pearson(&columns[j], &columns[k])
                    .expect("kept columns are non-constant");
                1.0 - r
            })
            .sum();
        raw_scores[j] = sigma * decorrelation;
    }

    let vector = WeightVector::from_raw_scores(WeightMethod::Critic, raw_scores).map_err(|_| {
        Error::DegenerateWeights {
            method: "critic".into(),
            message: "all C_j scores are zero (perfectly correlated columns)".into(),
        }
    })?;
    Ok((vector, dropped))
}

pub fn critic_weights(matrix: &DecisionMatrix, ddof: Ddof) -> Result<WeightVector> {
    critic_weights_with_policy(matrix, ddof, CriticConstantColumn::Error).map(|(v, _)| v)
}

/// A method that failed inside [`compute_all`], with its error.
#[derive(Debug)]
pub struct MethodFailure {
    pub method: WeightMethod,
    pub error: Error,
}

/// Outcome of running all four methods: successful vectors in the fixed
/// method order, failures listed separately.
#[derive(Debug, Default)]
pub struct WeightingOutcome {
    pub vectors: Vec<WeightVector>,
    pub failures: Vec<MethodFailure>,
    /// Criteria excluded by the CRITIC constant-column drop policy.
    pub critic_dropped: Vec<String>,
}

impl WeightingOutcome {
    pub fn all_succeeded(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Run all four methods in the fixed order (mean, stddev, entropy, critic),
/// collecting per-method errors instead of stopping at the first.
pub fn compute_all(
    matrix: &DecisionMatrix,
    ddof: Ddof,
    critic_policy: CriticConstantColumn,
) -> WeightingOutcome {
    let mut outcome = WeightingOutcome::default();
    for method in WeightMethod::ALL {
        let result = match method {
            WeightMethod::Mean => Ok(mean_weights(matrix)),
            WeightMethod::StdDev => stddev_weights(matrix, ddof),
            WeightMethod::Entropy => entropy_weights(matrix),
            WeightMethod::Critic => critic_weights_with_policy(matrix, ddof, critic_policy)
                .map(|(vector, dropped)| {
                    outcome.critic_dropped = dropped;
                    vector
                }),
        };
        match result {
            Ok(vector) => outcome.vectors.push(vector),
            Err(error) => outcome.failures.push(MethodFailure { method, error }),
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{CriterionSpec, MinTransform, Sense};

    /// Build a normalized matrix from raw maximize-only values via the
    /// regular pipeline path.
    fn normalized(values: Vec<Vec<f64>>) -> DecisionMatrix {
        let n = values.len();
        let m = values[0].len();
        let alternatives = (0..n).map(|i| format!("A{i}")).collect();
        let criteria = (0..m)
            .map(|j| CriterionSpec::new(&format!("c{j}"), Sense::Maximize, ""))
            .collect();
        DecisionMatrix::new(alternatives, criteria, values)
            .unwrap()
            .transform_min_to_max(MinTransform::Reciprocal, None)
            .unwrap()
            .matrix
            .normalize_vector_modulus()
            .unwrap()
    }

    fn assert_weights_sum_to_one(v: &WeightVector) {
        assert!((v.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(v.weights.iter().all(|w| *w >= 0.0));
    }

    #[test]
    fn mean_weights_are_uniform() {
        let matrix = normalized(vec![vec![1.0; 6], vec![2.0; 6]]);
        let v = mean_weights(&matrix);
        assert_eq!(v.weights, vec![1.0 / 6.0; 6]);

        let m4 = normalized(vec![vec![1.0; 4], vec![2.0; 4]]);
        assert_eq!(mean_weights(&m4).weights, vec![0.25; 4]);

        let m1 = normalized(vec![vec![1.0], vec![2.0]]);
        assert_eq!(mean_weights(&m1).weights, vec![1.0]);
    }

    #[test]
    fn stddev_weights_proportional_to_sigma() {
        let matrix = normalized(vec![vec![1.0, 1.0], vec![1.1, 1.3]]);
        let v = stddev_weights(&matrix, Ddof::Sample).unwrap();
        // w_j must equal σ_j / Σσ with σ computed independently on the
        // normalized columns
        let s0 = stats::stddev(&matrix.column(0), Ddof::Sample);
        let s1 = stats::stddev(&matrix.column(1), Ddof::Sample);
        assert!((v.weights[0] - s0 / (s0 + s1)).abs() < 1e-12);
        assert!((v.weights[1] - s1 / (s0 + s1)).abs() < 1e-12);
        assert_weights_sum_to_one(&v);
    }

    #[test]
    fn stddev_weights_direct_ratio() {
        // columns already unit-norm with sample σ in ratio 1:3 -> [0.25, 0.75]
        let d = 0.1;
        // col built as [a, b] with a² + b² = 1 and b - a = diff
        let col = |diff: f64| {
            let a = (-diff + (2.0 - diff * diff).sqrt()) / 2.0;
            (a, a + diff)
        };
        let (a0, b0) = col(d);
        let (a1, b1) = col(3.0 * d);
        assert!((a0 * a0 + b0 * b0 - 1.0).abs() < 1e-12);
        let matrix = DecisionMatrix::new(
            vec!["A".into(), "B".into()],
            vec![
                CriterionSpec::new("c0", Sense::Maximize, ""),
                CriterionSpec::new("c1", Sense::Maximize, ""),
            ],
            vec![vec![a0, a1], vec![b0, b1]],
        )
        .unwrap()
        .transform_min_to_max(MinTransform::Reciprocal, None)
        .unwrap()
        .matrix
        .normalize_vector_modulus()
        .unwrap();
        let v = stddev_weights(&matrix, Ddof::Sample).unwrap();
        assert!((v.weights[0] - 0.25).abs() < 1e-9);
        assert!((v.weights[1] - 0.75).abs() < 1e-9);
    }

    #[test]
    fn stddev_weight_zero_for_constant_column() {
        // col 0 constant after normalization (all raw entries equal)
        let matrix = normalized(vec![
            vec![2.0, 1.0],
            vec![2.0, 2.0],
            vec![2.0, 4.0],
        ]);
        let v = stddev_weights(&matrix, Ddof::Sample).unwrap();
        assert_eq!(v.weights[0], 0.0);
        assert!((v.weights[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stddev_equal_sigma_uniform_weights() {
        // mirrored columns have identical spread
        let matrix = normalized(vec![vec![1.0, 1.0], vec![3.0, 3.0]]);
        let v = stddev_weights(&matrix, Ddof::Sample).unwrap();
        assert!((v.weights[0] - 0.5).abs() < 1e-12);
        assert!((v.weights[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn stddev_all_constant_is_degenerate() {
        let matrix = normalized(vec![vec![1.0, 2.0], vec![1.0, 2.0]]);
        assert!(matches!(
            stddev_weights(&matrix, Ddof::Sample),
            Err(Error::DegenerateWeights { .. })
        ));
    }

    #[test]
    fn entropy_uniform_column_has_maximal_entropy() {
        // 4 alternatives, single uniform column -> H = log 4
        let matrix = normalized(vec![vec![1.0]; 4]);
        let v = entropy_weights(&matrix).unwrap();
        assert!((v.raw_scores[0] - 4.0f64.ln()).abs() < 1e-12);
        assert_eq!(v.weights, vec![1.0]);
    }

    #[test]
    fn entropy_point_mass_column_is_zero() {
        // col 1: single nonzero entry -> H = 0
        let matrix = normalized(vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![1.0, 0.0]]);
        let v = entropy_weights(&matrix).unwrap();
        assert_eq!(v.raw_scores[1], 0.0);
        assert_eq!(v.weights[1], 0.0);
        assert!((v.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_two_column_derived_values() {
        // col A uniform over 2; col B shares [0.9, 0.1]
        let matrix = normalized(vec![vec![1.0, 9.0], vec![1.0, 1.0]]);
        let v = entropy_weights(&matrix).unwrap();
        let h_a = 2.0f64.ln();
        let h_b = 0.9 * (1.0f64 / 0.9).ln() + 0.1 * 10.0f64.ln();
        let expected_a = h_a / (h_a + h_b);
        assert!((v.weights[0] - expected_a).abs() < 1e-12);
        assert!((v.weights[1] - (1.0 - expected_a)).abs() < 1e-12);
        // ballpark from the direct evaluation: ~[0.68, 0.32]
        assert!((v.weights[0] - 0.6807).abs() < 1e-3);
    }

    #[test]
    fn entropy_negative_entry_is_domain_error() {
        // craft a normalized-stage matrix with a negative entry by pushing a
        // mixed-sign maximize column through the pipeline
        let matrix = normalized(vec![vec![1.0, -1.0], vec![1.0, 2.0]]);
        assert!(matches!(
            entropy_weights(&matrix),
            Err(Error::NegativeEntry { .. })
        ));
    }

    #[test]
    fn entropy_base_invariance() {
        let matrix = normalized(vec![
            vec![0.3, 2.0, 0.7],
            vec![1.1, 0.4, 0.9],
            vec![0.8, 1.5, 0.2],
        ]);
        let nat = entropy_weights_with_base(&matrix, LogBase::Natural).unwrap();
        let two = entropy_weights_with_base(&matrix, LogBase::Two).unwrap();
        for (a, b) in nat.weights.iter().zip(&two.weights) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn critic_perfectly_correlated_columns_degenerate() {
        // identical columns: r = 1 everywhere -> all C_j = 0
        let matrix = normalized(vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]);
        assert!(matches!(
            critic_weights(&matrix, Ddof::Sample),
            Err(Error::DegenerateWeights { .. })
        ));
    }

    #[test]
    fn critic_anti_correlated_equal_sigma_splits_evenly() {
        // after unit-norm scaling these two columns mirror each other: r = -1
        let matrix = normalized(vec![vec![1.0, 3.0], vec![2.0, 2.0], vec![3.0, 1.0]]);
        let v = critic_weights(&matrix, Ddof::Sample).unwrap();
        assert!((v.weights[0] - 0.5).abs() < 1e-9);
        assert!((v.weights[1] - 0.5).abs() < 1e-9);
        assert_weights_sum_to_one(&v);
    }

    #[test]
    fn critic_constant_column_errors_by_default() {
        let matrix = normalized(vec![vec![5.0, 1.0], vec![5.0, 2.0], vec![5.0, 4.0]]);
        match critic_weights(&matrix, Ddof::Sample) {
            Err(Error::ConstantColumn { criterion }) => assert_eq!(criterion, "c0"),
            other => panic!("expected constant-column error, got {other:?}"),
        }
    }

    #[test]
    fn critic_drop_policy_excludes_column() {
        let matrix = normalized(vec![
            vec![5.0, 1.0, 2.0],
            vec![5.0, 2.0, 5.0],
            vec![5.0, 4.0, 3.0],
        ]);
        let (v, dropped) =
            critic_weights_with_policy(&matrix, Ddof::Sample, CriticConstantColumn::Drop)
                .unwrap();
        assert_eq!(dropped, vec!["c0".to_string()]);
        assert_eq!(v.weights[0], 0.0);
        assert_weights_sum_to_one(&v);
    }

    #[test]
    fn compute_all_fixed_order() {
        let matrix = normalized(vec![
            vec![0.2, 1.0, 3.0],
            vec![0.9, 0.5, 1.0],
            vec![0.4, 0.8, 2.0],
        ]);
        let outcome = compute_all(&matrix, Ddof::Sample, CriticConstantColumn::Error);
        assert!(outcome.all_succeeded());
        let methods: Vec<WeightMethod> = outcome.vectors.iter().map(|v| v.method).collect();
        assert_eq!(methods, WeightMethod::ALL);
        for v in &outcome.vectors {
            assert_weights_sum_to_one(v);
            assert_eq!(v.len(), 3);
        }
    }

    #[test]
    fn compute_all_uniform_matrix_partial_failure() {
        // every column constant: mean and entropy succeed, stddev and critic
        // are degenerate
        let matrix = normalized(vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        let outcome = compute_all(&matrix, Ddof::Sample, CriticConstantColumn::Error);
        let ok: Vec<WeightMethod> = outcome.vectors.iter().map(|v| v.method).collect();
        assert_eq!(ok, [WeightMethod::Mean, WeightMethod::Entropy]);
        let failed: Vec<WeightMethod> = outcome.failures.iter().map(|f| f.method).collect();
        assert_eq!(failed, [WeightMethod::StdDev, WeightMethod::Critic]);
    }

    #[test]
    fn weights_require_normalized_stage() {
        let raw = DecisionMatrix::new(
            vec!["A".into(), "B".into()],
            vec![CriterionSpec::new("c0", Sense::Maximize, "")],
            vec![vec![1.0], vec![2.0]],
        )
        .unwrap();
        assert!(matches!(
            stddev_weights(&raw, Ddof::Sample),
            Err(Error::StageMismatch { .. })
        ));
        assert!(matches!(entropy_weights(&raw), Err(Error::StageMismatch { .. })));
        assert!(matches!(
            critic_weights(&raw, Ddof::Sample),
            Err(Error::StageMismatch { .. })
        ));
        // mean accepts any stage
        assert_eq!(mean_weights(&raw).weights, vec![1.0]);
    }
}
