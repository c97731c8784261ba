//! The alternatives × criteria decision matrix and its two preparation
//! steps: turning minimization criteria into maximization ones, and
//! normalizing every column to unit Euclidean length.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::CriteriaRow;

/// Whether larger values of a criterion are better or worse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Identity and optimization sense of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub id: String,
    pub sense: Sense,
    pub description: String,
}

impl CriterionSpec {
    pub fn new(id: &str, sense: Sense, description: &str) -> Self {
        CriterionSpec {
            id: id.to_string(),
            sense,
            description: description.to_string(),
        }
    }
}

/// The six criteria in their fixed column order.
pub fn standard_criteria() -> Vec<CriterionSpec> {
    vec![
        CriterionSpec::new("xRV", Sense::Maximize, "mean window return"),
        CriterionSpec::new("sRV", Sense::Minimize, "std dev of window return"),
        CriterionSpec::new("xVV", Sense::Maximize, "mean window volume"),
        CriterionSpec::new("sVV", Sense::Minimize, "std dev of window volume"),
        CriterionSpec::new("xm", Sense::Maximize, "mean close~volume trend slope"),
        CriterionSpec::new("xR2", Sense::Maximize, "mean trend fit R²"),
    ]
}

/// Processing stage of a matrix. Stages only ever advance
/// raw → transformed → normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Transformed,
    Normalized,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Raw => "raw",
            Stage::Transformed => "transformed",
            Stage::Normalized => "normalized",
        };
        f.write_str(s)
    }
}

/// How minimization criteria become maximization ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MinTransform {
    /// x' = 1/x. Keeps entries strictly positive; undefined at x <= 0.
    #[default]
    Reciprocal,
    /// x' = max(column) - x. Total, but produces zeros at the column max.
    MaxComplement,
}

impl std::fmt::Display for MinTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MinTransform::Reciprocal => "reciprocal",
            MinTransform::MaxComplement => "max-complement",
        };
        f.write_str(s)
    }
}

/// One epsilon substitution performed by the transform, for the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSubstitution {
    pub criterion: String,
    pub alternative: String,
    pub original: f64,
    pub replacement: f64,
}

/// Result of [`DecisionMatrix::transform_min_to_max`].
#[derive(Debug, Clone)]
pub struct TransformOutcome {
    pub matrix: DecisionMatrix,
    pub substitutions: Vec<EpsilonSubstitution>,
}

/// n alternatives × m criteria, row-major, with per-criterion senses and a
/// stage tag tracking which preparation steps have been applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    alternatives: Vec<String>,
    criteria: Vec<CriterionSpec>,
    values: Vec<Vec<f64>>,
    stage: Stage,
}

impl DecisionMatrix {
    /// Build a raw matrix. Dimensions must be consistent, with at least two
    /// alternatives and one criterion; alternative symbols and criterion ids
    /// must be unique.
    pub fn new(
        alternatives: Vec<String>,
        criteria: Vec<CriterionSpec>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = alternatives.len();
        let m = criteria.len();
        if n < 2 {
            return Err(Error::Validation(format!(
                "decision matrix needs at least 2 alternatives, got {n}"
            )));
        }
        if m < 1 {
            return Err(Error::Validation("decision matrix needs at least 1 criterion".into()));
        }
        if values.len() != n || values.iter().any(|row| row.len() != m) {
            return Err(Error::Validation(format!(
                "value matrix is not {n}x{m}"
            )));
        }
        for (i, a) in alternatives.iter().enumerate() {
            if alternatives[..i].contains(a) {
                return Err(Error::Validation(format!("duplicate alternative '{a}'")));
            }
        }
        for (j, c) in criteria.iter().enumerate() {
            if criteria[..j].iter().any(|other| other.id == c.id) {
                return Err(Error::Validation(format!("duplicate criterion id '{}'", c.id)));
            }
        }
        Ok(DecisionMatrix {
            alternatives,
            criteria,
            values,
            stage: Stage::Raw,
        })
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[CriterionSpec] {
        &self.criteria
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn n_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn n_criteria(&self) -> usize {
        self.criteria.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    pub fn require_stage(&self, expected: Stage) -> Result<()> {
        if self.stage != expected {
            return Err(Error::StageMismatch {
                expected: expected.to_string(),
                got: self.stage.to_string(),
            });
        }
        Ok(())
    }

    /// Assemble a raw matrix from per-asset criteria rows, sorted by symbol,
    /// with the standard criteria order and senses.
    pub fn assemble(rows: &[CriteriaRow]) -> Result<Self> {
        let mut sorted: Vec<&CriteriaRow> = rows.iter().collect();
        sorted.sort_by(|a, b| a.symbol.cmp(&b.symbol));
        for pair in sorted.windows(2) {
            if pair[0].symbol == pair[1].symbol {
                return Err(Error::Validation(format!(
                    "duplicate alternative '{}'",
                    pair[0].symbol
                )));
            }
        }
        let alternatives = sorted.iter().map(|r| r.symbol.clone()).collect();
        let values = sorted.iter().map(|r| r.values().to_vec()).collect();
        DecisionMatrix::new(alternatives, standard_criteria(), values)
    }

    /// Replace minimize columns per `transform` and re-tag them maximize.
    ///
    /// With [`MinTransform::Reciprocal`], entries that are not strictly
    /// positive are an error unless `epsilon` is given, in which case every
    /// entry below `epsilon` is first raised to `epsilon`; each substitution
    /// is reported in the outcome.
    pub fn transform_min_to_max(
        &self,
        transform: MinTransform,
        epsilon: Option<f64>,
    ) -> Result<TransformOutcome> {
        self.require_stage(Stage::Raw)?;
        if let Some(eps) = epsilon {
            if !(eps > 0.0) {
                return Err(Error::Config(format!(
                    "min-transform epsilon must be > 0, got {eps}"
                )));
            }
        }

        let mut values = self.values.clone();
        let mut criteria = self.criteria.clone();
        let mut substitutions = Vec::new();

        for (j, criterion) in criteria.iter_mut().enumerate() {
            if criterion.sense != Sense::Minimize {
                continue;
            }
            match transform {
                MinTransform::Reciprocal => {
                    for (i, row) in values.iter_mut().enumerate() {
                        let mut v = row[j];
                        if let Some(eps) = epsilon {
                            if v < eps {
                                substitutions.push(EpsilonSubstitution {
                                    criterion: criterion.id.clone(),
                                    alternative: self.alternatives[i].clone(),
                                    original: v,
                                    replacement: eps,
                                });
                                v = eps;
                            }
                        }
                        if v <= 0.0 {
                            return Err(Error::MinTransform {
                                criterion: criterion.id.clone(),
                                alternative: self.alternatives[i].clone(),
                                value: v,
                            });
                        }
                        row[j] = 1.0 / v;
                    }
                }
                MinTransform::MaxComplement => {
                    let max = self
                        .column(j)
                        .into_iter()
                        .fold(f64::NEG_INFINITY, f64::max);
                    for row in values.iter_mut() {
                        row[j] = max - row[j];
                    }
                }
            }
            criterion.sense = Sense::Maximize;
        }

        Ok(TransformOutcome {
            matrix: DecisionMatrix {
                alternatives: self.alternatives.clone(),
                criteria,
                values,
                stage: Stage::Transformed,
            },
            substitutions,
        })
    }

    /// Divide each column by its Euclidean norm: r_ij = x_ij / sqrt(Σ_i x_ij²).
    pub fn normalize_vector_modulus(&self) -> Result<DecisionMatrix> {
        self.require_stage(Stage::Transformed)?;
        let m = self.n_criteria();
        let mut norms = vec![0.0f64; m];
        for row in &self.values {
            for (j, v) in row.iter().enumerate() {
                norms[j] += v * v;
            }
        }
        for (j, norm) in norms.iter_mut().enumerate() {
            *norm = norm.sqrt();
            if *norm == 0.0 {
                return Err(Error::ZeroColumn {
                    criterion: self.criteria[j].id.clone(),
                });
            }
        }
        let values = self
            .values
            .iter()
            .map(|row| row.iter().zip(&norms).map(|(v, n)| v / n).collect())
            .collect();
        Ok(DecisionMatrix {
            alternatives: self.alternatives.clone(),
            criteria: self.criteria.clone(),
            values,
            stage: Stage::Normalized,
        })
    }

    /// Criteria whose column carries both strictly positive and strictly
    /// negative entries. Flagged in run logs: unit-norm scaling is applied
    /// as-is to such columns.
    pub fn mixed_sign_columns(&self) -> Vec<String> {
        (0..self.n_criteria())
            .filter(|&j| {
                let col = self.column(j);
                col.iter().any(|v| *v > 0.0) && col.iter().any(|v| *v < 0.0)
            })
            .map(|j| self.criteria[j].id.clone())
            .collect()
    }

    /// CSV export: `symbol,<criterion ids...>`, floats at 9 significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("symbol");
        for c in &self.criteria {
            out.push(',');
            out.push_str(&c.id);
        }
        out.push('\n');
        for (i, symbol) in self.alternatives.iter().enumerate() {
            out.push_str(symbol);
            for v in &self.values[i] {
                out.push(',');
                out.push_str(&crate::pipeline::fmt_sig9(*v));
            }
            out.push('\n');
        }
        out
    }

    /// Sidecar metadata (stage, senses, transform) as a TOML document.
    pub fn metadata_toml(&self, transform: Option<MinTransform>) -> String {
        #[derive(Serialize)]
        struct CriterionMeta {
            id: String,
            sense: String,
        }
        #[derive(Serialize)]
        struct Meta {
            stage: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            min_transform: Option<String>,
            criteria: Vec<CriterionMeta>,
        }
        let meta = Meta {
            stage: self.stage.to_string(),
            min_transform: transform.map(|t| t.to_string()),
            criteria: self
                .criteria
                .iter()
                .map(|c| CriterionMeta {
                    id: c.id.clone(),
                    sense: match c.sense {
                        Sense::Maximize => "maximize".into(),
                        Sense::Minimize => "minimize".into(),
                    },
                })
                .collect(),
        };
        toml::to_string(&meta).expect("matrix metadata serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(symbol: &str, values: [f64; 6]) -> CriteriaRow {
        CriteriaRow {
            symbol: symbol.into(),
            mean_return: values[0],
            std_return: values[1],
            mean_volume: values[2],
            std_volume: values[3],
            mean_slope: values[4],
            mean_r2: values[5],
            degenerate_fits: 0,
            window_count: 10,
        }
    }

    fn matrix_from(values: Vec<Vec<f64>>, senses: &[Sense]) -> DecisionMatrix {
        let n = values.len();
        let alternatives = (0..n).map(|i| format!("A{i}")).collect();
        let criteria = senses
            .iter()
            .enumerate()
            .map(|(j, s)| CriterionSpec::new(&format!("c{j}"), *s, ""))
            .collect();
        DecisionMatrix::new(alternatives, criteria, values).unwrap()
    }

    #[test]
    fn assemble_nine_rows() {
        let symbols = ["ADA", "BNB", "BTC", "DOGE", "ETH", "LINK", "LTC", "XLM", "XRP"];
        let rows: Vec<CriteriaRow> = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| row(s, [i as f64 + 1.0; 6]))
            .collect();
        let matrix = DecisionMatrix::assemble(&rows).unwrap();
        assert_eq!(matrix.n_alternatives(), 9);
        assert_eq!(matrix.n_criteria(), 6);
        assert_eq!(matrix.stage(), Stage::Raw);
        let ids: Vec<&str> = matrix.criteria().iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, ["xRV", "sRV", "xVV", "sVV", "xm", "xR2"]);
        let senses: Vec<Sense> = matrix.criteria().iter().map(|c| c.sense).collect();
        assert_eq!(
            senses,
            [
                Sense::Maximize,
                Sense::Minimize,
                Sense::Maximize,
                Sense::Minimize,
                Sense::Maximize,
                Sense::Maximize
            ]
        );
    }

    #[test]
    fn assemble_sorts_by_symbol() {
        let rows = vec![row("ZEC", [1.0; 6]), row("ABC", [2.0; 6])];
        let matrix = DecisionMatrix::assemble(&rows).unwrap();
        assert_eq!(matrix.alternatives(), ["ABC", "ZEC"]);
        assert_eq!(matrix.value(0, 0), 2.0);
    }

    #[test]
    fn assemble_accepts_identical_rows_distinct_symbols() {
        let rows = vec![row("AAA", [1.0; 6]), row("BBB", [1.0; 6])];
        let matrix = DecisionMatrix::assemble(&rows).unwrap();
        assert_eq!(matrix.row(0), matrix.row(1));
    }

    #[test]
    fn assemble_rejects_duplicate_symbol() {
        let rows = vec![row("BTC", [1.0; 6]), row("BTC", [2.0; 6])];
        match DecisionMatrix::assemble(&rows) {
            Err(Error::Validation(msg)) => assert!(msg.contains("BTC")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn reciprocal_transform_flips_sense() {
        let matrix = matrix_from(
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            &[Sense::Maximize, Sense::Minimize],
        );
        let out = matrix
            .transform_min_to_max(MinTransform::Reciprocal, None)
            .unwrap();
        assert_eq!(out.matrix.stage(), Stage::Transformed);
        assert_eq!(out.matrix.column(0), vec![1.0, 3.0]);
        assert_eq!(out.matrix.column(1), vec![0.5, 0.25]);
        assert_eq!(out.matrix.criteria()[1].sense, Sense::Maximize);
        assert!(out.substitutions.is_empty());
    }

    #[test]
    fn transform_without_min_columns_only_advances_stage() {
        let matrix = matrix_from(
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            &[Sense::Maximize, Sense::Maximize],
        );
        let out = matrix
            .transform_min_to_max(MinTransform::Reciprocal, None)
            .unwrap();
        assert_eq!(out.matrix.column(0), vec![1.0, 3.0]);
        assert_eq!(out.matrix.column(1), vec![2.0, 4.0]);
        assert_eq!(out.matrix.stage(), Stage::Transformed);
    }

    #[test]
    fn reciprocal_rejects_zero_entry() {
        let matrix = matrix_from(
            vec![vec![1.0, 0.0], vec![3.0, 4.0]],
            &[Sense::Maximize, Sense::Minimize],
        );
        match matrix.transform_min_to_max(MinTransform::Reciprocal, None) {
            Err(Error::MinTransform { criterion, alternative, value }) => {
                assert_eq!(criterion, "c1");
                assert_eq!(alternative, "A0");
                assert_eq!(value, 0.0);
            }
            other => panic!("expected transform error, got {other:?}"),
        }
    }

    #[test]
    fn epsilon_policy_substitutes_and_reports() {
        let matrix = matrix_from(
            vec![vec![1.0, 0.0], vec![3.0, 4.0]],
            &[Sense::Maximize, Sense::Minimize],
        );
        let out = matrix
            .transform_min_to_max(MinTransform::Reciprocal, Some(1e-3))
            .unwrap();
        assert_eq!(out.substitutions.len(), 1);
        assert_eq!(out.substitutions[0].criterion, "c1");
        assert_eq!(out.substitutions[0].original, 0.0);
        assert_eq!(out.matrix.value(0, 1), 1e3);
    }

    #[test]
    fn max_complement_transform() {
        let matrix = matrix_from(
            vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            &[Sense::Maximize, Sense::Minimize],
        );
        let out = matrix
            .transform_min_to_max(MinTransform::MaxComplement, None)
            .unwrap();
        assert_eq!(out.matrix.column(1), vec![2.0, 0.0]);
    }

    #[test]
    fn normalize_three_four_five() {
        let matrix = matrix_from(vec![vec![3.0], vec![4.0]], &[Sense::Maximize]);
        let normalized = matrix
            .transform_min_to_max(MinTransform::Reciprocal, None)
            .unwrap()
            .matrix
            .normalize_vector_modulus()
            .unwrap();
        assert_eq!(normalized.stage(), Stage::Normalized);
        assert!((normalized.value(0, 0) - 0.6).abs() < 1e-12);
        assert!((normalized.value(1, 0) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn normalize_uniform_column() {
        let matrix = matrix_from(
            vec![vec![1.0], vec![1.0], vec![1.0], vec![1.0]],
            &[Sense::Maximize],
        );
        let normalized = matrix
            .transform_min_to_max(MinTransform::Reciprocal, None)
            .unwrap()
            .matrix
            .normalize_vector_modulus()
            .unwrap();
        for i in 0..4 {
            assert!((normalized.value(i, 0) - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn normalize_rejects_all_zero_column() {
        let matrix = matrix_from(
            vec![vec![1.0, 0.0], vec![2.0, 0.0]],
            &[Sense::Maximize, Sense::Maximize],
        );
        let transformed = matrix
            .transform_min_to_max(MinTransform::Reciprocal, None)
            .unwrap()
            .matrix;
        match transformed.normalize_vector_modulus() {
            Err(Error::ZeroColumn { criterion }) => assert_eq!(criterion, "c1"),
            other => panic!("expected zero-column error, got {other:?}"),
        }
    }

    #[test]
    fn stage_transitions_are_enforced() {
        let matrix = matrix_from(vec![vec![1.0], vec![2.0]], &[Sense::Maximize]);
        assert!(matches!(
            matrix.normalize_vector_modulus(),
            Err(Error::StageMismatch { .. })
        ));
        let transformed = matrix
            .transform_min_to_max(MinTransform::Reciprocal, None)
            .unwrap()
            .matrix;
        assert!(matches!(
            transformed.transform_min_to_max(MinTransform::Reciprocal, None),
            Err(Error::StageMismatch { .. })
        ));
    }

    #[test]
    fn matrix_needs_two_alternatives() {
        let result = DecisionMatrix::new(
            vec!["A".into()],
            vec![CriterionSpec::new("c0", Sense::Maximize, "")],
            vec![vec![5.0]],
        );
        assert!(matches!(result, Err(Error::Validation(_))));
    }

    #[test]
    fn mixed_sign_detection() {
        let matrix = matrix_from(
            vec![vec![1.0, -1.0], vec![2.0, 3.0]],
            &[Sense::Maximize, Sense::Maximize],
        );
        assert_eq!(matrix.mixed_sign_columns(), vec!["c1".to_string()]);
    }

    #[test]
    fn csv_export_shape() {
        let rows = vec![row("AAA", [1.0; 6]), row("BBB", [2.0; 6])];
        let matrix = DecisionMatrix::assemble(&rows).unwrap();
        let csv = matrix.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "symbol,xRV,sRV,xVV,sVV,xm,xR2");
        assert!(lines.next().unwrap().starts_with("AAA,"));
        let meta = matrix.metadata_toml(None);
        assert!(meta.contains("stage = \"raw\""));
        assert!(meta.contains("sense = \"minimize\""));
    }
}
