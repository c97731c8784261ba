//! End-to-end orchestration: ingest → criteria per window length →
//! transform/normalize → four weightings → TOPSIS → agreement, plus the
//! file exports behind the CLI.
//!
//! Everything in the report is a pure function of the configuration and the
//! input bytes; no timestamps or machine state enter the numeric payloads,
//! so two runs over the same inputs serialize identically.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};
use crate::decision::{DecisionMatrix, EpsilonSubstitution, Stage};
use crate::error::{Error, Result};
use crate::features::{criteria_row, CriteriaRow, WindowSpec};
use crate::ingest::{self, AlignmentReport, OhlcvSeries};
use crate::topsis::{compare_rankings, topsis_rank, AgreementReport, TopsisRanking};
use crate::weighting::{compute_all, WeightMethod, WeightVector};

/// Format a float with 9 significant digits, the fixed CSV precision.
pub fn fmt_sig9(value: f64) -> String {
    format!("{value:.8e}")
}

/// One weighting method's TOPSIS outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodRanking {
    pub method: WeightMethod,
    pub ranking: TopsisRanking,
}

/// Everything computed for one window length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowReport {
    pub window: usize,
    pub criteria_rows: Vec<CriteriaRow>,
    pub raw: DecisionMatrix,
    pub transformed: DecisionMatrix,
    pub normalized: DecisionMatrix,
    pub weights: Vec<WeightVector>,
    pub rankings: Vec<MethodRanking>,
    /// Agreement between the four methods' rankings at this window size.
    pub method_agreement: AgreementReport,
}

impl WindowReport {
    pub fn ranking_for(&self, method: WeightMethod) -> Option<&TopsisRanking> {
        self.rankings
            .iter()
            .find(|r| r.method == method)
            .map(|r| &r.ranking)
    }
}

/// Per-method comparison of rankings across window sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowStability {
    pub method: WeightMethod,
    /// (window, top-2 symbols) per window length, in config order.
    pub top2_by_window: Vec<(usize, Vec<String>)>,
    /// True when every window size produced the same top-2 set.
    pub top2_stable: bool,
    /// Rank agreement across window sizes (None with a single window).
    pub agreement: Option<AgreementReport>,
}

/// Non-fatal observations surfaced to the operator.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunWarnings {
    /// (window, symbol, count) for assets whose trend fits hit the
    /// degenerate convention.
    pub degenerate_fits: Vec<(usize, String, usize)>,
    /// (window, criterion ids) of mixed-sign columns entering normalization.
    pub mixed_sign_columns: Vec<(usize, Vec<String>)>,
    /// Epsilon substitutions performed by the minimization transform.
    pub epsilon_substitutions: Vec<(usize, Vec<EpsilonSubstitution>)>,
    /// Criteria excluded by the CRITIC drop policy.
    pub critic_dropped: Vec<(usize, Vec<String>)>,
    /// True when the assets do not share an identical date set.
    pub date_gaps: bool,
}

/// The complete, reproducible result of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub alignment: AlignmentReport,
    pub windows: Vec<WindowReport>,
    pub window_stability: Vec<WindowStability>,
    pub warnings: RunWarnings,
}

/// Load, filter and alignment-check the configured symbols.
pub fn load_series(config: &RunConfig) -> Result<(Vec<OhlcvSeries>, AlignmentReport)> {
    let by_symbol = ingest::load_directory(&config.data_dir, &config.symbol_files)?;
    let mut selected = Vec::with_capacity(config.symbols.len());
    for symbol in &config.symbols {
        let series = by_symbol.get(symbol).ok_or_else(|| Error::UnknownSymbol {
            symbol: symbol.clone(),
            dir: config.data_dir.display().to_string(),
        })?;
        let filtered = ingest::filter_date_range(series, config.start_date, config.end_date)
            .map_err(|e| e.in_stage("filter", symbol))?;
        selected.push(filtered);
    }
    let alignment = ingest::check_alignment(&selected);
    Ok((selected, alignment))
}

fn unit_norm_check(matrix: &DecisionMatrix) -> Result<()> {
    debug_assert_eq!(matrix.stage(), Stage::Normalized);
    for j in 0..matrix.n_criteria() {
        let norm: f64 = matrix.column(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "normalized column '{}' has norm {norm}, expected 1",
                matrix.criteria()[j].id
            )));
        }
    }
    Ok(())
}

/// Execute the full experiment described by `config` and return the
/// in-memory report. File exports are separate ([`write_reports`]).
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let (series_set, alignment) = load_series(config)?;
    let mut warnings = RunWarnings {
        date_gaps: !alignment.aligned,
        ..RunWarnings::default()
    };

    let mut windows = Vec::with_capacity(config.window_lengths.len());
    for &window in &config.window_lengths {
        let spec = WindowSpec::new(window, config.stride)?;

        let mut rows = Vec::with_capacity(series_set.len());
        for series in &series_set {
            let row = criteria_row(series, &spec, config.trend_orientation, config.ddof)
                .map_err(|e| e.in_stage("features", &format!("{}@{window}", series.symbol)))?;
            if row.degenerate_fits > 0 {
                warnings
                    .degenerate_fits
                    .push((window, series.symbol.clone(), row.degenerate_fits));
            }
            rows.push(row);
        }

        let raw = DecisionMatrix::assemble(&rows)
            .map_err(|e| e.in_stage("assemble", &format!("window {window}")))?;
        let outcome = raw
            .transform_min_to_max(config.min_transform, config.min_transform_epsilon)
            .map_err(|e| e.in_stage("transform", &format!("window {window}")))?;
        if !outcome.substitutions.is_empty() {
            warnings
                .epsilon_substitutions
                .push((window, outcome.substitutions.clone()));
        }
        let transformed = outcome.matrix;
        let mixed = transformed.mixed_sign_columns();
        if !mixed.is_empty() {
            warnings.mixed_sign_columns.push((window, mixed));
        }
        let normalized = transformed
            .normalize_vector_modulus()
            .map_err(|e| e.in_stage("normalize", &format!("window {window}")))?;
        unit_norm_check(&normalized)?;

        let weighting = compute_all(&normalized, config.ddof, config.critic_constant_column);
        if let Some(failure) = weighting.failures.into_iter().next() {
            return Err(failure
                .error
                .in_stage("weighting", &format!("{}@{window}", failure.method)));
        }
        if !weighting.critic_dropped.is_empty() {
            warnings
                .critic_dropped
                .push((window, weighting.critic_dropped.clone()));
        }

        let mut rankings = Vec::with_capacity(weighting.vectors.len());
        for vector in &weighting.vectors {
            let ranking = topsis_rank(&normalized, vector)
                .map_err(|e| e.in_stage("topsis", &format!("{}@{window}", vector.method)))?;
            rankings.push(MethodRanking {
                method: vector.method,
                ranking,
            });
        }

        let method_agreement = compare_rankings(
            &rankings.iter().map(|r| r.ranking.clone()).collect::<Vec<_>>(),
            &rankings.iter().map(|r| r.method.to_string()).collect::<Vec<_>>(),
        )?;

        windows.push(WindowReport {
            window,
            criteria_rows: rows,
            raw,
            transformed,
            normalized,
            weights: weighting.vectors,
            rankings,
            method_agreement,
        });
    }

    let window_stability = compute_window_stability(&windows)?;

    Ok(RunReport {
        config: config.clone(),
        alignment,
        windows,
        window_stability,
        warnings,
    })
}

fn compute_window_stability(windows: &[WindowReport]) -> Result<Vec<WindowStability>> {
    let mut out = Vec::with_capacity(WeightMethod::ALL.len());
    for method in WeightMethod::ALL {
        let mut per_window = Vec::new();
        for report in windows {
            if let Some(ranking) = report.ranking_for(method) {
                per_window.push((report.window, ranking.clone()));
            }
        }
        if per_window.is_empty() {
            continue;
        }
        let top2_by_window: Vec<(usize, Vec<String>)> = per_window
            .iter()
            .map(|(w, r)| (*w, r.top_k(2)))
            .collect();
        let top2_stable = top2_by_window
            .windows(2)
            .all(|pair| pair[0].1 == pair[1].1);
        let agreement = if per_window.len() >= 2 {
            Some(compare_rankings(
                &per_window.iter().map(|(_, r)| r.clone()).collect::<Vec<_>>(),
                &per_window
                    .iter()
                    .map(|(w, _)| format!("{w}d"))
                    .collect::<Vec<_>>(),
            )?)
        } else {
            None
        };
        out.push(WindowStability {
            method,
            top2_by_window,
            top2_stable,
            agreement,
        });
    }
    Ok(out)
}

/// The long-format CSV behind the per-criterion weight distribution chart:
/// one row per (window, method, criterion).
pub fn weights_csv(report: &RunReport) -> String {
    let mut out = String::from("window,method,criterion,weight,raw_score\n");
    for window in &report.windows {
        for vector in &window.weights {
            for (j, criterion) in window.normalized.criteria().iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    window.window,
                    vector.method,
                    criterion.id,
                    fmt_sig9(vector.weights[j]),
                    fmt_sig9(vector.raw_scores[j]),
                ));
            }
        }
    }
    out
}

/// The long-format CSV behind the similarity-index chart: one row per
/// (window, method, symbol), ordered by rank.
pub fn topsis_csv(report: &RunReport) -> String {
    let mut out = String::from("window,method,symbol,similarity,rank,d_ideal,d_anti\n");
    for window in &report.windows {
        for method_ranking in &window.rankings {
            let mut entries: Vec<_> = method_ranking.ranking.entries.iter().collect();
            entries.sort_by_key(|e| e.rank);
            for entry in entries {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    window.window,
                    method_ranking.method,
                    entry.symbol,
                    fmt_sig9(entry.similarity),
                    entry.rank,
                    fmt_sig9(entry.d_ideal),
                    fmt_sig9(entry.d_anti),
                ));
            }
        }
    }
    out
}

/// Agreement summary serialized to `agreement.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgreementSummary {
    pub per_window: Vec<WindowAgreement>,
    pub window_stability: Vec<WindowStability>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowAgreement {
    pub window: usize,
    pub agreement: AgreementReport,
}

pub fn agreement_summary(report: &RunReport) -> AgreementSummary {
    AgreementSummary {
        per_window: report
            .windows
            .iter()
            .map(|w| WindowAgreement {
                window: w.window,
                agreement: w.method_agreement.clone(),
            })
            .collect(),
        window_stability: report.window_stability.clone(),
    }
}

/// Write the plot-ready long-format CSVs (`weights.csv`, `topsis.csv`).
pub fn emit_plot_data(report: &RunReport, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if report.windows.is_empty() {
        return Err(Error::Validation("report contains no windows".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let weights_path = out_dir.join("weights.csv");
    std::fs::write(&weights_path, weights_csv(report))?;
    let topsis_path = out_dir.join("topsis.csv");
    std::fs::write(&topsis_path, topsis_csv(report))?;
    Ok(vec![weights_path, topsis_path])
}

/// Write every export for the configured format family. Returns the paths
/// written. Matrices are re-checked for unit norms before export.
pub fn write_reports(report: &RunReport, out_dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let csv_family = matches!(format, OutputFormat::Csv | OutputFormat::Both);
    let json_family = matches!(format, OutputFormat::Json | OutputFormat::Both);

    if csv_family {
        for window in &report.windows {
            unit_norm_check(&window.normalized)?;
            let stages: [(&DecisionMatrix, Stage); 3] = [
                (&window.raw, Stage::Raw),
                (&window.transformed, Stage::Transformed),
                (&window.normalized, Stage::Normalized),
            ];
            for (matrix, stage) in stages {
                let base = format!("matrix_{}_{}", window.window, stage);
                let csv_path = out_dir.join(format!("{base}.csv"));
                std::fs::write(&csv_path, matrix.to_csv_string())?;
                written.push(csv_path);
                let transform = if stage == Stage::Raw {
                    None
                } else {
                    Some(report.config.min_transform)
                };
                let meta_path = out_dir.join(format!("{base}.meta.toml"));
                std::fs::write(&meta_path, matrix.metadata_toml(transform))?;
                written.push(meta_path);
            }
        }
        written.extend(emit_plot_data(report, out_dir)?);
    }

    if json_family {
        let report_path = out_dir.join("run_report.json");
        std::fs::write(&report_path, serde_json::to_string_pretty(report)?)?;
        written.push(report_path);
        let agreement_path = out_dir.join("agreement.json");
        std::fs::write(
            &agreement_path,
            serde_json::to_string_pretty(&agreement_summary(report))?,
        )?;
        written.push(agreement_path);
    }

    Ok(written)
}
