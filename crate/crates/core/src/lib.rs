//! coinrank-core: rank crypto assets on risk/return criteria extracted from
//! short overlapping windows of their OHLCV history.
//!
//! The pipeline: parse per-asset CSV files ([`ingest`]), compute six
//! criteria per asset over moving windows ([`features`]), assemble the
//! alternatives × criteria matrix, flip minimization criteria and normalize
//! columns to unit length ([`decision`]), derive criterion weights by four
//! methods — uniform, contrast intensity, entropy, CRITIC ([`weighting`]) —
//! rank alternatives by similarity to the ideal solution ([`topsis`]), and
//! compare how much the weighting choice moves the ranking. [`pipeline`]
//! wires the stages together behind a single [`config::RunConfig`].

pub mod config;
pub mod decision;
pub mod error;
pub mod features;
pub mod ingest;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod topsis;
pub mod weighting;

pub use config::{OutputFormat, RunConfig};
pub use decision::{CriterionSpec, DecisionMatrix, MinTransform, Sense, Stage};
pub use error::{Error, ErrorKind, Result};
pub use features::{CriteriaRow, TrendOrientation, WindowSpec};
pub use ingest::{AlignmentReport, OhlcvRecord, OhlcvSeries};
pub use pipeline::{RunReport, WindowReport};
pub use stats::Ddof;
pub use topsis::{AgreementReport, TopsisEntry, TopsisRanking};
pub use weighting::{CriticConstantColumn, WeightMethod, WeightVector};
