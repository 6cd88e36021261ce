//! Rank statistics and report tables: one-sided Mann-Whitney U, summary
//! rows, comparison matrices, histograms, and their CSV/Markdown emitters.

pub mod emit;
pub mod mwu;
pub mod tables;

use thiserror::Error;

pub use mwu::{mann_whitney_one_sided, u_statistic, Alternative, MwuMethod, MwuResult};
pub use tables::{
    comparison_matrix, histogram, summarize, Aggregate, ComparisonCell, ComparisonMatrix,
    Histogram, MetricKind, SummaryRow,
};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("Mann-Whitney requires two nonempty samples")]
    EmptySample,
    #[error("player `{player}` has no games in the requested slice")]
    NoGames { player: String },
    #[error("histogram bin width must be positive, got {0}")]
    BadBinWidth(f64),
}
