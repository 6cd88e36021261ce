//! Summary tables, pairwise comparison matrices, histogram binning.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::mwu::{mann_whitney_one_sided, Alternative, MwuResult};
use super::StatsError;
use crate::metrics::{PlayerColor, PlayerGameMetrics};

/// Mean or median table variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Aggregate {
    Mean,
    Median,
}

/// One player's summary line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub player: String,
    pub gi: f64,
    pub gi_sd: f64,
    pub gi_white: Option<f64>,
    pub gi_black: Option<f64>,
    pub gpl: f64,
    pub gpl_white: Option<f64>,
    pub gpl_black: Option<f64>,
    pub games: usize,
    pub moves: usize,
}

fn aggregate(values: &[f64], agg: Aggregate) -> f64 {
    match agg {
        Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
        Aggregate::Median => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let n = sorted.len();
            if n % 2 == 1 {
                sorted[n / 2]
            } else {
                0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
            }
        }
    }
}

fn sample_sd(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Per-player summary rows, sorted by descending GI (then name for ties).
pub fn summarize(metrics: &[PlayerGameMetrics], agg: Aggregate) -> Vec<SummaryRow> {
    let mut by_player: BTreeMap<&str, Vec<&PlayerGameMetrics>> = BTreeMap::new();
    for m in metrics {
        by_player.entry(&m.player_id).or_default().push(m);
    }

    let mut rows: Vec<SummaryRow> = by_player
        .into_iter()
        .map(|(player, games)| {
            let gi_all: Vec<f64> = games.iter().map(|g| g.gi).collect();
            let gpl_all: Vec<f64> = games.iter().map(|g| g.gpl).collect();
            let split = |color: PlayerColor, field: fn(&PlayerGameMetrics) -> f64| {
                let vals: Vec<f64> =
                    games.iter().filter(|g| g.color == color).map(|g| field(g)).collect();
                if vals.is_empty() {
                    None
                } else {
                    Some(aggregate(&vals, agg))
                }
            };
            SummaryRow {
                player: player.to_string(),
                gi: aggregate(&gi_all, agg),
                gi_sd: sample_sd(&gi_all),
                gi_white: split(PlayerColor::White, |g| g.gi),
                gi_black: split(PlayerColor::Black, |g| g.gi),
                gpl: aggregate(&gpl_all, agg),
                gpl_white: split(PlayerColor::White, |g| g.gpl),
                gpl_black: split(PlayerColor::Black, |g| g.gpl),
                games: games.len(),
                moves: games.iter().map(|g| g.move_count).sum(),
            }
        })
        .collect();

    rows.sort_by(|a, b| b.gi.total_cmp(&a.gi).then_with(|| a.player.cmp(&b.player)));
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MetricKind {
    Gi,
    Gpl,
}

/// One off-diagonal cell of the comparison matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonCell {
    pub row_player: String,
    pub col_player: String,
    pub metric: MetricKind,
    pub u: f64,
    pub p: f64,
}

/// Pairwise one-sided Mann-Whitney grid: cells above the diagonal compare
/// GI, cells below compare GPL. The alternative is always "row player's
/// values are greater"; for GPL greater means worse.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    pub players: Vec<String>,
    pub color: Option<PlayerColor>,
    /// Row-major; the diagonal is None.
    pub cells: Vec<Option<ComparisonCell>>,
}

impl ComparisonMatrix {
    pub fn cell(&self, row: usize, col: usize) -> &Option<ComparisonCell> {
        &self.cells[row * self.players.len() + col]
    }
}

/// Build the comparison matrix over the given player order.
pub fn comparison_matrix(
    metrics: &[PlayerGameMetrics],
    players: &[String],
    color: Option<PlayerColor>,
) -> Result<ComparisonMatrix, StatsError> {
    let sample = |player: &str, kind: MetricKind| -> Vec<f64> {
        metrics
            .iter()
            .filter(|m| m.player_id == player && color.is_none_or(|c| m.color == c))
            .map(|m| match kind {
                MetricKind::Gi => m.gi,
                MetricKind::Gpl => m.gpl,
            })
            .collect()
    };

    let n = players.len();
    let mut cells = Vec::with_capacity(n * n);
    for (i, row_player) in players.iter().enumerate() {
        for (j, col_player) in players.iter().enumerate() {
            if i == j {
                cells.push(None);
                continue;
            }
            let metric = if j > i { MetricKind::Gi } else { MetricKind::Gpl };
            let a = sample(row_player, metric);
            let b = sample(col_player, metric);
            if a.is_empty() || b.is_empty() {
                let missing = if a.is_empty() { row_player } else { col_player };
                return Err(StatsError::NoGames { player: missing.clone() });
            }
            let MwuResult { u, p, .. } = mann_whitney_one_sided(&a, &b, Alternative::Greater)?;
            cells.push(Some(ComparisonCell {
                row_player: row_player.clone(),
                col_player: col_player.clone(),
                metric,
                u,
                p,
            }));
        }
    }
    Ok(ComparisonMatrix { players: players.to_vec(), color, cells })
}

/// Fixed-width histogram; edges cover the data range, counts sum to the
/// sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` edges; bin i is [edges[i], edges[i+1]).
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub fn histogram(values: &[f64], bin_width: f64) -> Result<Histogram, StatsError> {
    if bin_width.is_nan() || bin_width <= 0.0 {
        return Err(StatsError::BadBinWidth(bin_width));
    }
    if values.is_empty() {
        return Ok(Histogram { edges: Vec::new(), counts: Vec::new() });
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let start = (min / bin_width).floor() * bin_width;
    let mut n_bins = ((max - start) / bin_width).floor() as usize + 1;
    // a max sitting exactly on the last edge still needs a home
    if start + n_bins as f64 * bin_width <= max {
        n_bins += 1;
    }
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let idx = (((v - start) / bin_width).floor() as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let edges = (0..=n_bins).map(|i| start + i as f64 * bin_width).collect();
    Ok(Histogram { edges, counts })
}
