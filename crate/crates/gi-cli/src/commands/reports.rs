//! Reporting commands: summary tables, comparison matrices, TPR,
//! histograms.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

use gi_core::metrics::PlayerColor;
use gi_core::stats::emit::{
    csv_escape, fmt_full, histogram_csv, matrix_csv, matrix_markdown, summary_csv,
    summary_markdown,
};
use gi_core::stats::{comparison_matrix, histogram, summarize, Aggregate};
use gi_core::wdl::{tournament_performance_rating, EloRating, WdlError};

use crate::config::Provenance;
use crate::metrics_csv::{read_metrics, to_player_metrics};

pub fn report(metrics_path: &Path, output: &Path, aggregate: Aggregate, markdown: bool) -> Result<()> {
    let text = std::fs::read_to_string(metrics_path)
        .with_context(|| format!("reading {}", metrics_path.display()))?;
    let lines = read_metrics(&text)?;
    let (metrics, unfinished) = to_player_metrics(&lines);
    let rows = summarize(&metrics, aggregate);

    let mut provenance = Provenance::new("report");
    provenance
        .set("aggregate", if aggregate == Aggregate::Mean { "mean" } else { "median" })
        .set("rows.unfinished_excluded", unfinished);
    let rendered = if markdown {
        summary_markdown(&rows, &provenance.lines())
    } else {
        summary_csv(&rows, &provenance.lines())
    };
    std::fs::write(output, rendered)?;
    println!("report: {} players over {} rows", rows.len(), metrics.len());
    Ok(())
}

pub fn compare(
    metrics_path: &Path,
    output: &Path,
    players: Option<String>,
    color: Option<PlayerColor>,
    markdown: bool,
) -> Result<()> {
    let text = std::fs::read_to_string(metrics_path)?;
    let lines = read_metrics(&text)?;
    let (metrics, _) = to_player_metrics(&lines);

    let order: Vec<String> = match players {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None => summarize(&metrics, Aggregate::Mean).into_iter().map(|r| r.player).collect(),
    };
    if order.len() < 2 {
        bail!("compare needs at least two players, got {}", order.len());
    }
    let matrix = comparison_matrix(&metrics, &order, color)?;

    let mut provenance = Provenance::new("compare");
    provenance.set("players", order.join("|")).set(
        "color",
        color.map(|c| c.as_str()).unwrap_or("both"),
    );
    let rendered = if markdown {
        matrix_markdown(&matrix, &provenance.lines())
    } else {
        matrix_csv(&matrix, &provenance.lines())
    };
    std::fs::write(output, rendered)?;
    println!("compare: {0}x{0} matrix", order.len());
    Ok(())
}

pub fn tpr(input: &Path, output: &Path) -> Result<()> {
    let text = std::fs::read_to_string(input)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().context("empty TPR input")?;
    if header.trim() != "player,opponent_elo,score" {
        bail!("TPR input needs header `player,opponent_elo,score`, got `{header}`");
    }

    // player -> (scores, opponents), in first-appearance order
    let mut order = Vec::new();
    let mut by_player: BTreeMap<String, (Vec<f64>, Vec<EloRating>)> = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            bail!("TPR line {}: expected 3 fields", i + 2);
        }
        let player = fields[0].trim().to_string();
        let opponent: f64 = fields[1].trim().parse().context("bad opponent_elo")?;
        let score: f64 = fields[2].trim().parse().context("bad score")?;
        if !by_player.contains_key(&player) {
            order.push(player.clone());
        }
        let entry = by_player.entry(player).or_default();
        entry.0.push(score);
        entry.1.push(EloRating::new(opponent)?);
    }

    let provenance = Provenance::new("tpr");
    let mut out = String::new();
    for l in provenance.lines() {
        out.push_str(&format!("# {l}\n"));
    }
    out.push_str("player,games,score,tpr\n");
    for player in order {
        let (scores, opponents) = &by_player[&player];
        let total: f64 = scores.iter().sum();
        let tpr_cell = match tournament_performance_rating(scores, opponents) {
            Ok(rating) => fmt_full(rating.get()),
            // perfect/zero scores have no finite solution
            Err(WdlError::TprUnbounded { total, games }) => {
                if total >= games as f64 { "+inf".into() } else { "-inf".into() }
            }
            Err(e) => return Err(e.into()),
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            csv_escape(&player),
            scores.len(),
            fmt_full(total),
            tpr_cell
        ));
    }
    std::fs::write(output, out)?;
    println!("tpr: {} players", by_player.len());
    Ok(())
}

pub fn hist(
    metrics_path: &Path,
    output: &Path,
    player: Option<String>,
    use_gpl: bool,
    bin_width: f64,
    color: Option<PlayerColor>,
) -> Result<()> {
    let text = std::fs::read_to_string(metrics_path)?;
    let lines = read_metrics(&text)?;
    let (metrics, _) = to_player_metrics(&lines);

    let values: Vec<f64> = metrics
        .iter()
        .filter(|m| player.as_deref().is_none_or(|p| m.player_id == p))
        .filter(|m| color.is_none_or(|c| m.color == c))
        .map(|m| if use_gpl { m.gpl } else { m.gi })
        .collect();
    let hist = histogram(&values, bin_width)?;

    let mut provenance = Provenance::new("hist");
    provenance
        .set("metric", if use_gpl { "gpl" } else { "gi" })
        .set("player", player.as_deref().unwrap_or("all"))
        .set("color", color.map(|c| c.as_str()).unwrap_or("both"))
        .set("bin_width", bin_width)
        .set("samples", values.len());
    std::fs::write(output, histogram_csv(&hist, &provenance.lines()))?;
    println!("hist: {} values in {} bins", values.len(), hist.counts.len());
    Ok(())
}
