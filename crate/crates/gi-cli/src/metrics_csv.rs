//! The per-game, per-player metrics CSV: `analyze` writes it, the report
//! commands read it back.

use anyhow::{bail, Context, Result};
use gi_core::chess::analyze::AnalyzedPlayer;
use gi_core::metrics::{PlayerColor, PlayerGameMetrics};
use gi_core::stats::emit::{csv_escape, fmt_full};

pub const METRICS_COLUMNS: &str = "game,player,color,reward,gpl,gi,egi,accuracy,moves";

/// One metrics line: an analyzed player tagged with its game number.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsLine {
    pub game: usize,
    pub row: AnalyzedPlayer,
}

pub fn write_metrics(lines: &[MetricsLine], provenance: &[String]) -> String {
    let mut out = String::new();
    for l in provenance {
        out.push_str(&format!("# {l}\n"));
    }
    out.push_str(METRICS_COLUMNS);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(fmt_full).unwrap_or_default();
    for line in lines {
        let r = &line.row;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            line.game,
            csv_escape(&r.player_id),
            r.color.as_str(),
            opt(r.reward),
            fmt_full(r.gpl),
            opt(r.gi),
            opt(r.egi),
            opt(r.accuracy),
            r.move_count,
        ));
    }
    out
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

pub fn read_metrics(text: &str) -> Result<Vec<MetricsLine>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header = lines.next().context("metrics file is empty")?;
    if header != METRICS_COLUMNS {
        bail!("unexpected metrics header `{header}`; this build reads `{METRICS_COLUMNS}`");
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields = split_csv_line(line);
        if fields.len() != 9 {
            bail!("metrics line {}: expected 9 fields, got {}", i + 2, fields.len());
        }
        let opt_f64 = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                Ok(Some(s.parse::<f64>().with_context(|| format!("bad number `{s}`"))?))
            }
        };
        let color = match fields[2].as_str() {
            "white" => PlayerColor::White,
            "black" => PlayerColor::Black,
            other => bail!("metrics line {}: bad color `{other}`", i + 2),
        };
        out.push(MetricsLine {
            game: fields[0].parse().with_context(|| format!("bad game index `{}`", fields[0]))?,
            row: AnalyzedPlayer {
                player_id: fields[1].clone(),
                color,
                reward: opt_f64(&fields[3])?,
                gpl: fields[4].parse().with_context(|| format!("bad gpl `{}`", fields[4]))?,
                gi: opt_f64(&fields[5])?,
                egi: opt_f64(&fields[6])?,
                accuracy: opt_f64(&fields[7])?,
                move_count: fields[8].parse().with_context(|| format!("bad moves `{}`", fields[8]))?,
            },
        });
    }
    Ok(out)
}

/// The finished-game rows as strict domain objects (unfinished rows are
/// counted, not converted).
pub fn to_player_metrics(lines: &[MetricsLine]) -> (Vec<PlayerGameMetrics>, usize) {
    let mut metrics = Vec::new();
    let mut unfinished = 0usize;
    for line in lines {
        match line.row.to_metrics() {
            Some(m) => metrics.push(m),
            None => unfinished += 1,
        }
    }
    (metrics, unfinished)
}
