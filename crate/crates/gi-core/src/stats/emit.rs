//! CSV and Markdown table emitters.
//!
//! Outputs are byte-stable for identical input: fixed column order, LF
//! endings, shortest-round-trip floats in CSV, two decimals in Markdown.
//! Every emitted file starts with provenance comment lines supplied by
//! the caller.

use super::tables::{ComparisonMatrix, Histogram, SummaryRow};

/// Full-precision float for CSV cells.
pub fn fmt_full(v: f64) -> String {
    if v == 0.0 {
        // avoid the "-0" spelling
        return "0".to_string();
    }
    format!("{v}")
}

/// Two-decimal display for Markdown cells.
pub fn fmt_display(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn fmt_opt_full(v: Option<f64>) -> String {
    v.map(fmt_full).unwrap_or_default()
}

fn fmt_opt_display(v: Option<f64>) -> String {
    v.map(fmt_display).unwrap_or_else(|| "-".to_string())
}

/// Minimal RFC-4180 quoting.
pub fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_header(provenance: &[String]) -> String {
    let mut out = String::new();
    for line in provenance {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

fn md_header(provenance: &[String]) -> String {
    let mut out = String::new();
    for line in provenance {
        out.push_str("<!-- ");
        out.push_str(line);
        out.push_str(" -->\n");
    }
    out
}

pub const SUMMARY_COLUMNS: &str = "player,gi,gi_sd,gi_white,gi_black,gpl,gpl_white,gpl_black,games,moves";

pub fn summary_csv(rows: &[SummaryRow], provenance: &[String]) -> String {
    let mut out = csv_header(provenance);
    out.push_str(SUMMARY_COLUMNS);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            csv_escape(&r.player),
            fmt_full(r.gi),
            fmt_full(r.gi_sd),
            fmt_opt_full(r.gi_white),
            fmt_opt_full(r.gi_black),
            fmt_full(r.gpl),
            fmt_opt_full(r.gpl_white),
            fmt_opt_full(r.gpl_black),
            r.games,
            r.moves,
        ));
    }
    out
}

pub fn summary_markdown(rows: &[SummaryRow], provenance: &[String]) -> String {
    let mut out = md_header(provenance);
    out.push_str("| Player | GI | SD_GI | GI_W | GI_B | GPL | GPL_W | GPL_B | Games | Moves |\n");
    out.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
            r.player,
            fmt_display(r.gi),
            fmt_display(r.gi_sd),
            fmt_opt_display(r.gi_white),
            fmt_opt_display(r.gi_black),
            fmt_display(r.gpl),
            fmt_opt_display(r.gpl_white),
            fmt_opt_display(r.gpl_black),
            r.games,
            r.moves,
        ));
    }
    out
}

/// The orientation note stamped onto every comparison output.
pub const MATRIX_ORIENTATION: &str = "one-sided Mann-Whitney, alternative: row player's values \
are greater; small p rejects it; above diagonal GI, below diagonal GPL";

pub fn matrix_csv(matrix: &ComparisonMatrix, provenance: &[String]) -> String {
    let mut out = csv_header(provenance);
    out.push_str("# ");
    out.push_str(MATRIX_ORIENTATION);
    out.push('\n');
    out.push_str("player");
    for p in &matrix.players {
        out.push(',');
        out.push_str(&csv_escape(p));
    }
    out.push('\n');
    for (i, row_player) in matrix.players.iter().enumerate() {
        out.push_str(&csv_escape(row_player));
        for j in 0..matrix.players.len() {
            out.push(',');
            if let Some(cell) = matrix.cell(i, j) {
                out.push_str(&fmt_full(cell.p));
            }
        }
        out.push('\n');
    }
    out
}

pub fn matrix_markdown(matrix: &ComparisonMatrix, provenance: &[String]) -> String {
    let mut out = md_header(provenance);
    out.push_str(&format!("<!-- {MATRIX_ORIENTATION} -->\n"));
    out.push_str("| |");
    for p in &matrix.players {
        out.push_str(&format!(" {p} |"));
    }
    out.push('\n');
    out.push('|');
    for _ in 0..=matrix.players.len() {
        out.push_str("---|");
    }
    out.push('\n');
    for (i, row_player) in matrix.players.iter().enumerate() {
        out.push_str(&format!("| {row_player} |"));
        for j in 0..matrix.players.len() {
            match matrix.cell(i, j) {
                Some(cell) => out.push_str(&format!(" {} |", fmt_display(cell.p))),
                None => out.push_str(" - |"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn histogram_csv(hist: &Histogram, provenance: &[String]) -> String {
    let mut out = csv_header(provenance);
    out.push_str("bin_start,bin_end,count\n");
    for (i, count) in hist.counts.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_full(hist.edges[i]),
            fmt_full(hist.edges[i + 1]),
            count
        ));
    }
    out
}
