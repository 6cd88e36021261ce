//! Game filtering: rating floor, non-classical event exclusion, player
//! allowlist.

use serde::{Deserialize, Serialize};

use crate::chess::pgn::GameRecord;
use crate::metrics::PlayerColor;

/// Event/Site keywords marking non-classical games.
pub const DEFAULT_EXCLUDED_KEYWORDS: [&str; 6] =
    ["rapid", "blitz", "online", "blindfold", "simul", "exhibition"];
/// Grandmaster-level rating floor.
pub const DEFAULT_MIN_ELO: u32 = 2500;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterSpec {
    /// Both players must meet this rating; games with missing Elo headers
    /// are excluded while the floor is active.
    pub min_elo: Option<u32>,
    /// Apply the keyword exclusion to Event/Site headers.
    pub classical_only: bool,
    pub excluded_keywords: Vec<String>,
    /// Keep only games involving one of these players (empty = keep all).
    pub player_allowlist: Vec<String>,
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self {
            min_elo: Some(DEFAULT_MIN_ELO),
            classical_only: true,
            excluded_keywords: DEFAULT_EXCLUDED_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            player_allowlist: Vec::new(),
        }
    }
}

impl FilterSpec {
    /// Accept everything.
    pub fn permissive() -> Self {
        Self {
            min_elo: None,
            classical_only: false,
            excluded_keywords: Vec::new(),
            player_allowlist: Vec::new(),
        }
    }
}

/// Why a game was excluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    /// 0-based index into the input slice.
    pub game_index: usize,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct FilterReport {
    pub kept: Vec<GameRecord>,
    pub excluded: Vec<Exclusion>,
}

/// Partition games by the filter, with a reason per exclusion.
pub fn filter_games(records: Vec<GameRecord>, spec: &FilterSpec) -> FilterReport {
    let mut report = FilterReport::default();
    for (game_index, record) in records.into_iter().enumerate() {
        match exclusion_reason(&record, spec) {
            None => report.kept.push(record),
            Some(reason) => report.excluded.push(Exclusion { game_index, reason }),
        }
    }
    report
}

fn exclusion_reason(record: &GameRecord, spec: &FilterSpec) -> Option<String> {
    if spec.classical_only {
        for header in ["Event", "Site"] {
            if let Some(value) = record.header(header) {
                let lower = value.to_lowercase();
                for kw in &spec.excluded_keywords {
                    if lower.contains(&kw.to_lowercase()) {
                        return Some(format!("{header} `{value}` matches keyword `{kw}`"));
                    }
                }
            }
        }
    }

    if let Some(min) = spec.min_elo {
        for color in [PlayerColor::White, PlayerColor::Black] {
            match record.elo(color) {
                None => return Some(format!("missing {:?} Elo with floor {min}", color)),
                Some(elo) if elo < min => {
                    return Some(format!("{:?} Elo {elo} below floor {min}", color));
                }
                Some(_) => {}
            }
        }
    }

    if !spec.player_allowlist.is_empty() {
        let white = record.white();
        let black = record.black();
        let listed = spec
            .player_allowlist
            .iter()
            .any(|p| p == white || p == black);
        if !listed {
            return Some(format!("neither `{white}` nor `{black}` on the allowlist"));
        }
    }
    None
}
