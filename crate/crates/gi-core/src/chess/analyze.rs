//! Per-game metric computation: evaluation chaining, move-pair
//! construction, and the GI/GPL/EGI/accuracy rollup per color.
//!
//! Evaluations are chained: the "before" eval of a ply is the "after" eval
//! of the previous ply (the root defaults to 0 cp). Every eval is stored
//! from White's perspective; Black's expected points use the complement.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chess::pgn::{GameRecord, GameResult};
use crate::metrics::{
    self, accuracy, expected_game_intelligence, gpl, MetricError, MovePair, PlayerColor,
    PlayerGameMetrics, ACCURACY_EPS,
};
use crate::reward::{expected_value, RewardScheme};
use crate::wdl::{CentipawnEval, EvalModel};

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("missing evaluations at plies {0:?} (1-based)")]
    MissingEvals(Vec<usize>),
    #[error("game is unfinished and the policy is to skip it")]
    Unfinished,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MissingEvalPolicy {
    /// Error out, listing every gap.
    Error,
    /// Drop affected plies and report how many.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnfinishedPolicy {
    Skip,
    /// Emit GPL/EGI/accuracy without reward or GI.
    EgiOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOptions {
    /// Eval of the initial position, chained into ply 1's "before".
    pub root_eval_cp: i32,
    pub missing_eval: MissingEvalPolicy,
    pub unfinished: UnfinishedPolicy,
    /// Drop each player's first N moves from the metrics.
    pub skip_opening: usize,
    /// Drop plies whose best-move evaluation is at the accuracy division
    /// guard instead of erroring (affects accuracy only).
    pub accuracy_skip_lost: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            root_eval_cp: 0,
            missing_eval: MissingEvalPolicy::Error,
            unfinished: UnfinishedPolicy::Skip,
            skip_opening: 0,
            accuracy_skip_lost: false,
        }
    }
}

/// Move pairs for one game, partitioned by mover.
#[derive(Debug, Clone)]
pub struct MovePairsByColor {
    pub white: Vec<MovePair>,
    pub black: Vec<MovePair>,
    /// Plies dropped under the skip policy (1-based indexes).
    pub skipped_plies: Vec<usize>,
}

impl MovePairsByColor {
    pub fn for_color(&self, color: PlayerColor) -> &[MovePair] {
        match color {
            PlayerColor::White => &self.white,
            PlayerColor::Black => &self.black,
        }
    }
}

/// Chain evaluations and build per-color move pairs.
///
/// For each ply, the best-move evaluation is the model's view of the
/// position before the move and the played-move evaluation its view of
/// the position after, both from the mover's side.
pub fn build_move_pairs(
    record: &GameRecord,
    model: &EvalModel,
    options: &AnalyzeOptions,
) -> Result<MovePairsByColor, AnalyzeError> {
    use crate::wdl::Perspective;
    let mut white = Vec::new();
    let mut black = Vec::new();
    let mut skipped = Vec::new();
    let mut missing = Vec::new();

    let mut chained_before: Option<CentipawnEval> =
        Some(CentipawnEval::cp(options.root_eval_cp, Perspective::FirstPlayer));

    for (i, ply) in record.plies.iter().enumerate() {
        let ply_index = i + 1;
        let before = ply.eval_before.or(chained_before);
        let after = ply.eval_after;
        chained_before = after;

        let (Some(before), Some(after)) = (before, after) else {
            missing.push(ply_index);
            continue;
        };

        if ply_index <= 2 * options.skip_opening {
            skipped.push(ply_index);
            continue;
        }

        let mover = record.mover(i);
        let pair = MovePair {
            best_eval: model.mover_wdl(before, mover).to_distribution(),
            played_eval: model.mover_wdl(after, mover).to_distribution(),
            ply_index,
        };
        match mover {
            PlayerColor::White => white.push(pair),
            PlayerColor::Black => black.push(pair),
        }
    }

    if !missing.is_empty() {
        match options.missing_eval {
            MissingEvalPolicy::Error => return Err(AnalyzeError::MissingEvals(missing)),
            MissingEvalPolicy::Skip => skipped.extend(missing),
        }
    }
    skipped.sort_unstable();
    Ok(MovePairsByColor { white, black, skipped_plies: skipped })
}

/// One player's analyzed row; reward and GI are absent for unfinished
/// games, where only the expectation-based metrics are defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedPlayer {
    pub player_id: String,
    pub color: PlayerColor,
    pub reward: Option<f64>,
    pub gpl: f64,
    pub gi: Option<f64>,
    pub egi: Option<f64>,
    pub accuracy: Option<f64>,
    pub move_count: usize,
}

impl AnalyzedPlayer {
    /// The strict domain object, available once the game is finished.
    pub fn to_metrics(&self) -> Option<PlayerGameMetrics> {
        let reward = self.reward?;
        Some(PlayerGameMetrics::new(
            self.player_id.clone(),
            self.color,
            reward,
            self.gpl,
            self.egi,
            self.accuracy,
            self.move_count,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameAnalysis {
    pub white: AnalyzedPlayer,
    pub black: AnalyzedPlayer,
    pub skipped_plies: Vec<usize>,
    /// Plies excluded from accuracy by the lost-position guard.
    pub accuracy_dropped: usize,
    /// Board-vs-header result cross-check, when they disagree.
    pub result_mismatch: Option<String>,
}

/// Full per-game analysis for both colors.
pub fn analyze_game(
    record: &GameRecord,
    model: &EvalModel,
    scheme: &RewardScheme,
    options: &AnalyzeOptions,
) -> Result<GameAnalysis, AnalyzeError> {
    if record.result == GameResult::Unfinished && options.unfinished == UnfinishedPolicy::Skip {
        return Err(AnalyzeError::Unfinished);
    }
    let pairs = build_move_pairs(record, model, options)?;
    let mut accuracy_dropped = 0usize;

    let mut analyze_side = |color: PlayerColor, name: &str| -> Result<AnalyzedPlayer, AnalyzeError> {
        let side_pairs = pairs.for_color(color);
        let gpl_value = gpl(side_pairs, scheme)?;
        let reward = record.result.points_for(color, scheme.win_value(), scheme.draw_value());

        let accuracy_value = if side_pairs.is_empty() {
            None
        } else if options.accuracy_skip_lost {
            let kept: Vec<MovePair> = side_pairs
                .iter()
                .filter(|p| {
                    expected_value(&p.best_eval, scheme).is_ok_and(|ev| ev > ACCURACY_EPS)
                })
                .cloned()
                .collect();
            accuracy_dropped += side_pairs.len() - kept.len();
            if kept.is_empty() {
                None
            } else {
                Some(accuracy(&kept, scheme)?)
            }
        } else {
            Some(accuracy(side_pairs, scheme)?)
        };

        // the model stands in for the prior: EGI replaces the realized
        // reward with the model's view of the final played move
        let egi = match side_pairs.last() {
            Some(last) => {
                let last_ev = expected_value(&last.played_eval, scheme)
                    .map_err(MetricError::from)?;
                Some(expected_game_intelligence(last_ev, gpl_value))
            }
            None => None,
        };

        Ok(AnalyzedPlayer {
            player_id: name.to_string(),
            color,
            reward,
            gpl: gpl_value,
            gi: reward.map(|r| metrics::game_intelligence(r, gpl_value)),
            egi,
            accuracy: accuracy_value,
            move_count: side_pairs.len(),
        })
    };

    let white = analyze_side(PlayerColor::White, record.white())?;
    let black = analyze_side(PlayerColor::Black, record.black())?;

    Ok(GameAnalysis {
        white,
        black,
        skipped_plies: pairs.skipped_plies,
        accuracy_dropped,
        result_mismatch: record.result_mismatch(),
    })
}
