//! Centipawn-to-expected-score models.
//!
//! Two nested models share the same logistic: the engine model
//! `E(c) = 1/(1+exp(-k*c))` and the Elo-adjusted human model, which blends
//! the players' Elo expected scores with the logistic term
//! `t(c) = 2/(1+exp(-k*c)) - 1`. Both are exposed behind [`EvalModel`]
//! together with a configurable draw decomposition, so a different
//! engine-derived WDL source can be dropped in later.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::PlayerColor;
use crate::reward::OutcomeDistribution;

/// The logistic constant adapted from Lichess's win-probability formula.
pub const DEFAULT_LOGISTIC_K: f64 = 0.00368208;
/// Centipawn stand-in for a mate; ordinary cp input is capped 100 below it.
pub const DEFAULT_MATE_CAP: f64 = 1500.0;
pub const DEFAULT_DRAW_MAX: f64 = 0.6;
pub const DEFAULT_DRAW_TAU: f64 = 300.0;

#[derive(Debug, Error)]
pub enum WdlError {
    #[error("expected score {0} outside (0, 1)")]
    EsOutOfRange(f64),
    #[error("mate distance must be nonzero")]
    ZeroMateDistance,
    #[error("rating must be finite and positive, got {0}")]
    BadRating(f64),
    #[error("scores and opponent ratings differ in length: {scores} vs {opponents}")]
    TprLengthMismatch { scores: usize, opponents: usize },
    #[error("TPR needs at least one game")]
    TprEmpty,
    #[error("TPR unbounded: total score {total} out of {games} games is perfect or zero")]
    TprUnbounded { total: f64, games: usize },
}

/// An engine evaluation in centipawns or distance-to-mate, with the
/// perspective it is expressed in tracked explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentipawnEval {
    pub kind: EvalKind,
    /// Centipawns, or signed mate distance in moves (never 0 for mates).
    pub value: i32,
    pub perspective: Perspective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EvalKind {
    Cp,
    Mate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Perspective {
    /// Positive favors the side to move (UCI wire convention).
    SideToMove,
    /// Positive favors the first player / White (PGN `[%eval]` convention).
    FirstPlayer,
}

impl CentipawnEval {
    pub fn cp(value: i32, perspective: Perspective) -> Self {
        Self { kind: EvalKind::Cp, value, perspective }
    }

    pub fn mate(distance: i32, perspective: Perspective) -> Result<Self, WdlError> {
        if distance == 0 {
            return Err(WdlError::ZeroMateDistance);
        }
        Ok(Self { kind: EvalKind::Mate, value: distance, perspective })
    }

    /// The same evaluation seen from the other side.
    pub fn negated(self) -> Self {
        Self { value: -self.value, ..self }
    }

    /// Reexpress in the first-player perspective given whose turn it is.
    pub fn to_first_player(self, side_to_move: PlayerColor) -> Self {
        match (self.perspective, side_to_move) {
            (Perspective::SideToMove, PlayerColor::Black) => Self {
                perspective: Perspective::FirstPlayer,
                ..self.negated()
            },
            (Perspective::SideToMove, PlayerColor::White) => Self {
                perspective: Perspective::FirstPlayer,
                ..self
            },
            (Perspective::FirstPlayer, _) => self,
        }
    }

    /// Centipawn value entering the score models: ordinary evals are capped
    /// at `mate_cap - 100` so every mate outranks every ordinary eval.
    pub fn model_cp(self, mate_cap: f64) -> f64 {
        match self.kind {
            EvalKind::Cp => {
                let cap = mate_cap - 100.0;
                (self.value as f64).clamp(-cap, cap)
            }
            EvalKind::Mate => mate_to_cp(self.value, mate_cap),
        }
    }
}

/// Elo rating newtype; finite and positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EloRating(f64);

impl EloRating {
    pub fn new(rating: f64) -> Result<Self, WdlError> {
        if !rating.is_finite() || rating <= 0.0 {
            return Err(WdlError::BadRating(rating));
        }
        Ok(Self(rating))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Win/draw/loss probabilities for a position, always on the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WdlTriple {
    pub win: f64,
    pub draw: f64,
    pub loss: f64,
}

impl WdlTriple {
    pub fn to_distribution(self) -> OutcomeDistribution {
        OutcomeDistribution::validate(vec![self.win, self.draw, self.loss])
            .expect("decomposition output is a valid simplex point")
    }
}

/// Elo expected score: 1 / (1 + 10^((E_j - E_i)/400)).
pub fn elo_expected_score(e_i: EloRating, e_j: EloRating) -> f64 {
    1.0 / (1.0 + 10f64.powf((e_j.get() - e_i.get()) / 400.0))
}

fn logistic_term_k(c: f64, k: f64) -> f64 {
    2.0 / (1.0 + (-k * c).exp()) - 1.0
}

/// The odd logistic term t(c) = 2/(1+e^(-k c)) - 1 with the default k.
pub fn logistic_term(c: f64) -> f64 {
    logistic_term_k(c, DEFAULT_LOGISTIC_K)
}

/// Engine expected score with the default constants: 1/(1+e^(-k c)).
pub fn engine_expected_score(c: CentipawnEval) -> f64 {
    EvalModelParams::default().engine_score(c.model_cp(DEFAULT_MATE_CAP))
}

/// Elo-adjusted human expected score for White, piecewise around c = 0.
///
/// `c` is a White-perspective centipawn value; `es_w`/`es_b` are the
/// players' Elo expected scores.
pub fn human_expected_score(c: f64, es_w: f64, es_b: f64) -> Result<f64, WdlError> {
    for es in [es_w, es_b] {
        if !(es > 0.0 && es < 1.0) {
            return Err(WdlError::EsOutOfRange(es));
        }
    }
    Ok(human_score_k(c, es_w, es_b, DEFAULT_LOGISTIC_K))
}

fn human_score_k(c: f64, es_w: f64, es_b: f64, k: f64) -> f64 {
    if c >= 0.0 {
        es_w + (1.0 - es_w) * logistic_term_k(c, k)
    } else {
        1.0 - es_b - (1.0 - es_b) * logistic_term_k(-c, k)
    }
}

/// Map a signed mate distance onto the centipawn axis:
/// sign(d) * (mate_cap - |d|). Closer mates score higher and every mate
/// outranks the capped ordinary range.
pub fn mate_to_cp(mate_distance: i32, mate_cap: f64) -> f64 {
    debug_assert!(mate_distance != 0);
    let sign = if mate_distance > 0 { 1.0 } else { -1.0 };
    sign * (mate_cap - mate_distance.abs() as f64)
}

/// Draw-curve parameters: draw = d_max * exp(-|c| / tau).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrawModel {
    pub d_max: f64,
    pub tau: f64,
}

impl Default for DrawModel {
    fn default() -> Self {
        Self { d_max: DEFAULT_DRAW_MAX, tau: DEFAULT_DRAW_TAU }
    }
}

/// Split an expected score into a WDL triple using the draw curve.
///
/// Unclamped outputs satisfy win + draw/2 = expected_score; extreme scores
/// are projected back onto the simplex.
pub fn wdl_decompose(expected_score: f64, c: f64, draw: DrawModel) -> WdlTriple {
    let d = draw.d_max * (-c.abs() / draw.tau).exp();
    let w = (expected_score - d / 2.0).clamp(0.0, expected_score.max(0.0));
    let l = 1.0 - w - d;
    if l >= 0.0 {
        WdlTriple { win: w, draw: d, loss: l }
    } else {
        let w2 = w.max(0.0);
        let sum = w2 + d;
        WdlTriple { win: w2 / sum, draw: d / sum, loss: 0.0 }
    }
}

/// Full model configuration: logistic constant, mate cap, draw curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalModelParams {
    pub logistic_k: f64,
    pub mate_cap: f64,
    pub draw: DrawModel,
}

impl Default for EvalModelParams {
    fn default() -> Self {
        Self {
            logistic_k: DEFAULT_LOGISTIC_K,
            mate_cap: DEFAULT_MATE_CAP,
            draw: DrawModel::default(),
        }
    }
}

impl EvalModelParams {
    fn engine_score(&self, c: f64) -> f64 {
        1.0 / (1.0 + (-self.logistic_k * c).exp())
    }
}

/// A centipawn-to-expected-points mapping: the engine logistic, or the
/// Elo-adjusted human model for a concrete pairing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EvalModel {
    Engine { params: EvalModelParams },
    Human { es_w: f64, es_b: f64, params: EvalModelParams },
}

impl EvalModel {
    pub fn engine() -> Self {
        EvalModel::Engine { params: EvalModelParams::default() }
    }

    pub fn human_from_elos(
        white: EloRating,
        black: EloRating,
        params: EvalModelParams,
    ) -> Self {
        let es_w = elo_expected_score(white, black);
        EvalModel::Human { es_w, es_b: 1.0 - es_w, params }
    }

    pub fn params(&self) -> &EvalModelParams {
        match self {
            EvalModel::Engine { params } | EvalModel::Human { params, .. } => params,
        }
    }

    /// White's expected score for a White-perspective evaluation.
    pub fn white_score(&self, eval: CentipawnEval) -> f64 {
        debug_assert_eq!(eval.perspective, Perspective::FirstPlayer);
        let c = eval.model_cp(self.params().mate_cap);
        match self {
            EvalModel::Engine { params } => params.engine_score(c),
            EvalModel::Human { es_w, es_b, params } => {
                human_score_k(c, *es_w, *es_b, params.logistic_k)
            }
        }
    }

    /// The mover's expected score; Black's is the complement of White's.
    pub fn mover_score(&self, eval: CentipawnEval, mover: PlayerColor) -> f64 {
        let white = self.white_score(eval);
        match mover {
            PlayerColor::White => white,
            PlayerColor::Black => 1.0 - white,
        }
    }

    /// The mover's WDL triple for a White-perspective evaluation.
    pub fn mover_wdl(&self, eval: CentipawnEval, mover: PlayerColor) -> WdlTriple {
        let score = self.mover_score(eval, mover);
        let c_white = eval.model_cp(self.params().mate_cap);
        let c_mover = match mover {
            PlayerColor::White => c_white,
            PlayerColor::Black => -c_white,
        };
        wdl_decompose(score, c_mover, self.params().draw)
    }
}

/// Tournament performance rating: the rating whose Elo expected scores
/// against the given opponents sum to the achieved total. Solved by
/// bisection; perfect and zero scores are unbounded and error out.
pub fn tournament_performance_rating(
    actual_scores: &[f64],
    opponent_ratings: &[EloRating],
) -> Result<EloRating, WdlError> {
    if actual_scores.is_empty() {
        return Err(WdlError::TprEmpty);
    }
    if actual_scores.len() != opponent_ratings.len() {
        return Err(WdlError::TprLengthMismatch {
            scores: actual_scores.len(),
            opponents: opponent_ratings.len(),
        });
    }
    let total: f64 = actual_scores.iter().sum();
    let games = actual_scores.len();
    if total <= 0.0 || total >= games as f64 {
        return Err(WdlError::TprUnbounded { total, games });
    }

    let expected_total = |rating: f64| -> f64 {
        let r = EloRating(rating);
        opponent_ratings.iter().map(|opp| elo_expected_score(r, *opp)).sum()
    };

    let mut lo = opponent_ratings.iter().map(|r| r.get()).fold(f64::INFINITY, f64::min) - 1000.0;
    let mut hi = opponent_ratings.iter().map(|r| r.get()).fold(f64::NEG_INFINITY, f64::max) + 1000.0;
    // expected_total is strictly increasing in the rating
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if expected_total(mid) < total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    EloRating::new(0.5 * (lo + hi))
}
