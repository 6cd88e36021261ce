//! The game-intelligence metric family: EPL, GPL, GI, EGI, aGI, AGPL,
//! RGI, RGI percentile, accuracy, and the generalized linear form.
//!
//! Everything here is pure arithmetic over machine evaluations; callers
//! supply the evaluations (a chess eval model or a synthetic-game machine).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reward::{expected_value, DistributionError, OutcomeDistribution, RewardScheme};

/// Division guard on the best-move evaluation in [`accuracy`].
pub const ACCURACY_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error(transparent)]
    Distribution(#[from] DistributionError),
    #[error("metric undefined for a zero-move play")]
    ZeroMoves,
    #[error("accuracy division guard: best-move evaluation {ev} <= {ACCURACY_EPS:e} at ply {ply}")]
    AccuracyGuard { ply: usize, ev: f64 },
    #[error("relative GI needs gi_max > gi_min, got max = min = {value}")]
    DegenerateRange { value: f64 },
    #[error("RGI percentile needs a population of at least 2, got {got}")]
    InsufficientPopulation { got: usize },
    #[error("percentile index {index} out of range for population of {len}")]
    IndexOutOfRange { index: usize, len: usize },
}

/// Machine evaluations of the best and the played action at one ply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovePair {
    pub best_eval: OutcomeDistribution,
    pub played_eval: OutcomeDistribution,
    /// 1-based ply index in the source game.
    pub ply_index: usize,
}

/// One player's metrics for one game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerGameMetrics {
    pub player_id: String,
    pub color: PlayerColor,
    pub reward: f64,
    pub gpl: f64,
    pub gi: f64,
    pub egi: Option<f64>,
    /// None for a zero-move play, where the mean ratio is undefined.
    pub accuracy: Option<f64>,
    pub move_count: usize,
}

/// First mover (White in chess) or second mover (Black).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlayerColor {
    White,
    Black,
}

impl PlayerColor {
    pub fn other(self) -> Self {
        match self {
            PlayerColor::White => PlayerColor::Black,
            PlayerColor::Black => PlayerColor::White,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PlayerColor::White => "white",
            PlayerColor::Black => "black",
        }
    }
}

impl PlayerGameMetrics {
    /// Build a metrics row; `gi` is derived so the identity gi = reward - gpl
    /// holds by construction.
    pub fn new(
        player_id: impl Into<String>,
        color: PlayerColor,
        reward: f64,
        gpl: f64,
        egi: Option<f64>,
        accuracy: Option<f64>,
        move_count: usize,
    ) -> Self {
        let row = Self {
            player_id: player_id.into(),
            color,
            reward,
            gpl,
            gi: game_intelligence(reward, gpl),
            egi,
            accuracy,
            move_count,
        };
        row.assert_identity();
        row
    }

    /// The GI identity, checked on every construction and on dataset read.
    pub fn identity_residual(&self) -> f64 {
        (self.gi - (self.reward - self.gpl)).abs()
    }

    pub fn assert_identity(&self) {
        assert!(
            self.identity_residual() <= 1e-12,
            "GI identity violated: gi={} reward={} gpl={}",
            self.gi,
            self.reward,
            self.gpl
        );
    }
}

/// Expected point loss of one move: EV(best) - EV(played).
///
/// May be negative; engine evaluations can improve after a move.
pub fn epl(pair: &MovePair, scheme: &RewardScheme) -> Result<f64, MetricError> {
    let best = expected_value(&pair.best_eval, scheme)?;
    let played = expected_value(&pair.played_eval, scheme)?;
    Ok(best - played)
}

/// Game point loss: the sum of per-move expected point losses.
pub fn gpl(pairs: &[MovePair], scheme: &RewardScheme) -> Result<f64, MetricError> {
    let mut total = 0.0;
    for pair in pairs {
        total += epl(pair, scheme)?;
    }
    Ok(total)
}

/// GI = realized reward minus game point loss.
pub fn game_intelligence(reward: f64, gpl_value: f64) -> f64 {
    reward - gpl_value
}

/// EGI = the prior's expected value of the final action minus GPL.
///
/// The caller supplies `last_action_ev`; this module does not guess priors.
pub fn expected_game_intelligence(last_action_ev: f64, gpl_value: f64) -> f64 {
    last_action_ev - gpl_value
}

/// Sum of GI over a sequence of plays.
pub fn aggregate_gi(gi_values: &[f64]) -> f64 {
    gi_values.iter().sum()
}

/// GPL averaged per move. Undefined for a zero-move play.
pub fn average_gpl(gpl_value: f64, move_count: usize) -> Result<f64, MetricError> {
    if move_count == 0 {
        return Err(MetricError::ZeroMoves);
    }
    Ok(gpl_value / move_count as f64)
}

/// GI rescaled between the machine-determined extremes of the game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGi {
    pub value: f64,
    /// Set when the raw ratio fell outside [0, 1]; the reported value is
    /// clamped and the input GI came from a different machine than the
    /// extremes (a caller bug).
    pub clamped: bool,
}

pub fn relative_gi(gi: f64, gi_min: f64, gi_max: f64) -> Result<RelativeGi, MetricError> {
    if gi_max <= gi_min {
        return Err(MetricError::DegenerateRange { value: gi_min });
    }
    let raw = (gi - gi_min) / (gi_max - gi_min);
    if (0.0..=1.0).contains(&raw) {
        Ok(RelativeGi { value: raw, clamped: false })
    } else {
        Ok(RelativeGi { value: raw.clamp(0.0, 1.0), clamped: true })
    }
}

/// Percentile standing of `values[index]` within the population:
/// 100 * (m - #{j : values[j] >= values[index]}) / m, ties inclusive.
pub fn rgi_percentile(values: &[f64], index: usize) -> Result<f64, MetricError> {
    let m = values.len();
    if m < 2 {
        return Err(MetricError::InsufficientPopulation { got: m });
    }
    if index >= m {
        return Err(MetricError::IndexOutOfRange { index, len: m });
    }
    let pivot = values[index];
    let at_least = values.iter().filter(|v| **v >= pivot).count();
    Ok(100.0 * (m - at_least) as f64 / m as f64)
}

/// Mean ratio of played-move to best-move expected points.
///
/// Errors when any best-move evaluation is at or below the division guard,
/// naming the offending ply; callers may drop such plies beforehand.
pub fn accuracy(pairs: &[MovePair], scheme: &RewardScheme) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::ZeroMoves);
    }
    let mut total = 0.0;
    for pair in pairs {
        let best = expected_value(&pair.best_eval, scheme)?;
        if best <= ACCURACY_EPS {
            return Err(MetricError::AccuracyGuard { ply: pair.ply_index, ev: best });
        }
        let played = expected_value(&pair.played_eval, scheme)?;
        total += played / best;
    }
    Ok(total / pairs.len() as f64)
}

/// gGI(alpha, beta) = alpha * reward - beta * gpl; gGI(1, 1) is GI.
pub fn generalized_gi(alpha: f64, beta: f64, reward: f64, gpl_value: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&beta));
    alpha * reward - beta * gpl_value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reward::OutcomeDistribution;

    fn chess() -> RewardScheme {
        RewardScheme::chess()
    }

    fn dist(w: f64, d: f64, l: f64) -> OutcomeDistribution {
        OutcomeDistribution::validate(vec![w, d, l]).unwrap()
    }

    /// Distribution with EV exactly `ev` under the chess scheme: all mass
    /// split between win and loss.
    fn dist_with_ev(ev: f64) -> OutcomeDistribution {
        dist(ev, 0.0, 1.0 - ev)
    }

    fn pair(best_ev: f64, played_ev: f64, ply: usize) -> MovePair {
        MovePair {
            best_eval: dist_with_ev(best_ev),
            played_eval: dist_with_ev(played_ev),
            ply_index: ply,
        }
    }

    #[test]
    fn epl_zero_for_identical_evals() {
        let p = pair(0.62, 0.62, 1);
        assert_eq!(epl(&p, &chess()).unwrap(), 0.0);
    }

    #[test]
    fn epl_hand_case() {
        let p = pair(0.60, 0.55, 1);
        assert!((epl(&p, &chess()).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn epl_may_be_negative() {
        let p = pair(0.50, 0.53, 1);
        assert!((epl(&p, &chess()).unwrap() + 0.03).abs() < 1e-12);
    }

    #[test]
    fn gpl_empty_is_zero() {
        assert_eq!(gpl(&[], &chess()).unwrap(), 0.0);
    }

    #[test]
    fn gpl_sums_epls() {
        let pairs = vec![pair(0.60, 0.55, 1), pair(0.55, 0.55, 2)];
        assert!((gpl(&pairs, &chess()).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn gpl_twenty_ply_spreadsheet() {
        // Frozen from the independent spreadsheet recomputation: 20 plies of
        // (best, played) expected values; GPL is the sum of differences.
        let evs: [(f64, f64); 20] = [
            (0.500, 0.492), (0.510, 0.505), (0.505, 0.471), (0.480, 0.480),
            (0.492, 0.455), (0.460, 0.460), (0.470, 0.432), (0.440, 0.425),
            (0.433, 0.430), (0.436, 0.398), (0.410, 0.405), (0.412, 0.400),
            (0.408, 0.391), (0.398, 0.398), (0.405, 0.370), (0.378, 0.360),
            (0.365, 0.365), (0.372, 0.340), (0.350, 0.346), (0.352, 0.310),
        ];
        let pairs: Vec<MovePair> =
            evs.iter().enumerate().map(|(i, &(b, p))| pair(b, p, i + 1)).collect();
        let total = gpl(&pairs, &chess()).unwrap();
        // sum of (b - p) computed independently: 0.343
        assert!((total - 0.343).abs() < 1e-9, "got {total}");
    }

    #[test]
    fn gpl_is_order_invariant() {
        let pairs = vec![pair(0.61, 0.58, 1), pair(0.57, 0.50, 2), pair(0.49, 0.51, 3)];
        let mut rev = pairs.clone();
        rev.reverse();
        let a = gpl(&pairs, &chess()).unwrap();
        let b = gpl(&rev, &chess()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn gi_hand_cases() {
        assert_eq!(game_intelligence(1.0, 0.0), 1.0);
        assert!((game_intelligence(0.5, 0.41) - 0.09).abs() < 1e-12);
        assert!((game_intelligence(0.0, 0.86) + 0.86).abs() < 1e-12);
    }

    #[test]
    fn egi_cases() {
        // prior matching the realized outcome reproduces GI
        let gpl_value = 0.2;
        assert_eq!(
            expected_game_intelligence(1.0, gpl_value),
            game_intelligence(1.0, gpl_value)
        );
        assert!((expected_game_intelligence(0.7, 0.2) - 0.5).abs() < 1e-12);
        assert!((expected_game_intelligence(0.5, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn aggregate_gi_cases() {
        assert_eq!(aggregate_gi(&[]), 0.0);
        assert!((aggregate_gi(&[0.17, -0.07]) - 0.10).abs() < 1e-12);
        assert_eq!(aggregate_gi(&[1.0, 1.0, 1.0]), 3.0);
    }

    #[test]
    fn average_gpl_cases() {
        assert!((average_gpl(0.5, 10).unwrap() - 0.05).abs() < 1e-12);
        assert_eq!(average_gpl(0.0, 5).unwrap(), 0.0);
        assert!(matches!(average_gpl(0.3, 0), Err(MetricError::ZeroMoves)));
    }

    #[test]
    fn relative_gi_cases() {
        assert_eq!(relative_gi(2.0, 0.0, 2.0).unwrap().value, 1.0);
        assert_eq!(relative_gi(0.0, 0.0, 2.0).unwrap().value, 0.0);
        assert!((relative_gi(0.5, 0.0, 2.0).unwrap().value - 0.25).abs() < 1e-12);
        assert!(matches!(
            relative_gi(0.5, 1.0, 1.0),
            Err(MetricError::DegenerateRange { .. })
        ));
        let clamped = relative_gi(3.0, 0.0, 2.0).unwrap();
        assert!(clamped.clamped);
        assert_eq!(clamped.value, 1.0);
    }

    #[test]
    fn rgi_percentile_cases() {
        // direct count: 1 of 3 values >= 3 -> 100*(3-1)/3
        let p = rgi_percentile(&[1.0, 2.0, 3.0], 2).unwrap();
        assert!((p - 200.0 / 3.0).abs() < 1e-12);
        // every j counts as >= when all equal
        assert_eq!(rgi_percentile(&[2.0, 2.0, 2.0], 1).unwrap(), 0.0);
        // direct count: 1 of 2 values >= 5 -> 100*(2-1)/2
        assert_eq!(rgi_percentile(&[5.0, 1.0], 0).unwrap(), 50.0);
        assert!(matches!(
            rgi_percentile(&[1.0], 0),
            Err(MetricError::InsufficientPopulation { got: 1 })
        ));
    }

    #[test]
    fn rgi_percentile_range_bound() {
        let values = [0.3, 0.9, 0.1, 0.9, 0.4];
        let m = values.len() as f64;
        for i in 0..values.len() {
            let p = rgi_percentile(&values, i).unwrap();
            assert!(p >= 0.0 && p <= 100.0 * (m - 1.0) / m);
        }
    }

    #[test]
    fn accuracy_cases() {
        let scheme = chess();
        let perfect = vec![pair(0.6, 0.6, 1), pair(0.4, 0.4, 2)];
        assert!((accuracy(&perfect, &scheme).unwrap() - 1.0).abs() < 1e-12);

        // ratios 1.0 and 0.8 -> mean 0.9
        let mixed = vec![pair(0.5, 0.5, 1), pair(0.5, 0.4, 2)];
        assert!((accuracy(&mixed, &scheme).unwrap() - 0.9).abs() < 1e-12);

        let guarded = vec![pair(0.0, 0.0, 7)];
        assert!(matches!(
            accuracy(&guarded, &scheme),
            Err(MetricError::AccuracyGuard { ply: 7, .. })
        ));
    }

    #[test]
    fn generalized_gi_cases() {
        assert_eq!(generalized_gi(1.0, 1.0, 0.5, 0.41), game_intelligence(0.5, 0.41));
        assert_eq!(generalized_gi(1.0, 0.0, 0.5, 9.0), 0.5);
        assert!((generalized_gi(0.5, 0.5, 1.0, 0.4) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_loss_bound() {
        // if every epl >= 0 then gi <= reward
        let pairs = vec![pair(0.6, 0.55, 1), pair(0.5, 0.5, 2)];
        let g = gpl(&pairs, &chess()).unwrap();
        assert!(game_intelligence(1.0, g) <= 1.0);
        // played = best everywhere -> gi = reward
        let exact = vec![pair(0.6, 0.6, 1), pair(0.5, 0.5, 2)];
        let g = gpl(&exact, &chess()).unwrap();
        assert_eq!(game_intelligence(1.0, g), 1.0);
    }

    #[test]
    fn metrics_row_identity() {
        let row = PlayerGameMetrics::new("p", PlayerColor::White, 1.0, 0.071, None, Some(0.97), 6);
        assert!(row.identity_residual() <= 1e-12);
        assert!((row.gi - 0.929).abs() < 1e-12);
    }
}
