//! Shared inputs for the criterion benchmarks in `benches/`.

use gi_core::chess::analyze::{analyze_game, AnalyzeOptions};
use gi_core::chess::pgn::{GameRecord, GameResult, Ply};
use gi_core::reward::RewardScheme;
use gi_core::wdl::{CentipawnEval, EvalModel, Perspective};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// A synthetic annotated game of the given length with a random walk of
/// evaluations, deterministic in the seed.
pub fn synthetic_record(seed: u64, plies: usize) -> GameRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut eval = 0i32;
    let plies = (0..plies)
        .map(|i| {
            eval = (eval + rng.gen_range(-60..80)).clamp(-1300, 1300);
            Ply {
                san: format!("m{i}"),
                coordinate: format!("c{i}"),
                eval_before: None,
                eval_after: Some(CentipawnEval::cp(eval, Perspective::FirstPlayer)),
                clock: None,
            }
        })
        .collect();
    GameRecord {
        headers: vec![
            ("White".into(), "Bench W".into()),
            ("Black".into(), "Bench B".into()),
            ("Result".into(), "1-0".into()),
        ],
        plies,
        result: GameResult::WhiteWin,
    }
}

/// Analyze one synthetic game end to end.
pub fn analyze_synthetic(record: &GameRecord) -> f64 {
    let analysis = analyze_game(
        record,
        &EvalModel::engine(),
        &RewardScheme::chess(),
        &AnalyzeOptions::default(),
    )
    .expect("synthetic records analyze cleanly");
    analysis.white.gpl + analysis.black.gpl
}
