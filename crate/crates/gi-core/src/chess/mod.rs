//! The chess pipeline: PGN ingestion, board tracking, filtering, per-game
//! metric computation, dataset persistence.

pub mod analyze;
pub mod board;
pub mod dataset;
pub mod filter;
pub mod pgn;

pub use analyze::{analyze_game, build_move_pairs, AnalyzeOptions, GameAnalysis};
pub use board::{BoardState, Move, SanError};
pub use filter::{filter_games, FilterSpec};
pub use pgn::{parse_pgn, write_games, GameRecord, GameResult, Ply};
