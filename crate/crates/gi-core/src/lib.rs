//! Game-intelligence metrics over chess game records and synthetic
//! extensive-form games.
//!
//! The crate has three layers:
//!
//! * numeric primitives and the metric family ([`reward`], [`metrics`],
//!   [`wdl`], [`stats`]);
//! * the chess pipeline: PGN ingestion, board tracking, per-game analysis,
//!   engine annotation ([`chess`], [`engine`]);
//! * a synthetic-game lab that verifies the theory's properties by brute
//!   force on small trees ([`lab`]).

pub mod chess;
pub mod engine;
pub mod lab;
pub mod metrics;
pub mod play;
pub mod reward;
pub mod stats;
pub mod wdl;

pub use metrics::{MovePair, PlayerColor, PlayerGameMetrics};
pub use play::PlaySeq;
pub use reward::{expected_value, OutcomeDistribution, RewardScheme};
pub use wdl::{CentipawnEval, EloRating, EvalModel, WdlTriple};
