//! UCI engine client: a single protocol session and a pool that fills
//! missing evaluations in parsed games.

pub mod pool;
pub mod session;

use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

use crate::wdl::CentipawnEval;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("failed to spawn engine `{path}`: {source}")]
    Spawn { path: String, source: std::io::Error },
    #[error("engine pipe error: {0}")]
    Pipe(#[from] std::io::Error),
    #[error("handshake timed out after {after:?}; banner so far: {banner:?}")]
    HandshakeTimeout { after: Duration, banner: Vec<String> },
    #[error("timed out waiting for bestmove after {after:?}")]
    PositionTimeout { after: Duration },
    #[error("unparsable engine reply: `{line}`")]
    Protocol { line: String },
    #[error("engine closed its output stream")]
    Closed,
}

/// Engine launch and search configuration.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub executable: PathBuf,
    /// Extra argv entries (the mock engine takes its script here).
    pub args: Vec<String>,
    pub depth: u32,
    /// `setoption` pairs applied after the handshake.
    pub options: Vec<(String, String)>,
    pub handshake_timeout: Duration,
    /// Per-position ceiling; the session sends `stop` when it fires.
    pub position_timeout: Duration,
    pub pool_size: usize,
}

impl EngineConfig {
    pub fn new(executable: impl Into<PathBuf>) -> Self {
        Self {
            executable: executable.into(),
            args: Vec::new(),
            depth: 20,
            options: Vec::new(),
            handshake_timeout: Duration::from_secs(10),
            position_timeout: Duration::from_secs(120),
            pool_size: 1,
        }
    }
}

/// One engine judgment of one position.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineVerdict {
    /// FEN without move counters.
    pub position_key: String,
    /// Stored in the first-player (White) perspective.
    pub score: CentipawnEval,
    pub best_move: Option<String>,
    pub depth_reached: u32,
    /// Search was cut short by the position time ceiling.
    pub time_ceiling_hit: bool,
}

pub use pool::{annotate_game, AnnotateReport, EnginePool};
pub use session::EngineSession;
