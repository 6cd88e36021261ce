//! Engine-client protocol tests against the scripted mock engine.
//!
//! The mock replays one block of lines per `go` command, so every test is
//! deterministic and needs no real engine binary.

use std::io::Cursor;
use std::time::Duration;

use gi_core::chess::board::BoardState;
use gi_core::chess::parse_pgn;
use gi_core::engine::{EngineConfig, EnginePool, EngineSession};
use gi_core::wdl::{EvalKind, Perspective};

fn mock_config(dir: &tempfile::TempDir, script: &str) -> EngineConfig {
    let path = dir.path().join("script.txt");
    std::fs::write(&path, script).unwrap();
    let mut config = EngineConfig::new(env!("CARGO_BIN_EXE_uci-mock"));
    config.args = vec![path.display().to_string()];
    config.depth = 20;
    config.handshake_timeout = Duration::from_secs(5);
    config.position_timeout = Duration::from_secs(5);
    config
}

#[test]
fn handshake_and_cp_score() {
    let dir = tempfile::tempdir().unwrap();
    let config = mock_config(
        &dir,
        "info depth 20 score cp 34 pv e2e4\nbestmove e2e4\n",
    );
    let mut session = EngineSession::start(config).unwrap();
    assert!(session.banner.iter().any(|l| l.contains("uci-mock")));

    let board = BoardState::default();
    let verdict = session.evaluate_position(&board).unwrap();
    // White to move: side-to-move score is already White-perspective
    assert_eq!((verdict.score.kind, verdict.score.value), (EvalKind::Cp, 34));
    assert_eq!(verdict.score.perspective, Perspective::FirstPlayer);
    assert_eq!(verdict.best_move.as_deref(), Some("e2e4"));
    assert_eq!(verdict.depth_reached, 20);
    assert!(!verdict.time_ceiling_hit);
}

#[test]
fn mate_score_and_black_perspective_negation() {
    let dir = tempfile::tempdir().unwrap();
    let config = mock_config(
        &dir,
        "info depth 18 score mate -2\nbestmove g8f6\n",
    );
    let mut session = EngineSession::start(config).unwrap();
    // Black to move: a side-to-move mate -2 is a White mate +2
    let board = BoardState::default().apply_san("e4").unwrap().0;
    let verdict = session.evaluate_position(&board).unwrap();
    assert_eq!((verdict.score.kind, verdict.score.value), (EvalKind::Mate, 2));
    assert_eq!(verdict.score.perspective, Perspective::FirstPlayer);
}

#[test]
fn nonexistent_engine_is_a_spawn_error() {
    let config = EngineConfig::new("/nonexistent/engine/binary");
    match EngineSession::start(config) {
        Err(gi_core::engine::EngineError::Spawn { path, .. }) => {
            assert!(path.contains("nonexistent"));
        }
        other => panic!("expected spawn error, got {:?}", other.err()),
    }
}

#[test]
fn rejected_option_is_a_warning_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = mock_config(
        &dir,
        "#reject-option Bogus\ninfo depth 20 score cp 1\nbestmove e2e4\n",
    );
    config.options = vec![("Bogus".into(), "1".into()), ("Threads".into(), "2".into())];
    let session = EngineSession::start(config).unwrap();
    assert_eq!(session.warnings.len(), 1);
    assert!(session.warnings[0].contains("Bogus"));
}

#[test]
fn handshake_timeout_reports_banner() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = mock_config(&dir, "#no-uciok\n");
    config.handshake_timeout = Duration::from_millis(200);
    match EngineSession::start(config) {
        Err(gi_core::engine::EngineError::HandshakeTimeout { .. }) => {}
        other => panic!("expected handshake timeout, got {:?}", other.err()),
    }
}

#[test]
fn unparsable_score_is_a_protocol_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = mock_config(&dir, "info depth 20 score cp banana\nbestmove e2e4\n");
    let mut session = EngineSession::start(config).unwrap();
    let err = session.evaluate_position(&BoardState::default()).unwrap_err();
    match err {
        gi_core::engine::EngineError::Protocol { line } => assert!(line.contains("banana")),
        other => panic!("expected protocol error, got {other:?}"),
    }
}

#[test]
fn annotate_fills_only_gaps_with_exact_call_count() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("calls.log");
    let script = format!(
        "#log {}\ninfo depth 20 score cp 18\nbestmove d7d5\n\ninfo depth 20 score cp 21\nbestmove g8f6\n",
        log.display()
    );
    let config = mock_config(&dir, &script);

    // gaps after Black's replies only (plies 2 and 4)
    let pgn = "[Result \"*\"]\n\n1. d4 { [%eval 0.2] } d5 2. c4 { [%eval 0.25] } e6 *\n";
    let mut record = parse_pgn(Cursor::new(pgn)).unwrap().games.pop().unwrap();
    let mut pool = EnginePool::start(config).unwrap();
    let report = pool.annotate_game(&mut record).unwrap();

    assert_eq!(report.filled, vec![2, 4]);
    assert!(report.cache_hits.is_empty());
    assert!(report.failures.is_empty());
    // both gap positions have Black just moved, so White-to-move keeps sign
    assert_eq!(record.plies[1].eval_after.unwrap().value, 18);
    assert_eq!(record.plies[3].eval_after.unwrap().value, 21);
    // existing evals untouched
    assert_eq!(record.plies[0].eval_after.unwrap().value, 20);

    let calls = std::fs::read_to_string(&log).unwrap();
    assert_eq!(calls.lines().filter(|l| l.starts_with("go")).count(), 2);

    // idempotence: a second pass makes no further calls
    let report = pool.annotate_game(&mut record).unwrap();
    assert!(report.filled.is_empty() && report.cache_hits.is_empty());
    let calls = std::fs::read_to_string(&log).unwrap();
    assert_eq!(calls.lines().filter(|l| l.starts_with("go")).count(), 2);
}

#[test]
fn transposition_hits_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("calls.log");
    // knight shuffle: the position after ply 5 repeats the one after ply 1,
    // and ply 6 repeats ply 2 (move counters are off the cache key)
    let script = format!(
        "#log {}\n\
         info depth 20 score cp 10\nbestmove g8f6\n\n\
         info depth 20 score cp 0\nbestmove g1f3\n\n\
         info depth 20 score cp 5\nbestmove g8f6\n\n\
         info depth 20 score cp 1\nbestmove g1f3\n",
        log.display()
    );
    let config = mock_config(&dir, &script);
    let pgn = "[Result \"*\"]\n\n1. Nf3 Nf6 2. Ng1 Ng8 3. Nf3 Nf6 *\n";
    let mut record = parse_pgn(Cursor::new(pgn)).unwrap().games.pop().unwrap();
    let mut pool = EnginePool::start(config).unwrap();
    let report = pool.annotate_game(&mut record).unwrap();

    assert_eq!(report.filled, vec![1, 2, 3, 4]);
    assert_eq!(report.cache_hits, vec![5, 6]);
    let calls = std::fs::read_to_string(&log).unwrap();
    assert_eq!(calls.lines().filter(|l| l.starts_with("go")).count(), 4);
    // repeated positions got identical verdicts
    assert_eq!(record.plies[0].eval_after, record.plies[4].eval_after);
    assert_eq!(record.plies[1].eval_after, record.plies[5].eval_after);
}

#[test]
fn pool_of_two_sessions_annotates_everything() {
    let dir = tempfile::tempdir().unwrap();
    // both sessions read the same script; each replies from its own cursor
    let script = "\
info depth 20 score cp 7\nbestmove e7e5\n\n\
info depth 20 score cp 9\nbestmove b8c6\n\n\
info depth 20 score cp 11\nbestmove f8c5\n\n\
info depth 20 score cp 13\nbestmove d7d6\n";
    let mut config = mock_config(&dir, script);
    config.pool_size = 2;
    let pgn = "[Result \"*\"]\n\n1. e4 e5 2. Nf3 Nc6 *\n";
    let mut record = parse_pgn(Cursor::new(pgn)).unwrap().games.pop().unwrap();
    let mut pool = EnginePool::start(config).unwrap();
    assert_eq!(pool.pool_size(), 2);
    let report = pool.annotate_game(&mut record).unwrap();
    assert_eq!(report.filled, vec![1, 2, 3, 4]);
    assert!(record.plies.iter().all(|p| p.eval_after.is_some()));
}

#[test]
fn terminal_position_verdict_is_passed_through() {
    let dir = tempfile::tempdir().unwrap();
    // a stalemate position: whatever the engine replies is the verdict
    let config = mock_config(&dir, "info depth 20 score cp 0\nbestmove (none)\n");
    let mut session = EngineSession::start(config).unwrap();
    let board = BoardState::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1").unwrap();
    assert!(board.is_stalemate());
    let verdict = session.evaluate_position(&board).unwrap();
    assert_eq!(verdict.score.value, 0);
    assert_eq!(verdict.best_move, None);
}

/// Opt-in smoke test against a real engine:
/// `GI_ENGINE_PATH=/usr/bin/stockfish cargo test -p gi-core -- --ignored`.
#[test]
#[ignore = "needs a real UCI engine; set GI_ENGINE_PATH and run with --ignored"]
fn real_engine_smoke() {
    let path = std::env::var("GI_ENGINE_PATH").expect("GI_ENGINE_PATH must point at an engine");
    let mut config = EngineConfig::new(path);
    config.depth = 8;
    let mut session = EngineSession::start(config).expect("engine starts");
    let verdict = session.evaluate_position(&BoardState::default()).expect("evaluates");
    assert!(verdict.depth_reached >= 1);
    assert!(verdict.best_move.is_some());
}

#[test]
fn per_position_failure_leaves_slot_empty_and_listed() {
    let dir = tempfile::tempdir().unwrap();
    // only one reply block: the second go gets nothing and times out
    let mut config = mock_config(&dir, "info depth 20 score cp 3\nbestmove e7e5\n");
    config.position_timeout = Duration::from_millis(200);
    let pgn = "[Result \"*\"]\n\n1. e4 e5 *\n";
    let mut record = parse_pgn(Cursor::new(pgn)).unwrap().games.pop().unwrap();
    let mut pool = EnginePool::start(config).unwrap();
    let report = pool.annotate_game(&mut record).unwrap();
    assert_eq!(report.filled, vec![1]);
    assert_eq!(report.failures.len(), 1);
    assert_eq!(report.failures[0].0, 2);
    assert!(record.plies[1].eval_after.is_none());
}
