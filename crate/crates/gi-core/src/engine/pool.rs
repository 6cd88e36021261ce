//! A pool of engine sessions annotating games.
//!
//! Each worker owns one session (serial discipline per process); jobs are
//! deduplicated by position key, distributed round-robin, and results are
//! reassembled in ply order, so output is deterministic for a fixed pool
//! size and engine behavior.

use std::collections::HashMap;

use super::{EngineConfig, EngineError, EngineSession, EngineVerdict};
use crate::chess::board::BoardState;
use crate::chess::pgn::GameRecord;

pub struct EnginePool {
    sessions: Vec<EngineSession>,
    /// Verdicts by position key; transpositions are evaluated once.
    cache: HashMap<String, EngineVerdict>,
}

#[derive(Debug, Default)]
pub struct AnnotateReport {
    /// Plies (1-based) that received a fresh evaluation.
    pub filled: Vec<usize>,
    /// Plies whose position came from the cache.
    pub cache_hits: Vec<usize>,
    /// Plies left empty, with the failure text.
    pub failures: Vec<(usize, String)>,
}

impl EnginePool {
    pub fn start(config: EngineConfig) -> Result<Self, EngineError> {
        let mut sessions = Vec::with_capacity(config.pool_size.max(1));
        for _ in 0..config.pool_size.max(1) {
            sessions.push(EngineSession::start(config.clone())?);
        }
        Ok(Self { sessions, cache: HashMap::new() })
    }

    pub fn pool_size(&self) -> usize {
        self.sessions.len()
    }

    /// Fill missing `eval_after` slots; existing evaluations are untouched.
    pub fn annotate_game(&mut self, record: &mut GameRecord) -> Result<AnnotateReport, EngineError> {
        let mut report = AnnotateReport::default();

        // replay to collect the position after each unevaluated ply
        let mut board = record.initial_board();
        let mut jobs: Vec<(usize, BoardState)> = Vec::new();
        for (i, ply) in record.plies.iter().enumerate() {
            board = match board.apply_san(&ply.san) {
                Ok((next, _)) => next,
                Err(e) => {
                    report.failures.push((i + 1, format!("cannot replay ply: {e}")));
                    return Ok(report);
                }
            };
            if ply.eval_after.is_none() {
                jobs.push((i + 1, board.clone()));
            }
        }

        // deduplicate by position key, preserving first-seen order
        let mut unique: Vec<(String, BoardState)> = Vec::new();
        let mut by_key: HashMap<String, Vec<usize>> = HashMap::new();
        for (ply_index, position) in jobs {
            let key = position.position_key();
            let entry = by_key.entry(key.clone()).or_default();
            if entry.is_empty() && !self.cache.contains_key(&key) {
                unique.push((key.clone(), position));
            }
            entry.push(ply_index);
        }

        // round-robin the unique positions across sessions
        let n = self.sessions.len();
        let mut results: Vec<(String, Result<EngineVerdict, EngineError>)> =
            Vec::with_capacity(unique.len());
        if n == 1 {
            let session = &mut self.sessions[0];
            for (key, position) in unique {
                let verdict = session.evaluate_position(&position);
                results.push((key, verdict));
            }
        } else {
            let chunks: Vec<Vec<(String, BoardState)>> = {
                let mut cs: Vec<Vec<(String, BoardState)>> = (0..n).map(|_| Vec::new()).collect();
                for (i, job) in unique.into_iter().enumerate() {
                    cs[i % n].push(job);
                }
                cs
            };
            let outcome: Vec<Vec<(String, Result<EngineVerdict, EngineError>)>> =
                std::thread::scope(|scope| {
                    let mut handles = Vec::new();
                    for (session, chunk) in self.sessions.iter_mut().zip(chunks) {
                        handles.push(scope.spawn(move || {
                            chunk
                                .into_iter()
                                .map(|(key, position)| (key, session.evaluate_position(&position)))
                                .collect::<Vec<_>>()
                        }));
                    }
                    handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
                });
            for worker_results in outcome {
                results.extend(worker_results);
            }
        }

        let mut fresh: std::collections::HashSet<String> = std::collections::HashSet::new();
        for (key, outcome) in results {
            match outcome {
                Ok(verdict) => {
                    self.cache.insert(key.clone(), verdict);
                    fresh.insert(key);
                }
                Err(e) => {
                    for &ply_index in by_key.get(&key).into_iter().flatten() {
                        report.failures.push((ply_index, e.to_string()));
                    }
                    by_key.remove(&key);
                }
            }
        }

        // write verdicts back in ply order; only the first fill of a freshly
        // evaluated position counts as an engine call
        let mut fills: Vec<(usize, bool)> = Vec::new();
        for (key, ply_indexes) in &by_key {
            if let Some(verdict) = self.cache.get(key) {
                for (slot, &ply_index) in ply_indexes.iter().enumerate() {
                    record.plies[ply_index - 1].eval_after = Some(verdict.score);
                    let from_cache = slot > 0 || !fresh.contains(key);
                    fills.push((ply_index, from_cache));
                }
            }
        }
        fills.sort_unstable();
        for (ply_index, from_cache) in fills {
            if from_cache {
                report.cache_hits.push(ply_index);
            } else {
                report.filled.push(ply_index);
            }
        }
        report.failures.sort_by_key(|(i, _)| *i);
        Ok(report)
    }
}

/// One-call convenience over a fresh pool.
pub fn annotate_game(
    record: &mut GameRecord,
    config: EngineConfig,
) -> Result<AnnotateReport, EngineError> {
    EnginePool::start(config)?.annotate_game(record)
}
