//! One UCI engine process: handshake, options, position evaluation.
//!
//! Strictly one in-flight request per session; every command waits for its
//! reply before the next is sent.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use super::{EngineConfig, EngineError, EngineVerdict};
use crate::chess::board::BoardState;
use crate::wdl::{CentipawnEval, Perspective};

pub struct EngineSession {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
    config: EngineConfig,
    /// Handshake banner (`id` lines) for diagnostics.
    pub banner: Vec<String>,
    /// Non-protocol chatter collected during setup, e.g. rejected options.
    pub warnings: Vec<String>,
}

impl EngineSession {
    /// Spawn the engine and run the `uci`/`isready` handshake.
    pub fn start(config: EngineConfig) -> Result<Self, EngineError> {
        let mut child = Command::new(&config.executable)
            .args(&config.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| EngineError::Spawn {
                path: config.executable.display().to_string(),
                source,
            })?;
        let stdin = child.stdin.take().expect("stdin was piped");
        let stdout = child.stdout.take().expect("stdout was piped");

        let (tx, lines) = std::sync::mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                match line {
                    Ok(l) => {
                        if tx.send(l).is_err() {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
        });

        let mut session =
            Self { child, stdin, lines, config, banner: Vec::new(), warnings: Vec::new() };
        session.handshake()?;
        Ok(session)
    }

    fn handshake(&mut self) -> Result<(), EngineError> {
        self.send("uci")?;
        let deadline = Instant::now() + self.config.handshake_timeout;
        loop {
            let line = self.recv_until(deadline).map_err(|_| EngineError::HandshakeTimeout {
                after: self.config.handshake_timeout,
                banner: self.banner.clone(),
            })?;
            if line.trim() == "uciok" {
                break;
            }
            self.banner.push(line);
        }
        for (name, value) in self.config.options.clone() {
            self.send(&format!("setoption name {name} value {value}"))?;
        }
        self.send("isready")?;
        let deadline = Instant::now() + self.config.handshake_timeout;
        loop {
            let line = self.recv_until(deadline).map_err(|_| EngineError::HandshakeTimeout {
                after: self.config.handshake_timeout,
                banner: self.banner.clone(),
            })?;
            if line.trim() == "readyok" {
                break;
            }
            // e.g. "info string unknown option ..." — keep going
            self.warnings.push(line);
        }
        Ok(())
    }

    fn send(&mut self, cmd: &str) -> Result<(), EngineError> {
        writeln!(self.stdin, "{cmd}")?;
        self.stdin.flush()?;
        Ok(())
    }

    fn recv_until(&self, deadline: Instant) -> Result<String, RecvTimeoutError> {
        let now = Instant::now();
        let remaining = deadline.saturating_duration_since(now);
        self.lines.recv_timeout(remaining)
    }

    /// Evaluate a position at the configured depth.
    ///
    /// The UCI score arrives in side-to-move perspective and is stored in
    /// White perspective.
    pub fn evaluate_position(&mut self, board: &BoardState) -> Result<EngineVerdict, EngineError> {
        self.send(&format!("position fen {}", board.to_fen()))?;
        self.send(&format!("go depth {}", self.config.depth))?;

        let mut last_score: Option<CentipawnEval> = None;
        let mut depth_reached = 0u32;
        let mut time_ceiling_hit = false;
        let mut deadline = Instant::now() + self.config.position_timeout;
        let best_move = loop {
            match self.recv_until(deadline) {
                Err(RecvTimeoutError::Disconnected) => return Err(EngineError::Closed),
                Err(RecvTimeoutError::Timeout) => {
                    if time_ceiling_hit {
                        return Err(EngineError::PositionTimeout {
                            after: self.config.position_timeout,
                        });
                    }
                    // one grace period for a bestmove after stop
                    time_ceiling_hit = true;
                    self.send("stop")?;
                    deadline = Instant::now() + Duration::from_secs(2);
                }
                Ok(line) => {
                    let trimmed = line.trim();
                    if let Some(rest) = trimmed.strip_prefix("bestmove") {
                        break rest.split_whitespace().next().map(|s| s.to_string());
                    }
                    if trimmed.starts_with("info") {
                        if let Some((score, depth)) = parse_info_line(trimmed)? {
                            last_score = Some(score);
                            depth_reached = depth;
                        }
                    }
                }
            }
        };

        let score = last_score.ok_or(EngineError::Protocol {
            line: "bestmove arrived without any scored info line".into(),
        })?;
        Ok(EngineVerdict {
            position_key: board.position_key(),
            score: score.to_first_player(board.side_to_move()),
            best_move: best_move.filter(|m| m != "(none)"),
            depth_reached,
            time_ceiling_hit,
        })
    }
}

impl Drop for EngineSession {
    fn drop(&mut self) {
        let _ = self.send("quit");
        std::thread::sleep(Duration::from_millis(20));
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Extract (score, depth) from an `info` line; `None` for lines without a
/// score or for secondary multipv lines.
fn parse_info_line(line: &str) -> Result<Option<(CentipawnEval, u32)>, EngineError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let mut score = None;
    let mut depth = 0u32;
    let mut i = 0;
    while i < tokens.len() {
        match tokens[i] {
            "multipv" => {
                if tokens.get(i + 1) != Some(&"1") {
                    return Ok(None);
                }
                i += 2;
            }
            "depth" => {
                depth = tokens
                    .get(i + 1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| EngineError::Protocol { line: line.into() })?;
                i += 2;
            }
            "score" => {
                let kind = tokens.get(i + 1).copied();
                let value: i32 = tokens
                    .get(i + 2)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| EngineError::Protocol { line: line.into() })?;
                score = Some(match kind {
                    Some("cp") => CentipawnEval::cp(value, Perspective::SideToMove),
                    Some("mate") => CentipawnEval::mate(value, Perspective::SideToMove)
                        .map_err(|_| EngineError::Protocol { line: line.into() })?,
                    _ => return Err(EngineError::Protocol { line: line.into() }),
                });
                i += 3;
            }
            _ => i += 1,
        }
    }
    Ok(score.map(|s| (s, depth)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdl::EvalKind;

    #[test]
    fn info_line_parsing() {
        let (score, depth) =
            parse_info_line("info depth 20 seldepth 30 score cp 34 nodes 100 pv e2e4")
                .unwrap()
                .unwrap();
        assert_eq!((score.kind, score.value), (EvalKind::Cp, 34));
        assert_eq!(score.perspective, Perspective::SideToMove);
        assert_eq!(depth, 20);

        let (score, _) = parse_info_line("info depth 12 score mate -2").unwrap().unwrap();
        assert_eq!((score.kind, score.value), (EvalKind::Mate, -2));

        assert!(parse_info_line("info depth 20 nodes 99").unwrap().is_none());
        assert!(parse_info_line("info depth 20 multipv 2 score cp 1").unwrap().is_none());
        assert!(parse_info_line("info score cp banana").is_err());
    }
}
