//! PGN import-format parsing and writing, with `[%eval]` / `[%clk]`
//! comment tags.
//!
//! Parsing is a per-game stream: each game is tokenized and replayed on a
//! board so every SAN move is validated and converted to a coordinate
//! move. Malformed games become diagnostics and the stream continues with
//! the next game. Mainline only; variations and NAGs are skipped.

use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chess::board::{BoardState, SanError};
use crate::metrics::PlayerColor;
use crate::wdl::{CentipawnEval, Perspective};

#[derive(Debug, Error)]
pub enum PgnError {
    #[error("I/O error at byte {offset}: {source}")]
    Io { offset: u64, source: std::io::Error },
    #[error("invalid UTF-8 at byte {offset}")]
    Utf8 { offset: u64 },
}

/// A skipped game and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PgnDiagnostic {
    /// 1-based game index within the input stream.
    pub game_index: usize,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameResult {
    WhiteWin,
    BlackWin,
    Draw,
    Unfinished,
}

impl GameResult {
    pub fn token(self) -> &'static str {
        match self {
            GameResult::WhiteWin => "1-0",
            GameResult::BlackWin => "0-1",
            GameResult::Draw => "1/2-1/2",
            GameResult::Unfinished => "*",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "1-0" => Some(GameResult::WhiteWin),
            "0-1" => Some(GameResult::BlackWin),
            "1/2-1/2" => Some(GameResult::Draw),
            "*" => Some(GameResult::Unfinished),
            _ => None,
        }
    }

    /// Game points for one side.
    pub fn points_for(self, color: PlayerColor, win_value: f64, draw_value: f64) -> Option<f64> {
        match (self, color) {
            (GameResult::WhiteWin, PlayerColor::White) => Some(win_value),
            (GameResult::WhiteWin, PlayerColor::Black) => Some(0.0),
            (GameResult::BlackWin, PlayerColor::White) => Some(0.0),
            (GameResult::BlackWin, PlayerColor::Black) => Some(win_value),
            (GameResult::Draw, _) => Some(draw_value),
            (GameResult::Unfinished, _) => None,
        }
    }
}

/// One half-move with its annotations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ply {
    pub san: String,
    /// Coordinate (UCI) form of the same move.
    pub coordinate: String,
    /// Engine eval of the position before the move, when explicitly known.
    pub eval_before: Option<CentipawnEval>,
    /// Engine eval of the position after the move (PGN comment convention).
    pub eval_after: Option<CentipawnEval>,
    /// Clock tag as written, e.g. `0:03:22`.
    pub clock: Option<String>,
}

/// One parsed game: ordered headers, validated plies, result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub headers: Vec<(String, String)>,
    pub plies: Vec<Ply>,
    pub result: GameResult,
}

impl GameRecord {
    pub fn header(&self, key: &str) -> Option<&str> {
        self.headers.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn white(&self) -> &str {
        self.header("White").unwrap_or("?")
    }

    pub fn black(&self) -> &str {
        self.header("Black").unwrap_or("?")
    }

    pub fn elo(&self, color: PlayerColor) -> Option<u32> {
        let key = if color == PlayerColor::White { "WhiteElo" } else { "BlackElo" };
        self.header(key)?.parse().ok()
    }

    /// Starting position: the FEN header when present, else the standard one.
    pub fn initial_board(&self) -> BoardState {
        self.header("FEN")
            .and_then(|fen| BoardState::from_fen(fen).ok())
            .unwrap_or_default()
    }

    /// Board after the last ply; None when a stored SAN cannot be replayed
    /// (records built programmatically may carry opaque move text).
    pub fn final_board(&self) -> Option<BoardState> {
        let mut board = self.initial_board();
        for ply in &self.plies {
            board = board.apply_san(&ply.san).ok()?.0;
        }
        Some(board)
    }

    /// Mover of ply `i` (0-based).
    pub fn mover(&self, i: usize) -> PlayerColor {
        let start = self.initial_board().side_to_move();
        if i.is_multiple_of(2) {
            start
        } else {
            start.other()
        }
    }

    /// Does the board-detected terminal state contradict the result header?
    pub fn result_mismatch(&self) -> Option<String> {
        let board = self.final_board()?;
        if board.is_checkmate() {
            let winner = board.side_to_move().other();
            let expected = match winner {
                PlayerColor::White => GameResult::WhiteWin,
                PlayerColor::Black => GameResult::BlackWin,
            };
            if self.result != expected {
                return Some(format!(
                    "board shows {:?} mated but result is {}",
                    board.side_to_move(),
                    self.result.token()
                ));
            }
        } else if board.is_stalemate() && self.result != GameResult::Draw {
            return Some(format!("board shows stalemate but result is {}", self.result.token()));
        }
        None
    }
}

/// Outcome of a full-stream parse.
#[derive(Debug)]
pub struct ParseReport {
    pub games: Vec<GameRecord>,
    pub diagnostics: Vec<PgnDiagnostic>,
}

/// Parse every game in the input; malformed games become diagnostics.
pub fn parse_pgn(reader: impl BufRead) -> Result<ParseReport, PgnError> {
    let mut games = Vec::new();
    let mut diagnostics = Vec::new();
    let mut chunker = GameChunker::new(reader);
    let mut game_index = 0usize;
    while let Some(chunk) = chunker.next_chunk()? {
        game_index += 1;
        match parse_one_game(&chunk) {
            Ok(record) => games.push(record),
            Err((line, message)) => diagnostics.push(PgnDiagnostic {
                game_index,
                line: chunk.start_line + line,
                message,
            }),
        }
    }
    Ok(ParseReport { games, diagnostics })
}

struct GameChunk {
    start_line: usize,
    lines: Vec<String>,
}

/// Splits the input into per-game line chunks: a run of header lines
/// followed by movetext, ended by the next header block or EOF.
struct GameChunker<R: BufRead> {
    reader: R,
    line_no: usize,
    byte_offset: u64,
    lookahead: Option<String>,
    done: bool,
}

impl<R: BufRead> GameChunker<R> {
    fn new(reader: R) -> Self {
        Self { reader, line_no: 0, byte_offset: 0, lookahead: None, done: false }
    }

    fn read_line(&mut self) -> Result<Option<String>, PgnError> {
        if let Some(l) = self.lookahead.take() {
            return Ok(Some(l));
        }
        let mut buf = Vec::new();
        let n = self
            .reader
            .read_until(b'\n', &mut buf)
            .map_err(|source| PgnError::Io { offset: self.byte_offset, source })?;
        if n == 0 {
            return Ok(None);
        }
        self.byte_offset += n as u64;
        self.line_no += 1;
        let s = String::from_utf8(buf).map_err(|_| PgnError::Utf8 { offset: self.byte_offset })?;
        Ok(Some(s.trim_end_matches(['\r', '\n']).to_string()))
    }

    fn next_chunk(&mut self) -> Result<Option<GameChunk>, PgnError> {
        if self.done {
            return Ok(None);
        }
        // skip leading blank lines
        let first = loop {
            match self.read_line()? {
                None => {
                    self.done = true;
                    return Ok(None);
                }
                Some(l) if l.trim().is_empty() => continue,
                Some(l) => break l,
            }
        };

        let start_line = self.line_no;
        let mut lines = vec![first];
        let mut in_headers = lines[0].trim_start().starts_with('[');
        loop {
            match self.read_line()? {
                None => {
                    self.done = true;
                    break;
                }
                Some(l) => {
                    let trimmed = l.trim_start();
                    if trimmed.starts_with('[') && is_header_line(trimmed) {
                        if in_headers {
                            lines.push(l);
                        } else {
                            // next game's header block begins; its line is
                            // already counted, and handing it back through
                            // the lookahead does not re-count it
                            self.lookahead = Some(l);
                            break;
                        }
                    } else {
                        if !trimmed.is_empty() {
                            in_headers = false;
                        }
                        lines.push(l);
                    }
                }
            }
        }
        Ok(Some(GameChunk { start_line, lines }))
    }
}

fn is_header_line(s: &str) -> bool {
    // `[Key "Value"]` as opposed to a movetext line starting with `[%...`
    let inner = s.trim_start_matches('[');
    inner
        .chars()
        .next()
        .map(|c| c.is_ascii_alphabetic())
        .unwrap_or(false)
        && s.contains('"')
}

fn parse_header_line(line: &str) -> Option<(String, String)> {
    let inner = line.trim().strip_prefix('[')?.strip_suffix(']')?;
    let space = inner.find(' ')?;
    let key = &inner[..space];
    let rest = inner[space..].trim();
    let value = rest.strip_prefix('"')?.strip_suffix('"')?;
    Some((key.to_string(), value.replace("\\\"", "\"").replace("\\\\", "\\")))
}

/// Parse one game chunk; errors carry (relative line, message).
fn parse_one_game(chunk: &GameChunk) -> Result<GameRecord, (usize, String)> {
    let mut headers = Vec::new();
    let mut movetext = String::new();
    let mut movetext_first_line = 0usize;
    for (i, line) in chunk.lines.iter().enumerate() {
        let trimmed = line.trim();
        if movetext.is_empty() && trimmed.starts_with('[') && is_header_line(trimmed) {
            match parse_header_line(trimmed) {
                Some(h) => headers.push(h),
                None => return Err((i, format!("malformed header line `{trimmed}`"))),
            }
        } else if !trimmed.is_empty() {
            if movetext.is_empty() {
                movetext_first_line = i;
            }
            movetext.push_str(line);
            movetext.push('\n');
        }
    }

    let mut board = headers
        .iter()
        .find(|(k, _)| k == "FEN")
        .map(|(_, fen)| BoardState::from_fen(fen))
        .transpose()
        .map_err(|e| (0, format!("bad FEN header: {e}")))?
        .unwrap_or_default();

    let mut plies: Vec<Ply> = Vec::new();
    let mut result_token: Option<GameResult> = None;
    let mut tok = Tokenizer::new(&movetext);
    while let Some(token) = tok.next_token().map_err(|m| (movetext_first_line, m))? {
        match token {
            Token::Comment(body) => {
                let (eval, clock) = parse_comment_tags(&body)
                    .map_err(|m| (movetext_first_line + tok.line, m))?;
                if let Some(last) = plies.last_mut() {
                    if eval.is_some() {
                        last.eval_after = eval;
                    }
                    if clock.is_some() {
                        last.clock = clock;
                    }
                }
            }
            Token::Result(r) => {
                result_token = Some(r);
                break;
            }
            Token::San(san) => {
                let (next, mv) = board.apply_san(&san).map_err(|e: SanError| {
                    (movetext_first_line + tok.line, format!("ply {}: {e}", plies.len() + 1))
                })?;
                plies.push(Ply {
                    san,
                    coordinate: mv.uci(),
                    eval_before: None,
                    eval_after: None,
                    clock: None,
                });
                board = next;
            }
        }
    }

    let header_result = headers
        .iter()
        .find(|(k, _)| k == "Result")
        .and_then(|(_, v)| GameResult::from_token(v));
    let result = match (result_token, header_result) {
        (Some(t), Some(h)) if t != h => {
            return Err((
                movetext_first_line,
                format!("result token {} contradicts Result header {}", t.token(), h.token()),
            ));
        }
        (Some(t), _) => t,
        (None, Some(h)) => h,
        (None, None) => GameResult::Unfinished,
    };

    Ok(GameRecord { headers, plies, result })
}

enum Token {
    San(String),
    Comment(String),
    Result(GameResult),
}

struct Tokenizer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(text: &'a str) -> Self {
        Self { chars: text.chars().peekable(), line: 0 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    fn next_token(&mut self) -> Result<Option<Token>, String> {
        loop {
            let Some(&c) = self.chars.peek() else { return Ok(None) };
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            match c {
                '{' => {
                    self.bump();
                    let mut body = String::new();
                    loop {
                        match self.bump() {
                            None => return Err("unterminated comment".into()),
                            Some('}') => break,
                            Some(ch) => body.push(ch),
                        }
                    }
                    return Ok(Some(Token::Comment(body)));
                }
                '(' => {
                    // recursive variation: skip with nesting
                    self.bump();
                    let mut depth = 1;
                    while depth > 0 {
                        match self.bump() {
                            None => return Err("unterminated variation".into()),
                            Some('(') => depth += 1,
                            Some(')') => depth -= 1,
                            Some(_) => {}
                        }
                    }
                    continue;
                }
                ';' => {
                    while let Some(ch) = self.bump() {
                        if ch == '\n' {
                            break;
                        }
                    }
                    continue;
                }
                '$' => {
                    self.bump();
                    while self.chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        self.bump();
                    }
                    continue;
                }
                _ => {
                    let mut word = String::new();
                    while let Some(&ch) = self.chars.peek() {
                        if ch.is_whitespace() || "{}();".contains(ch) {
                            break;
                        }
                        word.push(ch);
                        self.bump();
                    }
                    if word.is_empty() {
                        // stray delimiter such as an unmatched brace
                        return Err(format!("unexpected character `{c}`"));
                    }
                    if let Some(r) = GameResult::from_token(&word) {
                        return Ok(Some(Token::Result(r)));
                    }
                    // move numbers: digits plus dots
                    if word.chars().all(|ch| ch.is_ascii_digit() || ch == '.') {
                        continue;
                    }
                    // trailing move-number glue like `12.Nf3` is rare; split it
                    let san_start = word.find(|ch: char| !ch.is_ascii_digit() && ch != '.').unwrap_or(0);
                    return Ok(Some(Token::San(word[san_start..].to_string())));
                }
            }
        }
    }
}

/// Extract `[%eval ...]` and `[%clk ...]` tags from a comment body.
fn parse_comment_tags(body: &str) -> Result<(Option<CentipawnEval>, Option<String>), String> {
    let mut eval = None;
    let mut clock = None;
    let mut rest = body;
    while let Some(start) = rest.find("[%") {
        let tail = &rest[start + 2..];
        let Some(end) = tail.find(']') else { break };
        let tag = &tail[..end];
        if let Some(value) = tag.strip_prefix("eval ") {
            eval = Some(parse_eval_value(value.trim())?);
        } else if let Some(value) = tag.strip_prefix("clk ") {
            clock = Some(value.trim().to_string());
        }
        rest = &tail[end + 1..];
    }
    Ok((eval, clock))
}

fn parse_eval_value(s: &str) -> Result<CentipawnEval, String> {
    if let Some(mate) = s.strip_prefix('#') {
        let distance: i32 = mate.parse().map_err(|_| format!("bad mate eval `{s}`"))?;
        CentipawnEval::mate(distance, Perspective::FirstPlayer)
            .map_err(|e| format!("bad mate eval `{s}`: {e}"))
    } else {
        let pawns: f64 = s.parse().map_err(|_| format!("bad eval `{s}`"))?;
        Ok(CentipawnEval::cp((pawns * 100.0).round() as i32, Perspective::FirstPlayer))
    }
}

/// Format a centipawn eval the way `[%eval]` comments write it.
pub fn format_eval_value(eval: &CentipawnEval) -> String {
    use crate::wdl::EvalKind;
    match eval.kind {
        EvalKind::Mate => format!("#{}", eval.value),
        EvalKind::Cp => {
            let pawns = eval.value as f64 / 100.0;
            let s = format!("{pawns:.2}");
            let s = s.trim_end_matches('0').trim_end_matches('.');
            if s.is_empty() || s == "-" {
                "0".to_string()
            } else {
                s.to_string()
            }
        }
    }
}

/// Write one game in PGN import format.
pub fn write_game(record: &GameRecord, out: &mut String) {
    for (k, v) in &record.headers {
        let escaped = v.replace('\\', "\\\\").replace('"', "\\\"");
        out.push_str(&format!("[{k} \"{escaped}\"]\n"));
    }
    out.push('\n');

    let start = record.initial_board();
    let mut move_no = start.fullmove_number();
    let mut to_move = start.side_to_move();
    let mut line_len = 0usize;
    let mut first = true;
    for ply in &record.plies {
        let mut token = String::new();
        if to_move == PlayerColor::White {
            token.push_str(&format!("{move_no}. "));
        } else if first {
            token.push_str(&format!("{move_no}... "));
        }
        token.push_str(&ply.san);
        let mut tags = Vec::new();
        if let Some(e) = &ply.eval_after {
            tags.push(format!("[%eval {}]", format_eval_value(e)));
        }
        if let Some(c) = &ply.clock {
            tags.push(format!("[%clk {c}]"));
        }
        if !tags.is_empty() {
            token.push_str(&format!(" {{ {} }}", tags.join(" ")));
        }

        if line_len > 0 && line_len + token.len() + 1 > 80 {
            out.push('\n');
            line_len = 0;
        } else if line_len > 0 {
            out.push(' ');
            line_len += 1;
        }
        out.push_str(&token);
        line_len += token.len();

        if to_move == PlayerColor::Black {
            move_no += 1;
        }
        to_move = to_move.other();
        first = false;
    }

    if line_len > 0 {
        out.push(' ');
    }
    out.push_str(record.result.token());
    out.push_str("\n\n");
}

/// Write a whole stream of games.
pub fn write_games(records: &[GameRecord]) -> String {
    let mut out = String::new();
    for r in records {
        write_game(r, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdl::EvalKind;
    use std::io::Cursor;

    fn parse_str(s: &str) -> ParseReport {
        parse_pgn(Cursor::new(s)).unwrap()
    }

    #[test]
    fn minimal_game_parses() {
        let report = parse_str("1. e4 e5 1/2-1/2\n");
        assert_eq!(report.games.len(), 1);
        assert!(report.diagnostics.is_empty());
        let g = &report.games[0];
        assert_eq!(g.plies.len(), 2);
        assert_eq!(g.result, GameResult::Draw);
        assert!(g.plies.iter().all(|p| p.eval_after.is_none()));
        assert_eq!(g.plies[0].coordinate, "e2e4");
    }

    #[test]
    fn eval_and_clock_tags_attach_to_their_ply() {
        let pgn = "[Event \"t\"]\n[Result \"*\"]\n\n1. e4 { [%eval 0.35] [%clk 0:03:22] } e5 { [%eval #-3] } *\n";
        let report = parse_str(pgn);
        let g = &report.games[0];
        let e0 = g.plies[0].eval_after.unwrap();
        assert_eq!((e0.kind, e0.value), (EvalKind::Cp, 35));
        assert_eq!(g.plies[0].clock.as_deref(), Some("0:03:22"));
        let e1 = g.plies[1].eval_after.unwrap();
        assert_eq!((e1.kind, e1.value), (EvalKind::Mate, -3));
        assert_eq!(g.result, GameResult::Unfinished);
    }

    #[test]
    fn malformed_middle_game_is_skipped_with_diagnostic() {
        let pgn = "\
[Event \"a\"]\n[Result \"1-0\"]\n\n1. e4 e5 2. Nf3 1-0\n\n\
[Event \"b\"]\n[Result \"1-0\"]\n\n1. e4 e5 2. Bc7 1-0\n\n\
[Event \"c\"]\n[Result \"0-1\"]\n\n1. d4 d5 0-1\n";
        let report = parse_str(pgn);
        assert_eq!(report.games.len(), 2);
        assert_eq!(report.diagnostics.len(), 1);
        let d = &report.diagnostics[0];
        assert_eq!(d.game_index, 2);
        assert!(d.message.contains("ply 3"), "{}", d.message);
        assert_eq!(report.games[1].header("Event"), Some("c"));
    }

    #[test]
    fn variations_and_nags_are_ignored() {
        let pgn = "1. e4 $1 (1. d4 d5 (1... Nf6)) e5 ; rest of line\n2. Nf3 1-0\n";
        let report = parse_str(pgn);
        let g = &report.games[0];
        assert_eq!(
            g.plies.iter().map(|p| p.san.as_str()).collect::<Vec<_>>(),
            vec!["e4", "e5", "Nf3"]
        );
    }

    #[test]
    fn result_header_conflict_is_a_diagnostic() {
        let pgn = "[Result \"0-1\"]\n\n1. e4 1-0\n";
        let report = parse_str(pgn);
        assert!(report.games.is_empty());
        assert_eq!(report.diagnostics.len(), 1);
        assert!(report.diagnostics[0].message.contains("contradicts"));
    }

    #[test]
    fn missing_result_token_uses_header() {
        let pgn = "[Result \"1-0\"]\n\n1. e4 e5\n\n[Result \"*\"]\n\n1. d4 *\n";
        let report = parse_str(pgn);
        assert_eq!(report.games.len(), 2);
        assert_eq!(report.games[0].result, GameResult::WhiteWin);
        assert_eq!(report.games[1].result, GameResult::Unfinished);
    }

    #[test]
    fn mate_result_mismatch_detected() {
        let pgn = "[Result \"1-0\"]\n\n1. f3 e5 2. g4 Qh4# 1-0\n";
        let report = parse_str(pgn);
        let g = &report.games[0];
        let mismatch = g.result_mismatch().unwrap();
        assert!(mismatch.contains("mated"), "{mismatch}");

        let ok = parse_str("[Result \"0-1\"]\n\n1. f3 e5 2. g4 Qh4# 0-1\n");
        assert!(ok.games[0].result_mismatch().is_none());
    }

    #[test]
    fn round_trip_is_a_fixed_point() {
        let pgn = "\
[Event \"Fixture\"]\n[White \"Alice\"]\n[Black \"Bob\"]\n[Result \"1-0\"]\n\n\
1. e4 { [%eval 0.2] } e5 { [%eval 0.32] [%clk 1:59:00] } 2. Nf3 { [%eval #2] } 1-0\n";
        let first = parse_str(pgn);
        assert!(first.diagnostics.is_empty());
        let written = write_games(&first.games);
        let second = parse_str(&written);
        assert!(second.diagnostics.is_empty());
        assert_eq!(first.games, second.games);
        // and writing again is byte-stable
        assert_eq!(written, write_games(&second.games));
    }

    #[test]
    fn fen_header_sets_up_the_position() {
        let pgn = "[FEN \"8/P6k/8/8/8/8/7K/8 w - - 0 1\"]\n[Result \"*\"]\n\n1. a8=Q *\n";
        let report = parse_str(pgn);
        assert!(report.diagnostics.is_empty(), "{:?}", report.diagnostics);
        assert_eq!(report.games[0].plies[0].coordinate, "a7a8q");
    }

    #[test]
    fn eval_format_round_trip() {
        for cp in [-1234, -100, -7, 0, 5, 35, 250, 1400] {
            let e = CentipawnEval::cp(cp, Perspective::FirstPlayer);
            let s = format_eval_value(&e);
            let back = parse_eval_value(&s).unwrap();
            assert_eq!(back.value, cp, "{s}");
        }
        let mate = CentipawnEval::mate(-3, Perspective::FirstPlayer).unwrap();
        assert_eq!(format_eval_value(&mate), "#-3");
    }

    #[test]
    fn movers_alternate_from_white() {
        let report = parse_str("1. e4 e5 2. Nf3 *\n");
        let g = &report.games[0];
        assert_eq!(g.mover(0), PlayerColor::White);
        assert_eq!(g.mover(1), PlayerColor::Black);
        assert_eq!(g.mover(2), PlayerColor::White);
    }
}
