//! Board state, FEN serialization, legal move generation, and SAN.
//!
//! Squares are indexed 0..64, a1 = 0, h1 = 7, a8 = 56 (rank-major). The
//! move generator is the plain pseudo-legal-then-filter kind; games here
//! are replayed once per analysis, so clarity wins over speed. Perft
//! counts validate it against the independent oracle values.

use thiserror::Error;

use crate::metrics::PlayerColor;

#[derive(Debug, Error)]
pub enum FenError {
    #[error("FEN needs at least 4 fields, got {0}")]
    FieldCount(usize),
    #[error("bad placement field: {0}")]
    Placement(String),
    #[error("bad side-to-move field: {0}")]
    SideToMove(String),
    #[error("bad castling field: {0}")]
    Castling(String),
    #[error("bad en-passant field: {0}")]
    EnPassant(String),
    #[error("bad clock field: {0}")]
    Clock(String),
    #[error("{0} kings for {1:?}")]
    KingCount(usize, PlayerColor),
}

#[derive(Debug, Error)]
pub enum SanError {
    #[error("empty SAN token")]
    Empty,
    #[error("unparsable SAN `{0}`")]
    Syntax(String),
    #[error("illegal move `{0}` in this position")]
    Illegal(String),
    #[error("ambiguous SAN `{san}`: {count} legal candidates")]
    Ambiguous { san: String, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Piece {
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
}

impl Piece {
    fn from_letter(c: char) -> Option<Self> {
        match c {
            'P' => Some(Piece::Pawn),
            'N' => Some(Piece::Knight),
            'B' => Some(Piece::Bishop),
            'R' => Some(Piece::Rook),
            'Q' => Some(Piece::Queen),
            'K' => Some(Piece::King),
            _ => None,
        }
    }

    fn letter(self) -> char {
        match self {
            Piece::Pawn => 'P',
            Piece::Knight => 'N',
            Piece::Bishop => 'B',
            Piece::Rook => 'R',
            Piece::Queen => 'Q',
            Piece::King => 'K',
        }
    }

    fn promo_letter(self) -> char {
        self.letter().to_ascii_lowercase()
    }
}

pub type Square = u8;

pub fn square(file: u8, rank: u8) -> Square {
    rank * 8 + file
}

pub fn file_of(sq: Square) -> u8 {
    sq % 8
}

pub fn rank_of(sq: Square) -> u8 {
    sq / 8
}

pub fn square_name(sq: Square) -> String {
    format!("{}{}", (b'a' + file_of(sq)) as char, rank_of(sq) + 1)
}

fn square_from_name(s: &str) -> Option<Square> {
    let bytes = s.as_bytes();
    if bytes.len() != 2 {
        return None;
    }
    let file = bytes[0].checked_sub(b'a')?;
    let rank = bytes[1].checked_sub(b'1')?;
    if file < 8 && rank < 8 {
        Some(square(file, rank))
    } else {
        None
    }
}

/// A coordinate move: origin, destination, optional promotion piece.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub from: Square,
    pub to: Square,
    pub promotion: Option<Piece>,
}

impl Move {
    /// UCI wire format: `e2e4`, `e7e8q`.
    pub fn uci(&self) -> String {
        let mut s = format!("{}{}", square_name(self.from), square_name(self.to));
        if let Some(p) = self.promotion {
            s.push(p.promo_letter());
        }
        s
    }

    pub fn from_uci(s: &str) -> Option<Self> {
        if s.len() < 4 || s.len() > 5 || !s.is_ascii() {
            return None;
        }
        let from = square_from_name(&s[0..2])?;
        let to = square_from_name(&s[2..4])?;
        let promotion = match s.as_bytes().get(4) {
            None => None,
            Some(c) => Some(Piece::from_letter((*c as char).to_ascii_uppercase())?),
        };
        Some(Move { from, to, promotion })
    }
}

const CASTLE_WK: u8 = 1;
const CASTLE_WQ: u8 = 2;
const CASTLE_BK: u8 = 4;
const CASTLE_BQ: u8 = 8;

pub const START_FEN: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";

/// A chess position: piece placement plus the full FEN state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardState {
    squares: [Option<(PlayerColor, Piece)>; 64],
    side_to_move: PlayerColor,
    castling: u8,
    ep_square: Option<Square>,
    halfmove_clock: u32,
    fullmove_number: u32,
}

const KNIGHT_OFFSETS: [(i8, i8); 8] =
    [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)];
const KING_OFFSETS: [(i8, i8); 8] =
    [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
const BISHOP_DIRS: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
const ROOK_DIRS: [(i8, i8); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

fn offset(sq: Square, df: i8, dr: i8) -> Option<Square> {
    let f = file_of(sq) as i8 + df;
    let r = rank_of(sq) as i8 + dr;
    if (0..8).contains(&f) && (0..8).contains(&r) {
        Some(square(f as u8, r as u8))
    } else {
        None
    }
}

impl Default for BoardState {
    fn default() -> Self {
        Self::from_fen(START_FEN).expect("start position FEN is valid")
    }
}

impl BoardState {
    pub fn from_fen(fen: &str) -> Result<Self, FenError> {
        let fields: Vec<&str> = fen.split_whitespace().collect();
        if fields.len() < 4 {
            return Err(FenError::FieldCount(fields.len()));
        }

        let mut squares = [None; 64];
        let ranks: Vec<&str> = fields[0].split('/').collect();
        if ranks.len() != 8 {
            return Err(FenError::Placement(fields[0].into()));
        }
        for (i, row) in ranks.iter().enumerate() {
            let rank = 7 - i as u8;
            let mut file = 0u8;
            for c in row.chars() {
                if let Some(skip) = c.to_digit(10) {
                    file += skip as u8;
                } else {
                    let color = if c.is_uppercase() { PlayerColor::White } else { PlayerColor::Black };
                    let piece = Piece::from_letter(c.to_ascii_uppercase())
                        .ok_or_else(|| FenError::Placement(fields[0].into()))?;
                    if file >= 8 {
                        return Err(FenError::Placement(fields[0].into()));
                    }
                    squares[square(file, rank) as usize] = Some((color, piece));
                    file += 1;
                }
            }
            if file != 8 {
                return Err(FenError::Placement(fields[0].into()));
            }
        }

        let side_to_move = match fields[1] {
            "w" => PlayerColor::White,
            "b" => PlayerColor::Black,
            other => return Err(FenError::SideToMove(other.into())),
        };

        let mut castling = 0u8;
        if fields[2] != "-" {
            for c in fields[2].chars() {
                castling |= match c {
                    'K' => CASTLE_WK,
                    'Q' => CASTLE_WQ,
                    'k' => CASTLE_BK,
                    'q' => CASTLE_BQ,
                    _ => return Err(FenError::Castling(fields[2].into())),
                };
            }
        }

        let ep_square = match fields[3] {
            "-" => None,
            name => Some(square_from_name(name).ok_or_else(|| FenError::EnPassant(name.into()))?),
        };

        let halfmove_clock = match fields.get(4) {
            Some(s) => s.parse().map_err(|_| FenError::Clock((*s).into()))?,
            None => 0,
        };
        let fullmove_number = match fields.get(5) {
            Some(s) => s.parse().map_err(|_| FenError::Clock((*s).into()))?,
            None => 1,
        };

        let board = Self { squares, side_to_move, castling, ep_square, halfmove_clock, fullmove_number };
        for color in [PlayerColor::White, PlayerColor::Black] {
            let kings = board.squares.iter().filter(|s| **s == Some((color, Piece::King))).count();
            if kings != 1 {
                return Err(FenError::KingCount(kings, color));
            }
        }
        Ok(board)
    }

    pub fn to_fen(&self) -> String {
        let mut out = String::new();
        for rank in (0..8).rev() {
            let mut empty = 0;
            for file in 0..8 {
                match self.squares[square(file, rank) as usize] {
                    None => empty += 1,
                    Some((color, piece)) => {
                        if empty > 0 {
                            out.push_str(&empty.to_string());
                            empty = 0;
                        }
                        let c = piece.letter();
                        out.push(if color == PlayerColor::White { c } else { c.to_ascii_lowercase() });
                    }
                }
            }
            if empty > 0 {
                out.push_str(&empty.to_string());
            }
            if rank > 0 {
                out.push('/');
            }
        }
        out.push(' ');
        out.push(if self.side_to_move == PlayerColor::White { 'w' } else { 'b' });
        out.push(' ');
        if self.castling == 0 {
            out.push('-');
        } else {
            if self.castling & CASTLE_WK != 0 { out.push('K'); }
            if self.castling & CASTLE_WQ != 0 { out.push('Q'); }
            if self.castling & CASTLE_BK != 0 { out.push('k'); }
            if self.castling & CASTLE_BQ != 0 { out.push('q'); }
        }
        out.push(' ');
        match self.ep_square {
            None => out.push('-'),
            Some(sq) => out.push_str(&square_name(sq)),
        }
        out.push_str(&format!(" {} {}", self.halfmove_clock, self.fullmove_number));
        out
    }

    /// FEN without the move counters; cache key for engine verdicts.
    pub fn position_key(&self) -> String {
        let fen = self.to_fen();
        let mut it = fen.rsplitn(3, ' ');
        it.next();
        it.next();
        it.next().expect("FEN has six fields").to_string()
    }

    pub fn side_to_move(&self) -> PlayerColor {
        self.side_to_move
    }

    pub fn fullmove_number(&self) -> u32 {
        self.fullmove_number
    }

    pub fn piece_at(&self, sq: Square) -> Option<(PlayerColor, Piece)> {
        self.squares[sq as usize]
    }

    fn king_square(&self, color: PlayerColor) -> Square {
        self.squares
            .iter()
            .position(|s| *s == Some((color, Piece::King)))
            .expect("exactly one king per side") as Square
    }

    /// Is `sq` attacked by any piece of `by`?
    pub fn is_attacked(&self, sq: Square, by: PlayerColor) -> bool {
        let pawn_dr: i8 = if by == PlayerColor::White { -1 } else { 1 };
        for df in [-1i8, 1] {
            if let Some(from) = offset(sq, df, pawn_dr) {
                if self.squares[from as usize] == Some((by, Piece::Pawn)) {
                    return true;
                }
            }
        }
        for (df, dr) in KNIGHT_OFFSETS {
            if let Some(from) = offset(sq, df, dr) {
                if self.squares[from as usize] == Some((by, Piece::Knight)) {
                    return true;
                }
            }
        }
        for (df, dr) in KING_OFFSETS {
            if let Some(from) = offset(sq, df, dr) {
                if self.squares[from as usize] == Some((by, Piece::King)) {
                    return true;
                }
            }
        }
        for (dirs, sliders) in [
            (BISHOP_DIRS, [Piece::Bishop, Piece::Queen]),
            (ROOK_DIRS, [Piece::Rook, Piece::Queen]),
        ] {
            for (df, dr) in dirs {
                let mut cur = sq;
                while let Some(next) = offset(cur, df, dr) {
                    match self.squares[next as usize] {
                        None => cur = next,
                        Some((c, p)) => {
                            if c == by && sliders.contains(&p) {
                                return true;
                            }
                            break;
                        }
                    }
                }
            }
        }
        false
    }

    pub fn in_check(&self) -> bool {
        self.is_attacked(self.king_square(self.side_to_move), self.side_to_move.other())
    }

    fn pseudo_moves(&self) -> Vec<Move> {
        let us = self.side_to_move;
        let them = us.other();
        let mut moves = Vec::with_capacity(48);
        let fwd: i8 = if us == PlayerColor::White { 1 } else { -1 };
        let start_rank = if us == PlayerColor::White { 1 } else { 6 };
        let promo_rank = if us == PlayerColor::White { 7 } else { 0 };

        let push_pawn = |moves: &mut Vec<Move>, from: Square, to: Square| {
            if rank_of(to) == promo_rank {
                for p in [Piece::Queen, Piece::Rook, Piece::Bishop, Piece::Knight] {
                    moves.push(Move { from, to, promotion: Some(p) });
                }
            } else {
                moves.push(Move { from, to, promotion: None });
            }
        };

        for from in 0..64u8 {
            let Some((color, piece)) = self.squares[from as usize] else { continue };
            if color != us {
                continue;
            }
            match piece {
                Piece::Pawn => {
                    if let Some(one) = offset(from, 0, fwd) {
                        if self.squares[one as usize].is_none() {
                            push_pawn(&mut moves, from, one);
                            if rank_of(from) == start_rank {
                                let two = offset(one, 0, fwd).expect("double push stays on board");
                                if self.squares[two as usize].is_none() {
                                    moves.push(Move { from, to: two, promotion: None });
                                }
                            }
                        }
                    }
                    for df in [-1i8, 1] {
                        if let Some(to) = offset(from, df, fwd) {
                            match self.squares[to as usize] {
                                Some((c, _)) if c == them => push_pawn(&mut moves, from, to),
                                None if Some(to) == self.ep_square => {
                                    moves.push(Move { from, to, promotion: None });
                                }
                                _ => {}
                            }
                        }
                    }
                }
                Piece::Knight => {
                    for (df, dr) in KNIGHT_OFFSETS {
                        if let Some(to) = offset(from, df, dr) {
                            if self.squares[to as usize].map(|(c, _)| c) != Some(us) {
                                moves.push(Move { from, to, promotion: None });
                            }
                        }
                    }
                }
                Piece::King => {
                    for (df, dr) in KING_OFFSETS {
                        if let Some(to) = offset(from, df, dr) {
                            if self.squares[to as usize].map(|(c, _)| c) != Some(us) {
                                moves.push(Move { from, to, promotion: None });
                            }
                        }
                    }
                    self.castle_moves(&mut moves);
                }
                Piece::Bishop | Piece::Rook | Piece::Queen => {
                    let dirs: &[(i8, i8)] = match piece {
                        Piece::Bishop => &BISHOP_DIRS,
                        Piece::Rook => &ROOK_DIRS,
                        _ => &[BISHOP_DIRS, ROOK_DIRS].concat(),
                    };
                    for &(df, dr) in dirs {
                        let mut cur = from;
                        while let Some(to) = offset(cur, df, dr) {
                            match self.squares[to as usize] {
                                None => {
                                    moves.push(Move { from, to, promotion: None });
                                    cur = to;
                                }
                                Some((c, _)) => {
                                    if c == them {
                                        moves.push(Move { from, to, promotion: None });
                                    }
                                    break;
                                }
                            }
                        }
                    }
                }
            }
        }
        moves
    }

    fn castle_moves(&self, moves: &mut Vec<Move>) {
        let us = self.side_to_move;
        let them = us.other();
        let home: Square = if us == PlayerColor::White { 0 } else { 56 };
        let king = home + 4;
        if self.squares[king as usize] != Some((us, Piece::King)) {
            return;
        }
        let (ks_flag, qs_flag) = if us == PlayerColor::White {
            (CASTLE_WK, CASTLE_WQ)
        } else {
            (CASTLE_BK, CASTLE_BQ)
        };
        if self.castling & ks_flag != 0
            && self.squares[(home + 5) as usize].is_none()
            && self.squares[(home + 6) as usize].is_none()
            && self.squares[(home + 7) as usize] == Some((us, Piece::Rook))
            && !self.is_attacked(king, them)
            && !self.is_attacked(home + 5, them)
            && !self.is_attacked(home + 6, them)
        {
            moves.push(Move { from: king, to: home + 6, promotion: None });
        }
        if self.castling & qs_flag != 0
            && self.squares[(home + 1) as usize].is_none()
            && self.squares[(home + 2) as usize].is_none()
            && self.squares[(home + 3) as usize].is_none()
            && self.squares[home as usize] == Some((us, Piece::Rook))
            && !self.is_attacked(king, them)
            && !self.is_attacked(home + 3, them)
            && !self.is_attacked(home + 2, them)
        {
            moves.push(Move { from: king, to: home + 2, promotion: None });
        }
    }

    /// Apply a move without legality checking (callers use legal moves).
    pub fn make_move(&self, mv: Move) -> BoardState {
        let mut next = self.clone();
        let us = self.side_to_move;
        let (_, piece) = self.squares[mv.from as usize].expect("move origin holds a piece");

        let is_capture = next.squares[mv.to as usize].is_some();
        next.squares[mv.from as usize] = None;

        // en passant capture removes the bypassed pawn
        if piece == Piece::Pawn && Some(mv.to) == self.ep_square && !is_capture {
            let captured = if us == PlayerColor::White { mv.to - 8 } else { mv.to + 8 };
            next.squares[captured as usize] = None;
        }

        next.squares[mv.to as usize] = Some((us, mv.promotion.unwrap_or(piece)));

        // castling moves the rook too
        if piece == Piece::King && mv.from.abs_diff(mv.to) == 2 {
            let home = if us == PlayerColor::White { 0 } else { 56 };
            if mv.to == home + 6 {
                next.squares[(home + 7) as usize] = None;
                next.squares[(home + 5) as usize] = Some((us, Piece::Rook));
            } else {
                next.squares[home as usize] = None;
                next.squares[(home + 3) as usize] = Some((us, Piece::Rook));
            }
        }

        // castling rights die with king/rook moves and rook captures
        for (sq, mask) in [
            (4u8, CASTLE_WK | CASTLE_WQ),
            (60, CASTLE_BK | CASTLE_BQ),
            (0, CASTLE_WQ),
            (7, CASTLE_WK),
            (56, CASTLE_BQ),
            (63, CASTLE_BK),
        ] {
            if mv.from == sq || mv.to == sq {
                next.castling &= !mask;
            }
        }

        next.ep_square = if piece == Piece::Pawn && mv.from.abs_diff(mv.to) == 16 {
            Some((mv.from + mv.to) / 2)
        } else {
            None
        };

        next.halfmove_clock = if piece == Piece::Pawn || is_capture {
            0
        } else {
            self.halfmove_clock + 1
        };
        if us == PlayerColor::Black {
            next.fullmove_number += 1;
        }
        next.side_to_move = us.other();
        next
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let us = self.side_to_move;
        self.pseudo_moves()
            .into_iter()
            .filter(|mv| {
                let next = self.make_move(*mv);
                !next.is_attacked(next.king_square(us), us.other())
            })
            .collect()
    }

    pub fn is_checkmate(&self) -> bool {
        self.in_check() && self.legal_moves().is_empty()
    }

    pub fn is_stalemate(&self) -> bool {
        !self.in_check() && self.legal_moves().is_empty()
    }

    /// Leaf count of the legal-move tree; validates the generator.
    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        let moves = self.legal_moves();
        if depth == 1 {
            return moves.len() as u64;
        }
        moves.iter().map(|mv| self.make_move(*mv).perft(depth - 1)).sum()
    }

    /// Resolve a SAN token against this position.
    ///
    /// Full SAN: piece letter, file/rank disambiguation, captures,
    /// promotion (`=Q` or bare suffix), castling in `O-O`/`0-0` spellings,
    /// check/mate/annotation suffixes.
    pub fn apply_san(&self, san: &str) -> Result<(BoardState, Move), SanError> {
        let mv = self.parse_san(san)?;
        Ok((self.make_move(mv), mv))
    }

    pub fn parse_san(&self, san: &str) -> Result<Move, SanError> {
        let clean: &str = san.trim_end_matches(['+', '#', '!', '?']);
        let clean = clean.strip_suffix("e.p.").unwrap_or(clean);
        if clean.is_empty() {
            return Err(SanError::Empty);
        }
        let legal = self.legal_moves();

        if clean == "O-O" || clean == "0-0" || clean == "O-O-O" || clean == "0-0-0" {
            let kingside = clean == "O-O" || clean == "0-0";
            let home: Square = if self.side_to_move == PlayerColor::White { 0 } else { 56 };
            let target = if kingside { home + 6 } else { home + 2 };
            return legal
                .iter()
                .find(|m| {
                    m.from == home + 4
                        && m.to == target
                        && self.squares[m.from as usize].map(|(_, p)| p) == Some(Piece::King)
                })
                .copied()
                .ok_or_else(|| SanError::Illegal(san.into()));
        }

        let mut rest = clean;
        let piece = match rest.chars().next() {
            Some(c) if c.is_ascii_uppercase() => {
                let p = Piece::from_letter(c).ok_or_else(|| SanError::Syntax(san.into()))?;
                rest = &rest[1..];
                p
            }
            _ => Piece::Pawn,
        };

        let (body, promotion) = match rest.find('=') {
            Some(i) => {
                let promo = rest[i + 1..]
                    .chars()
                    .next()
                    .and_then(Piece::from_letter)
                    .ok_or_else(|| SanError::Syntax(san.into()))?;
                (&rest[..i], Some(promo))
            }
            None => {
                // bare-suffix promotion: e8Q
                let last = rest.chars().last().ok_or_else(|| SanError::Syntax(san.into()))?;
                if piece == Piece::Pawn && last.is_ascii_uppercase() {
                    let promo = Piece::from_letter(last).ok_or_else(|| SanError::Syntax(san.into()))?;
                    (&rest[..rest.len() - 1], Some(promo))
                } else {
                    (rest, None)
                }
            }
        };

        let body: String = body.chars().filter(|c| *c != 'x').collect();
        if body.len() < 2 {
            return Err(SanError::Syntax(san.into()));
        }
        let dest = square_from_name(&body[body.len() - 2..])
            .ok_or_else(|| SanError::Syntax(san.into()))?;
        let disambig = &body[..body.len() - 2];

        let mut file_filter = None;
        let mut rank_filter = None;
        for c in disambig.chars() {
            match c {
                'a'..='h' => file_filter = Some(c as u8 - b'a'),
                '1'..='8' => rank_filter = Some(c as u8 - b'1'),
                _ => return Err(SanError::Syntax(san.into())),
            }
        }

        let candidates: Vec<Move> = legal
            .into_iter()
            .filter(|m| {
                m.to == dest
                    && self.squares[m.from as usize].map(|(_, p)| p) == Some(piece)
                    && m.promotion == promotion
                    && file_filter.is_none_or(|f| file_of(m.from) == f)
                    && rank_filter.is_none_or(|r| rank_of(m.from) == r)
            })
            .collect();

        match candidates.len() {
            1 => Ok(candidates[0]),
            0 => Err(SanError::Illegal(san.into())),
            n => Err(SanError::Ambiguous { san: san.into(), count: n }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn start_fen_round_trips() {
        let board = BoardState::default();
        assert_eq!(board.to_fen(), START_FEN);
        let reparsed = BoardState::from_fen(&board.to_fen()).unwrap();
        assert_eq!(board, reparsed);
    }

    #[test]
    fn fen_rejects_missing_king() {
        assert!(matches!(
            BoardState::from_fen("8/8/8/8/8/8/8/K7 w - - 0 1"),
            Err(FenError::KingCount(0, PlayerColor::Black))
        ));
    }

    #[test]
    fn perft_startpos_against_oracle() {
        // frozen from the independent pre-built move-generation oracle
        let board = BoardState::default();
        assert_eq!(board.perft(1), 20);
        assert_eq!(board.perft(2), 400);
        assert_eq!(board.perft(3), 8902);
    }

    #[test]
    fn perft_kiwipete_against_oracle() {
        // castling/en-passant heavy position, counts from the same oracle
        let board = BoardState::from_fen(
            "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
        )
        .unwrap();
        assert_eq!(board.perft(1), 48);
        assert_eq!(board.perft(2), 2039);
    }

    #[test]
    fn perft_promotion_position_against_oracle() {
        let board = BoardState::from_fen(
            "rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8",
        )
        .unwrap();
        assert_eq!(board.perft(1), 44);
        assert_eq!(board.perft(2), 1486);
    }

    #[test]
    fn perft_en_passant_pin_position_against_oracle() {
        let board =
            BoardState::from_fen("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1").unwrap();
        assert_eq!(board.perft(1), 14);
        assert_eq!(board.perft(2), 191);
        assert_eq!(board.perft(3), 2812);
    }

    #[test]
    fn e4_is_the_forced_interpretation() {
        let board = BoardState::default();
        let (next, mv) = board.apply_san("e4").unwrap();
        assert_eq!(mv.uci(), "e2e4");
        assert_eq!(next.side_to_move(), PlayerColor::Black);
        assert_eq!(next.to_fen(), "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 1");
    }

    #[test]
    fn nbd2_disambiguates_to_the_b1_knight() {
        // oracle scenario: knights on b1 and f3 both reach d2
        let board =
            BoardState::from_fen("rnbqkbnr/pppppppp/8/8/8/5N2/PPP1PPPP/RNBQKB1R w KQkq - 0 1")
                .unwrap();
        let (_, mv) = board.apply_san("Nbd2").unwrap();
        assert_eq!(mv.uci(), "b1d2");
        // bare Nd2 is ambiguous here
        assert!(matches!(board.parse_san("Nd2"), Err(SanError::Ambiguous { count: 2, .. })));
        let (_, mv) = board.apply_san("Nfd2").unwrap();
        assert_eq!(mv.uci(), "f3d2");
    }

    #[test]
    fn castling_without_rights_is_illegal() {
        // kings and rooks placed, but no castling rights in the FEN
        let board =
            BoardState::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w - - 0 1").unwrap();
        assert!(matches!(board.parse_san("O-O"), Err(SanError::Illegal(_))));
        let with_rights =
            BoardState::from_fen("r3k2r/8/8/8/8/8/8/R3K2R w KQkq - 0 1").unwrap();
        assert_eq!(with_rights.parse_san("O-O").unwrap().uci(), "e1g1");
        assert_eq!(with_rights.parse_san("O-O-O").unwrap().uci(), "e1c1");
    }

    #[test]
    fn en_passant_capture_works() {
        let board = BoardState::default();
        let mut b = board;
        for san in ["e4", "a6", "e5", "d5"] {
            b = b.apply_san(san).unwrap().0;
        }
        let (after, mv) = b.apply_san("exd6").unwrap();
        assert_eq!(mv.uci(), "e5d6");
        // the bypassed pawn is gone
        assert_eq!(after.piece_at(square(3, 4)), None);
    }

    #[test]
    fn promotion_both_spellings() {
        let board = BoardState::from_fen("8/P6k/8/8/8/8/7K/8 w - - 0 1").unwrap();
        assert_eq!(board.parse_san("a8=Q").unwrap().uci(), "a7a8q");
        assert_eq!(board.parse_san("a8Q").unwrap().uci(), "a7a8q");
        assert_eq!(board.parse_san("a8=N").unwrap().uci(), "a7a8n");
    }

    #[test]
    fn fools_mate_is_checkmate() {
        let mut b = BoardState::default();
        for san in ["f3", "e5", "g4", "Qh4#"] {
            b = b.apply_san(san).unwrap().0;
        }
        assert!(b.is_checkmate());
        assert!(!b.is_stalemate());
    }

    #[test]
    fn stalemate_detected() {
        let board = BoardState::from_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1").unwrap();
        assert!(board.is_stalemate());
        assert!(!board.is_checkmate());
    }

    #[test]
    fn position_key_drops_counters() {
        let board = BoardState::default();
        let after = board.apply_san("Nf3").unwrap().0.apply_san("Nf6").unwrap().0;
        assert!(!after.position_key().contains(" 2"));
        assert_eq!(after.position_key().split(' ').count(), 4);
    }

    #[test]
    fn uci_round_trip() {
        let mv = Move { from: square(4, 1), to: square(4, 3), promotion: None };
        assert_eq!(Move::from_uci(&mv.uci()).unwrap(), mv);
        let promo = Move { from: square(0, 6), to: square(0, 7), promotion: Some(Piece::Queen) };
        assert_eq!(Move::from_uci("a7a8q").unwrap(), promo);
        assert!(Move::from_uci("zz11").is_none());
    }
}
