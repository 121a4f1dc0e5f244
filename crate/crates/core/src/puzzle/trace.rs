//! Canonical bracket text format for move lists.
//!
//! ```text
//! trace   := ("moves" "=")? "[" (move ("," move)*)? "]"
//! hanoi   := "[" int "," int "," int "]"          disk, from peg, to peg
//! checker := "[" int "," int "]"                  from cell, to cell
//! blocks  := "[" int "," int "]"                  from stack, to stack
//! river   := "[" id ("," id)* "]"                 id = '"' [aA][0-9]+ '"'
//! ```
//!
//! ASCII whitespace is allowed between any two tokens.

use std::fmt;

use super::{Individual, Move, Passengers, PuzzleKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub kind: PuzzleKind,
    pub moves: Vec<Move>,
}

impl Trace {
    pub fn new(kind: PuzzleKind, moves: Vec<Move>) -> Self {
        debug_assert!(moves.iter().all(|m| m.kind() == kind));
        Trace { kind, moves }
    }

    pub fn empty(kind: PuzzleKind) -> Self {
        Trace { kind, moves: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_trace(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {position}: expected {expected}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

pub fn format_move(mv: &Move) -> String {
    match mv {
        Move::Hanoi { disk, from, to } => format!("[{disk},{from},{to}]"),
        Move::Checker { from, to } | Move::Blocks { from, to } => format!("[{from},{to}]"),
        Move::River(p) => {
            let ids: Vec<String> = p.people().iter().map(|i| format!("\"{i}\"")).collect();
            format!("[{}]", ids.join(","))
        }
    }
}

pub fn format_trace(trace: &Trace) -> String {
    let mut out = String::with_capacity(trace.moves.len() * 8 + 2);
    out.push('[');
    for (i, mv) in trace.moves.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format_move(mv));
    }
    out.push(']');
    out
}

pub fn parse_trace(kind: PuzzleKind, text: &str) -> Result<Trace, ParseError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.rest().starts_with(b"moves") {
        p.pos += 5;
        p.skip_ws();
        p.expect(b'=', "`=` after `moves`")?;
        p.skip_ws();
    }
    p.expect(b'[', "`[` opening the move list")?;
    p.skip_ws();
    let mut moves = Vec::new();
    if p.peek() == Some(b']') {
        p.pos += 1;
    } else {
        loop {
            moves.push(p.parse_move(kind)?);
            p.skip_ws();
            match p.peek() {
                Some(b',') => {
                    p.pos += 1;
                    p.skip_ws();
                }
                Some(b']') => {
                    p.pos += 1;
                    break;
                }
                _ => return Err(p.error("`,` or `]` after a move")),
            }
        }
    }
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("end of input"));
    }
    Ok(Trace { kind, moves })
}

/// Parses a single move such as `[1,0,2]` or `["a1","A1"]`.
pub fn parse_move(kind: PuzzleKind, text: &str) -> Result<Move, ParseError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0 };
    p.skip_ws();
    let mv = p.parse_move(kind)?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.error("end of input"));
    }
    Ok(mv)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &[u8] {
        &self.bytes[self.pos..]
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError { position: self.pos, expected: expected.to_string() }
    }

    fn expect(&mut self, byte: u8, expected: &str) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn int(&mut self) -> Result<u32, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("an integer"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        digits.parse().map_err(|_| ParseError {
            position: start,
            expected: "an integer that fits in 32 bits".to_string(),
        })
    }

    fn comma(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        self.expect(b',', "`,`")?;
        self.skip_ws();
        Ok(())
    }

    fn parse_move(&mut self, kind: PuzzleKind) -> Result<Move, ParseError> {
        self.expect(b'[', "`[` opening a move")?;
        self.skip_ws();
        let mv = match kind {
            PuzzleKind::Hanoi => {
                let disk = self.int()?;
                self.comma()?;
                let from = self.int()?;
                self.comma()?;
                let to = self.int()?;
                Move::Hanoi { disk, from, to }
            }
            PuzzleKind::Checker => {
                let from = self.int()?;
                self.comma()?;
                let to = self.int()?;
                Move::Checker { from, to }
            }
            PuzzleKind::Blocks => {
                let from = self.int()?;
                self.comma()?;
                let to = self.int()?;
                Move::Blocks { from, to }
            }
            PuzzleKind::River => {
                let mut people = vec![self.individual()?];
                loop {
                    self.skip_ws();
                    if self.peek() != Some(b',') {
                        break;
                    }
                    self.pos += 1;
                    self.skip_ws();
                    people.push(self.individual()?);
                }
                Move::River(Passengers::new(people))
            }
        };
        self.skip_ws();
        self.expect(b']', "`]` closing a move")?;
        Ok(mv)
    }

    fn individual(&mut self) -> Result<Individual, ParseError> {
        self.expect(b'"', "a quoted individual id")?;
        let make: fn(u32) -> Individual = match self.peek() {
            Some(b'a') => Individual::actor,
            Some(b'A') => Individual::agent,
            _ => return Err(self.error("`a` or `A` starting an individual id")),
        };
        self.pos += 1;
        let index = self.int()?;
        self.expect(b'"', "closing `\"` of an individual id")?;
        Ok(make(index))
    }
}
