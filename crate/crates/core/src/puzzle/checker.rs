use std::fmt;

use super::{IllegalMove, IllegalReason, Move};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Red,
    Blue,
    Empty,
}

impl Cell {
    fn symbol(self) -> char {
        match self {
            Cell::Red => 'R',
            Cell::Blue => 'B',
            Cell::Empty => '_',
        }
    }
}

/// A row of `2n + 1` cells. Red checkers move right, Blue checkers move left.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CheckerState {
    pub cells: Vec<Cell>,
}

impl fmt::Display for CheckerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.cells.iter().try_for_each(|c| write!(f, "{}", c.symbol()))
    }
}

impl CheckerState {
    pub fn initial(n: u32) -> Self {
        let n = n as usize;
        let mut cells = vec![Cell::Red; n];
        cells.push(Cell::Empty);
        cells.extend(std::iter::repeat_n(Cell::Blue, n));
        CheckerState { cells }
    }

    pub fn is_goal(&self, n: u32) -> bool {
        let n = n as usize;
        self.cells.len() == 2 * n + 1
            && self.cells[..n].iter().all(|&c| c == Cell::Blue)
            && self.cells[n] == Cell::Empty
            && self.cells[n + 1..].iter().all(|&c| c == Cell::Red)
    }

    pub fn empty_index(&self) -> usize {
        self.cells.iter().position(|&c| c == Cell::Empty).expect("board has one empty cell")
    }

    pub(crate) fn apply(&mut self, from: u32, to: u32) -> Result<(), IllegalMove> {
        let len = self.cells.len();
        let (from, to) = (from as usize, to as usize);
        if from >= len || to >= len {
            return Err(IllegalMove::new(
                IllegalReason::NotAdjacentOrJump,
                format!("index out of range 0..{len}"),
            ));
        }
        let piece = self.cells[from];
        if piece == Cell::Empty {
            return Err(IllegalMove::new(IllegalReason::EmptySource, format!("cell {from} is empty")));
        }
        if self.cells[to] != Cell::Empty {
            return Err(IllegalMove::new(
                IllegalReason::NotAdjacentOrJump,
                format!("target cell {to} is occupied"),
            ));
        }
        let forward = match piece {
            Cell::Red => to > from,
            Cell::Blue => to < from,
            Cell::Empty => unreachable!(),
        };
        if !forward {
            return Err(IllegalMove::new(
                IllegalReason::WrongDirection,
                format!("{:?} checker cannot move from {from} to {to}", piece),
            ));
        }
        match from.abs_diff(to) {
            1 => {}
            2 => {
                let over = self.cells[(from + to) / 2];
                if over == Cell::Empty || over == piece {
                    return Err(IllegalMove::new(
                        IllegalReason::NotAdjacentOrJump,
                        format!("jump from {from} must pass over an opposite-colour checker"),
                    ));
                }
            }
            d => {
                return Err(IllegalMove::new(
                    IllegalReason::NotAdjacentOrJump,
                    format!("distance {d} is neither a slide nor a jump"),
                ))
            }
        }
        self.cells.swap(from, to);
        Ok(())
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let e = self.empty_index();
        let mut out = Vec::new();
        let mut try_from = |from: usize| {
            let mut probe = self.clone();
            if probe.apply(from as u32, e as u32).is_ok() {
                out.push(Move::Checker { from: from as u32, to: e as u32 });
            }
        };
        for d in 1..=2 {
            if e >= d {
                try_from(e - d);
            }
            if e + d < self.cells.len() {
                try_from(e + d);
            }
        }
        out
    }
}
