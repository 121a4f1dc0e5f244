use super::{IllegalMove, IllegalReason, Move};

/// Three pegs of disk ids listed bottom-to-top; disk 1 is the smallest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HanoiState {
    pub pegs: [Vec<u32>; 3],
}

impl HanoiState {
    pub fn initial(n: u32) -> Self {
        HanoiState { pegs: [(1..=n).rev().collect(), Vec::new(), Vec::new()] }
    }

    pub fn is_goal(&self, n: u32) -> bool {
        self.pegs[2].len() == n as usize
    }

    pub(crate) fn apply(&mut self, n: u32, disk: u32, from: u32, to: u32) -> Result<(), IllegalMove> {
        if from > 2 || to > 2 || from == to {
            return Err(IllegalMove::new(
                IllegalReason::WrongPeg,
                format!("pegs must be distinct and in 0..=2, got {from}->{to}"),
            ));
        }
        if disk < 1 || disk > n {
            return Err(IllegalMove::new(IllegalReason::WrongPeg, format!("no disk {disk}")));
        }
        let (from, to) = (from as usize, to as usize);
        let Some(&top) = self.pegs[from].last() else {
            return Err(IllegalMove::new(IllegalReason::EmptySource, format!("peg {from} is empty")));
        };
        if top != disk {
            return Err(IllegalMove::new(
                IllegalReason::WrongPeg,
                format!("disk {disk} is not on top of peg {from}"),
            ));
        }
        if let Some(&under) = self.pegs[to].last() {
            if under < disk {
                return Err(IllegalMove::new(
                    IllegalReason::LargerOnSmaller,
                    format!("disk {disk} onto disk {under}"),
                ));
            }
        }
        self.pegs[from].pop();
        self.pegs[to].push(disk);
        Ok(())
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        for from in 0..3 {
            let Some(&disk) = self.pegs[from].last() else { continue };
            for to in 0..3 {
                if to == from {
                    continue;
                }
                if self.pegs[to].last().is_none_or(|&under| under > disk) {
                    out.push(Move::Hanoi { disk, from: from as u32, to: to as u32 });
                }
            }
        }
        out
    }
}
