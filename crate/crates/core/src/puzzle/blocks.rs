//! Blocks world on `n` table positions.
//!
//! A move lifts the top block of one stack onto another stack (possibly an
//! empty table position). Goal equality compares the multiset of non-empty
//! towers, so which table position a tower stands on does not matter.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{IllegalMove, IllegalReason, Move};
use crate::error::{Error, Result};

/// Initial and goal stacks, each listed bottom-to-top over block ids `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlocksConfig {
    pub initial: Vec<Vec<u32>>,
    pub goal: Vec<Vec<u32>>,
}

impl BlocksConfig {
    /// Two independent uniform stack assignments drawn from `seed`.
    pub fn generate(n: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let initial = random_stacks(n, &mut rng);
        let goal = random_stacks(n, &mut rng);
        BlocksConfig { initial, goal }
    }

    /// Checks both sides partition `1..=n` and pads them to `n` stacks.
    pub(crate) fn normalized(self, n: u32) -> Result<Self> {
        let fix = |stacks: Vec<Vec<u32>>, label: &str| -> Result<Vec<Vec<u32>>> {
            let mut seen: Vec<u32> = stacks.iter().flatten().copied().collect();
            seen.sort_unstable();
            if seen != (1..=n).collect::<Vec<_>>() {
                return Err(Error::invalid(format!("{label} stacks must partition blocks 1..={n}")));
            }
            let mut stacks = stacks;
            if stacks.len() > n as usize {
                stacks.retain(|s| !s.is_empty());
            }
            stacks.resize(n as usize, Vec::new());
            Ok(stacks)
        };
        Ok(BlocksConfig { initial: fix(self.initial, "initial")?, goal: fix(self.goal, "goal")? })
    }
}

fn random_stacks(n: u32, rng: &mut impl Rng) -> Vec<Vec<u32>> {
    let mut order: Vec<u32> = (1..=n).collect();
    order.shuffle(rng);
    let mut stacks = vec![Vec::new(); n as usize];
    for block in order {
        stacks[rng.gen_range(0..n as usize)].push(block);
    }
    stacks
}

fn towers(stacks: &[Vec<u32>]) -> Vec<&[u32]> {
    let mut t: Vec<&[u32]> = stacks.iter().filter(|s| !s.is_empty()).map(Vec::as_slice).collect();
    t.sort_unstable();
    t
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlocksState {
    pub stacks: Vec<Vec<u32>>,
}

impl BlocksState {
    pub fn from_config(cfg: &BlocksConfig) -> Self {
        BlocksState { stacks: cfg.initial.clone() }
    }

    pub fn is_goal(&self, cfg: &BlocksConfig) -> bool {
        towers(&self.stacks) == towers(&cfg.goal)
    }

    /// Non-empty towers sorted, empty positions after them.
    pub fn canonical(&self) -> Self {
        let mut stacks: Vec<Vec<u32>> = towers(&self.stacks).into_iter().map(<[u32]>::to_vec).collect();
        stacks.resize(self.stacks.len(), Vec::new());
        BlocksState { stacks }
    }

    pub(crate) fn apply(&mut self, from: u32, to: u32) -> Result<(), IllegalMove> {
        let count = self.stacks.len() as u32;
        if from >= count || to >= count {
            return Err(IllegalMove::new(
                IllegalReason::UnknownBlock,
                format!("stack index out of range 0..{count}"),
            ));
        }
        if from == to {
            return Err(IllegalMove::new(IllegalReason::SameStack, format!("stack {from} onto itself")));
        }
        let Some(block) = self.stacks[from as usize].pop() else {
            return Err(IllegalMove::new(IllegalReason::EmptyStack, format!("stack {from} is empty")));
        };
        self.stacks[to as usize].push(block);
        Ok(())
    }

    pub fn legal_moves(&self) -> Vec<Move> {
        let count = self.stacks.len() as u32;
        (0..count)
            .filter(|&f| !self.stacks[f as usize].is_empty())
            .flat_map(|from| (0..count).filter(move |&to| to != from).map(move |to| Move::Blocks { from, to }))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::PuzzleInstance;

    #[test]
    fn seeded_generation_is_a_function_of_the_seed() {
        let a = BlocksConfig::generate(8, 42);
        assert_eq!(a, BlocksConfig::generate(8, 42));
        assert_ne!(a, BlocksConfig::generate(8, 43));
        assert_eq!(a.initial.len(), 8);
        let mut all: Vec<u32> = a.goal.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn explicit_config_is_padded_and_checked() {
        let inst = PuzzleInstance::blocks_explicit(vec![vec![1, 2]], vec![vec![2, 1]]).unwrap();
        assert_eq!(inst.blocks_config().unwrap().initial, vec![vec![1, 2], vec![]]);
        assert!(PuzzleInstance::blocks_explicit(vec![vec![1, 1]], vec![vec![1, 2]]).is_err());
    }

    #[test]
    fn tower_positions_do_not_matter_for_goal() {
        let inst = PuzzleInstance::blocks_explicit(vec![vec![1, 2]], vec![vec![2, 1]]).unwrap();
        let cfg = inst.blocks_config().unwrap();
        assert!(BlocksState { stacks: vec![vec![], vec![2, 1]] }.is_goal(cfg));
        assert!(!BlocksState { stacks: vec![vec![1, 2], vec![]] }.is_goal(cfg));
    }

    #[test]
    fn stack_errors() {
        let mut s = BlocksState { stacks: vec![vec![1], vec![]] };
        assert_eq!(s.apply(1, 0).unwrap_err().reason, IllegalReason::EmptyStack);
        assert_eq!(s.apply(0, 0).unwrap_err().reason, IllegalReason::SameStack);
        assert_eq!(s.apply(0, 5).unwrap_err().reason, IllegalReason::UnknownBlock);
        s.apply(0, 1).unwrap();
        assert_eq!(s.stacks, vec![vec![], vec![1]]);
    }
}
