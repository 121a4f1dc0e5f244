//! River crossing with `n` actor/agent couples and a boat of capacity `k`.
//!
//! A group is unsafe when it contains an actor `a_i` together with some agent
//! while `A_i` is absent. Every crossing is checked on the departure bank
//! after boarding, inside the boat, and on the arrival bank after unloading.

use std::cmp::Ordering;
use std::fmt;

use super::{IllegalMove, IllegalReason, Move};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bank {
    Left,
    Right,
}

impl Bank {
    pub fn as_str(self) -> &'static str {
        match self {
            Bank::Left => "left",
            Bank::Right => "right",
        }
    }

    pub fn opposite(self) -> Bank {
        match self {
            Bank::Left => Bank::Right,
            Bank::Right => Bank::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// `a1..aN`, the constrained member of a couple.
    Actor,
    /// `A1..AN`.
    Agent,
}

/// One person, identified as `a<i>` or `A<i>` with a 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Individual {
    pub role: Role,
    pub index: u32,
}

impl Individual {
    pub fn actor(index: u32) -> Self {
        Individual { role: Role::Actor, index }
    }

    pub fn agent(index: u32) -> Self {
        Individual { role: Role::Agent, index }
    }

    fn prefix(self) -> char {
        match self.role {
            Role::Actor => 'a',
            Role::Agent => 'A',
        }
    }
}

impl fmt::Display for Individual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.prefix(), self.index)
    }
}

// Ordered as their identifiers compare as ASCII strings ("A10" < "A2" < "a1").
impl Ord for Individual {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prefix()
            .cmp(&other.prefix())
            .then_with(|| self.index.to_string().cmp(&other.index.to_string()))
    }
}

impl PartialOrd for Individual {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The people on board for one crossing; sorted and de-duplicated.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Passengers(Vec<Individual>);

impl Passengers {
    pub fn new(mut people: Vec<Individual>) -> Self {
        people.sort();
        people.dedup();
        Passengers(people)
    }

    pub fn people(&self) -> &[Individual] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Actor and agent bitmasks; `None` if someone is outside `1..=n`.
    fn masks(&self, n: u32) -> Option<(u64, u64)> {
        let mut actors = 0u64;
        let mut agents = 0u64;
        for p in &self.0 {
            if p.index < 1 || p.index > n {
                return None;
            }
            let bit = 1u64 << (p.index - 1);
            match p.role {
                Role::Actor => actors |= bit,
                Role::Agent => agents |= bit,
            }
        }
        Some((actors, agents))
    }
}

/// Bank of every individual, packed as bitmasks (bit `i-1` set = on the right bank).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RiverState {
    pub n: u32,
    pub actors_right: u64,
    pub agents_right: u64,
    pub boat: Bank,
}

pub(crate) fn group_is_safe(actors: u64, agents: u64) -> bool {
    agents == 0 || actors & !agents == 0
}

fn full_mask(n: u32) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl RiverState {
    pub fn initial(n: u32) -> Self {
        RiverState { n, actors_right: 0, agents_right: 0, boat: Bank::Left }
    }

    pub fn is_goal(&self) -> bool {
        let all = full_mask(self.n);
        self.actors_right == all && self.agents_right == all
    }

    fn bank_masks(&self, bank: Bank) -> (u64, u64) {
        let all = full_mask(self.n);
        match bank {
            Bank::Right => (self.actors_right, self.agents_right),
            Bank::Left => (!self.actors_right & all, !self.agents_right & all),
        }
    }

    /// Everyone on `bank`, in canonical order.
    pub fn on_bank(&self, bank: Bank) -> Vec<Individual> {
        let (actors, agents) = self.bank_masks(bank);
        let mut out: Vec<Individual> = (1..=self.n)
            .filter(|i| actors >> (i - 1) & 1 == 1)
            .map(Individual::actor)
            .chain((1..=self.n).filter(|i| agents >> (i - 1) & 1 == 1).map(Individual::agent))
            .collect();
        out.sort();
        out
    }

    pub fn bank_of(&self, who: Individual) -> Bank {
        let mask = match who.role {
            Role::Actor => self.actors_right,
            Role::Agent => self.agents_right,
        };
        if mask >> (who.index - 1) & 1 == 1 {
            Bank::Right
        } else {
            Bank::Left
        }
    }

    pub(crate) fn apply(&mut self, capacity: u32, passengers: &Passengers) -> Result<(), IllegalMove> {
        if passengers.is_empty() || passengers.len() > capacity as usize {
            return Err(IllegalMove::new(
                IllegalReason::OverCapacity,
                format!("boat carries 1..={capacity}, got {}", passengers.len()),
            ));
        }
        let Some((boat_actors, boat_agents)) = passengers.masks(self.n) else {
            return Err(IllegalMove::new(
                IllegalReason::UnknownIndividual,
                format!("passengers must be in 1..={}", self.n),
            ));
        };
        let (dep_actors, dep_agents) = self.bank_masks(self.boat);
        if boat_actors & !dep_actors != 0 || boat_agents & !dep_agents != 0 {
            return Err(IllegalMove::new(
                IllegalReason::BoatOnOtherBank,
                format!("a passenger is not on the {} bank with the boat", self.boat.as_str()),
            ));
        }
        if !group_is_safe(dep_actors & !boat_actors, dep_agents & !boat_agents) {
            return Err(IllegalMove::new(
                IllegalReason::SafetyViolation,
                format!("{} bank left unsafe after boarding", self.boat.as_str()),
            ));
        }
        if !group_is_safe(boat_actors, boat_agents) {
            return Err(IllegalMove::new(IllegalReason::SafetyViolation, "boat group unsafe in transit"));
        }
        let (arr_actors, arr_agents) = self.bank_masks(self.boat.opposite());
        if !group_is_safe(arr_actors | boat_actors, arr_agents | boat_agents) {
            return Err(IllegalMove::new(
                IllegalReason::SafetyViolation,
                format!("{} bank unsafe after unloading", self.boat.opposite().as_str()),
            ));
        }
        self.actors_right ^= boat_actors;
        self.agents_right ^= boat_agents;
        self.boat = self.boat.opposite();
        Ok(())
    }

    pub fn legal_moves(&self, capacity: u32) -> Vec<Move> {
        let here = self.on_bank(self.boat);
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(capacity as usize);
        self.collect_groups(&here, 0, capacity as usize, &mut chosen, &mut out, capacity);
        out
    }

    fn collect_groups(
        &self,
        pool: &[Individual],
        start: usize,
        room: usize,
        chosen: &mut Vec<Individual>,
        out: &mut Vec<Move>,
        capacity: u32,
    ) {
        for i in start..pool.len() {
            chosen.push(pool[i]);
            let passengers = Passengers::new(chosen.clone());
            let mut probe = self.clone();
            if probe.apply(capacity, &passengers).is_ok() {
                out.push(Move::River(passengers));
            }
            if room > 1 {
                self.collect_groups(pool, i + 1, room - 1, chosen, out, capacity);
            }
            chosen.pop();
        }
    }
}
