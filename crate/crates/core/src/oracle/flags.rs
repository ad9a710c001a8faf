use serde::{Deserialize, Serialize};

use super::{DomainSet, HiddenSets};
use crate::Result;

/// Membership predicates for the semi-classical toggle `U_{S̄^(l)}`: a query
/// with tag `i ∈ [l, d]` is flagged when its value lies in `S_i^(l)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagPack {
    level: usize,
    d: usize,
    sets: Vec<DomainSet>,
}

impl FlagPack {
    pub fn from_hidden(h: &HiddenSets) -> Self {
        Self {
            level: h.level(),
            d: h.d(),
            sets: (h.level()..=h.d()).map(|j| h.set(j).clone()).collect(),
        }
    }

    /// Arbitrary sets for layers `level..=d`, e.g. enlarged hidden sets.
    pub fn from_sets(level: usize, d: usize, sets: Vec<DomainSet>) -> Result<Self> {
        let h = HiddenSets::from_sets(level, d, sets)?;
        Ok(Self::from_hidden(&h))
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn set(&self, tag: usize) -> &DomainSet {
        &self.sets[tag - self.level]
    }

    /// Whether a query `(tag, value)` touches the hidden sets.
    pub fn hits(&self, tag: u64, value: u64) -> bool {
        let tag = tag as usize;
        tag >= self.level
            && tag <= self.d
            && self.sets[tag - self.level]
                .get(value as usize)
                .is_some_and(|b| *b)
    }
}

pub fn semiclassical_flag_sets(h: &HiddenSets) -> FlagPack {
    FlagPack::from_hidden(h)
}
