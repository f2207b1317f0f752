use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{SetId, VertexSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaminarSet {
    pub id: SetId,
    #[serde(rename = "set")]
    pub members: VertexSet,
    /// Crossing bound b_S; `None` means unconstrained.
    pub bound: Option<u64>,
}

impl LaminarSet {
    pub fn new(id: u32, members: impl IntoIterator<Item = usize>, bound: Option<u64>) -> Self {
        LaminarSet {
            id: SetId(id),
            members: members.into_iter().collect(),
            bound,
        }
    }
}

/// Two members of a family that neither nest nor are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaminarViolation {
    pub first: SetId,
    pub second: SetId,
}

/// Pairwise check of S ∩ T ∈ {∅, S, T}; returns the first crossing pair in
/// input order.
pub fn validate_laminar(sets: &[LaminarSet]) -> std::result::Result<(), LaminarViolation> {
    for (i, s) in sets.iter().enumerate() {
        for t in &sets[i + 1..] {
            if crossing(&s.members, &t.members) {
                return Err(LaminarViolation {
                    first: s.id,
                    second: t.id,
                });
            }
        }
    }
    Ok(())
}

pub(crate) fn crossing(s: &VertexSet, t: &VertexSet) -> bool {
    let common = s.intersection(t).count();
    common != 0 && common != s.len() && common != t.len()
}

/// A laminar family of vertex sets with optional integer crossing bounds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaminarFamily {
    sets: Vec<LaminarSet>,
}

impl LaminarFamily {
    pub fn new(mut sets: Vec<LaminarSet>) -> Result<Self> {
        sets.sort_by_key(|s| s.id);
        for pair in sets.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::input(format!("duplicate set id {}", pair[0].id)));
            }
        }
        if let Some(s) = sets.iter().find(|s| s.members.is_empty()) {
            return Err(Error::input(format!("set {} is empty", s.id)));
        }
        let distinct: BTreeSet<&VertexSet> = sets.iter().map(|s| &s.members).collect();
        if distinct.len() != sets.len() {
            return Err(Error::input("family contains the same vertex set twice"));
        }
        validate_laminar(&sets).map_err(|v| {
            Error::input(format!("sets {} and {} cross", v.first, v.second))
        })?;
        Ok(LaminarFamily { sets })
    }

    pub fn empty() -> Self {
        LaminarFamily::default()
    }

    /// Members in ascending id order.
    pub fn sets(&self) -> &[LaminarSet] {
        &self.sets
    }

    pub fn iter(&self) -> impl Iterator<Item = &LaminarSet> {
        self.sets.iter()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, id: SetId) -> Option<&LaminarSet> {
        self.sets
            .binary_search_by_key(&id, |s| s.id)
            .ok()
            .map(|i| &self.sets[i])
    }

    pub fn find_members(&self, members: &VertexSet) -> Option<&LaminarSet> {
        self.sets.iter().find(|s| &s.members == members)
    }

    pub fn next_id(&self) -> SetId {
        SetId(self.sets.last().map_or(0, |s| s.id.0 + 1))
    }

    pub fn check_ground(&self, n: usize) -> Result<()> {
        for s in &self.sets {
            if let Some(v) = s.members.iter().find(|&&v| v >= n) {
                return Err(Error::input(format!(
                    "set {} contains vertex {v} outside 0..{n}",
                    s.id
                )));
            }
        }
        Ok(())
    }

    /// The family with the ground set `0..n` present; it is added with no
    /// bound when missing.
    pub fn with_ground(&self, n: usize) -> Self {
        let ground: VertexSet = (0..n).collect();
        if self.find_members(&ground).is_some() {
            return self.clone();
        }
        let mut sets = self.sets.clone();
        sets.push(LaminarSet {
            id: self.next_id(),
            members: ground,
            bound: None,
        });
        LaminarFamily { sets }
    }

    /// Members ordered children-first: by size, then smallest vertex, then id.
    pub fn bottom_up(&self) -> Vec<&LaminarSet> {
        let mut order: Vec<&LaminarSet> = self.sets.iter().collect();
        order.sort_by_key(|s| (s.members.len(), s.members.first().copied(), s.id));
        order
    }

    /// The maximal members that are proper subsets of `s`.
    pub fn maximal_proper_subsets(&self, s: &VertexSet) -> Vec<&LaminarSet> {
        let inside: Vec<&LaminarSet> = self
            .sets
            .iter()
            .filter(|t| t.members.len() < s.len() && t.members.is_subset(s))
            .collect();
        inside
            .iter()
            .filter(|t| {
                !inside
                    .iter()
                    .any(|u| u.members.len() > t.members.len() && t.members.is_subset(&u.members))
            })
            .copied()
            .collect()
    }

    pub fn with_bounds(&self, bound: impl Fn(&LaminarSet) -> Option<u64>) -> Self {
        LaminarFamily {
            sets: self
                .sets
                .iter()
                .map(|s| LaminarSet {
                    bound: bound(s),
                    ..s.clone()
                })
                .collect(),
        }
    }
}
