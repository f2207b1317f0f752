//! Graphs with minors, laminar families, fractional points and instances.

mod graph;
mod laminar;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub use graph::{Edge, Graph, Minor};
pub(crate) use graph::DisjointSets;
pub(crate) use laminar::crossing;
pub use laminar::{validate_laminar, LaminarFamily, LaminarSet, LaminarViolation};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Vertex = usize;
pub type VertexSet = BTreeSet<Vertex>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetId(pub u32);

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

/// Disjoint nonempty blocks, kept sorted by smallest member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<VertexSet>,
}

impl Partition {
    /// Blocks must be nonempty and pairwise disjoint; the ground set is their union.
    pub fn from_blocks(mut blocks: Vec<VertexSet>) -> Result<Self> {
        let mut seen = VertexSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::input("partition has an empty block"));
            }
            for &v in b {
                if !seen.insert(v) {
                    return Err(Error::input(format!("vertex {v} is in two blocks")));
                }
            }
        }
        blocks.sort_by_key(|b| *b.first().unwrap());
        Ok(Partition { blocks })
    }

    /// Like [`Partition::from_blocks`], also requiring the union to equal `ground`.
    pub fn new(blocks: Vec<VertexSet>, ground: &VertexSet) -> Result<Self> {
        let p = Self::from_blocks(blocks)?;
        if &p.ground() != ground {
            return Err(Error::input("partition blocks do not cover the ground set"));
        }
        Ok(p)
    }

    pub fn singletons(ground: &VertexSet) -> Self {
        Partition {
            blocks: ground.iter().map(|&v| VertexSet::from([v])).collect(),
        }
    }

    pub fn trivial(ground: &VertexSet) -> Self {
        Partition {
            blocks: vec![ground.clone()],
        }
    }

    pub fn blocks(&self) -> &[VertexSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ground(&self) -> VertexSet {
        self.blocks.iter().flatten().copied().collect()
    }

    pub fn block_of(&self, v: Vertex) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&v))
    }
}

/// Edge-indexed nonnegative rational vector. Missing coordinates read as 0.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FracPoint(BTreeMap<EdgeId, Rational>);

impl FracPoint {
    pub fn new() -> Self {
        FracPoint(BTreeMap::new())
    }

    pub fn characteristic(ids: &BTreeSet<EdgeId>) -> Self {
        ids.iter().map(|&e| (e, Rational::one())).collect()
    }

    pub fn uniform(ids: &BTreeSet<EdgeId>, value: &Rational) -> Self {
        ids.iter().map(|&e| (e, value.clone())).collect()
    }

    pub fn get(&self, e: EdgeId) -> Rational {
        self.0.get(&e).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, e: EdgeId, value: Rational) {
        self.0.insert(e, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, &Rational)> {
        self.0.iter().map(|(&e, v)| (e, v))
    }

    pub fn ids(&self) -> BTreeSet<EdgeId> {
        self.0.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// x(F).
    pub fn sum<'a>(&self, ids: impl IntoIterator<Item = &'a EdgeId>) -> Rational {
        let mut total = Rational::zero();
        for e in ids {
            if let Some(v) = self.0.get(e) {
                total += v;
            }
        }
        total
    }

    pub fn total(&self) -> Rational {
        self.0.values().sum()
    }

    /// x restricted to F.
    pub fn restrict(&self, ids: &BTreeSet<EdgeId>) -> Self {
        self.0
            .iter()
            .filter(|(e, _)| ids.contains(e))
            .map(|(&e, v)| (e, v.clone()))
            .collect()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        self.0.iter().map(|(&e, v)| (e, v * factor)).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.values().all(|v| !v.is_negative())
    }

    /// Coordinatewise `self <= other` over the union of supports.
    pub fn dominated_by(&self, other: &FracPoint) -> bool {
        self.0.iter().all(|(&e, v)| *v <= other.get(e))
            && other.0.iter().all(|(e, w)| self.0.contains_key(e) || !w.is_negative())
    }

    pub fn support(&self) -> BTreeSet<EdgeId> {
        self.0
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(&e, _)| e)
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.0.values().all(Rational::is_integer)
    }

    pub fn merge(&mut self, other: FracPoint) {
        self.0.extend(other.0);
    }
}

impl FromIterator<(EdgeId, Rational)> for FracPoint {
    fn from_iter<I: IntoIterator<Item = (EdgeId, Rational)>>(iter: I) -> Self {
        FracPoint(iter.into_iter().collect())
    }
}

pub fn default_eta() -> Rational {
    Rational::new(93, 20)
}

/// A laminar-constrained spanning tree problem.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub family: LaminarFamily,
    pub costs: BTreeMap<EdgeId, Rational>,
    pub eta: Rational,
}

impl Instance {
    pub fn new(
        graph: Graph,
        family: LaminarFamily,
        costs: BTreeMap<EdgeId, Rational>,
        eta: Rational,
    ) -> Result<Self> {
        let inst = Instance {
            graph,
            family,
            costs,
            eta,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.graph.is_connected() {
            return Err(Error::input("graph is not connected"));
        }
        if self.eta <= Rational::from_integer(2) {
            return Err(Error::input(format!("eta must exceed 2, got {}", self.eta)));
        }
        self.family.check_ground(self.graph.vertex_count())?;
        for e in self.graph.edges() {
            match self.costs.get(&e.id) {
                None => return Err(Error::input(format!("edge {} has no cost", e.id))),
                Some(c) if c.is_negative() => {
                    return Err(Error::input(format!("edge {} has negative cost", e.id)))
                }
                _ => {}
            }
        }
        if let Some(e) = self.costs.keys().find(|e| self.graph.edge(**e).is_none()) {
            return Err(Error::input(format!("cost given for unknown edge {e}")));
        }
        Ok(())
    }

    pub fn cost_of<'a>(&self, ids: impl IntoIterator<Item = &'a EdgeId>) -> Rational {
        ids.into_iter()
            .map(|e| self.costs.get(e).cloned().unwrap_or_default())
            .sum()
    }

    pub fn cost_of_point(&self, x: &FracPoint) -> Rational {
        x.iter()
            .map(|(e, v)| v * self.costs.get(&e).cloned().unwrap_or_default())
            .sum()
    }
}
