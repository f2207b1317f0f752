use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{EdgeId, Partition, Vertex, VertexSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    pub fn new(id: u32, u: Vertex, v: Vertex) -> Self {
        Edge {
            id: EdgeId(id),
            u,
            v,
        }
    }

    /// Exactly one endpoint in `s`.
    pub fn crosses(&self, s: &VertexSet) -> bool {
        s.contains(&self.u) != s.contains(&self.v)
    }

    /// Both endpoints in `s`.
    pub fn inside(&self, s: &VertexSet) -> bool {
        s.contains(&self.u) && s.contains(&self.v)
    }
}

/// Undirected multigraph on vertices `0..n` whose edges carry stable ids.
///
/// Ids survive every minor operation, so a point indexed by edge id can be
/// restricted to a minor by filtering on the surviving ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

/// A graph derived from another one together with the vertex correspondence.
#[derive(Debug, Clone)]
pub struct Minor {
    pub graph: Graph,
    /// Old vertex -> new vertex, `None` when the vertex was removed.
    pub image: Vec<Option<Vertex>>,
    /// New vertex -> the old vertices it stands for.
    pub preimage: Vec<VertexSet>,
}

impl Minor {
    /// Maps a set of new vertices back to the union of their preimages.
    pub fn lift(&self, s: &VertexSet) -> VertexSet {
        s.iter()
            .flat_map(|&v| self.preimage[v].iter().copied())
            .collect()
    }
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

impl Graph {
    pub fn new(n: usize, mut edges: Vec<Edge>) -> Result<Self> {
        edges.sort_by_key(|e| e.id);
        for pair in edges.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::input(format!("duplicate edge id {}", pair[0].id)));
            }
        }
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::input(format!(
                    "edge {} references a vertex outside 0..{n}",
                    e.id
                )));
            }
            if e.u == e.v {
                return Err(Error::input(format!("edge {} is a self-loop", e.id)));
            }
        }
        Ok(Graph { n, edges })
    }

    /// Edges get ids `0, 1, 2, ...` in the order given.
    pub fn from_pairs(n: usize, pairs: &[(Vertex, Vertex)]) -> Result<Self> {
        let edges = pairs
            .iter()
            .enumerate()
            .map(|(i, &(u, v))| Edge::new(i as u32, u, v))
            .collect();
        Graph::new(n, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> VertexSet {
        (0..self.n).collect()
    }

    /// Edges in ascending id order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&id, |e| e.id)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn edge_ids(&self) -> BTreeSet<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn check_vertices(&self, s: &VertexSet) -> Result<()> {
        match s.iter().find(|&&v| v >= self.n) {
            Some(v) => Err(Error::input(format!(
                "vertex {v} is not in the graph (n = {})",
                self.n
            ))),
            None => Ok(()),
        }
    }

    pub fn components(&self) -> Vec<VertexSet> {
        let mut ds = DisjointSets::new(self.n);
        for e in &self.edges {
            ds.union(e.u, e.v);
        }
        let mut comps: BTreeMap<usize, VertexSet> = BTreeMap::new();
        for v in 0..self.n {
            comps.entry(ds.find(v)).or_default().insert(v);
        }
        comps.into_values().collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    /// δ(S): edges with exactly one endpoint in `s`.
    pub fn cut_edges(&self, s: &VertexSet) -> Result<BTreeSet<EdgeId>> {
        self.check_vertices(s)?;
        Ok(self.cut_edges_unchecked(s))
    }

    pub(crate) fn cut_edges_unchecked(&self, s: &VertexSet) -> BTreeSet<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.crosses(s))
            .map(|e| e.id)
            .collect()
    }

    /// E(S): edges with both endpoints in `s`.
    pub fn inner_edges(&self, s: &VertexSet) -> BTreeSet<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.inside(s))
            .map(|e| e.id)
            .collect()
    }

    /// G[S], relabelled densely in increasing vertex order.
    pub fn induced(&self, s: &VertexSet) -> Result<Minor> {
        self.check_vertices(s)?;
        if s.is_empty() {
            return Err(Error::input("induced subgraph of an empty vertex set"));
        }
        let mut image = vec![None; self.n];
        let mut preimage = Vec::with_capacity(s.len());
        for (new, &old) in s.iter().enumerate() {
            image[old] = Some(new);
            preimage.push(VertexSet::from([old]));
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| match (image[e.u], image[e.v]) {
                (Some(u), Some(v)) => Some(Edge { id: e.id, u, v }),
                _ => None,
            })
            .collect();
        Ok(Minor {
            graph: Graph { n: s.len(), edges },
            image,
            preimage,
        })
    }

    /// Contracts each block to a single vertex. Edges inside a block become
    /// loops and are dropped; parallel edges keep their ids.
    pub fn contract_sets(&self, blocks: &[VertexSet]) -> Result<Minor> {
        let mut owner: Vec<Option<usize>> = vec![None; self.n];
        for (b, block) in blocks.iter().enumerate() {
            self.check_vertices(block)?;
            if block.is_empty() {
                return Err(Error::input("cannot contract an empty block"));
            }
            for &v in block {
                if owner[v].replace(b).is_some() {
                    return Err(Error::input(format!(
                        "vertex {v} appears in two contraction blocks"
                    )));
                }
            }
        }
        let mut image = vec![None; self.n];
        let mut preimage: Vec<VertexSet> = Vec::new();
        let mut block_label: Vec<Option<usize>> = vec![None; blocks.len()];
        for v in 0..self.n {
            let label = match owner[v] {
                Some(b) => *block_label[b].get_or_insert_with(|| {
                    preimage.push(blocks[b].clone());
                    preimage.len() - 1
                }),
                None => {
                    preimage.push(VertexSet::from([v]));
                    preimage.len() - 1
                }
            };
            image[v] = Some(label);
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                let (u, v) = (image[e.u].unwrap(), image[e.v].unwrap());
                (u != v).then_some(Edge { id: e.id, u, v })
            })
            .collect();
        Ok(Minor {
            graph: Graph {
                n: preimage.len(),
                edges,
            },
            image,
            preimage,
        })
    }

    /// δ(P): edges whose endpoints lie in two different blocks. Edges with an
    /// endpoint outside the ground set of `p` are ignored.
    pub fn delta_partition(&self, p: &Partition) -> BTreeSet<EdgeId> {
        let mut block = vec![None; self.n];
        for (i, b) in p.blocks().iter().enumerate() {
            for &v in b {
                if v < self.n {
                    block[v] = Some(i);
                }
            }
        }
        self.edges
            .iter()
            .filter(|e| matches!((block[e.u], block[e.v]), (Some(a), Some(b)) if a != b))
            .map(|e| e.id)
            .collect()
    }

    /// Same vertex set, with the given edges removed.
    pub fn without_edges(&self, ids: &BTreeSet<EdgeId>) -> Graph {
        Graph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .filter(|e| !ids.contains(&e.id))
                .cloned()
                .collect(),
        }
    }

    /// Same vertex set, keeping only the given edges.
    pub fn edge_subgraph(&self, ids: &BTreeSet<EdgeId>) -> Graph {
        Graph {
            n: self.n,
            edges: self
                .edges
                .iter()
                .filter(|e| ids.contains(&e.id))
                .cloned()
                .collect(),
        }
    }

    /// True iff `ids` are edges of this graph forming a spanning tree.
    pub fn is_spanning_tree(&self, ids: &BTreeSet<EdgeId>) -> bool {
        if self.n == 0 || ids.len() != self.n - 1 {
            return false;
        }
        let mut ds = DisjointSets::new(self.n);
        for id in ids {
            match self.edge(*id) {
                Some(e) if ds.union(e.u, e.v) => {}
                _ => return false,
            }
        }
        true
    }
}
