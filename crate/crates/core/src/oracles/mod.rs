//! Exact separation for the spanning-tree polytope, its dominant and matroid
//! base polytopes, plus the derived well-connectedness test.
//!
//! Everything rests on one primitive: greedily raising a point z ≤ w inside
//! the forest polytope one edge at a time. The room left for edge uv is
//! min over S ⊇ {u,v} of |S| − 1 − z(E(S)), found with one min cut. Sets
//! that become tight are merged; at the end the merged blocks form a
//! partition P minimizing w(δ(P)) − (|P| − 1), and that minimum equals
//! z(E) − (n − 1).

mod flow;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lp::{Relation, Row, RowKind, SeparationOracle};
use crate::matroid::{EdgeSet, GraphicMatroid, Leaf, Matroid, PartitionMatroid};
use crate::model::{DisjointSets, EdgeId, FracPoint, Graph, Partition, VertexSet};
use crate::Rational;

pub(crate) use flow::FlowNetwork;

/// Generic matroid summands above this size are rejected by the
/// enumeration-based separation.
pub const GENERIC_LEAF_CAP: usize = 20;

/// Multigraph on `0..n` that may contain loops.
struct Multigraph {
    n: usize,
    edges: Vec<(EdgeId, usize, usize)>,
}

impl Multigraph {
    fn from_graph(g: &Graph) -> Self {
        Multigraph {
            n: g.vertex_count(),
            edges: g.edges().iter().map(|e| (e.id, e.u, e.v)).collect(),
        }
    }

    fn from_graphic(m: &GraphicMatroid) -> Self {
        Multigraph {
            n: m.vertex_count(),
            edges: m.edges().iter().map(|(&e, &(u, v))| (e, u, v)).collect(),
        }
    }

    /// 2 · min over S ⊇ forced of (|S| − z(E(S))), and the smallest minimizer.
    fn min_excess(&self, z: &[Rational], forced: &[usize]) -> (Rational, VertexSet) {
        let (s, t) = (self.n, self.n + 1);
        let mut degree = vec![Rational::zero(); self.n];
        for (i, &(_, u, v)) in self.edges.iter().enumerate() {
            if u != v && !z[i].is_zero() {
                degree[u] += &z[i];
                degree[v] += &z[i];
            }
        }
        let mut net = FlowNetwork::new(self.n + 2);
        let two = Rational::from_integer(2);
        let mut negative_total = Rational::zero();
        let mut big = Rational::one();
        for (v, d) in degree.iter().enumerate() {
            let a = &two - d;
            if a.is_negative() {
                negative_total -= &a;
                net.add_arc(s, v, -&a);
            } else {
                net.add_arc(v, t, a.clone());
            }
            big += a.abs();
        }
        for (i, &(_, u, v)) in self.edges.iter().enumerate() {
            if u != v {
                net.add_undirected(u, v, z[i].clone());
                big += &z[i];
            }
        }
        for &f in forced {
            net.add_arc(s, f, big.clone());
        }
        let cut = net.max_flow(s, t);
        let side = net.source_side(s);
        let set = (0..self.n).filter(|&v| side[v]).collect();
        (cut - negative_total, set)
    }

    /// Greedy maximal z ≤ w in the forest polytope, in edge order, with the
    /// partition into maximal tight sets.
    fn saturate(&self, w: &[Rational]) -> (Vec<Rational>, Partition) {
        let mut z = vec![Rational::zero(); self.edges.len()];
        let mut ds = DisjointSets::new(self.n);
        let two = Rational::from_integer(2);
        for (i, &(_, u, v)) in self.edges.iter().enumerate() {
            if u == v || w[i].is_zero() {
                continue;
            }
            let (excess, set) = self.min_excess(&z, &[u, v]);
            let room = &excess / &two - Rational::one();
            if room <= w[i] {
                z[i] = room;
                let first = *set.first().expect("forced vertices are on the source side");
                for &x in &set {
                    ds.union(first, x);
                }
            } else {
                z[i] = w[i].clone();
            }
        }
        let mut blocks: BTreeMap<usize, VertexSet> = BTreeMap::new();
        for v in 0..self.n {
            blocks.entry(ds.find(v)).or_default().insert(v);
        }
        let p = Partition::from_blocks(blocks.into_values().collect())
            .expect("union-find classes are disjoint and nonempty");
        (z, p)
    }

    fn weights(&self, w: &FracPoint) -> Vec<Rational> {
        self.edges.iter().map(|&(e, _, _)| w.get(e)).collect()
    }
}

fn check_nonnegative(w: &FracPoint) -> Result<()> {
    match w.iter().find(|(_, v)| v.is_negative()) {
        Some((e, v)) => Err(Error::input(format!("weight {v} on edge {e} is negative"))),
        None => Ok(()),
    }
}

/// A partition P of V(g) minimizing w(δ(P)) − (|P| − 1), with that minimum.
/// The value is never positive.
pub fn min_partition(g: &Graph, w: &FracPoint) -> Result<(Partition, Rational)> {
    if g.vertex_count() == 0 {
        return Err(Error::input("partition problem on a graph with no vertices"));
    }
    check_nonnegative(w)?;
    let mg = Multigraph::from_graph(g);
    let (z, p) = mg.saturate(&mg.weights(w));
    let total: Rational = z.iter().sum();
    let value = total - Rational::from(g.vertex_count() - 1);
    debug_assert_eq!(
        value,
        w.sum(&g.delta_partition(&p)) - Rational::from(p.len() - 1)
    );
    Ok((p, value))
}

/// `None` when w lies in the dominant of the spanning-tree polytope, else a
/// partition with w(δ(P)) < |P| − 1.
pub fn separate_dominant(g: &Graph, w: &FracPoint) -> Result<Option<Partition>> {
    let (p, value) = min_partition(g, w)?;
    Ok(value.is_negative().then_some(p))
}

/// A vertex set S maximizing x(E(S)) − (|S| − 1) when that is positive.
pub fn separate_forest(g: &Graph, x: &FracPoint) -> Result<Option<VertexSet>> {
    check_nonnegative(x)?;
    let mg = Multigraph::from_graph(g);
    let z = mg.weights(x);
    let two = Rational::from_integer(2);
    let mut best: Option<(Rational, VertexSet)> = None;
    for r in 0..g.vertex_count() {
        let (excess, set) = mg.min_excess(&z, &[r]);
        let violation = Rational::one() - &excess / &two;
        if violation.is_positive() && best.as_ref().is_none_or(|(b, _)| violation > *b) {
            best = Some((violation, set));
        }
    }
    Ok(best.map(|(_, s)| s))
}

/// How a point fails to lie in a matroid base polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseViolation {
    /// x(C) − rank(C) = amount > 0, maximal over all C.
    Excess {
        set: EdgeSet,
        rank: usize,
        amount: Rational,
    },
    /// x(E) falls short of rank(E) by `amount`.
    Deficit { rank: usize, amount: Rational },
}

impl BaseViolation {
    pub fn to_row(&self, ground: &EdgeSet) -> Row {
        match self {
            BaseViolation::Excess { set, rank, .. } => Row::sum(
                format!("rank_{}", join_ids(set)),
                RowKind::Rank,
                set,
                Relation::Le,
                Rational::from(*rank),
            ),
            BaseViolation::Deficit { rank, .. } => Row::sum(
                "rank_ground",
                RowKind::Rank,
                ground,
                Relation::Ge,
                Rational::from(*rank),
            ),
        }
    }
}

fn join_ids(set: &EdgeSet) -> String {
    set.iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join("_")
}

fn graphic_excess(m: &GraphicMatroid, x: &FracPoint) -> (Rational, EdgeSet) {
    let mg = Multigraph::from_graphic(m);
    let w = mg.weights(x);
    let (z, p) = mg.saturate(&w);
    let amount = w.iter().sum::<Rational>() - z.iter().sum::<Rational>();
    let mut block = vec![0; mg.n];
    for (i, b) in p.blocks().iter().enumerate() {
        for &v in b {
            block[v] = i;
        }
    }
    let set = mg
        .edges
        .iter()
        .filter(|&&(_, u, v)| block[u] == block[v])
        .map(|&(e, _, _)| e)
        .collect();
    (amount, set)
}

fn partition_excess(m: &PartitionMatroid, x: &FracPoint) -> (Rational, EdgeSet) {
    let one = Rational::one();
    let mut amount = Rational::zero();
    let mut set = EdgeSet::new();
    for (block, cap) in m.blocks() {
        // either every element (rank capped) or only those above 1
        let whole = x.sum(block) - Rational::from(*cap);
        let above: EdgeSet = block.iter().copied().filter(|&e| x.get(e) > one).collect();
        let partial: Rational = above.iter().map(|&e| x.get(e) - &one).sum();
        if whole >= partial && whole.is_positive() {
            amount += whole;
            set.extend(block.iter().copied());
        } else if partial.is_positive() {
            amount += partial;
            set.extend(above);
        }
    }
    (amount, set)
}

fn generic_excess(m: &Matroid, x: &FracPoint) -> Result<(Rational, EdgeSet)> {
    let ground: Vec<EdgeId> = m.ground().iter().copied().collect();
    if ground.len() > GENERIC_LEAF_CAP {
        return Err(Error::TooLarge {
            what: format!("rank-oracle summand with {} elements", ground.len()),
            cap: GENERIC_LEAF_CAP as u64,
        });
    }
    let mut best = (Rational::zero(), EdgeSet::new());
    for mask in 1u32..1 << ground.len() {
        let c: EdgeSet = (0..ground.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ground[i])
            .collect();
        let amount = x.sum(&c) - Rational::from(m.rank_within(&c));
        if amount > best.0 {
            best = (amount, c);
        }
    }
    Ok(best)
}

/// Separation over the base polytope of `m`, one summand at a time. The
/// union of the per-summand maximizers is a maximally violated set.
pub fn separate_base_polytope(m: &Matroid, x: &FracPoint) -> Result<Option<BaseViolation>> {
    check_nonnegative(x)?;
    let mut amount = Rational::zero();
    let mut set = EdgeSet::new();
    for leaf in m.leaves() {
        let (a, c) = match leaf {
            Leaf::Graphic(g) => graphic_excess(g, x),
            Leaf::Partition(p) => partition_excess(p, x),
            Leaf::Generic(g) => generic_excess(g, x)?,
        };
        if a.is_positive() {
            amount += a;
            set.extend(c);
        }
    }
    if amount.is_positive() {
        let rank = m.rank_within(&set);
        return Ok(Some(BaseViolation::Excess { set, rank, amount }));
    }
    let rank = m.full_rank();
    let total = x.sum(m.ground());
    if total < Rational::from(rank) {
        return Ok(Some(BaseViolation::Deficit {
            rank,
            amount: Rational::from(rank) - total,
        }));
    }
    Ok(None)
}

/// True iff η·x restricted to E(S) dominates a spanning-tree point of G[S].
pub fn is_well_connected(g: &Graph, x: &FracPoint, s: &VertexSet, eta: &Rational) -> Result<bool> {
    let minor = g.induced(s)?;
    let w = x.restrict(&minor.graph.edge_ids()).scaled(eta);
    Ok(separate_dominant(&minor.graph, &w)?.is_none())
}

/// A point z ≤ y of the spanning-tree polytope of `g`.
pub fn dominated_base_point(g: &Graph, y: &FracPoint) -> Result<FracPoint> {
    if g.vertex_count() == 0 {
        return Err(Error::input("spanning-tree point of a graph with no vertices"));
    }
    check_nonnegative(y)?;
    let mg = Multigraph::from_graph(g);
    let (z, p) = mg.saturate(&mg.weights(y));
    let total: Rational = z.iter().sum();
    if total != Rational::from(g.vertex_count() - 1) {
        let blocks: Vec<String> = p.blocks().iter().map(|b| format!("{b:?}")).collect();
        return Err(Error::precondition(
            "dominated_base_point",
            format!(
                "point is not in the dominant; partition {} is violated",
                blocks.join(" ")
            ),
        ));
    }
    Ok(mg.edges.iter().map(|&(e, _, _)| e).zip(z).collect())
}

/// Membership in the spanning-tree polytope of `g`: x ≥ 0, x(E) = n − 1
/// and no violated forest row.
pub fn in_tree_polytope(g: &Graph, x: &FracPoint) -> Result<bool> {
    if !x.is_nonnegative() || g.vertex_count() == 0 {
        return Ok(false);
    }
    if x.sum(&g.edge_ids()) != Rational::from(g.vertex_count() - 1) {
        return Ok(false);
    }
    Ok(separate_forest(g, x)?.is_none())
}

/// Global minimum cut size of `g` with one side attaining it. `None` for
/// graphs with fewer than two vertices.
pub fn edge_connectivity(g: &Graph) -> Option<(usize, VertexSet)> {
    let n = g.vertex_count();
    let mut best: Option<(Rational, VertexSet)> = None;
    for t in 1..n {
        let mut net = FlowNetwork::new(n);
        for e in g.edges() {
            net.add_undirected(e.u, e.v, Rational::one());
        }
        let value = net.max_flow(0, t);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            let side = net.source_side(0);
            best = Some((value, (0..n).filter(|&v| side[v]).collect()));
        }
    }
    best.map(|(v, s)| (v.to_i64().expect("integral cut") as usize, s))
}

/// Forest rows x(E(S)) ≤ |S| − 1.
pub struct ForestOracle<'a> {
    pub graph: &'a Graph,
}

impl SeparationOracle for ForestOracle<'_> {
    fn name(&self) -> &str {
        "forest"
    }

    fn separate(&self, x: &FracPoint) -> Result<Option<Row>> {
        Ok(separate_forest(self.graph, x)?.map(|s| {
            let label = s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_");
            Row::sum(
                format!("forest_{label}"),
                RowKind::Rank,
                &self.graph.inner_edges(&s),
                Relation::Le,
                Rational::from(s.len() - 1),
            )
        }))
    }
}

/// Base-polytope rows of a matroid.
pub struct BaseOracle<'a> {
    pub matroid: &'a Matroid,
}

impl SeparationOracle for BaseOracle<'_> {
    fn name(&self) -> &str {
        "base-polytope"
    }

    fn separate(&self, x: &FracPoint) -> Result<Option<Row>> {
        Ok(separate_base_polytope(self.matroid, x)?.map(|v| v.to_row(self.matroid.ground())))
    }
}
