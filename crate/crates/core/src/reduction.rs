//! Replaces a laminar family by one whose members are all well-connected
//! with respect to η·x, and builds a point aligned with the new family that
//! is dominated by η·x.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{crossing, EdgeId, FracPoint, Graph, LaminarFamily, LaminarSet, Partition, SetId, VertexSet};
use crate::oracles::{dominated_base_point, in_tree_polytope, min_partition};
use crate::Rational;

/// One pass of the main loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub set: SetId,
    pub members: VertexSet,
    /// Maximal new-family sets inside `members`, contracted for this step.
    pub contracted: Vec<VertexSet>,
    /// Minimizing partition of `members`, uncontracted.
    pub partition: Vec<VertexSet>,
    pub value: Rational,
}

/// The new-family sets that replaced an input set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Replacement {
    pub set: SetId,
    pub members: VertexSet,
    pub blocks: Vec<SetId>,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    /// The new family; always contains the ground set.
    pub family: LaminarFamily,
    pub replacements: Vec<Replacement>,
    pub trace: Vec<ReductionStep>,
}

impl Reduction {
    pub fn replacement(&self, id: SetId) -> Option<&Replacement> {
        self.replacements.iter().find(|r| r.set == id)
    }
}

/// G[S] with the given disjoint subsets of S contracted. Returns the graph
/// and, per new vertex, the original vertices it stands for.
pub(crate) fn contracted_piece(g: &Graph, s: &VertexSet, children: &[&VertexSet]) -> Result<(Graph, Vec<VertexSet>)> {
    let induced = g.induced(s)?;
    let blocks: Vec<VertexSet> = children
        .iter()
        .map(|c| c.iter().map(|&v| induced.image[v].expect("child inside parent")).collect())
        .collect();
    let contracted = induced.graph.contract_sets(&blocks)?;
    let preimage = contracted.preimage.iter().map(|b| induced.lift(b)).collect();
    Ok((contracted.graph, preimage))
}

fn check_point(g: &Graph, fam: &LaminarFamily, x: &FracPoint) -> Result<()> {
    if !in_tree_polytope(g, x)? {
        return Err(Error::precondition("reduction", "x is not in the spanning-tree polytope"));
    }
    for s in fam.iter() {
        if let Some(b) = s.bound {
            let load = x.sum(&g.cut_edges(&s.members)?);
            if load > Rational::from(b as usize) {
                return Err(Error::precondition(
                    "reduction",
                    format!("x(δ({})) = {load} exceeds its bound {b}", s.id),
                ));
            }
        }
    }
    Ok(())
}

/// Processes input sets smallest first. Each one is split along a partition
/// minimizing η·x(δ(P)) − (|P| − 1) in the graph with the new sets already
/// inside it contracted, and the parts join the new family. The ground set
/// is processed last, whether or not it was an input set.
pub fn reduce_family(g: &Graph, fam: &LaminarFamily, x: &FracPoint, eta: &Rational) -> Result<Reduction> {
    fam.check_ground(g.vertex_count())?;
    check_point(g, fam, x)?;
    let n = g.vertex_count();
    let ground = g.vertices();
    let all = fam.with_ground(n);
    let mut pending: Vec<&LaminarSet> = all.bottom_up();
    pending.reverse();
    let scaled = x.scaled(eta);
    let mut new_sets: Vec<VertexSet> = Vec::new();
    let mut replacements = Vec::new();
    let mut trace = Vec::new();
    let limit = 2 * n.max(1) - 1;

    while let Some(s) = pending.pop() {
        if trace.len() >= limit {
            return Err(Error::invariant(
                "reduction",
                format!("more than {limit} iterations on {n} vertices"),
            ));
        }
        let inside: Vec<&VertexSet> = new_sets.iter().filter(|t| t.is_subset(&s.members)).collect();
        let children: Vec<VertexSet> = inside
            .iter()
            .filter(|t| !inside.iter().any(|u| u.len() > t.len() && t.is_subset(u)))
            .map(|t| (*t).clone())
            .collect();
        let children: Vec<&VertexSet> = children.iter().collect();
        let (piece, preimage) = contracted_piece(g, &s.members, &children)?;
        let w = scaled.restrict(&piece.edge_ids());
        let (p, value) = min_partition(&piece, &w)?;
        // the trivial partition also attains 0; keep S whole then
        let p = if value.is_zero() { Partition::trivial(&piece.vertices()) } else { p };
        if s.members == ground && p.len() != 1 {
            return Err(Error::invariant("reduction", "the ground set was split"));
        }
        let parts: Vec<VertexSet> = p
            .blocks()
            .iter()
            .map(|b| b.iter().flat_map(|&v| preimage[v].iter().copied()).collect())
            .collect();
        let mut block_ids = Vec::new();
        for part in &parts {
            let idx = match new_sets.iter().position(|t| t == part) {
                Some(i) => i,
                None => {
                    new_sets.push(part.clone());
                    new_sets.len() - 1
                }
            };
            block_ids.push(SetId(idx as u32));
        }
        trace.push(ReductionStep {
            set: s.id,
            members: s.members.clone(),
            contracted: children.into_iter().cloned().collect(),
            partition: parts,
            value,
        });
        if fam.get(s.id).is_some() {
            replacements.push(Replacement {
                set: s.id,
                members: s.members.clone(),
                blocks: block_ids,
            });
        }
        check_laminar(pending.iter().map(|t| &t.members).chain(new_sets.iter()))?;
    }

    let one = Rational::one();
    for t in &new_sets {
        if t.len() < n && x.sum(&g.cut_edges(t)?) < one {
            return Err(Error::invariant(
                "reduction",
                format!("new set {t:?} has x(δ) below 1"),
            ));
        }
    }
    let family = LaminarFamily::new(
        new_sets
            .into_iter()
            .enumerate()
            .map(|(i, m)| LaminarSet::new(i as u32, m, None))
            .collect(),
    )
    .map_err(|e| Error::invariant("reduction", format!("new family rejected: {e}")))?;
    Ok(Reduction {
        family,
        replacements,
        trace,
    })
}

fn check_laminar<'a>(sets: impl Iterator<Item = &'a VertexSet>) -> Result<()> {
    let sets: Vec<&VertexSet> = sets.collect();
    for (i, a) in sets.iter().enumerate() {
        if let Some(b) = sets[i + 1..].iter().find(|b| crossing(a, b)) {
            return Err(Error::invariant(
                "reduction",
                format!("remaining and new sets cross: {a:?} and {b:?}"),
            ));
        }
    }
    Ok(())
}

/// For each member S (children first) takes a spanning-tree point of S with
/// its children contracted lying below η·x, and glues them together.
pub fn build_aligned_point(g: &Graph, fam: &LaminarFamily, x: &FracPoint, eta: &Rational) -> Result<FracPoint> {
    let ground = g.vertices();
    if fam.find_members(&ground).is_none() {
        return Err(Error::precondition("aligned point", "family must contain the ground set"));
    }
    let scaled = x.scaled(eta);
    let mut out = FracPoint::new();
    for s in fam.bottom_up() {
        let children: Vec<&VertexSet> = fam.maximal_proper_subsets(&s.members).iter().map(|c| &c.members).collect();
        let (piece, _) = contracted_piece(g, &s.members, &children)?;
        let y = dominated_base_point(&piece, &scaled.restrict(&piece.edge_ids()))
            .map_err(|_| Error::NotWellConnected(s.id))?;
        out.merge(y);
    }
    for e in g.edges() {
        if out.get(e.id).is_zero() {
            out.set(e.id, Rational::zero());
        }
    }
    Ok(out)
}

/// Reduction plus aligned point.
#[derive(Debug, Clone)]
pub struct ReductionResult {
    pub reduction: Reduction,
    pub aligned_point: FracPoint,
}

pub fn reduce(g: &Graph, fam: &LaminarFamily, x: &FracPoint, eta: &Rational) -> Result<ReductionResult> {
    let reduction = reduce_family(g, fam, x, eta)?;
    let aligned_point = build_aligned_point(g, &reduction.family, x, eta)?;
    Ok(ReductionResult {
        reduction,
        aligned_point,
    })
}

/// A replaced set whose blocks carry too much boundary weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSumViolation {
    pub set: SetId,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Checks Σ x(δ(S_i)) ≤ x(δ(S))/(1 − 2/η) − 2/(η − 2) for every replaced
/// set other than the ground set, whose boundary is empty.
pub fn check_block_sums(
    g: &Graph,
    red: &Reduction,
    x: &FracPoint,
    eta: &Rational,
) -> std::result::Result<(), BlockSumViolation> {
    let two = Rational::from_integer(2);
    let one = Rational::one();
    let factor = (&one - &two / eta).recip();
    let shift = &two / &(eta - &two);
    for r in &red.replacements {
        if r.members.len() == g.vertex_count() {
            continue;
        }
        let lhs: Rational = r
            .blocks
            .iter()
            .map(|id| {
                let members = &red.family.get(*id).expect("block ids refer to the new family").members;
                x.sum(&g.cut_edges_unchecked(members))
            })
            .sum();
        let rhs = &factor * &x.sum(&g.cut_edges_unchecked(&r.members)) - &shift;
        if lhs > rhs {
            return Err(BlockSumViolation { set: r.set, lhs, rhs });
        }
    }
    Ok(())
}

/// The crossing bound an input set inherits from bounds |T ∩ δ(S')| ≤
/// α·x'(δ(S')) + β on the new family: (1/(1 − 2/η))(ηα + β)·x(δ(S)).
pub fn inherited_factor(eta: &Rational, alpha: &Rational, beta: &Rational) -> Rational {
    let two = Rational::from_integer(2);
    (Rational::one() - &two / eta).recip() * (eta * alpha + beta)
}

/// Edge ids of E(S) minus the edges inside the given children.
pub fn piece_edges(g: &Graph, s: &VertexSet, children: &[&VertexSet]) -> Vec<EdgeId> {
    g.inner_edges(s)
        .into_iter()
        .filter(|&e| {
            let edge = g.edge(e).expect("inner edge exists");
            !children.iter().any(|c| edge.inside(c))
        })
        .collect()
}
