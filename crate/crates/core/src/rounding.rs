//! Iterative relaxation for laminar-constrained matroid bases: solve the LP
//! to a vertex, delete 0-edges, contract 1-edges, drop nearly-satisfied or
//! nearly-implied cut constraints, repeat.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{BasicSolution, LinearProgram, Relation, Row, RowKind, VarBound};
use crate::matroid::{EdgeSet, Matroid};
use crate::model::{EdgeId, FracPoint, Graph, LaminarFamily, SetId, VertexSet};
use crate::oracles::{in_tree_polytope, BaseOracle};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DropReason {
    /// Σ_{δ(S)} (1 − x_e) < 3
    NearlyIntegral,
    /// Σ_{δ(S) ∖ δ(S')} (1 − x_e) < 2 for a tight S' with δ(S') ⊆ δ(S)
    Implied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum RoundingStep {
    Delete {
        edge: EdgeId,
        lp_value: Rational,
    },
    Contract {
        edge: EdgeId,
        lp_value: Rational,
        /// Sets whose bound was lowered by one.
        charged: Vec<SetId>,
    },
    Drop {
        set: SetId,
        reason: DropReason,
        witness: Option<SetId>,
        lp_value: Rational,
    },
}

#[derive(Debug, Clone)]
pub struct RoundingOutcome {
    pub basis: EdgeSet,
    /// Edges fixed to 1, in the order they were fixed.
    pub fixed: Vec<EdgeId>,
    pub root_value: Rational,
    pub root_point: FracPoint,
    pub log: Vec<RoundingStep>,
    /// Number of LP levels solved.
    pub depth: usize,
    /// |E| + |L| at the root.
    pub measure: usize,
    /// b_S used at the root, per constrained set.
    pub bounds: BTreeMap<SetId, u64>,
}

#[derive(Debug, Clone)]
struct Active {
    id: SetId,
    members: VertexSet,
    bound: i64,
}

fn level_lp<'a>(
    g: &Graph,
    m: &'a Matroid,
    active: &[Active],
    costs: &BTreeMap<EdgeId, Rational>,
    seeds: &BTreeSet<EdgeSet>,
) -> Result<LinearProgram<'a>> {
    let ground = m.ground();
    let mut lp = LinearProgram::new(ground.iter().map(|&e| (e, VarBound::Unit)));
    for &e in ground {
        lp.set_cost(e, costs.get(&e).cloned().unwrap_or_default())?;
    }
    lp.add_row(Row::sum("rank_ground", RowKind::Rank, ground, Relation::Eq, Rational::from(m.full_rank())))?;
    let parts = m.component_grounds();
    if parts.len() > 1 {
        for (i, part) in parts.iter().enumerate() {
            lp.add_row(Row::sum(
                format!("rank_part_{i}"),
                RowKind::Rank,
                part,
                Relation::Eq,
                Rational::from(m.rank_within(part)),
            ))?;
        }
    }
    for c in seeds {
        let local: EdgeSet = c.intersection(ground).copied().collect();
        if !local.is_empty() && local.len() < ground.len() {
            let rank = m.rank_within(&local);
            lp.add_row(Row::sum("rank_seed", RowKind::Rank, &local, Relation::Le, Rational::from(rank)))?;
        }
    }
    for s in active {
        lp.add_row(Row::sum(
            format!("cut_{}", s.id.0),
            RowKind::Cut,
            &g.cut_edges_unchecked(&s.members),
            Relation::Le,
            Rational::from(s.bound),
        ))?;
    }
    lp.add_oracle(BaseOracle { matroid: m });
    Ok(lp)
}

/// Picks a constraint to drop, scanning sets by id.
fn find_drop(g: &Graph, x: &FracPoint, active: &[Active]) -> Option<(usize, DropReason, Option<SetId>)> {
    let one = Rational::one();
    let slack = |edges: &mut dyn Iterator<Item = &EdgeId>| -> Rational { edges.map(|&e| &one - &x.get(e)).sum() };
    let deltas: Vec<EdgeSet> = active.iter().map(|s| g.cut_edges_unchecked(&s.members)).collect();
    let tight: Vec<bool> = active
        .iter()
        .zip(&deltas)
        .map(|(s, d)| x.sum(d) == Rational::from(s.bound))
        .collect();
    let three = Rational::from(3);
    let two = Rational::from(2);
    for i in 0..active.len() {
        if !tight[i] {
            continue;
        }
        if slack(&mut deltas[i].iter()) < three {
            return Some((i, DropReason::NearlyIntegral, None));
        }
        for j in 0..active.len() {
            if j == i || !tight[j] || !deltas[j].is_subset(&deltas[i]) {
                continue;
            }
            if slack(&mut deltas[i].difference(&deltas[j])) < two {
                return Some((i, DropReason::Implied, Some(active[j].id)));
            }
        }
    }
    None
}

/// Iterative relaxation on (g, m, fam, b). Sets without a bound are ignored.
/// The matroid must be aligned with the family and the LP feasible.
pub fn lam_constrained_basis(
    g: &Graph,
    m: &Matroid,
    fam: &LaminarFamily,
    costs: &BTreeMap<EdgeId, Rational>,
) -> Result<RoundingOutcome> {
    if m.ground() != &g.edge_ids() {
        return Err(Error::input("matroid ground set differs from the edge set"));
    }
    let original = m.clone();
    let mut active: Vec<Active> = fam
        .iter()
        .filter_map(|s| {
            s.bound.map(|b| Active {
                id: s.id,
                members: s.members.clone(),
                bound: b as i64,
            })
        })
        .collect();
    let bounds: BTreeMap<SetId, u64> = fam.iter().filter_map(|s| s.bound.map(|b| (s.id, b))).collect();
    let measure = g.edge_count() + active.len();
    let mut g = g.clone();
    let mut m = m.clone();
    let mut fixed = Vec::new();
    let mut fixed_cost = Rational::zero();
    let mut log = Vec::new();
    let mut seeds: BTreeSet<EdgeSet> = BTreeSet::new();
    let mut root: Option<(Rational, FracPoint)> = None;
    let mut previous_total: Option<Rational> = None;
    let mut depth = 0;

    while !m.ground().is_empty() {
        if depth >= measure {
            return Err(Error::invariant(
                "rounding",
                format!("recursion deeper than |E| + |L| = {measure}"),
            ));
        }
        depth += 1;
        let solved = level_lp(&g, &m, &active, costs, &seeds)?.solve_basic();
        let sol: BasicSolution = match solved {
            Ok(sol) => sol,
            Err(Error::Infeasible(msg)) if root.is_none() => return Err(Error::Infeasible(msg)),
            Err(Error::Infeasible(msg)) => {
                return Err(Error::invariant("rounding", format!("LP became infeasible at depth {depth}: {msg}")))
            }
            Err(e) => return Err(e),
        };
        for row in &sol.rows {
            if row.kind == RowKind::Rank && row.relation == Relation::Le {
                seeds.insert(row.coeffs.keys().copied().collect());
            }
        }
        let x = sol.x;
        let value = sol.value;
        let total = &value + &fixed_cost;
        if let Some(prev) = &previous_total {
            if total > *prev {
                return Err(Error::invariant(
                    "rounding",
                    format!("LP cost rose from {prev} to {total} at depth {depth}"),
                ));
            }
        }
        previous_total = Some(total);
        if root.is_none() {
            root = Some((value.clone(), x.clone()));
        }

        if let Some((e, _)) = x.iter().find(|(_, v)| v.is_zero()) {
            let one: EdgeSet = [e].into();
            m = m.delete(&one)?;
            g = g.without_edges(&one);
            log.push(RoundingStep::Delete { edge: e, lp_value: value });
            continue;
        }
        if let Some((e, _)) = x.iter().find(|(_, v)| v.is_one()) {
            let one: EdgeSet = [e].into();
            let edge = g.edge(e).expect("edge in current graph").clone();
            let mut charged = Vec::new();
            for s in active.iter_mut() {
                if edge.crosses(&s.members) {
                    s.bound -= 1;
                    if s.bound < 0 {
                        return Err(Error::invariant(
                            "rounding",
                            format!("bound of {} went negative after fixing {e}", s.id),
                        ));
                    }
                    charged.push(s.id);
                }
            }
            m = m.contract(&one)?;
            g = g.without_edges(&one);
            fixed_cost += costs.get(&e).cloned().unwrap_or_default();
            fixed.push(e);
            log.push(RoundingStep::Contract { edge: e, lp_value: value, charged });
            continue;
        }
        match find_drop(&g, &x, &active) {
            Some((i, reason, witness)) => {
                let s = active.remove(i);
                if reason == DropReason::NearlyIntegral {
                    let d = g.cut_edges_unchecked(&s.members).len() as i64;
                    if d > s.bound + 2 {
                        return Err(Error::invariant(
                            "rounding",
                            format!("dropped {} with |δ| = {d} > b + 2 = {}", s.id, s.bound + 2),
                        ));
                    }
                }
                log.push(RoundingStep::Drop {
                    set: s.id,
                    reason,
                    witness,
                    lp_value: value,
                });
            }
            None => {
                return Err(Error::invariant(
                    "rounding",
                    format!("no rule applies at depth {depth} (the unreachable failure step)"),
                ))
            }
        }
    }

    let basis: EdgeSet = fixed.iter().copied().collect();
    let (root_value, root_point) = root.unwrap_or((Rational::zero(), FracPoint::new()));
    if !original.is_basis(&basis) {
        return Err(Error::invariant("rounding", "output is not a basis"));
    }
    let cost: Rational = basis.iter().map(|e| costs.get(e).cloned().unwrap_or_default()).sum();
    if cost > root_value {
        return Err(Error::invariant(
            "rounding",
            format!("basis cost {cost} exceeds the LP value {root_value}"),
        ));
    }
    Ok(RoundingOutcome {
        basis,
        fixed,
        root_value,
        root_point,
        log,
        depth,
        measure,
        bounds,
    })
}

/// Counts |T ∩ δ(S)| against 2b_S + 1 for every bounded set.
pub fn check_crossings(g: &Graph, fam: &LaminarFamily, tree: &EdgeSet) -> Result<()> {
    for s in fam.iter() {
        if let Some(b) = s.bound {
            let count = g.cut_edges(&s.members)?.intersection(tree).count() as u64;
            if count > 2 * b + 1 {
                return Err(Error::invariant(
                    "rounding",
                    format!("{} is crossed {count} times, above 2·{b} + 1", s.id),
                ));
            }
        }
    }
    Ok(())
}

/// Rounds a spanning-tree point aligned with `fam` to a spanning tree with
/// c(T) ≤ c(x) and |T ∩ δ(S)| ≤ 2⌈x(δ(S))⌉ + 1.
pub fn round_aligned(
    g: &Graph,
    fam: &LaminarFamily,
    x: &FracPoint,
    costs: &BTreeMap<EdgeId, Rational>,
) -> Result<RoundingOutcome> {
    fam.check_ground(g.vertex_count())?;
    if !in_tree_polytope(g, x)? {
        return Err(Error::precondition("rounding", "x is not in the spanning-tree polytope"));
    }
    let graphic = Matroid::graphic(g);
    if let Some(id) = graphic.is_aligned_point(g, fam, x) {
        return Err(Error::precondition("rounding", format!("x is not aligned with set {id}")));
    }
    let bounded = fam.with_bounds(|s| {
        let load = x.sum(&g.cut_edges_unchecked(&s.members)).ceil();
        Some(load.to_i64().expect("crossing load fits in i64") as u64)
    });
    let refined = graphic.refine_along_family(g, fam);
    let out = lam_constrained_basis(g, &refined, &bounded, costs)?;
    if !g.is_spanning_tree(&out.basis) {
        return Err(Error::invariant("rounding", "output is not a spanning tree"));
    }
    check_crossings(g, &bounded, &out.basis)?;
    let cost: Rational = out.basis.iter().map(|e| costs.get(e).cloned().unwrap_or_default()).sum();
    let cx: Rational = x.iter().map(|(e, v)| v * &costs.get(&e).cloned().unwrap_or_default()).sum();
    if cost > cx {
        return Err(Error::invariant("rounding", format!("tree cost {cost} exceeds c(x) = {cx}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{brute_best_tree, enumerate_spanning_trees, gen_instance, DeskParams};
    use crate::model::LaminarSet;
    use crate::pipeline::solve_lp2;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn four_cycle() -> Graph {
        Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn costs(g: &Graph, vals: &[i64]) -> BTreeMap<EdgeId, Rational> {
        g.edge_ids().into_iter().zip(vals.iter().map(|&v| Rational::from(v))).collect()
    }

    #[test]
    fn no_constraints_gives_minimum_spanning_tree() {
        let g = Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let c = costs(&g, &[4, 1, 3, 5, 2]);
        let out = lam_constrained_basis(&g, &Matroid::graphic(&g), &LaminarFamily::empty(), &c).unwrap();
        let (_, best) = brute_best_tree(&g, &LaminarFamily::empty(), &c).unwrap().unwrap();
        let cost: Rational = out.basis.iter().map(|e| c[e].clone()).sum();
        assert_eq!(cost, best);
        assert_eq!(out.root_value, best);
    }

    #[test]
    fn cycle_with_pair_bound() {
        let g = four_cycle();
        let fam = LaminarFamily::new(vec![LaminarSet::new(0, [0, 1], Some(1))]).unwrap();
        let m = Matroid::graphic(&g).refine_along_family(&g, &fam);
        let c = costs(&g, &[0, 0, 0, 0]);
        let out = lam_constrained_basis(&g, &m, &fam, &c).unwrap();
        assert!(g.is_spanning_tree(&out.basis));
        assert!(out.basis.contains(&EdgeId(0)) && out.basis.contains(&EdgeId(2)));
        let crossing = g.cut_edges(&[0, 1].into()).unwrap().intersection(&out.basis).count();
        assert_eq!(crossing, 1);
        let feasible = enumerate_spanning_trees(&g)
            .unwrap()
            .into_iter()
            .filter(|t| t.contains(&EdgeId(0)) && t.contains(&EdgeId(2)))
            .count();
        assert_eq!(feasible, 2);
        assert!(out.depth <= out.measure);
    }

    #[test]
    fn infeasible_root_is_reported() {
        let g = four_cycle();
        let fam = LaminarFamily::new(vec![LaminarSet::new(0, [0, 1], Some(0))]).unwrap();
        let c = costs(&g, &[1, 1, 1, 1]);
        assert!(matches!(
            lam_constrained_basis(&g, &Matroid::graphic(&g), &fam, &c),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn integral_point_is_returned() {
        let g = four_cycle();
        let x = FracPoint::characteristic(&[EdgeId(1), EdgeId(2), EdgeId(3)].into());
        let fam = LaminarFamily::new(vec![LaminarSet::new(0, [1, 2], None)]).unwrap();
        let c = costs(&g, &[1, 5, 5, 5]);
        let out = round_aligned(&g, &fam, &x, &c).unwrap();
        // E({1,2}) gets rank 1, so the tree keeps edge 1 and costs at most c(x)
        assert!(out.basis.contains(&EdgeId(1)));
        assert!(g.is_spanning_tree(&out.basis));
    }

    #[test]
    fn misaligned_point_rejected() {
        let g = Graph::from_pairs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let x = FracPoint::uniform(&g.edge_ids(), &r(2, 3));
        let fam = LaminarFamily::new(vec![LaminarSet::new(4, [0, 1], None)]).unwrap();
        let err = round_aligned(&g, &fam, &x, &costs(&g, &[1, 1, 1])).unwrap_err();
        assert!(err.to_string().contains("S4"));
    }

    #[test]
    fn reduced_points_round_within_bounds() {
        for seed in 0..30 {
            let inst = gen_instance(seed, DeskParams { max_vertices: 7, ..DeskParams::default() });
            let Ok(sol) = solve_lp2(&inst.graph, &inst.family, &inst.costs) else { continue };
            let red = crate::reduction::reduce(&inst.graph, &inst.family, &sol.x, &inst.eta).unwrap();
            let fam = &red.reduction.family;
            let out = round_aligned(&inst.graph, fam, &red.aligned_point, &inst.costs).unwrap();
            assert!(out.depth <= out.measure);
            for s in fam.iter() {
                let load = red.aligned_point.sum(&inst.graph.cut_edges(&s.members).unwrap());
                let count = inst.graph.cut_edges(&s.members).unwrap().intersection(&out.basis).count();
                assert!(Rational::from(count) <= load.ceil() * Rational::from(2) + Rational::one());
            }
        }
    }
}
