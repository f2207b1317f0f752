//! End to end: LP relaxation, reduction to an aligned point, rounding, and a
//! report whose every number is recounted before it is returned.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lp::{BasicSolution, LinearProgram, Relation, Row, RowKind, VarBound};
use crate::matroid::EdgeSet;
use crate::model::{EdgeId, FracPoint, Graph, Instance, LaminarFamily, LaminarSet, SetId};
use crate::oracles::{dominated_base_point, edge_connectivity, in_tree_polytope, ForestOracle};
use crate::reduction::{inherited_factor, reduce, ReductionStep, Replacement};
use crate::rounding::{round_aligned, RoundingStep};
use crate::Rational;

/// The LP relaxation: min c·x over the spanning-tree polytope with
/// x(δ(S)) ≤ b_S for every bounded set.
pub fn lp2<'a>(g: &'a Graph, fam: &LaminarFamily, costs: &BTreeMap<EdgeId, Rational>) -> Result<LinearProgram<'a>> {
    if !g.is_connected() {
        return Err(Error::input("graph is not connected"));
    }
    let ids = g.edge_ids();
    let mut lp = LinearProgram::new(ids.iter().map(|&e| (e, VarBound::Unit)));
    for &e in &ids {
        lp.set_cost(e, costs.get(&e).cloned().unwrap_or_default())?;
    }
    lp.add_row(Row::sum(
        "tree_size",
        RowKind::Rank,
        &ids,
        Relation::Eq,
        Rational::from(g.vertex_count() - 1),
    ))?;
    for s in fam.iter() {
        if let Some(b) = s.bound {
            lp.add_row(Row::sum(
                format!("cut_{}", s.id.0),
                RowKind::Cut,
                &g.cut_edges(&s.members)?,
                Relation::Le,
                Rational::from(b as usize),
            ))?;
        }
    }
    lp.add_oracle(ForestOracle { graph: g });
    Ok(lp)
}

/// A basic optimal solution of the relaxation, or `Error::Infeasible`, which
/// certifies that no spanning tree meets the bounds.
pub fn solve_lp2(g: &Graph, fam: &LaminarFamily, costs: &BTreeMap<EdgeId, Rational>) -> Result<BasicSolution> {
    lp2(g, fam, costs)?.solve_basic()
}

/// (1/(1 − 2/η))(2η + 3).
pub fn thinness_factor(eta: &Rational) -> Rational {
    inherited_factor(eta, &Rational::from(2), &Rational::from(3))
}

/// A quotient that may be the vacuous 0/0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ratio {
    Value(Rational),
    Vacuous,
}

pub const VACUOUS: &str = "0/0 vacuous";

impl Ratio {
    /// `num / den`; `None` when the denominator is zero but the numerator is not.
    pub fn of(num: &Rational, den: &Rational) -> Option<Ratio> {
        match (num.is_zero(), den.is_zero()) {
            (true, true) => Some(Ratio::Vacuous),
            (false, true) => None,
            _ => Some(Ratio::Value(num / den)),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Value(v) => write!(f, "{v}"),
            Ratio::Vacuous => f.write_str(VACUOUS),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        if text == VACUOUS {
            return Ok(Ratio::Vacuous);
        }
        Rational::from_str(&text)
            .map(Ratio::Value)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostRow {
    pub tree: Rational,
    pub lp: Rational,
    pub ratio: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutRow {
    pub set: SetId,
    pub crossings: u64,
    pub x_delta: Rational,
    pub bound: Option<u64>,
    pub ratio: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guarantees {
    pub cost_factor: Rational,
    pub thinness_factor: Rational,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Trace {
    pub reduction: Vec<ReductionStepOut>,
    pub replacements: Vec<ReplacementOut>,
    pub new_family: Vec<LaminarSet>,
    pub rounding: Vec<serde_json::Value>,
    pub rounding_depth: usize,
    pub rounding_measure: usize,
}

/// Reduction steps as written to reports.
pub type ReductionStepOut = serde_json::Value;
pub type ReplacementOut = serde_json::Value;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeReport {
    pub status: String,
    pub tree: Vec<EdgeId>,
    pub cost: CostRow,
    pub cuts: Vec<CutRow>,
    pub eta: Rational,
    pub guarantees: Guarantees,
    pub x: FracPoint,
    pub aligned_point: FracPoint,
    pub trace: Trace,
}

/// Everything produced along the way, for callers that want more than the
/// report.
#[derive(Debug, Clone)]
pub struct Run {
    pub report: TreeReport,
    pub tree: EdgeSet,
    pub reduction_iterations: usize,
    pub reduction_steps: Vec<ReductionStep>,
    pub replacements: Vec<Replacement>,
    pub new_family: LaminarFamily,
    pub rounding_log: Vec<RoundingStep>,
    pub rounding_depth: usize,
    pub rounding_measure: usize,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("trace entries serialize")
}

/// Solves the relaxation and rounds its optimum.
pub fn solve_instance(inst: &Instance) -> Result<Run> {
    inst.validate()?;
    let sol = solve_lp2(&inst.graph, &inst.family, &inst.costs)?;
    solve_from_point(inst, &sol.x)
}

/// Reduction and rounding starting from a feasible point of the relaxation.
pub fn solve_from_point(inst: &Instance, x: &FracPoint) -> Result<Run> {
    let g = &inst.graph;
    let red = reduce(g, &inst.family, x, &inst.eta)?;
    let new_family = red.reduction.family.clone();
    let out = round_aligned(g, &new_family, &red.aligned_point, &inst.costs)?;
    let tree = out.basis.clone();

    let two = Rational::from(2);
    let three = Rational::from(3);
    for s in new_family.iter() {
        let count = Rational::from(g.cut_edges(&s.members)?.intersection(&tree).count());
        let load = red.aligned_point.sum(&g.cut_edges(&s.members)?);
        if count > &two * &load.ceil() + Rational::one() || count > &two * &load + &three {
            return Err(Error::invariant(
                "pipeline",
                format!("new set {:?} crossed {count} times against x'(δ) = {load}", s.members),
            ));
        }
    }
    let report = build_report(inst, x, &red.aligned_point, &tree)?;
    let mut report = report;
    report.trace = Trace {
        reduction: red.reduction.trace.iter().map(to_json).collect(),
        replacements: red.reduction.replacements.iter().map(to_json).collect(),
        new_family: new_family.sets().to_vec(),
        rounding: out.log.iter().map(to_json).collect(),
        rounding_depth: out.depth,
        rounding_measure: out.measure,
    };
    Ok(Run {
        report,
        tree,
        reduction_iterations: red.reduction.trace.len(),
        reduction_steps: red.reduction.trace,
        replacements: red.reduction.replacements,
        new_family,
        rounding_log: out.log,
        rounding_depth: out.depth,
        rounding_measure: out.measure,
    })
}

fn build_report(inst: &Instance, x: &FracPoint, aligned: &FracPoint, tree: &EdgeSet) -> Result<TreeReport> {
    let g = &inst.graph;
    if !g.is_spanning_tree(tree) {
        return Err(Error::invariant("pipeline", "output is not a spanning tree"));
    }
    let factor = thinness_factor(&inst.eta);
    let tree_cost = inst.cost_of(tree);
    let lp_cost = inst.cost_of_point(x);
    if tree_cost > &inst.eta * &lp_cost {
        return Err(Error::invariant(
            "pipeline",
            format!("tree cost {tree_cost} exceeds η·c(x) = {}", &inst.eta * &lp_cost),
        ));
    }
    let cost_ratio = Ratio::of(&tree_cost, &lp_cost).expect("tree cost is zero when LP cost is");
    let mut cuts = Vec::new();
    for s in inst.family.iter() {
        let delta = g.cut_edges(&s.members)?;
        let crossings = delta.intersection(tree).count() as u64;
        let x_delta = x.sum(&delta);
        let c = Rational::from(crossings as usize);
        if c > &factor * &x_delta {
            return Err(Error::invariant(
                "pipeline",
                format!("{} crossed {crossings} times, above {factor}·{x_delta}", s.id),
            ));
        }
        cuts.push(CutRow {
            set: s.id,
            crossings,
            ratio: Ratio::of(&c, &x_delta).expect("no crossings when x(δ) is zero"),
            x_delta,
            bound: s.bound,
        });
    }
    Ok(TreeReport {
        status: "ok".into(),
        tree: tree.iter().copied().collect(),
        cost: CostRow {
            tree: tree_cost,
            lp: lp_cost,
            ratio: cost_ratio,
        },
        cuts,
        eta: inst.eta.clone(),
        guarantees: Guarantees {
            cost_factor: inst.eta.clone(),
            thinness_factor: factor,
        },
        x: x.clone(),
        aligned_point: aligned.clone(),
        trace: Trace::default(),
    })
}

/// Recounts a report against its instance. Returns every discrepancy found.
pub fn verify_report(inst: &Instance, report: &TreeReport) -> std::result::Result<(), Vec<String>> {
    let mut problems = Vec::new();
    let g = &inst.graph;
    let tree: EdgeSet = report.tree.iter().copied().collect();
    if tree.len() != report.tree.len() || !g.is_spanning_tree(&tree) {
        problems.push("tree is not a spanning tree of the instance".to_string());
    }
    if report.status != "ok" {
        problems.push(format!("status is {:?}", report.status));
    }
    if report.eta != inst.eta {
        problems.push(format!("report η {} differs from instance η {}", report.eta, inst.eta));
    }
    let x = &report.x;
    match in_tree_polytope(g, x) {
        Ok(true) => {}
        _ => problems.push("x is not in the spanning-tree polytope".into()),
    }
    if x.ids().iter().any(|e| g.edge(*e).is_none()) {
        problems.push("x mentions unknown edges".into());
    }
    let factor = thinness_factor(&report.eta);
    if report.guarantees.thinness_factor != factor {
        problems.push(format!("thinness factor should be {factor}"));
    }
    if report.guarantees.cost_factor != report.eta {
        problems.push("cost factor should equal η".into());
    }
    let tree_cost = inst.cost_of(&tree);
    let lp_cost = inst.cost_of_point(x);
    if report.cost.tree != tree_cost {
        problems.push(format!("tree cost is {tree_cost}, report says {}", report.cost.tree));
    }
    if report.cost.lp != lp_cost {
        problems.push(format!("LP cost is {lp_cost}, report says {}", report.cost.lp));
    }
    if Some(&report.cost.ratio) != Ratio::of(&tree_cost, &lp_cost).as_ref() {
        problems.push("cost ratio does not match".into());
    }
    if tree_cost > &report.eta * &lp_cost {
        problems.push(format!("tree cost {tree_cost} exceeds η·{lp_cost}"));
    }
    if report.cuts.len() != inst.family.len() {
        problems.push("one cut row per family member expected".into());
    }
    for (row, s) in report.cuts.iter().zip(inst.family.iter()) {
        if row.set != s.id {
            problems.push(format!("cut row {} out of order", row.set));
            continue;
        }
        let delta = g.cut_edges_unchecked(&s.members);
        let crossings = delta.intersection(&tree).count() as u64;
        let x_delta = x.sum(&delta);
        if row.crossings != crossings || row.x_delta != x_delta || row.bound != s.bound {
            problems.push(format!("cut row {} does not recount", s.id));
        }
        if let Some(b) = s.bound {
            if x_delta > Rational::from(b as usize) {
                problems.push(format!("x violates the bound of {}", s.id));
            }
        }
        let c = Rational::from(crossings as usize);
        if Some(&row.ratio) != Ratio::of(&c, &x_delta).as_ref() {
            problems.push(format!("ratio of {} does not match", s.id));
        }
        if c > &factor * &x_delta {
            problems.push(format!("{} crossed {crossings} times, above {factor}·{x_delta}", s.id));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}

/// Thin tree for a k-edge-connected graph: rounds a spanning-tree point
/// below the uniform 2/k vector with zero costs.
pub fn thin_tree_for_k_connected(g: &Graph, fam: &LaminarFamily, k: usize, eta: &Rational) -> Result<Run> {
    if k == 0 {
        return Err(Error::input("k must be positive"));
    }
    match edge_connectivity(g) {
        Some((c, side)) if c < k => {
            return Err(Error::input(format!(
                "graph is only {c}-edge-connected; cut side {side:?}"
            )))
        }
        None => return Err(Error::input("graph needs at least two vertices")),
        _ => {}
    }
    let two_over_k = Rational::new(2, k as i64);
    let x = dominated_base_point(g, &FracPoint::uniform(&g.edge_ids(), &two_over_k))?;
    let bounded = fam.with_bounds(|s| {
        let load = x.sum(&g.cut_edges_unchecked(&s.members)).ceil();
        Some(load.to_i64().expect("small load") as u64)
    });
    let costs = g.edge_ids().into_iter().map(|e| (e, Rational::zero())).collect();
    let inst = Instance::new(g.clone(), bounded, costs, eta.clone())?;
    let run = solve_from_point(&inst, &x)?;
    let factor = thinness_factor(eta);
    for s in fam.iter() {
        let delta = g.cut_edges(&s.members)?;
        let count = Rational::from(delta.intersection(&run.tree).count());
        if count > &factor * &two_over_k * Rational::from(delta.len()) {
            return Err(Error::invariant(
                "pipeline",
                format!("{} crossed {count} times, above {factor}·(2/k)·|δ|", s.id),
            ));
        }
    }
    Ok(run)
}
