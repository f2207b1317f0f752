//! Exact-rational linear programs over edge variables, solved to a vertex with
//! row generation from separation oracles.

mod simplex;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EdgeId, FracPoint};
use crate::Rational;

pub const MAX_ORACLE_ROUNDS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// Row families, in the order tight rows are preferred when picking a basis
/// of the defining system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    /// Rank / spanning-tree polytope rows.
    Rank,
    /// Variable bounds.
    Bound,
    /// Laminar cut rows.
    Cut,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub label: String,
    pub kind: RowKind,
    pub coeffs: BTreeMap<EdgeId, Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn new(
        label: impl Into<String>,
        kind: RowKind,
        coeffs: BTreeMap<EdgeId, Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> Self {
        Row {
            label: label.into(),
            kind,
            coeffs: coeffs.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
            relation,
            rhs,
        }
    }

    /// x(F) rel rhs.
    pub fn sum<'a>(
        label: impl Into<String>,
        kind: RowKind,
        ids: impl IntoIterator<Item = &'a EdgeId>,
        relation: Relation,
        rhs: Rational,
    ) -> Self {
        let coeffs = ids.into_iter().map(|&e| (e, Rational::one())).collect();
        Row::new(label, kind, coeffs, relation, rhs)
    }

    pub fn lhs(&self, x: &FracPoint) -> Rational {
        self.coeffs.iter().map(|(&e, a)| a * x.get(e)).sum()
    }

    pub fn is_satisfied(&self, x: &FracPoint) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    pub fn is_tight(&self, x: &FracPoint) -> bool {
        self.lhs(x) == self.rhs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    /// 0 <= x_e <= 1
    Unit,
    /// x_e >= 0
    NonNegative,
}

/// Implicit constraint family queried at candidate vertices.
pub trait SeparationOracle {
    fn name(&self) -> &str;

    /// A row violated by `x`, or `None` when `x` satisfies the whole family.
    fn separate(&self, x: &FracPoint) -> Result<Option<Row>>;
}

/// min c·x over explicit rows, variable bounds and oracle-described rows.
pub struct LinearProgram<'a> {
    vars: Vec<EdgeId>,
    bounds: BTreeMap<EdgeId, VarBound>,
    objective: BTreeMap<EdgeId, Rational>,
    rows: Vec<Row>,
    oracles: Vec<Box<dyn SeparationOracle + 'a>>,
    max_rounds: usize,
}

#[derive(Debug, Clone)]
pub struct BasicSolution {
    pub x: FracPoint,
    pub value: Rational,
    /// Linearly independent tight rows (bounds included) of full column rank.
    pub tight_rows: Vec<Row>,
    /// Explicit rows plus every row generated by the oracles.
    pub rows: Vec<Row>,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexDefect {
    Violated(String),
    RankDeficient { rank: usize, needed: usize },
}

impl<'a> LinearProgram<'a> {
    pub fn new(vars: impl IntoIterator<Item = (EdgeId, VarBound)>) -> Self {
        let bounds: BTreeMap<EdgeId, VarBound> = vars.into_iter().collect();
        LinearProgram {
            vars: bounds.keys().copied().collect(),
            bounds,
            objective: BTreeMap::new(),
            rows: Vec::new(),
            oracles: Vec::new(),
            max_rounds: MAX_ORACLE_ROUNDS,
        }
    }

    pub fn vars(&self) -> &[EdgeId] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn set_cost(&mut self, e: EdgeId, c: Rational) -> Result<()> {
        if !self.bounds.contains_key(&e) {
            return Err(Error::input(format!("objective references unknown variable {e}")));
        }
        self.objective.insert(e, c);
        Ok(())
    }

    pub fn add_row(&mut self, row: Row) -> Result<()> {
        if let Some(e) = row.coeffs.keys().find(|e| !self.bounds.contains_key(e)) {
            return Err(Error::input(format!("row {} references unknown variable {e}", row.label)));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn add_oracle(&mut self, oracle: impl SeparationOracle + 'a) {
        self.oracles.push(Box::new(oracle));
    }

    pub fn set_max_rounds(&mut self, rounds: usize) {
        self.max_rounds = rounds;
    }

    pub fn objective_value(&self, x: &FracPoint) -> Rational {
        self.objective.iter().map(|(&e, c)| c * x.get(e)).sum()
    }

    fn bound_rows(&self) -> Vec<Row> {
        let mut out = Vec::new();
        for (&e, b) in &self.bounds {
            out.push(Row::sum(format!("lb_{}", e.0), RowKind::Bound, &[e], Relation::Ge, Rational::zero()));
            if *b == VarBound::Unit {
                out.push(Row::sum(format!("ub_{}", e.0), RowKind::Bound, &[e], Relation::Le, Rational::one()));
            }
        }
        out
    }

    fn simplex(&self, rows: &[Row]) -> Result<FracPoint> {
        let index: BTreeMap<EdgeId, usize> = self.vars.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut sparse: Vec<simplex::SparseRow> = rows
            .iter()
            .map(|r| simplex::SparseRow {
                coeffs: r.coeffs.iter().map(|(e, v)| (index[e], v.clone())).collect(),
                relation: r.relation,
                rhs: r.rhs.clone(),
            })
            .collect();
        for (&e, b) in &self.bounds {
            if *b == VarBound::Unit {
                sparse.push(simplex::SparseRow {
                    coeffs: vec![(index[&e], Rational::one())],
                    relation: Relation::Le,
                    rhs: Rational::one(),
                });
            }
        }
        let cost: Vec<Rational> = self
            .vars
            .iter()
            .map(|e| self.objective.get(e).cloned().unwrap_or_default())
            .collect();
        match simplex::solve(self.vars.len(), &cost, &sparse) {
            simplex::Outcome::Optimal { x, .. } => {
                Ok(self.vars.iter().copied().zip(x).collect())
            }
            simplex::Outcome::Infeasible => Err(Error::Infeasible("linear program has no feasible point".into())),
            simplex::Outcome::Unbounded => Err(Error::Unbounded),
        }
    }

    /// Row generation: solve the explicit system to a vertex, ask each oracle
    /// for a violated row, add what they report and repeat until none do.
    pub fn solve_basic(&self) -> Result<BasicSolution> {
        let mut rows: Vec<Row> = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            if r.coeffs.is_empty() {
                if !r.is_satisfied(&FracPoint::new()) {
                    return Err(Error::Infeasible(format!("row {} cannot be satisfied", r.label)));
                }
                continue;
            }
            rows.push(r.clone());
        }
        for round in 1..=self.max_rounds {
            let x = self.simplex(&rows)?;
            let mut added = false;
            for oracle in &self.oracles {
                if let Some(row) = oracle.separate(&x)? {
                    if row.is_satisfied(&x) {
                        return Err(Error::invariant(
                            "lp",
                            format!("oracle {} returned non-violated row {}", oracle.name(), row.label),
                        ));
                    }
                    rows.push(row);
                    added = true;
                }
            }
            if !added {
                let tight_rows = self.defining_rows(&rows, &x).map_err(|d| {
                    Error::invariant("lp", format!("simplex output is not a vertex: {d:?}"))
                })?;
                return Ok(BasicSolution {
                    value: self.objective_value(&x),
                    x,
                    tight_rows,
                    rows,
                    rounds: round,
                });
            }
        }
        Err(Error::invariant(
            "lp",
            format!("row generation exceeded {} oracle rounds", self.max_rounds),
        ))
    }

    /// Maximal independent set of tight rows at `x`, scanning rank rows,
    /// then bounds, then cut rows.
    fn defining_rows(&self, rows: &[Row], x: &FracPoint) -> std::result::Result<Vec<Row>, VertexDefect> {
        let mut candidates: Vec<Row> = self.bound_rows();
        candidates.extend(rows.iter().cloned());
        if let Some(r) = candidates.iter().find(|r| !r.is_satisfied(x)) {
            return Err(VertexDefect::Violated(r.label.clone()));
        }
        candidates.retain(|r| r.is_tight(x));
        candidates.sort_by_key(|r| r.kind);
        let index: BTreeMap<EdgeId, usize> = self.vars.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut echelon = Echelon::new(self.vars.len());
        let mut chosen = Vec::new();
        for r in candidates {
            let mut dense = vec![Rational::zero(); self.vars.len()];
            for (e, v) in &r.coeffs {
                dense[index[e]] = v.clone();
            }
            if echelon.insert(dense) {
                chosen.push(r);
            }
        }
        if chosen.len() < self.vars.len() {
            return Err(VertexDefect::RankDeficient {
                rank: chosen.len(),
                needed: self.vars.len(),
            });
        }
        Ok(chosen)
    }

    /// Confirms `x` is feasible for the explicit rows and that its tight rows
    /// have full column rank.
    pub fn check_vertex(&self, x: &FracPoint) -> std::result::Result<(), VertexDefect> {
        self.defining_rows(&self.rows, x).map(|_| ())
    }

    /// As [`LinearProgram::check_vertex`], also counting rows generated during a solve.
    pub fn check_solution(&self, sol: &BasicSolution) -> std::result::Result<(), VertexDefect> {
        self.defining_rows(&sol.rows, &sol.x).map(|_| ())
    }

    /// Human-readable dump in LP-file style with exact rationals.
    pub fn to_lp_text(&self, extra_rows: &[Row]) -> String {
        let mut out = String::from("Minimize\n obj:");
        let term = |out: &mut String, c: &Rational, e: &EdgeId| {
            let sign = if c.is_negative() { "-" } else { "+" };
            let _ = write!(out, " {sign} {} x{}", c.abs(), e.0);
        };
        for (e, c) in &self.objective {
            term(&mut out, c, e);
        }
        out.push_str("\nSubject To\n");
        for r in self.rows.iter().chain(extra_rows) {
            let _ = write!(out, " {}:", r.label);
            for (e, c) in &r.coeffs {
                term(&mut out, c, e);
            }
            let _ = writeln!(out, " {} {}", r.relation.symbol(), r.rhs);
        }
        out.push_str("Bounds\n");
        for (e, b) in &self.bounds {
            match b {
                VarBound::Unit => {
                    let _ = writeln!(out, " 0 <= x{} <= 1", e.0);
                }
                VarBound::NonNegative => {
                    let _ = writeln!(out, " x{} >= 0", e.0);
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

/// Incremental row echelon form for exact rank computations.
pub(crate) struct Echelon {
    rows: Vec<(usize, Vec<Rational>)>,
    width: usize,
}

impl Echelon {
    pub(crate) fn new(width: usize) -> Self {
        Echelon { rows: Vec::new(), width }
    }

    /// Adds `v` if it is independent of the rows so far.
    pub(crate) fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        debug_assert_eq!(v.len(), self.width);
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for k in 0..self.width {
                if !row[k].is_zero() {
                    let d = &f * &row[k];
                    v[k] -= d;
                }
            }
        }
        match v.iter().position(|a| !a.is_zero()) {
            Some(p) => {
                let inv = v[p].recip();
                for a in v.iter_mut() {
                    *a = &*a * &inv;
                }
                // keep earlier rows reduced in the new pivot column
                for (_, row) in self.rows.iter_mut() {
                    if !row[p].is_zero() {
                        let f = row[p].clone();
                        for k in 0..self.width {
                            if !v[k].is_zero() {
                                let d = &f * &v[k];
                                row[k] -= d;
                            }
                        }
                    }
                }
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }

    #[cfg(test)]
    fn rank(&self) -> usize {
        self.rows.len()
    }
}
