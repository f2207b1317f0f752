//! Two-phase primal simplex on a dense rational tableau with Bland's rule.

use super::Relation;
use crate::Rational;

pub(crate) struct SparseRow {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

pub(crate) enum Outcome {
    Optimal { x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    obj: Vec<Rational>,
    /// Negated objective value.
    obj_rhs: Rational,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.a[r][c].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for v in self.a[r].iter_mut().filter(|v| !v.is_zero()) {
                *v = &*v * &inv;
            }
            self.rhs[r] = &self.rhs[r] * &inv;
        }
        let nz: Vec<usize> = (0..self.a[r].len()).filter(|&k| !self.a[r][k].is_zero()).collect();
        let (prow, prhs) = (self.a[r].clone(), self.rhs[r].clone());
        for i in 0..self.a.len() {
            if i == r || self.a[i][c].is_zero() {
                continue;
            }
            let f = self.a[i][c].clone();
            for &k in &nz {
                let d = &f * &prow[k];
                self.a[i][k] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.obj[c].is_zero() {
            let f = self.obj[c].clone();
            for &k in &nz {
                let d = &f * &prow[k];
                self.obj[k] -= d;
            }
            self.obj_rhs -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule over columns `0..allowed`. Returns false if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(enter) = (0..allowed).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                if !self.a[i][enter].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.a[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Minimizes `cost · x` subject to `rows` and `x >= 0`.
pub(crate) fn solve(num_vars: usize, cost: &[Rational], rows: &[SparseRow]) -> Outcome {
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let needs_art = |rel: Relation, negate: bool| match (rel, negate) {
        (Relation::Eq, _) => true,
        (Relation::Le, false) | (Relation::Ge, true) => false,
        _ => true,
    };
    let n_art = rows
        .iter()
        .filter(|r| needs_art(r.relation, r.rhs.is_negative()))
        .count();
    let first_art = num_vars + n_slack;
    let ncols = first_art + n_art;

    let mut t = Tableau {
        a: vec![vec![Rational::zero(); ncols]; m],
        rhs: vec![Rational::zero(); m],
        basis: vec![0; m],
        obj: vec![Rational::zero(); ncols],
        obj_rhs: Rational::zero(),
    };
    let (mut slack, mut art) = (num_vars, first_art);
    let mut art_rows = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let negate = row.rhs.is_negative();
        let sign = |v: &Rational| if negate { -v } else { v.clone() };
        for (j, v) in &row.coeffs {
            t.a[i][*j] += sign(v);
        }
        t.rhs[i] = sign(&row.rhs);
        // effective relation after normalizing rhs >= 0
        let le = match (row.relation, negate) {
            (Relation::Le, false) | (Relation::Ge, true) => Some(true),
            (Relation::Ge, false) | (Relation::Le, true) => Some(false),
            (Relation::Eq, _) => None,
        };
        if let Some(le) = le {
            t.a[i][slack] = if le { Rational::one() } else { -Rational::one() };
            if le {
                t.basis[i] = slack;
            }
            slack += 1;
        }
        if needs_art(row.relation, negate) {
            t.a[i][art] = Rational::one();
            t.basis[i] = art;
            art += 1;
            art_rows.push(i);
        }
    }

    if n_art > 0 {
        for &i in &art_rows {
            for j in 0..first_art {
                if !t.a[i][j].is_zero() {
                    let v = t.a[i][j].clone();
                    t.obj[j] -= v;
                }
            }
            let r = t.rhs[i].clone();
            t.obj_rhs -= r;
        }
        t.optimize(ncols);
        if !t.obj_rhs.is_zero() {
            return Outcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.a.len() {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| !t.a[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.a.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    t.obj = vec![Rational::zero(); ncols];
    t.obj_rhs = Rational::zero();
    t.obj[..num_vars].clone_from_slice(&cost[..num_vars]);
    for i in 0..t.a.len() {
        let cb = t.obj[t.basis[i]].clone();
        if cb.is_zero() {
            continue;
        }
        for j in 0..ncols {
            if !t.a[i][j].is_zero() {
                let d = &cb * &t.a[i][j];
                t.obj[j] -= d;
            }
        }
        t.obj_rhs -= &cb * &t.rhs[i];
    }
    if !t.optimize(first_art) {
        return Outcome::Unbounded;
    }

    let mut x = vec![Rational::zero(); num_vars];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < num_vars {
            x[b] = t.rhs[i].clone();
        }
    }
    Outcome::Optimal { x }
}
