//! Exhaustive reference implementations, used to check the real algorithms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matroid::EdgeSet;
use crate::model::{DisjointSets, EdgeId, FracPoint, Graph, LaminarFamily, Partition, VertexSet};
use crate::Rational;

pub const TREE_COUNT_CAP: u64 = 1_000_000;
pub const PARTITION_VERTEX_CAP: usize = 10;
pub const SUBSET_VERTEX_CAP: usize = 16;

/// Number of spanning trees by the matrix-tree theorem, exactly.
pub fn spanning_tree_count(g: &Graph) -> Rational {
    let n = g.vertex_count();
    if n <= 1 {
        return Rational::from(n as i64);
    }
    let m = n - 1;
    let mut a = vec![vec![Rational::zero(); m]; m];
    for e in g.edges() {
        for (x, y) in [(e.u, e.v), (e.v, e.u)] {
            if x < m {
                a[x][x] += Rational::one();
                if y < m {
                    a[x][y] -= Rational::one();
                }
            }
        }
    }
    let mut det = Rational::one();
    for col in 0..m {
        let Some(p) = (col..m).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det = &det * &a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..m {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for k in col..m {
                let d = &f * &a[col][k];
                a[r][k] -= d;
            }
        }
    }
    det
}

/// Calls `visit` once per spanning tree of `g`, after checking the tree count
/// against `cap`.
pub fn for_each_spanning_tree(g: &Graph, cap: u64, mut visit: impl FnMut(&EdgeSet)) -> Result<()> {
    let count = spanning_tree_count(g);
    if count > Rational::from(cap as usize) {
        return Err(Error::TooLarge {
            what: format!("spanning tree count {count}"),
            cap,
        });
    }
    if count.is_zero() {
        return Ok(());
    }
    let edges: Vec<(EdgeId, usize, usize)> = g.edges().iter().map(|e| (e.id, e.u, e.v)).collect();
    let mut chosen = Vec::new();
    let mut excluded = vec![false; edges.len()];
    branch(g.vertex_count(), &edges, 0, &mut chosen, &mut excluded, &mut visit);
    Ok(())
}

fn connects(n: usize, edges: &[(EdgeId, usize, usize)], use_edge: impl Fn(usize) -> bool) -> (bool, DisjointSets) {
    let mut ds = DisjointSets::new(n);
    let mut joined = 1;
    for (i, &(_, u, v)) in edges.iter().enumerate() {
        if use_edge(i) && ds.union(u, v) {
            joined += 1;
        }
    }
    (joined >= n, ds)
}

fn branch(
    n: usize,
    edges: &[(EdgeId, usize, usize)],
    i: usize,
    chosen: &mut Vec<usize>,
    excluded: &mut [bool],
    visit: &mut impl FnMut(&EdgeSet),
) {
    if chosen.len() + 1 == n {
        visit(&chosen.iter().map(|&k| edges[k].0).collect());
        return;
    }
    if i == edges.len() {
        return;
    }
    let (_, mut ds) = connects(n, edges, |k| chosen.contains(&k));
    let (_, u, v) = edges[i];
    if ds.find(u) != ds.find(v) {
        chosen.push(i);
        branch(n, edges, i + 1, chosen, excluded, visit);
        chosen.pop();
    }
    excluded[i] = true;
    if connects(n, edges, |k| !excluded[k]).0 {
        branch(n, edges, i + 1, chosen, excluded, visit);
    }
    excluded[i] = false;
}

pub fn enumerate_spanning_trees(g: &Graph) -> Result<Vec<EdgeSet>> {
    let mut out = Vec::new();
    for_each_spanning_tree(g, TREE_COUNT_CAP, |t| out.push(t.clone()))?;
    Ok(out)
}

/// Calls `visit` with every set partition of `0..n` as a block-label vector
/// in restricted-growth order.
fn for_each_set_partition(n: usize, mut visit: impl FnMut(&[usize], usize)) {
    let mut labels = vec![0; n];
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, visit: &mut impl FnMut(&[usize], usize)) {
        if i == labels.len() {
            visit(labels, max);
            return;
        }
        for b in 0..=max {
            labels[i] = b;
            rec(i + 1, max.max(b + 1), labels, visit);
        }
    }
    if n == 0 {
        return;
    }
    rec(1, 1, &mut labels, &mut visit);
}

/// Exhaustive minimizer of w(δ(P)) − (|P| − 1); ties go to the first
/// partition in restricted-growth order.
pub fn brute_min_partition(g: &Graph, w: &FracPoint) -> Result<(Partition, Rational)> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::input("partition problem on a graph with no vertices"));
    }
    if n > PARTITION_VERTEX_CAP {
        return Err(Error::TooLarge {
            what: format!("exhaustive partition search over {n} vertices"),
            cap: PARTITION_VERTEX_CAP as u64,
        });
    }
    let weights: Vec<(usize, usize, Rational)> = g.edges().iter().map(|e| (e.u, e.v, w.get(e.id))).collect();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for_each_set_partition(n, |labels, blocks| {
        let crossing: Rational = weights
            .iter()
            .filter(|(u, v, _)| labels[*u] != labels[*v])
            .map(|(_, _, x)| x.clone())
            .sum();
        let value = crossing - Rational::from(blocks - 1);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, labels.to_vec()));
        }
    });
    let (value, labels) = best.expect("at least one partition");
    let mut blocks: BTreeMap<usize, VertexSet> = BTreeMap::new();
    for (v, &b) in labels.iter().enumerate() {
        blocks.entry(b).or_default().insert(v);
    }
    Ok((Partition::from_blocks(blocks.into_values().collect())?, value))
}

/// Exhaustive maximizer of x(E(S)) − (|S| − 1) when positive; ties go to
/// the smallest subset bitmask.
pub fn brute_separate_forest(g: &Graph, x: &FracPoint) -> Result<Option<VertexSet>> {
    let n = g.vertex_count();
    if n > SUBSET_VERTEX_CAP {
        return Err(Error::TooLarge {
            what: format!("subset enumeration over {n} vertices"),
            cap: SUBSET_VERTEX_CAP as u64,
        });
    }
    let mut best: Option<(Rational, VertexSet)> = None;
    for mask in 1u32..1 << n {
        let s: VertexSet = (0..n).filter(|v| mask >> v & 1 == 1).collect();
        let value = x.sum(&g.inner_edges(&s)) - Rational::from(s.len() - 1);
        if value.is_positive() && best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, s));
        }
    }
    Ok(best.map(|(_, s)| s))
}

/// True iff `tree` meets every bound of `fam`.
pub fn meets_bounds(g: &Graph, fam: &LaminarFamily, tree: &EdgeSet) -> bool {
    fam.iter().all(|s| match s.bound {
        Some(b) => g.cut_edges_unchecked(&s.members).intersection(tree).count() as u64 <= b,
        None => true,
    })
}

/// Cheapest spanning tree meeting every bound, or `None`. Ties go to the
/// first tree found.
pub fn brute_best_tree(
    g: &Graph,
    fam: &LaminarFamily,
    costs: &BTreeMap<EdgeId, Rational>,
) -> Result<Option<(EdgeSet, Rational)>> {
    let mut best: Option<(EdgeSet, Rational)> = None;
    for_each_spanning_tree(g, TREE_COUNT_CAP, |t| {
        if !meets_bounds(g, fam, t) {
            return;
        }
        let c: Rational = t.iter().map(|e| costs.get(e).cloned().unwrap_or_default()).sum();
        if best.as_ref().is_none_or(|(_, b)| c < *b) {
            best = Some((t.clone(), c));
        }
    })?;
    Ok(best)
}
