//! Matroids given by rank oracles, closed under minors, direct sums and
//! refinement.
//!
//! Graphic and partition matroids are kept in structural form through every
//! operation (deleting or contracting inside a graphic matroid yields another
//! graphic matroid, and so on), so the separation routines can use
//! combinatorial algorithms instead of subset enumeration. Anything else is
//! carried as a generic rank callback wrapped in minors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DisjointSets, EdgeId, FracPoint, Graph, LaminarFamily, SetId};

pub type EdgeSet = BTreeSet<EdgeId>;
pub type RankFn = Arc<dyn Fn(&EdgeSet) -> usize + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Graphic,
    Partition,
    DirectSum,
    Minor,
    Refined,
    Oracle,
}

/// Graphic matroid of a multigraph. Unlike [`Graph`], loops are allowed:
/// contraction turns parallel edges into loops, which stay in the ground set
/// with rank 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertex_count: usize,
    edges: BTreeMap<EdgeId, (usize, usize)>,
}

impl GraphicMatroid {
    pub fn from_graph(g: &Graph) -> Self {
        GraphicMatroid {
            vertex_count: g.vertex_count(),
            edges: g.edges().iter().map(|e| (e.id, (e.u, e.v))).collect(),
        }
        .compact()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &BTreeMap<EdgeId, (usize, usize)> {
        &self.edges
    }

    pub fn rank(&self, f: &EdgeSet) -> usize {
        let mut ds = DisjointSets::new(self.vertex_count);
        f.iter()
            .filter_map(|e| self.edges.get(e))
            .filter(|&&(u, v)| ds.union(u, v))
            .count()
    }

    /// Drops vertices that no edge touches and relabels densely.
    fn compact(self) -> Self {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        let mut touched: Vec<usize> = self.edges.values().flat_map(|&(u, v)| [u, v]).collect();
        touched.sort_unstable();
        touched.dedup();
        for v in touched {
            label[v] = next;
            next += 1;
        }
        GraphicMatroid {
            vertex_count: next,
            edges: self
                .edges
                .into_iter()
                .map(|(e, (u, v))| (e, (label[u], label[v])))
                .collect(),
        }
    }

    fn delete(&self, f: &EdgeSet) -> Self {
        GraphicMatroid {
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .filter(|(e, _)| !f.contains(e))
                .map(|(&e, &uv)| (e, uv))
                .collect(),
        }
        .compact()
    }

    fn contract(&self, f: &EdgeSet) -> Self {
        let mut ds = DisjointSets::new(self.vertex_count);
        for e in f {
            if let Some(&(u, v)) = self.edges.get(e) {
                ds.union(u, v);
            }
        }
        GraphicMatroid {
            vertex_count: self.vertex_count,
            edges: self
                .edges
                .iter()
                .filter(|(e, _)| !f.contains(e))
                .map(|(&e, &(u, v))| (e, (ds.find(u), ds.find(v))))
                .collect(),
        }
        .compact()
    }
}

/// Partition matroid: rank(F) = Σ_blocks min(|F ∩ block|, capacity).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    blocks: Vec<(EdgeSet, usize)>,
}

impl PartitionMatroid {
    pub fn blocks(&self) -> &[(EdgeSet, usize)] {
        &self.blocks
    }

    pub fn rank(&self, f: &EdgeSet) -> usize {
        self.blocks
            .iter()
            .map(|(b, cap)| b.intersection(f).count().min(*cap))
            .sum()
    }

    fn delete(&self, f: &EdgeSet) -> Self {
        PartitionMatroid {
            blocks: self
                .blocks
                .iter()
                .map(|(b, cap)| (b.difference(f).copied().collect::<EdgeSet>(), *cap))
                .filter(|(b, _)| !b.is_empty())
                .collect(),
        }
    }

    fn contract(&self, f: &EdgeSet) -> Self {
        PartitionMatroid {
            blocks: self
                .blocks
                .iter()
                .map(|(b, cap)| {
                    let used = b.intersection(f).count();
                    (
                        b.difference(f).copied().collect::<EdgeSet>(),
                        cap.saturating_sub(used),
                    )
                })
                .filter(|(b, _)| !b.is_empty())
                .collect(),
        }
    }
}

#[derive(Clone)]
enum Repr {
    Graphic(GraphicMatroid),
    Partition(PartitionMatroid),
    Sum(Vec<Matroid>),
    Minor {
        base: Arc<Matroid>,
        contracted: EdgeSet,
        contracted_rank: usize,
    },
    Oracle(RankFn),
}

/// A summand of a matroid in the form the separation routines consume.
pub enum Leaf<'a> {
    Graphic(&'a GraphicMatroid),
    Partition(&'a PartitionMatroid),
    Generic(&'a Matroid),
}

#[derive(Clone)]
pub struct Matroid {
    repr: Repr,
    provenance: Provenance,
    ground: EdgeSet,
    memo: Arc<Mutex<HashMap<Vec<EdgeId>, usize>>>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matroid")
            .field("provenance", &self.provenance)
            .field("ground", &self.ground)
            .field("rank", &self.full_rank())
            .finish()
    }
}

impl Matroid {
    fn build(repr: Repr, provenance: Provenance, ground: EdgeSet) -> Self {
        Matroid {
            repr,
            provenance,
            ground,
            memo: Arc::default(),
        }
    }

    pub fn graphic(g: &Graph) -> Self {
        Self::from_graphic(GraphicMatroid::from_graph(g))
    }

    pub fn from_graphic(gm: GraphicMatroid) -> Self {
        let ground = gm.edges.keys().copied().collect();
        Self::build(Repr::Graphic(gm), Provenance::Graphic, ground)
    }

    pub fn partition(blocks: Vec<(EdgeSet, usize)>) -> Result<Self> {
        let mut ground = EdgeSet::new();
        for (b, _) in &blocks {
            for &e in b {
                if !ground.insert(e) {
                    return Err(Error::input(format!("edge {e} is in two partition blocks")));
                }
            }
        }
        let blocks = blocks.into_iter().filter(|(b, _)| !b.is_empty()).collect();
        Ok(Self::build(
            Repr::Partition(PartitionMatroid { blocks }),
            Provenance::Partition,
            ground,
        ))
    }

    /// A matroid known only through its rank function. The callback must
    /// satisfy the rank axioms on subsets of `ground`.
    pub fn from_rank_fn(ground: EdgeSet, rank: RankFn) -> Self {
        Self::build(Repr::Oracle(rank), Provenance::Oracle, ground)
    }

    pub fn ground(&self) -> &EdgeSet {
        &self.ground
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn check_subset(&self, f: &EdgeSet) -> Result<()> {
        match f.iter().find(|e| !self.ground.contains(e)) {
            Some(&e) => Err(Error::ForeignEdge(e)),
            None => Ok(()),
        }
    }

    pub fn rank(&self, f: &EdgeSet) -> Result<usize> {
        self.check_subset(f)?;
        Ok(self.rank_within(f))
    }

    pub fn full_rank(&self) -> usize {
        self.rank_within(&self.ground)
    }

    /// Rank of `f ∩ ground`.
    pub(crate) fn rank_within(&self, f: &EdgeSet) -> usize {
        match &self.repr {
            Repr::Graphic(g) => g.rank(f),
            Repr::Partition(p) => p.rank(f),
            Repr::Sum(parts) => parts
                .iter()
                .map(|m| {
                    let local: EdgeSet = f.intersection(&m.ground).copied().collect();
                    m.rank_within(&local)
                })
                .sum(),
            Repr::Minor {
                base,
                contracted,
                contracted_rank,
            } => self.memoized(f, || {
                let mut with: EdgeSet = f.intersection(&self.ground).copied().collect();
                with.extend(contracted.iter().copied());
                base.rank_within(&with) - contracted_rank
            }),
            Repr::Oracle(rank) => self.memoized(f, || {
                let local: EdgeSet = f.intersection(&self.ground).copied().collect();
                rank(&local)
            }),
        }
    }

    fn memoized(&self, f: &EdgeSet, compute: impl FnOnce() -> usize) -> usize {
        let key: Vec<EdgeId> = f.intersection(&self.ground).copied().collect();
        if let Some(&r) = self.memo.lock().unwrap().get(&key) {
            return r;
        }
        let r = compute();
        self.memo.lock().unwrap().insert(key, r);
        r
    }

    /// M ∖ F.
    pub fn delete(&self, f: &EdgeSet) -> Result<Self> {
        self.check_subset(f)?;
        Ok(self.delete_within(f).with_provenance(Provenance::Minor))
    }

    /// M / F.
    pub fn contract(&self, f: &EdgeSet) -> Result<Self> {
        self.check_subset(f)?;
        Ok(self.contract_within(f).with_provenance(Provenance::Minor))
    }

    /// M|F, the deletion of the complement of F.
    pub fn restrict(&self, f: &EdgeSet) -> Result<Self> {
        self.check_subset(f)?;
        let rest: EdgeSet = self.ground.difference(f).copied().collect();
        Ok(self.delete_within(&rest).with_provenance(Provenance::Minor))
    }

    fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = p;
        self
    }

    fn delete_within(&self, f: &EdgeSet) -> Self {
        let ground: EdgeSet = self.ground.difference(f).copied().collect();
        match &self.repr {
            Repr::Graphic(g) => Self::from_graphic(g.delete(f)),
            Repr::Partition(p) => Self::build(Repr::Partition(p.delete(f)), Provenance::Partition, ground),
            Repr::Sum(parts) => Self::sum_unchecked(parts.iter().map(|m| m.delete_within(f)).collect()),
            Repr::Minor {
                base,
                contracted,
                contracted_rank,
            } => Self::build(
                Repr::Minor {
                    base: base.clone(),
                    contracted: contracted.clone(),
                    contracted_rank: *contracted_rank,
                },
                Provenance::Minor,
                ground,
            ),
            Repr::Oracle(_) => Self::build(
                Repr::Minor {
                    base: Arc::new(self.clone()),
                    contracted: EdgeSet::new(),
                    contracted_rank: 0,
                },
                Provenance::Minor,
                ground,
            ),
        }
    }

    fn contract_within(&self, f: &EdgeSet) -> Self {
        let f: EdgeSet = f.intersection(&self.ground).copied().collect();
        let ground: EdgeSet = self.ground.difference(&f).copied().collect();
        match &self.repr {
            Repr::Graphic(g) => Self::from_graphic(g.contract(&f)),
            Repr::Partition(p) => Self::build(Repr::Partition(p.contract(&f)), Provenance::Partition, ground),
            Repr::Sum(parts) => Self::sum_unchecked(parts.iter().map(|m| m.contract_within(&f)).collect()),
            Repr::Minor {
                base, contracted, ..
            } => {
                let mut c = contracted.clone();
                c.extend(f.iter().copied());
                let contracted_rank = base.rank_within(&c);
                Self::build(
                    Repr::Minor {
                        base: base.clone(),
                        contracted: c,
                        contracted_rank,
                    },
                    Provenance::Minor,
                    ground,
                )
            }
            Repr::Oracle(_) => Self::build(
                Repr::Minor {
                    base: Arc::new(self.clone()),
                    contracted_rank: self.rank_within(&f),
                    contracted: f,
                },
                Provenance::Minor,
                ground,
            ),
        }
    }

    /// Direct sum; ground sets must be pairwise disjoint.
    pub fn direct_sum(parts: Vec<Matroid>) -> Result<Self> {
        let mut seen = EdgeSet::new();
        for m in &parts {
            if let Some(&e) = m.ground.iter().find(|e| seen.contains(e)) {
                return Err(Error::input(format!("edge {e} is in two summands")));
            }
            seen.extend(m.ground.iter().copied());
        }
        Ok(Self::sum_unchecked(parts))
    }

    fn sum_unchecked(parts: Vec<Matroid>) -> Self {
        let mut flat = Vec::new();
        for m in parts {
            match m.repr {
                Repr::Sum(inner) => flat.extend(inner),
                _ if m.ground.is_empty() => {}
                _ => flat.push(m),
            }
        }
        let ground = flat.iter().flat_map(|m| m.ground.iter().copied()).collect();
        Self::build(Repr::Sum(flat), Provenance::DirectSum, ground)
    }

    /// Direct sum of M|R and M/R. Every basis of the result is a basis of M.
    pub fn refine(&self, r: &EdgeSet) -> Result<Self> {
        self.check_subset(r)?;
        if r.is_empty() || r.len() == self.ground.len() {
            return Err(Error::input("refinement set must be a nonempty proper subset"));
        }
        Ok(self.refine_unchecked(r))
    }

    fn refine_unchecked(&self, r: &EdgeSet) -> Self {
        let rest: EdgeSet = self.ground.difference(r).copied().collect();
        Self::sum_unchecked(vec![self.delete_within(&rest), self.contract_within(r)])
            .with_provenance(Provenance::Refined)
    }

    /// Refines along E(S) for every member S, children before parents. Sets
    /// whose edge set is empty or the whole ground set are skipped.
    pub fn refine_along_family(&self, g: &Graph, fam: &LaminarFamily) -> Self {
        let mut m = self.clone();
        for s in fam.bottom_up() {
            let r: EdgeSet = g
                .inner_edges(&s.members)
                .intersection(&m.ground)
                .copied()
                .collect();
            if !r.is_empty() && r.len() < m.ground.len() {
                m = m.refine_unchecked(&r);
            }
        }
        m
    }

    /// Non-sum summands (a single leaf for anything that is not a sum).
    pub fn leaves(&self) -> Vec<Leaf<'_>> {
        match &self.repr {
            Repr::Graphic(g) => vec![Leaf::Graphic(g)],
            Repr::Partition(p) => vec![Leaf::Partition(p)],
            Repr::Sum(parts) => parts.iter().flat_map(|m| m.leaves()).collect(),
            _ => vec![Leaf::Generic(self)],
        }
    }

    /// Ground sets of the direct-sum components.
    pub fn component_grounds(&self) -> Vec<EdgeSet> {
        match &self.repr {
            Repr::Sum(parts) => parts.iter().map(|m| m.ground.clone()).collect(),
            _ => vec![self.ground.clone()],
        }
    }

    pub fn is_independent(&self, f: &EdgeSet) -> bool {
        f.is_subset(&self.ground) && self.rank_within(f) == f.len()
    }

    pub fn is_basis(&self, b: &EdgeSet) -> bool {
        self.is_independent(b) && b.len() == self.full_rank()
    }

    /// Returns the first S (in id order) with x(E(S)) ≠ rank(E(S)).
    pub fn is_aligned_point(&self, g: &Graph, fam: &LaminarFamily, x: &FracPoint) -> Option<SetId> {
        fam.iter()
            .find(|s| {
                let inner: EdgeSet = g
                    .inner_edges(&s.members)
                    .intersection(&self.ground)
                    .copied()
                    .collect();
                x.sum(&inner) != crate::Rational::from(self.rank_within(&inner))
            })
            .map(|s| s.id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LaminarSet;
    use crate::Rational;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(v: &[u32]) -> EdgeSet {
        v.iter().map(|&i| EdgeId(i)).collect()
    }

    fn four_cycle() -> Graph {
        Graph::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn subsets(ground: &EdgeSet) -> Vec<EdgeSet> {
        let v: Vec<EdgeId> = ground.iter().copied().collect();
        (0u32..1 << v.len())
            .map(|mask| (0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect())
            .collect()
    }

    fn bases(m: &Matroid) -> BTreeSet<EdgeSet> {
        subsets(m.ground()).into_iter().filter(|b| m.is_basis(b)).collect()
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Graph {
        let mut pairs = Vec::new();
        while pairs.len() < m {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v {
                pairs.push((u, v));
            }
        }
        Graph::from_pairs(n, &pairs).unwrap()
    }

    fn check_axioms(m: &Matroid, rng: &mut ChaCha8Rng, trials: usize) {
        let ground: Vec<EdgeId> = m.ground().iter().copied().collect();
        let pick = |rng: &mut ChaCha8Rng| -> EdgeSet {
            ground.iter().filter(|_| rng.gen_bool(0.5)).copied().collect()
        };
        assert_eq!(m.rank(&EdgeSet::new()).unwrap(), 0);
        for _ in 0..trials {
            let (a, b) = (pick(rng), pick(rng));
            let ra = m.rank(&a).unwrap();
            assert!(ra <= a.len());
            let union: EdgeSet = a.union(&b).copied().collect();
            let inter: EdgeSet = a.intersection(&b).copied().collect();
            let (ru, ri, rb) = (m.rank(&union).unwrap(), m.rank(&inter).unwrap(), m.rank(&b).unwrap());
            assert!(ru + ri <= ra + rb, "submodularity");
            assert!(ri <= ra && ra <= ru, "monotonicity");
            if let Some(&e) = ground.iter().find(|e| !a.contains(e)) {
                let mut ae = a.clone();
                ae.insert(e);
                let r = m.rank(&ae).unwrap();
                assert!(r == ra || r == ra + 1, "unit increase");
            }
        }
    }

    #[test]
    fn graphic_rank_examples() {
        let m = Matroid::graphic(&four_cycle());
        assert_eq!(m.full_rank(), 3);
        assert_eq!(m.rank(&EdgeSet::new()).unwrap(), 0);
        assert!(matches!(m.rank(&ids(&[9])), Err(Error::ForeignEdge(EdgeId(9)))));
        let two_triangles =
            Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        assert_eq!(Matroid::graphic(&two_triangles).full_rank(), 4);
    }

    #[test]
    fn minors_of_four_cycle() {
        let m = Matroid::graphic(&four_cycle());
        let c = m.contract(&ids(&[0])).unwrap();
        assert_eq!(c.ground(), &ids(&[1, 2, 3]));
        assert_eq!(c.full_rank(), 2);
        assert_eq!(c.provenance(), Provenance::Minor);
        let d = m.delete(&ids(&[0])).unwrap();
        assert_eq!(d.full_rank(), 3);
        let r = m.restrict(&ids(&[0, 1])).unwrap();
        assert_eq!(r.ground(), &ids(&[0, 1]));
        assert_eq!(r.full_rank(), 2);
    }

    #[test]
    fn contraction_identity_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let g = random_graph(&mut rng, 6, 9);
            let m = Matroid::graphic(&g);
            let e = EdgeId(rng.gen_range(0..9));
            let me = m.contract(&[e].into()).unwrap();
            for a in subsets(me.ground()).into_iter().step_by(7) {
                let mut ae = a.clone();
                ae.insert(e);
                assert_eq!(me.rank(&a).unwrap(), m.rank(&ae).unwrap() - 1);
            }
        }
    }

    #[test]
    fn contracting_parallel_edge_leaves_loop() {
        let g = Graph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap();
        let m = Matroid::graphic(&g).contract(&ids(&[0])).unwrap();
        assert_eq!(m.ground(), &ids(&[1]));
        assert_eq!(m.full_rank(), 0);
    }

    #[test]
    fn direct_sum_examples() {
        let a = Matroid::partition(vec![(ids(&[0]), 1)]).unwrap();
        let b = Matroid::partition(vec![(ids(&[1]), 1)]).unwrap();
        let s = Matroid::direct_sum(vec![a.clone(), b.clone()]).unwrap();
        assert_eq!(s.rank(&ids(&[0, 1])).unwrap(), 2);

        let empty = Matroid::partition(vec![]).unwrap();
        let same = Matroid::direct_sum(vec![a.clone(), empty]).unwrap();
        for f in subsets(a.ground()) {
            assert_eq!(same.rank(&f).unwrap(), a.rank(&f).unwrap());
        }
        assert!(Matroid::direct_sum(vec![a.clone(), a]).is_err());
    }

    #[test]
    fn direct_sum_of_laminar_pieces() {
        // two triangles joined by an edge; pieces: G[{0,1,2}], G[{3,4,5}], and
        // the contracted quotient (2 vertices, 1 edge)
        let g = Graph::from_pairs(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
            .unwrap();
        let left = g.induced(&[0, 1, 2].into()).unwrap().graph;
        let right = g.induced(&[3, 4, 5].into()).unwrap().graph;
        let quotient = g.contract_sets(&[[0, 1, 2].into(), [3, 4, 5].into()]).unwrap().graph;
        let s = Matroid::direct_sum(vec![
            Matroid::graphic(&left),
            Matroid::graphic(&right),
            Matroid::graphic(&quotient),
        ])
        .unwrap();
        assert_eq!(s.full_rank(), (3 - 1) + (3 - 1) + (2 - 1));
    }

    #[test]
    fn refine_four_cycle_on_one_edge() {
        let m = Matroid::graphic(&four_cycle());
        let r = m.refine(&ids(&[0])).unwrap();
        assert_eq!(r.provenance(), Provenance::Refined);
        let expected: BTreeSet<EdgeSet> = bases(&m).into_iter().filter(|b| b.contains(&EdgeId(0))).collect();
        assert_eq!(expected.len(), 3);
        assert_eq!(bases(&r), expected);
        assert!(m.refine(&EdgeSet::new()).is_err());
        assert!(m.refine(m.ground()).is_err());
        // R spanning: contracted part has rank 0
        let spanning = m.refine(&ids(&[0, 1, 2])).unwrap();
        assert_eq!(spanning.full_rank(), 3);
        assert_eq!(m.contract(&ids(&[0, 1, 2])).unwrap().full_rank(), 0);
    }

    #[test]
    fn nested_refinements_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = random_graph(&mut rng, 6, 10);
            let m = Matroid::graphic(&g);
            let inner = g.inner_edges(&[0, 1, 2].into());
            let outer = g.inner_edges(&[0, 1, 2, 3, 4].into());
            if inner.is_empty() || outer.len() == inner.len() || outer.len() == 10 {
                continue;
            }
            let ab = m.refine(&inner).unwrap().refine(&outer).unwrap();
            let ba = m.refine(&outer).unwrap().refine(&inner).unwrap();
            for f in subsets(m.ground()).into_iter().step_by(5) {
                assert_eq!(ab.rank(&f).unwrap(), ba.rank(&f).unwrap());
            }
        }
    }

    #[test]
    fn refined_bases_are_bases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_graph(&mut rng, 5, 8);
            let m = Matroid::graphic(&g);
            let r = g.inner_edges(&[0, 1, 2].into());
            if r.is_empty() || r.len() == 8 {
                continue;
            }
            let refined = m.refine(&r).unwrap();
            for b in bases(&refined) {
                assert!(m.is_basis(&b));
            }
        }
    }

    #[test]
    fn refine_along_family_examples() {
        let g = four_cycle();
        let m = Matroid::graphic(&g);
        let whole = LaminarFamily::new(vec![LaminarSet::new(0, 0..4, None)]).unwrap();
        let same = m.refine_along_family(&g, &whole);
        for f in subsets(m.ground()) {
            assert_eq!(same.rank(&f).unwrap(), m.rank(&f).unwrap());
        }

        let fam = LaminarFamily::new(vec![LaminarSet::new(0, [0, 1], None)]).unwrap();
        let refined = m.refine_along_family(&g, &fam);
        let expected: BTreeSet<EdgeSet> = bases(&m).into_iter().filter(|b| b.contains(&EdgeId(0))).collect();
        assert_eq!(bases(&refined), expected);
        assert_eq!(refined.full_rank(), m.full_rank());
    }

    #[test]
    fn refined_matroid_is_aligned() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = LaminarFamily::new(vec![
            LaminarSet::new(0, [0, 1], None),
            LaminarSet::new(1, [0, 1, 2], None),
            LaminarSet::new(2, [3, 4], None),
        ])
        .unwrap();
        for _ in 0..20 {
            let g = random_graph(&mut rng, 6, 10);
            if !g.is_connected() {
                continue;
            }
            let m = Matroid::graphic(&g);
            let refined = m.refine_along_family(&g, &fam);
            assert_eq!(refined.full_rank(), m.full_rank());
            for b in bases(&refined) {
                for s in fam.iter() {
                    let inner = g.inner_edges(&s.members);
                    let got = b.intersection(&inner).count();
                    assert_eq!(got, m.rank(&inner).unwrap());
                }
            }
        }
    }

    #[test]
    fn aligned_point_witness() {
        let g = four_cycle();
        let m = Matroid::graphic(&g);
        let fam = LaminarFamily::new(vec![LaminarSet::new(4, [0, 1], None)]).unwrap();
        let x = FracPoint::uniform(&g.edge_ids(), &Rational::new(3, 4));
        assert_eq!(m.is_aligned_point(&g, &fam, &x), Some(SetId(4)));
        let refined = m.refine_along_family(&g, &fam);
        let basis = bases(&refined).into_iter().next().unwrap();
        assert_eq!(refined.is_aligned_point(&g, &fam, &FracPoint::characteristic(&basis)), None);
    }

    #[test]
    fn partition_matroid_minors() {
        let m = Matroid::partition(vec![(ids(&[0, 1, 2]), 2), (ids(&[3, 4]), 1)]).unwrap();
        assert_eq!(m.full_rank(), 3);
        let c = m.contract(&ids(&[0, 3])).unwrap();
        for a in subsets(c.ground()) {
            let mut with = a.clone();
            with.extend(ids(&[0, 3]));
            assert_eq!(c.rank(&a).unwrap(), m.rank(&with).unwrap() - 2);
        }
    }

    #[test]
    fn oracle_matroid_minors_match_formulas() {
        // uniform matroid U(2,5) through a callback
        let ground = ids(&[0, 1, 2, 3, 4]);
        let m = Matroid::from_rank_fn(ground.clone(), Arc::new(|f: &EdgeSet| f.len().min(2)));
        let c = m.contract(&ids(&[0])).unwrap();
        let d = c.delete(&ids(&[1])).unwrap();
        assert_eq!(c.full_rank(), 1);
        assert_eq!(d.ground(), &ids(&[2, 3, 4]));
        for a in subsets(d.ground()) {
            let mut with = a.clone();
            with.insert(EdgeId(0));
            assert_eq!(d.rank(&a).unwrap(), m.rank(&with).unwrap() - 1);
        }
    }

    proptest! {
        #[test]
        fn rank_axioms_hold(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_graph(&mut rng, 6, 10);
            let m = Matroid::graphic(&g);
            check_axioms(&m, &mut rng, 10);
            let r = g.inner_edges(&[0, 1, 2].into());
            if !r.is_empty() && r.len() < 10 {
                check_axioms(&m.refine(&r).unwrap(), &mut rng, 10);
            }
            let e = EdgeId(rng.gen_range(0..10));
            check_axioms(&m.contract(&[e].into()).unwrap(), &mut rng, 10);
            let p = Matroid::partition(vec![(ids(&[0, 1, 2, 3]), 2), (ids(&[4, 5]), 1)]).unwrap();
            check_axioms(&p, &mut rng, 10);
        }
    }
}
