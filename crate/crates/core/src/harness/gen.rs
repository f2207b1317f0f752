//! Seeded instance generators.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matroid::EdgeSet;
use crate::model::{
    default_eta, DisjointSets, Edge, EdgeId, FracPoint, Graph, Instance, LaminarFamily, LaminarSet, VertexSet,
};
use crate::oracles::edge_connectivity;
use crate::Rational;

pub const MAX_FAMILY_SIZE: usize = 12;
const K_CONNECTED_RETRIES: u64 = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random spanning tree on `0..n` plus `extra` random non-loop edges.
pub fn random_connected_graph(n: usize, extra: usize, rng: &mut impl Rng) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        pairs.push((parent, order[i]));
    }
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            pairs.push((u, v));
        }
    }
    pairs.shuffle(rng);
    Graph::from_pairs(n, &pairs).expect("generated pairs are valid")
}

/// Union of ⌈k/2⌉ shuffled Hamiltonian cycles, accepted once its minimum cut
/// is at least k.
pub fn gen_k_connected(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if n < 3 || k < 1 {
        return Err(Error::input("k-connected generator needs n >= 3 and k >= 1"));
    }
    for attempt in 0..K_CONNECTED_RETRIES {
        let mut r = rng(seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)));
        let mut edges = Vec::new();
        for _ in 0..k.div_ceil(2) {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut r);
            for i in 0..n {
                let id = edges.len() as u32;
                edges.push(Edge::new(id, order[i], order[(i + 1) % n]));
            }
        }
        let g = Graph::new(n, edges)?;
        if edge_connectivity(&g).is_some_and(|(c, _)| c >= k) {
            return Ok(g);
        }
    }
    Err(Error::input(format!(
        "no {k}-edge-connected union of cycles on {n} vertices after {K_CONNECTED_RETRIES} attempts"
    )))
}

/// Recursive random splitting of the vertex set. Depth 1 gives the ground
/// set and one level of blocks. At most [`MAX_FAMILY_SIZE`] members.
pub fn gen_laminar(g: &Graph, seed: u64, max_depth: usize) -> LaminarFamily {
    let mut r = rng(seed);
    let ground = g.vertices();
    let mut sets = vec![ground.clone()];
    let mut frontier = vec![(ground, 0)];
    while let Some((s, depth)) = frontier.pop() {
        if depth >= max_depth || s.len() < 2 {
            continue;
        }
        let mut members: Vec<usize> = s.into_iter().collect();
        members.shuffle(&mut r);
        let parts = r.gen_range(2..=members.len().min(3));
        let mut blocks = vec![VertexSet::new(); parts];
        for (i, &v) in members.iter().enumerate() {
            let b = if i < parts { i } else { r.gen_range(0..parts) };
            blocks[b].insert(v);
        }
        for b in blocks {
            if sets.len() >= MAX_FAMILY_SIZE {
                break;
            }
            // keep some blocks out of the family so not every level is complete
            if r.gen_bool(0.8) && !sets.contains(&b) {
                sets.push(b.clone());
            }
            frontier.push((b, depth + 1));
        }
    }
    let sets = sets
        .into_iter()
        .enumerate()
        .map(|(i, s)| LaminarSet::new(i as u32, s, None))
        .collect();
    LaminarFamily::new(sets).expect("recursive splitting is laminar")
}

/// A uniformly shuffled Kruskal tree.
pub fn random_spanning_tree(g: &Graph, rng: &mut impl Rng) -> EdgeSet {
    let mut edges: Vec<&Edge> = g.edges().iter().collect();
    edges.shuffle(rng);
    let mut ds = DisjointSets::new(g.vertex_count());
    edges
        .into_iter()
        .filter(|e| ds.union(e.u, e.v))
        .map(|e| e.id)
        .collect()
}

/// A random spanning tree whose trace on every E(S) is a maximal forest of
/// E(S): edges are offered bottom-up through the family.
pub fn random_aligned_tree(g: &Graph, fam: &LaminarFamily, rng: &mut impl Rng) -> EdgeSet {
    let mut ds = DisjointSets::new(g.vertex_count());
    let mut tree = EdgeSet::new();
    let mut offer = |ids: Vec<EdgeId>, ds: &mut DisjointSets, tree: &mut EdgeSet| {
        let mut ids = ids;
        ids.shuffle(rng);
        for id in ids {
            let e = g.edge(id).expect("own edge");
            if ds.union(e.u, e.v) {
                tree.insert(id);
            }
        }
    };
    for s in fam.bottom_up() {
        offer(g.inner_edges(&s.members).into_iter().collect(), &mut ds, &mut tree);
    }
    offer(g.edges().iter().map(|e| e.id).collect(), &mut ds, &mut tree);
    tree
}

/// A convex combination of two to four family-aligned spanning trees with
/// random rational weights.
pub fn gen_aligned_point(g: &Graph, fam: &LaminarFamily, seed: u64) -> FracPoint {
    let mut r = rng(seed);
    let count = r.gen_range(2..=4);
    let weights: Vec<i64> = (0..count).map(|_| r.gen_range(1..=5)).collect();
    let total: i64 = weights.iter().sum();
    let mut x = FracPoint::uniform(&g.edge_ids(), &Rational::zero());
    for w in weights {
        let share = Rational::new(w, total);
        for e in random_aligned_tree(g, fam, &mut r) {
            x.set(e, x.get(e) + &share);
        }
    }
    x
}

/// Bounds b_S = |T* ∩ δ(S)| for a random spanning tree T*, returned together
/// with T*.
pub fn gen_feasible_bounds(g: &Graph, fam: &LaminarFamily, seed: u64) -> (LaminarFamily, EdgeSet) {
    let tree = random_spanning_tree(g, &mut rng(seed));
    let bounded = fam.with_bounds(|s| {
        Some(g.cut_edges_unchecked(&s.members).intersection(&tree).count() as u64)
    });
    (bounded, tree)
}

/// Costs p/q with p in 0..=20 and q in 1..=6.
pub fn random_costs(g: &Graph, rng: &mut impl Rng) -> BTreeMap<EdgeId, Rational> {
    g.edges()
        .iter()
        .map(|e| (e.id, Rational::new(rng.gen_range(0..=20), rng.gen_range(1..=6))))
        .collect()
}

/// Sizes of one generated instance.
#[derive(Debug, Clone, Copy)]
pub struct DeskParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub max_depth: usize,
}

impl Default for DeskParams {
    fn default() -> Self {
        DeskParams {
            min_vertices: 3,
            max_vertices: 10,
            max_depth: 3,
        }
    }
}

/// A random feasible instance: connected graph, random laminar family with
/// bounds read off a random spanning tree, random rational costs.
pub fn gen_instance(seed: u64, params: DeskParams) -> Instance {
    let mut r = rng(seed);
    let n = r.gen_range(params.min_vertices..=params.max_vertices);
    let extra = r.gen_range(0..=n + n / 2);
    let g = random_connected_graph(n, extra, &mut r);
    let fam = gen_laminar(&g, r.gen(), params.max_depth);
    let (fam, _) = gen_feasible_bounds(&g, &fam, r.gen());
    let costs = random_costs(&g, &mut r);
    Instance::new(g, fam, costs, default_eta()).expect("generated instances are valid")
}

/// Seeds in a plain-text manifest: one integer per line, `#` comments.
pub fn parse_seed_manifest(text: &str) -> Result<Vec<u64>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.parse().map_err(|_| Error::input(format!("bad seed line {l:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_laminar;

    #[test]
    fn aligned_points_are_aligned() {
        use crate::matroid::Matroid;
        use crate::oracles::in_tree_polytope;
        for seed in 0..30 {
            let inst = gen_instance(seed, DeskParams::default());
            let x = gen_aligned_point(&inst.graph, &inst.family, seed);
            assert!(in_tree_polytope(&inst.graph, &x).unwrap());
            assert_eq!(Matroid::graphic(&inst.graph).is_aligned_point(&inst.graph, &inst.family, &x), None);
        }
    }

    #[test]
    fn cycles_for_k_two() {
        let g = gen_k_connected(4, 2, 7).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(edge_connectivity(&g).unwrap().0, 2);
    }

    #[test]
    fn four_connected_on_eight() {
        let g = gen_k_connected(8, 4, 11).unwrap();
        assert!(edge_connectivity(&g).unwrap().0 >= 4);
        let odd = gen_k_connected(8, 3, 5).unwrap();
        assert!(edge_connectivity(&odd).unwrap().0 >= 3);
    }

    #[test]
    fn laminar_families_are_valid() {
        for seed in 0..500 {
            let g = random_connected_graph(10, 5, &mut rng(seed));
            let fam = gen_laminar(&g, seed, 3);
            assert!(validate_laminar(fam.sets()).is_ok());
            assert!(fam.len() <= MAX_FAMILY_SIZE);
            assert!(fam.find_members(&g.vertices()).is_some());
        }
    }

    #[test]
    fn depth_one_is_ground_plus_blocks() {
        let g = random_connected_graph(6, 2, &mut rng(3));
        let fam = gen_laminar(&g, 3, 1);
        let ground = g.vertices();
        for s in fam.iter() {
            assert!(s.members == ground || fam.maximal_proper_subsets(&ground).iter().any(|t| t.id == s.id));
        }
    }

    #[test]
    fn witness_tree_meets_bounds() {
        let inst = gen_instance(42, DeskParams::default());
        let (fam, tree) = gen_feasible_bounds(&inst.graph, &inst.family, 9);
        assert!(inst.graph.is_spanning_tree(&tree));
        assert!(super::super::brute::meets_bounds(&inst.graph, &fam, &tree));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = gen_instance(5, DeskParams::default());
        let b = gen_instance(5, DeskParams::default());
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.family, b.family);
        assert_eq!(a.costs, b.costs);
    }

    #[test]
    fn manifest_parsing() {
        assert_eq!(parse_seed_manifest("# seeds\n1\n 2 # two\n\n3").unwrap(), vec![1, 2, 3]);
        assert!(parse_seed_manifest("x").is_err());
    }
}
