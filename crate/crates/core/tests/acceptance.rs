//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use lamtree::harness::{
    brute_best_tree, brute_min_partition, brute_separate_forest, gen_aligned_point, gen_instance,
    gen_k_connected, gen_laminar, parse_seed_manifest, random_connected_graph, rng, DeskParams,
};
use lamtree::lp::LinearProgram;
use lamtree::matroid::{EdgeSet, Matroid};
use lamtree::model::{EdgeId, FracPoint, Graph, Instance, LaminarFamily, VertexSet};
use lamtree::oracles::{is_well_connected, min_partition, separate_forest};
use lamtree::pipeline::{lp2, solve_from_point, solve_lp2, thinness_factor};
use lamtree::reduction::{check_block_sums, reduce};
use lamtree::rounding::round_aligned;
use lamtree::{Error, Rational};
use rand::Rng;

const CORPUS: &str = include_str!("data/corpus_seeds.txt");
const K_SEEDS: &str = include_str!("data/k_connected_seeds.txt");

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn etas() -> Vec<Rational> {
    vec![r(5, 2), r(3, 1), r(4, 1), r(93, 20), r(10, 1)]
}

/// |T ∩ δ(S)| counted edge by edge.
fn crossings(g: &Graph, s: &VertexSet, tree: &EdgeSet) -> usize {
    g.edges()
        .iter()
        .filter(|e| tree.contains(&e.id) && s.contains(&e.u) != s.contains(&e.v))
        .count()
}

fn load(g: &Graph, s: &VertexSet, x: &FracPoint) -> Rational {
    g.edges()
        .iter()
        .filter(|e| s.contains(&e.u) != s.contains(&e.v))
        .map(|e| x.get(e.id))
        .sum()
}

fn degree(g: &Graph, s: &VertexSet) -> usize {
    g.edges().iter().filter(|e| s.contains(&e.u) != s.contains(&e.v)).count()
}

fn cost(costs: &BTreeMap<EdgeId, Rational>, tree: &EdgeSet) -> Rational {
    tree.iter().map(|e| costs[e].clone()).sum()
}

fn point_cost(costs: &BTreeMap<EdgeId, Rational>, x: &FracPoint) -> Rational {
    x.iter().map(|(e, v)| v * &costs[&e]).sum()
}

/// Failures collected for one criterion; the first few are shown.
#[derive(Default)]
struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn line(&self, n: usize, title: &str, detail: &str) -> bool {
        let pass = self.failures.is_empty() && self.checks > 0;
        println!(
            "criterion {n} [{}] {title}: {} checks, {} failures; {detail}",
            if pass { "PASS" } else { "FAIL" },
            self.checks,
            self.failures.len()
        );
        for f in self.failures.iter().take(5) {
            println!("    {f}");
        }
        pass
    }
}

/// Everything the corpus-driven criteria look at.
#[derive(Default)]
struct Sweep {
    main: Tally,
    eta: Tally,
    aligned: Tally,
    reduction: Tally,
    depth: Tally,
    lp: Tally,
    instances: usize,
    aligned_inputs: usize,
    reduction_runs: usize,
    infeasible: usize,
}

fn round_stage(t: &mut Tally, depth: &mut Tally, inst: &Instance, fam: &LaminarFamily, x: &FracPoint, tag: &str) {
    let g = &inst.graph;
    match round_aligned(g, fam, x, &inst.costs) {
        Ok(out) => {
            let c = cost(&inst.costs, &out.basis);
            let cx = point_cost(&inst.costs, x);
            t.check(g.is_spanning_tree(&out.basis), || format!("{tag}: not a spanning tree"));
            t.check(c <= cx, || format!("{tag}: c(T) = {c} > c(x) = {cx}"));
            for s in fam.iter() {
                let k = Rational::from(crossings(g, &s.members, &out.basis));
                let bound = Rational::from(2) * load(g, &s.members, x).ceil() + Rational::one();
                t.check(k <= bound, || format!("{tag}: {} crossed {k} > {bound}", s.id));
            }
            depth.check(out.depth <= g.edge_count() + fam.len(), || {
                format!("{tag}: depth {} > |E| + |L| = {}", out.depth, g.edge_count() + fam.len())
            });
        }
        Err(e) => t.check(false, || format!("{tag}: {e}")),
    }
}

fn sweep(seeds: &[u64]) -> Sweep {
    let mut sw = Sweep::default();
    let five = r(5, 1);
    let twenty_two = r(22, 1);
    for &seed in seeds {
        let inst = gen_instance(seed, DeskParams::default());
        let g = &inst.graph;
        let n = g.vertex_count();
        sw.instances += 1;

        // LP soundness against brute force, on the instance and on a tightened copy
        let mut tightened = inst.family.clone();
        let mut pick = rng(seed ^ 0x5eed);
        let victim = pick.gen_range(0..inst.family.len());
        let drop = pick.gen_range(1..=2u64);
        tightened = tightened.with_bounds(|s| {
            if s.id.0 as usize == victim {
                s.bound.map(|b| b.saturating_sub(drop))
            } else {
                s.bound
            }
        });
        for (fam, tag) in [(&inst.family, "given"), (&tightened, "tightened")] {
            let tag = format!("seed {seed} {tag}");
            let brute = brute_best_tree(g, fam, &inst.costs);
            let lp: LinearProgram = lp2(g, fam, &inst.costs).expect("connected");
            match (lp.solve_basic(), brute) {
                (Ok(sol), Ok(Some((_, best)))) => {
                    sw.lp.check(sol.value <= best, || format!("{tag}: LP {} > best tree {best}", sol.value));
                    sw.lp.check(lp.check_solution(&sol).is_ok(), || format!("{tag}: not a vertex"));
                }
                (Err(Error::Infeasible(_)), Ok(None)) => {
                    sw.infeasible += 1;
                    sw.lp.check(true, String::new);
                }
                (a, b) => sw.lp.check(false, || {
                    format!("{tag}: LP {:?} vs brute {:?}", a.map(|s| s.value), b.map(|o| o.map(|p| p.1)))
                }),
            }
        }

        let sol = match solve_lp2(g, &inst.family, &inst.costs) {
            Ok(sol) => sol,
            Err(e) => {
                sw.main.check(false, || format!("seed {seed}: {e}"));
                continue;
            }
        };
        let x = &sol.x;
        let cx = point_cost(&inst.costs, x);
        for eta in etas() {
            let tag = format!("seed {seed} η={eta}");
            let inst_eta = Instance { eta: eta.clone(), ..inst.clone() };
            let run = match solve_from_point(&inst_eta, x) {
                Ok(run) => run,
                Err(e) => {
                    sw.eta.check(false, || format!("{tag}: {e}"));
                    continue;
                }
            };
            let tree = &run.tree;
            let ct = cost(&inst.costs, tree);
            let factor = thinness_factor(&eta);
            sw.eta.check(g.is_spanning_tree(tree), || format!("{tag}: not a spanning tree"));
            sw.eta.check(ct <= &eta * &cx, || format!("{tag}: c(T) = {ct} > η·{cx}"));
            for s in inst.family.iter() {
                let k = Rational::from(crossings(g, &s.members, tree));
                let xd = load(g, &s.members, x);
                sw.eta.check(k <= &factor * &xd, || format!("{tag}: {} crossed {k} > {factor}·{xd}", s.id));
                if eta == r(93, 20) {
                    // 0 < 0 is read as the vacuous case for sets with empty boundary
                    let ok = if xd.is_zero() { k.is_zero() } else { k < &twenty_two * &xd };
                    sw.main.check(ok, || format!("seed {seed}: {} crossed {k}, x(δ) = {xd}", s.id));
                }
            }
            if eta == r(93, 20) {
                let ok = if cx.is_zero() { ct.is_zero() } else { ct < &five * &cx };
                sw.main.check(ok, || format!("seed {seed}: c(T) = {ct}, c(x) = {cx}"));
            }

            // reduction stage on its own
            sw.reduction_runs += 1;
            match reduce(g, &inst.family, x, &eta) {
                Ok(red) => {
                    let xp = &red.aligned_point;
                    let fam2 = &red.reduction.family;
                    sw.reduction.check(
                        x.ids().iter().all(|&e| xp.get(e) <= &eta * &x.get(e)) && xp.ids().is_subset(&g.edge_ids()),
                        || format!("{tag}: x' not below ηx"),
                    );
                    sw.reduction.check(Matroid::graphic(g).is_aligned_point(g, fam2, xp).is_none(), || {
                        format!("{tag}: x' not aligned")
                    });
                    for s in fam2.iter() {
                        sw.reduction.check(is_well_connected(g, x, &s.members, &eta).unwrap_or(false), || {
                            format!("{tag}: {} not well connected", s.id)
                        });
                    }
                    sw.reduction
                        .check(check_block_sums(g, &red.reduction, x, &eta).is_ok(), || format!("{tag}: block sums"));
                    let iters = red.reduction.trace.len();
                    sw.depth.check(iters < 2 * n, || format!("{tag}: {iters} reduction iterations on {n} vertices"));
                    sw.depth.check(run.rounding_depth <= run.rounding_measure, || format!("{tag}: rounding depth"));

                    if eta == r(93, 20) {
                        sw.aligned_inputs += 1;
                        let bounded = fam2.with_bounds(|_| None);
                        let local = Instance { family: bounded.clone(), ..inst.clone() };
                        round_stage(&mut sw.aligned, &mut sw.depth, &local, &bounded, xp, &tag);
                    }
                }
                Err(e) => sw.reduction.check(false, || format!("{tag}: {e}")),
            }
        }

        // a directly built aligned point on the original family
        sw.aligned_inputs += 1;
        let xa = gen_aligned_point(g, &inst.family, seed);
        round_stage(&mut sw.aligned, &mut sw.depth, &inst, &inst.family, &xa, &format!("seed {seed} direct"));
    }
    sw
}

fn random_weighted_graph(seed: u64, max_n: usize) -> (Graph, FracPoint) {
    let mut g_rng = rng(seed);
    let n = g_rng.gen_range(2..=max_n);
    let extra = g_rng.gen_range(0..=2 * n);
    let g = random_connected_graph(n, extra, &mut g_rng);
    let w = g
        .edge_ids()
        .into_iter()
        .map(|e| (e, Rational::new(g_rng.gen_range(0..=8), g_rng.gen_range(1..=4))))
        .collect();
    (g, w)
}

fn oracle_equivalence() -> (Tally, String) {
    let mut t = Tally::default();
    for seed in 0..200u64 {
        let (g, w) = random_weighted_graph(seed, 8);
        match (min_partition(&g, &w), brute_min_partition(&g, &w)) {
            (Ok((p, v)), Ok((_, bv))) => {
                t.check(v == bv, || format!("min partition seed {seed}: {v} vs {bv}"));
                let own = w.sum(&g.delta_partition(&p)) - Rational::from(p.len() - 1);
                t.check(own == bv, || format!("min partition seed {seed}: minimizer evaluates to {own}"));
            }
            (a, b) => t.check(false, || format!("min partition seed {seed}: {:?} / {:?}", a.err(), b.err())),
        }
    }
    let mut violated = 0;
    for seed in 0..200u64 {
        let (g, w) = random_weighted_graph(10_000 + seed, 10);
        // scale toward the boundary of the forest polytope so both outcomes occur
        let x = w.scaled(&r(1, 2));
        let score = |s: &VertexSet| x.sum(&g.inner_edges(s)) - Rational::from(s.len() - 1);
        match (separate_forest(&g, &x), brute_separate_forest(&g, &x)) {
            (Ok(None), Ok(None)) => t.check(true, String::new),
            (Ok(Some(a)), Ok(Some(b))) => {
                violated += 1;
                t.check(score(&a) == score(&b), || format!("forest seed {seed}: scores differ"))
            }
            (a, b) => t.check(false, || format!("forest seed {seed}: {a:?} vs {b:?}")),
        }
    }
    (
        t,
        format!("200 min-partition cases (n ≤ 8), 200 forest separation cases (n ≤ 10, {violated} violated)"),
    )
}

fn k_connected() -> (Tally, String) {
    let mut t = Tally::default();
    let seeds = parse_seed_manifest(K_SEEDS).expect("manifest");
    let limit = r(216, 10);
    let mut runs = 0;
    let complete = {
        let pairs: Vec<(usize, usize)> = (0..6).flat_map(|u| (u + 1..6).map(move |v| (u, v))).collect();
        Graph::from_pairs(6, &pairs).unwrap()
    };
    for &seed in &seeds {
        for (g, k) in [(complete.clone(), 5usize), (gen_k_connected(8, 4, seed).expect("generator"), 4)] {
            let fam = gen_laminar(&g, seed, 3);
            runs += 1;
            match lamtree::pipeline::thin_tree_for_k_connected(&g, &fam, k, &lamtree::model::default_eta()) {
                Ok(run) => {
                    t.check(g.is_spanning_tree(&run.tree), || format!("seed {seed} k={k}: not a tree"));
                    for s in fam.iter() {
                        let c = Rational::from(crossings(&g, &s.members, &run.tree));
                        let rhs = &limit * r(2, k as i64) * Rational::from(degree(&g, &s.members));
                        t.check(c <= rhs, || format!("seed {seed} k={k}: {} crossed {c} > {rhs}", s.id));
                    }
                }
                Err(e) => t.check(false, || format!("seed {seed} k={k}: {e}")),
            }
        }
    }
    (t, format!("{runs} runs on K_6 (k = 5) and 8-vertex unions of two Hamiltonian cycles (k = 4)"))
}

fn main() {
    let start = Instant::now();
    let seeds = parse_seed_manifest(CORPUS).expect("manifest");
    let sw = sweep(&seeds);
    let (oracles, oracle_note) = oracle_equivalence();
    let (kc, kc_note) = k_connected();

    let results = [
        sw.main.line(
            1,
            "cost < 5·c(x) and crossings < 22·x(δ(S)) at η = 93/20",
            &format!("{} instances, n ≤ 10, |L| ≤ 12", sw.instances),
        ),
        sw.eta.line(2, "η sweep {5/2, 3, 4, 93/20, 10}", &format!("{} instances per η", sw.instances)),
        sw.aligned.line(
            3,
            "rounding of aligned points: c(T) ≤ c(x), crossings ≤ 2⌈x(δ(S))⌉ + 1",
            &format!("{} aligned inputs", sw.aligned_inputs),
        ),
        sw.reduction.line(
            4,
            "reduction: x' ≤ ηx, aligned, well connected, block sums",
            &format!("{} reduction runs", sw.reduction_runs),
        ),
        oracles.line(5, "oracle equivalence with brute force", &oracle_note),
        sw.lp.line(
            6,
            "LP soundness: weak duality, vertex check, infeasibility agreement",
            &format!("{} LPs, {} infeasible", 2 * sw.instances, sw.infeasible),
        ),
        kc.line(7, "k-edge-connected thin trees within 21.6·(2/k)·|δ(S)|", &kc_note),
        sw.depth.line(8, "rounding depth ≤ |E| + |L|, reduction iterations ≤ 2|V| − 1", "every run"),
    ];
    println!("acceptance finished in {:.1?}", start.elapsed());
    if results.iter().any(|ok| !ok) {
        std::process::exit(1);
    }
}
