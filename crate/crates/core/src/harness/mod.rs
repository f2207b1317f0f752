//! Brute-force reference oracles and seeded instance generators.

mod brute;
mod gen;

pub use brute::{
    brute_best_tree, brute_min_partition, brute_separate_forest, enumerate_spanning_trees,
    for_each_spanning_tree, meets_bounds, spanning_tree_count, PARTITION_VERTEX_CAP,
    SUBSET_VERTEX_CAP, TREE_COUNT_CAP,
};
pub use gen::{
    gen_aligned_point, gen_feasible_bounds, gen_instance, gen_k_connected, gen_laminar, parse_seed_manifest,
    random_connected_graph, random_aligned_tree, random_costs, random_spanning_tree, rng, DeskParams, MAX_FAMILY_SIZE,
};
