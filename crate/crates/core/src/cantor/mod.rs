//! Cantor-type constructions of exactly approximable points.

mod approx;
mod build;
mod cube;
mod good;
mod manifest;
mod verify;
mod witness;

pub use approx::{
    approx_table_csv, approx_table_csv_primitive, best_approx_bruteforce, best_approx_table,
    membership_from_table, verify_exact_membership, ApproxEntry, Membership, SWEEP_BUDGET,
};
pub use build::{build_cantor, BuildOptions, CantorTree, Leaf, LevelRecord};
pub use cube::{block_of, blocks, subdivide, Cube};
pub use good::{find_good_rational, pick_target_point, GoodRational};
pub use verify::{leaf_center, verify_leaf, verify_tree, LeafReport, TreeReport};
pub use witness::{EpochWitness, Margins};
