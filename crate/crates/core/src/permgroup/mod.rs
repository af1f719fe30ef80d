//! Permutation arithmetic and generator-defined permutation groups.

mod group;
mod perm;

pub(crate) use group::parse_degree_header;
pub use group::{
    intersect_bruteforce, schreier_sims, Bsgs, GeneratorSet, GroupError, TransversalLevel,
};
pub use perm::{PermError, Permutation, Point, MAX_DEGREE};
