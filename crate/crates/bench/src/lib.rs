//! Shared fixtures for the benchmark suite.

use dcm_core::dcm::{DcmInstance, PreparedInstance};
use dcm_core::permgroup::{GeneratorSet, Permutation, Point};
use dcm_core::reduction::{conjugation_group_generators, edge_set_stabilizer_generators, Graph};

pub fn perm(images: &[Point]) -> Permutation {
    Permutation::from_images(images.to_vec()).unwrap()
}

/// Generators of the full symmetric group on `n` points.
pub fn symmetric_generators(n: usize) -> GeneratorSet {
    let mut swap: Vec<Point> = (0..n as Point).collect();
    swap.swap(0, 1);
    let cycle: Vec<Point> = (0..n as Point).map(|i| (i + 1) % n as Point).collect();
    GeneratorSet::new(n, vec![perm(&swap), perm(&cycle)]).unwrap()
}

/// The degree-3 running instance: G = <(0 1)>, H = <(1 2)>, s = (0 1)(1 2).
pub fn tiny_yes_instance() -> DcmInstance {
    DcmInstance::new(
        perm(&[1, 2, 0]),
        GeneratorSet::new(3, vec![perm(&[1, 0, 2])]).unwrap(),
        GeneratorSet::new(3, vec![perm(&[0, 2, 1])]).unwrap(),
    )
    .unwrap()
}

pub fn tiny_prepared() -> PreparedInstance {
    PreparedInstance::new(tiny_yes_instance())
}

/// A six-vertex graph pair reduced to a degree-36 instance.
pub fn reduction_components() -> (GeneratorSet, GeneratorSet) {
    let graph = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)]).unwrap();
    let stabilizer = edge_set_stabilizer_generators(&graph.edge_point_set(), 36);
    (conjugation_group_generators(6), stabilizer)
}
