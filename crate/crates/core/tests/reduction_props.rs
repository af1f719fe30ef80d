//! Reduction correctness against brute-force isomorphism search, plus
//! the structural pivot: a factorization of a YES instance yields an
//! edge-set-preserving square permutation.

mod common;

use common::*;
use dcm_core::dcm::{CosetOracle, PreparedInstance};
use dcm_core::permgroup::Point;
use dcm_core::reduction::{reduce_gi, Graph};
use dcm_core::rng::BitSource;

/// All graphs on n vertices, as edge masks over the C(n, 2) vertex pairs.
fn all_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            Graph::new(n, &edges).unwrap()
        })
        .collect()
}

fn decide_reduced(a: &Graph, b: &Graph) -> bool {
    let prep = PreparedInstance::new(reduce_gi(a, b));
    CosetOracle::new(&prep, 100_000)
        .unwrap()
        .decide(prep.s())
        .unwrap()
}

#[test]
fn exhaustive_agreement_on_three_vertices() {
    let graphs = all_graphs(3);
    for a in &graphs {
        for b in &graphs {
            assert_eq!(decide_reduced(a, b), naive_isomorphic(a, b), "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn random_pairs_agree_on_five_vertices() {
    let mut rng = test_rng(b"reduction-5");
    for _ in 0..25 {
        let a = random_graph(5, &mut rng);
        // Half the time, compare against a relabeling of a.
        let b = if rng.draw_bit() {
            relabel(&a, &mut rng)
        } else {
            random_graph(5, &mut rng)
        };
        assert_eq!(decide_reduced(&a, &b), naive_isomorphic(&a, &b));
    }
}

#[test]
fn reduced_instances_have_square_degree_and_correct_groups() {
    let a = Graph::new(4, &[(0, 1), (1, 2)]).unwrap();
    let b = Graph::new(4, &[(2, 3), (1, 2)]).unwrap();
    let inst = reduce_gi(&a, &b);
    assert_eq!(inst.degree(), 16);
    let prep = PreparedInstance::new(inst);
    // G is the diagonal image of S4: order 4! = 24.
    assert_eq!(prep.g_bsgs.order(), &num::BigUint::from(24u32));
    // H stabilizes the 4 ordered edge points: 4! · 12! elsewhere.
    let expected = (1..=4u64).product::<u64>() as u128
        * (1..=12u128).product::<u128>();
    assert_eq!(prep.h_bsgs.order(), &num::BigUint::from(expected));
}

/// From s = g·h with g in the diagonal group and h stabilizing S1, the
/// diagonal factor alone must carry S1 onto S2.
#[test]
fn factorization_extracts_an_isomorphism() {
    let mut rng = test_rng(b"reduction-pivot");
    let mut yes_seen = 0;
    for _ in 0..10 {
        let a = random_graph(4, &mut rng);
        let b = relabel(&a, &mut rng);
        let prep = PreparedInstance::new(reduce_gi(&a, &b));
        let oracle = CosetOracle::new(&prep, 100_000).unwrap();
        let fact = oracle.factorize(prep.s()).unwrap();
        yes_seen += 1;
        let s1: std::collections::BTreeSet<Point> =
            a.edge_point_set().into_iter().collect();
        let s2: std::collections::BTreeSet<Point> =
            b.edge_point_set().into_iter().collect();
        let image: std::collections::BTreeSet<Point> =
            s1.iter().map(|&p| fact.g0.apply(p)).collect();
        assert_eq!(image, s2, "diagonal factor must map edges onto edges");
    }
    assert_eq!(yes_seen, 10);
}

#[test]
fn empty_and_complete_graphs_are_isomorphic_to_themselves_only() {
    let graphs = all_graphs(4);
    let empty = &graphs[0];
    let complete = graphs.last().unwrap();
    assert!(decide_reduced(empty, empty));
    assert!(decide_reduced(complete, complete));
    assert!(!decide_reduced(empty, complete));
}

fn random_graph(n: usize, rng: &mut dcm_core::rng::RandomSource) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.draw_bit() {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).unwrap()
}

fn relabel(g: &Graph, rng: &mut dcm_core::rng::RandomSource) -> Graph {
    let n = g.vertex_count();
    let relabeling = random_perm(n, rng);
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (
                relabeling.apply(u as Point) as usize,
                relabeling.apply(v as Point) as usize,
            )
        })
        .collect();
    Graph::new(n, &edges).unwrap()
}
