//! Reduction from Graph Isomorphism to double coset membership.
//!
//! Graphs on `n` vertices become edge sets inside the square
//! `{0,…,n-1}²`. `G` is the diagonal action of the vertex symmetric
//! group on the square (order `n!`), `H` the setwise stabilizer of the
//! first graph's edge set, and `s` any square permutation carrying the
//! first edge set onto the second; the graphs are isomorphic iff
//! `s ∈ GH`.

use thiserror::Error;

use crate::dcm::DcmInstance;
use crate::permgroup::{GeneratorSet, PermError, Permutation, Point};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("cannot parse graph: {0}")]
    Parse(String),
    #[error("loop edges are not allowed ({0} {0})")]
    LoopEdge(usize),
    #[error("edge endpoint {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A simple undirected graph as a symmetric, zero-diagonal adjacency
/// matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<bool>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut graph = Graph {
            n,
            adjacency: vec![false; n * n],
        };
        for &(u, v) in edges {
            if u == v {
                return Err(GraphError::LoopEdge(u + 1));
            }
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange(u.max(v) + 1, n));
            }
            graph.adjacency[u * n + v] = true;
            graph.adjacency[v * n + u] = true;
        }
        Ok(graph)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u * self.n + v]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Ordered pairs `(i, j)` with an edge, as square points. Both
    /// orientations appear, mirroring the adjacency matrix.
    pub fn edge_point_set(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.has_edge(i, j) {
                    out.push(square_point_index(i, j, self.n));
                }
            }
        }
        out
    }

    /// Graph file form: `n <count>`, then one `u v` line per edge,
    /// 1-indexed.
    pub fn to_text(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Parse("empty graph text".into()))?;
        let n = header
            .trim()
            .strip_prefix("n ")
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1)
            .ok_or_else(|| GraphError::Parse(format!("expected 'n <count>', got: {header}")))?;
        let mut edges = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let (u, v) = match (parts.next(), parts.next(), parts.next()) {
                (Some(u), Some(v), None) => (u, v),
                _ => return Err(GraphError::Parse(format!("expected 'u v', got: {line}"))),
            };
            let parse = |tok: &str| {
                tok.parse::<usize>()
                    .ok()
                    .filter(|&x| x >= 1)
                    .ok_or_else(|| GraphError::Parse(format!("bad vertex: {tok}")))
            };
            edges.push((parse(u)? - 1, parse(v)? - 1));
        }
        Graph::new(n, &edges)
    }
}

/// Canonical bijection from `(i, j)` in the `n × n` square to a point.
pub fn square_point_index(i: usize, j: usize, n: usize) -> Point {
    assert!(i < n && j < n, "square index ({i}, {j}) out of range for n = {n}");
    (i * n + j) as Point
}

/// The permutation of the square induced by a vertex permutation acting
/// on both coordinates.
fn square_action(vertex_perm: &[usize], n: usize) -> Permutation {
    let mut images = vec![0 as Point; n * n];
    for i in 0..n {
        for j in 0..n {
            images[i * n + j] = square_point_index(vertex_perm[i], vertex_perm[j], n);
        }
    }
    Permutation::from_images(images).expect("induced square action is a bijection")
}

/// Generators of the diagonal image of the vertex symmetric group on the
/// square: one involution per vertex pair, swapping rows `i, j` and
/// columns `i, j` simultaneously. The group has order `n!`.
pub fn conjugation_group_generators(n: usize) -> GeneratorSet {
    assert!(n >= 1);
    let degree = n * n;
    let mut generators = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut vertex_perm: Vec<usize> = (0..n).collect();
            vertex_perm.swap(i, j);
            generators.push(square_action(&vertex_perm, n));
        }
    }
    GeneratorSet::new(degree, generators).expect("uniform degree")
}

/// Generators of the full setwise stabilizer of `points` in the
/// symmetric group on `0..degree`: adjacent transpositions within the
/// set and within its complement. Order `|S|! · (degree − |S|)!`.
pub fn edge_set_stabilizer_generators(points: &[Point], degree: usize) -> GeneratorSet {
    let mut inside: Vec<Point> = points.to_vec();
    inside.sort_unstable();
    inside.dedup();
    let member = {
        let mut flags = vec![false; degree];
        for &p in &inside {
            flags[p as usize] = true;
        }
        flags
    };
    let outside: Vec<Point> = (0..degree as Point).filter(|&p| !member[p as usize]).collect();
    let mut generators = Vec::new();
    for part in [&inside, &outside] {
        for pair in part.windows(2) {
            let mut images: Vec<Point> = (0..degree as Point).collect();
            images.swap(pair[0] as usize, pair[1] as usize);
            generators.push(Permutation::from_images(images).expect("transposition"));
        }
    }
    GeneratorSet::new(degree, generators).expect("uniform degree")
}

/// The deterministic choice of a square permutation with
/// `image(S1) = S2`: sorted `S1` maps onto sorted `S2` in order, and the
/// sorted complements likewise.
pub fn cross_map(s1: &[Point], s2: &[Point], degree: usize) -> Result<Permutation, GraphError> {
    let mut from: Vec<Point> = s1.to_vec();
    let mut to: Vec<Point> = s2.to_vec();
    from.sort_unstable();
    from.dedup();
    to.sort_unstable();
    to.dedup();
    if from.len() != to.len() {
        return Err(GraphError::Parse(format!(
            "edge sets differ in size: {} vs {}",
            from.len(),
            to.len()
        )));
    }
    let mut images = vec![Point::MAX; degree];
    for (&a, &b) in from.iter().zip(&to) {
        images[a as usize] = b;
    }
    let in_from = {
        let mut flags = vec![false; degree];
        for &p in &from {
            flags[p as usize] = true;
        }
        flags
    };
    let in_to = {
        let mut flags = vec![false; degree];
        for &p in &to {
            flags[p as usize] = true;
        }
        flags
    };
    let complement_from = (0..degree as Point).filter(|&p| !in_from[p as usize]);
    let mut complement_to = (0..degree as Point).filter(|&p| !in_to[p as usize]);
    for a in complement_from {
        images[a as usize] = complement_to.next().expect("complements have equal size");
    }
    Ok(Permutation::from_images(images)?)
}

/// Reduce a graph pair to a membership instance: YES iff the graphs are
/// isomorphic.
///
/// Pairs that cannot be isomorphic for counting reasons (different
/// vertex counts or different edge counts) short-circuit to a fixed
/// canonical NO instance, since the square construction is either
/// undefined or wasteful there.
pub fn reduce_gi(a: &Graph, b: &Graph) -> DcmInstance {
    if a.vertex_count() != b.vertex_count() || a.edges().len() != b.edges().len() {
        return canonical_no_instance();
    }
    let n = a.vertex_count();
    let degree = n * n;
    let s1 = a.edge_point_set();
    let s2 = b.edge_point_set();
    let s = cross_map(&s1, &s2, degree).expect("equal edge counts");
    let g_group = conjugation_group_generators(n);
    let h_group = edge_set_stabilizer_generators(&s1, degree);
    DcmInstance::new(s, g_group, h_group).expect("uniform degree")
}

/// Degree-2 NO instance: s = (0 1) against trivial groups.
pub fn canonical_no_instance() -> DcmInstance {
    DcmInstance::new(
        Permutation::from_images(vec![1, 0]).unwrap(),
        GeneratorSet::trivial(2),
        GeneratorSet::trivial(2),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dcm::dcm_decide;
    use crate::permgroup::schreier_sims;
    use num::bigint::BigUint;

    #[test]
    fn square_index_corners() {
        assert_eq!(square_point_index(0, 0, 4), 0);
        assert_eq!(square_point_index(3, 3, 4), 15);
        assert_eq!(square_point_index(1, 2, 4), 6);
    }

    #[test]
    fn conjugation_group_order_is_factorial() {
        assert!(conjugation_group_generators(1).generators().is_empty());
        let g3 = schreier_sims(&conjugation_group_generators(3));
        assert_eq!(g3.order(), &BigUint::from(6u32));
        for gen in conjugation_group_generators(4).generators() {
            assert!((gen * gen).is_identity());
        }
    }

    #[test]
    fn stabilizer_orders() {
        // Empty set or full set: the whole symmetric group.
        let all = schreier_sims(&edge_set_stabilizer_generators(&[], 4));
        assert_eq!(all.order(), &BigUint::from(24u32));
        let full = schreier_sims(&edge_set_stabilizer_generators(&[0, 1, 2, 3], 4));
        assert_eq!(full.order(), &BigUint::from(24u32));
        // |S| = 2 in degree 4: 2! · 2! = 4.
        let half = schreier_sims(&edge_set_stabilizer_generators(&[1, 3], 4));
        assert_eq!(half.order(), &BigUint::from(4u32));
    }

    #[test]
    fn cross_map_basics() {
        let id = cross_map(&[1, 2], &[1, 2], 4).unwrap();
        assert!(id.is_identity());
        let swap = cross_map(&[0], &[1], 2).unwrap();
        assert_eq!(swap.images(), &[1, 0]);
        assert!(cross_map(&[0, 1], &[1], 3).is_err());
    }

    #[test]
    fn cross_map_carries_first_set_onto_second() {
        let s1 = [0 as Point, 3, 5];
        let s2 = [1 as Point, 2, 7];
        let s = cross_map(&s1, &s2, 9).unwrap();
        let mut image: Vec<Point> = s1.iter().map(|&p| s.apply(p)).collect();
        image.sort_unstable();
        assert_eq!(image, s2);
    }

    #[test]
    fn identical_graphs_reduce_to_yes() {
        let triangle = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let inst = reduce_gi(&triangle, &triangle);
        assert_eq!(inst.degree(), 9);
        assert!(dcm_decide(&inst, 100_000).unwrap());
    }

    #[test]
    fn triangle_vs_path_reduces_to_no() {
        let triangle = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let path = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        // Different edge counts short-circuit.
        let inst = reduce_gi(&triangle, &path);
        assert!(!dcm_decide(&inst, 100_000).unwrap());
    }

    #[test]
    fn relabeled_path_reduces_to_yes() {
        let p1 = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let p2 = Graph::new(3, &[(0, 2), (2, 1)]).unwrap();
        let inst = reduce_gi(&p1, &p2);
        assert_eq!(inst.degree(), 9);
        assert!(dcm_decide(&inst, 100_000).unwrap());
    }

    #[test]
    fn mismatched_vertex_counts_short_circuit_to_no() {
        let lone = Graph::new(1, &[]).unwrap();
        let pair = Graph::new(2, &[]).unwrap();
        let inst = reduce_gi(&lone, &pair);
        assert!(!dcm_decide(&inst, 100).unwrap());
    }

    #[test]
    fn graph_text_round_trip_and_validation() {
        let g = Graph::new(4, &[(0, 1), (2, 3), (1, 2)]).unwrap();
        let text = g.to_text();
        assert_eq!(Graph::parse_text(&text).unwrap(), g);
        assert!(Graph::parse_text("n 2\n1 1\n").is_err());
        assert!(Graph::parse_text("n 2\n1 5\n").is_err());
        assert!(Graph::parse_text("2 1\n").is_err());
    }
}
