//! Shared test oracles and fixtures: brute-force group closure, product
//! enumeration, graph isomorphism by bijection search, and deterministic
//! random instance generators. Everything here is independent of the
//! structures under test (no BSGS, no sifting, no reduction machinery).

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use dcm_core::dcm::DcmInstance;
use dcm_core::permgroup::{GeneratorSet, Permutation, Point};
use dcm_core::reduction::Graph;
use dcm_core::rng::{BitSource, PartyTag, RandomSource};

pub fn perm(images: &[Point]) -> Permutation {
    Permutation::from_images(images.to_vec()).unwrap()
}

pub fn gens(degree: usize, list: &[&[Point]]) -> GeneratorSet {
    GeneratorSet::new(degree, list.iter().map(|g| perm(g)).collect()).unwrap()
}

/// Breadth-first closure of a generator set; the returned set is sorted
/// lexicographically. Panics past `cap` elements.
pub fn closure(generators: &GeneratorSet, cap: usize) -> BTreeSet<Permutation> {
    let identity = Permutation::identity(generators.degree());
    let mut seen = BTreeSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(element) = queue.pop_front() {
        for g in generators.generators() {
            let next = g * &element;
            if seen.insert(next.clone()) {
                assert!(seen.len() <= cap, "closure exceeded test cap {cap}");
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Every product g·s·h over explicit element lists.
pub fn product_set(
    g_elements: &BTreeSet<Permutation>,
    s: &Permutation,
    h_elements: &BTreeSet<Permutation>,
) -> BTreeSet<Permutation> {
    let mut out = BTreeSet::new();
    for g in g_elements {
        let gs = g * s;
        for h in h_elements {
            out.insert(&gs * h);
        }
    }
    out
}

/// Double coset membership by enumerating all |G|·|H| products.
pub fn naive_dcm(instance: &DcmInstance, cap: usize) -> bool {
    let g_elements = closure(&instance.g_group, cap);
    let h_elements = closure(&instance.h_group, cap);
    let identity = Permutation::identity(instance.degree());
    product_set(&g_elements, &identity, &h_elements).contains(&instance.s)
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut current: Vec<Point> = (0..n as Point).collect();
    loop {
        out.push(Permutation::from_images(current.clone()).unwrap());
        if !next_lex(&mut current) {
            break;
        }
    }
    out
}

fn next_lex(seq: &mut [Point]) -> bool {
    let n = seq.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// Graph isomorphism by trying all vertex bijections.
pub fn naive_isomorphic(a: &Graph, b: &Graph) -> bool {
    if a.vertex_count() != b.vertex_count() || a.edges().len() != b.edges().len() {
        return false;
    }
    let n = a.vertex_count();
    for bijection in all_permutations(n) {
        let matches = (0..n).all(|u| {
            (0..n).all(|v| {
                a.has_edge(u, v)
                    == b.has_edge(bijection.apply(u as Point) as usize, bijection.apply(v as Point) as usize)
            })
        });
        if matches {
            return true;
        }
    }
    false
}

/// Deterministic source for generating test data.
pub fn test_rng(label: &[u8]) -> RandomSource {
    RandomSource::derive(label, PartyTag::Simulator, 0)
}

/// Uniform random permutation via Fisher–Yates over the source.
pub fn random_perm(degree: usize, rng: &mut RandomSource) -> Permutation {
    let mut images: Vec<Point> = (0..degree as Point).collect();
    for i in (1..degree).rev() {
        let j = rng.draw_index(i + 1);
        images.swap(i, j);
    }
    Permutation::from_images(images).unwrap()
}

/// Random generator set of 1..=3 random permutations.
pub fn random_generator_set(degree: usize, rng: &mut RandomSource) -> GeneratorSet {
    let count = 1 + rng.draw_index(3);
    let generators = (0..count).map(|_| random_perm(degree, rng)).collect();
    GeneratorSet::new(degree, generators).unwrap()
}

/// The running tiny instance: G = <(0 1)>, H = <(1 2)> on 3 points.
pub fn tiny_instance(s: &[Point]) -> DcmInstance {
    DcmInstance::new(perm(s), gens(3, &[&[1, 0, 2]]), gens(3, &[&[0, 2, 1]])).unwrap()
}

/// YES instance of the running pair: s = (0 1)·(1 2).
pub fn tiny_yes() -> DcmInstance {
    tiny_instance(&[1, 2, 0])
}

/// NO instance of the running pair: s = (0 2).
pub fn tiny_no() -> DcmInstance {
    tiny_instance(&[2, 1, 0])
}

/// Fixed YES instances of degrees 3 through 8, each built as s = g·h
/// from named group pairs.
pub fn yes_instances() -> Vec<DcmInstance> {
    let mut out = Vec::new();
    // Degree 3: the running pair.
    out.push(tiny_yes());
    // Degree 4: Klein group and a 4-cycle.
    {
        let g = gens(4, &[&[1, 0, 3, 2], &[2, 3, 0, 1]]);
        let h = gens(4, &[&[1, 2, 3, 0]]);
        let s = &perm(&[1, 0, 3, 2]) * &perm(&[1, 2, 3, 0]);
        out.push(DcmInstance::new(s, g, h).unwrap());
    }
    // Degree 5: a 5-cycle and a transposition.
    {
        let g = gens(5, &[&[1, 2, 3, 4, 0]]);
        let h = gens(5, &[&[1, 0, 2, 3, 4]]);
        let s = &perm(&[2, 3, 4, 0, 1]) * &perm(&[1, 0, 2, 3, 4]);
        out.push(DcmInstance::new(s, g, h).unwrap());
    }
    // Degree 6: S3 on the left points, S3 on the right points.
    {
        let g = gens(6, &[&[1, 0, 2, 3, 4, 5], &[1, 2, 0, 3, 4, 5]]);
        let h = gens(6, &[&[0, 1, 2, 4, 3, 5], &[0, 1, 2, 4, 5, 3]]);
        let s = &perm(&[2, 0, 1, 3, 4, 5]) * &perm(&[0, 1, 2, 5, 3, 4]);
        out.push(DcmInstance::new(s, g, h).unwrap());
    }
    // Degree 7: a 7-cycle and a double transposition.
    {
        let g = gens(7, &[&[1, 2, 3, 4, 5, 6, 0]]);
        let h = gens(7, &[&[0, 2, 1, 4, 3, 5, 6]]);
        let s = &perm(&[3, 4, 5, 6, 0, 1, 2]) * &perm(&[0, 2, 1, 4, 3, 5, 6]);
        out.push(DcmInstance::new(s, g, h).unwrap());
    }
    // Degree 8: dihedral rotation on the first square, 4-cycle on the rest.
    {
        let g = gens(8, &[&[1, 2, 3, 0, 4, 5, 6, 7], &[3, 2, 1, 0, 4, 5, 6, 7]]);
        let h = gens(8, &[&[0, 1, 2, 3, 5, 6, 7, 4]]);
        let s = &perm(&[2, 3, 0, 1, 4, 5, 6, 7]) * &perm(&[0, 1, 2, 3, 6, 7, 4, 5]);
        out.push(DcmInstance::new(s, g, h).unwrap());
    }
    out
}

/// Random YES instance with both group orders at most `max_order`:
/// groups are drawn by rejection, s is a product of random members.
pub fn random_yes_instance(
    degree: usize,
    max_order: usize,
    rng: &mut RandomSource,
) -> DcmInstance {
    loop {
        let g_group = random_generator_set(degree, rng);
        let h_group = random_generator_set(degree, rng);
        let g_elements = bounded_closure(&g_group, max_order);
        let h_elements = bounded_closure(&h_group, max_order);
        let (Some(g_elements), Some(h_elements)) = (g_elements, h_elements) else {
            continue;
        };
        let g_pick = pick(&g_elements, rng);
        let h_pick = pick(&h_elements, rng);
        let s = &g_pick * &h_pick;
        return DcmInstance::new(s, g_group, h_group).unwrap();
    }
}

fn bounded_closure(generators: &GeneratorSet, max: usize) -> Option<BTreeSet<Permutation>> {
    let identity = Permutation::identity(generators.degree());
    let mut seen = BTreeSet::from([identity.clone()]);
    let mut queue = VecDeque::from([identity]);
    while let Some(element) = queue.pop_front() {
        for g in generators.generators() {
            let next = g * &element;
            if seen.insert(next.clone()) {
                if seen.len() > max {
                    return None;
                }
                queue.push_back(next);
            }
        }
    }
    Some(seen)
}

fn pick(set: &BTreeSet<Permutation>, rng: &mut RandomSource) -> Permutation {
    let idx = rng.draw_index(set.len());
    set.iter().nth(idx).unwrap().clone()
}

/// YES instances with both groups of order at most 8 and varied overlap
/// structure; the roster for exact zero-knowledge checks.
pub fn zk_instance_roster() -> Vec<DcmInstance> {
    vec![
        tiny_yes(),
        tiny_instance(&[0, 1, 2]),
        // G = H = <(0 1)>, s inside.
        DcmInstance::new(perm(&[1, 0, 2]), gens(3, &[&[1, 0, 2]]), gens(3, &[&[1, 0, 2]]))
            .unwrap(),
        // Klein group against a nested 2-element subgroup.
        DcmInstance::new(
            perm(&[3, 2, 1, 0]),
            gens(4, &[&[1, 0, 3, 2], &[2, 3, 0, 1]]),
            gens(4, &[&[1, 0, 3, 2]]),
        )
        .unwrap(),
        // C4 times a transposition group.
        DcmInstance::new(
            perm(&[2, 0, 3, 1]),
            gens(4, &[&[1, 2, 3, 0]]),
            gens(4, &[&[0, 2, 1, 3]]),
        )
        .unwrap(),
        // C8 against its order-2 subgroup.
        DcmInstance::new(
            perm(&[3, 4, 5, 6, 7, 0, 1, 2]),
            gens(8, &[&[1, 2, 3, 4, 5, 6, 7, 0]]),
            gens(8, &[&[4, 5, 6, 7, 0, 1, 2, 3]]),
        )
        .unwrap(),
    ]
}

/// NO instance whose groups have power-of-two transversals:
/// G = <(0 1)>, H = <(2 3)>, s = (0 2)(1 3).
pub fn pow2_no_instance() -> DcmInstance {
    DcmInstance::new(
        perm(&[2, 3, 0, 1]),
        gens(4, &[&[1, 0, 2, 3]]),
        gens(4, &[&[0, 1, 3, 2]]),
    )
    .unwrap()
}

/// YES variant of the same pair: s = (0 1)(2 3).
pub fn pow2_yes_instance() -> DcmInstance {
    DcmInstance::new(
        perm(&[1, 0, 3, 2]),
        gens(4, &[&[1, 0, 2, 3]]),
        gens(4, &[&[0, 1, 3, 2]]),
    )
    .unwrap()
}

/// Degenerate YES instance: both groups trivial, s = e. Its sequential
/// views vary only in the verifier's bits, which keeps empirical view
/// comparisons statistically sharp at higher k.
pub fn trivial_yes_instance() -> DcmInstance {
    DcmInstance::new(
        Permutation::identity(2),
        GeneratorSet::trivial(2),
        GeneratorSet::trivial(2),
    )
    .unwrap()
}

/// Minimal nontrivial YES instance: G = <(0 1)> of degree 2, H trivial,
/// s = (0 1). Two views per stage under any deterministic strategy.
pub fn order2_yes_instance() -> DcmInstance {
    DcmInstance::new(
        perm(&[1, 0]),
        gens(2, &[&[1, 0]]),
        GeneratorSet::trivial(2),
    )
    .unwrap()
}
