//! Double-coset counting facts, checked exhaustively against product
//! tables on random desk-scale instances.

mod common;

use std::collections::BTreeMap;

use common::*;
use dcm_core::dcm::{
    alpha_bijection_check, branches_disjoint, dcm_decide, normalize, representations,
    CosetOracle, PreparedInstance,
};
use dcm_core::permgroup::{schreier_sims, Permutation};

const CAP: u64 = 100_000;

/// Instances for the counting suite, both groups of order at most 24.
fn counting_instances() -> Vec<PreparedInstance> {
    let mut rng = test_rng(b"dcm-counting");
    let mut out = vec![
        PreparedInstance::new(tiny_yes()),
        PreparedInstance::new(tiny_instance(&[0, 1, 2])),
    ];
    for degree in [4, 5, 6] {
        for _ in 0..7 {
            out.push(PreparedInstance::new(random_yes_instance(
                degree, 24, &mut rng,
            )));
        }
    }
    out
}

#[test]
fn representation_counts_equal_intersection_order_for_all_t() {
    let instances = counting_instances();
    assert!(instances.len() >= 20);
    for prep in &instances {
        let g_elements = closure(&prep.instance.g_group, 24);
        let h_elements = closure(&prep.instance.h_group, 24);
        let intersection = intersect_order(prep);
        let coset = product_set(&g_elements, prep.s(), &h_elements);
        for t in &coset {
            let plain = representations(prep, t, false, CAP).unwrap();
            let shifted = representations(prep, t, true, CAP).unwrap();
            assert_eq!(plain.len(), intersection, "|R(t)| = k");
            assert_eq!(shifted.len(), intersection, "|R_s(t)| = k");
            for (g, h) in &plain {
                assert_eq!(&(g * h), t);
            }
            for (g, h) in &shifted {
                assert_eq!(&(&(g * prep.s()) * h), t);
            }
        }
    }
}

/// Every representation of t arises from one of them by sliding an
/// intersection element across the product.
#[test]
fn representations_form_one_intersection_orbit() {
    for prep in counting_instances().iter().take(8) {
        let g_bsgs = &prep.g_bsgs;
        let h_bsgs = &prep.h_bsgs;
        let intersection: Vec<Permutation> =
            dcm_core::permgroup::intersect_bruteforce(g_bsgs, h_bsgs, CAP)
                .unwrap()
                .generators()
                .to_vec();
        let t = prep.s().clone();
        let reps = representations(prep, &t, false, CAP).unwrap();
        let (g1, h1) = reps[0].clone();
        let orbit: std::collections::BTreeSet<_> = intersection
            .iter()
            .map(|f| (&g1 * f, &f.inverse() * &h1))
            .collect();
        let reps_set: std::collections::BTreeSet<_> = reps.into_iter().collect();
        assert_eq!(orbit, reps_set);
    }
}

#[test]
fn product_maps_are_exactly_k_to_one_and_uniform() {
    for prep in &counting_instances() {
        let g_elements = closure(&prep.instance.g_group, 24);
        let h_elements = closure(&prep.instance.h_group, 24);
        let k = intersect_order(prep);
        let coset_size = g_elements.len() * h_elements.len() / k;

        let mut plain_counts: BTreeMap<Permutation, usize> = BTreeMap::new();
        let mut shifted_counts: BTreeMap<Permutation, usize> = BTreeMap::new();
        for g in &g_elements {
            let gs = g * prep.s();
            for h in &h_elements {
                *plain_counts.entry(g * h).or_default() += 1;
                *shifted_counts.entry(&gs * h).or_default() += 1;
            }
        }
        // φ(g, h) = g·h and ψ(g, h) = g·s·h hit each coset element
        // exactly k times: products of uniform pairs are uniform.
        assert_eq!(plain_counts.len(), coset_size);
        assert!(plain_counts.values().all(|&c| c == k));
        assert_eq!(shifted_counts.len(), coset_size);
        assert!(shifted_counts.values().all(|&c| c == k));
        // s ∈ GH on YES instances, so both maps share their image.
        assert_eq!(
            plain_counts.keys().collect::<Vec<_>>(),
            shifted_counts.keys().collect::<Vec<_>>()
        );
    }
}

/// Conditioning the full product table on a fixed product must recover
/// exactly the computed representation sets.
#[test]
fn conditioned_product_table_matches_representation_sets() {
    for prep in counting_instances().iter().take(8) {
        let g_elements = closure(&prep.instance.g_group, 24);
        let h_elements = closure(&prep.instance.h_group, 24);
        let t = prep.s().clone();
        let mut table_plain = std::collections::BTreeSet::new();
        let mut table_shifted = std::collections::BTreeSet::new();
        for g in &g_elements {
            for h in &h_elements {
                if g * h == t {
                    table_plain.insert((g.clone(), h.clone()));
                }
                if &(g * prep.s()) * h == t {
                    table_shifted.insert((g.clone(), h.clone()));
                }
            }
        }
        let plain: std::collections::BTreeSet<_> =
            representations(prep, &t, false, CAP).unwrap().into_iter().collect();
        let shifted: std::collections::BTreeSet<_> =
            representations(prep, &t, true, CAP).unwrap().into_iter().collect();
        assert_eq!(table_plain, plain);
        assert_eq!(table_shifted, shifted);
    }
}

#[test]
fn alpha_bijects_representations_on_every_coset_element() {
    for prep in counting_instances().iter().take(10) {
        let oracle = CosetOracle::new(prep, CAP).unwrap();
        let fact = oracle.factorize(prep.s()).unwrap();
        let g_elements = closure(&prep.instance.g_group, 24);
        let h_elements = closure(&prep.instance.h_group, 24);
        for t in product_set(&g_elements, prep.s(), &h_elements) {
            assert!(alpha_bijection_check(prep, &fact, &t, CAP).unwrap());
        }
    }
}

#[test]
fn decide_agrees_with_full_product_enumeration() {
    let mut rng = test_rng(b"dcm-decide-sweep");
    for degree in [3, 4, 5] {
        for trial in 0..30 {
            // Mix YES constructions with arbitrary s values.
            let instance = if trial % 2 == 0 {
                random_yes_instance(degree, 100, &mut rng)
            } else {
                let mut inst = random_yes_instance(degree, 100, &mut rng);
                inst.s = random_perm(degree, &mut rng);
                inst
            };
            assert_eq!(
                dcm_decide(&instance, CAP).unwrap(),
                naive_dcm(&instance, 10_000),
                "instance {instance:?}"
            );
        }
    }
}

#[test]
fn factorization_is_lexicographically_least() {
    let mut rng = test_rng(b"dcm-factorize");
    for _ in 0..20 {
        let instance = random_yes_instance(4, 24, &mut rng);
        let prep = PreparedInstance::new(instance);
        let oracle = CosetOracle::new(&prep, CAP).unwrap();
        let fact = oracle.factorize(prep.s()).unwrap();
        assert!(fact.is_valid_for(&prep));
        // No smaller g in G admits a factorization.
        let g_elements = closure(&prep.instance.g_group, 24);
        for g in g_elements.iter().filter(|g| **g < fact.g0) {
            let h = &g.inverse() * prep.s();
            assert!(!prep.h_bsgs.contains(&h).unwrap());
        }
    }
}

#[test]
fn normalize_preserves_the_answer() {
    let mut rng = test_rng(b"dcm-normalize");
    for _ in 0..25 {
        let base = random_yes_instance(4, 60, &mut rng);
        let sigma = random_perm(4, &mut rng);
        let tau = random_perm(4, &mut rng);
        let inst =
            normalize(&sigma, &tau, &base.g_group, &base.h_group).unwrap();
        // Brute-force σ ∈ GτH by enumerating the double coset.
        let g_elements = closure(&base.g_group, 60);
        let h_elements = closure(&base.h_group, 60);
        let double_coset = product_set(&g_elements, &tau, &h_elements);
        assert_eq!(
            dcm_decide(&inst, CAP).unwrap(),
            double_coset.contains(&sigma)
        );
    }
}

#[test]
fn branch_disjointness_holds_exactly_on_no_instances() {
    let mut rng = test_rng(b"dcm-branches");
    let mut no_seen = 0;
    for degree in [3, 4, 5] {
        for _ in 0..20 {
            let mut instance = random_yes_instance(degree, 60, &mut rng);
            instance.s = random_perm(degree, &mut rng);
            let prep = PreparedInstance::new(instance.clone());
            let yes = naive_dcm(&instance, 10_000);
            assert_eq!(branches_disjoint(&prep, 10_000).unwrap(), !yes);
            no_seen += (!yes) as u32;
        }
    }
    assert!(no_seen >= 10, "sweep must actually exercise NO instances");
}

fn intersect_order(prep: &PreparedInstance) -> usize {
    let inter =
        dcm_core::permgroup::intersect_bruteforce(&prep.g_bsgs, &prep.h_bsgs, CAP).unwrap();
    let order = schreier_sims(&inter).order().clone();
    use num::ToPrimitive;
    order.to_usize().unwrap()
}
