//! Non-membership protocol: exact completeness, the soundness ceiling
//! over every deterministic cheater table, and exact simulator parity.

mod common;

use common::*;
use dcm_core::dcm::{CosetOracle, DcmInstance, PreparedInstance};
use dcm_core::dcnm::{
    dcnm_prover_answer, dcnm_verdict, dcnm_verifier_probe, simulate_dcnm_honest, ConstantAnswer,
    DcnmProverEngine, DcnmVerifierEngine, HonestDcnmProver,
};
use dcm_core::permgroup::Permutation;
use dcm_core::protocol::{run_lockstep, Mode, SessionMeta};
use dcm_core::rng::{PartyTag, RandomSource};
use dcm_core::simulator::{exact_view_distribution, SimulatorError, ViewProcess};
use dcm_core::stats::tv_distance;
use num::traits::Zero;

const CAP: u64 = 100_000;

#[test]
fn completeness_is_exact_over_all_coins() {
    // Enumerate the verifier's coin space directly: coin bit times all
    // (g, h) pairs; the honest prover must echo the coin every time.
    let prep = PreparedInstance::new(pow2_no_instance());
    let oracle = CosetOracle::new(&prep, CAP).unwrap();
    let g_elements = closure(&prep.instance.g_group, 16);
    let h_elements = closure(&prep.instance.h_group, 16);
    for hidden in [false, true] {
        for g in &g_elements {
            for h in &h_elements {
                let probe = if hidden {
                    &(g * prep.s()) * h
                } else {
                    g * h
                };
                let answer = dcnm_prover_answer(&oracle, &probe).unwrap();
                assert_eq!(answer, hidden as u8, "honest answer echoes the coin");
            }
        }
    }
}

#[test]
fn probe_lands_inside_iff_coin_is_zero_on_no_instances() {
    let prep = PreparedInstance::new(pow2_no_instance());
    let oracle = CosetOracle::new(&prep, CAP).unwrap();
    for rep in 0..32 {
        let mut rng = RandomSource::derive(b"probe-side", PartyTag::Verifier, rep);
        let challenge = dcnm_verifier_probe(&prep, &mut rng);
        let inside = oracle.decide(&challenge.probe).unwrap();
        assert_eq!(inside, !challenge.hidden_bit);
    }
}

/// On a YES instance the probe is uniform on GH for either coin value,
/// so every deterministic answer table succeeds with probability exactly
/// 1/2. Enumerated over all 2^|GH| tables and all verifier coins.
#[test]
fn cheater_tables_cap_at_exactly_one_half_on_yes_instances() {
    let prep = PreparedInstance::new(pow2_yes_instance());
    let g_elements = closure(&prep.instance.g_group, 16);
    let h_elements = closure(&prep.instance.h_group, 16);
    let coset: Vec<Permutation> =
        product_set(&g_elements, &Permutation::identity(4), &h_elements)
            .into_iter()
            .collect();
    assert!(coset.len() <= 8);
    let index_of = |p: &Permutation| coset.iter().position(|c| c == p).unwrap();

    let total = 2 * g_elements.len() * h_elements.len();
    for table in 0u32..(1 << coset.len()) {
        let mut wins = 0usize;
        for hidden in [false, true] {
            for g in &g_elements {
                for h in &h_elements {
                    let probe = if hidden {
                        &(g * prep.s()) * h
                    } else {
                        g * h
                    };
                    let answer = (table >> index_of(&probe)) & 1;
                    if answer == hidden as u32 {
                        wins += 1;
                    }
                }
            }
        }
        assert_eq!(wins * 2, total, "table {table:#b} must win exactly half");
    }
}

#[test]
fn exact_simulator_parity_on_no_instances() {
    let prep = PreparedInstance::new(pow2_no_instance());
    for k in [1u32, 2] {
        let interaction =
            exact_view_distribution(&prep, &ViewProcess::DcnmInteraction, k, 1_000_000).unwrap();
        let simulated =
            exact_view_distribution(&prep, &ViewProcess::DcnmSimulator, k, 1_000_000).unwrap();
        let tv = tv_distance(&interaction, &simulated);
        assert!(tv.is_zero(), "k = {k}: TV = {tv}");
    }
}

#[test]
fn exact_enumeration_requires_power_of_two_transversals() {
    // G = <(0 1 2)> has an orbit of size 3: rejection sampling has no
    // fixed coin width, so exact enumeration must refuse.
    let inst = DcmInstance::new(
        perm(&[2, 1, 0]),
        gens(3, &[&[1, 2, 0]]),
        gens(3, &[]),
    )
    .unwrap();
    let prep = PreparedInstance::new(inst);
    assert!(matches!(
        exact_view_distribution(&prep, &ViewProcess::DcnmInteraction, 1, 1_000_000),
        Err(SimulatorError::UnboundedCoinSpace)
    ));
}

#[test]
fn live_simulator_agrees_with_exact_distribution() {
    let prep = PreparedInstance::new(pow2_no_instance());
    let exact =
        exact_view_distribution(&prep, &ViewProcess::DcnmSimulator, 1, 1_000_000).unwrap();
    let mut sample = dcm_core::stats::EmpiricalSample::new();
    let n = 20_000u64;
    for trial in 0..n {
        let mut rng = RandomSource::derive(b"dcnm-live", PartyTag::Simulator, trial);
        let view = simulate_dcnm_honest(&prep, CAP, &mut rng).unwrap();
        sample.record(view.canonical_bytes());
    }
    assert_eq!(sample.counts().len(), exact.support_size());
    for (key, count) in sample.counts() {
        let p = num::ToPrimitive::to_f64(&exact.probability(key)).unwrap();
        assert!(p > 0.0);
        let expected = p * n as f64;
        let sigma = (expected * (1.0 - p)).sqrt();
        assert!((*count as f64 - expected).abs() < 5.0 * sigma + 1.0);
    }
}

#[test]
fn sequential_repetition_decays_cheater_acceptance() {
    // Constant-answer cheater on a YES instance: per-repetition success
    // is exactly 1/2, so k = 5 gives 2^-5.
    let prep = PreparedInstance::new(pow2_yes_instance());
    let k = 5u32;
    let rule = ConstantAnswer(0);
    let rate = dcm_core::stats::acceptance_rate(20_000, |trial| {
        let meta = SessionMeta::new(&prep, Mode::Dcnm(k));
        let mut verifier =
            DcnmVerifierEngine::new(&prep, meta, &trial.to_be_bytes());
        let mut prover = DcnmProverEngine::new(&rule, k);
        run_lockstep(&mut verifier, &mut prover).unwrap();
        verifier.accepted()
    });
    let expected = 2f64.powi(-(k as i32));
    assert!(
        (rate.rate - expected).abs() <= rate.half_width_3_sigma.max(0.002),
        "rate {} vs expected {expected}",
        rate.rate
    );
}

#[test]
fn verdict_requires_literal_answer_match() {
    let prep = PreparedInstance::new(pow2_no_instance());
    let mut rng = RandomSource::derive(b"verdict", PartyTag::Verifier, 0);
    let challenge = dcnm_verifier_probe(&prep, &mut rng);
    let correct = challenge.hidden_bit as u8;
    assert!(dcnm_verdict(&challenge, correct));
    assert!(!dcnm_verdict(&challenge, 1 - correct));
    // A non-bit answer never matches a bit coin.
    assert!(!dcnm_verdict(&challenge, 7));
}

#[test]
fn honest_sequential_sessions_accept_and_are_not_public_coin() {
    let prep = PreparedInstance::new(pow2_no_instance());
    let rule = HonestDcnmProver::new(&prep, CAP).unwrap();
    let meta = SessionMeta::new(&prep, Mode::Dcnm(4)).with_seeds(Some(b"p"), Some(b"v"));
    let mut verifier = DcnmVerifierEngine::new(&prep, meta, b"v");
    let mut prover = DcnmProverEngine::new(&rule, 4);
    run_lockstep(&mut verifier, &mut prover).unwrap();
    let outcome = verifier.outcome();
    assert!(outcome.accepted);
    // The transcript checker must refuse to treat this as public-coin.
    assert!(outcome.transcript.check_public_coin().is_err());
    // View: per repetition, 1 coin bit + 1 bit per sampled factor.
    assert_eq!(outcome.view.consumed_randomness.len(), 4 * 3);
    // Transcript round-trips like any other.
    let text = outcome.transcript.to_text();
    assert_eq!(
        dcm_core::protocol::Transcript::parse_text(&text).unwrap(),
        outcome.transcript
    );
}
