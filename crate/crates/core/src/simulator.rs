//! Simulators for the membership protocol, and exact view-distribution
//! enumeration for both protocols.
//!
//! The sequential simulator runs any verifier strategy as a black box:
//! per stage it guesses which challenge branch the strategy will take,
//! restarting the stage until the guess matches. On YES instances the
//! guess and the challenge are independent, so each stage accepts with
//! probability exactly 1/2 and the accepted outcome is uniform on the
//! same set the real interaction samples from.
//!
//! "Perfect" zero knowledge is checked by [`exact_view_distribution`],
//! which enumerates every coin of a process and returns exact rational
//! probabilities per canonical view. Restart branches are not unrolled:
//! restarts are independent retries, so conditioning on acceptance is
//! plain normalization over the accepted outcomes (the geometric series
//! is summed in closed form).

use num::bigint::BigInt;
use num::rational::BigRational;
use thiserror::Error;

use crate::bits::BitString;
use crate::dcm::{CosetOracle, DcmError, Factorization, PreparedInstance};
use crate::permgroup::{GroupError, Permutation};
use crate::protocol::message::{Message, View};
use crate::protocol::runner::view_from_stages;
use crate::protocol::strategy::{StageMessages, VerifierStrategy};
use crate::rng::{BitSource, RandomSource, ReplaySource};
use crate::stats::{DistributionBuilder, ExactDistribution, StatsError};

/// Restart budget per stage; a correct stage exceeds it with probability
/// `2^-64`, so hitting the cap is diagnostic of a broken strategy wiring
/// rather than bad luck.
pub const DEFAULT_RESTART_CAP: u32 = 64;

/// Enumeration budget for exact distributions.
pub const DEFAULT_STATE_CAP: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulatorError {
    #[error("simulation requires a YES instance")]
    RequiresYesInstance,
    #[error("DCNM simulation requires a NO instance")]
    RequiresNoInstance,
    #[error("stage {stage} exceeded the restart cap {cap}")]
    RestartCapExceeded { stage: u32, cap: u32 },
    #[error("exact enumeration needs {states} states, over the cap {cap}")]
    StateSpaceTooLarge { states: u128, cap: u64 },
    #[error("exact enumeration needs power-of-two transversals (rejection sampling has unbounded coin space)")]
    UnboundedCoinSpace,
    #[error(transparent)]
    Dcm(#[from] DcmError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl From<GroupError> for SimulatorError {
    fn from(e: GroupError) -> Self {
        SimulatorError::Dcm(DcmError::Group(e))
    }
}

/// A simulated view plus the restart accounting of the run.
#[derive(Debug, Clone)]
pub struct SimulatedView {
    pub view: View,
    pub attempts_per_stage: Vec<u32>,
}

fn require_yes(prep: &PreparedInstance, cap: u64) -> Result<(), SimulatorError> {
    let oracle = CosetOracle::new(prep, cap).map_err(SimulatorError::Dcm)?;
    if oracle.decide(prep.s()).map_err(SimulatorError::Dcm)? {
        Ok(())
    } else {
        Err(SimulatorError::RequiresYesInstance)
    }
}

/// Honest-verifier simulator for one atomic repetition: draw the
/// challenge bit first, then fabricate a commit that the recorded
/// response opens under that branch. One pass, no restarts.
pub fn simulate_atomic_honest(
    prep: &PreparedInstance,
    cap: u64,
    rng: &mut RandomSource,
) -> Result<View, SimulatorError> {
    require_yes(prep, cap)?;
    let b = rng.draw_bit();
    let g = prep.g_bsgs.uniform_sample(rng);
    let h = prep.h_bsgs.uniform_sample(rng);
    let t = if b { &g * &h } else { &(&g * prep.s()) * &h };
    Ok(View {
        consumed_randomness: BitString::from_bits([b]),
        messages: vec![Message::Commit(t), Message::Response(g, h)],
    })
}

/// Black-box simulator for the `k`-fold sequential composition against
/// an arbitrary verifier strategy.
pub fn simulate_sequential(
    prep: &PreparedInstance,
    strategy: &dyn VerifierStrategy,
    k: u32,
    cap: u64,
    restart_cap: u32,
    rng: &mut RandomSource,
) -> Result<SimulatedView, SimulatorError> {
    require_yes(prep, cap)?;
    let r = rng.draw_bits(strategy.randomness_bound(k as usize));
    let mut history: Vec<StageMessages> = Vec::new();
    let mut attempts_per_stage = Vec::with_capacity(k as usize);
    let mut scanned = 0;
    for stage in 0..k {
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            if attempts > restart_cap {
                return Err(SimulatorError::RestartCapExceeded {
                    stage,
                    cap: restart_cap,
                });
            }
            let guess_nonzero = rng.draw_bit();
            let g = prep.g_bsgs.uniform_sample(rng);
            let h = prep.h_bsgs.uniform_sample(rng);
            let t = if guess_nonzero {
                &g * &h
            } else {
                &(&g * prep.s()) * &h
            };
            let (challenge, used) = strategy.challenge(prep, &r, &history, &t);
            // Keep the stage iff the guess and the challenge picked the
            // same branch; only the scan along kept stages defines r'.
            if (challenge != 0) == guess_nonzero {
                history.push(StageMessages {
                    commit: t,
                    response: (g, h),
                });
                scanned = used;
                attempts_per_stage.push(attempts);
                break;
            }
        }
    }
    Ok(SimulatedView {
        view: view_from_stages(&r, scanned, &history),
        attempts_per_stage,
    })
}

/// The process whose view distribution is being enumerated.
pub enum ViewProcess<'a> {
    /// Honest prover against a verifier strategy, `k` sequential
    /// repetitions.
    Interaction { strategy: &'a dyn VerifierStrategy },
    /// The black-box sequential simulator against the same strategy.
    SequentialSimulator { strategy: &'a dyn VerifierStrategy },
    /// Direct enumeration of [`simulate_atomic_honest`]'s coins (k is
    /// ignored; the process is one repetition by definition).
    AtomicHonestSimulator,
    /// Honest parties in the non-membership protocol.
    DcnmInteraction,
    /// The non-membership simulator.
    DcnmSimulator,
}

/// Exact rational view distribution of a process over all of its coins.
pub fn exact_view_distribution(
    prep: &PreparedInstance,
    process: &ViewProcess<'_>,
    k: u32,
    state_cap: u64,
) -> Result<ExactDistribution, SimulatorError> {
    match process {
        ViewProcess::Interaction { strategy } => {
            exact_membership(prep, *strategy, k, state_cap, false)
        }
        ViewProcess::SequentialSimulator { strategy } => {
            exact_membership(prep, *strategy, k, state_cap, true)
        }
        ViewProcess::AtomicHonestSimulator => exact_atomic_simulator(prep, state_cap),
        ViewProcess::DcnmInteraction => exact_dcnm(prep, k, state_cap, false),
        ViewProcess::DcnmSimulator => exact_dcnm(prep, k, state_cap, true),
    }
}

fn check_states(branching: u128, depth: u32, r_bits: usize, cap: u64) -> Result<(), SimulatorError> {
    let too_large = Err(SimulatorError::StateSpaceTooLarge {
        states: u128::MAX,
        cap,
    });
    if r_bits > 24 {
        return too_large;
    }
    let mut states: u128 = 1 << r_bits;
    for _ in 0..depth {
        states = match states.checked_mul(branching) {
            Some(s) => s,
            None => return too_large,
        };
    }
    if states > cap as u128 {
        return Err(SimulatorError::StateSpaceTooLarge { states, cap });
    }
    Ok(())
}

fn ratio(num: u64, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn exact_membership(
    prep: &PreparedInstance,
    strategy: &dyn VerifierStrategy,
    k: u32,
    state_cap: u64,
    simulator: bool,
) -> Result<ExactDistribution, SimulatorError> {
    let oracle = CosetOracle::new(prep, state_cap).map_err(SimulatorError::Dcm)?;
    let witness = match oracle.factorize(prep.s()) {
        Ok(f) => f,
        Err(DcmError::NotInDoubleCoset) => return Err(SimulatorError::RequiresYesInstance),
        Err(e) => return Err(SimulatorError::Dcm(e)),
    };
    let g_elems = prep.g_bsgs.enumerate(state_cap)?;
    let h_elems = prep.h_bsgs.enumerate(state_cap)?;
    let pairs = (g_elems.len() * h_elems.len()) as u128;
    let r_bits = strategy.randomness_bound(k as usize);
    check_states(pairs * 2, k, r_bits, state_cap)?;

    let mut builder = DistributionBuilder::default();
    let r_weight = ratio(1, 1u128 << r_bits);
    let ctx = MembershipCtx {
        prep,
        strategy,
        witness: &witness,
        g_elems: &g_elems,
        h_elems: &h_elems,
        simulator,
    };
    for r in BitString::all_of_len(r_bits) {
        let mut history = Vec::with_capacity(k as usize);
        ctx.recurse(&r, &mut history, 0, k, r_weight.clone(), &mut builder);
    }
    Ok(builder.finish()?)
}

struct MembershipCtx<'a> {
    prep: &'a PreparedInstance,
    strategy: &'a dyn VerifierStrategy,
    witness: &'a Factorization,
    g_elems: &'a [Permutation],
    h_elems: &'a [Permutation],
    simulator: bool,
}

impl MembershipCtx<'_> {
    fn recurse(
        &self,
        r: &BitString,
        history: &mut Vec<StageMessages>,
        scanned: usize,
        stages_left: u32,
        weight: BigRational,
        builder: &mut DistributionBuilder,
    ) {
        if stages_left == 0 {
            let view = view_from_stages(r, scanned, history);
            builder.add(view.canonical_bytes(), weight);
            return;
        }
        let mut accepted: Vec<(StageMessages, usize)> = Vec::new();
        if self.simulator {
            // Candidate coins (guess, g, h); keep those whose guessed
            // branch matches the strategy's challenge. Exactly half are
            // kept on a YES instance, so conditional weights normalize
            // over the accepted list.
            for guess_nonzero in [false, true] {
                for g in self.g_elems {
                    for h in self.h_elems {
                        let t = if guess_nonzero {
                            g * h
                        } else {
                            &(g * self.prep.s()) * h
                        };
                        let (challenge, used) =
                            self.strategy.challenge(self.prep, r, history, &t);
                        if (challenge != 0) == guess_nonzero {
                            accepted.push((
                                StageMessages {
                                    commit: t,
                                    response: (g.clone(), h.clone()),
                                },
                                used,
                            ));
                        }
                    }
                }
            }
        } else {
            // Interaction: the honest prover always commits g·s·h and
            // answers the challenged branch through the witness.
            for g in self.g_elems {
                for h in self.h_elems {
                    let t = &(g * self.prep.s()) * h;
                    let (challenge, used) = self.strategy.challenge(self.prep, r, history, &t);
                    let response = if challenge == 0 {
                        (g.clone(), h.clone())
                    } else {
                        (g * &self.witness.g0, &self.witness.h0 * h)
                    };
                    accepted.push((
                        StageMessages {
                            commit: t,
                            response,
                        },
                        used,
                    ));
                }
            }
        }
        let per = weight / BigRational::from_integer(BigInt::from(accepted.len()));
        for (stage, used) in accepted {
            history.push(stage);
            self.recurse(r, history, used, stages_left - 1, per.clone(), builder);
            history.pop();
        }
    }
}

fn exact_atomic_simulator(
    prep: &PreparedInstance,
    state_cap: u64,
) -> Result<ExactDistribution, SimulatorError> {
    require_yes(prep, state_cap)?;
    let g_elems = prep.g_bsgs.enumerate(state_cap)?;
    let h_elems = prep.h_bsgs.enumerate(state_cap)?;
    let pairs = (g_elems.len() * h_elems.len()) as u128;
    check_states(pairs * 2, 1, 0, state_cap)?;
    let mut builder = DistributionBuilder::default();
    let weight = ratio(1, 2 * pairs);
    for b in [false, true] {
        for g in &g_elems {
            for h in &h_elems {
                let t = if b { g * h } else { &(g * prep.s()) * h };
                let view = View {
                    consumed_randomness: BitString::from_bits([b]),
                    messages: vec![
                        Message::Commit(t),
                        Message::Response(g.clone(), h.clone()),
                    ],
                };
                builder.add(view.canonical_bytes(), weight.clone());
            }
        }
    }
    Ok(builder.finish()?)
}

/// Exact DCNM view distribution over `k` repetitions. The probe
/// sampling is bit-exact, so it is replayed through the same sampling
/// code the live verifier uses; that requires fixed per-level draw
/// widths, hence power-of-two transversals.
fn exact_dcnm(
    prep: &PreparedInstance,
    k: u32,
    state_cap: u64,
    simulator: bool,
) -> Result<ExactDistribution, SimulatorError> {
    let oracle = CosetOracle::new(prep, state_cap).map_err(SimulatorError::Dcm)?;
    if oracle.decide(prep.s()).map_err(SimulatorError::Dcm)? {
        return Err(SimulatorError::RequiresNoInstance);
    }
    let g_widths = prep
        .g_bsgs
        .fixed_sample_widths()
        .ok_or(SimulatorError::UnboundedCoinSpace)?;
    let h_widths = prep
        .h_bsgs
        .fixed_sample_widths()
        .ok_or(SimulatorError::UnboundedCoinSpace)?;
    let rep_bits =
        1 + g_widths.iter().sum::<u32>() as usize + h_widths.iter().sum::<u32>() as usize;
    check_states(1 << rep_bits.min(64), k, 0, state_cap)?;

    let mut builder = DistributionBuilder::default();
    let total_weight = ratio(1, 1);
    recurse_dcnm(
        prep,
        &oracle,
        simulator,
        rep_bits,
        k,
        &BitString::new(),
        &Vec::new(),
        total_weight,
        &mut builder,
    )?;
    Ok(builder.finish()?)
}

#[allow(clippy::too_many_arguments)]
fn recurse_dcnm(
    prep: &PreparedInstance,
    oracle: &CosetOracle<'_>,
    simulator: bool,
    rep_bits: usize,
    reps_left: u32,
    bits: &BitString,
    messages: &[Message],
    weight: BigRational,
    builder: &mut DistributionBuilder,
) -> Result<(), SimulatorError> {
    if reps_left == 0 {
        let view = View {
            consumed_randomness: bits.clone(),
            messages: messages.to_vec(),
        };
        builder.add(view.canonical_bytes(), weight);
        return Ok(());
    }
    let per = weight / BigRational::from_integer(BigInt::from(1u128 << rep_bits));
    for rep_coins in BitString::all_of_len(rep_bits) {
        let mut src = ReplaySource::new(&rep_coins);
        let hidden = src.draw_bit();
        let g = prep.g_bsgs.uniform_sample(&mut src);
        let h = prep.h_bsgs.uniform_sample(&mut src);
        debug_assert_eq!(src.position(), rep_bits);
        let probe = if hidden { &(&g * prep.s()) * &h } else { &g * &h };
        let answer = if simulator {
            hidden as u8
        } else {
            !oracle.decide(&probe).map_err(SimulatorError::Dcm)? as u8
        };
        let mut next_bits = bits.clone();
        next_bits.extend(&rep_coins);
        let mut next_messages = messages.to_vec();
        next_messages.push(Message::Answer(answer));
        recurse_dcnm(
            prep,
            oracle,
            simulator,
            rep_bits,
            reps_left - 1,
            &next_bits,
            &next_messages,
            per.clone(),
            builder,
        )?;
    }
    Ok(())
}
