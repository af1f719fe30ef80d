//! The atomic protocol's party moves: commit, challenge, respond, check,
//! plus the honest and optimally cheating prover behaviors.
//!
//! One rule here is counterintuitive but deliberate: a commit that is not
//! a permutation of the instance's degree makes the verifier halt and
//! ACCEPT that repetition immediately. Only a cheating prover can send
//! one, and the accept costs it nothing it could not have had by playing
//! honestly on one branch; encoding the rule this way keeps the accepted
//! behavior exactly as specified.

use thiserror::Error;

use crate::dcm::{CosetOracle, DcmError, Factorization, PreparedInstance};
use crate::permgroup::Permutation;
use crate::protocol::message::Message;
use crate::rng::{BitSource, RandomSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("honest prover requires a YES instance")]
    RequiresYesInstance,
    #[error("cheating prover requires a NO instance")]
    RequiresNoInstance,
    #[error(transparent)]
    Dcm(#[from] DcmError),
    #[error("protocol violation: {0}")]
    Violation(String),
}

/// The honest prover's secret: a factorization of the instance's `s`.
#[derive(Debug, Clone)]
pub struct ProverWitness {
    pub factorization: Factorization,
}

impl ProverWitness {
    /// Obtain a witness from the desk-scale oracle. Fails with a
    /// resource error when the oracle refuses the enumeration and with
    /// `RequiresYesInstance` when `s ∉ GH`.
    pub fn obtain(prep: &PreparedInstance, cap: u64) -> Result<Self, ProtocolError> {
        let oracle = CosetOracle::new(prep, cap).map_err(ProtocolError::Dcm)?;
        match oracle.factorize(prep.s()) {
            Ok(factorization) => Ok(Self { factorization }),
            Err(DcmError::NotInDoubleCoset) => Err(ProtocolError::RequiresYesInstance),
            Err(e) => Err(ProtocolError::Dcm(e)),
        }
    }
}

/// Hidden prover state between commit and response.
#[derive(Debug, Clone)]
pub struct HiddenPair {
    pub g: Permutation,
    pub h: Permutation,
}

/// First round: sample `g ∈ G`, `h ∈ H` uniformly and commit `t = g·s·h`.
pub fn prover_commit(prep: &PreparedInstance, rng: &mut RandomSource) -> (Message, HiddenPair) {
    let g = prep.g_bsgs.uniform_sample(rng);
    let h = prep.h_bsgs.uniform_sample(rng);
    let t = &(&g * prep.s()) * &h;
    (Message::Commit(t), HiddenPair { g, h })
}

/// Third round: open the commit (`b = 0`) or shift it through the
/// witness (any `b ≠ 0`, including non-bit bytes from a cheating
/// verifier).
pub fn prover_respond(witness: &ProverWitness, hidden: &HiddenPair, challenge: u8) -> Message {
    if challenge == 0 {
        Message::Response(hidden.g.clone(), hidden.h.clone())
    } else {
        Message::Response(
            &hidden.g * &witness.factorization.g0,
            &witness.factorization.h0 * &hidden.h,
        )
    }
}

/// Second round: emit a fair challenge bit, or halt with an immediate
/// accept when the commit is not a permutation of the instance degree.
pub fn verifier_challenge(
    prep: &PreparedInstance,
    commit: &Message,
    rng: &mut RandomSource,
) -> Message {
    match commit {
        Message::Commit(t) if t.degree() == prep.degree() => {
            Message::Challenge(rng.draw_bit() as u8)
        }
        _ => Message::Verdict(true),
    }
}

/// Final check: both branches require group membership of the response
/// pair; branch 0 checks `x·s·y = t`, any other branch checks `x·y = t`.
pub fn verifier_check(
    prep: &PreparedInstance,
    commit: &Permutation,
    challenge: u8,
    x: &Permutation,
    y: &Permutation,
) -> bool {
    if x.degree() != prep.degree() || y.degree() != prep.degree() {
        return false;
    }
    let in_groups =
        prep.g_bsgs.contains(x).unwrap_or(false) && prep.h_bsgs.contains(y).unwrap_or(false);
    if !in_groups {
        return false;
    }
    let recombined = if challenge == 0 { &(x * prep.s()) * y } else { x * y };
    recombined == *commit
}

/// A prover's per-repetition play. Implementations are pure given the
/// repetition's random stream; the session engine keeps the hidden state
/// so parallel composition can hold all slots at once.
pub trait ProverBehavior {
    fn commit(&self, rng: &mut RandomSource) -> (Message, Option<HiddenPair>);
    fn respond(&self, hidden: Option<&HiddenPair>, challenge: u8) -> Message;
}

/// The prescribed prover.
pub struct HonestProver<'a> {
    prep: &'a PreparedInstance,
    witness: ProverWitness,
}

impl<'a> HonestProver<'a> {
    pub fn new(prep: &'a PreparedInstance, witness: ProverWitness) -> Self {
        Self { prep, witness }
    }
}

impl ProverBehavior for HonestProver<'_> {
    fn commit(&self, rng: &mut RandomSource) -> (Message, Option<HiddenPair>) {
        let (msg, hidden) = prover_commit(self.prep, rng);
        (msg, Some(hidden))
    }

    fn respond(&self, hidden: Option<&HiddenPair>, challenge: u8) -> Message {
        prover_respond(&self.witness, hidden.expect("honest prover keeps state"), challenge)
    }
}

/// The soundness-optimal cheater for NO instances: commits `t = g·h`,
/// which survives exactly the nonzero challenge branch, so the honest
/// verifier accepts with probability exactly 1/2 per repetition.
pub struct OptimalCheatingProver<'a> {
    prep: &'a PreparedInstance,
}

impl<'a> OptimalCheatingProver<'a> {
    pub fn new(prep: &'a PreparedInstance, cap: u64) -> Result<Self, ProtocolError> {
        let oracle = CosetOracle::new(prep, cap).map_err(ProtocolError::Dcm)?;
        if oracle.decide(prep.s()).map_err(ProtocolError::Dcm)? {
            return Err(ProtocolError::RequiresNoInstance);
        }
        Ok(Self { prep })
    }
}

impl ProverBehavior for OptimalCheatingProver<'_> {
    fn commit(&self, rng: &mut RandomSource) -> (Message, Option<HiddenPair>) {
        let g = self.prep.g_bsgs.uniform_sample(rng);
        let h = self.prep.h_bsgs.uniform_sample(rng);
        let t = &g * &h;
        (Message::Commit(t), Some(HiddenPair { g, h }))
    }

    fn respond(&self, hidden: Option<&HiddenPair>, _challenge: u8) -> Message {
        let hidden = hidden.expect("cheater keeps state");
        Message::Response(hidden.g.clone(), hidden.h.clone())
    }
}

/// A prover that commits a permutation of the wrong degree; exists to
/// exercise the malformed-commit accept rule end to end.
pub struct WrongDegreeProver {
    pub degree: usize,
}

impl ProverBehavior for WrongDegreeProver {
    fn commit(&self, _rng: &mut RandomSource) -> (Message, Option<HiddenPair>) {
        (Message::Commit(Permutation::identity(self.degree + 1)), None)
    }

    fn respond(&self, _hidden: Option<&HiddenPair>, _challenge: u8) -> Message {
        Message::Response(
            Permutation::identity(self.degree),
            Permutation::identity(self.degree),
        )
    }
}
