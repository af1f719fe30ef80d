//! The two-round honest-verifier protocol for double coset
//! NON-membership, and its simulator.
//!
//! The verifier hides a coin inside its probe: on heads the probe is a
//! plain product `g·h`, on tails it is `g·s·h`. On a NO instance those
//! land on opposite sides of `GH`, so a prover that can recognize
//! membership echoes the coin; on a YES instance the probe's
//! distribution is uniform on `GH` either way and carries no trace of
//! the coin. Unlike the membership protocol this one is NOT public-coin:
//! the verifier's randomness stays inside the probe, so transcript
//! checkers must not apply the public-coin invariant to it.

use crate::dcm::{CosetOracle, PreparedInstance};
use crate::permgroup::Permutation;
use crate::protocol::engine::{SessionMeta, SessionOutcome, SessionParty};
use crate::protocol::message::{Message, Round, Transcript, View};
use crate::protocol::parties::ProtocolError;
use crate::bits::BitString;
use crate::rng::{BitSource, PartyTag, RandomSource};

/// The verifier's probe together with its hidden state.
#[derive(Debug, Clone)]
pub struct DcnmChallenge {
    pub probe: Permutation,
    pub hidden_bit: bool,
    pub hidden_g: Permutation,
    pub hidden_h: Permutation,
}

/// First round: flip the hidden coin `b` (the first consumed random
/// bit), sample `g` and `h` from the subsequent bits, and probe with
/// `g·h` when `b = 0` or `g·s·h` when `b = 1`.
pub fn dcnm_verifier_probe(prep: &PreparedInstance, rng: &mut RandomSource) -> DcnmChallenge {
    let hidden_bit = rng.draw_bit();
    let g = prep.g_bsgs.uniform_sample(rng);
    let h = prep.h_bsgs.uniform_sample(rng);
    let probe = if hidden_bit {
        &(&g * prep.s()) * &h
    } else {
        &g * &h
    };
    DcnmChallenge {
        probe,
        hidden_bit,
        hidden_g: g,
        hidden_h: h,
    }
}

/// Second round: the prover recognizes membership of the probe in `GH`
/// (via the desk-scale oracle) and answers 0 for inside, 1 for outside.
pub fn dcnm_prover_answer(
    oracle: &CosetOracle<'_>,
    probe: &Permutation,
) -> Result<u8, ProtocolError> {
    Ok(!oracle.decide(probe).map_err(ProtocolError::Dcm)? as u8)
}

/// The verifier accepts iff the answer equals its hidden coin.
pub fn dcnm_verdict(challenge: &DcnmChallenge, answer: u8) -> bool {
    answer == challenge.hidden_bit as u8
}

/// Honest-verifier simulator: on a NO instance the honest prover's
/// answer always equals the hidden coin, so the simulator draws the same
/// randomness the verifier would, sets the answer to the coin, and emits
/// the scanned prefix. Output distribution is identical to the
/// interaction view.
pub fn simulate_dcnm_honest(
    prep: &PreparedInstance,
    cap: u64,
    rng: &mut RandomSource,
) -> Result<View, ProtocolError> {
    let oracle = CosetOracle::new(prep, cap).map_err(ProtocolError::Dcm)?;
    if oracle.decide(prep.s()).map_err(ProtocolError::Dcm)? {
        return Err(ProtocolError::RequiresNoInstance);
    }
    let before = rng.consumed_bits();
    let challenge = dcnm_verifier_probe(prep, rng);
    let scanned = rng.consumed_bits() - before;
    let mut consumed = BitString::new();
    for i in before..before + scanned {
        consumed.push(rng.trace().get(i));
    }
    Ok(View {
        consumed_randomness: consumed,
        messages: vec![Message::Answer(challenge.hidden_bit as u8)],
    })
}

/// A prover answer rule; the honest one consults the oracle, cheating
/// ones are arbitrary functions of the probe.
pub trait DcnmAnswerRule {
    fn answer(&self, probe: &Permutation) -> Result<u8, ProtocolError>;
}

/// Honest prover backed by the membership oracle.
pub struct HonestDcnmProver<'a> {
    oracle: CosetOracle<'a>,
}

impl<'a> HonestDcnmProver<'a> {
    pub fn new(prep: &'a PreparedInstance, cap: u64) -> Result<Self, ProtocolError> {
        Ok(Self {
            oracle: CosetOracle::new(prep, cap).map_err(ProtocolError::Dcm)?,
        })
    }
}

impl DcnmAnswerRule for HonestDcnmProver<'_> {
    fn answer(&self, probe: &Permutation) -> Result<u8, ProtocolError> {
        dcnm_prover_answer(&self.oracle, probe)
    }
}

/// Cheater answering a constant bit; on a YES instance no answer rule
/// does better than probability 1/2 per repetition.
pub struct ConstantAnswer(pub u8);

impl DcnmAnswerRule for ConstantAnswer {
    fn answer(&self, _probe: &Permutation) -> Result<u8, ProtocolError> {
        Ok(self.0)
    }
}

/// Verifier engine for `k` sequential repetitions. Opens the session.
pub struct DcnmVerifierEngine<'a> {
    prep: &'a PreparedInstance,
    meta: SessionMeta,
    seed: Vec<u8>,
    k: u32,
    rep: u32,
    pending: Option<DcnmChallenge>,
    rep_verdicts: Vec<bool>,
    rounds: Vec<Round>,
    view_bits: BitString,
    view_messages: Vec<Message>,
    done: bool,
}

impl<'a> DcnmVerifierEngine<'a> {
    pub fn new(prep: &'a PreparedInstance, meta: SessionMeta, seed: &[u8]) -> Self {
        Self {
            prep,
            seed: seed.to_vec(),
            k: meta.mode.repetitions(),
            meta,
            rep: 0,
            pending: None,
            rep_verdicts: Vec::new(),
            rounds: Vec::new(),
            view_bits: BitString::new(),
            view_messages: Vec::new(),
            done: false,
        }
    }

    fn probe_round(&mut self) -> Round {
        let mut rng = RandomSource::derive(&self.seed, PartyTag::Verifier, self.rep as u64);
        let challenge = dcnm_verifier_probe(self.prep, &mut rng);
        self.view_bits.extend(rng.trace());
        let round = Round::single(Message::Probe(challenge.probe.clone()));
        self.pending = Some(challenge);
        self.rounds.push(round.clone());
        round
    }

    pub fn accepted(&self) -> bool {
        !self.rep_verdicts.is_empty() && self.rep_verdicts.iter().all(|&v| v)
    }

    pub fn outcome(&self) -> SessionOutcome {
        SessionOutcome {
            transcript: Transcript {
                instance_digest: self.meta.digest,
                mode: self.meta.mode,
                seed_prover: self.meta.seed_prover.clone(),
                seed_verifier: self.meta.seed_verifier.clone(),
                rounds: self.rounds.clone(),
                verdict: self.accepted(),
            },
            view: View {
                consumed_randomness: self.view_bits.clone(),
                messages: self.view_messages.clone(),
            },
            accepted: self.accepted(),
        }
    }
}

impl SessionParty for DcnmVerifierEngine<'_> {
    fn start(&mut self) -> Result<Vec<Round>, ProtocolError> {
        Ok(vec![self.probe_round()])
    }

    fn receive(&mut self, round: &Round) -> Result<Vec<Round>, ProtocolError> {
        self.rounds.push(round.clone());
        let [Message::Answer(a)] = &round.messages[..] else {
            return Err(ProtocolError::Violation(format!(
                "expected answer, got tag {}",
                round.tag()
            )));
        };
        self.view_messages.push(round.messages[0].clone());
        let challenge = self
            .pending
            .take()
            .ok_or_else(|| ProtocolError::Violation("answer without probe".into()))?;
        let accept = dcnm_verdict(&challenge, *a);
        self.rep_verdicts.push(accept);
        let verdict = Round::single(Message::Verdict(accept));
        self.rounds.push(verdict.clone());
        self.rep += 1;
        if self.rep < self.k {
            Ok(vec![verdict, self.probe_round()])
        } else {
            self.done = true;
            Ok(vec![verdict])
        }
    }

    fn is_done(&self) -> bool {
        self.done
    }
}

/// Prover engine answering probes by an answer rule.
pub struct DcnmProverEngine<'a> {
    rule: &'a dyn DcnmAnswerRule,
    k: u32,
    verdicts_seen: u32,
    rounds: Vec<Round>,
    done: bool,
}

impl<'a> DcnmProverEngine<'a> {
    pub fn new(rule: &'a dyn DcnmAnswerRule, k: u32) -> Self {
        Self {
            rule,
            k,
            verdicts_seen: 0,
            rounds: Vec::new(),
            done: false,
        }
    }
}

impl SessionParty for DcnmProverEngine<'_> {
    fn receive(&mut self, round: &Round) -> Result<Vec<Round>, ProtocolError> {
        self.rounds.push(round.clone());
        match &round.messages[..] {
            [Message::Probe(t)] => {
                let answer = self.rule.answer(t)?;
                let reply = Round::single(Message::Answer(answer));
                self.rounds.push(reply.clone());
                Ok(vec![reply])
            }
            [Message::Verdict(_)] => {
                self.verdicts_seen += 1;
                if self.verdicts_seen == self.k {
                    self.done = true;
                }
                Ok(Vec::new())
            }
            _ => Err(ProtocolError::Violation(format!(
                "expected probe or verdict, got tag {}",
                round.tag()
            ))),
        }
    }

    fn is_done(&self) -> bool {
        self.done
    }
}
