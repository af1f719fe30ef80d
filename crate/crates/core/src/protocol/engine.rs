//! Session state machines for the membership protocol.
//!
//! A session is one or more repetitions of the atomic exchange. In
//! sequential mode each repetition is commit / challenge / response /
//! per-repetition verdict on the wire; in parallel mode the slot
//! messages of each round travel bundled in a single frame, so the
//! protocol has three rounds (plus the final verdict) for any
//! repetition count. The session verdict is the conjunction of the
//! repetition verdicts.
//!
//! Each repetition (or parallel slot) draws from its own random stream,
//! derived from the party seed and the repetition index.

use crate::bits::BitString;
use crate::dcm::PreparedInstance;
use crate::permgroup::Permutation;
use crate::protocol::message::{Message, Mode, Round, Transcript, View};
use crate::protocol::parties::{verifier_check, HiddenPair, ProtocolError, ProverBehavior};
use crate::rng::{BitSource, PartyTag, RandomSource};

/// Transcript header data shared by both engines of a session.
#[derive(Debug, Clone)]
pub struct SessionMeta {
    pub digest: [u8; 32],
    pub mode: Mode,
    pub seed_prover: Option<Vec<u8>>,
    pub seed_verifier: Option<Vec<u8>>,
}

impl SessionMeta {
    pub fn new(prep: &PreparedInstance, mode: Mode) -> Self {
        Self {
            digest: prep.digest(),
            mode,
            seed_prover: None,
            seed_verifier: None,
        }
    }

    pub fn with_seeds(mut self, prover: Option<&[u8]>, verifier: Option<&[u8]>) -> Self {
        self.seed_prover = prover.map(<[u8]>::to_vec);
        self.seed_verifier = verifier.map(<[u8]>::to_vec);
        self
    }
}

/// A party that can be driven round by round over any channel.
pub trait SessionParty {
    /// Rounds sent unprompted at session start (the opener's first move).
    fn start(&mut self) -> Result<Vec<Round>, ProtocolError> {
        Ok(Vec::new())
    }

    /// Consume one incoming round and produce the immediate replies.
    fn receive(&mut self, round: &Round) -> Result<Vec<Round>, ProtocolError>;

    /// Consume a frame that did not decode as a round (oversize, or
    /// malformed under a tag with no raw fallback). The default treats
    /// it as a protocol violation; the verifier overrides it to apply
    /// the oversize rules per position.
    fn receive_undecodable(
        &mut self,
        body: &[u8],
        error: &crate::protocol::message::WireError,
    ) -> Result<Vec<Round>, ProtocolError> {
        let _ = body;
        Err(ProtocolError::Violation(format!("undecodable frame: {error}")))
    }

    fn is_done(&self) -> bool;
}

/// Result of a completed session, as seen by the verifier.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub transcript: Transcript,
    pub view: View,
    pub accepted: bool,
}

fn violation<T>(what: &str, round: &Round) -> Result<T, ProtocolError> {
    Err(ProtocolError::Violation(format!(
        "{what}, got tag {}",
        round.tag()
    )))
}

enum ProverPhase {
    SendCommit,
    AwaitChallenge,
    AwaitVerdict,
    ParAwaitChallenges,
    ParAwaitVerdict,
    Done,
}

/// Prover side of a session. Opens the conversation.
pub struct ProverEngine<'a> {
    behavior: &'a dyn ProverBehavior,
    meta: SessionMeta,
    seed: Vec<u8>,
    k: u32,
    parallel: bool,
    rep: u32,
    hidden: Vec<Option<HiddenPair>>,
    phase: ProverPhase,
    rounds: Vec<Round>,
    rep_verdicts: Vec<bool>,
}

impl<'a> ProverEngine<'a> {
    pub fn new(
        behavior: &'a dyn ProverBehavior,
        meta: SessionMeta,
        seed: &[u8],
    ) -> Self {
        Self {
            behavior,
            seed: seed.to_vec(),
            k: meta.mode.repetitions(),
            parallel: matches!(meta.mode, Mode::Parallel(_)),
            meta,
            rep: 0,
            hidden: Vec::new(),
            phase: ProverPhase::SendCommit,
            rounds: Vec::new(),
            rep_verdicts: Vec::new(),
        }
    }

    fn rng(&self, repetition: u32) -> RandomSource {
        RandomSource::derive(&self.seed, PartyTag::Prover, repetition as u64)
    }

    fn send(&mut self, round: Round) -> Round {
        self.rounds.push(round.clone());
        round
    }

    fn next_commit(&mut self) -> Round {
        let mut rng = self.rng(self.rep);
        let (msg, hidden) = self.behavior.commit(&mut rng);
        self.hidden = vec![hidden];
        self.phase = ProverPhase::AwaitChallenge;
        self.send(Round::single(msg))
    }

    /// Transcript as recorded on the prover side; byte-identical to the
    /// verifier's for any completed session.
    pub fn transcript(&self) -> Transcript {
        Transcript {
            instance_digest: self.meta.digest,
            mode: self.meta.mode,
            seed_prover: self.meta.seed_prover.clone(),
            seed_verifier: self.meta.seed_verifier.clone(),
            rounds: self.rounds.clone(),
            verdict: self.rep_verdicts.iter().all(|&v| v) && !self.rep_verdicts.is_empty(),
        }
    }
}

impl SessionParty for ProverEngine<'_> {
    fn start(&mut self) -> Result<Vec<Round>, ProtocolError> {
        if self.parallel {
            let mut commits = Vec::with_capacity(self.k as usize);
            let mut hidden = Vec::with_capacity(self.k as usize);
            for slot in 0..self.k {
                let mut rng = self.rng(slot);
                let (msg, h) = self.behavior.commit(&mut rng);
                commits.push(msg);
                hidden.push(h);
            }
            self.hidden = hidden;
            self.phase = ProverPhase::ParAwaitChallenges;
            Ok(vec![self.send(Round::bundle(commits))])
        } else {
            Ok(vec![self.next_commit()])
        }
    }

    fn receive(&mut self, round: &Round) -> Result<Vec<Round>, ProtocolError> {
        self.rounds.push(round.clone());
        match self.phase {
            ProverPhase::AwaitChallenge => match &round.messages[..] {
                [Message::Challenge(b)] => {
                    let msg = self.behavior.respond(self.hidden[0].as_ref(), *b);
                    self.phase = ProverPhase::AwaitVerdict;
                    Ok(vec![self.send(Round::single(msg))])
                }
                // Malformed-commit short-circuit: the repetition ended
                // with an immediate accept.
                [Message::Verdict(v)] => {
                    self.rep_verdicts.push(*v);
                    self.advance_rep()
                }
                _ => violation("expected challenge or verdict", round),
            },
            ProverPhase::AwaitVerdict => match &round.messages[..] {
                [Message::Verdict(v)] => {
                    self.rep_verdicts.push(*v);
                    self.advance_rep()
                }
                _ => violation("expected verdict", round),
            },
            ProverPhase::ParAwaitChallenges => {
                if round.messages.len() != self.k as usize
                    || !round.messages.iter().all(|m| matches!(m, Message::Challenge(_)))
                {
                    return violation("expected challenge bundle", round);
                }
                let responses = round
                    .messages
                    .iter()
                    .enumerate()
                    .map(|(slot, m)| {
                        let Message::Challenge(b) = m else { unreachable!() };
                        self.behavior.respond(self.hidden[slot].as_ref(), *b)
                    })
                    .collect();
                self.phase = ProverPhase::ParAwaitVerdict;
                Ok(vec![self.send(Round::bundle(responses))])
            }
            ProverPhase::ParAwaitVerdict => match &round.messages[..] {
                [Message::Verdict(v)] => {
                    self.rep_verdicts.push(*v);
                    self.phase = ProverPhase::Done;
                    Ok(Vec::new())
                }
                _ => violation("expected final verdict", round),
            },
            ProverPhase::SendCommit | ProverPhase::Done => {
                violation("prover not expecting a message", round)
            }
        }
    }

    fn is_done(&self) -> bool {
        matches!(self.phase, ProverPhase::Done)
    }
}

impl ProverEngine<'_> {
    fn advance_rep(&mut self) -> Result<Vec<Round>, ProtocolError> {
        self.rep += 1;
        if self.rep < self.k {
            Ok(vec![self.next_commit()])
        } else {
            self.phase = ProverPhase::Done;
            Ok(Vec::new())
        }
    }
}

enum VerifierPhase {
    AwaitCommit,
    AwaitResponse,
    ParAwaitCommits,
    ParAwaitResponses,
    Done,
}

/// Honest verifier side of a session.
pub struct VerifierEngine<'a> {
    prep: &'a PreparedInstance,
    meta: SessionMeta,
    seed: Vec<u8>,
    k: u32,
    rep: u32,
    phase: VerifierPhase,
    current_commit: Option<Permutation>,
    current_challenge: u8,
    par_commits: Vec<Option<Permutation>>,
    par_challenges: Vec<u8>,
    rep_verdicts: Vec<bool>,
    rounds: Vec<Round>,
    view_bits: BitString,
    view_messages: Vec<Message>,
    bits_drawn: usize,
}

impl<'a> VerifierEngine<'a> {
    pub fn new(prep: &'a PreparedInstance, meta: SessionMeta, seed: &[u8]) -> Self {
        let parallel = matches!(meta.mode, Mode::Parallel(_));
        Self {
            prep,
            seed: seed.to_vec(),
            k: meta.mode.repetitions(),
            meta,
            rep: 0,
            phase: if parallel {
                VerifierPhase::ParAwaitCommits
            } else {
                VerifierPhase::AwaitCommit
            },
            current_commit: None,
            current_challenge: 0,
            par_commits: Vec::new(),
            par_challenges: Vec::new(),
            rep_verdicts: Vec::new(),
            rounds: Vec::new(),
            view_bits: BitString::new(),
            view_messages: Vec::new(),
            bits_drawn: 0,
        }
    }

    fn draw_challenge(&mut self, repetition: u32) -> u8 {
        let mut rng = RandomSource::derive(&self.seed, PartyTag::Verifier, repetition as u64);
        let bit = rng.draw_bit();
        self.bits_drawn += rng.consumed_bits();
        self.view_bits.push(bit);
        bit as u8
    }

    fn send(&mut self, round: Round) -> Round {
        self.rounds.push(round.clone());
        round
    }

    fn finish_rep(&mut self, accept: bool) -> Vec<Round> {
        self.rep_verdicts.push(accept);
        self.rep += 1;
        self.phase = if self.rep < self.k {
            VerifierPhase::AwaitCommit
        } else {
            VerifierPhase::Done
        };
        vec![self.send(Round::single(Message::Verdict(accept)))]
    }

    pub fn accepted(&self) -> bool {
        !self.rep_verdicts.is_empty() && self.rep_verdicts.iter().all(|&v| v)
    }

    /// Total random bits this engine's sources handed out; equals the
    /// view's consumed-randomness length in every honest session.
    pub fn bits_consumed(&self) -> usize {
        self.bits_drawn
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

impl SessionParty for VerifierEngine<'_> {
    fn receive(&mut self, round: &Round) -> Result<Vec<Round>, ProtocolError> {
        self.rounds.push(round.clone());
        match self.phase {
            VerifierPhase::AwaitCommit => {
                if round.messages.len() != 1 || round.tag() != crate::protocol::message::TAG_COMMIT
                {
                    return violation("expected commit", round);
                }
                self.view_messages.push(round.messages[0].clone());
                match &round.messages[0] {
                    Message::Commit(t) if t.degree() == self.prep.degree() => {
                        self.current_commit = Some(t.clone());
                        let b = self.draw_challenge(self.rep);
                        self.current_challenge = b;
                        self.phase = VerifierPhase::AwaitResponse;
                        Ok(vec![self.send(Round::single(Message::Challenge(b)))])
                    }
                    // Not a permutation of the instance degree: halt the
                    // repetition and output 1.
                    _ => Ok(self.finish_rep(true)),
                }
            }
            VerifierPhase::AwaitResponse => match &round.messages[..] {
                [Message::Response(x, y)] => {
                    self.view_messages.push(round.messages[0].clone());
                    let commit = self.current_commit.take().expect("commit recorded");
                    let accept =
                        verifier_check(self.prep, &commit, self.current_challenge, x, y);
                    Ok(self.finish_rep(accept))
                }
                _ => violation("expected response", round),
            },
            VerifierPhase::ParAwaitCommits => {
                let slots = round.messages.len();
                let all_commits = round
                    .messages
                    .iter()
                    .all(|m| matches!(m, Message::Commit(_) | Message::RawCommit(_)));
                if !all_commits {
                    return violation("expected commit bundle", round);
                }
                self.view_messages.extend(round.messages.iter().cloned());
                // A bundle that decoded to the wrong slot count (for
                // example one RawCommit) marks every slot malformed.
                self.par_commits = if slots == self.k as usize {
                    round
                        .messages
                        .iter()
                        .map(|m| match m {
                            Message::Commit(t) if t.degree() == self.prep.degree() => {
                                Some(t.clone())
                            }
                            _ => None,
                        })
                        .collect()
                } else {
                    vec![None; self.k as usize]
                };
                let challenges: Vec<Message> = (0..self.k)
                    .map(|slot| {
                        let b = if self.par_commits[slot as usize].is_some() {
                            self.draw_challenge(slot)
                        } else {
                            // Malformed slot: pre-accepted, no bit drawn.
                            0
                        };
                        Message::Challenge(b)
                    })
                    .collect();
                self.par_challenges = challenges
                    .iter()
                    .map(|m| match m {
                        Message::Challenge(b) => *b,
                        _ => unreachable!(),
                    })
                    .collect();
                self.phase = VerifierPhase::ParAwaitResponses;
                Ok(vec![self.send(Round::bundle(challenges))])
            }
            VerifierPhase::ParAwaitResponses => {
                if round.messages.len() != self.k as usize
                    || !round.messages.iter().all(|m| matches!(m, Message::Response(..)))
                {
                    return violation("expected response bundle", round);
                }
                self.view_messages.extend(round.messages.iter().cloned());
                let mut all = true;
                for (slot, msg) in round.messages.iter().enumerate() {
                    let Message::Response(x, y) = msg else { unreachable!() };
                    let accept = match &self.par_commits[slot] {
                        Some(t) => verifier_check(self.prep, t, self.par_challenges[slot], x, y),
                        None => true,
                    };
                    self.rep_verdicts.push(accept);
                    all &= accept;
                }
                self.phase = VerifierPhase::Done;
                Ok(vec![self.send(Round::single(Message::Verdict(all)))])
            }
            VerifierPhase::Done => violation("verifier already finished", round),
        }
    }

    /// Frames that cannot be decoded follow the payload-size rules: in
    /// commit position they count as malformed commits (immediate
    /// accept, payload recorded truncated); in response position they
    /// fail the checks (reject). Anything else is a violation.
    fn receive_undecodable(
        &mut self,
        body: &[u8],
        error: &crate::protocol::message::WireError,
    ) -> Result<Vec<Round>, ProtocolError> {
        let tag = body.first().copied();
        match (&self.phase, tag) {
            (VerifierPhase::AwaitCommit, Some(crate::protocol::message::TAG_COMMIT)) => {
                let preview = body[1..body.len().min(65)].to_vec();
                let synthetic = Round::single(Message::RawCommit(preview));
                self.rounds.push(synthetic.clone());
                self.view_messages.push(synthetic.messages[0].clone());
                Ok(self.finish_rep(true))
            }
            (VerifierPhase::AwaitResponse, Some(crate::protocol::message::TAG_RESPONSE)) => {
                self.current_commit = None;
                Ok(self.finish_rep(false))
            }
            (VerifierPhase::ParAwaitCommits, Some(crate::protocol::message::TAG_COMMIT)) => {
                let preview = body[1..body.len().min(65)].to_vec();
                let synthetic = Round::single(Message::RawCommit(preview));
                self.rounds.push(synthetic.clone());
                self.view_messages.push(synthetic.messages[0].clone());
                self.par_commits = vec![None; self.k as usize];
                self.par_challenges = vec![0; self.k as usize];
                let challenges = vec![Message::Challenge(0); self.k as usize];
                self.phase = VerifierPhase::ParAwaitResponses;
                Ok(vec![self.send(Round::bundle(challenges))])
            }
            (VerifierPhase::ParAwaitResponses, Some(crate::protocol::message::TAG_RESPONSE)) => {
                for _ in 0..self.k {
                    self.rep_verdicts.push(false);
                }
                self.phase = VerifierPhase::Done;
                Ok(vec![self.send(Round::single(Message::Verdict(false)))])
            }
            _ => Err(ProtocolError::Violation(format!(
                "undecodable frame (tag {tag:?}): {error}"
            ))),
        }
    }

    fn is_done(&self) -> bool {
        matches!(self.phase, VerifierPhase::Done)
    }
}
