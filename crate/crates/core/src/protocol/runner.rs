//! Session drivers: lockstep in-memory execution, channel-driven
//! execution for any byte transport, and the strategy-driven interaction
//! sampler used by the zero-knowledge comparisons.

use thiserror::Error;

use crate::bits::BitString;
use crate::dcm::PreparedInstance;
use crate::protocol::engine::{
    ProverEngine, SessionMeta, SessionOutcome, SessionParty, VerifierEngine,
};
use crate::protocol::message::{Message, Mode, Round, View};
use crate::protocol::parties::{
    prover_commit, prover_respond, ProtocolError, ProverBehavior, ProverWitness,
};
use crate::protocol::strategy::{StageMessages, VerifierStrategy};
use crate::rng::{BitSource, RandomSource};
use crate::transport::{Channel, TransportError};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

/// Drive two parties to completion in one thread, `opener` moving first.
pub fn run_lockstep(
    opener: &mut dyn SessionParty,
    responder: &mut dyn SessionParty,
) -> Result<(), ProtocolError> {
    let mut to_responder: std::collections::VecDeque<Round> = opener.start()?.into();
    let mut to_opener: std::collections::VecDeque<Round> = std::collections::VecDeque::new();
    loop {
        if let Some(round) = to_responder.pop_front() {
            to_opener.extend(responder.receive(&round)?);
        } else if let Some(round) = to_opener.pop_front() {
            to_responder.extend(opener.receive(&round)?);
        } else if opener.is_done() && responder.is_done() {
            return Ok(());
        } else {
            return Err(ProtocolError::Violation(
                "session stalled with both parties waiting".into(),
            ));
        }
    }
}

/// Drive one party over a channel until it finishes.
pub fn drive_over_channel<C: Channel + ?Sized>(
    party: &mut dyn SessionParty,
    channel: &mut C,
    opens: bool,
) -> Result<(), SessionError> {
    if opens {
        for round in party.start()? {
            channel.send_frame(&round.encode().map_err(TransportError::from)?)?;
        }
    }
    while !party.is_done() {
        let body = channel.recv_frame()?;
        let replies = match Round::decode(&body) {
            Ok(round) => party.receive(&round)?,
            Err(err) => party.receive_undecodable(&body, &err)?,
        };
        for reply in replies {
            channel.send_frame(&reply.encode().map_err(TransportError::from)?)?;
        }
    }
    Ok(())
}

/// Run a full membership-protocol session in process and return the
/// verifier's outcome. The prover's transcript is checked against the
/// verifier's; any divergence is a bug, not a protocol result.
pub fn run_session(
    prep: &PreparedInstance,
    behavior: &dyn ProverBehavior,
    mode: Mode,
    seed_prover: &[u8],
    seed_verifier: &[u8],
) -> Result<SessionOutcome, ProtocolError> {
    let meta = SessionMeta::new(prep, mode).with_seeds(Some(seed_prover), Some(seed_verifier));
    let mut prover = ProverEngine::new(behavior, meta.clone(), seed_prover);
    let mut verifier = VerifierEngine::new(prep, meta, seed_verifier);
    run_lockstep(&mut prover, &mut verifier)?;
    let outcome = verifier.outcome();
    debug_assert_eq!(prover.transcript(), outcome.transcript);
    Ok(outcome)
}

/// `run_session` with the prescribed prover; fails on NO instances.
pub fn run_honest_session(
    prep: &PreparedInstance,
    mode: Mode,
    cap: u64,
    seed_prover: &[u8],
    seed_verifier: &[u8],
) -> Result<SessionOutcome, ProtocolError> {
    let witness = ProverWitness::obtain(prep, cap)?;
    let honest = crate::protocol::parties::HonestProver::new(prep, witness);
    run_session(prep, &honest, mode, seed_prover, seed_verifier)
}

/// The honest prover interacting with an arbitrary verifier strategy for
/// `k` sequential repetitions; returns the strategy's view. This is the
/// interaction side of every zero-knowledge comparison.
pub fn sample_interaction_view(
    prep: &PreparedInstance,
    witness: &ProverWitness,
    strategy: &dyn VerifierStrategy,
    k: u32,
    prover_rng: &mut RandomSource,
    verifier_rng: &mut RandomSource,
) -> View {
    let r = verifier_rng.draw_bits(strategy.randomness_bound(k as usize));
    let mut history: Vec<StageMessages> = Vec::new();
    let mut scanned = 0;
    for _ in 0..k {
        let (commit, hidden) = prover_commit(prep, prover_rng);
        let Message::Commit(t) = commit else { unreachable!() };
        let (challenge, used) = strategy.challenge(prep, &r, &history, &t);
        scanned = used;
        let Message::Response(x, y) = prover_respond(witness, &hidden, challenge) else {
            unreachable!()
        };
        history.push(StageMessages {
            commit: t,
            response: (x, y),
        });
    }
    view_from_stages(&r, scanned, &history)
}

/// Assemble a view from the scanned prefix and per-stage prover messages.
pub fn view_from_stages(r: &BitString, scanned: usize, stages: &[StageMessages]) -> View {
    let mut messages = Vec::with_capacity(stages.len() * 2);
    for stage in stages {
        messages.push(Message::Commit(stage.commit.clone()));
        messages.push(Message::Response(stage.response.0.clone(), stage.response.1.clone()));
    }
    View {
        consumed_randomness: r.prefix(scanned),
        messages,
    }
}
