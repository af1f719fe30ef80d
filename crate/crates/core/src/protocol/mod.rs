//! The three-round public-coin membership protocol: messages and wire
//! format, party moves, session engines, and drivers for sequential and
//! parallel composition.

pub mod engine;
pub mod message;
pub mod parties;
pub mod runner;
pub mod strategy;

pub use engine::{ProverEngine, SessionMeta, SessionOutcome, SessionParty, VerifierEngine};
pub use message::{Message, Mode, Round, Transcript, View, WireError};
pub use parties::{
    prover_commit, prover_respond, verifier_challenge, verifier_check, HiddenPair, HonestProver,
    OptimalCheatingProver, ProtocolError, ProverBehavior, ProverWitness, WrongDegreeProver,
};
pub use runner::{
    drive_over_channel, run_honest_session, run_lockstep, run_session, sample_interaction_view,
    view_from_stages, SessionError,
};
pub use strategy::{
    strategy_by_name, strategy_zoo, CommitParityStrategy, ConstantStrategy, HonestStrategy,
    RandomEchoStrategy, StageMessages, VerifierStrategy,
};
