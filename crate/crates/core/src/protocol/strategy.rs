//! Verifier strategies: the honest challenge rule and a zoo of cheating
//! verifiers used to exercise the black-box simulator.
//!
//! A strategy is a deterministic function of the instance, the verifier's
//! random string, and the prover messages seen so far. It reports, along
//! with each challenge, the total number of random bits it has scanned,
//! which defines the `r'` prefix of its view.

use crate::bits::BitString;
use crate::dcm::PreparedInstance;
use crate::permgroup::Permutation;

/// Prover messages of one completed atomic repetition, as the verifier
/// saw them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageMessages {
    pub commit: Permutation,
    pub response: (Permutation, Permutation),
}

/// A deterministic verifier program with bounded randomness.
pub trait VerifierStrategy {
    fn name(&self) -> &'static str;

    /// Bits of the random string the strategy may scan over `stages`
    /// repetitions.
    fn randomness_bound(&self, stages: usize) -> usize;

    /// Challenge for the current stage, given the full random string,
    /// the prior completed stages, and the fresh commit. Returns the
    /// challenge byte and the total bits of `r` scanned so far
    /// (monotone in the stage index).
    fn challenge(
        &self,
        prep: &PreparedInstance,
        r: &BitString,
        prior: &[StageMessages],
        commit: &Permutation,
    ) -> (u8, usize);
}

/// The prescribed verifier: stage `i` challenges with bit `i` of `r`.
pub struct HonestStrategy;

impl VerifierStrategy for HonestStrategy {
    fn name(&self) -> &'static str {
        "honest"
    }

    fn randomness_bound(&self, stages: usize) -> usize {
        stages
    }

    fn challenge(
        &self,
        _prep: &PreparedInstance,
        r: &BitString,
        prior: &[StageMessages],
        _commit: &Permutation,
    ) -> (u8, usize) {
        let i = prior.len();
        (r.get(i) as u8, i + 1)
    }
}

/// Always challenges 0, scanning no randomness.
pub struct ConstantStrategy(pub u8);

impl VerifierStrategy for ConstantStrategy {
    fn name(&self) -> &'static str {
        if self.0 == 0 {
            "constant-0"
        } else {
            "constant-1"
        }
    }

    fn randomness_bound(&self, _stages: usize) -> usize {
        0
    }

    fn challenge(
        &self,
        _prep: &PreparedInstance,
        _r: &BitString,
        _prior: &[StageMessages],
        _commit: &Permutation,
    ) -> (u8, usize) {
        (self.0, 0)
    }
}

/// Challenges with the parity of the commit's image of point 0; scans no
/// randomness but makes the challenge depend on the prover's message.
pub struct CommitParityStrategy;

impl VerifierStrategy for CommitParityStrategy {
    fn name(&self) -> &'static str {
        "commit-parity"
    }

    fn randomness_bound(&self, _stages: usize) -> usize {
        0
    }

    fn challenge(
        &self,
        _prep: &PreparedInstance,
        _r: &BitString,
        _prior: &[StageMessages],
        commit: &Permutation,
    ) -> (u8, usize) {
        ((commit.apply(0) % 2) as u8, 0)
    }
}

/// Scans one bit per stage like the honest verifier but emits a non-bit
/// byte for the nonzero branch, exercising the rule that any nonzero
/// challenge selects the factorization branch.
pub struct RandomEchoStrategy;

impl VerifierStrategy for RandomEchoStrategy {
    fn name(&self) -> &'static str {
        "random-echo"
    }

    fn randomness_bound(&self, stages: usize) -> usize {
        stages
    }

    fn challenge(
        &self,
        _prep: &PreparedInstance,
        r: &BitString,
        prior: &[StageMessages],
        _commit: &Permutation,
    ) -> (u8, usize) {
        let i = prior.len();
        (if r.get(i) { 0xAA } else { 0 }, i + 1)
    }
}

/// The fixed adversary zoo, honest verifier first.
pub fn strategy_zoo() -> Vec<Box<dyn VerifierStrategy>> {
    vec![
        Box::new(HonestStrategy),
        Box::new(ConstantStrategy(0)),
        Box::new(ConstantStrategy(1)),
        Box::new(CommitParityStrategy),
        Box::new(RandomEchoStrategy),
    ]
}

/// Look a strategy up by its CLI name.
pub fn strategy_by_name(name: &str) -> Option<Box<dyn VerifierStrategy>> {
    strategy_zoo().into_iter().find(|s| s.name() == name)
}
