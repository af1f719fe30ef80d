//! Seeded random bit sources with exact consumed-bit accounting.
//!
//! Every party in a protocol session owns a [`RandomSource`] derived from
//! `(seed bytes, party tag, repetition index)`. Identical tuples replay
//! identical bit streams; distinct repetition indices select independent
//! cipher streams. The source records every bit it hands out, so the
//! verifier's scanned prefix (the `r'` of a view) can be reconstructed
//! exactly.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::bits::BitString;

/// Domain-separation tag mixed into seed derivation, one per role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartyTag {
    Prover,
    Verifier,
    Simulator,
}

impl PartyTag {
    fn byte(self) -> u8 {
        match self {
            PartyTag::Prover => b'P',
            PartyTag::Verifier => b'V',
            PartyTag::Simulator => b'M',
        }
    }
}

/// Anything that yields a stream of fair bits.
pub trait BitSource {
    fn draw_bit(&mut self) -> bool;

    fn draw_bits(&mut self, n: usize) -> BitString {
        BitString::from_bits((0..n).map(|_| self.draw_bit()))
    }

    /// Uniform index in `0..n` via fixed-width draws with modulo rejection.
    ///
    /// Uses the bit width of `n - 1`; out-of-range draws are discarded and
    /// redrawn (the discarded bits still count as consumed). `n == 1`
    /// consumes nothing. For `n` a power of two no draw is ever rejected.
    fn draw_index(&mut self, n: usize) -> usize {
        assert!(n >= 1);
        if n == 1 {
            return 0;
        }
        let width = usize::BITS - (n - 1).leading_zeros();
        loop {
            let mut v = 0usize;
            for _ in 0..width {
                v = v << 1 | self.draw_bit() as usize;
            }
            if v < n {
                return v;
            }
        }
    }
}

/// Deterministic stream-cipher bit generator with a full trace of the
/// bits drawn so far.
pub struct RandomSource {
    rng: ChaCha20Rng,
    buffered: u8,
    buffered_count: u8,
    trace: BitString,
}

impl RandomSource {
    /// Derive a source from seed material, a party tag, and a repetition
    /// index. The cipher key is `SHA-256(len(seed) || seed || tag)`; the
    /// repetition selects the cipher stream.
    pub fn derive(seed: &[u8], tag: PartyTag, repetition: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update((seed.len() as u64).to_be_bytes());
        hasher.update(seed);
        hasher.update([tag.byte()]);
        let key: [u8; 32] = hasher.finalize().into();
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(repetition);
        Self {
            rng,
            buffered: 0,
            buffered_count: 0,
            trace: BitString::new(),
        }
    }

    /// Fresh OS-entropy seed material, for non-test CLI runs.
    pub fn entropy_seed() -> Vec<u8> {
        let mut seed = [0u8; 16];
        rand::rngs::OsRng.fill_bytes(&mut seed);
        seed.to_vec()
    }

    /// Total bits handed out so far.
    pub fn consumed_bits(&self) -> usize {
        self.trace.len()
    }

    /// The exact values of every bit handed out so far, in order.
    pub fn trace(&self) -> &BitString {
        &self.trace
    }
}

impl BitSource for RandomSource {
    fn draw_bit(&mut self) -> bool {
        if self.buffered_count == 0 {
            let mut byte = [0u8; 1];
            self.rng.fill_bytes(&mut byte);
            self.buffered = byte[0];
            self.buffered_count = 8;
        }
        let bit = self.buffered & 0x80 != 0;
        self.buffered <<= 1;
        self.buffered_count -= 1;
        self.trace.push(bit);
        bit
    }
}

/// Replays a fixed bit string; used by exact enumerators to drive the
/// same sampling code paths that live sources drive.
pub struct ReplaySource<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl<'a> ReplaySource<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }
}

impl BitSource for ReplaySource<'_> {
    fn draw_bit(&mut self) -> bool {
        let bit = self.bits.get(self.pos);
        self.pos += 1;
        bit
    }
}
