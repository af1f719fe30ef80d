//! Packed bit strings with exact length tracking.
//!
//! Protocol randomness is accounted at bit granularity: views carry the
//! exact prefix of the verifier's random string that was scanned, and
//! distribution keys must serialize that prefix canonically.

use std::fmt;

/// A sequence of bits, stored packed, most significant bit first within
/// each byte.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::new();
        for b in bits {
            s.push(b);
        }
        s
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_value(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self::from_bits((0..len).rev().map(|i| value >> i & 1 == 1))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        let slot = self.len % 8;
        if slot == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 1 << (7 - slot);
        }
        self.len += 1;
    }

    pub fn get(&self, index: usize) -> bool {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        self.bytes[index / 8] >> (7 - index % 8) & 1 == 1
    }

    pub fn prefix(&self, n: usize) -> BitString {
        assert!(n <= self.len);
        Self::from_bits(self.iter().take(n))
    }

    pub fn extend(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Canonical serialization: 4-byte big-endian bit length, then the
    /// packed bytes (trailing bits zero).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.bytes.len());
        out.extend_from_slice(&(self.len as u32).to_be_bytes());
        out.extend_from_slice(&self.bytes);
        out
    }

    /// Enumerate every bit string of the given length, in numeric order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len <= 30, "bit-string enumeration capped at 30 bits");
        (0..1u64 << len).map(move |v| BitString::from_value(v, len))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bits[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_get_round_trip() {
        let pattern = [true, false, false, true, true, false, true, false, true];
        let s = BitString::from_bits(pattern);
        assert_eq!(s.len(), 9);
        for (i, &b) in pattern.iter().enumerate() {
            assert_eq!(s.get(i), b);
        }
        assert_eq!(s.to_string(), "100110101");
    }

    #[test]
    fn canonical_bytes_distinguish_lengths() {
        // "0" and "00" pack identically; the length prefix must separate them.
        let one = BitString::from_bits([false]);
        let two = BitString::from_bits([false, false]);
        assert_ne!(one.canonical_bytes(), two.canonical_bytes());
    }

    #[test]
    fn from_value_is_msb_first() {
        let s = BitString::from_value(0b101, 3);
        assert_eq!(s.to_string(), "101");
        assert_eq!(s.prefix(2).to_string(), "10");
    }

    #[test]
    fn enumeration_is_complete_and_distinct() {
        let all: Vec<_> = BitString::all_of_len(4).collect();
        assert_eq!(all.len(), 16);
        let keys: std::collections::BTreeSet<_> =
            all.iter().map(|s| s.canonical_bytes()).collect();
        assert_eq!(keys.len(), 16);
    }
}
