//! Protocol messages, the length-prefixed wire format, transcripts, and
//! verifier views.
//!
//! Wire frames carry one protocol round each: a 4-byte big-endian length
//! (of tag plus payload), a 1-byte message tag, then the payload. A
//! parallel-composition round packs its slot messages back to back in a
//! single frame; every message payload is self-delimiting, so bundles
//! decode without a count prefix. Permutations travel as a 2-byte
//! big-endian degree followed by one 2-byte big-endian image per point.

use std::fmt;
use thiserror::Error;

use crate::bits::BitString;
use crate::permgroup::{Permutation, Point};

/// Hard cap on frame payloads; oversize frames are malformed.
pub const MAX_FRAME_PAYLOAD: usize = 1 << 20;

pub const TAG_COMMIT: u8 = 1;
pub const TAG_CHALLENGE: u8 = 2;
pub const TAG_RESPONSE: u8 = 3;
pub const TAG_VERDICT: u8 = 4;
pub const TAG_PROBE: u8 = 5;
pub const TAG_ANSWER: u8 = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("frame payload of {0} bytes exceeds the {MAX_FRAME_PAYLOAD}-byte cap")]
    FrameTooLarge(usize),
    #[error("unknown message tag {0}")]
    UnknownTag(u8),
    #[error("truncated or malformed payload for tag {0}")]
    MalformedPayload(u8),
    #[error("round mixes message kinds")]
    MixedRound,
    #[error("empty round")]
    EmptyRound,
    #[error("cannot parse transcript: {0}")]
    Parse(String),
}

/// One protocol message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    /// Prover's committed permutation `t`.
    Commit(Permutation),
    /// Commit bytes that did not decode as a permutation. Only ever
    /// constructed on reception; the verifier answers these with an
    /// immediate accept.
    RawCommit(Vec<u8>),
    /// Verifier's challenge byte; zero selects the opening branch, any
    /// nonzero value the factorization branch.
    Challenge(u8),
    /// Prover's response pair.
    Response(Permutation, Permutation),
    /// Verifier's verdict for one repetition (or the session).
    Verdict(bool),
    /// Non-membership protocol: verifier's probe permutation.
    Probe(Permutation),
    /// Non-membership protocol: prover's membership answer.
    Answer(u8),
}

impl Message {
    pub fn tag(&self) -> u8 {
        match self {
            Message::Commit(_) | Message::RawCommit(_) => TAG_COMMIT,
            Message::Challenge(_) => TAG_CHALLENGE,
            Message::Response(..) => TAG_RESPONSE,
            Message::Verdict(_) => TAG_VERDICT,
            Message::Probe(_) => TAG_PROBE,
            Message::Answer(_) => TAG_ANSWER,
        }
    }

    pub fn is_from_prover(&self) -> bool {
        matches!(
            self,
            Message::Commit(_) | Message::RawCommit(_) | Message::Response(..) | Message::Answer(_)
        )
    }

    fn payload(&self) -> Vec<u8> {
        match self {
            Message::Commit(t) | Message::Probe(t) => encode_perm(t),
            Message::RawCommit(bytes) => bytes.clone(),
            Message::Challenge(b) | Message::Answer(b) => vec![*b],
            Message::Response(x, y) => {
                let mut out = encode_perm(x);
                out.extend_from_slice(&encode_perm(y));
                out
            }
            Message::Verdict(accept) => vec![*accept as u8],
        }
    }

    /// Wire bytes of a single message: tag byte plus payload.
    pub fn wire_bytes(&self) -> Vec<u8> {
        let mut out = vec![self.tag()];
        out.extend_from_slice(&self.payload());
        out
    }
}

fn encode_perm(p: &Permutation) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + 2 * p.degree());
    out.extend_from_slice(&(p.degree() as u16).to_be_bytes());
    for &img in p.images() {
        out.extend_from_slice(&img.to_be_bytes());
    }
    out
}

fn decode_perm(bytes: &[u8], pos: &mut usize) -> Option<Permutation> {
    if bytes.len() < *pos + 2 {
        return None;
    }
    let degree = u16::from_be_bytes([bytes[*pos], bytes[*pos + 1]]) as usize;
    *pos += 2;
    if degree == 0 || bytes.len() < *pos + 2 * degree {
        return None;
    }
    let mut images = Vec::with_capacity(degree);
    for _ in 0..degree {
        images.push(Point::from_be_bytes([bytes[*pos], bytes[*pos + 1]]));
        *pos += 2;
    }
    Permutation::from_images(images).ok()
}

/// A round: one frame on the wire, carrying one message, or several of
/// the same kind for parallel composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub messages: Vec<Message>,
}

impl Round {
    pub fn single(message: Message) -> Self {
        Self {
            messages: vec![message],
        }
    }

    pub fn bundle(messages: Vec<Message>) -> Self {
        Self { messages }
    }

    pub fn tag(&self) -> u8 {
        self.messages[0].tag()
    }

    pub fn is_verdict(&self) -> bool {
        matches!(self.messages.first(), Some(Message::Verdict(_)))
    }

    pub fn is_from_prover(&self) -> bool {
        self.messages[0].is_from_prover()
    }

    /// Frame body: tag byte plus concatenated message payloads.
    pub fn encode(&self) -> Result<Vec<u8>, WireError> {
        if self.messages.is_empty() {
            return Err(WireError::EmptyRound);
        }
        let tag = self.tag();
        if self.messages.iter().any(|m| m.tag() != tag) {
            return Err(WireError::MixedRound);
        }
        let mut out = vec![tag];
        for m in &self.messages {
            out.extend_from_slice(&m.payload());
        }
        if out.len() - 1 > MAX_FRAME_PAYLOAD {
            return Err(WireError::FrameTooLarge(out.len() - 1));
        }
        Ok(out)
    }

    /// Decode a frame body. A commit payload that fails to parse as
    /// permutations is preserved as a `RawCommit` so the verifier can
    /// apply the malformed-commit rule; malformed payloads under any
    /// other tag are wire errors.
    pub fn decode(body: &[u8]) -> Result<Round, WireError> {
        if body.is_empty() {
            return Err(WireError::EmptyRound);
        }
        if body.len() - 1 > MAX_FRAME_PAYLOAD {
            return Err(WireError::FrameTooLarge(body.len() - 1));
        }
        let (tag, payload) = (body[0], &body[1..]);
        let mut messages = Vec::new();
        let mut pos = 0;
        match tag {
            TAG_COMMIT | TAG_PROBE => {
                while pos < payload.len() {
                    match decode_perm(payload, &mut pos) {
                        Some(p) => messages.push(if tag == TAG_COMMIT {
                            Message::Commit(p)
                        } else {
                            Message::Probe(p)
                        }),
                        None if tag == TAG_COMMIT => {
                            return Ok(Round::single(Message::RawCommit(payload.to_vec())));
                        }
                        None => return Err(WireError::MalformedPayload(tag)),
                    }
                }
            }
            TAG_CHALLENGE | TAG_ANSWER => {
                for &b in payload {
                    messages.push(if tag == TAG_CHALLENGE {
                        Message::Challenge(b)
                    } else {
                        Message::Answer(b)
                    });
                }
            }
            TAG_RESPONSE => {
                while pos < payload.len() {
                    let x = decode_perm(payload, &mut pos)
                        .ok_or(WireError::MalformedPayload(tag))?;
                    let y = decode_perm(payload, &mut pos)
                        .ok_or(WireError::MalformedPayload(tag))?;
                    messages.push(Message::Response(x, y));
                }
            }
            TAG_VERDICT => {
                for &b in payload {
                    messages.push(Message::Verdict(b != 0));
                }
            }
            other => return Err(WireError::UnknownTag(other)),
        }
        if messages.is_empty() {
            return Err(WireError::MalformedPayload(tag));
        }
        Ok(Round { messages })
    }
}

/// Session flavor, recorded in transcript headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Atomic,
    Sequential(u32),
    Parallel(u32),
    Dcnm(u32),
}

impl Mode {
    pub fn repetitions(&self) -> u32 {
        match self {
            Mode::Atomic => 1,
            Mode::Sequential(k) | Mode::Parallel(k) | Mode::Dcnm(k) => *k,
        }
    }

    pub fn is_public_coin(&self) -> bool {
        !matches!(self, Mode::Dcnm(_))
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Atomic => write!(f, "atomic"),
            Mode::Sequential(k) => write!(f, "sequential:{k}"),
            Mode::Parallel(k) => write!(f, "parallel:{k}"),
            Mode::Dcnm(k) => write!(f, "dcnm:{k}"),
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = WireError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || WireError::Parse(format!("bad mode: {s}"));
        if s == "atomic" {
            return Ok(Mode::Atomic);
        }
        let (kind, k) = s.split_once(':').ok_or_else(bad)?;
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match kind {
            "sequential" => Ok(Mode::Sequential(k)),
            "parallel" => Ok(Mode::Parallel(k)),
            "dcnm" => Ok(Mode::Dcnm(k)),
            _ => Err(bad()),
        }
    }
}

/// Ordered record of a completed session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub instance_digest: [u8; 32],
    pub mode: Mode,
    /// Hex seed material per party, as supplied on the command line;
    /// `None` when unknown to the writing party.
    pub seed_prover: Option<Vec<u8>>,
    pub seed_verifier: Option<Vec<u8>>,
    pub rounds: Vec<Round>,
    pub verdict: bool,
}

impl Transcript {
    /// Protocol rounds, excluding verdict rounds. Parallel sessions have
    /// exactly three regardless of the repetition count.
    pub fn protocol_round_count(&self) -> usize {
        self.rounds.iter().filter(|r| !r.is_verdict()).count()
    }

    /// Challenge bytes in transmission order (across repetitions or
    /// parallel slots).
    pub fn challenge_bytes(&self) -> Vec<u8> {
        self.rounds
            .iter()
            .flat_map(|r| r.messages.iter())
            .filter_map(|m| match m {
                Message::Challenge(b) => Some(*b),
                _ => None,
            })
            .collect()
    }

    /// Verify the public-coin property: every verifier message must be a
    /// fresh random bit, i.e. each challenge equals the leading bit of
    /// the verifier's stream for its repetition (or parallel slot), so
    /// the concatenated verifier messages form a prefix of the
    /// verifier's random string. Requires the verifier seed in the
    /// header. Non-membership transcripts are not public-coin and are
    /// rejected outright.
    pub fn check_public_coin(&self) -> Result<(), String> {
        if !self.mode.is_public_coin() {
            return Err(format!("mode {} is not a public-coin protocol", self.mode));
        }
        let seed = self
            .seed_verifier
            .as_ref()
            .ok_or("verifier seed unknown; cannot reconstruct the random string")?;
        // Repetition index of each challenge: parallel slots are their
        // bundle position; sequential repetitions are counted by the
        // verdicts already seen (repetitions that short-circuited on a
        // malformed commit consumed no challenge).
        let mut pairs: Vec<(u64, u8)> = Vec::new();
        if matches!(self.mode, Mode::Parallel(_)) {
            for round in &self.rounds {
                if round.tag() == TAG_CHALLENGE {
                    for (slot, m) in round.messages.iter().enumerate() {
                        let Message::Challenge(b) = m else { unreachable!() };
                        pairs.push((slot as u64, *b));
                    }
                }
            }
        } else {
            let mut repetition = 0u64;
            for round in &self.rounds {
                for m in &round.messages {
                    match m {
                        Message::Challenge(b) => pairs.push((repetition, *b)),
                        Message::Verdict(_) => repetition += 1,
                        _ => {}
                    }
                }
            }
        }
        for (repetition, byte) in pairs {
            let mut rng =
                crate::rng::RandomSource::derive(seed, crate::rng::PartyTag::Verifier, repetition);
            let expected = crate::rng::BitSource::draw_bit(&mut rng) as u8;
            if byte != expected {
                return Err(format!(
                    "challenge {byte} in repetition {repetition} is not the stream's next bit"
                ));
            }
        }
        Ok(())
    }

    /// Textual transcript: header lines, then one line per message,
    /// prefixed by its round number and sender.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("instance-digest: {}\n", hex::encode(self.instance_digest)));
        out.push_str(&format!("seed-verifier: {}\n", seed_text(&self.seed_verifier)));
        out.push_str(&format!("seed-prover: {}\n", seed_text(&self.seed_prover)));
        out.push_str(&format!("mode: {}\n", self.mode));
        for (i, round) in self.rounds.iter().enumerate() {
            let sender = if round.is_from_prover() { 'P' } else { 'V' };
            for m in &round.messages {
                out.push_str(&format!("{} {} {m}\n", i + 1, sender));
            }
        }
        out.push_str(&format!("verdict: {}\n", if self.verdict { "accept" } else { "reject" }));
        out
    }

    pub fn parse_text(text: &str) -> Result<Transcript, WireError> {
        let mut lines = text.lines();
        let digest_hex = header_value(lines.next(), "instance-digest")?;
        let digest_bytes =
            hex::decode(&digest_hex).map_err(|_| WireError::Parse("bad digest hex".into()))?;
        let instance_digest: [u8; 32] = digest_bytes
            .try_into()
            .map_err(|_| WireError::Parse("digest must be 32 bytes".into()))?;
        let seed_verifier = parse_seed(&header_value(lines.next(), "seed-verifier")?)?;
        let seed_prover = parse_seed(&header_value(lines.next(), "seed-prover")?)?;
        let mode: Mode = header_value(lines.next(), "mode")?.parse()?;

        let mut rounds: Vec<Round> = Vec::new();
        let mut verdict = None;
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(v) = line.strip_prefix("verdict:") {
                verdict = Some(match v.trim() {
                    "accept" => true,
                    "reject" => false,
                    other => return Err(WireError::Parse(format!("bad verdict: {other}"))),
                });
                continue;
            }
            let mut parts = line.splitn(3, ' ');
            let round_no: usize = parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| WireError::Parse(format!("bad message line: {line}")))?;
            let _sender = parts
                .next()
                .ok_or_else(|| WireError::Parse(format!("bad message line: {line}")))?;
            let body = parts
                .next()
                .ok_or_else(|| WireError::Parse(format!("bad message line: {line}")))?;
            let message = parse_message_text(body)?;
            if round_no == rounds.len() + 1 {
                rounds.push(Round::single(message));
            } else if round_no == rounds.len() && !rounds.is_empty() {
                rounds.last_mut().unwrap().messages.push(message);
            } else {
                return Err(WireError::Parse(format!("round number out of order: {line}")));
            }
        }
        Ok(Transcript {
            instance_digest,
            mode,
            seed_prover,
            seed_verifier,
            rounds,
            verdict: verdict.ok_or_else(|| WireError::Parse("missing verdict line".into()))?,
        })
    }
}

fn seed_text(seed: &Option<Vec<u8>>) -> String {
    match seed {
        Some(bytes) => hex::encode(bytes),
        None => "-".into(),
    }
}

fn parse_seed(text: &str) -> Result<Option<Vec<u8>>, WireError> {
    if text == "-" {
        Ok(None)
    } else {
        hex::decode(text)
            .map(Some)
            .map_err(|_| WireError::Parse("bad seed hex".into()))
    }
}

fn header_value(line: Option<&str>, key: &str) -> Result<String, WireError> {
    let line = line.ok_or_else(|| WireError::Parse(format!("missing header: {key}")))?;
    line.strip_prefix(&format!("{key}:"))
        .map(|v| v.trim().to_string())
        .ok_or_else(|| WireError::Parse(format!("expected header {key}, got: {line}")))
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Commit(t) => write!(f, "commit {}", t.to_text()),
            Message::RawCommit(bytes) => write!(f, "commit-raw {}", hex::encode(bytes)),
            Message::Challenge(b) => write!(f, "challenge {b}"),
            Message::Response(x, y) => write!(f, "response {} / {}", x.to_text(), y.to_text()),
            Message::Verdict(v) => write!(f, "verdict {}", *v as u8),
            Message::Probe(t) => write!(f, "probe {}", t.to_text()),
            Message::Answer(a) => write!(f, "answer {a}"),
        }
    }
}

fn parse_message_text(body: &str) -> Result<Message, WireError> {
    let bad = |what: &str| WireError::Parse(format!("bad {what}: {body}"));
    let (kind, rest) = body.split_once(' ').unwrap_or((body, ""));
    match kind {
        "commit" => Permutation::parse_text(rest, None)
            .map(Message::Commit)
            .map_err(|_| bad("commit")),
        "commit-raw" => hex::decode(rest.trim())
            .map(Message::RawCommit)
            .map_err(|_| bad("commit-raw")),
        "challenge" => rest.trim().parse().map(Message::Challenge).map_err(|_| bad("challenge")),
        "response" => {
            let (x, y) = rest.split_once('/').ok_or_else(|| bad("response"))?;
            Ok(Message::Response(
                Permutation::parse_text(x, None).map_err(|_| bad("response"))?,
                Permutation::parse_text(y, None).map_err(|_| bad("response"))?,
            ))
        }
        "verdict" => match rest.trim() {
            "0" => Ok(Message::Verdict(false)),
            "1" => Ok(Message::Verdict(true)),
            _ => Err(bad("verdict")),
        },
        "probe" => Permutation::parse_text(rest, None)
            .map(Message::Probe)
            .map_err(|_| bad("probe")),
        "answer" => rest.trim().parse().map(Message::Answer).map_err(|_| bad("answer")),
        _ => Err(bad("message")),
    }
}

/// What the verifier sees: the prefix of its random string it actually
/// scanned, and the prover's messages in order. (Verifier messages are
/// omitted; they are recomputable from the rest.)
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct View {
    pub consumed_randomness: BitString,
    pub messages: Vec<Message>,
}

impl View {
    /// Canonical serialization for distribution keys: the bit-string
    /// encoding, then each message length-prefixed in wire form.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = self.consumed_randomness.canonical_bytes();
        for m in &self.messages {
            let wire = m.wire_bytes();
            out.extend_from_slice(&(wire.len() as u32).to_be_bytes());
            out.extend_from_slice(&wire);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[Point]) -> Permutation {
        Permutation::from_images(images.to_vec()).unwrap()
    }

    #[test]
    fn round_encode_decode_all_kinds() {
        let rounds = [
            Round::single(Message::Commit(perm(&[1, 2, 0]))),
            Round::single(Message::Challenge(0)),
            Round::single(Message::Response(perm(&[1, 0, 2]), perm(&[0, 2, 1]))),
            Round::single(Message::Verdict(true)),
            Round::single(Message::Probe(perm(&[2, 0, 1]))),
            Round::single(Message::Answer(1)),
            Round::bundle(vec![
                Message::Commit(perm(&[1, 0, 2])),
                Message::Commit(perm(&[0, 2, 1])),
            ]),
            Round::bundle(vec![Message::Challenge(1), Message::Challenge(0)]),
        ];
        for round in rounds {
            let bytes = round.encode().unwrap();
            assert_eq!(Round::decode(&bytes).unwrap(), round);
        }
    }

    #[test]
    fn malformed_commit_bytes_become_raw() {
        let mut body = vec![TAG_COMMIT];
        body.extend_from_slice(&[0, 3, 0, 0, 0, 0]); // truncated images
        let round = Round::decode(&body).unwrap();
        assert!(matches!(round.messages[0], Message::RawCommit(_)));
        // A non-bijective image list is also raw, not an error.
        let mut body = vec![TAG_COMMIT, 0, 2, 0, 0, 0, 0];
        let round = Round::decode(&body).unwrap();
        assert!(matches!(round.messages[0], Message::RawCommit(_)));
        body[0] = TAG_RESPONSE;
        assert!(Round::decode(&body).is_err());
    }

    #[test]
    fn unknown_tags_and_empty_rounds_are_errors() {
        assert_eq!(Round::decode(&[9, 1]), Err(WireError::UnknownTag(9)));
        assert_eq!(Round::decode(&[]), Err(WireError::EmptyRound));
        assert_eq!(
            Round::decode(&[TAG_CHALLENGE]),
            Err(WireError::MalformedPayload(TAG_CHALLENGE))
        );
    }

    #[test]
    fn mode_strings_round_trip() {
        for mode in [
            Mode::Atomic,
            Mode::Sequential(5),
            Mode::Parallel(10),
            Mode::Dcnm(3),
        ] {
            assert_eq!(mode.to_string().parse::<Mode>().unwrap(), mode);
        }
        assert!("sequential:0".parse::<Mode>().is_err());
        assert!("banana".parse::<Mode>().is_err());
    }

    #[test]
    fn transcript_text_round_trip() {
        let transcript = Transcript {
            instance_digest: [7u8; 32],
            mode: Mode::Sequential(2),
            seed_prover: Some(vec![0xab, 0xcd]),
            seed_verifier: None,
            rounds: vec![
                Round::single(Message::Commit(perm(&[1, 2, 0]))),
                Round::single(Message::Challenge(1)),
                Round::single(Message::Response(perm(&[1, 0, 2]), perm(&[0, 2, 1]))),
                Round::single(Message::Verdict(true)),
                Round::bundle(vec![
                    Message::Commit(perm(&[0, 1, 2])),
                    Message::Commit(perm(&[2, 0, 1])),
                ]),
            ],
            verdict: true,
        };
        let text = transcript.to_text();
        let parsed = Transcript::parse_text(&text).unwrap();
        assert_eq!(parsed, transcript);
        assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn view_keys_distinguish_empty_randomness_from_missing_messages() {
        let a = View {
            consumed_randomness: BitString::from_bits([false]),
            messages: vec![],
        };
        let b = View {
            consumed_randomness: BitString::new(),
            messages: vec![Message::Challenge(0)],
        };
        assert_ne!(a.canonical_bytes(), b.canonical_bytes());
    }
}
