//! Channels connecting the two parties: an in-process queue pair and a
//! framed OS byte stream. Both deliver whole frames, in order, exactly
//! once; a session must produce identical transcripts over either.

use std::io::{Read, Write};
use std::sync::mpsc;
use std::time::Duration;

use thiserror::Error;

use crate::protocol::message::{WireError, MAX_FRAME_PAYLOAD};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

/// Hard ceiling on frames a channel will buffer. Frames above the
/// protocol payload cap but below this are still delivered so the
/// session layer can apply the oversize rules (accept on a commit,
/// reject later); anything larger is a transport failure.
pub const RECV_CEILING: usize = 1 << 26;

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("peer closed the channel")]
    Closed,
    #[error("timed out waiting for a frame")]
    Timeout,
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// Ordered, reliable, duplex frame delivery. A frame body is the message
/// tag plus payload; realizations add their own length framing.
pub trait Channel {
    fn send_frame(&mut self, body: &[u8]) -> Result<(), TransportError>;
    fn recv_frame(&mut self) -> Result<Vec<u8>, TransportError>;
}

/// One endpoint of an in-process channel backed by `mpsc` queues; usable
/// across threads.
pub struct InProcessChannel {
    tx: mpsc::Sender<Vec<u8>>,
    rx: mpsc::Receiver<Vec<u8>>,
    timeout: Duration,
}

impl InProcessChannel {
    /// A connected pair of endpoints.
    pub fn pair() -> (InProcessChannel, InProcessChannel) {
        let (tx_ab, rx_ab) = mpsc::channel();
        let (tx_ba, rx_ba) = mpsc::channel();
        (
            InProcessChannel {
                tx: tx_ab,
                rx: rx_ba,
                timeout: DEFAULT_TIMEOUT,
            },
            InProcessChannel {
                tx: tx_ba,
                rx: rx_ab,
                timeout: DEFAULT_TIMEOUT,
            },
        )
    }
}

impl Channel for InProcessChannel {
    fn send_frame(&mut self, body: &[u8]) -> Result<(), TransportError> {
        check_size(body)?;
        self.tx.send(body.to_vec()).map_err(|_| TransportError::Closed)
    }

    fn recv_frame(&mut self) -> Result<Vec<u8>, TransportError> {
        match self.rx.recv_timeout(self.timeout) {
            Ok(frame) => Ok(frame),
            Err(mpsc::RecvTimeoutError::Timeout) => Err(TransportError::Timeout),
            Err(mpsc::RecvTimeoutError::Disconnected) => Err(TransportError::Closed),
        }
    }
}

/// Framed transport over any byte stream (TCP, Unix sockets, pipes):
/// 4-byte big-endian body length, then the body.
pub struct StreamChannel<S: Read + Write> {
    stream: S,
}

impl<S: Read + Write> StreamChannel<S> {
    pub fn new(stream: S) -> Self {
        Self { stream }
    }

    pub fn into_inner(self) -> S {
        self.stream
    }
}

impl<S: Read + Write> Channel for StreamChannel<S> {
    fn send_frame(&mut self, body: &[u8]) -> Result<(), TransportError> {
        check_size(body)?;
        self.stream.write_all(&(body.len() as u32).to_be_bytes())?;
        self.stream.write_all(body)?;
        self.stream.flush()?;
        Ok(())
    }

    fn recv_frame(&mut self) -> Result<Vec<u8>, TransportError> {
        let mut len_bytes = [0u8; 4];
        if let Err(e) = self.stream.read_exact(&mut len_bytes) {
            return Err(match e.kind() {
                std::io::ErrorKind::UnexpectedEof => TransportError::Closed,
                std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => {
                    TransportError::Timeout
                }
                _ => TransportError::Io(e),
            });
        }
        let len = u32::from_be_bytes(len_bytes) as usize;
        if len == 0 || len > RECV_CEILING {
            return Err(WireError::FrameTooLarge(len).into());
        }
        let mut body = vec![0u8; len];
        self.stream.read_exact(&mut body).map_err(|e| match e.kind() {
            std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => {
                TransportError::Timeout
            }
            _ => TransportError::Io(e),
        })?;
        Ok(body)
    }
}

fn check_size(body: &[u8]) -> Result<(), TransportError> {
    if body.is_empty() || body.len() - 1 > MAX_FRAME_PAYLOAD {
        return Err(WireError::FrameTooLarge(body.len()).into());
    }
    Ok(())
}
