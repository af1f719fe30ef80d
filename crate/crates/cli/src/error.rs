//! CLI error taxonomy with stable exit codes: 2 parse, 3 resource,
//! 4 transport, 5 precondition, 1 anything else.

use std::fmt;

use dcm_core::dcm::DcmError;
use dcm_core::permgroup::GroupError;
use dcm_core::protocol::{ProtocolError, SessionError, WireError};
use dcm_core::reduction::GraphError;
use dcm_core::simulator::SimulatorError;
use dcm_core::stats::StatsError;
use dcm_core::transport::TransportError;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Resource(String),
    Transport(String),
    Precondition(String),
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Transport(_) => 4,
            CliError::Precondition(_) => 5,
            CliError::Other(_) => 1,
        }
    }

    pub fn parse(msg: impl fmt::Display) -> Self {
        CliError::Parse(msg.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse: {m}"),
            CliError::Resource(m) => write!(f, "resource: {m}"),
            CliError::Transport(m) => write!(f, "transport: {m}"),
            CliError::Precondition(m) => write!(f, "precondition: {m}"),
            CliError::Other(m) => write!(f, "{m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(format!("i/o: {e}"))
    }
}

impl From<DcmError> for CliError {
    fn from(e: DcmError) -> Self {
        match &e {
            DcmError::Parse(_) | DcmError::Group(GroupError::Perm(_)) => {
                CliError::Parse(e.to_string())
            }
            _ if e.is_resource_refusal() => CliError::Resource(e.to_string()),
            DcmError::NotInDoubleCoset => CliError::Precondition(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::OrderExceedsCap { .. } => CliError::Resource(e.to_string()),
            GroupError::Perm(_) => CliError::Parse(e.to_string()),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<WireError> for CliError {
    fn from(e: WireError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        match &e {
            ProtocolError::RequiresYesInstance | ProtocolError::RequiresNoInstance => {
                CliError::Precondition(e.to_string())
            }
            ProtocolError::Dcm(inner) if inner.is_resource_refusal() => {
                CliError::Resource(e.to_string())
            }
            ProtocolError::Dcm(DcmError::Parse(_)) => CliError::Parse(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        CliError::Transport(e.to_string())
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Protocol(p) => p.into(),
            SessionError::Transport(t) => t.into(),
        }
    }
}

impl From<SimulatorError> for CliError {
    fn from(e: SimulatorError) -> Self {
        match &e {
            SimulatorError::RequiresYesInstance | SimulatorError::RequiresNoInstance => {
                CliError::Precondition(e.to_string())
            }
            SimulatorError::StateSpaceTooLarge { .. }
            | SimulatorError::UnboundedCoinSpace
            | SimulatorError::RestartCapExceeded { .. } => CliError::Resource(e.to_string()),
            SimulatorError::Dcm(inner) if inner.is_resource_refusal() => {
                CliError::Resource(e.to_string())
            }
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Other(e.to_string())
    }
}
