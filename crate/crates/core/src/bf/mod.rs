//! Beamforming: the sector-level sweep protocol, beacon-time transmit
//! sweeps, the slotted responder-sweep access window, beam refinement, and
//! in-traffic beam tracking.

pub mod abft;
pub mod beacon;
pub mod brp;
pub mod channel;
pub mod sls;
pub mod track;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BfError {
    #[error("antenna configuration invalid: {0}")]
    BadAntennaConfig(String),
    #[error("sector ({antenna}, {sector}) does not exist on the {side} side")]
    NoSuchSector {
        side: &'static str,
        antenna: u8,
        sector: u8,
    },
    #[error("no sector pair clears the sensitivity floor of {floor_db} dB")]
    LinkFailure { floor_db: f64 },
    #[error("protocol violation: {0}")]
    ProtocolViolation(&'static str),
    #[error("channel file: {0}")]
    Parse(String),
}
