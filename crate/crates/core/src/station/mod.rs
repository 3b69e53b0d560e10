//! Per-station state machines that sit above a single link: power
//! management, fast transfer of a session between bands, and the band
//! selection policy that decides where traffic should live.

pub mod band;
pub mod fst;
pub mod power;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StationError {
    /// An operation arrived in a state that cannot accept it.
    #[error("invalid for the current state: {0}")]
    BadState(&'static str),
    /// The peer's wakeup schedule is not known yet; an information exchange
    /// has to fetch it first.
    #[error("wakeup schedule of station {station} unknown")]
    ScheduleUnknown { station: u16 },
    /// A handshake ran out of retries.
    #[error("gave up after {attempts} attempts")]
    RetriesExhausted { attempts: u8 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
}
