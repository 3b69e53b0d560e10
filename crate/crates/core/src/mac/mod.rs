//! MAC layer: frame model, hybrid channel access (TDMA schedule plus EDCA
//! contention), virtual carrier sensing, and the three aggregation levels
//! with block acknowledgement.

pub mod aggregate;
pub mod block_ack;
pub mod edca;
pub mod frames;
pub mod nav;
pub mod schedule;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MacError {
    #[error("aggregate would exceed {limit} octets; first {admitted} subframes fit")]
    AggregateOverflow { limit: u32, admitted: usize },
    #[error("aggregate constituents must share one receiver")]
    MixedReceivers,
    #[error("aggregate needs at least one subframe")]
    EmptyAggregate,
    #[error("contention window {0} is not of the form 2^m - 1")]
    BadContentionWindow(u32),
    #[error("cw_min {min} exceeds cw_max {max}")]
    WindowOrder { min: u32, max: u32 },
    #[error("access categories must not outrank higher priorities ({0})")]
    PriorityInversion(&'static str),
    #[error("burst of {0} frames exceeds the {1}-frame reorder window")]
    WindowOverflow(usize, usize),
    #[error("sequence {seq} outside the window starting at {start}")]
    OutsideWindow { seq: u16, start: u16 },
    #[error("allocation {a} overlaps allocation {b} without spatial-share consent")]
    ScheduleConflict { a: usize, b: usize },
    #[error("allocation {index} extends past the beacon interval end")]
    OutsideInterval { index: usize },
    #[error("station {station} does not own allocation {index}")]
    NotOwner { station: u16, index: usize },
    #[error("no allocation covers the announcement time {0} ns")]
    NoCoveringAllocation(u64),
    #[error("allocation index {0} out of range")]
    NoSuchAllocation(usize),
    #[error("duration change would make allocation {0} empty")]
    EmptyAllocation(usize),
}
