//! Physical-layer framing: the modulation-and-coding table, scrambling,
//! systematic coding, the header and data encoding pipelines, and packet
//! airtime computation.

pub mod data;
pub mod header;
pub mod ldpc;
pub mod mcs;
pub mod scrambler;
pub mod timing;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhyError {
    #[error("unknown MCS index {0}")]
    UnknownMcs(u8),
    #[error("MCS {index} ({phy}) not usable here: {reason}")]
    UnsupportedCoding {
        index: u8,
        phy: &'static str,
        reason: &'static str,
    },
    #[error("PSDU length {0} out of range 1..=262143")]
    InvalidLength(usize),
    #[error("scrambler seed must be 1..=127, got {0}")]
    BadSeed(u8),
    #[error("field {field} value {value} exceeds {max}")]
    FieldRange {
        field: &'static str,
        value: u32,
        max: u32,
    },
    #[error("wrong code for this context: need rate {need_num}/{need_den}, n={need_n}")]
    WrongCode {
        need_num: u32,
        need_den: u32,
        need_n: usize,
    },
    #[error("codeword failed the parity check at word {0}")]
    ParityMismatch(usize),
    #[error("repeated half-words disagree in word {0}")]
    RepetitionMismatch(usize),
    #[error("coded stream length {got} does not match the plan ({want})")]
    StreamLength { got: usize, want: usize },
}
