//! Fast session transfer: moving a running session from one band to another
//! without renegotiating it from scratch.
//!
//! The transfer is negotiated on the band the session currently lives on
//! (setup request and response), armed with a link-loss countdown, and
//! executed when the countdown runs out: both ends retune, then confirm on
//! the new band with an ack handshake. A transparent transfer keeps the
//! same station address on both bands so the peer sees one logical link; a
//! non-transparent one uses a distinct address per band. If the new-band
//! confirmation cannot be completed within the retry budget, the session
//! falls back to the old band.

use super::StationError;
use crate::mac::frames::StationId;

/// Ack attempts allowed on the new band before falling back.
pub const DEFAULT_FST_RETRY_LIMIT: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FstState {
    /// No transfer in progress.
    Idle,
    /// Setup request sent, awaiting the response.
    SetupPending,
    /// Setup agreed; the link-loss countdown arms the switch.
    SwitchPending,
    /// Both ends retuned; the new band awaits its confirmation handshake.
    Transitioned,
    /// Confirmed on the new band.
    Confirmed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Old,
    New,
}

/// What an ack attempt on the new band produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FstEvent {
    Confirmed,
    Retry,
    RolledBack,
}

#[derive(Debug, Clone)]
pub struct FstSession {
    state: FstState,
    transparent: bool,
    llt_bis: u32,
    remaining_llt: u32,
    attempts: u8,
    retry_limit: u8,
    rollbacks: u32,
}

impl FstSession {
    /// `llt_bis` is the link-loss countdown in beacon intervals; zero means
    /// switch at the first tick without link activity.
    pub fn new(transparent: bool, llt_bis: u32) -> Self {
        FstSession {
            state: FstState::Idle,
            transparent,
            llt_bis,
            remaining_llt: llt_bis,
            attempts: 0,
            retry_limit: DEFAULT_FST_RETRY_LIMIT,
            rollbacks: 0,
        }
    }

    pub fn state(&self) -> FstState {
        self.state
    }

    pub fn transparent(&self) -> bool {
        self.transparent
    }

    pub fn rollbacks(&self) -> u32 {
        self.rollbacks
    }

    pub fn attempts(&self) -> u8 {
        self.attempts
    }

    /// The band the session is currently served on.
    pub fn current_band(&self) -> Band {
        match self.state {
            FstState::Transitioned | FstState::Confirmed => Band::New,
            _ => Band::Old,
        }
    }

    /// Address the session presents on `band`. A transparent session keeps
    /// one address everywhere; a non-transparent one flags the new band's
    /// interface in the high bit.
    pub fn session_address(&self, base: StationId, band: Band) -> StationId {
        if self.transparent || band == Band::Old {
            base
        } else {
            base | 0x8000
        }
    }

    /// Sends the setup request on the old band.
    pub fn send_setup_request(&mut self) -> Result<(), StationError> {
        if self.state != FstState::Idle {
            return Err(StationError::BadState("setup request with a transfer already running"));
        }
        self.state = FstState::SetupPending;
        Ok(())
    }

    /// The peer's setup response. Acceptance arms the countdown; rejection
    /// abandons the transfer.
    pub fn setup_response(&mut self, accept: bool) -> Result<FstState, StationError> {
        if self.state != FstState::SetupPending {
            return Err(StationError::BadState("setup response without a pending request"));
        }
        self.state = if accept {
            self.remaining_llt = self.llt_bis;
            FstState::SwitchPending
        } else {
            FstState::Idle
        };
        Ok(self.state)
    }

    /// One beacon interval passes. Link activity on the old band reloads the
    /// countdown; silence runs it down, and at zero both ends retune.
    pub fn tick_bi(&mut self, link_active: bool) -> Result<FstState, StationError> {
        if self.state != FstState::SwitchPending {
            return Err(StationError::BadState("countdown only runs while a switch is pending"));
        }
        if link_active {
            self.remaining_llt = self.llt_bis;
        } else if self.remaining_llt == 0 {
            self.state = FstState::Transitioned;
            self.attempts = 0;
        } else {
            self.remaining_llt -= 1;
        }
        Ok(self.state)
    }

    /// One confirmation handshake on the new band: an ack request went out
    /// and `response_received` says whether the response came back. Exhausting
    /// the retry budget rolls the session back to the old band.
    pub fn ack_attempt(&mut self, response_received: bool) -> Result<FstEvent, StationError> {
        if self.state != FstState::Transitioned {
            return Err(StationError::BadState("ack handshake before the switch"));
        }
        self.attempts += 1;
        if response_received {
            self.state = FstState::Confirmed;
            return Ok(FstEvent::Confirmed);
        }
        if self.attempts >= self.retry_limit {
            self.state = FstState::Idle;
            self.remaining_llt = self.llt_bis;
            self.rollbacks += 1;
            return Ok(FstEvent::RolledBack);
        }
        Ok(FstEvent::Retry)
    }
}
