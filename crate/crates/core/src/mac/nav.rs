//! Virtual carrier sensing.
//!
//! Directional networks complicate the classic single-timer NAV: a
//! reservation heard on one receive sector says little about another, so the
//! tracker can optionally keep one timer per sector. The update rule is
//! deliberately conservative the classic way: the reservation handshake
//! frames (RTS / DMG CTS) always (re)set the timer; any other overheard frame
//! only extends it, and only when the frame is not addressed to this station.

use super::frames::{MacHeader, StationId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NavMode {
    Single,
    PerSector(usize),
}

#[derive(Debug, Clone)]
pub struct NavState {
    timers_us: Vec<u32>,
}

impl NavState {
    pub fn new(mode: NavMode) -> Self {
        let slots = match mode {
            NavMode::Single => 1,
            NavMode::PerSector(n) => n.max(1),
        };
        NavState {
            timers_us: vec![0; slots],
        }
    }

    pub fn sector_count(&self) -> usize {
        self.timers_us.len()
    }

    pub fn remaining_us(&self, sector: usize) -> u32 {
        self.timers_us[sector.min(self.timers_us.len() - 1)]
    }

    /// Any live reservation keeps the virtual medium busy.
    pub fn busy(&self) -> bool {
        self.timers_us.iter().any(|&t| t > 0)
    }

    /// Medium state combining physical carrier sense with the reservations.
    pub fn medium_busy(&self, cca_busy: bool) -> bool {
        cca_busy || self.busy()
    }

    pub fn tick_us(&mut self, elapsed_us: u32) {
        for t in &mut self.timers_us {
            *t = t.saturating_sub(elapsed_us);
        }
    }

    /// Applies one overheard, FCS-valid frame. `sector` is the receive sector
    /// the frame arrived on (ignored in single-timer mode).
    pub fn observe(&mut self, own: StationId, header: &MacHeader, sector: usize) {
        let idx = sector.min(self.timers_us.len() - 1);
        let t = &mut self.timers_us[idx];
        if header.kind.reserves_medium() {
            *t = header.duration_us;
        } else if header.destination != own && header.duration_us > *t {
            *t = header.duration_us;
        }
    }
}
