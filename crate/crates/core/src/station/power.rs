//! Power management: the split between a radio's physical state (awake or
//! dozing) and the management mode the station has negotiated (active, or
//! power save with an advertised wakeup schedule).
//!
//! A mode change is proposed in a configuration frame — carrying the wakeup
//! schedule when the station is heading into power save — and takes effect
//! only when the acknowledgment for that frame arrives; until then the old
//! mode governs. While a peer dozes, the access point buffers frames
//! addressed to it and releases them when the schedule says the peer is
//! listening again.

use super::StationError;
use crate::mac::frames::StationId;
use std::collections::HashMap;
use std::collections::VecDeque;

/// Physical radio state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerState {
    Awake,
    Doze,
}

/// Negotiated management mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    Active,
    PowerSave,
}

/// When a power-save station promises to listen: starting at beacon
/// interval `offset_bi` and every `period_bis` intervals after it, for the
/// first `awake_window_ns` of the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WakeupSchedule {
    pub period_bis: u32,
    pub offset_bi: u32,
    pub awake_window_ns: u64,
}

impl WakeupSchedule {
    pub fn validate(&self) -> Result<(), StationError> {
        if self.period_bis == 0 {
            return Err(StationError::BadParameter(
                "wakeup period must be at least one beacon interval".into(),
            ));
        }
        if self.awake_window_ns == 0 {
            return Err(StationError::BadParameter(
                "awake window must be nonzero".into(),
            ));
        }
        Ok(())
    }

    /// Is a station honoring this schedule awake `ns_into_bi` into beacon
    /// interval `bi`?
    pub fn awake_at(&self, bi: u32, ns_into_bi: u64) -> bool {
        if bi < self.offset_bi {
            return false;
        }
        (bi - self.offset_bi) % self.period_bis == 0 && ns_into_bi < self.awake_window_ns
    }
}

/// One station's power management, proposal-then-commit included.
#[derive(Debug, Clone)]
pub struct PowerManagement {
    mode: PowerMode,
    state: PowerState,
    schedule: Option<WakeupSchedule>,
    pending: Option<(PowerMode, Option<WakeupSchedule>)>,
}

impl Default for PowerManagement {
    fn default() -> Self {
        Self::new()
    }
}

impl PowerManagement {
    pub fn new() -> Self {
        PowerManagement {
            mode: PowerMode::Active,
            state: PowerState::Awake,
            schedule: None,
            pending: None,
        }
    }

    pub fn mode(&self) -> PowerMode {
        self.mode
    }

    pub fn state(&self) -> PowerState {
        self.state
    }

    pub fn schedule(&self) -> Option<&WakeupSchedule> {
        self.schedule.as_ref()
    }

    /// Proposes a mode change (the configuration frame going out). Entering
    /// power save requires the wakeup schedule that will be advertised.
    pub fn request_mode(
        &mut self,
        mode: PowerMode,
        schedule: Option<WakeupSchedule>,
    ) -> Result<(), StationError> {
        match mode {
            PowerMode::PowerSave => {
                let ws = schedule.ok_or(StationError::BadState(
                    "entering power save needs a wakeup schedule",
                ))?;
                ws.validate()?;
                self.pending = Some((mode, Some(ws)));
            }
            PowerMode::Active => {
                self.pending = Some((mode, None));
            }
        }
        Ok(())
    }

    /// The acknowledgment for the proposal arrived: the new mode becomes
    /// effective now.
    pub fn ack_received(&mut self) -> Result<PowerMode, StationError> {
        let (mode, schedule) = self
            .pending
            .take()
            .ok_or(StationError::BadState("no mode change in flight"))?;
        self.mode = mode;
        self.schedule = schedule;
        if self.mode == PowerMode::Active {
            // an active station keeps its receiver on
            self.state = PowerState::Awake;
        }
        Ok(self.mode)
    }

    /// The proposal frame was lost; the old mode stays in force.
    pub fn proposal_lost(&mut self) {
        self.pending = None;
    }

    pub fn doze(&mut self) -> Result<(), StationError> {
        if self.mode != PowerMode::PowerSave {
            return Err(StationError::BadState("active stations may not doze"));
        }
        self.state = PowerState::Doze;
        Ok(())
    }

    pub fn wake(&mut self) {
        self.state = PowerState::Awake;
    }

    /// Applies the advertised schedule at a point in time: wakes or dozes
    /// the radio accordingly (no-op for active stations).
    pub fn follow_schedule(&mut self, bi: u32, ns_into_bi: u64) {
        if self.mode != PowerMode::PowerSave {
            return;
        }
        if let Some(ws) = &self.schedule {
            self.state = if ws.awake_at(bi, ns_into_bi) {
                PowerState::Awake
            } else {
                PowerState::Doze
            };
        }
    }
}

/// Where a sent frame ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delivery {
    Sent,
    Buffered,
}

/// The access-point side: per-peer frame buffers and the wakeup schedules
/// learned from configuration frames or information exchanges.
#[derive(Debug, Clone, Default)]
pub struct PsBuffer {
    queues: HashMap<StationId, VecDeque<u32>>,
    schedules: HashMap<StationId, WakeupSchedule>,
}

impl PsBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_schedule(&mut self, station: StationId, ws: WakeupSchedule) {
        self.schedules.insert(station, ws);
    }

    /// Answers an information request about `station`'s wakeup schedule.
    pub fn wakeup_schedule_of(&self, station: StationId) -> Result<WakeupSchedule, StationError> {
        self.schedules
            .get(&station)
            .copied()
            .ok_or(StationError::ScheduleUnknown { station })
    }

    /// Sends `frame_id` to `station` now if it is listening, otherwise
    /// parks it.
    pub fn deliver_or_buffer(
        &mut self,
        station: StationId,
        frame_id: u32,
        peer_awake: bool,
    ) -> Delivery {
        if peer_awake {
            Delivery::Sent
        } else {
            self.queues.entry(station).or_default().push_back(frame_id);
            Delivery::Buffered
        }
    }

    pub fn buffered(&self, station: StationId) -> usize {
        self.queues.get(&station).map_or(0, VecDeque::len)
    }

    /// The peer woke up: everything parked for it goes out in arrival order.
    pub fn drain_for(&mut self, station: StationId) -> Vec<u32> {
        self.queues
            .remove(&station)
            .map(Vec::from)
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule() -> WakeupSchedule {
        WakeupSchedule {
            period_bis: 4,
            offset_bi: 1,
            awake_window_ns: 2_000_000,
        }
    }

    #[test]
    fn mode_change_waits_for_the_ack() {
        let mut pm = PowerManagement::new();
        pm.request_mode(PowerMode::PowerSave, Some(schedule())).unwrap();
        assert_eq!(pm.mode(), PowerMode::Active, "not effective before the ack");
        assert!(pm.doze().is_err());
        assert_eq!(pm.ack_received().unwrap(), PowerMode::PowerSave);
        assert!(pm.doze().is_ok());
        assert_eq!(pm.state(), PowerState::Doze);
    }

    #[test]
    fn lost_proposal_changes_nothing() {
        let mut pm = PowerManagement::new();
        pm.request_mode(PowerMode::PowerSave, Some(schedule())).unwrap();
        pm.proposal_lost();
        assert_eq!(pm.ack_received(), Err(StationError::BadState("no mode change in flight")));
        assert_eq!(pm.mode(), PowerMode::Active);
    }

    #[test]
    fn power_save_needs_a_schedule() {
        let mut pm = PowerManagement::new();
        assert!(pm.request_mode(PowerMode::PowerSave, None).is_err());
        let bad = WakeupSchedule {
            period_bis: 0,
            ..schedule()
        };
        assert!(pm.request_mode(PowerMode::PowerSave, Some(bad)).is_err());
    }

    #[test]
    fn schedule_windows_repeat_with_the_period() {
        let ws = schedule();
        assert!(!ws.awake_at(0, 0), "before the offset");
        assert!(ws.awake_at(1, 0));
        assert!(ws.awake_at(1, 1_999_999));
        assert!(!ws.awake_at(1, 2_000_000), "window closed");
        assert!(!ws.awake_at(2, 0));
        assert!(ws.awake_at(5, 0));
        assert!(ws.awake_at(9, 500));
    }

    #[test]
    fn follow_schedule_drives_the_radio() {
        let mut pm = PowerManagement::new();
        pm.request_mode(PowerMode::PowerSave, Some(schedule())).unwrap();
        pm.ack_received().unwrap();
        pm.follow_schedule(1, 0);
        assert_eq!(pm.state(), PowerState::Awake);
        pm.follow_schedule(2, 0);
        assert_eq!(pm.state(), PowerState::Doze);
        // back to active: the radio comes on and stays on
        pm.request_mode(PowerMode::Active, None).unwrap();
        pm.ack_received().unwrap();
        assert_eq!(pm.state(), PowerState::Awake);
        pm.follow_schedule(2, 0);
        assert_eq!(pm.state(), PowerState::Awake);
    }

    #[test]
    fn frames_for_dozing_peers_are_parked_and_drain_in_order() {
        let mut buf = PsBuffer::new();
        assert_eq!(buf.deliver_or_buffer(7, 1, true), Delivery::Sent);
        assert_eq!(buf.deliver_or_buffer(7, 2, false), Delivery::Buffered);
        assert_eq!(buf.deliver_or_buffer(7, 3, false), Delivery::Buffered);
        assert_eq!(buf.deliver_or_buffer(8, 4, false), Delivery::Buffered);
        assert_eq!(buf.buffered(7), 2);
        assert_eq!(buf.drain_for(7), vec![2, 3]);
        assert_eq!(buf.buffered(7), 0);
        assert_eq!(buf.buffered(8), 1);
    }

    #[test]
    fn unknown_schedules_force_an_information_exchange() {
        let mut buf = PsBuffer::new();
        assert_eq!(
            buf.wakeup_schedule_of(5),
            Err(StationError::ScheduleUnknown { station: 5 })
        );
        buf.record_schedule(5, schedule());
        assert_eq!(buf.wakeup_schedule_of(5), Ok(schedule()));
    }
}
