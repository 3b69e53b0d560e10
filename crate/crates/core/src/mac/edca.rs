//! Prioritized contention (EDCA) for the contention-based access periods.
//!
//! Four transmit queues contend independently, each with its own arbitration
//! gap (AIFS, counted in idle slots after the medium frees) and its own
//! contention window. A queue decrements its backoff once per idle slot after
//! serving its AIFS; backoff zero grants a transmit opportunity. When several
//! queues of one station hit zero in the same slot, the highest-priority one
//! wins and the losers behave exactly as if they had collided on air: the
//! window doubles (capped) and a fresh backoff is drawn. A successful,
//! acknowledged exchange resets the window to its minimum.

use super::frames::{AccessCategory, ACCESS_CATEGORIES};
use super::MacError;
use rand::Rng;

/// Per-category contention parameters. Windows use the 2^m - 1 form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcParams {
    pub ac: AccessCategory,
    pub cw_min: u32,
    pub cw_max: u32,
    /// Idle slots of arbitration gap before backoff may count down.
    pub aifs_slots: u32,
    /// Transmit-opportunity cap, microseconds (0 = one frame exchange).
    pub txop_limit_us: u32,
}

/// Shipped defaults, lowest priority first.
pub fn default_ac_params() -> [AcParams; 4] {
    [
        AcParams {
            ac: AccessCategory::Background,
            cw_min: 15,
            cw_max: 1023,
            aifs_slots: 7,
            txop_limit_us: 0,
        },
        AcParams {
            ac: AccessCategory::BestEffort,
            cw_min: 15,
            cw_max: 63,
            aifs_slots: 3,
            txop_limit_us: 2528,
        },
        AcParams {
            ac: AccessCategory::Video,
            cw_min: 7,
            cw_max: 15,
            aifs_slots: 2,
            txop_limit_us: 3008,
        },
        AcParams {
            ac: AccessCategory::Voice,
            cw_min: 3,
            cw_max: 7,
            aifs_slots: 1,
            txop_limit_us: 1504,
        },
    ]
}

fn check_window_form(cw: u32) -> Result<(), MacError> {
    if !(cw + 1).is_power_of_two() {
        return Err(MacError::BadContentionWindow(cw));
    }
    Ok(())
}

/// Validates window forms, ordering within a category, and the cross-category
/// priority monotonicity (higher priority never waits longer).
pub fn validate_params(params: &[AcParams; 4]) -> Result<(), MacError> {
    for p in params {
        check_window_form(p.cw_min)?;
        check_window_form(p.cw_max)?;
        if p.cw_min > p.cw_max {
            return Err(MacError::WindowOrder {
                min: p.cw_min,
                max: p.cw_max,
            });
        }
    }
    for (i, expect) in ACCESS_CATEGORIES.iter().enumerate() {
        if params[i].ac != *expect {
            return Err(MacError::PriorityInversion("order must be bk, be, vi, vo"));
        }
    }
    for w in params.windows(2) {
        if w[1].aifs_slots > w[0].aifs_slots {
            return Err(MacError::PriorityInversion("aifs must not grow with priority"));
        }
        if w[1].cw_min > w[0].cw_min || w[1].cw_max > w[0].cw_max {
            return Err(MacError::PriorityInversion(
                "windows must not grow with priority",
            ));
        }
    }
    Ok(())
}

/// The contention window after a failed attempt: double and cap.
pub fn next_cw_on_failure(cw: u32, cw_max: u32) -> u32 {
    ((cw << 1) | 1).min(cw_max)
}

#[derive(Debug, Clone)]
struct AcState {
    params: AcParams,
    cw: u32,
    /// Backoff counter for the head-of-line frame; `None` while the queue is
    /// empty.
    backoff: Option<u32>,
    aifs_seen: u32,
    pending: u64,
}

impl AcState {
    fn draw(&mut self, rng: &mut impl Rng) {
        self.backoff = Some(rng.gen_range(0..=self.cw));
    }
}

/// One station's four contending queues.
#[derive(Debug, Clone)]
pub struct EdcaEngine {
    acs: [AcState; 4],
}

/// Outcome of one observed slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotGrant {
    pub ac: AccessCategory,
    /// Queues that also reached zero this slot and lost internally.
    pub internal_losers: u8,
}

impl EdcaEngine {
    pub fn new(params: [AcParams; 4]) -> Result<Self, MacError> {
        validate_params(&params)?;
        Ok(EdcaEngine {
            acs: params.map(|params| AcState {
                cw: params.cw_min,
                params,
                backoff: None,
                aifs_seen: 0,
                pending: 0,
            }),
        })
    }

    pub fn params(&self, ac: AccessCategory) -> &AcParams {
        &self.acs[ac.index()].params
    }

    pub fn cw(&self, ac: AccessCategory) -> u32 {
        self.acs[ac.index()].cw
    }

    pub fn backoff(&self, ac: AccessCategory) -> Option<u32> {
        self.acs[ac.index()].backoff
    }

    pub fn pending(&self, ac: AccessCategory) -> u64 {
        self.acs[ac.index()].pending
    }

    /// Queues `frames` more frames on `ac`, drawing a backoff if the queue
    /// was idle.
    pub fn enqueue(&mut self, ac: AccessCategory, frames: u64, rng: &mut impl Rng) {
        let st = &mut self.acs[ac.index()];
        st.pending += frames;
        if st.backoff.is_none() && st.pending > 0 {
            st.draw(rng);
        }
    }

    /// Acknowledged exchange: window back to minimum, next frame (if any)
    /// draws from the fresh window.
    pub fn on_tx_success(&mut self, ac: AccessCategory, rng: &mut impl Rng) {
        let st = &mut self.acs[ac.index()];
        st.cw = st.params.cw_min;
        st.pending = st.pending.saturating_sub(1);
        st.backoff = None;
        st.aifs_seen = 0;
        if st.pending > 0 {
            st.draw(rng);
        }
    }

    /// Failed attempt (no ACK, or lost an internal collision): the window
    /// doubles up to its cap and a fresh backoff is drawn for the same frame.
    pub fn on_tx_failure(&mut self, ac: AccessCategory, rng: &mut impl Rng) {
        let st = &mut self.acs[ac.index()];
        st.cw = next_cw_on_failure(st.cw, st.params.cw_max);
        st.aifs_seen = 0;
        if st.pending > 0 {
            st.draw(rng);
        } else {
            st.backoff = None;
        }
    }

    /// Advances all queues by one slot. A busy slot freezes backoff and
    /// restarts every arbitration gap. An idle slot first serves AIFS, then
    /// counts backoff down; a grant fires in the slot where the winning
    /// queue sits at zero with its gap served.
    pub fn observe_slot(&mut self, busy: bool, rng: &mut impl Rng) -> Option<SlotGrant> {
        if busy {
            for st in &mut self.acs {
                st.aifs_seen = 0;
            }
            return None;
        }
        let mut ready = [false; 4];
        for (i, st) in self.acs.iter_mut().enumerate() {
            if st.backoff.is_none() {
                continue;
            }
            if st.aifs_seen < st.params.aifs_slots {
                st.aifs_seen += 1;
                if st.aifs_seen < st.params.aifs_slots {
                    continue;
                }
                // gap completed this slot; a zero backoff may fire below
            } else if let Some(b) = st.backoff.as_mut() {
                if *b > 0 {
                    *b -= 1;
                }
            }
            if st.backoff == Some(0) && st.aifs_seen >= st.params.aifs_slots {
                ready[i] = true;
            }
        }
        let winner = (0..4).rev().find(|&i| ready[i])?;
        let mut losers = 0;
        for i in 0..winner {
            if ready[i] {
                losers += 1;
                self.on_tx_failure(ACCESS_CATEGORIES[i], rng);
            }
        }
        Some(SlotGrant {
            ac: ACCESS_CATEGORIES[winner],
            internal_losers: losers,
        })
    }
}
