//! Analytic MAC throughput: what a payload actually yields once framing,
//! interframe spaces, and acknowledgment traffic are paid for.
//!
//! Three curve families matter. The framing curve divides payload bits by
//! bare frame airtime and isolates how preamble and header amortize with
//! packet size. The normal-acknowledgment curve prices the full exchange —
//! data frame, interframe space, acknowledgment, interframe space — per
//! delivered frame. The aggregated curve packs many subframes into one frame
//! and pays the exchange overhead once per aggregate, answered by a single
//! block acknowledgment. Beacon-interval overheads (beacon sweep, training
//! slots, announcements) are deliberately out of scope here; the schedule
//! model owns those.
//!
//! All durations are integer nanoseconds rounded once per frame, and the
//! event-driven simulator composes exchanges from these same durations, so
//! the two agree to rounding.

use crate::mac::aggregate::{ampdu_octets, AMPDU_MAX_OCTETS};
use crate::mac::frames::{Mpdu, FCS_OCTETS, MAC_HEADER_OCTETS};
use crate::mac::MacError;
use crate::phy::mcs::{mcs, McsProfile};
use crate::phy::timing::{ppdu_duration_ns, PhyTiming};
use crate::phy::PhyError;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TputError {
    #[error(transparent)]
    Phy(#[from] PhyError),
    #[error(transparent)]
    Mac(#[from] MacError),
}

/// Interframe spacing and the control-rate response frames an exchange pays
/// for, on top of the data frame itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeTiming {
    pub phy: PhyTiming,
    /// Short interframe space, ns.
    pub sifs_ns: u64,
    /// Contention slot, ns.
    pub slot_ns: u64,
    /// Acknowledgment frame body, octets.
    pub ack_octets: u32,
    /// Block-acknowledgment request body, octets.
    pub bar_octets: u32,
    /// Block-acknowledgment body (64-frame bitmap form), octets.
    pub block_ack_octets: u32,
    /// Rate index the response frames go out at.
    pub response_mcs: u8,
}

impl Default for ExchangeTiming {
    fn default() -> Self {
        ExchangeTiming {
            phy: PhyTiming::default(),
            sifs_ns: 3_000,
            slot_ns: 5_000,
            ack_octets: 14,
            bar_octets: 24,
            block_ack_octets: 32,
            response_mcs: 0,
        }
    }
}

impl ExchangeTiming {
    fn response_frame_ns(&self, octets: u32) -> Result<u64, TputError> {
        let m = mcs(self.response_mcs)?;
        Ok(ppdu_duration_ns(m, octets as usize, 0, &self.phy)?)
    }

    pub fn ack_ns(&self) -> Result<u64, TputError> {
        self.response_frame_ns(self.ack_octets)
    }

    pub fn bar_ns(&self) -> Result<u64, TputError> {
        self.response_frame_ns(self.bar_octets)
    }

    pub fn block_ack_ns(&self) -> Result<u64, TputError> {
        self.response_frame_ns(self.block_ack_octets)
    }
}

/// Payload bits over bare frame airtime: the efficiency of the frame format
/// itself, nothing else charged.
pub fn framing_throughput_bps(
    mcs_profile: &McsProfile,
    psdu_octets: usize,
    t: &PhyTiming,
) -> Result<f64, TputError> {
    let d = ppdu_duration_ns(mcs_profile, psdu_octets, 0, t)?;
    Ok((psdu_octets as f64 * 8.0) / (d as f64) * 1e9)
}

/// Duration of one send-and-acknowledge cycle moving `msdu_octets` of
/// payload in a single frame.
pub fn normal_ack_cycle_ns(
    mcs_profile: &McsProfile,
    msdu_octets: u32,
    t: &ExchangeTiming,
) -> Result<u64, TputError> {
    let air = MAC_HEADER_OCTETS + msdu_octets + FCS_OCTETS;
    let data = ppdu_duration_ns(mcs_profile, air as usize, 0, &t.phy)?;
    Ok(data + t.sifs_ns + t.ack_ns()? + t.sifs_ns)
}

/// Delivered payload rate of the per-frame acknowledged exchange.
pub fn throughput_normal_ack(
    mcs_profile: &McsProfile,
    msdu_octets: u32,
    t: &ExchangeTiming,
) -> Result<f64, TputError> {
    let cycle = normal_ack_cycle_ns(mcs_profile, msdu_octets, t)?;
    Ok((msdu_octets as f64 * 8.0) / (cycle as f64) * 1e9)
}

/// PSDU size of an aggregate of `subframes` equal MPDUs, checked against the
/// aggregate ceiling.
pub fn ampdu_psdu_octets(msdu_octets: u32, subframes: u32) -> Result<u32, TputError> {
    if subframes == 0 {
        return Err(MacError::EmptyAggregate.into());
    }
    let mpdus: Vec<Mpdu> = (0..subframes)
        .map(|i| Mpdu::data(0, 1, i as u16, msdu_octets))
        .collect();
    let psdu = ampdu_octets(&mpdus);
    if psdu > AMPDU_MAX_OCTETS {
        let admitted = (1..mpdus.len())
            .rev()
            .find(|&k| ampdu_octets(&mpdus[..k]) <= AMPDU_MAX_OCTETS)
            .unwrap_or(0);
        return Err(MacError::AggregateOverflow {
            limit: AMPDU_MAX_OCTETS,
            admitted,
        }
        .into());
    }
    Ok(psdu)
}

/// Duration of one aggregated exchange: the aggregate frame, an interframe
/// space, the block acknowledgment, and the closing space.
pub fn ampdu_cycle_ns(
    mcs_profile: &McsProfile,
    msdu_octets: u32,
    subframes: u32,
    t: &ExchangeTiming,
) -> Result<u64, TputError> {
    let psdu = ampdu_psdu_octets(msdu_octets, subframes)?;
    let data = ppdu_duration_ns(mcs_profile, psdu as usize, 0, &t.phy)?;
    Ok(data + t.sifs_ns + t.block_ack_ns()? + t.sifs_ns)
}

/// Delivered payload rate of the aggregated exchange.
pub fn throughput_ampdu(
    mcs_profile: &McsProfile,
    msdu_octets: u32,
    subframes: u32,
    t: &ExchangeTiming,
) -> Result<f64, TputError> {
    let cycle = ampdu_cycle_ns(mcs_profile, msdu_octets, subframes, t)?;
    Ok((msdu_octets as f64 * subframes as f64 * 8.0) / (cycle as f64) * 1e9)
}

/// The log-spaced payload grid the shipped curves are evaluated on:
/// 256 octets doubling up to 128 KiB.
pub fn payload_grid() -> Vec<u32> {
    (0..10).map(|k| 256u32 << k).collect()
}
