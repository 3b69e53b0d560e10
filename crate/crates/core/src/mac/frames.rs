//! Frame and station identities shared by every MAC component.

use std::fmt;

pub type StationId = u16;
/// Broadcast receiver address.
pub const BROADCAST: StationId = 0xFFFF;

/// MAC header octets on air (frame control through the final address/QoS
/// fields).
pub const MAC_HEADER_OCTETS: u32 = 26;
pub const FCS_OCTETS: u32 = 4;
/// Encryption overhead: extra header plus the integrity tag.
pub const CRYPTO_HEADER_OCTETS: u32 = 8;
pub const CRYPTO_MIC_OCTETS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameKind {
    Beacon,
    SectorSweep,
    SweepFeedback,
    SweepAck,
    Poll,
    Grant,
    Rts,
    DmgCts,
    Data,
    Ack,
    BlockAckRequest,
    BlockAck,
    Refinement,
    InfoRequest,
    InfoResponse,
    PowerSaveConfig,
    FstSetupRequest,
    FstSetupResponse,
    FstAckRequest,
    FstAckResponse,
}

impl FrameKind {
    /// Frames that set the NAV of third parties unconditionally (medium
    /// reservation handshake).
    pub fn reserves_medium(self) -> bool {
        matches!(self, FrameKind::Rts | FrameKind::DmgCts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AckPolicy {
    Normal,
    Block,
    NoAck,
}

/// Access categories in increasing priority order (the derived `Ord` is the
/// priority order).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccessCategory {
    Background,
    BestEffort,
    Video,
    Voice,
}

pub const ACCESS_CATEGORIES: [AccessCategory; 4] = [
    AccessCategory::Background,
    AccessCategory::BestEffort,
    AccessCategory::Video,
    AccessCategory::Voice,
];

impl AccessCategory {
    /// Maps a user priority (0..=7) to its category. Each UP belongs to
    /// exactly one AC.
    pub fn from_user_priority(up: u8) -> AccessCategory {
        match up & 7 {
            1 | 2 => AccessCategory::Background,
            0 | 3 => AccessCategory::BestEffort,
            4 | 5 => AccessCategory::Video,
            _ => AccessCategory::Voice,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AccessCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessCategory::Background => "bk",
            AccessCategory::BestEffort => "be",
            AccessCategory::Video => "vi",
            AccessCategory::Voice => "vo",
        })
    }
}

/// The header fields this model cares about.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacHeader {
    pub kind: FrameKind,
    pub transmitter: StationId,
    pub receiver: StationId,
    /// Final destination; differs from `receiver` on relayed frames.
    pub destination: StationId,
    /// NAV reservation carried by the frame, microseconds.
    pub duration_us: u32,
    pub sequence: u16,
    pub user_priority: u8,
    pub ack_policy: AckPolicy,
}

impl MacHeader {
    pub fn data(transmitter: StationId, receiver: StationId, sequence: u16) -> MacHeader {
        MacHeader {
            kind: FrameKind::Data,
            transmitter,
            receiver,
            destination: receiver,
            duration_us: 0,
            sequence,
            user_priority: 0,
            ack_policy: AckPolicy::Normal,
        }
    }

    pub fn access_category(&self) -> AccessCategory {
        AccessCategory::from_user_priority(self.user_priority)
    }
}

/// One MAC frame as the PHY sees it: header plus an opaque payload size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mpdu {
    pub header: MacHeader,
    pub payload_octets: u32,
    pub encrypted: bool,
    /// Receive-side integrity verdict; transmitters build frames with `true`.
    pub fcs_ok: bool,
}

impl Mpdu {
    pub fn data(transmitter: StationId, receiver: StationId, sequence: u16, payload: u32) -> Mpdu {
        Mpdu {
            header: MacHeader::data(transmitter, receiver, sequence),
            payload_octets: payload,
            encrypted: false,
            fcs_ok: true,
        }
    }

    /// Octets this frame occupies inside a PSDU.
    pub fn air_octets(&self) -> u32 {
        let crypto = if self.encrypted {
            CRYPTO_HEADER_OCTETS + CRYPTO_MIC_OCTETS
        } else {
            0
        };
        MAC_HEADER_OCTETS + crypto + self.payload_octets + FCS_OCTETS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn up_to_ac_mapping_is_total_and_standard() {
        use AccessCategory::*;
        let expect = [
            BestEffort, Background, Background, BestEffort, Video, Video, Voice, Voice,
        ];
        for up in 0..8u8 {
            assert_eq!(AccessCategory::from_user_priority(up), expect[up as usize]);
        }
    }

    #[test]
    fn priority_order() {
        use AccessCategory::*;
        assert!(Background < BestEffort && BestEffort < Video && Video < Voice);
    }

    #[test]
    fn air_octets_accounting() {
        let plain = Mpdu::data(1, 2, 0, 1000);
        assert_eq!(plain.air_octets(), 26 + 1000 + 4);
        let mut secured = plain;
        secured.encrypted = true;
        assert_eq!(secured.air_octets(), 26 + 8 + 1000 + 16 + 4);
    }

    #[test]
    fn reservation_frames() {
        assert!(FrameKind::Rts.reserves_medium());
        assert!(FrameKind::DmgCts.reserves_medium());
        assert!(!FrameKind::Data.reserves_medium());
        assert!(!FrameKind::Ack.reserves_medium());
    }
}
