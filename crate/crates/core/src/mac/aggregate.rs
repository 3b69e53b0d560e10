//! Three-level aggregation: MSDUs into one MPDU, MPDUs into one PSDU, and
//! PPDUs back-to-back into one burst that shares a single preamble.
//!
//! Order preservation is a hard rule at every level — subframes come out in
//! exactly the order they went in, so sequence numbering survives
//! aggregation. Overflows never truncate silently: the error names how many
//! leading subframes would have fit, letting the caller split the batch.

use super::frames::{Mpdu, StationId};
use super::MacError;
use crate::phy::mcs::McsProfile;
use crate::phy::timing::{ppdu_airtime, PhyTiming};
use crate::phy::PhyError;

/// Cap on one aggregated MSDU, octets.
pub const AMSDU_MAX_OCTETS: u32 = 7935;
/// Cap on one aggregated PSDU, octets.
pub const AMPDU_MAX_OCTETS: u32 = 262_143;
/// Per-subframe header inside an aggregated MSDU (DA, SA, length).
pub const AMSDU_SUBFRAME_HEADER_OCTETS: u32 = 14;
/// Delimiter preceding each MPDU subframe.
pub const MPDU_DELIMITER_OCTETS: u32 = 4;

fn pad4(octets: u32) -> u32 {
    octets.div_ceil(4) * 4
}

/// One upper-layer frame destined for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Msdu {
    pub destination: StationId,
    pub octets: u32,
    pub sequence: u64,
}

/// The payload produced by MSDU aggregation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amsdu {
    pub destination: StationId,
    pub subframes: Vec<Msdu>,
    pub octets: u32,
}

/// Octets an aggregated MSDU of these subframe sizes occupies: each subframe
/// carries a 14-octet header and is padded to a 4-octet boundary, except the
/// last.
pub fn amsdu_octets(lens: &[u32]) -> u32 {
    let n = lens.len();
    lens.iter()
        .enumerate()
        .map(|(i, &len)| {
            let sub = AMSDU_SUBFRAME_HEADER_OCTETS + len;
            if i + 1 == n {
                sub
            } else {
                pad4(sub)
            }
        })
        .sum()
}

/// Packs MSDUs into one aggregate, preserving order.
pub fn build_amsdu(msdus: &[Msdu], max_octets: u32) -> Result<Amsdu, MacError> {
    let first = msdus.first().ok_or(MacError::EmptyAggregate)?;
    if msdus.iter().any(|m| m.destination != first.destination) {
        return Err(MacError::MixedReceivers);
    }
    let lens: Vec<u32> = msdus.iter().map(|m| m.octets).collect();
    let total = amsdu_octets(&lens);
    if total > max_octets {
        let admitted = (1..msdus.len())
            .rev()
            .find(|&k| amsdu_octets(&lens[..k]) <= max_octets)
            .unwrap_or(0);
        return Err(MacError::AggregateOverflow {
            limit: max_octets,
            admitted,
        });
    }
    Ok(Amsdu {
        destination: first.destination,
        subframes: msdus.to_vec(),
        octets: total,
    })
}

/// The PSDU produced by MPDU aggregation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ampdu {
    pub mpdus: Vec<Mpdu>,
    /// PSDU octets including delimiters and padding.
    pub psdu_octets: u32,
}

/// Octets the PSDU occupies: a 4-octet delimiter before every MPDU, each
/// delimiter-plus-MPDU unit padded to 4 octets except the last.
pub fn ampdu_octets(mpdus: &[Mpdu]) -> u32 {
    let n = mpdus.len();
    mpdus
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let sub = MPDU_DELIMITER_OCTETS + m.air_octets();
            if i + 1 == n {
                sub
            } else {
                pad4(sub)
            }
        })
        .sum()
}

/// Packs MPDUs into one PSDU, preserving order.
pub fn build_ampdu(mpdus: &[Mpdu], max_octets: u32) -> Result<Ampdu, MacError> {
    let first = mpdus.first().ok_or(MacError::EmptyAggregate)?;
    if mpdus.iter().any(|m| m.header.receiver != first.header.receiver) {
        return Err(MacError::MixedReceivers);
    }
    let total = ampdu_octets(mpdus);
    if total > max_octets {
        let admitted = (1..mpdus.len())
            .rev()
            .find(|&k| ampdu_octets(&mpdus[..k]) <= max_octets)
            .unwrap_or(0);
        return Err(MacError::AggregateOverflow {
            limit: max_octets,
            admitted,
        });
    }
    Ok(Ampdu {
        mpdus: mpdus.to_vec(),
        psdu_octets: total,
    })
}

/// One PPDU inside a burst.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BurstPpdu {
    pub mcs: &'static McsProfile,
    pub psdu_octets: u32,
}

/// Airtime of a PPDU burst transmitted back-to-back with zero inter-frame
/// spacing: the preamble is paid once, every constituent pays header and
/// payload time.
pub fn appdu_duration_ns(burst: &[BurstPpdu], t: &PhyTiming) -> Result<u64, PhyError> {
    let mut total = 0.0;
    for (i, p) in burst.iter().enumerate() {
        let a = ppdu_airtime(p.mcs, p.psdu_octets as usize, 0, t)?;
        if i == 0 {
            total += a.preamble_ns;
        }
        total += a.header_ns + a.data_ns;
    }
    Ok(total.round() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::mcs::mcs;

    fn msdu(octets: u32, sequence: u64) -> Msdu {
        Msdu {
            destination: 5,
            octets,
            sequence,
        }
    }

    #[test]
    fn amsdu_packing_arithmetic() {
        // 100 -> 14+100=114 -> padded 116; 50 -> 64 -> 64; last 33 -> 47 raw.
        assert_eq!(amsdu_octets(&[100, 50, 33]), 116 + 64 + 47);
        // single subframe is never padded
        assert_eq!(amsdu_octets(&[100]), 114);
    }

    #[test]
    fn amsdu_respects_the_cap_and_reports_the_admissible_prefix() {
        let batch: Vec<Msdu> = (0..10).map(|i| msdu(1000, i)).collect();
        // each subframe costs 1016 padded; 7 of them = 7112, the 8th would
        // land at 8126 > 7935 (last unpadded: 7*1016 + 1014 = 8126)
        let err = build_amsdu(&batch, AMSDU_MAX_OCTETS).unwrap_err();
        assert_eq!(
            err,
            MacError::AggregateOverflow {
                limit: 7935,
                admitted: 7
            }
        );
        let ok = build_amsdu(&batch[..7], AMSDU_MAX_OCTETS).unwrap();
        assert_eq!(ok.octets, 6 * 1016 + 1014);
    }

    #[test]
    fn amsdu_preserves_order_and_receiver() {
        let batch: Vec<Msdu> = (0..5).map(|i| msdu(64 + i as u32, i)).collect();
        let a = build_amsdu(&batch, AMSDU_MAX_OCTETS).unwrap();
        let seqs: Vec<u64> = a.subframes.iter().map(|m| m.sequence).collect();
        assert_eq!(seqs, vec![0, 1, 2, 3, 4]);
        let mut mixed = batch;
        mixed[3].destination = 6;
        assert_eq!(
            build_amsdu(&mixed, AMSDU_MAX_OCTETS),
            Err(MacError::MixedReceivers)
        );
        assert_eq!(build_amsdu(&[], AMSDU_MAX_OCTETS), Err(MacError::EmptyAggregate));
    }

    #[test]
    fn ampdu_packing_arithmetic() {
        let frames: Vec<Mpdu> = (0..3).map(|i| Mpdu::data(1, 2, i, 1000)).collect();
        // subframe = 4 + (26+1000+4) = 1034 -> padded 1036; last unpadded
        assert_eq!(ampdu_octets(&frames), 1036 + 1036 + 1034);
        let a = build_ampdu(&frames, AMPDU_MAX_OCTETS).unwrap();
        assert_eq!(a.psdu_octets, 3106);
    }

    #[test]
    fn ampdu_cap_and_admitted_prefix() {
        let frames: Vec<Mpdu> = (0..300).map(|i| Mpdu::data(1, 2, i, 1000)).collect();
        // padded units are 1036 octets, the trailing one 1034:
        // 252*1036 + 1034 = 262106 <= 262143, one more overflows
        let err = build_ampdu(&frames, AMPDU_MAX_OCTETS).unwrap_err();
        match err {
            MacError::AggregateOverflow { limit, admitted } => {
                assert_eq!(limit, AMPDU_MAX_OCTETS);
                assert_eq!(admitted, 253);
                assert!(ampdu_octets(&frames[..admitted]) <= AMPDU_MAX_OCTETS);
                assert!(ampdu_octets(&frames[..admitted + 1]) > AMPDU_MAX_OCTETS);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn burst_pays_one_preamble() {
        let t = PhyTiming::default();
        let p = BurstPpdu {
            mcs: mcs(12).unwrap(),
            psdu_octets: 4096,
        };
        let single = appdu_duration_ns(&[p], &t).unwrap();
        let double = appdu_duration_ns(&[p, p], &t).unwrap();
        let alone = ppdu_airtime(p.mcs, 4096, 0, &t).unwrap();
        assert_eq!(single, alone.total_ns());
        // the second PPDU adds header+data but no preamble
        let expect = alone.total_exact_ns() + alone.header_ns + alone.data_ns;
        assert_eq!(double, expect.round() as u64);
        assert!(f64::from(double as u32) < 2.0 * alone.total_exact_ns());
    }
}
