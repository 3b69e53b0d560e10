//! Packet airtime: preamble, header, payload, and training-field durations.
//!
//! Everything is derived from chip/sample counts at the two clocks (preambles
//! always run on the 1.76 GHz chip clock, OFDM header/payload symbols on the
//! 2.64 GHz sampling clock). Parts are kept as exact f64 nanoseconds and the
//! frame total is rounded once — callers that schedule frames (the simulator)
//! and callers that sum frames (the throughput model) therefore agree on
//! identical integer durations instead of drifting apart by per-part
//! rounding.

use super::data::plan_data_encoding;
use super::mcs::{McsProfile, PhyKind, OFDM_SYMBOL_SAMPLES, SC_BLOCK_CHIPS};
use super::PhyError;

/// Frame-structure constants; the preamble shapes are fixed by the shipped
/// sequence configuration, the rest is adjustable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhyTiming {
    pub chip_rate_hz: f64,
    pub ofdm_clock_hz: f64,
    /// Control-packet STF: 49 repetitions of the 128-chip sequence.
    pub control_stf_chips: u32,
    /// Data-packet STF: 17 repetitions.
    pub data_stf_chips: u32,
    /// Channel-estimation field, nine 128-chip blocks.
    pub cef_chips: u32,
    /// Coded header on SC/control: one symbol block.
    pub sc_header_chips: u32,
    /// Coded header on OFDM, in symbols.
    pub ofdm_header_symbols: u32,
    /// One appended training subfield, in chips.
    pub trn_unit_chips: u32,
}

impl Default for PhyTiming {
    fn default() -> Self {
        PhyTiming {
            chip_rate_hz: 1.76e9,
            ofdm_clock_hz: 2.64e9,
            control_stf_chips: 49 * 128,
            data_stf_chips: 17 * 128,
            cef_chips: 9 * 128,
            sc_header_chips: 512,
            ofdm_header_symbols: 1,
            trn_unit_chips: 9 * 128,
        }
    }
}

/// Exact per-part durations of one frame; the schedulable total rounds once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Airtime {
    pub preamble_ns: f64,
    pub header_ns: f64,
    pub data_ns: f64,
    pub training_ns: f64,
}

impl Airtime {
    pub fn total_exact_ns(&self) -> f64 {
        self.preamble_ns + self.header_ns + self.data_ns + self.training_ns
    }

    /// Integer-nanosecond frame duration, the unit the event clock runs on.
    pub fn total_ns(&self) -> u64 {
        self.total_exact_ns().round() as u64
    }
}

/// Airtime of a whole PPDU carrying `length_octets` of PSDU with
/// `training_length` appended training subfields.
pub fn ppdu_airtime(
    mcs: &McsProfile,
    length_octets: usize,
    training_length: u32,
    t: &PhyTiming,
) -> Result<Airtime, PhyError> {
    if length_octets == 0 || length_octets > (1 << 18) - 1 {
        return Err(PhyError::InvalidLength(length_octets));
    }
    let chip_ns = 1e9 / t.chip_rate_hz;
    let sample_ns = 1e9 / t.ofdm_clock_hz;
    let training_ns = f64::from(training_length * t.trn_unit_chips) * chip_ns;
    let bits = (length_octets * 8) as f64;

    let airtime = match mcs.phy {
        PhyKind::Control => Airtime {
            preamble_ns: f64::from(t.control_stf_chips + t.cef_chips) * chip_ns,
            header_ns: 64.0 / mcs.data_rate_bps * 1e9,
            data_ns: bits / mcs.data_rate_bps * 1e9,
            training_ns,
        },
        PhyKind::SingleCarrier => {
            let plan = plan_data_encoding(length_octets, mcs)?;
            Airtime {
                preamble_ns: f64::from(t.data_stf_chips + t.cef_chips) * chip_ns,
                header_ns: f64::from(t.sc_header_chips) * chip_ns,
                data_ns: (plan.n_blk as u32 * SC_BLOCK_CHIPS) as f64 * chip_ns,
                training_ns,
            }
        }
        PhyKind::Ofdm => {
            let plan = plan_data_encoding(length_octets, mcs)?;
            Airtime {
                preamble_ns: f64::from(t.data_stf_chips + t.cef_chips) * chip_ns,
                header_ns: f64::from(t.ofdm_header_symbols * OFDM_SYMBOL_SAMPLES) * sample_ns,
                data_ns: (plan.n_blk as u32 * OFDM_SYMBOL_SAMPLES) as f64 * sample_ns,
                training_ns,
            }
        }
        PhyKind::LowPowerSc => Airtime {
            preamble_ns: f64::from(t.data_stf_chips + t.cef_chips) * chip_ns,
            header_ns: f64::from(t.sc_header_chips) * chip_ns,
            data_ns: bits / mcs.data_rate_bps * 1e9,
            training_ns,
        },
    };
    Ok(airtime)
}

/// Convenience: the rounded total.
pub fn ppdu_duration_ns(
    mcs: &McsProfile,
    length_octets: usize,
    training_length: u32,
    t: &PhyTiming,
) -> Result<u64, PhyError> {
    Ok(ppdu_airtime(mcs, length_octets, training_length, t)?.total_ns())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::mcs::mcs;

    #[test]
    fn control_frame_airtime() {
        // 14-octet frame: preamble (6272+1152)/1.76 ns, header 64 bits and
        // payload 112 bits at 27.5 Mbit/s.
        let t = PhyTiming::default();
        let a = ppdu_airtime(mcs(0).unwrap(), 14, 0, &t).unwrap();
        assert!((a.preamble_ns - 7424.0 / 1.76).abs() < 1e-9);
        assert!((a.header_ns - 64.0 / 27.5e6 * 1e9).abs() < 1e-9);
        assert!((a.data_ns - 112.0 / 27.5e6 * 1e9).abs() < 1e-9);
        assert_eq!(a.total_ns(), 10618);
    }

    #[test]
    fn sc_frame_airtime_is_block_quantized() {
        // 4096 octets at MCS 12: 25 blocks -> 3328+512+12800 = 16640 chips.
        let t = PhyTiming::default();
        let a = ppdu_airtime(mcs(12).unwrap(), 4096, 0, &t).unwrap();
        assert_eq!(a.total_ns(), 9455); // 16640/1.76 = 9454.55 ns
        // one more octet does not change the block count
        let b = ppdu_airtime(mcs(12).unwrap(), 4097, 0, &t).unwrap();
        assert_eq!(b.total_ns(), a.total_ns());
    }

    #[test]
    fn ofdm_frame_airtime() {
        // 1000 octets at MCS 13: 48 symbols; preamble on the chip clock,
        // header+data on the sampling clock.
        let t = PhyTiming::default();
        let a = ppdu_airtime(mcs(13).unwrap(), 1000, 0, &t).unwrap();
        assert!((a.preamble_ns - 3328.0 / 1.76).abs() < 1e-9);
        assert!((a.header_ns - 640.0 / 2.64).abs() < 1e-9);
        assert!((a.data_ns - 30720.0 / 2.64).abs() < 1e-9);
        assert_eq!(a.total_ns(), 13770);
    }

    #[test]
    fn training_fields_extend_the_frame() {
        let t = PhyTiming::default();
        let base = ppdu_airtime(mcs(12).unwrap(), 256, 0, &t).unwrap();
        let trained = ppdu_airtime(mcs(12).unwrap(), 256, 4, &t).unwrap();
        let delta = trained.training_ns - base.training_ns;
        assert!((delta - 4.0 * 1152.0 / 1.76).abs() < 1e-9);
        assert_eq!(base.training_ns, 0.0);
    }

    #[test]
    fn lpsc_uses_rate_table_airtime() {
        let t = PhyTiming::default();
        let a = ppdu_airtime(mcs(25).unwrap(), 500, 0, &t).unwrap();
        assert!((a.data_ns - 4000.0 / 626.0e6 * 1e9).abs() < 1e-6);
    }

    #[test]
    fn length_validation() {
        let t = PhyTiming::default();
        assert!(ppdu_airtime(mcs(1).unwrap(), 0, 0, &t).is_err());
        assert!(ppdu_airtime(mcs(1).unwrap(), 1 << 18, 0, &t).is_err());
    }

    #[test]
    fn higher_mcs_never_transmits_longer() {
        let t = PhyTiming::default();
        for len in [1usize, 64, 256, 1024, 7935, 65535] {
            let mut last = u64::MAX;
            for idx in 1..=12u8 {
                let d = ppdu_duration_ns(mcs(idx).unwrap(), len, 0, &t).unwrap();
                assert!(d <= last, "MCS {idx} at {len} octets");
                last = d;
            }
        }
    }
}
