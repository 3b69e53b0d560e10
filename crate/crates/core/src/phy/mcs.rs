//! The modulation-and-coding table and the rate arithmetic behind it.
//!
//! Clock facts the derivations rest on: single-carrier (and control, and
//! low-power SC) chips tick at 1.76 GHz; the OFDM sampling clock is 2.64 GHz
//! (ratio 2/3). An SC symbol block carries 448 data symbols behind a 64-symbol
//! guard (512 chips on air), so useful SC throughput scales by 448/512. An
//! OFDM symbol spans 512 + 128 samples, i.e. one symbol every 640/2.64e9
//! seconds.

use super::PhyError;
use std::fmt;

/// Chip rate of the single-carrier family, Hz.
pub const SC_CHIP_RATE_HZ: f64 = 1.76e9;
/// OFDM sampling clock, Hz.
pub const OFDM_CLOCK_HZ: f64 = 2.64e9;
/// Data symbols per SC block.
pub const SC_BLOCK_DATA: u32 = 448;
/// Guard-interval symbols per SC block.
pub const SC_BLOCK_GI: u32 = 64;
/// Chips on air per SC block.
pub const SC_BLOCK_CHIPS: u32 = SC_BLOCK_DATA + SC_BLOCK_GI;
/// OFDM FFT size in samples.
pub const OFDM_FFT: u32 = 512;
/// OFDM cyclic-prefix length in samples.
pub const OFDM_CP: u32 = 128;
/// Samples per OFDM symbol.
pub const OFDM_SYMBOL_SAMPLES: u32 = OFDM_FFT + OFDM_CP;
/// Codeword length shared by every LDPC rate.
pub const CODEWORD_BITS: u32 = 672;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhyKind {
    Control,
    SingleCarrier,
    Ofdm,
    LowPowerSc,
}

impl fmt::Display for PhyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhyKind::Control => "control",
            PhyKind::SingleCarrier => "sc",
            PhyKind::Ofdm => "ofdm",
            PhyKind::LowPowerSc => "low-power-sc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    /// pi/2-rotated BPSK (differential detection capable).
    Pi2Bpsk,
    Pi2Qpsk,
    Pi2Qam16,
    /// Spread QPSK: the same pair duplicated across mirrored subcarriers.
    Sqpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Pi2Bpsk => "pi/2-BPSK",
            Modulation::Pi2Qpsk => "pi/2-QPSK",
            Modulation::Pi2Qam16 => "pi/2-16QAM",
            Modulation::Sqpsk => "SQPSK",
            Modulation::Qpsk => "QPSK",
            Modulation::Qam16 => "16-QAM",
            Modulation::Qam64 => "64-QAM",
        })
    }
}

/// An LDPC code rate as an exact fraction (1/2, 5/8, 3/4 or 13/16).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeRate {
    pub num: u32,
    pub den: u32,
}

impl CodeRate {
    pub const R1_2: CodeRate = CodeRate { num: 1, den: 2 };
    pub const R5_8: CodeRate = CodeRate { num: 5, den: 8 };
    pub const R3_4: CodeRate = CodeRate { num: 3, den: 4 };
    pub const R13_16: CodeRate = CodeRate { num: 13, den: 16 };

    pub fn as_f64(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// Info bits in a 672-bit codeword at this rate; exact for all four rates.
    pub fn info_bits(&self) -> u32 {
        CODEWORD_BITS * self.num / self.den
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Outer coding of an MCS row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coding {
    /// LDPC with the table's data-bits-per-symbol figure (load-bearing only
    /// for OFDM rows, where it drives the rate derivation).
    Ldpc { n_dbps: u32 },
    /// Reed-Solomon outer code plus a short inner block code; rate-table-only.
    ReedSolomon { block: &'static str },
}

/// One row of the rate table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McsProfile {
    pub index: u8,
    pub phy: PhyKind,
    pub modulation: Modulation,
    /// Coded bits per SC symbol, or per OFDM symbol for OFDM rows.
    pub n_cbps: u32,
    /// Spreading/repetition factor applied to the coded stream.
    pub repetition: u32,
    /// LDPC code rate; `None` for the RS-coded low-power rows.
    pub code_rate: Option<CodeRate>,
    /// Coded bits per single subcarrier (OFDM rows).
    pub n_bpcs: u32,
    pub coding: Coding,
    pub data_rate_bps: f64,
}

impl McsProfile {
    /// Coded bits per symbol block: 448 symbols' worth for SC, one OFDM
    /// symbol's worth for OFDM.
    pub fn coded_bits_per_block(&self) -> Option<u32> {
        match self.phy {
            PhyKind::SingleCarrier => Some(SC_BLOCK_DATA * self.n_cbps),
            PhyKind::Ofdm => Some(self.n_cbps),
            PhyKind::Control | PhyKind::LowPowerSc => None,
        }
    }

    /// Recomputes the data rate from the row's own fields.
    ///
    /// Control and SC use the chip-rate formula (SC additionally pays the
    /// guard-interval factor); OFDM divides data bits per symbol by the
    /// symbol duration. Low-power rows have no derivation and return `None`.
    pub fn derived_rate_bps(&self) -> Option<f64> {
        match self.phy {
            PhyKind::Control => {
                let r = self.code_rate?.as_f64();
                Some(SC_CHIP_RATE_HZ * f64::from(self.n_cbps) * r / f64::from(self.repetition))
            }
            PhyKind::SingleCarrier => {
                let r = self.code_rate?.as_f64();
                let gi = f64::from(SC_BLOCK_DATA) / f64::from(SC_BLOCK_CHIPS);
                Some(
                    SC_CHIP_RATE_HZ * gi * f64::from(self.n_cbps) * r
                        / f64::from(self.repetition),
                )
            }
            PhyKind::Ofdm => match self.coding {
                Coding::Ldpc { n_dbps } => {
                    Some(f64::from(n_dbps) * OFDM_CLOCK_HZ / f64::from(OFDM_SYMBOL_SAMPLES))
                }
                Coding::ReedSolomon { .. } => None,
            },
            PhyKind::LowPowerSc => None,
        }
    }
}

const M: f64 = 1e6;

/// The full table, indexed 0..=31.
pub const MCS_TABLE: [McsProfile; 32] = {
    use Coding::*;
    use Modulation::*;
    use PhyKind::*;
    const fn ldpc(
        index: u8,
        phy: PhyKind,
        modulation: Modulation,
        n_cbps: u32,
        repetition: u32,
        code_rate: CodeRate,
        n_bpcs: u32,
        n_dbps: u32,
        mbps: f64,
    ) -> McsProfile {
        McsProfile {
            index,
            phy,
            modulation,
            n_cbps,
            repetition,
            code_rate: Some(code_rate),
            n_bpcs,
            coding: Ldpc { n_dbps },
            data_rate_bps: mbps * M,
        }
    }
    const fn rs(index: u8, modulation: Modulation, block: &'static str, mbps: f64) -> McsProfile {
        McsProfile {
            index,
            phy: LowPowerSc,
            modulation,
            n_cbps: 392,
            repetition: 1,
            code_rate: None,
            n_bpcs: 1,
            coding: ReedSolomon { block },
            data_rate_bps: mbps * M,
        }
    }
    [
        ldpc(0, Control, Pi2Bpsk, 1, 32, CodeRate::R1_2, 1, 168, 27.5),
        ldpc(1, SingleCarrier, Pi2Bpsk, 1, 2, CodeRate::R1_2, 1, 168, 385.0),
        ldpc(2, SingleCarrier, Pi2Bpsk, 1, 1, CodeRate::R1_2, 1, 168, 770.0),
        ldpc(3, SingleCarrier, Pi2Bpsk, 1, 1, CodeRate::R5_8, 1, 168, 962.5),
        ldpc(4, SingleCarrier, Pi2Bpsk, 1, 1, CodeRate::R3_4, 1, 168, 1155.0),
        ldpc(5, SingleCarrier, Pi2Bpsk, 1, 1, CodeRate::R13_16, 1, 168, 1251.25),
        ldpc(6, SingleCarrier, Pi2Qpsk, 2, 1, CodeRate::R1_2, 1, 168, 1540.0),
        ldpc(7, SingleCarrier, Pi2Qpsk, 2, 1, CodeRate::R5_8, 1, 168, 1925.0),
        ldpc(8, SingleCarrier, Pi2Qpsk, 2, 1, CodeRate::R3_4, 1, 168, 2310.0),
        ldpc(9, SingleCarrier, Pi2Qpsk, 2, 1, CodeRate::R13_16, 1, 168, 2502.5),
        ldpc(10, SingleCarrier, Pi2Qam16, 4, 1, CodeRate::R1_2, 1, 168, 3080.0),
        ldpc(11, SingleCarrier, Pi2Qam16, 4, 1, CodeRate::R5_8, 1, 168, 3850.0),
        ldpc(12, SingleCarrier, Pi2Qam16, 4, 1, CodeRate::R3_4, 1, 168, 4620.0),
        ldpc(13, Ofdm, Sqpsk, 336, 1, CodeRate::R1_2, 1, 168, 693.0),
        ldpc(14, Ofdm, Sqpsk, 336, 1, CodeRate::R5_8, 1, 210, 866.25),
        ldpc(15, Ofdm, Qpsk, 672, 1, CodeRate::R1_2, 2, 336, 1386.0),
        ldpc(16, Ofdm, Qpsk, 672, 1, CodeRate::R5_8, 2, 420, 1732.5),
        ldpc(17, Ofdm, Qpsk, 672, 1, CodeRate::R3_4, 2, 504, 2079.0),
        ldpc(18, Ofdm, Qam16, 1344, 1, CodeRate::R1_2, 4, 672, 2772.0),
        ldpc(19, Ofdm, Qam16, 1344, 1, CodeRate::R5_8, 4, 840, 3465.0),
        ldpc(20, Ofdm, Qam16, 1344, 1, CodeRate::R3_4, 4, 1008, 4158.0),
        // The next two rates are stored as derived from their own N_DBPS
        // (1092 * 4.125 and 1260 * 4.125); common reprints round them off.
        ldpc(21, Ofdm, Qam16, 1344, 1, CodeRate::R13_16, 4, 1092, 4504.5),
        ldpc(22, Ofdm, Qam64, 2016, 1, CodeRate::R5_8, 6, 1260, 5197.5),
        ldpc(23, Ofdm, Qam64, 2016, 1, CodeRate::R3_4, 6, 1512, 6237.0),
        ldpc(24, Ofdm, Qam64, 2016, 1, CodeRate::R13_16, 6, 1638, 6756.75),
        rs(25, Pi2Bpsk, "RS(224,208)+BS(16,8)", 626.0),
        rs(26, Pi2Bpsk, "RS(224,208)+BS(12,8)", 834.0),
        rs(27, Pi2Bpsk, "RS(224,208)+SPC(9,8)", 1112.0),
        rs(28, Pi2Qpsk, "RS(224,208)+BS(16,8)", 1251.0),
        rs(29, Pi2Qpsk, "RS(224,208)+BS(12,8)", 1668.0),
        rs(30, Pi2Qpsk, "RS(224,208)+SPC(9,8)", 2224.0),
        rs(31, Pi2Qpsk, "RS(224,208)+BC(8,8)", 2503.0),
    ]
};

/// Looks up a row by index.
pub fn mcs(index: u8) -> Result<&'static McsProfile, PhyError> {
    MCS_TABLE
        .get(index as usize)
        .ok_or(PhyError::UnknownMcs(index))
}
