//! PSDU encoding: shortening/padding arithmetic, scrambling continuity,
//! codeword packing, and symbol-block padding.
//!
//! The planner answers "how many codewords and symbol blocks does a payload
//! of L octets occupy at this MCS" — the quantity everything downstream
//! (airtime, throughput, the simulator) depends on. The encoder then realizes
//! the plan bit-for-bit: one scrambler instance runs across the PSDU, the
//! data pad, and the final block pad, so the pad bits are a continuation of
//! the same PN stream, exactly as a conformant receiver expects.

use super::ldpc::SystematicCode;
use super::mcs::{CodeRate, McsProfile, PhyKind, CODEWORD_BITS};
use super::scrambler::Scrambler;
use super::PhyError;

/// Everything the encoder (and airtime math) needs to know about one PSDU at
/// one MCS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DataEncodingPlan {
    /// LDPC codewords.
    pub n_cw: usize,
    /// Info bits per codeword (672 * R).
    pub l_cwd: usize,
    /// Zero bits appended to the scrambled PSDU before coding.
    pub n_data_pad: usize,
    /// Symbol blocks on air.
    pub n_blk: usize,
    /// Zero bits appended after the last codeword to fill the final block.
    pub n_blkpad: usize,
    /// Coded bits per symbol block at this MCS.
    pub n_cbpb: usize,
    /// Repetition factor (1 or 2).
    pub repetition: u32,
}

fn ldpc_rate(mcs: &McsProfile) -> Result<CodeRate, PhyError> {
    match mcs.phy {
        PhyKind::SingleCarrier | PhyKind::Ofdm => Ok(mcs
            .code_rate
            .expect("ldpc rows always carry a code rate")),
        PhyKind::Control => Err(PhyError::UnsupportedCoding {
            index: mcs.index,
            phy: "control",
            reason: "spread control stream does not use the codeword planner",
        }),
        PhyKind::LowPowerSc => Err(PhyError::UnsupportedCoding {
            index: mcs.index,
            phy: "low-power-sc",
            reason: "RS-coded rows are rate-table-only",
        }),
    }
}

/// Computes codeword and block counts for a PSDU of `length_octets`.
pub fn plan_data_encoding(
    length_octets: usize,
    mcs: &McsProfile,
) -> Result<DataEncodingPlan, PhyError> {
    if length_octets == 0 || length_octets > (1 << 18) - 1 {
        return Err(PhyError::InvalidLength(length_octets));
    }
    let rate = ldpc_rate(mcs)?;
    let rho = mcs.repetition as usize;
    let l_cwd = rate.info_bits() as usize;
    let bits = length_octets * 8;

    // ceil(L * 8 * rho / L_CWD)
    let n_cw = (bits * rho).div_ceil(l_cwd);
    // each codeword consumes L_CWD / rho fresh payload bits
    let n_data_pad = n_cw * l_cwd / rho - bits;

    let n_cbpb = mcs
        .coded_bits_per_block()
        .expect("sc/ofdm rows have a block size") as usize;
    let coded = n_cw * CODEWORD_BITS as usize;
    let n_blk = coded.div_ceil(n_cbpb);
    let n_blkpad = n_blk * n_cbpb - coded;

    Ok(DataEncodingPlan {
        n_cw,
        l_cwd,
        n_data_pad,
        n_blk,
        n_blkpad,
        n_cbpb,
        repetition: mcs.repetition,
    })
}

/// Encodes a PSDU into the on-air coded bitstream (`n_blk * n_cbpb` bits).
pub fn encode_data(
    psdu: &[u8],
    mcs: &McsProfile,
    code: &dyn SystematicCode,
    seed: u8,
) -> Result<(DataEncodingPlan, Vec<u8>), PhyError> {
    let plan = plan_data_encoding(psdu.len(), mcs)?;
    if code.codeword_bits() != CODEWORD_BITS as usize || code.info_bits() != plan.l_cwd {
        let rate = ldpc_rate(mcs)?;
        return Err(PhyError::WrongCode {
            need_num: rate.num,
            need_den: rate.den,
            need_n: CODEWORD_BITS as usize,
        });
    }

    // one PN stream across PSDU, data pad, and block pad
    let mut scr = Scrambler::new(seed);
    let mut stream: Vec<u8> = psdu
        .iter()
        .flat_map(|&oct| (0..8).map(move |b| (oct >> b) & 1))
        .collect();
    stream.resize(stream.len() + plan.n_data_pad, 0);
    scr.scramble(&mut stream);

    let rho = plan.repetition as usize;
    let fresh = plan.l_cwd / rho;
    let mut out = Vec::with_capacity(plan.n_blk * plan.n_cbpb);
    for word in stream.chunks(fresh) {
        debug_assert_eq!(word.len(), fresh);
        let mut info = Vec::with_capacity(plan.l_cwd);
        for _ in 0..rho {
            info.extend_from_slice(word);
        }
        let parity = code.parity(&info);
        out.extend(info);
        out.extend(parity);
    }
    debug_assert_eq!(out.len(), plan.n_cw * CODEWORD_BITS as usize);

    let mut blkpad = vec![0u8; plan.n_blkpad];
    scr.scramble(&mut blkpad);
    out.extend(blkpad);
    debug_assert_eq!(out.len(), plan.n_blk * plan.n_cbpb);
    Ok((plan, out))
}

/// Inverts [`encode_data`]: checks every codeword, strips parity and
/// repetition, descrambles, and repacks octets.
pub fn decode_data(
    coded: &[u8],
    length_octets: usize,
    mcs: &McsProfile,
    code: &dyn SystematicCode,
    seed: u8,
) -> Result<Vec<u8>, PhyError> {
    let plan = plan_data_encoding(length_octets, mcs)?;
    let want = plan.n_blk * plan.n_cbpb;
    if coded.len() != want {
        return Err(PhyError::StreamLength {
            got: coded.len(),
            want,
        });
    }
    let rho = plan.repetition as usize;
    let fresh = plan.l_cwd / rho;
    let mut stream = Vec::with_capacity(plan.n_cw * fresh);
    for (m, cw) in coded[..plan.n_cw * CODEWORD_BITS as usize]
        .chunks(CODEWORD_BITS as usize)
        .enumerate()
    {
        if !code.check(cw) {
            return Err(PhyError::ParityMismatch(m));
        }
        if rho == 2 && cw[..fresh] != cw[fresh..2 * fresh] {
            return Err(PhyError::RepetitionMismatch(m));
        }
        stream.extend_from_slice(&cw[..fresh]);
    }
    Scrambler::new(seed).scramble(&mut stream);
    stream.truncate(length_octets * 8);
    Ok(stream
        .chunks(8)
        .map(|bits| bits.iter().enumerate().map(|(i, &b)| b << i).sum())
        .collect())
}
