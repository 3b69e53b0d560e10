//! The 64-bit PLCP header and its five-step encoding into one 448-bit coded
//! block.
//!
//! The pipeline: scramble the header bits from the eighth bit on (the first
//! seven carry the scrambler seed in clear), zero-pad to the 504 info bits of
//! the rate-3/4 code, generate 168 parity bits, then puncture the codeword two
//! different ways — `cs1` keeps parity 1..=160, `cs2` keeps 1..=152 plus
//! 161..=168 and is masked with the all-ones PN sequence — and ship both
//! halves back-to-back. The receiver can combine the two observations of the
//! shared bits for extra margin; here the value of the construction is that
//! every slice boundary is pinned by golden vectors.

use super::ldpc::{require_header_code, SystematicCode};
use super::scrambler::{Scrambler, ALL_ONES_SEED};
use super::PhyError;

/// Maximum PSDU length representable in the 18-bit length field.
pub const MAX_PSDU_OCTETS: u32 = (1 << 18) - 1;

/// Parsed form of the 64-bit header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlcpHeader {
    scrambler_seed: u8,
    mcs_index: u8,
    psdu_octets: u32,
    packet_type: bool,
    training_length: u8,
    bt_request: bool,
}

impl PlcpHeader {
    /// Validates field ranges. Seed zero is refused (it would disable
    /// scrambling); when `training_length` is zero the `packet_type` and
    /// `bt_request` flags are meaningless and get normalized to false.
    pub fn new(
        scrambler_seed: u8,
        mcs_index: u8,
        psdu_octets: u32,
        packet_type: bool,
        training_length: u8,
        bt_request: bool,
    ) -> Result<Self, PhyError> {
        if scrambler_seed == 0 || scrambler_seed > 0x7F {
            return Err(PhyError::BadSeed(scrambler_seed));
        }
        if mcs_index > 31 {
            return Err(PhyError::UnknownMcs(mcs_index));
        }
        if psdu_octets > MAX_PSDU_OCTETS {
            return Err(PhyError::FieldRange {
                field: "length",
                value: psdu_octets,
                max: MAX_PSDU_OCTETS,
            });
        }
        if training_length > 31 {
            return Err(PhyError::FieldRange {
                field: "training_length",
                value: u32::from(training_length),
                max: 31,
            });
        }
        let (packet_type, bt_request) = if training_length == 0 {
            (false, false)
        } else {
            (packet_type, bt_request)
        };
        Ok(PlcpHeader {
            scrambler_seed,
            mcs_index,
            psdu_octets,
            packet_type,
            training_length,
            bt_request,
        })
    }

    pub fn basic(scrambler_seed: u8, mcs_index: u8, psdu_octets: u32) -> Result<Self, PhyError> {
        Self::new(scrambler_seed, mcs_index, psdu_octets, false, 0, false)
    }

    pub fn scrambler_seed(&self) -> u8 {
        self.scrambler_seed
    }

    pub fn mcs_index(&self) -> u8 {
        self.mcs_index
    }

    pub fn psdu_octets(&self) -> u32 {
        self.psdu_octets
    }

    pub fn packet_type(&self) -> bool {
        self.packet_type
    }

    pub fn training_length(&self) -> u8 {
        self.training_length
    }

    pub fn bt_request(&self) -> bool {
        self.bt_request
    }

    /// Serializes to 64 bits, LSB of each field first: seed [0..7), MCS
    /// [7..12), length [12..30), packet type [30], training length [31..36),
    /// beam-tracking request [36], reserved zeros [37..64).
    pub fn to_bits(&self) -> [u8; 64] {
        let mut bits = [0u8; 64];
        let mut pos = 0;
        let mut put = |value: u32, width: usize| {
            for i in 0..width {
                bits[pos] = ((value >> i) & 1) as u8;
                pos += 1;
            }
        };
        put(u32::from(self.scrambler_seed), 7);
        put(u32::from(self.mcs_index), 5);
        put(self.psdu_octets, 18);
        put(u32::from(self.packet_type), 1);
        put(u32::from(self.training_length), 5);
        put(u32::from(self.bt_request), 1);
        bits
    }

    /// Parses 64 bits back into a validated header.
    pub fn from_bits(bits: &[u8; 64]) -> Result<Self, PhyError> {
        let mut pos = 0;
        let mut take = |width: usize| -> u32 {
            let mut v = 0u32;
            for i in 0..width {
                v |= u32::from(bits[pos] & 1) << i;
                pos += 1;
            }
            v
        };
        let seed = take(7) as u8;
        let mcs = take(5) as u8;
        let length = take(18);
        let packet_type = take(1) != 0;
        let training = take(5) as u8;
        let bt = take(1) != 0;
        Self::new(seed, mcs, length, packet_type, training, bt)
    }
}

const LH: usize = 64;

/// Runs the five-step header pipeline, returning the 448 coded bits.
pub fn encode_header(
    header: &PlcpHeader,
    code: &dyn SystematicCode,
) -> Result<Vec<u8>, PhyError> {
    require_header_code(code)?;

    // step 1: scramble from the eighth bit
    let mut d1s = header.to_bits();
    Scrambler::new(header.scrambler_seed()).scramble_from(&mut d1s, 7);

    // step 2: zero-extend to the 504 info bits, generate 168 parity bits
    let mut info = vec![0u8; code.info_bits()];
    info[..LH].copy_from_slice(&d1s);
    let parity = code.parity(&info);
    let mut cw = info;
    cw.extend(parity);

    // step 3: cs1 keeps the header bits plus parity 1..=160
    let mut cs1 = Vec::with_capacity(224);
    cs1.extend_from_slice(&cw[..LH]);
    cs1.extend_from_slice(&cw[504..664]);

    // step 4: cs2 keeps parity 1..=152 and 161..=168, masked with the
    // all-ones PN stream
    let mut cs2 = Vec::with_capacity(224);
    cs2.extend_from_slice(&cw[..LH]);
    cs2.extend_from_slice(&cw[504..656]);
    cs2.extend_from_slice(&cw[664..672]);
    let mut pn = Scrambler::new(ALL_ONES_SEED);
    for b in cs2.iter_mut() {
        *b ^= pn.next_bit();
    }

    // step 5: ship both halves
    cs1.extend(cs2);
    debug_assert_eq!(cs1.len(), 448);
    Ok(cs1)
}
