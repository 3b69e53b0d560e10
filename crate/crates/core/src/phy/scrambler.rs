//! The frame scrambler: a 7-bit Fibonacci LFSR, generator x^7 + x^4 + 1.
//!
//! State is held in the low seven bits of a byte; the output bit is
//! `s6 XOR s3`, the register shifts left and the output becomes the new `s0`.
//! The seed (transmitted in clear in the header) loads the register directly.
//! A non-zero seed walks the full 127-state cycle; seed zero would jam the
//! register at zero, which is why header validation refuses it.

/// Feedback mask for x^7 + x^4 + 1: taps at state bits 6 and 3.
pub const DEFAULT_TAPS: u8 = 0b0100_1000;
/// The all-ones seed used for the header's pseudo-noise mask.
pub const ALL_ONES_SEED: u8 = 0x7F;

#[derive(Debug, Clone)]
pub struct Scrambler {
    state: u8,
    taps: u8,
}

impl Scrambler {
    pub fn new(seed: u8) -> Self {
        Self::with_taps(seed, DEFAULT_TAPS)
    }

    /// Alternate generator polynomials: `taps` selects which state bits feed
    /// the XOR (bit `i` of the mask = state bit `i`).
    pub fn with_taps(seed: u8, taps: u8) -> Self {
        Scrambler {
            state: seed & 0x7F,
            taps: taps & 0x7F,
        }
    }

    pub fn state(&self) -> u8 {
        self.state
    }

    pub fn next_bit(&mut self) -> u8 {
        let out = (self.state & self.taps).count_ones() as u8 & 1;
        self.state = ((self.state << 1) | out) & 0x7F;
        out
    }

    /// XORs the generator output into `bits[start_offset..]`, leaving the
    /// prefix in clear. The prefix consumes no generator output, so a header
    /// whose first seven bits carry the seed scrambles from the eighth bit
    /// with the first generator bit.
    pub fn scramble_from(&mut self, bits: &mut [u8], start_offset: usize) {
        for b in bits.iter_mut().skip(start_offset) {
            *b ^= self.next_bit();
        }
    }

    pub fn scramble(&mut self, bits: &mut [u8]) {
        self.scramble_from(bits, 0);
    }
}
