//! Systematic block coding behind the encoders.
//!
//! The framing pipelines only need three things from a code: its dimensions,
//! a parity generator, and a parity check. They are factored behind
//! [`SystematicCode`] so the production parity-check matrices can be dropped
//! in without touching the pipelines. The crate ships [`SurrogateCode`], a
//! deliberately simple stand-in with the right dimensions (n = 672,
//! k = 672 * R): parity bit `j` accumulates info bits whose stride-5 residue
//! is `j`, then a prefix XOR chain mixes positions. The stride is coprime to
//! every parity length in use (336, 252, 168, 126), so each parity bit is
//! position-sensitive — structural encoder bugs shift the output.

use super::mcs::CodeRate;
use super::PhyError;

/// A systematic (n, k) binary block code over 0/1 bits.
pub trait SystematicCode {
    /// Total codeword length n.
    fn codeword_bits(&self) -> usize;
    /// Info bits k; the codeword is `info || parity`.
    fn info_bits(&self) -> usize;
    fn rate(&self) -> CodeRate;
    /// Computes the n-k parity bits for `info` (`info.len() == k`).
    fn parity(&self, info: &[u8]) -> Vec<u8>;
    /// True when `codeword` satisfies every check equation.
    fn check(&self, codeword: &[u8]) -> bool {
        let k = self.info_bits();
        codeword.len() == self.codeword_bits() && self.parity(&codeword[..k]) == codeword[k..]
    }
}

/// Stand-in systematic code with production dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurrogateCode {
    rate: CodeRate,
}

impl SurrogateCode {
    pub fn new(rate: CodeRate) -> Self {
        SurrogateCode { rate }
    }

    /// The rate-3/4 code the header pipeline requires.
    pub fn header_code() -> Self {
        SurrogateCode::new(CodeRate::R3_4)
    }
}

impl SystematicCode for SurrogateCode {
    fn codeword_bits(&self) -> usize {
        672
    }

    fn info_bits(&self) -> usize {
        self.rate.info_bits() as usize
    }

    fn rate(&self) -> CodeRate {
        self.rate
    }

    fn parity(&self, info: &[u8]) -> Vec<u8> {
        assert_eq!(info.len(), self.info_bits());
        let npar = self.codeword_bits() - self.info_bits();
        let mut p = vec![0u8; npar];
        for (i, &b) in info.iter().enumerate() {
            p[(5 * i) % npar] ^= b & 1;
        }
        for j in 1..npar {
            p[j] ^= p[j - 1];
        }
        p
    }
}

/// Ensures `code` is the rate-3/4, n = 672 definition the header needs.
pub fn require_header_code(code: &dyn SystematicCode) -> Result<(), PhyError> {
    if code.codeword_bits() != 672 || code.rate() != CodeRate::R3_4 {
        return Err(PhyError::WrongCode {
            need_num: 3,
            need_den: 4,
            need_n: 672,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_per_rate() {
        let cases = [
            (CodeRate::R1_2, 336),
            (CodeRate::R5_8, 420),
            (CodeRate::R3_4, 504),
            (CodeRate::R13_16, 546),
        ];
        for (rate, k) in cases {
            let c = SurrogateCode::new(rate);
            assert_eq!(c.codeword_bits(), 672);
            assert_eq!(c.info_bits(), k);
        }
    }

    #[test]
    fn parity_is_linear() {
        // parity(a XOR b) == parity(a) XOR parity(b) for a valid linear code
        let c = SurrogateCode::new(CodeRate::R1_2);
        let a: Vec<u8> = (0..336).map(|i| ((i * 13) % 5 == 0) as u8).collect();
        let b: Vec<u8> = (0..336).map(|i| ((i * 7) % 3 == 0) as u8).collect();
        let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let pa = c.parity(&a);
        let pb = c.parity(&b);
        let pxor: Vec<u8> = pa.iter().zip(&pb).map(|(x, y)| x ^ y).collect();
        assert_eq!(c.parity(&xor), pxor);
    }

    #[test]
    fn parity_is_position_sensitive() {
        let c = SurrogateCode::new(CodeRate::R3_4);
        let mut a = vec![0u8; 504];
        a[10] = 1;
        let mut b = vec![0u8; 504];
        b[11] = 1;
        assert_ne!(c.parity(&a), c.parity(&b));
    }

    #[test]
    fn check_accepts_encodes_and_rejects_flips() {
        let c = SurrogateCode::new(CodeRate::R13_16);
        let info: Vec<u8> = (0..546).map(|i| ((i * 31) % 7 < 3) as u8).collect();
        let mut cw = info.clone();
        cw.extend(c.parity(&info));
        assert!(c.check(&cw));
        for flip in [0usize, 545, 546, 671] {
            let mut bad = cw.clone();
            bad[flip] ^= 1;
            assert!(!c.check(&bad), "flip at {flip} must break the check");
        }
        assert!(!c.check(&cw[..671]));
    }

    #[test]
    fn header_code_requirement() {
        assert!(require_header_code(&SurrogateCode::header_code()).is_ok());
        assert!(require_header_code(&SurrogateCode::new(CodeRate::R1_2)).is_err());
    }
}
