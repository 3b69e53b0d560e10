//! Complementary (Golay) sequence pairs and the preamble fields built from
//! them.
//!
//! A pair is grown by the standard two-branch recursion: starting from unit
//! impulses, stage `k` combines the previous pair through a weight `W_k` and a
//! delay `D_k`:
//!
//! ```text
//! a_k(n) = W_k * a_{k-1}(n) + b_{k-1}(n - D_k)
//! b_k(n) = W_k * a_{k-1}(n) - b_{k-1}(n - D_k)
//! ```
//!
//! When the delays are distinct powers of two covering every shift below the
//! final length, the two branches stay binary (+-1) and their aperiodic
//! autocorrelations cancel everywhere except lag zero, where they add to
//! `2 * len`. That cancellation is what makes the sequences usable as packet
//! preambles: a bank of two correlators gives a clean single-peak timing
//! estimate.

use std::fmt;
use thiserror::Error;

/// One transmitted chip, always +1 or -1 for a valid configuration.
pub type Chip = i8;

#[derive(Debug, Error, PartialEq)]
pub enum GolayError {
    #[error("delay/weight lists differ in length ({delays} vs {weights})")]
    LengthMismatch { delays: usize, weights: usize },
    #[error("weight at stage {0} is {1}; must be +1 or -1")]
    BadWeight(usize, i8),
    #[error("delay at stage {0} is {1}; must be a power of two")]
    BadDelay(usize, usize),
    #[error("delays {0:?} do not cover every shift: must be a permutation of 1,2,4,..,2^(m-1)")]
    IncompleteDelays(Vec<usize>),
    #[error("code definition: {0}")]
    Parse(String),
}

/// A complementary pair of binary sequences of length `2^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GolayPair {
    a: Vec<Chip>,
    b: Vec<Chip>,
    delays: Vec<usize>,
    weights: Vec<Chip>,
}

impl GolayPair {
    /// Runs the recursion for the given per-stage delays and weights.
    ///
    /// The delays must be distinct powers of two whose sum is `2^m - 1`
    /// (i.e. a permutation of 1, 2, 4, .., 2^(m-1)); that is exactly the
    /// condition under which every output chip lands on +-1.
    pub fn generate(delays: &[usize], weights: &[Chip]) -> Result<Self, GolayError> {
        if delays.len() != weights.len() {
            return Err(GolayError::LengthMismatch {
                delays: delays.len(),
                weights: weights.len(),
            });
        }
        for (k, &w) in weights.iter().enumerate() {
            if w != 1 && w != -1 {
                return Err(GolayError::BadWeight(k, w));
            }
        }
        let m = delays.len();
        let len = 1usize << m;
        let mut seen = vec![false; m];
        for (k, &d) in delays.iter().enumerate() {
            if !d.is_power_of_two() {
                return Err(GolayError::BadDelay(k, d));
            }
            let bit = d.trailing_zeros() as usize;
            if bit >= m || seen[bit] {
                return Err(GolayError::IncompleteDelays(delays.to_vec()));
            }
            seen[bit] = true;
        }

        let mut a = vec![0i32; len];
        let mut b = vec![0i32; len];
        a[0] = 1;
        b[0] = 1;
        for (&d, &w) in delays.iter().zip(weights) {
            let w = i32::from(w);
            let mut na = vec![0i32; len];
            let mut nb = vec![0i32; len];
            for n in 0..len {
                let shifted = if n >= d { b[n - d] } else { 0 };
                na[n] = w * a[n] + shifted;
                nb[n] = w * a[n] - shifted;
            }
            a = na;
            b = nb;
        }
        debug_assert!(a.iter().chain(&b).all(|&c| c == 1 || c == -1));
        Ok(GolayPair {
            a: a.into_iter().map(|c| c as Chip).collect(),
            b: b.into_iter().map(|c| c as Chip).collect(),
            delays: delays.to_vec(),
            weights: weights.to_vec(),
        })
    }

    /// The shipped 128-chip configuration: delays 64,32,16,8,4,2,1 with all
    /// weights +1.
    pub fn default_128() -> Self {
        Self::generate(&[64, 32, 16, 8, 4, 2, 1], &[1, 1, 1, 1, 1, 1, 1])
            .expect("default configuration is valid")
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn seq_a(&self) -> &[Chip] {
        &self.a
    }

    pub fn seq_b(&self) -> &[Chip] {
        &self.b
    }

    pub fn delays(&self) -> &[usize] {
        &self.delays
    }

    pub fn weights(&self) -> &[Chip] {
        &self.weights
    }

    /// Sum of the two aperiodic autocorrelations at every non-negative lag.
    ///
    /// For a valid pair this is `[2*len, 0, 0, ..]`.
    pub fn autocorr_sum(&self) -> Vec<i64> {
        let n = self.len();
        (0..n)
            .map(|lag| {
                let mut acc = 0i64;
                for i in 0..n - lag {
                    acc += i64::from(self.a[i]) * i64::from(self.a[i + lag]);
                    acc += i64::from(self.b[i]) * i64::from(self.b[i + lag]);
                }
                acc
            })
            .collect()
    }
}

/// What a block of preamble samples is for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// Short training field: detection, AGC, coarse sync.
    Stf,
    /// Channel estimation field.
    Cef,
}

/// A fully composed preamble field, as transmitted chips.
#[derive(Debug, Clone, PartialEq)]
pub struct PreambleField {
    pub kind: FieldKind,
    pub samples: Vec<Chip>,
}

impl PreambleField {
    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }
}

fn signed(seq: &[Chip], sign: i8) -> impl Iterator<Item = Chip> + '_ {
    seq.iter().map(move |&c| c * sign)
}

/// 512-chip channel-estimation block `[-b, -a, +b, +a]`.
pub fn compose_gu512(pair: &GolayPair) -> Vec<Chip> {
    let mut out = Vec::with_capacity(4 * pair.len());
    out.extend(signed(pair.seq_b(), -1));
    out.extend(signed(pair.seq_a(), -1));
    out.extend(signed(pair.seq_b(), 1));
    out.extend(signed(pair.seq_a(), 1));
    out
}

/// 512-chip channel-estimation block `[-b, +a, -b, -a]`.
pub fn compose_gv512(pair: &GolayPair) -> Vec<Chip> {
    let mut out = Vec::with_capacity(4 * pair.len());
    out.extend(signed(pair.seq_b(), -1));
    out.extend(signed(pair.seq_a(), 1));
    out.extend(signed(pair.seq_b(), -1));
    out.extend(signed(pair.seq_a(), -1));
    out
}

/// Control-packet STF: 48 repetitions of `b` followed by one `-b`
/// (6272 chips for the 128-chip pair).
pub fn build_control_stf(pair: &GolayPair) -> PreambleField {
    let mut samples = Vec::with_capacity(49 * pair.len());
    for _ in 0..48 {
        samples.extend_from_slice(pair.seq_b());
    }
    samples.extend(signed(pair.seq_b(), -1));
    PreambleField {
        kind: FieldKind::Stf,
        samples,
    }
}

/// Data-packet STF: 16 repetitions of `a` followed by one `-a`
/// (2176 chips for the 128-chip pair).
pub fn build_data_stf(pair: &GolayPair) -> PreambleField {
    let mut samples = Vec::with_capacity(17 * pair.len());
    for _ in 0..16 {
        samples.extend_from_slice(pair.seq_a());
    }
    samples.extend(signed(pair.seq_a(), -1));
    PreambleField {
        kind: FieldKind::Stf,
        samples,
    }
}

/// Which quarter of the `Gv512` block provides the trailing short block of
/// the CEF. The shipped default is the final quarter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CefTailBlock(pub usize);

impl Default for CefTailBlock {
    fn default() -> Self {
        CefTailBlock(3)
    }
}

/// Channel-estimation field: `Gu512 || Gv512 || Gv128` where `Gv128` is one
/// quarter of `Gv512` (1152 chips, nine 128-chip blocks, for the default
/// pair).
pub fn build_cef(pair: &GolayPair) -> PreambleField {
    build_cef_with_tail(pair, CefTailBlock::default())
}

pub fn build_cef_with_tail(pair: &GolayPair, tail: CefTailBlock) -> PreambleField {
    let gu = compose_gu512(pair);
    let gv = compose_gv512(pair);
    let n = pair.len();
    let block = tail.0.min(3);
    let tail_chips = &gv[block * n..(block + 1) * n];
    let mut samples = Vec::with_capacity(gu.len() + gv.len() + n);
    samples.extend_from_slice(&gu);
    samples.extend_from_slice(&gv);
    samples.extend_from_slice(tail_chips);
    PreambleField {
        kind: FieldKind::Cef,
        samples,
    }
}

/// A parsed code-definition file: `delays=` and `weights=` lines, `#`
/// comments and blank lines ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeDefinition {
    pub delays: Vec<usize>,
    pub weights: Vec<Chip>,
}

impl CodeDefinition {
    pub fn parse(text: &str) -> Result<Self, GolayError> {
        let mut delays = None;
        let mut weights = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GolayError::Parse(format!("line {}: missing '='", lineno + 1)))?;
            match key.trim() {
                "delays" => {
                    let parsed: Result<Vec<usize>, _> = value
                        .split(',')
                        .map(|tok| tok.trim().parse::<usize>())
                        .collect();
                    delays = Some(parsed.map_err(|e| {
                        GolayError::Parse(format!("line {}: bad delay: {e}", lineno + 1))
                    })?);
                }
                "weights" => {
                    let mut ws = Vec::new();
                    for tok in value.split(',') {
                        ws.push(match tok.trim() {
                            "+1" | "1" => 1,
                            "-1" => -1,
                            other => {
                                return Err(GolayError::Parse(format!(
                                    "line {}: weight {other:?} is not +1/-1",
                                    lineno + 1
                                )))
                            }
                        });
                    }
                    weights = Some(ws);
                }
                other => {
                    return Err(GolayError::Parse(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )))
                }
            }
        }
        match (delays, weights) {
            (Some(delays), Some(weights)) => Ok(CodeDefinition { delays, weights }),
            _ => Err(GolayError::Parse(
                "need both a delays= and a weights= line".into(),
            )),
        }
    }

    pub fn build(&self) -> Result<GolayPair, GolayError> {
        GolayPair::generate(&self.delays, &self.weights)
    }
}

impl fmt::Display for CodeDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let delays: Vec<String> = self.delays.iter().map(|d| d.to_string()).collect();
        let weights: Vec<String> = self
            .weights
            .iter()
            .map(|w| if *w > 0 { "+1".into() } else { "-1".to_string() })
            .collect();
        writeln!(f, "delays={}", delays.join(","))?;
        writeln!(f, "weights={}", weights.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stage_pair_is_unit_impulse() {
        let p = GolayPair::generate(&[], &[]).unwrap();
        assert_eq!(p.seq_a(), &[1]);
        assert_eq!(p.seq_b(), &[1]);
        assert_eq!(p.autocorr_sum(), vec![2]);
    }

    #[test]
    fn one_stage_pair_by_hand() {
        // a1 = [1, 1], b1 = [1, -1]; r(0) = 2 + 2, r(1) = 1 - 1.
        let p = GolayPair::generate(&[1], &[1]).unwrap();
        assert_eq!(p.seq_a(), &[1, 1]);
        assert_eq!(p.seq_b(), &[1, -1]);
        assert_eq!(p.autocorr_sum(), vec![4, 0]);
    }

    #[test]
    fn default_128_is_complementary() {
        let p = GolayPair::default_128();
        assert_eq!(p.len(), 128);
        let r = p.autocorr_sum();
        assert_eq!(r[0], 256);
        assert!(r[1..].iter().all(|&v| v == 0), "sidelobes must cancel");
    }

    #[test]
    fn every_delay_permutation_stays_binary() {
        // A couple of non-default orders and sign mixes.
        let cases: [(&[usize], &[Chip]); 3] = [
            (&[1, 2, 4, 8, 16, 32, 64], &[1, -1, 1, -1, 1, -1, 1]),
            (&[4, 1, 2], &[-1, -1, -1]),
            (&[2, 8, 1, 4], &[1, 1, -1, 1]),
        ];
        for (delays, weights) in cases {
            let p = GolayPair::generate(delays, weights).unwrap();
            let r = p.autocorr_sum();
            assert_eq!(r[0] as usize, 2 * p.len());
            assert!(r[1..].iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        assert!(matches!(
            GolayPair::generate(&[1, 2], &[1]),
            Err(GolayError::LengthMismatch { .. })
        ));
        assert!(matches!(
            GolayPair::generate(&[1], &[2]),
            Err(GolayError::BadWeight(0, 2))
        ));
        assert!(matches!(
            GolayPair::generate(&[3], &[1]),
            Err(GolayError::BadDelay(0, 3))
        ));
        // 1 appears twice: shift coverage broken.
        assert!(matches!(
            GolayPair::generate(&[1, 1], &[1, 1]),
            Err(GolayError::IncompleteDelays(_))
        ));
        // 4 out of range for m=2.
        assert!(matches!(
            GolayPair::generate(&[1, 4], &[1, 1]),
            Err(GolayError::IncompleteDelays(_))
        ));
    }

    #[test]
    fn control_stf_shape() {
        let p = GolayPair::default_128();
        let stf = build_control_stf(&p);
        assert_eq!(stf.sample_count(), 6272); // 49 blocks of 128
        assert_eq!(&stf.samples[..128], p.seq_b());
        let last = &stf.samples[48 * 128..];
        let negated: Vec<Chip> = p.seq_b().iter().map(|&c| -c).collect();
        assert_eq!(last, &negated[..]);
    }

    #[test]
    fn data_stf_shape() {
        let p = GolayPair::default_128();
        let stf = build_data_stf(&p);
        assert_eq!(stf.sample_count(), 2176); // 17 blocks of 128
        assert_eq!(&stf.samples[..128], p.seq_a());
        let negated: Vec<Chip> = p.seq_a().iter().map(|&c| -c).collect();
        assert_eq!(&stf.samples[16 * 128..], &negated[..]);
    }

    #[test]
    fn cef_shape_and_tail() {
        let p = GolayPair::default_128();
        let cef = build_cef(&p);
        assert_eq!(cef.sample_count(), 1152); // nine 128-chip blocks
        let gu = compose_gu512(&p);
        let gv = compose_gv512(&p);
        assert_eq!(&cef.samples[..512], &gu[..]);
        assert_eq!(&cef.samples[512..1024], &gv[..]);
        // default tail = final quarter of Gv512 = -a
        let neg_a: Vec<Chip> = p.seq_a().iter().map(|&c| -c).collect();
        assert_eq!(&cef.samples[1024..], &neg_a[..]);
        // alternate tail choice picks a different quarter
        let alt = build_cef_with_tail(&p, CefTailBlock(0));
        let neg_b: Vec<Chip> = p.seq_b().iter().map(|&c| -c).collect();
        assert_eq!(&alt.samples[1024..], &neg_b[..]);
    }

    #[test]
    fn block_sign_patterns() {
        let p = GolayPair::default_128();
        let gu = compose_gu512(&p);
        let gv = compose_gv512(&p);
        let quarters = |s: &[Chip]| -> Vec<Vec<Chip>> {
            s.chunks(128).map(|c| c.to_vec()).collect()
        };
        let neg = |s: &[Chip]| -> Vec<Chip> { s.iter().map(|&c| -c).collect() };
        let (a, b) = (p.seq_a().to_vec(), p.seq_b().to_vec());
        assert_eq!(quarters(&gu), vec![neg(&b), neg(&a), b.clone(), a.clone()]);
        assert_eq!(quarters(&gv), vec![neg(&b), a.clone(), neg(&b), neg(&a)]);
    }

    #[test]
    fn code_definition_round_trip() {
        let text = "# shipped default\ndelays=64,32,16,8,4,2,1\nweights=+1,+1,+1,+1,+1,+1,+1\n";
        let def = CodeDefinition::parse(text).unwrap();
        assert_eq!(def.build().unwrap(), GolayPair::default_128());
        let reparsed = CodeDefinition::parse(&def.to_string()).unwrap();
        assert_eq!(reparsed, def);
    }

    #[test]
    fn code_definition_errors() {
        assert!(CodeDefinition::parse("delays=1,2\n").is_err());
        assert!(CodeDefinition::parse("delays=x\nweights=+1\n").is_err());
        assert!(CodeDefinition::parse("delays=1\nweights=+2\n").is_err());
        assert!(CodeDefinition::parse("mystery=1\n").is_err());
    }
}
