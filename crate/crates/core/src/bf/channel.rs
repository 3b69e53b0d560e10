//! The directional channel abstraction every sweep protocol trains against:
//! a dense gain table indexed by (transmit antenna, transmit sector, receive
//! antenna, receive sector) for the initiator-to-responder direction.
//!
//! The reverse direction is taken as the transpose (antenna reciprocity), so
//! one table describes both links. Quasi-omni reception on an antenna is
//! modeled as the best directional gain available on that antenna minus a
//! fixed penalty — a listening pattern that covers the antenna's whole field
//! of view cannot beat its best pencil beam, and the penalty is the price of
//! the wide pattern.

use super::BfError;
use rand::Rng;
use std::fmt::Write as _;

/// Hard ceilings on array geometry.
pub const MAX_ANTENNAS: usize = 4;
pub const MAX_TOTAL_SECTORS: usize = 128;
/// Shipped quasi-omni penalty, dB.
pub const DEFAULT_QUASI_OMNI_PENALTY_DB: f64 = 10.0;

/// A directional configuration: one sector of one antenna. Ordered by
/// (antenna, sector), which is the tie-break order every argmax uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SectorId {
    pub antenna: u8,
    pub sector: u8,
}

impl SectorId {
    pub fn new(antenna: u8, sector: u8) -> Self {
        SectorId { antenna, sector }
    }
}

fn validate_side(side: &'static str, sectors_per_antenna: &[u8]) -> Result<(), BfError> {
    if sectors_per_antenna.is_empty() || sectors_per_antenna.len() > MAX_ANTENNAS {
        return Err(BfError::BadAntennaConfig(format!(
            "{side}: need 1..={MAX_ANTENNAS} antennas, got {}",
            sectors_per_antenna.len()
        )));
    }
    if sectors_per_antenna.iter().any(|&s| s == 0) {
        return Err(BfError::BadAntennaConfig(format!(
            "{side}: every antenna needs at least one sector"
        )));
    }
    let total: usize = sectors_per_antenna.iter().map(|&s| s as usize).sum();
    if total > MAX_TOTAL_SECTORS {
        return Err(BfError::BadAntennaConfig(format!(
            "{side}: {total} sectors exceed the {MAX_TOTAL_SECTORS}-sector limit"
        )));
    }
    Ok(())
}

fn flatten(sectors_per_antenna: &[u8]) -> Vec<SectorId> {
    sectors_per_antenna
        .iter()
        .enumerate()
        .flat_map(|(a, &n)| (0..n).map(move |s| SectorId::new(a as u8, s)))
        .collect()
}

/// Gain table between one transmitter and one receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorChannel {
    tx_sectors_per_antenna: Vec<u8>,
    rx_sectors_per_antenna: Vec<u8>,
    tx_ids: Vec<SectorId>,
    rx_ids: Vec<SectorId>,
    /// Row-major [tx][rx], dB. Unset entries are -inf.
    gains_db: Vec<f64>,
    pub quasi_omni_penalty_db: f64,
}

impl SectorChannel {
    pub fn new(
        tx_sectors_per_antenna: &[u8],
        rx_sectors_per_antenna: &[u8],
    ) -> Result<Self, BfError> {
        validate_side("tx", tx_sectors_per_antenna)?;
        validate_side("rx", rx_sectors_per_antenna)?;
        let tx_ids = flatten(tx_sectors_per_antenna);
        let rx_ids = flatten(rx_sectors_per_antenna);
        let gains_db = vec![f64::NEG_INFINITY; tx_ids.len() * rx_ids.len()];
        Ok(SectorChannel {
            tx_sectors_per_antenna: tx_sectors_per_antenna.to_vec(),
            rx_sectors_per_antenna: rx_sectors_per_antenna.to_vec(),
            tx_ids,
            rx_ids,
            gains_db,
            quasi_omni_penalty_db: DEFAULT_QUASI_OMNI_PENALTY_DB,
        })
    }

    pub fn tx_sector_ids(&self) -> &[SectorId] {
        &self.tx_ids
    }

    pub fn rx_sector_ids(&self) -> &[SectorId] {
        &self.rx_ids
    }

    pub fn tx_antenna_count(&self) -> usize {
        self.tx_sectors_per_antenna.len()
    }

    pub fn rx_antenna_count(&self) -> usize {
        self.rx_sectors_per_antenna.len()
    }

    pub fn rx_sectors_of(&self, antenna: u8) -> impl Iterator<Item = SectorId> + '_ {
        let count = self
            .rx_sectors_per_antenna
            .get(antenna as usize)
            .copied()
            .unwrap_or(0);
        (0..count).map(move |s| SectorId::new(antenna, s))
    }

    fn tx_index(&self, id: SectorId) -> Result<usize, BfError> {
        sector_index(&self.tx_sectors_per_antenna, id).ok_or(BfError::NoSuchSector {
            side: "tx",
            antenna: id.antenna,
            sector: id.sector,
        })
    }

    fn rx_index(&self, id: SectorId) -> Result<usize, BfError> {
        sector_index(&self.rx_sectors_per_antenna, id).ok_or(BfError::NoSuchSector {
            side: "rx",
            antenna: id.antenna,
            sector: id.sector,
        })
    }

    pub fn set_gain(&mut self, tx: SectorId, rx: SectorId, db: f64) -> Result<(), BfError> {
        let t = self.tx_index(tx)?;
        let r = self.rx_index(rx)?;
        let cols = self.rx_ids.len();
        self.gains_db[t * cols + r] = db;
        Ok(())
    }

    /// Directional gain from initiator sector `tx` to responder sector `rx`.
    pub fn gain_db(&self, tx: SectorId, rx: SectorId) -> Result<f64, BfError> {
        let t = self.tx_index(tx)?;
        let r = self.rx_index(rx)?;
        Ok(self.gains_db[t * cols(self) + r])
    }

    /// Gain when the responder listens quasi-omni on `rx_antenna` while the
    /// initiator transmits through `tx`.
    pub fn gain_to_quasi_omni_db(&self, tx: SectorId, rx_antenna: u8) -> Result<f64, BfError> {
        self.tx_index(tx)?;
        let mut best = f64::NEG_INFINITY;
        for rx in self.rx_sectors_of(rx_antenna) {
            best = best.max(self.gain_db(tx, rx)?);
        }
        Ok(best - self.quasi_omni_penalty_db)
    }

    /// Gain when the responder transmits through its sector `rx` (reverse
    /// link, reciprocity) and the initiator listens quasi-omni on
    /// `tx_antenna`.
    pub fn gain_from_quasi_omni_db(&self, tx_antenna: u8, rx: SectorId) -> Result<f64, BfError> {
        self.rx_index(rx)?;
        let mut best = f64::NEG_INFINITY;
        let count = self
            .tx_sectors_per_antenna
            .get(tx_antenna as usize)
            .copied()
            .unwrap_or(0);
        for s in 0..count {
            best = best.max(self.gain_db(SectorId::new(tx_antenna, s), rx)?);
        }
        Ok(best - self.quasi_omni_penalty_db)
    }

    /// Exhaustive argmax over the full table with the canonical tie-break:
    /// higher gain first, then lower tx id, then lower rx id.
    pub fn best_pair(&self) -> (SectorId, SectorId, f64) {
        let mut best = (self.tx_ids[0], self.rx_ids[0], f64::NEG_INFINITY);
        for &tx in &self.tx_ids {
            for &rx in &self.rx_ids {
                let g = self.gain_db(tx, rx).expect("ids come from the table");
                if g > best.2 {
                    best = (tx, rx, g);
                }
            }
        }
        best
    }

    /// Serialized form: one `tx_antenna,tx_sector,rx_antenna,rx_sector,gain`
    /// row per entry, preceded by a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tx_antenna,tx_sector,rx_antenna,rx_sector,gain_db\n");
        for &tx in &self.tx_ids {
            for &rx in &self.rx_ids {
                let g = self.gain_db(tx, rx).unwrap();
                if g.is_finite() {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{}",
                        tx.antenna, tx.sector, rx.antenna, rx.sector, g
                    );
                }
            }
        }
        out
    }

    /// Parses the CSV form; the geometry is inferred from the largest
    /// antenna/sector indices present.
    pub fn parse_csv(text: &str) -> Result<Self, BfError> {
        let mut rows = Vec::new();
        let mut tx_max: Vec<u8> = Vec::new();
        let mut rx_max: Vec<u8> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 && line.starts_with("tx_antenna") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(BfError::Parse(format!(
                    "line {}: expected 5 fields, got {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse_u8 = |s: &str, what: &str| -> Result<u8, BfError> {
                s.parse::<u8>()
                    .map_err(|e| BfError::Parse(format!("line {}: {what}: {e}", lineno + 1)))
            };
            let ta = parse_u8(fields[0], "tx antenna")?;
            let ts = parse_u8(fields[1], "tx sector")?;
            let ra = parse_u8(fields[2], "rx antenna")?;
            let rs = parse_u8(fields[3], "rx sector")?;
            let g: f64 = fields[4]
                .parse()
                .map_err(|e| BfError::Parse(format!("line {}: gain: {e}", lineno + 1)))?;
            grow(&mut tx_max, ta, ts);
            grow(&mut rx_max, ra, rs);
            rows.push((SectorId::new(ta, ts), SectorId::new(ra, rs), g));
        }
        if rows.is_empty() {
            return Err(BfError::Parse("no gain rows".into()));
        }
        let mut ch = SectorChannel::new(&tx_max, &rx_max)?;
        for (tx, rx, g) in rows {
            ch.set_gain(tx, rx, g)?;
        }
        Ok(ch)
    }

    /// A fully populated random channel for exercising the sweep protocols.
    /// Gains are drawn uniformly in [-40, 40) dB; when `quantize` is set
    /// they snap to 0.5 dB steps so exact ties occur and tie-breaking is
    /// actually exercised.
    pub fn random(
        tx_sectors_per_antenna: &[u8],
        rx_sectors_per_antenna: &[u8],
        quantize: bool,
        rng: &mut impl Rng,
    ) -> Result<Self, BfError> {
        let mut ch = SectorChannel::new(tx_sectors_per_antenna, rx_sectors_per_antenna)?;
        let txs = ch.tx_ids.clone();
        let rxs = ch.rx_ids.clone();
        for tx in txs {
            for &rx in &rxs {
                let mut g: f64 = rng.gen_range(-40.0..40.0);
                if quantize {
                    g = (g * 2.0).round() / 2.0;
                }
                ch.set_gain(tx, rx, g)?;
            }
        }
        Ok(ch)
    }
}

fn cols(ch: &SectorChannel) -> usize {
    ch.rx_ids.len()
}

fn sector_index(sectors_per_antenna: &[u8], id: SectorId) -> Option<usize> {
    let per = *sectors_per_antenna.get(id.antenna as usize)?;
    if id.sector >= per {
        return None;
    }
    let before: usize = sectors_per_antenna[..id.antenna as usize]
        .iter()
        .map(|&s| s as usize)
        .sum();
    Some(before + id.sector as usize)
}

fn grow(maxima: &mut Vec<u8>, antenna: u8, sector: u8) {
    if maxima.len() <= antenna as usize {
        maxima.resize(antenna as usize + 1, 1);
    }
    maxima[antenna as usize] = maxima[antenna as usize].max(sector + 1);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn geometry_limits() {
        assert!(SectorChannel::new(&[4, 4], &[8]).is_ok());
        assert!(SectorChannel::new(&[], &[8]).is_err());
        assert!(SectorChannel::new(&[1, 1, 1, 1, 1], &[8]).is_err());
        assert!(SectorChannel::new(&[0], &[8]).is_err());
        assert!(SectorChannel::new(&[64, 64, 1], &[8]).is_err()); // 129 total
        assert!(SectorChannel::new(&[64, 64], &[32, 32, 32, 32]).is_ok()); // 128 each
    }

    #[test]
    fn gains_and_missing_entries() {
        let mut ch = SectorChannel::new(&[2], &[2]).unwrap();
        ch.set_gain(SectorId::new(0, 0), SectorId::new(0, 1), 12.5)
            .unwrap();
        assert_eq!(
            ch.gain_db(SectorId::new(0, 0), SectorId::new(0, 1)).unwrap(),
            12.5
        );
        assert_eq!(
            ch.gain_db(SectorId::new(0, 0), SectorId::new(0, 0)).unwrap(),
            f64::NEG_INFINITY
        );
        assert!(ch.set_gain(SectorId::new(1, 0), SectorId::new(0, 0), 0.0).is_err());
        assert!(ch.gain_db(SectorId::new(0, 2), SectorId::new(0, 0)).is_err());
    }

    #[test]
    fn quasi_omni_is_best_minus_penalty() {
        let mut ch = SectorChannel::new(&[2], &[1, 2]).unwrap();
        ch.quasi_omni_penalty_db = 10.0;
        let tx = SectorId::new(0, 0);
        ch.set_gain(tx, SectorId::new(1, 0), 20.0).unwrap();
        ch.set_gain(tx, SectorId::new(1, 1), 31.0).unwrap();
        ch.set_gain(tx, SectorId::new(0, 0), 5.0).unwrap();
        assert_eq!(ch.gain_to_quasi_omni_db(tx, 1).unwrap(), 21.0);
        assert_eq!(ch.gain_to_quasi_omni_db(tx, 0).unwrap(), -5.0);
    }

    #[test]
    fn reverse_quasi_omni_reads_the_transpose() {
        let mut ch = SectorChannel::new(&[2], &[1]).unwrap();
        ch.quasi_omni_penalty_db = 10.0;
        let rx = SectorId::new(0, 0);
        ch.set_gain(SectorId::new(0, 0), rx, 7.0).unwrap();
        ch.set_gain(SectorId::new(0, 1), rx, 15.0).unwrap();
        assert_eq!(ch.gain_from_quasi_omni_db(0, rx).unwrap(), 5.0);
    }

    #[test]
    fn best_pair_tie_breaks_to_lowest_ids() {
        let mut ch = SectorChannel::new(&[1, 1], &[2]).unwrap();
        for tx in 0..2 {
            for rx in 0..2 {
                ch.set_gain(SectorId::new(tx, 0), SectorId::new(0, rx), 30.0)
                    .unwrap();
            }
        }
        let (tx, rx, g) = ch.best_pair();
        assert_eq!((tx, rx, g), (SectorId::new(0, 0), SectorId::new(0, 0), 30.0));
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = StdRng::seed_from_u64(5);
        let ch = SectorChannel::random(&[2, 3], &[4], false, &mut rng).unwrap();
        let parsed = SectorChannel::parse_csv(&ch.to_csv()).unwrap();
        assert_eq!(parsed.tx_sector_ids(), ch.tx_sector_ids());
        assert_eq!(parsed.rx_sector_ids(), ch.rx_sector_ids());
        for &tx in ch.tx_sector_ids() {
            for &rx in ch.rx_sector_ids() {
                assert_eq!(parsed.gain_db(tx, rx).unwrap(), ch.gain_db(tx, rx).unwrap());
            }
        }
    }

    #[test]
    fn csv_rejects_malformed_rows() {
        assert!(SectorChannel::parse_csv("").is_err());
        assert!(SectorChannel::parse_csv("0,0,0,0\n").is_err());
        assert!(SectorChannel::parse_csv("0,0,0,0,not_a_number\n").is_err());
    }

    #[test]
    fn random_quantized_channels_produce_ties() {
        let mut rng = StdRng::seed_from_u64(11);
        // 256 entries snapped to 0.5 dB over [-40, 40) can take at most 161
        // distinct values, so a tie is guaranteed, not just likely
        let ch = SectorChannel::random(&[32], &[8], true, &mut rng).unwrap();
        let mut gains: Vec<f64> = Vec::new();
        for &tx in ch.tx_sector_ids() {
            for &rx in ch.rx_sector_ids() {
                let g = ch.gain_db(tx, rx).unwrap();
                assert_eq!(g * 2.0, (g * 2.0).round(), "snapped to half-dB steps");
                gains.push(g);
            }
        }
        gains.sort_by(f64::total_cmp);
        assert!(gains.windows(2).any(|w| w[0] == w[1]), "expect at least one tie");
    }
}
