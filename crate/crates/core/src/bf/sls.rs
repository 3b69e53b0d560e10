//! The sector-level sweep: the coarse acquisition phase that takes two
//! stations from mutual ignorance to a working sector pair.
//!
//! An initiator sweep sends one sweep frame per (own sector, peer antenna)
//! combination while the peer listens quasi-omni; the responder sweep answers
//! the same way in the other direction; a feedback frame then tells the
//! responder which of its sectors won, and the final ack closes the loop.
//! Every sweep frame carries a countdown of the frames remaining in that
//! sweep, so a receiver joining mid-sweep knows exactly how long to keep
//! listening.

use super::channel::{SectorChannel, SectorId};
use super::BfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Train transmit sectors (the peer listens quasi-omni).
    Txss,
    /// Train receive sectors (the peer transmits quasi-omni).
    Rxss,
}

/// Protocol phases in their fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SlsPhase {
    InitiatorSweep,
    ResponderSweep,
    Feedback,
    Ack,
    Done,
}

/// One transmitted frame of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepFrame {
    pub phase: SlsPhase,
    /// Frames still to come in this sweep (0 on the last).
    pub cdown: u32,
    /// Sector the frame is sent through (the swept side's).
    pub sector: SectorId,
    /// Peer antenna listening (or transmitting, in RXSS) quasi-omni.
    pub peer_antenna: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlsOutcome {
    pub mode: SweepMode,
    /// Initiator's winning sector (transmit sector in TXSS, receive in RXSS).
    pub initiator_best: SectorId,
    pub initiator_quality_db: f64,
    /// Responder's winning sector.
    pub responder_best: SectorId,
    pub responder_quality_db: f64,
    pub iss_frames: usize,
    pub rss_frames: usize,
    /// Sweep frames plus feedback plus ack.
    pub total_frames: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlsConfig {
    pub mode: SweepMode,
    /// Minimum sweep quality for a usable link; below it the sweep reports
    /// link failure (nothing would decode even at the lowest rate).
    pub sensitivity_floor_db: Option<f64>,
}

impl Default for SlsConfig {
    fn default() -> Self {
        SlsConfig {
            mode: SweepMode::Txss,
            sensitivity_floor_db: None,
        }
    }
}

/// A completed sweep: the frame-by-frame record and the outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SlsRun {
    pub frames: Vec<SweepFrame>,
    pub outcome: SlsOutcome,
}

struct SweepBest {
    quality: f64,
    sector: SectorId,
    peer_antenna: u8,
}

impl SweepBest {
    fn new() -> Self {
        SweepBest {
            quality: f64::NEG_INFINITY,
            sector: SectorId::new(0, 0),
            peer_antenna: 0,
        }
    }

    fn offer(&mut self, quality: f64, sector: SectorId, peer_antenna: u8) {
        let better = quality > self.quality
            || (quality == self.quality
                && (sector, peer_antenna) < (self.sector, self.peer_antenna));
        if better {
            self.quality = quality;
            self.sector = sector;
            self.peer_antenna = peer_antenna;
        }
    }
}

fn sweep_one_side(
    frames: &mut Vec<SweepFrame>,
    phase: SlsPhase,
    swept: &[SectorId],
    peer_antennas: usize,
    quality: impl Fn(SectorId, u8) -> Result<f64, BfError>,
) -> Result<SweepBest, BfError> {
    let total = swept.len() * peer_antennas;
    let mut best = SweepBest::new();
    let mut remaining = total as u32;
    for peer in 0..peer_antennas as u8 {
        for &sector in swept {
            remaining -= 1;
            frames.push(SweepFrame {
                phase,
                cdown: remaining,
                sector,
                peer_antenna: peer,
            });
            best.offer(quality(sector, peer)?, sector, peer);
        }
    }
    Ok(best)
}

/// Runs a full sweep over `channel` (initiator = the table's transmit side).
pub fn run_sls(channel: &SectorChannel, config: SlsConfig) -> Result<SlsRun, BfError> {
    let mut frames = Vec::new();

    // Initiator sweep: in TXSS the initiator's transmit sectors are swept
    // against the responder's quasi-omni antennas; in RXSS the responder's
    // receive sectors are swept against the initiator's quasi-omni transmit
    // antennas. Either way the "initiator's" result is the sector on the
    // initiator's array in TXSS, on its own array in RXSS too (receive side).
    let (iss_best, rss_best) = match config.mode {
        SweepMode::Txss => {
            let iss = sweep_one_side(
                &mut frames,
                SlsPhase::InitiatorSweep,
                channel.tx_sector_ids(),
                channel.rx_antenna_count(),
                |sector, peer| channel.gain_to_quasi_omni_db(sector, peer),
            )?;
            let rss = sweep_one_side(
                &mut frames,
                SlsPhase::ResponderSweep,
                channel.rx_sector_ids(),
                channel.tx_antenna_count(),
                |sector, peer| channel.gain_from_quasi_omni_db(peer, sector),
            )?;
            (iss, rss)
        }
        SweepMode::Rxss => {
            // train receive sectors: the responder's first, then the
            // initiator's, mirroring who transmits in each phase
            let iss = sweep_one_side(
                &mut frames,
                SlsPhase::InitiatorSweep,
                channel.rx_sector_ids(),
                channel.tx_antenna_count(),
                |sector, peer| channel.gain_from_quasi_omni_db(peer, sector),
            )?;
            let rss = sweep_one_side(
                &mut frames,
                SlsPhase::ResponderSweep,
                channel.tx_sector_ids(),
                channel.rx_antenna_count(),
                |sector, peer| channel.gain_to_quasi_omni_db(sector, peer),
            )?;
            (iss, rss)
        }
    };

    let iss_frames = frames
        .iter()
        .filter(|f| f.phase == SlsPhase::InitiatorSweep)
        .count();
    let rss_frames = frames.len() - iss_frames;

    let (initiator, responder) = match config.mode {
        SweepMode::Txss => (&iss_best, &rss_best),
        // in RXSS the initiator's own receive sector comes from the phase
        // where the responder transmits (the second sweep)
        SweepMode::Rxss => (&rss_best, &iss_best),
    };

    if let Some(floor) = config.sensitivity_floor_db {
        if initiator.quality < floor || responder.quality < floor {
            return Err(BfError::LinkFailure { floor_db: floor });
        }
    }

    frames.push(SweepFrame {
        phase: SlsPhase::Feedback,
        cdown: 0,
        sector: initiator.sector,
        peer_antenna: responder.peer_antenna,
    });
    frames.push(SweepFrame {
        phase: SlsPhase::Ack,
        cdown: 0,
        sector: responder.sector,
        peer_antenna: initiator.peer_antenna,
    });

    let outcome = SlsOutcome {
        mode: config.mode,
        initiator_best: initiator.sector,
        initiator_quality_db: initiator.quality,
        responder_best: responder.sector,
        responder_quality_db: responder.quality,
        iss_frames,
        rss_frames,
        total_frames: frames.len(),
    };
    Ok(SlsRun { frames, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn fixed_channel() -> SectorChannel {
        // 2 tx antennas (2+1 sectors), 1 rx antenna (2 sectors)
        let mut ch = SectorChannel::new(&[2, 1], &[2]).unwrap();
        let entries = [
            ((0, 0), (0, 0), 10.0),
            ((0, 0), (0, 1), 3.0),
            ((0, 1), (0, 0), 18.0),
            ((0, 1), (0, 1), 7.0),
            ((1, 0), (0, 0), 15.0),
            ((1, 0), (0, 1), 22.0),
        ];
        for ((ta, ts), (ra, rs), g) in entries {
            ch.set_gain(SectorId::new(ta, ts), SectorId::new(ra, rs), g)
                .unwrap();
        }
        ch
    }

    #[test]
    fn frame_counts_and_cdown() {
        let ch = fixed_channel();
        let run = run_sls(&ch, SlsConfig::default()).unwrap();
        // ISS: 3 tx sectors x 1 rx antenna; RSS: 2 rx sectors x 2 tx antennas
        assert_eq!(run.outcome.iss_frames, 3);
        assert_eq!(run.outcome.rss_frames, 4);
        assert_eq!(run.outcome.total_frames, 9); // + feedback + ack
        for phase in [SlsPhase::InitiatorSweep, SlsPhase::ResponderSweep] {
            let cdowns: Vec<u32> = run
                .frames
                .iter()
                .filter(|f| f.phase == phase)
                .map(|f| f.cdown)
                .collect();
            let expect: Vec<u32> = (0..cdowns.len() as u32).rev().collect();
            assert_eq!(cdowns, expect, "{phase:?} countdown");
        }
        // phases never go backwards
        for pair in run.frames.windows(2) {
            assert!(pair[0].phase <= pair[1].phase);
        }
        assert_eq!(run.frames.last().unwrap().phase, SlsPhase::Ack);
    }

    #[test]
    fn winners_match_quasi_omni_argmax() {
        let ch = fixed_channel();
        let run = run_sls(&ch, SlsConfig::default()).unwrap();
        // initiator: best QO quality is max gain per tx sector minus 10 dB;
        // sector (1,0) sees max(15,22)-10 = 12, beating (0,1)'s 18-10=8
        assert_eq!(run.outcome.initiator_best, SectorId::new(1, 0));
        assert_eq!(run.outcome.initiator_quality_db, 12.0);
        // responder: per rx sector, max over tx sectors per antenna - 10;
        // rx (0,1): antenna 1 gives 22-10 = 12
        assert_eq!(run.outcome.responder_best, SectorId::new(0, 1));
        assert_eq!(run.outcome.responder_quality_db, 12.0);
    }

    #[test]
    fn quality_ties_break_to_lowest_sector_id() {
        let mut ch = SectorChannel::new(&[1, 1], &[1]).unwrap();
        // both tx sectors see identical gain
        ch.set_gain(SectorId::new(0, 0), SectorId::new(0, 0), 9.0)
            .unwrap();
        ch.set_gain(SectorId::new(1, 0), SectorId::new(0, 0), 9.0)
            .unwrap();
        let run = run_sls(&ch, SlsConfig::default()).unwrap();
        assert_eq!(run.outcome.initiator_best, SectorId::new(0, 0));
    }

    #[test]
    fn sensitivity_floor_fails_dead_links() {
        let mut ch = SectorChannel::new(&[1], &[1]).unwrap();
        ch.set_gain(SectorId::new(0, 0), SectorId::new(0, 0), -70.0)
            .unwrap();
        let config = SlsConfig {
            mode: SweepMode::Txss,
            sensitivity_floor_db: Some(-68.0),
        };
        assert_eq!(
            run_sls(&ch, config),
            Err(BfError::LinkFailure { floor_db: -68.0 })
        );
        let relaxed = SlsConfig {
            mode: SweepMode::Txss,
            sensitivity_floor_db: Some(-90.0),
        };
        assert!(run_sls(&ch, relaxed).is_ok());
    }

    #[test]
    fn rxss_trains_receive_sectors() {
        let ch = fixed_channel();
        let run = run_sls(
            &ch,
            SlsConfig {
                mode: SweepMode::Rxss,
                sensitivity_floor_db: None,
            },
        )
        .unwrap();
        // responder's receive training sweeps its 2 sectors against 2
        // quasi-omni tx antennas
        assert_eq!(run.outcome.iss_frames, 4);
        assert_eq!(run.outcome.rss_frames, 3);
        // the responder's best receive sector matches the TXSS responder
        // result (same quantity measured in both modes)
        assert_eq!(run.outcome.responder_best, SectorId::new(0, 1));
        // the initiator's receive sector is its best sector under a
        // quasi-omni peer transmit
        assert_eq!(run.outcome.initiator_best, SectorId::new(1, 0));
    }

    #[test]
    fn random_channels_agree_with_brute_force_qo_argmax() {
        let mut rng = StdRng::seed_from_u64(99);
        for trial in 0..50 {
            let ch = SectorChannel::random(&[3, 2], &[2, 2], trial % 2 == 0, &mut rng).unwrap();
            let run = run_sls(&ch, SlsConfig::default()).unwrap();
            // brute-force the initiator-side argmax with the same tie-break
            let mut best = (f64::NEG_INFINITY, SectorId::new(0, 0), 0u8);
            for peer in 0..ch.rx_antenna_count() as u8 {
                for &tx in ch.tx_sector_ids() {
                    let q = ch.gain_to_quasi_omni_db(tx, peer).unwrap();
                    if q > best.0 || (q == best.0 && (tx, peer) < (best.1, best.2)) {
                        best = (q, tx, peer);
                    }
                }
            }
            assert_eq!(run.outcome.initiator_best, best.1, "trial {trial}");
            assert_eq!(run.outcome.initiator_quality_db, best.0);
        }
    }
}
