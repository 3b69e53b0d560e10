//! Beam refinement: the directional fine-tuning that runs after a sector
//! sweep has produced a coarse transmit sector for each side.
//!
//! A refinement session opens with a capability handshake (each side states
//! how much training it still wants), optionally passes through the
//! multi-sector and beam-combining stages, and then runs transactions in
//! which one end holds its configuration fixed while the other sweeps its
//! candidate sectors against real training fields. With a static gain table
//! the multi-sector and combining stages only narrow the candidate list, so
//! this model treats them as pass-throughs and lets the transactions search
//! the full sector set.

use super::channel::{SectorChannel, SectorId};
use super::BfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BrpPhase {
    /// Capability handshake; ends when both sides stop asking for more.
    Setup,
    /// Multi-sector ID detection / beam combining; modeled as a pass-through.
    MidBc,
    /// Receive/transmit refinement transactions.
    Transactions,
    Done,
}

/// One refinement session between an initiator/responder pair.
#[derive(Debug, Clone)]
pub struct BrpSession {
    phase: BrpPhase,
    initiator_settled: bool,
    responder_settled: bool,
    transactions: u32,
}

impl Default for BrpSession {
    fn default() -> Self {
        Self::new()
    }
}

impl BrpSession {
    pub fn new() -> Self {
        BrpSession {
            phase: BrpPhase::Setup,
            initiator_settled: false,
            responder_settled: false,
            transactions: 0,
        }
    }

    pub fn phase(&self) -> BrpPhase {
        self.phase
    }

    pub fn transactions(&self) -> u32 {
        self.transactions
    }

    /// One setup frame: `capability_requests` counts the training requests
    /// the sender still has outstanding. A side asking for anything reopens
    /// its half of the handshake; the phase advances once both halves have
    /// closed with a zero-request frame.
    pub fn setup_frame(
        &mut self,
        from_initiator: bool,
        capability_requests: u8,
    ) -> Result<BrpPhase, BfError> {
        if self.phase != BrpPhase::Setup {
            return Err(BfError::ProtocolViolation("setup frame outside BRP setup"));
        }
        let settled = capability_requests == 0;
        if from_initiator {
            self.initiator_settled = settled;
        } else {
            self.responder_settled = settled;
        }
        if self.initiator_settled && self.responder_settled {
            self.phase = BrpPhase::MidBc;
        }
        Ok(self.phase)
    }

    /// Acknowledges the multi-sector / beam-combining stage (a pass-through
    /// here) and opens the transaction loop.
    pub fn complete_mid_bc(&mut self) -> Result<(), BfError> {
        if self.phase != BrpPhase::MidBc {
            return Err(BfError::ProtocolViolation(
                "MID/BC completion outside its stage",
            ));
        }
        self.phase = BrpPhase::Transactions;
        Ok(())
    }

    /// Receive refinement: the transmitter holds `fixed_tx` while every
    /// receive sector is tried against its training fields.
    pub fn refine_rx(
        &mut self,
        channel: &SectorChannel,
        fixed_tx: SectorId,
    ) -> Result<(SectorId, f64), BfError> {
        self.require_transactions()?;
        self.transactions += 1;
        let mut best: Option<(SectorId, f64)> = None;
        for &rx in channel.rx_sector_ids() {
            let g = channel.gain_db(fixed_tx, rx)?;
            let better = match best {
                None => true,
                Some((_, bg)) => g > bg,
            };
            if better {
                best = Some((rx, g));
            }
        }
        best.ok_or(BfError::ProtocolViolation("channel has no receive sectors"))
    }

    /// Transmit refinement: the receiver holds `fixed_rx` while every
    /// transmit sector is tried.
    pub fn refine_tx(
        &mut self,
        channel: &SectorChannel,
        fixed_rx: SectorId,
    ) -> Result<(SectorId, f64), BfError> {
        self.require_transactions()?;
        self.transactions += 1;
        let mut best: Option<(SectorId, f64)> = None;
        for &tx in channel.tx_sector_ids() {
            let g = channel.gain_db(tx, fixed_rx)?;
            let better = match best {
                None => true,
                Some((_, bg)) => g > bg,
            };
            if better {
                best = Some((tx, g));
            }
        }
        best.ok_or(BfError::ProtocolViolation("channel has no transmit sectors"))
    }

    pub fn finish(&mut self) -> Result<(), BfError> {
        if self.phase != BrpPhase::Transactions {
            return Err(BfError::ProtocolViolation(
                "finishing a session that never reached transactions",
            ));
        }
        self.phase = BrpPhase::Done;
        Ok(())
    }

    fn require_transactions(&self) -> Result<(), BfError> {
        if self.phase != BrpPhase::Transactions {
            return Err(BfError::ProtocolViolation(
                "refinement transaction outside the transaction stage",
            ));
        }
        Ok(())
    }
}

/// Final refined pair and the bookkeeping of how it was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrpResult {
    pub tx: SectorId,
    pub rx: SectorId,
    pub gain_db: f64,
    pub transactions: u32,
}

/// The standard post-sweep session: minimal two-frame setup, pass-through
/// MID/BC, then a receive refinement at the swept transmit sector followed by
/// a transmit refinement at the refined receive sector.
pub fn brp_refine(channel: &SectorChannel, swept_tx: SectorId) -> Result<BrpResult, BfError> {
    let mut session = BrpSession::new();
    session.setup_frame(true, 0)?;
    session.setup_frame(false, 0)?;
    session.complete_mid_bc()?;
    let (rx, _) = session.refine_rx(channel, swept_tx)?;
    let (tx, gain_db) = session.refine_tx(channel, rx)?;
    let transactions = session.transactions();
    session.finish()?;
    Ok(BrpResult {
        tx,
        rx,
        gain_db,
        transactions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bf::sls::{run_sls, SlsConfig};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn small_channel() -> SectorChannel {
        let mut ch = SectorChannel::new(&[3], &[3]).unwrap();
        let gains = [
            [1.0, 8.0, 3.0],  // tx 0
            [2.0, 14.0, 9.0], // tx 1
            [0.0, 4.0, 11.0], // tx 2
        ];
        for (t, row) in gains.iter().enumerate() {
            for (r, &g) in row.iter().enumerate() {
                ch.set_gain(SectorId::new(0, t as u8), SectorId::new(0, r as u8), g)
                    .unwrap();
            }
        }
        ch
    }

    #[test]
    fn setup_needs_both_sides_settled() {
        let mut s = BrpSession::new();
        assert_eq!(s.setup_frame(true, 2).unwrap(), BrpPhase::Setup);
        assert_eq!(s.setup_frame(false, 0).unwrap(), BrpPhase::Setup);
        // the initiator asking again keeps the handshake open
        assert_eq!(s.setup_frame(true, 1).unwrap(), BrpPhase::Setup);
        assert_eq!(s.setup_frame(true, 0).unwrap(), BrpPhase::MidBc);
    }

    #[test]
    fn transactions_are_gated_by_phase() {
        let ch = small_channel();
        let mut s = BrpSession::new();
        let err = s.refine_rx(&ch, SectorId::new(0, 0)).unwrap_err();
        assert!(matches!(err, BfError::ProtocolViolation(_)));
        s.setup_frame(true, 0).unwrap();
        s.setup_frame(false, 0).unwrap();
        assert!(s.refine_rx(&ch, SectorId::new(0, 0)).is_err()); // still MID/BC
        s.complete_mid_bc().unwrap();
        assert!(s.refine_rx(&ch, SectorId::new(0, 0)).is_ok());
        s.finish().unwrap();
        assert!(s.refine_tx(&ch, SectorId::new(0, 0)).is_err());
        assert!(s.complete_mid_bc().is_err());
    }

    #[test]
    fn refinements_pick_row_and_column_maxima() {
        let ch = small_channel();
        let mut s = BrpSession::new();
        s.setup_frame(true, 0).unwrap();
        s.setup_frame(false, 0).unwrap();
        s.complete_mid_bc().unwrap();
        let (rx, g) = s.refine_rx(&ch, SectorId::new(0, 1)).unwrap();
        assert_eq!((rx, g), (SectorId::new(0, 1), 14.0));
        let (tx, g) = s.refine_tx(&ch, SectorId::new(0, 2)).unwrap();
        assert_eq!((tx, g), (SectorId::new(0, 2), 11.0));
        assert_eq!(s.transactions(), 2);
    }

    #[test]
    fn sweep_then_refine_equals_exhaustive_search() {
        let mut rng = StdRng::seed_from_u64(4242);
        for trial in 0..60 {
            let quantize = trial % 2 == 0;
            let ch = SectorChannel::random(&[2, 3], &[4, 1], quantize, &mut rng).unwrap();
            let sls = run_sls(&ch, SlsConfig::default()).unwrap();
            let refined = brp_refine(&ch, sls.outcome.initiator_best).unwrap();
            let (bt, br, bg) = ch.best_pair();
            assert_eq!(refined.tx, bt, "trial {trial}");
            assert_eq!(refined.rx, br, "trial {trial}");
            assert_eq!(refined.gain_db, bg, "trial {trial}");
        }
    }
}
