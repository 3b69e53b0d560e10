//! Block acknowledgement: a 64-frame reorder window, the bitmap returned on
//! request, and the retransmission bookkeeping a transmitter derives from it.

use super::MacError;

/// Frames covered by one bitmap.
pub const BLOCK_ACK_WINDOW: usize = 64;

/// Receiver side: tracks which sequence numbers inside the current window
/// have arrived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAckRecord {
    window_start: u16,
    received: u64,
}

impl BlockAckRecord {
    pub fn new(window_start: u16) -> Self {
        BlockAckRecord {
            window_start,
            received: 0,
        }
    }

    pub fn window_start(&self) -> u16 {
        self.window_start
    }

    fn offset_of(&self, seq: u16) -> Result<usize, MacError> {
        let off = seq.wrapping_sub(self.window_start) as usize;
        if off >= BLOCK_ACK_WINDOW {
            return Err(MacError::OutsideWindow {
                seq,
                start: self.window_start,
            });
        }
        Ok(off)
    }

    /// Records a correctly received frame. Duplicates are harmless.
    pub fn record(&mut self, seq: u16) -> Result<(), MacError> {
        let off = self.offset_of(seq)?;
        self.received |= 1 << off;
        Ok(())
    }

    /// The bitmap reported in a block-ACK: bit i covers sequence
    /// `window_start + i`.
    pub fn bitmap(&self) -> u64 {
        self.received
    }

    pub fn is_complete(&self, count: usize) -> bool {
        debug_assert!(count <= BLOCK_ACK_WINDOW);
        let mask = if count == 64 { u64::MAX } else { (1u64 << count) - 1 };
        self.received & mask == mask
    }

    /// Slides the window past the acknowledged prefix, returning how many
    /// sequences were released for in-order delivery.
    pub fn advance(&mut self) -> usize {
        let released = self.received.trailing_ones() as usize;
        self.received >>= released;
        self.window_start = self.window_start.wrapping_add(released as u16);
        released
    }
}

/// Sequence numbers a transmitter must retransmit given the reported bitmap.
pub fn missing_from(bitmap: u64, window_start: u16, sent: &[u16]) -> Vec<u16> {
    sent.iter()
        .copied()
        .filter(|&seq| {
            let off = seq.wrapping_sub(window_start) as usize;
            off >= BLOCK_ACK_WINDOW || bitmap & (1 << off) == 0
        })
        .collect()
}

/// Result of one burst / request / response round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockAckRound {
    pub bitmap: u64,
    pub window_start: u16,
    pub retransmit: Vec<u16>,
}

/// Models one full round: the transmitter sends `burst` (a window-bounded
/// set of sequence numbers starting at `window_start`), `delivered[i]` says
/// whether burst frame i survived the channel, and the response carries the
/// bitmap from which the retransmission set is derived.
pub fn block_ack_round(
    window_start: u16,
    burst: &[u16],
    delivered: &[bool],
) -> Result<BlockAckRound, MacError> {
    if burst.len() > BLOCK_ACK_WINDOW {
        return Err(MacError::WindowOverflow(burst.len(), BLOCK_ACK_WINDOW));
    }
    debug_assert_eq!(burst.len(), delivered.len());
    let mut record = BlockAckRecord::new(window_start);
    for (&seq, &ok) in burst.iter().zip(delivered) {
        if ok {
            record.record(seq)?;
        } else {
            record.offset_of(seq)?; // lost frames must still be in-window
        }
    }
    Ok(BlockAckRound {
        bitmap: record.bitmap(),
        window_start,
        retransmit: missing_from(record.bitmap(), window_start, burst),
    })
}
