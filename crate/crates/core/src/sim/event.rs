//! The event queue: integer-nanosecond timestamps, a fixed rank per event
//! kind, and an insertion sequence number, so the processing order of
//! simultaneous events is fully determined and identical across runs and
//! platforms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Everything that can happen. The discriminant order is the tie-break rank
/// at equal timestamps: interval boundaries first, then position updates,
/// then contention slots, then transmissions, receptions, and timers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EventKind {
    BiBoundary,
    MobilityUpdate,
    SlotBoundary,
    FrameTxStart,
    FrameRxEnd,
    TimerExpiry,
}

/// One scheduled event; `payload` indexes into engine-side tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Event {
    pub time_ns: u64,
    pub kind: EventKind,
    pub payload: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Queued {
    event: Event,
    seq: u64,
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the earliest (time, rank, seq)
        // comes out first
        (other.event.time_ns, other.event.kind, other.seq).cmp(&(
            self.event.time_ns,
            self.event.kind,
            self.seq,
        ))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deterministic priority queue over [`Event`]s.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Queued>,
    next_seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: Event) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Queued { event, seq });
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop().map(|q| q.event)
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }
}
