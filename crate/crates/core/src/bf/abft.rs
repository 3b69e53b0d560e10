//! The contention window where unassociated stations answer the access
//! point's beacon sweep: a row of slots after the beacons, each slot wide
//! enough for one responder sweep plus the feedback that closes it.
//!
//! Every station that wants training picks one slot uniformly at random. A
//! slot with a single occupant carries a complete responder sweep and gets
//! feedback inside the slot (no ack follows here — the ack step belongs to
//! sweeps run inside scheduled time). Two or more stations in the same slot
//! talk over each other, get no feedback, and try again in a later interval.

use super::BfError;
use rand::Rng;

/// Customary slot count advertised by the beacons.
pub const DEFAULT_ABFT_SLOTS: u8 = 8;

/// One contention round: who picked what and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbftRound {
    /// Slot picked by each participating station, indexed as given.
    pub choices: Vec<u8>,
    /// Stations whose slot held only them (trained this round).
    pub successes: Vec<usize>,
    /// Stations that collided and must retry.
    pub collided: Vec<usize>,
}

/// Runs one slotted round for `n_stations` contenders.
pub fn a_bft_round(
    n_stations: usize,
    slots: u8,
    rng: &mut impl Rng,
) -> Result<AbftRound, BfError> {
    if slots == 0 {
        return Err(BfError::ProtocolViolation("a contention window needs slots"));
    }
    let choices: Vec<u8> = (0..n_stations).map(|_| rng.gen_range(0..slots)).collect();
    let mut occupancy = vec![0usize; slots as usize];
    for &c in &choices {
        occupancy[c as usize] += 1;
    }
    let mut successes = Vec::new();
    let mut collided = Vec::new();
    for (station, &c) in choices.iter().enumerate() {
        if occupancy[c as usize] == 1 {
            successes.push(station);
        } else {
            collided.push(station);
        }
    }
    Ok(AbftRound {
        choices,
        successes,
        collided,
    })
}

/// Repeats rounds until every station has trained or `max_rounds` is spent.
/// Returns, per station, the 1-based round it succeeded in (`None` when the
/// budget ran out first — those stations need rescuing through scheduled
/// airtime instead).
pub fn rounds_to_train(
    n_stations: usize,
    slots: u8,
    max_rounds: u32,
    rng: &mut impl Rng,
) -> Result<Vec<Option<u32>>, BfError> {
    let mut result = vec![None; n_stations];
    let mut waiting: Vec<usize> = (0..n_stations).collect();
    for round in 1..=max_rounds {
        if waiting.is_empty() {
            break;
        }
        let outcome = a_bft_round(waiting.len(), slots, rng)?;
        let mut still_waiting = Vec::with_capacity(outcome.collided.len());
        for (local, &station) in waiting.iter().enumerate() {
            if outcome.successes.contains(&local) {
                result[station] = Some(round);
            } else {
                still_waiting.push(station);
            }
        }
        waiting = still_waiting;
    }
    Ok(result)
}
