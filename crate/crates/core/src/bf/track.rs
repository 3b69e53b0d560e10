//! Beam tracking: keeping an already-trained link aligned by piggybacking
//! short training fields onto normal data frames instead of scheduling a
//! fresh sweep.
//!
//! A station that wants tracking sets the training-length field of an
//! outgoing frame header to the number of training units it asks for; two
//! header flags then select who appends training to what, as a function of
//! which side's beam is being refreshed.

/// What the transmitter of a frame must do about appended training, given
/// the packet-type and beam-tracking-request header flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackAction {
    /// No tracking this frame (training length zero).
    None,
    /// Append transmit-training subfields; the receiver measures them.
    SendTrnT,
    /// Append receive-training subfields so the receiver can re-tune its own
    /// sectors against them.
    SendTrnR,
    /// Ask the peer to come back with receive training of its own.
    RequestTrnR,
    /// A flag pairing the protocol never defines; callers treat it as a
    /// header corruption signal.
    UnspecifiedCombination,
}

/// Decodes the (packet type, beam tracking request) flag pair of a frame
/// whose training length is `training_length`.
pub fn beam_track_action(
    packet_type: bool,
    beam_tracking_request: bool,
    training_length: u8,
) -> TrackAction {
    if training_length == 0 {
        return TrackAction::None;
    }
    match (beam_tracking_request, packet_type) {
        (true, true) => TrackAction::SendTrnT,
        (false, false) => TrackAction::SendTrnR,
        (true, false) => TrackAction::RequestTrnR,
        (false, true) => TrackAction::UnspecifiedCombination,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_training_length_disables_tracking() {
        for pt in [false, true] {
            for bt in [false, true] {
                assert_eq!(beam_track_action(pt, bt, 0), TrackAction::None);
            }
        }
    }

    #[test]
    fn flag_pairs_map_to_actions() {
        assert_eq!(beam_track_action(true, true, 4), TrackAction::SendTrnT);
        assert_eq!(beam_track_action(false, false, 4), TrackAction::SendTrnR);
        assert_eq!(beam_track_action(false, true, 4), TrackAction::RequestTrnR);
        assert_eq!(
            beam_track_action(true, false, 4),
            TrackAction::UnspecifiedCombination
        );
    }

    #[test]
    fn any_nonzero_training_length_behaves_alike() {
        for tl in 1..=31 {
            assert_eq!(beam_track_action(true, true, tl), TrackAction::SendTrnT);
        }
    }
}
