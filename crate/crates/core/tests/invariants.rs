//! Property checks over randomly generated inputs: structural invariants
//! that must hold for every value in a domain, not just the pinned cases the
//! unit tests and the acceptance gate exercise.

use dmglab_core::golay::GolayPair;
use dmglab_core::link::{capacity_bps, LinkParams};
use dmglab_core::mac::block_ack::block_ack_round;
use dmglab_core::mac::edca::next_cw_on_failure;
use dmglab_core::phy::data::{decode_data, encode_data, plan_data_encoding};
use dmglab_core::phy::header::PlcpHeader;
use dmglab_core::phy::ldpc::SurrogateCode;
use dmglab_core::phy::mcs::mcs;
use dmglab_core::phy::scrambler::Scrambler;
use dmglab_core::tput::framing_throughput_bps;
use proptest::prelude::*;

/// Delay permutation and signs for an `m`-stage sequence generator.
fn stage_config() -> impl Strategy<Value = (Vec<usize>, Vec<i8>)> {
    (1..=7usize).prop_flat_map(|m| {
        let delays = Just((0..m).map(|k| 1usize << k).collect::<Vec<_>>()).prop_shuffle();
        let weights = proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], m);
        (delays, weights)
    })
}

proptest! {
    #[test]
    fn golay_pairs_are_complementary_for_any_stage_order((delays, weights) in stage_config()) {
        let pair = GolayPair::generate(&delays, &weights).unwrap();
        let ac = pair.autocorr_sum();
        prop_assert_eq!(ac[0], 2 * pair.len() as i64);
        prop_assert!(ac[1..].iter().all(|&v| v == 0));
    }

    #[test]
    fn header_bit_layout_round_trips(
        seed in 1u8..=127,
        mcs_index in 0u8..=31,
        length in 0u32..1 << 18,
        packet_type: bool,
        training in 0u8..=31,
        bt: bool,
    ) {
        let h = PlcpHeader::new(seed, mcs_index, length, packet_type, training, bt).unwrap();
        prop_assert_eq!(PlcpHeader::from_bits(&h.to_bits()).unwrap(), h);
    }

    #[test]
    fn scrambling_twice_is_the_identity(
        seed in 1u8..=127,
        mut bits in proptest::collection::vec(0u8..=1, 1..512),
    ) {
        let original = bits.clone();
        Scrambler::new(seed).scramble(&mut bits);
        Scrambler::new(seed).scramble(&mut bits);
        prop_assert_eq!(bits, original);
    }

    #[test]
    fn encoding_plans_pad_less_than_one_unit(
        index in 1u8..=24,
        length in 1usize..1 << 18,
    ) {
        let profile = mcs(index).unwrap();
        let plan = plan_data_encoding(length, profile).unwrap();
        let fresh = plan.l_cwd / plan.repetition as usize;
        // A minimal plan never pads a full codeword or a full block.
        prop_assert!(plan.n_data_pad < fresh);
        prop_assert!(plan.n_blkpad < plan.n_cbpb);
        prop_assert_eq!(plan.n_cw * fresh, length * 8 + plan.n_data_pad);
        prop_assert_eq!(plan.n_blk * plan.n_cbpb, plan.n_cw * 672 + plan.n_blkpad);
    }

    #[test]
    fn coded_stream_always_decodes_back(
        index in 1u8..=24,
        seed in 1u8..=127,
        psdu in proptest::collection::vec(any::<u8>(), 1..256),
    ) {
        let profile = mcs(index).unwrap();
        let code = SurrogateCode::new(profile.code_rate.unwrap());
        let (_, coded) = encode_data(&psdu, profile, &code, seed).unwrap();
        prop_assert_eq!(decode_data(&coded, psdu.len(), profile, &code, seed).unwrap(), psdu);
    }

    #[test]
    fn acknowledged_and_missing_frames_partition_the_burst(
        window_start: u16,
        delivered in proptest::collection::vec(any::<bool>(), 1..=64),
    ) {
        let burst: Vec<u16> = (0..delivered.len() as u16)
            .map(|i| window_start.wrapping_add(i))
            .collect();
        let round = block_ack_round(window_start, &burst, &delivered).unwrap();
        let mut acked = Vec::new();
        let mut missing = round.retransmit.clone();
        for (i, &seq) in burst.iter().enumerate() {
            if round.bitmap & (1 << i) != 0 {
                acked.push(seq);
            }
        }
        prop_assert_eq!(acked.len() + missing.len(), burst.len());
        acked.extend(missing.drain(..));
        acked.sort_unstable_by_key(|&s| s.wrapping_sub(window_start));
        prop_assert_eq!(acked, burst);
    }

    #[test]
    fn contention_window_growth_is_monotone_and_capped(
        exp_min in 1u32..=6,
        exp_max in 6u32..=10,
        failures in 1usize..20,
    ) {
        let cw_min = (1u32 << exp_min) - 1;
        let cw_max = (1u32 << exp_max) - 1;
        let mut cw = cw_min;
        for _ in 0..failures {
            let next = next_cw_on_failure(cw, cw_max);
            prop_assert!(next >= cw);
            prop_assert!(next <= cw_max);
            prop_assert!((next + 1).is_power_of_two());
            cw = next;
        }
        // Enough failures always reach the cap.
        for _ in 0..20 {
            cw = next_cw_on_failure(cw, cw_max);
        }
        prop_assert_eq!(cw, cw_max);
    }

    #[test]
    fn framing_efficiency_stays_below_the_line_rate(
        index in 1u8..=24,
        length in 1usize..1 << 18,
    ) {
        let profile = mcs(index).unwrap();
        let t = dmglab_core::phy::timing::PhyTiming::default();
        let bps = framing_throughput_bps(profile, length, &t).unwrap();
        prop_assert!(bps > 0.0);
        prop_assert!(bps < profile.data_rate_bps);
    }

    #[test]
    fn capacity_rises_with_power_and_falls_with_distance(
        pt in -10.0f64..30.0,
        dist in 1.0f64..100.0,
    ) {
        let base = LinkParams {
            tx_power_dbm: pt,
            tx_gain_dbi: 0.0,
            rx_gain_dbi: 0.0,
            frequency_hz: 60.48e9,
            distance_m: dist,
            bandwidth_hz: 2.16e9,
            noise_figure_db: 10.0,
            loss_margin_db: 6.0,
        };
        let mut stronger = base;
        stronger.tx_power_dbm += 3.0;
        let mut farther = base;
        farther.distance_m *= 2.0;
        let c = capacity_bps(&base).unwrap();
        prop_assert!(capacity_bps(&stronger).unwrap() > c);
        prop_assert!(capacity_bps(&farther).unwrap() < c);
    }
}
