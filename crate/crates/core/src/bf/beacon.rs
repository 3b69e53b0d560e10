//! The access point's own transmit sweep: beacon frames sent through its
//! sectors at the head of each beacon interval.
//!
//! A full sweep need not fit in one interval — it may be fragmented across
//! several, with the countdown field carried in each beacon running over the
//! *whole* sweep so a listener can always tell how far away the end is. Two
//! degrees of freedom matter for modeling: only one antenna's sectors may be
//! swept within a single interval, and when an interval carries just one
//! beacon its start may be jittered to keep two overlapping networks from
//! colliding forever.

use super::channel::SectorId;
use super::BfError;
use rand::Rng;

/// Upper bound (exclusive) on the random start jitter, in slots.
pub const MAX_START_DELAY_SLOTS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeaconSweepConfig {
    /// Beacons transmitted per interval (the fragmentation knob).
    pub beacons_per_bti: usize,
    /// Shuffle the sector order inside each interval.
    pub shuffle_within_bti: bool,
    /// Jitter the start of single-beacon intervals.
    pub random_start_delay: bool,
}

impl Default for BeaconSweepConfig {
    fn default() -> Self {
        BeaconSweepConfig {
            beacons_per_bti: usize::MAX,
            shuffle_within_bti: false,
            random_start_delay: false,
        }
    }
}

/// One transmitted beacon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeaconFrame {
    /// Beacon-interval index the frame goes out in.
    pub bi: u32,
    pub sector: SectorId,
    /// Beacons still to come before the sweep completes (0 on the last).
    pub cdown: u32,
    /// Slots of jitter before this interval's beacons start.
    pub start_delay_slots: u32,
}

/// Plans a complete sweep over `sectors`, fragmenting it across as many
/// intervals as the configuration demands.
pub fn plan_beacon_sweep(
    sectors: &[SectorId],
    config: BeaconSweepConfig,
    rng: &mut impl Rng,
) -> Result<Vec<BeaconFrame>, BfError> {
    if sectors.is_empty() {
        return Err(BfError::BadAntennaConfig("no sectors to sweep".into()));
    }
    if config.beacons_per_bti == 0 {
        return Err(BfError::BadAntennaConfig(
            "at least one beacon per interval".into(),
        ));
    }
    let total = sectors.len() as u32;
    let mut frames = Vec::with_capacity(sectors.len());
    let mut remaining = total;
    let mut queue = sectors.to_vec();
    let mut bi = 0u32;
    while !queue.is_empty() {
        // an interval may only sweep one antenna, so the batch stops at the
        // antenna boundary even if the per-interval budget has room left
        let antenna = queue[0].antenna;
        let same_antenna = queue.iter().take_while(|s| s.antenna == antenna).count();
        let take = same_antenna.min(config.beacons_per_bti);
        let mut batch: Vec<SectorId> = queue.drain(..take).collect();
        if config.shuffle_within_bti {
            for i in (1..batch.len()).rev() {
                batch.swap(i, rng.gen_range(0..=i));
            }
        }
        let start_delay_slots = if config.random_start_delay && batch.len() == 1 {
            rng.gen_range(0..MAX_START_DELAY_SLOTS)
        } else {
            0
        };
        for sector in batch {
            remaining -= 1;
            frames.push(BeaconFrame {
                bi,
                sector,
                cdown: remaining,
                start_delay_slots,
            });
        }
        bi += 1;
    }
    Ok(frames)
}

/// Intervals a sweep of `sectors` will occupy under `config`.
pub fn btis_needed(sectors: &[SectorId], beacons_per_bti: usize) -> u32 {
    if sectors.is_empty() || beacons_per_bti == 0 {
        return 0;
    }
    let mut btis = 0u32;
    let mut i = 0;
    while i < sectors.len() {
        let antenna = sectors[i].antenna;
        let run = sectors[i..]
            .iter()
            .take_while(|s| s.antenna == antenna)
            .count();
        btis += run.div_ceil(beacons_per_bti) as u32;
        i += run;
    }
    btis
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn sectors(layout: &[u8]) -> Vec<SectorId> {
        layout
            .iter()
            .enumerate()
            .flat_map(|(a, &n)| (0..n).map(move |s| SectorId::new(a as u8, s)))
            .collect()
    }

    #[test]
    fn unfragmented_sweep_fits_antenna_bounded_intervals() {
        let mut rng = StdRng::seed_from_u64(1);
        let secs = sectors(&[3, 2]);
        let frames = plan_beacon_sweep(&secs, BeaconSweepConfig::default(), &mut rng).unwrap();
        assert_eq!(frames.len(), 5);
        // two intervals: the antenna boundary forces a split even with an
        // unlimited per-interval budget
        assert_eq!(frames.iter().map(|f| f.bi).max(), Some(1));
        let cdowns: Vec<u32> = frames.iter().map(|f| f.cdown).collect();
        assert_eq!(cdowns, vec![4, 3, 2, 1, 0]);
        assert_eq!(btis_needed(&secs, usize::MAX), 2);
    }

    #[test]
    fn fragmentation_limits_beacons_per_interval() {
        let mut rng = StdRng::seed_from_u64(2);
        let secs = sectors(&[5]);
        let config = BeaconSweepConfig {
            beacons_per_bti: 2,
            ..BeaconSweepConfig::default()
        };
        let frames = plan_beacon_sweep(&secs, config, &mut rng).unwrap();
        assert_eq!(frames.iter().map(|f| f.bi).max(), Some(2)); // 2+2+1
        for bi in 0..=2 {
            assert!(frames.iter().filter(|f| f.bi == bi).count() <= 2);
        }
        // countdown still runs over the whole sweep, not per interval
        let cdowns: Vec<u32> = frames.iter().map(|f| f.cdown).collect();
        assert_eq!(cdowns, vec![4, 3, 2, 1, 0]);
        assert_eq!(btis_needed(&secs, 2), 3);
    }

    #[test]
    fn every_sector_appears_once_even_shuffled() {
        let mut rng = StdRng::seed_from_u64(3);
        let secs = sectors(&[4, 4]);
        let config = BeaconSweepConfig {
            shuffle_within_bti: true,
            ..BeaconSweepConfig::default()
        };
        let frames = plan_beacon_sweep(&secs, config, &mut rng).unwrap();
        let mut seen: Vec<SectorId> = frames.iter().map(|f| f.sector).collect();
        seen.sort();
        assert_eq!(seen, secs);
        // an interval never mixes antennas
        for f in &frames {
            let antenna = frames
                .iter()
                .find(|g| g.bi == f.bi)
                .map(|g| g.sector.antenna)
                .unwrap();
            assert_eq!(f.sector.antenna, antenna);
        }
    }

    #[test]
    fn single_beacon_intervals_get_jitter() {
        let mut rng = StdRng::seed_from_u64(4);
        let secs = sectors(&[6]);
        let config = BeaconSweepConfig {
            beacons_per_bti: 1,
            shuffle_within_bti: false,
            random_start_delay: true,
        };
        let frames = plan_beacon_sweep(&secs, config, &mut rng).unwrap();
        assert_eq!(frames.len(), 6);
        assert!(frames.iter().all(|f| f.start_delay_slots < MAX_START_DELAY_SLOTS));
        // with six draws from eight slots at least two should differ
        assert!(frames.windows(2).any(|w| w[0].start_delay_slots != w[1].start_delay_slots));
        // multi-beacon intervals never jitter
        let steady =
            plan_beacon_sweep(&secs, BeaconSweepConfig::default(), &mut rng).unwrap();
        assert!(steady.iter().all(|f| f.start_delay_slots == 0));
    }

    #[test]
    fn same_seed_same_plan() {
        let secs = sectors(&[3, 3]);
        let config = BeaconSweepConfig {
            beacons_per_bti: 2,
            shuffle_within_bti: true,
            random_start_delay: true,
        };
        let a = plan_beacon_sweep(&secs, config, &mut StdRng::seed_from_u64(7)).unwrap();
        let b = plan_beacon_sweep(&secs, config, &mut StdRng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_degenerate_plans() {
        let mut rng = StdRng::seed_from_u64(5);
        assert!(plan_beacon_sweep(&[], BeaconSweepConfig::default(), &mut rng).is_err());
        let config = BeaconSweepConfig {
            beacons_per_bti: 0,
            ..BeaconSweepConfig::default()
        };
        assert!(plan_beacon_sweep(&sectors(&[2]), config, &mut rng).is_err());
    }
}
