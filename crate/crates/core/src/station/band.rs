//! Band profiles and the selection policy for multi-band stations: which
//! band should carry the session at a given separation.
//!
//! Each band is summarized as a staircase of achievable rates over distance
//! — a high band delivers enormous rates over a few meters and nothing
//! beyond, a low band delivers a modest rate over tens of meters. Selection
//! picks the fastest band that still reaches the peer, skipping bands
//! flagged as congested.

use super::StationError;

/// One step of a band's rate staircase: `rate_bps` is achievable out to
/// `up_to_m` meters (inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateStep {
    pub up_to_m: f64,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandProfile {
    pub name: String,
    pub frequency_hz: f64,
    /// Sorted by distance; rates strictly fall as distance grows.
    pub steps: Vec<RateStep>,
    pub congested: bool,
}

impl BandProfile {
    pub fn new(
        name: &str,
        frequency_hz: f64,
        steps: Vec<RateStep>,
    ) -> Result<Self, StationError> {
        if !(frequency_hz > 0.0) {
            return Err(StationError::BadParameter(format!(
                "{name}: frequency must be positive"
            )));
        }
        if steps.is_empty() {
            return Err(StationError::BadParameter(format!(
                "{name}: a band needs at least one rate step"
            )));
        }
        for step in &steps {
            if !(step.up_to_m > 0.0) || !(step.rate_bps > 0.0) {
                return Err(StationError::BadParameter(format!(
                    "{name}: steps need positive range and rate"
                )));
            }
        }
        for pair in steps.windows(2) {
            if pair[1].up_to_m <= pair[0].up_to_m {
                return Err(StationError::BadParameter(format!(
                    "{name}: step ranges must strictly increase"
                )));
            }
            if pair[1].rate_bps >= pair[0].rate_bps {
                return Err(StationError::BadParameter(format!(
                    "{name}: rates must strictly fall with distance"
                )));
            }
        }
        Ok(BandProfile {
            name: name.to_string(),
            frequency_hz,
            steps,
            congested: false,
        })
    }

    /// Achievable rate at `distance_m`, or `None` beyond the band's reach.
    pub fn rate_at(&self, distance_m: f64) -> Option<f64> {
        self.steps
            .iter()
            .find(|s| distance_m <= s.up_to_m)
            .map(|s| s.rate_bps)
    }

    pub fn reach_m(&self) -> f64 {
        self.steps.last().map(|s| s.up_to_m).unwrap_or(0.0)
    }
}

/// Picks the fastest non-congested band that reaches `distance_m`; ties go
/// to the earlier entry. `None` when nothing reaches.
pub fn band_select(bands: &[BandProfile], distance_m: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, band) in bands.iter().enumerate() {
        if band.congested {
            continue;
        }
        if let Some(rate) = band.rate_at(distance_m) {
            let better = match best {
                None => true,
                Some((_, r)) => rate > r,
            };
            if better {
                best = Some((i, rate));
            }
        }
    }
    best
}

/// The two bands of the canonical dual-band station: a low band good for
/// 144.4 Mbit/s out to tens of meters, and a high band worth 4.62 Gbit/s
/// inside a small room.
pub fn reference_bands() -> Vec<BandProfile> {
    vec![
        BandProfile::new(
            "2.4GHz",
            2.4e9,
            vec![RateStep {
                up_to_m: 50.0,
                rate_bps: 144.4e6,
            }],
        )
        .expect("static profile"),
        BandProfile::new(
            "60GHz-ch2",
            60.48e9,
            vec![RateStep {
                up_to_m: 3.0,
                rate_bps: 4.62e9,
            }],
        )
        .expect("static profile"),
    ]
}
