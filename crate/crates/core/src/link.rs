//! Free-space link budget and capacity math for the 60 GHz band.
//!
//! Straight textbook chain: EIRP minus spreading loss gives received power,
//! subtracting the thermal floor (kTB plus noise figure) gives SNR, and the
//! log form of the capacity bound turns that into an upper rate limit. The
//! interesting 60 GHz twist is how fast the numbers fall: quadrupling the
//! carrier from 15 to 60 GHz alone costs 12 dB of path, before oxygen
//! absorption is even considered — which is why everything in this band leans
//! on antenna directivity.

use thiserror::Error;

pub const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;
/// Thermal noise density at 290 K, dBm per Hz.
pub const THERMAL_NOISE_DBM_HZ: f64 = -174.0;

#[derive(Debug, Error, PartialEq)]
pub enum LinkError {
    #[error("{field} must be positive and finite, got {value}")]
    BadParameter { field: &'static str, value: f64 },
}

/// Inputs of one point-to-point budget evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub frequency_hz: f64,
    pub distance_m: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    /// Additional fixed margin (shadowing, implementation loss).
    pub loss_margin_db: f64,
}

impl LinkParams {
    pub fn validate(&self) -> Result<(), LinkError> {
        let positive = [
            ("frequency_hz", self.frequency_hz),
            ("distance_m", self.distance_m),
            ("bandwidth_hz", self.bandwidth_hz),
        ];
        for (field, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(LinkError::BadParameter { field, value });
            }
        }
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT_M_S / self.frequency_hz
    }
}

/// Free-space path loss in dB: `20 log10(4 pi d / lambda)`.
pub fn path_loss_db(p: &LinkParams) -> Result<f64, LinkError> {
    p.validate()?;
    Ok(20.0 * (4.0 * std::f64::consts::PI * p.distance_m / p.wavelength_m()).log10())
}

/// Received power: EIRP + receive gain - path loss - margin.
pub fn received_power_dbm(p: &LinkParams) -> Result<f64, LinkError> {
    Ok(p.tx_power_dbm + p.tx_gain_dbi + p.rx_gain_dbi - path_loss_db(p)? - p.loss_margin_db)
}

/// Noise power over the signal bandwidth, dBm.
pub fn noise_power_dbm(p: &LinkParams) -> Result<f64, LinkError> {
    p.validate()?;
    Ok(THERMAL_NOISE_DBM_HZ + 10.0 * p.bandwidth_hz.log10() + p.noise_figure_db)
}

pub fn snr_db(p: &LinkParams) -> Result<f64, LinkError> {
    Ok(received_power_dbm(p)? - noise_power_dbm(p)?)
}

/// Capacity bound `B log2(1 + SNR)` in bit/s.
pub fn capacity_bps(p: &LinkParams) -> Result<f64, LinkError> {
    let snr = 10f64.powf(snr_db(p)? / 10.0);
    Ok(p.bandwidth_hz * (1.0 + snr).log2())
}

/// Extra combined antenna gain (dB) needed to reach `target_bps`; negative
/// when the budget already exceeds the target.
pub fn required_extra_gain_db(target_bps: f64, p: &LinkParams) -> Result<f64, LinkError> {
    if !(target_bps.is_finite() && target_bps > 0.0) {
        return Err(LinkError::BadParameter {
            field: "target_bps",
            value: target_bps,
        });
    }
    let snr_needed = 2f64.powf(target_bps / p.bandwidth_hz) - 1.0;
    let snr_needed_db = 10.0 * snr_needed.log10();
    Ok(snr_needed_db - snr_db(p)?)
}
