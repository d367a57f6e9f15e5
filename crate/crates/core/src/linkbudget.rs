//! Link budget: transmit power and antenna gains against channel loss and
//! thermal noise, giving SNR and Shannon capacity.

use thiserror::Error;

use crate::antenna::{AntennaConfig, AntennaError};
use crate::channel::ChannelState;
use crate::geodesy::{Ellipsoid, GeographicCoord};

/// Thermal noise density at 290 K (dBm/Hz).
pub const THERMAL_NOISE_DENSITY_DBM_HZ: f64 = -174.0;

/// Allowed gap between configured EIRP and the EIRP-density reference (dB).
pub const EIRP_CONSISTENCY_TOLERANCE_DB: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinkError {
    #[error("bandwidth must be positive, got {0} Hz")]
    NonPositiveBandwidth(f64),
    #[error("invalid link configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Antenna(#[from] AntennaError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    pub tx_power_dbm: f64,
    pub tx_antenna: AntennaConfig,
    pub rx_antenna: AntennaConfig,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    pub carrier_frequency_ghz: f64,
}

impl LinkConfig {
    /// Downlink of the reference scenario: GEO transmits, HAP receives.
    pub fn reference_downlink() -> Self {
        Self {
            tx_power_dbm: 37.5,
            tx_antenna: AntennaConfig::geo_default(),
            rx_antenna: AntennaConfig::hap_default(),
            bandwidth_hz: 400e6,
            noise_figure_db: 1.2,
            carrier_frequency_ghz: 20.0,
        }
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(LinkError::NonPositiveBandwidth(self.bandwidth_hz));
        }
        if !(self.carrier_frequency_ghz.is_finite() && self.carrier_frequency_ghz > 0.0) {
            return Err(LinkError::InvalidConfig(
                "carrier frequency must be positive",
            ));
        }
        if !(self.tx_power_dbm.is_finite() && self.noise_figure_db.is_finite()) {
            return Err(LinkError::InvalidConfig(
                "power and noise figure must be finite",
            ));
        }
        self.tx_antenna.validate()?;
        self.rx_antenna.validate()?;
        Ok(())
    }

    /// Same link retuned to another carrier; both antenna patterns follow.
    pub fn at_frequency(&self, carrier_frequency_ghz: f64) -> Self {
        Self {
            carrier_frequency_ghz,
            tx_antenna: self.tx_antenna.with_frequency(carrier_frequency_ghz),
            rx_antenna: self.rx_antenna.with_frequency(carrier_frequency_ghz),
            ..*self
        }
    }

    /// Peak EIRP in dBW.
    pub fn eirp_dbw(&self) -> f64 {
        self.tx_power_dbm + self.tx_antenna.max_gain_dbi - 30.0
    }

    /// Compares peak EIRP with an EIRP density (dBW/MHz) spread over the bandwidth.
    pub fn eirp_consistency(&self, eirp_density_dbw_per_mhz: f64) -> EirpCheck {
        let configured_dbw = self.eirp_dbw();
        let expected_dbw = eirp_density_dbw_per_mhz + 10.0 * (self.bandwidth_hz / 1e6).log10();
        EirpCheck {
            configured_dbw,
            expected_dbw,
            delta_db: configured_dbw - expected_dbw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EirpCheck {
    pub configured_dbw: f64,
    pub expected_dbw: f64,
    pub delta_db: f64,
}

impl EirpCheck {
    pub fn is_consistent(&self) -> bool {
        self.delta_db.abs() <= EIRP_CONSISTENCY_TOLERANCE_DB
    }
}

/// One evaluated point of a mission or sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSample {
    pub time: f64,
    pub snr: f64,
    pub ground_distance: f64,
    pub slant_distance: f64,
    pub elevation: f64,
    pub capacity: f64,
    pub loss_breakdown: ChannelState,
}

/// Receiver noise power (dBm): `-174 + 10 log10(B) + NF`.
pub fn noise_power(bandwidth_hz: f64, noise_figure_db: f64) -> Result<f64, LinkError> {
    if bandwidth_hz.is_nan() || bandwidth_hz <= 0.0 {
        return Err(LinkError::NonPositiveBandwidth(bandwidth_hz));
    }
    Ok(THERMAL_NOISE_DENSITY_DBM_HZ + 10.0 * bandwidth_hz.log10() + noise_figure_db)
}

/// SNR (dB) of the link given an evaluated channel between the same endpoints.
pub fn compute_snr(
    cfg: &LinkConfig,
    ell: &Ellipsoid,
    tx_pos: &GeographicCoord,
    rx_pos: &GeographicCoord,
    channel: &ChannelState,
) -> Result<f64, LinkError> {
    let tx_gain = cfg
        .tx_antenna
        .gain(cfg.tx_antenna.off_boresight_angle(ell, tx_pos, rx_pos)?)?;
    let rx_gain = cfg
        .rx_antenna
        .gain(cfg.rx_antenna.off_boresight_angle(ell, rx_pos, tx_pos)?)?;
    let noise = noise_power(cfg.bandwidth_hz, cfg.noise_figure_db)?;
    Ok(cfg.tx_power_dbm + tx_gain + rx_gain - channel.total_loss - noise)
}

/// Shannon bound in bit/s.
pub fn shannon_capacity(snr_db: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (10f64.powf(snr_db / 10.0)).ln_1p() / std::f64::consts::LN_2
}
