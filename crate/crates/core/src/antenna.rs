//! Circular-aperture (reflector) antenna pattern.
//!
//! The normalized pattern is `4 |J1(k a sin θ) / (k a sin θ)|²` with `a` the
//! aperture radius and `k` the free-space wavenumber. Boresight is fixed
//! relative to the node's local vertical: inclination 0° points to the local
//! zenith, 180° to the nadir, and intermediate values tilt toward local north.

use std::f64::consts::{FRAC_PI_4, PI};

use thiserror::Error;

use crate::geodesy::{Ellipsoid, GeographicCoord};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default depth of the pattern floor below peak gain (dB).
pub const DEFAULT_PATTERN_FLOOR_DB: f64 = 60.0;

/// Below this argument J1 uses its power series.
const SERIES_LIMIT: f64 = 12.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AntennaError {
    #[error("off-boresight angle {0} deg outside [0, 180]")]
    AngleOutOfRange(f64),
    #[error("invalid antenna configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("node and target positions coincide")]
    CoincidentPoints,
}

/// Bessel function of the first kind, order one.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax < SERIES_LIMIT {
        j1_series(ax)
    } else {
        j1_asymptotic(ax)
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

fn j1_series(x: f64) -> f64 {
    let half = x / 2.0;
    let q = -half * half;
    let mut term = half;
    let mut sum = term;
    for k in 1..60 {
        term *= q / (k as f64 * (k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Hankel expansion, truncated at its smallest term.
fn j1_asymptotic(x: f64) -> f64 {
    let mu = 4.0;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    // a_k / (8x)^k, built incrementally
    let mut term = 1.0;
    let mut previous = f64::INFINITY;
    for k in 1..64 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * eight_x);
        if term.abs() >= previous {
            break;
        }
        previous = term.abs();
        // k odd feeds Q, k even feeds P, with alternating signs
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - 3.0 * FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaConfig {
    pub max_gain_dbi: f64,
    pub aperture_diameter_m: f64,
    /// Degrees from local zenith: 0 points up, 180 points down.
    pub boresight_inclination_deg: f64,
    pub carrier_frequency_ghz: f64,
    /// Depth of the floor below `max_gain_dbi` that clamps nulls and the back hemisphere.
    pub pattern_floor_db: f64,
}

impl AntennaConfig {
    pub fn new(
        max_gain_dbi: f64,
        aperture_diameter_m: f64,
        boresight_inclination_deg: f64,
        carrier_frequency_ghz: f64,
    ) -> Result<Self, AntennaError> {
        let cfg = Self {
            max_gain_dbi,
            aperture_diameter_m,
            boresight_inclination_deg,
            carrier_frequency_ghz,
            pattern_floor_db: DEFAULT_PATTERN_FLOOR_DB,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// HAP antenna of the reference scenario at 20 GHz.
    pub fn hap_default() -> Self {
        Self::new(39.7, 0.6, 0.0, 20.0).expect("valid defaults")
    }

    /// GEO satellite antenna of the reference scenario at 20 GHz.
    pub fn geo_default() -> Self {
        Self::new(58.5, 5.0, 180.0, 20.0).expect("valid defaults")
    }

    pub fn validate(&self) -> Result<(), AntennaError> {
        if !self.max_gain_dbi.is_finite() {
            return Err(AntennaError::InvalidConfig("max gain must be finite"));
        }
        if !(self.aperture_diameter_m.is_finite() && self.aperture_diameter_m > 0.0) {
            return Err(AntennaError::InvalidConfig(
                "aperture diameter must be positive",
            ));
        }
        if !(0.0..=180.0).contains(&self.boresight_inclination_deg) {
            return Err(AntennaError::InvalidConfig(
                "boresight inclination must lie in [0, 180]",
            ));
        }
        if !(self.carrier_frequency_ghz.is_finite() && self.carrier_frequency_ghz > 0.0) {
            return Err(AntennaError::InvalidConfig(
                "carrier frequency must be positive",
            ));
        }
        if !(self.pattern_floor_db.is_finite() && self.pattern_floor_db >= 0.0) {
            return Err(AntennaError::InvalidConfig(
                "pattern floor must be non-negative",
            ));
        }
        Ok(())
    }

    pub fn with_frequency(mut self, carrier_frequency_ghz: f64) -> Self {
        self.carrier_frequency_ghz = carrier_frequency_ghz;
        self
    }

    /// `k a`: wavenumber times aperture radius.
    pub fn electrical_radius(&self) -> f64 {
        let wavenumber = 2.0 * PI * self.carrier_frequency_ghz * 1e9 / SPEED_OF_LIGHT;
        wavenumber * self.aperture_diameter_m / 2.0
    }

    pub fn floor_gain_dbi(&self) -> f64 {
        self.max_gain_dbi - self.pattern_floor_db
    }

    /// Gain (dBi) at an off-boresight angle in degrees.
    pub fn gain(&self, off_boresight_deg: f64) -> Result<f64, AntennaError> {
        if !(0.0..=180.0).contains(&off_boresight_deg) {
            return Err(AntennaError::AngleOutOfRange(off_boresight_deg));
        }
        if off_boresight_deg == 0.0 {
            return Ok(self.max_gain_dbi);
        }
        if off_boresight_deg > 90.0 {
            return Ok(self.floor_gain_dbi());
        }
        let u = self.electrical_radius() * off_boresight_deg.to_radians().sin();
        let ratio = if u < 1e-8 { 0.5 } else { bessel_j1(u) / u };
        let normalized = 4.0 * ratio * ratio;
        let gain = self.max_gain_dbi + 10.0 * normalized.log10();
        Ok(gain.min(self.max_gain_dbi).max(self.floor_gain_dbi()))
    }

    /// Angle (degrees) between the boresight at `node` and the line of sight to `target`.
    pub fn off_boresight_angle(
        &self,
        ell: &Ellipsoid,
        node: &GeographicCoord,
        target: &GeographicCoord,
    ) -> Result<f64, AntennaError> {
        let los = ell.to_geocentric(target) - ell.to_geocentric(node);
        if los.norm() == 0.0 {
            return Err(AntennaError::CoincidentPoints);
        }
        let basis = ell.enu_basis(node);
        let (sin_i, cos_i) = self.boresight_inclination_deg.to_radians().sin_cos();
        let boresight = basis.up * cos_i + basis.north * sin_i;
        Ok(boresight.angle_to(&los).to_degrees())
    }
}
