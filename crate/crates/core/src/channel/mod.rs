//! Large-scale NTN channel losses.
//!
//! Total loss is the sum of free-space path loss, shadow fading, clutter
//! loss, atmospheric absorption, and tropospheric and ionospheric
//! scintillation. Random terms draw from a caller-supplied generator so that
//! results depend only on the seed handed in.

mod tables;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

pub use tables::{
    elevation_bucket, Environment, FrequencyBand, LossTables, TableError, TablePaths, TableTexts,
    ELEVATION_BUCKETS, TABLE_DIR_ENV,
};

use crate::geodesy::{Ellipsoid, GeodesyError, GeographicCoord};

/// Atmospheric absorption always applies at or above this frequency (GHz).
pub const ABSORPTION_MIN_FREQUENCY_GHZ: f64 = 10.0;
/// Below this elevation (deg) absorption applies at every frequency.
pub const ABSORPTION_LOW_ELEVATION_DEG: f64 = 10.0;
/// Ionospheric scintillation applies below this absolute latitude (deg)...
pub const IONOSPHERIC_MAX_LATITUDE_DEG: f64 = 20.0;
/// ...or below this frequency (GHz).
pub const IONOSPHERIC_MAX_FREQUENCY_GHZ: f64 = 6.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("{what} must be positive, got {value}")]
    NonPositiveInput { what: &'static str, value: f64 },
    #[error("elevation {0} deg outside (0, 90]")]
    ElevationOutOfRange(f64),
    #[error("no {table} entry for {key}")]
    MissingTableEntry { table: &'static str, key: String },
    #[error(
        "frequency {frequency_ghz} GHz outside the zenith-attenuation table [{min_ghz}, {max_ghz}]"
    )]
    FrequencyOutOfTable {
        frequency_ghz: f64,
        min_ghz: f64,
        max_ghz: f64,
    },
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
}

fn check_elevation(elevation_deg: f64) -> Result<(), ChannelError> {
    if elevation_deg > 0.0 && elevation_deg <= 90.0 {
        Ok(())
    } else {
        Err(ChannelError::ElevationOutOfRange(elevation_deg))
    }
}

/// `32.45 + 20 log10(fc[GHz]) + 20 log10(d[m])`.
pub fn free_space_path_loss(frequency_ghz: f64, distance_m: f64) -> Result<f64, ChannelError> {
    if frequency_ghz.is_nan() || frequency_ghz <= 0.0 {
        return Err(ChannelError::NonPositiveInput {
            what: "carrier frequency",
            value: frequency_ghz,
        });
    }
    if distance_m.is_nan() || distance_m <= 0.0 {
        return Err(ChannelError::NonPositiveInput {
            what: "distance",
            value: distance_m,
        });
    }
    Ok(32.45 + 20.0 * frequency_ghz.log10() + 20.0 * distance_m.log10())
}

/// Zero-mean Gaussian draw (dB) with the tabulated standard deviation.
pub fn sample_shadow_fading<R: Rng + ?Sized>(
    tables: &LossTables,
    env: Environment,
    los: bool,
    elevation_deg: f64,
    rng: &mut R,
) -> Result<f64, ChannelError> {
    check_elevation(elevation_deg)?;
    let bucket = elevation_bucket(elevation_deg);
    let sigma =
        tables
            .shadow_sigma(env, los, bucket)
            .ok_or_else(|| ChannelError::MissingTableEntry {
                table: "shadow sigma",
                key: format!("{env}/{}/{bucket}", if los { "LOS" } else { "NLOS" }),
            })?;
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and positive");
    Ok(normal.sample(rng))
}

/// Clutter loss (dB); zero under line of sight.
pub fn clutter_loss(
    tables: &LossTables,
    env: Environment,
    los: bool,
    elevation_deg: f64,
) -> Result<f64, ChannelError> {
    check_elevation(elevation_deg)?;
    if los {
        return Ok(0.0);
    }
    let bucket = elevation_bucket(elevation_deg);
    tables
        .clutter_loss(env, bucket)
        .ok_or_else(|| ChannelError::MissingTableEntry {
            table: "clutter loss",
            key: format!("{env}/{bucket}"),
        })
}

/// Zenith attenuation divided by `sin(elevation)`, when absorption applies.
pub fn atmospheric_absorption(
    tables: &LossTables,
    frequency_ghz: f64,
    elevation_deg: f64,
) -> Result<f64, ChannelError> {
    check_elevation(elevation_deg)?;
    let applies = frequency_ghz >= ABSORPTION_MIN_FREQUENCY_GHZ
        || elevation_deg < ABSORPTION_LOW_ELEVATION_DEG;
    if !applies {
        return Ok(0.0);
    }
    let zenith = tables.zenith_attenuation(frequency_ghz).ok_or_else(|| {
        let (min_ghz, max_ghz) = tables.zenith_range();
        ChannelError::FrequencyOutOfTable {
            frequency_ghz,
            min_ghz,
            max_ghz,
        }
    })?;
    Ok(zenith / elevation_deg.to_radians().sin())
}

/// `(fc/4)^-1.5 · P_fluc(4 GHz) / √2` at low latitude or low frequency, else 0.
pub fn ionospheric_scintillation(
    frequency_ghz: f64,
    latitude_deg: f64,
    p_fluc_4ghz_db: f64,
) -> Result<f64, ChannelError> {
    if frequency_ghz.is_nan() || frequency_ghz <= 0.0 {
        return Err(ChannelError::NonPositiveInput {
            what: "carrier frequency",
            value: frequency_ghz,
        });
    }
    let applies = latitude_deg.abs() < IONOSPHERIC_MAX_LATITUDE_DEG
        || frequency_ghz < IONOSPHERIC_MAX_FREQUENCY_GHZ;
    if !applies {
        return Ok(0.0);
    }
    Ok((frequency_ghz / 4.0).powf(-1.5) * p_fluc_4ghz_db / std::f64::consts::SQRT_2)
}

/// 99th-percentile tropospheric scintillation (dB) by elevation, or 0 when disabled.
pub fn tropospheric_scintillation(
    tables: &LossTables,
    elevation_deg: f64,
    enabled: bool,
) -> Result<f64, ChannelError> {
    check_elevation(elevation_deg)?;
    if !enabled {
        return Ok(0.0);
    }
    let bucket = elevation_bucket(elevation_deg);
    tables
        .tropospheric_scintillation(bucket)
        .ok_or_else(|| ChannelError::MissingTableEntry {
            table: "tropospheric scintillation",
            key: bucket.to_string(),
        })
}

/// Line-of-sight state: `forced` when given, else a Bernoulli draw.
pub fn los_probability_draw<R: Rng + ?Sized>(
    tables: &LossTables,
    env: Environment,
    elevation_deg: f64,
    rng: &mut R,
    forced: Option<bool>,
) -> Result<bool, ChannelError> {
    check_elevation(elevation_deg)?;
    if let Some(los) = forced {
        return Ok(los);
    }
    let bucket = elevation_bucket(elevation_deg);
    let p = tables
        .los_probability(env, bucket)
        .ok_or_else(|| ChannelError::MissingTableEntry {
            table: "LOS probability",
            key: format!("{env}/{bucket}"),
        })?;
    Ok(rng.gen::<f64>() < p)
}

/// Which channel terms are active.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelOptions {
    pub shadowing: bool,
    pub tropospheric_scintillation: bool,
    pub ionospheric_scintillation: bool,
    /// Ionospheric fluctuation at 4 GHz (dB); only read when ionospheric scintillation is on.
    pub p_fluc_4ghz_db: f64,
    pub force_los: Option<bool>,
    /// Fraction of the zenith column applied, in (0, 1].
    pub atmospheric_column_fraction: f64,
}

impl Default for ChannelOptions {
    fn default() -> Self {
        Self {
            shadowing: false,
            tropospheric_scintillation: false,
            ionospheric_scintillation: false,
            p_fluc_4ghz_db: 0.0,
            force_los: Some(true),
            atmospheric_column_fraction: 1.0,
        }
    }
}

/// Per-sample loss decomposition together with the link geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelState {
    pub slant_distance: f64,
    pub elevation: f64,
    pub los: bool,
    pub fspl: f64,
    pub shadow_fading: f64,
    pub clutter_loss: f64,
    pub atmospheric_loss: f64,
    pub tropospheric_scint: f64,
    pub ionospheric_scint: f64,
    pub total_loss: f64,
}

/// Evaluates every loss term between `tx` and `rx`.
///
/// Elevation and ionospheric latitude are taken at the lower of the two
/// endpoints, which is the terminal looking up through the atmosphere. The
/// LOS state is drawn before shadow fading.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_channel<R: Rng + ?Sized>(
    tables: &LossTables,
    env: Environment,
    frequency_ghz: f64,
    tx: &GeographicCoord,
    rx: &GeographicCoord,
    options: &ChannelOptions,
    ell: &Ellipsoid,
    rng: &mut R,
) -> Result<ChannelState, ChannelError> {
    let (ground, sky) = if rx.altitude() <= tx.altitude() {
        (rx, tx)
    } else {
        (tx, rx)
    };
    let slant_distance = ell.slant_distance(tx, rx);
    let elevation = ell.elevation_angle(ground, sky)?;
    check_elevation(elevation)?;

    let fspl = free_space_path_loss(frequency_ghz, slant_distance)?;
    let los = los_probability_draw(tables, env, elevation, rng, options.force_los)?;
    let shadow_fading = if options.shadowing {
        sample_shadow_fading(tables, env, los, elevation, rng)?
    } else {
        0.0
    };
    let clutter_loss = clutter_loss(tables, env, los, elevation)?;
    let atmospheric_loss = atmospheric_absorption(tables, frequency_ghz, elevation)?
        * options.atmospheric_column_fraction;
    let tropospheric_scint =
        tropospheric_scintillation(tables, elevation, options.tropospheric_scintillation)?;
    let ionospheric_scint = if options.ionospheric_scintillation {
        ionospheric_scintillation(frequency_ghz, ground.lat_deg(), options.p_fluc_4ghz_db)?
    } else {
        0.0
    };
    let total_loss = fspl
        + shadow_fading
        + clutter_loss
        + atmospheric_loss
        + tropospheric_scint
        + ionospheric_scint;
    Ok(ChannelState {
        slant_distance,
        elevation,
        los,
        fspl,
        shadow_fading,
        clutter_loss,
        atmospheric_loss,
        tropospheric_scint,
        ionospheric_scint,
        total_loss,
    })
}
