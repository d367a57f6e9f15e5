//! Scenario description and its JSON schema.
//!
//! Every key is camelCase; unknown keys are rejected with their path. Only
//! `satellite.position` is mandatory, and every other omitted field takes the
//! reference-mission value. The README documents every key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer};
use thiserror::Error;

use crate::antenna::{AntennaConfig, DEFAULT_PATTERN_FLOOR_DB};
use crate::channel::{
    ChannelOptions, Environment, FrequencyBand, LossTables, TableError, TablePaths, TABLE_DIR_ENV,
};
use crate::geodesy::GeographicCoord;
use crate::linkbudget::LinkConfig;
use crate::trajectory::{PointOfInterest, MAX_POI_LATITUDE_DEG};

pub const SCHEMA_VERSION: u32 = 1;

/// Packaged reference scenario.
pub const REFERENCE_JSON: &str = include_str!("../scenarios/reference.json");

/// Interest levels of the packaged reference mission (Svalbard, Tehran, Gulf of Guinea, Reykjavík).
pub const REFERENCE_INTEREST_LEVELS: [u32; 4] = [1, 6, 20, 1];

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error("missing required field `{path}`")]
    MissingField { path: String },
    #[error(transparent)]
    Tables(#[from] TableError),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        path: path.into(),
        message: message.into(),
    }
}

fn double_option<'de, D, T>(de: D) -> Result<Option<Option<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Option::<T>::deserialize(de).map(Some)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawScenario {
    schema_version: Option<u32>,
    satellite: Option<RawSatellite>,
    hap: Option<RawHap>,
    link: Option<RawLink>,
    environment: Option<Environment>,
    toggles: Option<RawToggles>,
    update_period: Option<f64>,
    time_resolution: Option<f64>,
    seed: Option<u64>,
    shadow_band: Option<FrequencyBand>,
    #[serde(rename = "pFluc4GHz")]
    p_fluc_4ghz: Option<f64>,
    table_paths: Option<RawTablePaths>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawSatellite {
    position: Option<RawPosition>,
    antenna: Option<RawAntenna>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawPosition {
    latitude_deg: f64,
    longitude_deg: f64,
    altitude_m: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawAntenna {
    max_gain: Option<f64>,
    aperture_diameter: Option<f64>,
    boresight_inclination: Option<f64>,
    pattern_floor: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawHap {
    pois: Option<Vec<RawPoi>>,
    speed: Option<f64>,
    sample_count: Option<usize>,
    hover_duration: Option<f64>,
    antenna: Option<RawAntenna>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawPoi {
    latitude_deg: f64,
    longitude_deg: f64,
    altitude_m: f64,
    interest_level: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawLink {
    tx_power: Option<f64>,
    bandwidth: Option<f64>,
    noise_figure: Option<f64>,
    carrier_frequency: Option<f64>,
    eirp_density: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawToggles {
    shadowing: Option<bool>,
    tropospheric_scint: Option<bool>,
    ionospheric_scint: Option<bool>,
    #[serde(default, deserialize_with = "double_option")]
    force_los: Option<Option<bool>>,
    atmospheric_column_fraction: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct RawTablePaths {
    zenith_attenuation: Option<PathBuf>,
    shadow_sigma: Option<PathBuf>,
    clutter_loss: Option<PathBuf>,
    tropospheric_scintillation: Option<PathBuf>,
    los_probability: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteConfig {
    pub position: GeographicCoord,
    pub antenna: AntennaConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HapConfig {
    pub pois: Vec<PointOfInterest>,
    pub speed: f64,
    /// Uniform parameter samples `K`; derived from the mission length when absent.
    pub sample_count: Option<usize>,
    /// How long a HAP on a zero-length trajectory is simulated (s).
    pub hover_duration: f64,
    pub antenna: AntennaConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Toggles {
    pub shadowing: bool,
    pub tropospheric_scint: bool,
    pub ionospheric_scint: bool,
    /// `Some` forces the LOS state; `None` draws it from the LOS-probability table.
    pub force_los: Option<bool>,
    pub atmospheric_column_fraction: f64,
}

impl Default for Toggles {
    fn default() -> Self {
        Self {
            shadowing: false,
            tropospheric_scint: false,
            ionospheric_scint: false,
            force_los: Some(true),
            atmospheric_column_fraction: 1.0,
        }
    }
}

/// Validated simulation description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub schema_version: u32,
    pub satellite: SatelliteConfig,
    pub hap: HapConfig,
    /// Downlink: the satellite antenna transmits, the HAP antenna receives.
    pub link: LinkConfig,
    pub eirp_density_dbw_per_mhz: Option<f64>,
    pub environment: Environment,
    pub toggles: Toggles,
    pub update_period: f64,
    /// Carried from the reference parameter set; informational only.
    pub time_resolution: f64,
    pub seed: Option<u64>,
    pub shadow_band: FrequencyBand,
    pub p_fluc_4ghz_db: Option<f64>,
    pub table_paths: TablePaths,
}

fn reference_pois() -> Vec<PointOfInterest> {
    [
        (78.244789, 15.4843571),
        (35.7074505, 51.1498211),
        (0.04, -4.95),
        (64.133542, -21.9348416),
    ]
    .into_iter()
    .zip(REFERENCE_INTEREST_LEVELS)
    .map(|((lat, lon), level)| {
        PointOfInterest::new(
            GeographicCoord::from_degrees(lat, lon, 20_000.0).expect("valid PoI"),
            level,
        )
    })
    .collect()
}

impl Scenario {
    /// The reference GEO-to-HAP downlink scenario.
    pub fn reference() -> Self {
        let link = LinkConfig::reference_downlink();
        Self {
            schema_version: SCHEMA_VERSION,
            satellite: SatelliteConfig {
                position: GeographicCoord::from_degrees(0.04, -4.95, 35_770_880.0).expect("valid"),
                antenna: link.tx_antenna,
            },
            hap: HapConfig {
                pois: reference_pois(),
                speed: 24.0,
                sample_count: None,
                hover_duration: 0.0,
                antenna: link.rx_antenna,
            },
            link,
            eirp_density_dbw_per_mhz: Some(40.0),
            environment: Environment::Rural,
            toggles: Toggles::default(),
            update_period: 1.0,
            time_resolution: 1000.0,
            seed: None,
            shadow_band: FrequencyBand::Ka,
            p_fluc_4ghz_db: None,
            table_paths: TablePaths::default(),
        }
    }

    /// True when any random term is active.
    pub fn is_stochastic(&self) -> bool {
        self.toggles.shadowing || self.toggles.force_los.is_none()
    }

    pub fn effective_seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn channel_options(&self) -> ChannelOptions {
        ChannelOptions {
            shadowing: self.toggles.shadowing,
            tropospheric_scintillation: self.toggles.tropospheric_scint,
            ionospheric_scintillation: self.toggles.ionospheric_scint,
            p_fluc_4ghz_db: self.p_fluc_4ghz_db.unwrap_or(0.0),
            force_los: self.toggles.force_los,
            atmospheric_column_fraction: self.toggles.atmospheric_column_fraction,
        }
    }

    /// Loss tables, honoring explicit paths and then `NTNSIM_TABLE_DIR`.
    pub fn load_tables(&self) -> Result<LossTables, TableError> {
        let dir = std::env::var_os(TABLE_DIR_ENV).map(PathBuf::from);
        LossTables::load(&self.table_paths, dir.as_deref(), self.shadow_band)
    }
}

/// Adjustments applied between parsing and validation.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Directory that relative table paths resolve against.
    pub base_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    load_scenario_with(text, &LoadOptions::default())
}

/// Reads a scenario file; relative table paths resolve against its directory.
pub fn load_scenario_file(path: &Path, seed: Option<u64>) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| invalid(path.display().to_string(), e.to_string()))?;
    let options = LoadOptions {
        base_dir: path.parent().map(Path::to_path_buf),
        seed,
    };
    load_scenario_with(&text, &options)
}

pub fn load_scenario_with(text: &str, options: &LoadOptions) -> Result<Scenario, ScenarioError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    if !value.is_object() {
        return Err(invalid("$", "scenario must be a JSON object"));
    }
    let raw: RawScenario = serde_path_to_error::deserialize(value).map_err(classify_serde_error)?;
    build(raw, options)
}

fn classify_serde_error(err: serde_path_to_error::Error<serde_json::Error>) -> ScenarioError {
    let parent = err.path().to_string();
    let message = err.inner().to_string();
    let join = |leaf: &str| {
        if parent == "." || parent.is_empty() {
            leaf.to_owned()
        } else {
            format!("{parent}.{leaf}")
        }
    };
    if let Some(field) = backticked(&message, "missing field `") {
        return ScenarioError::MissingField { path: join(field) };
    }
    if message.starts_with("unknown field `") {
        return invalid(parent, "unknown key");
    }
    invalid(parent, message)
}

fn backticked<'a>(message: &'a str, prefix: &str) -> Option<&'a str> {
    let rest = message.strip_prefix(prefix)?;
    rest.split('`').next()
}

fn positive(path: &str, value: f64) -> Result<f64, ScenarioError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(path, format!("must be positive, got {value}")))
    }
}

fn coordinate(path: &str, lat: f64, lon: f64, alt: f64) -> Result<GeographicCoord, ScenarioError> {
    if !(-90.0..=90.0).contains(&lat) {
        return Err(invalid(
            format!("{path}.latitudeDeg"),
            format!("{lat} outside [-90, 90]"),
        ));
    }
    if !lon.is_finite() {
        return Err(invalid(format!("{path}.longitudeDeg"), "must be finite"));
    }
    GeographicCoord::from_degrees(lat, lon, alt)
        .map_err(|e| invalid(format!("{path}.altitudeM"), e.to_string()))
}

fn antenna(
    path: &str,
    raw: Option<RawAntenna>,
    default: AntennaConfig,
    frequency_ghz: f64,
) -> Result<AntennaConfig, ScenarioError> {
    let raw = raw.unwrap_or_default();
    let cfg = AntennaConfig {
        max_gain_dbi: raw.max_gain.unwrap_or(default.max_gain_dbi),
        aperture_diameter_m: raw.aperture_diameter.unwrap_or(default.aperture_diameter_m),
        boresight_inclination_deg: raw
            .boresight_inclination
            .unwrap_or(default.boresight_inclination_deg),
        carrier_frequency_ghz: frequency_ghz,
        pattern_floor_db: raw.pattern_floor.unwrap_or(DEFAULT_PATTERN_FLOOR_DB),
    };
    if !cfg.max_gain_dbi.is_finite() {
        return Err(invalid(format!("{path}.maxGain"), "must be finite"));
    }
    positive(&format!("{path}.apertureDiameter"), cfg.aperture_diameter_m)?;
    if !(0.0..=180.0).contains(&cfg.boresight_inclination_deg) {
        return Err(invalid(
            format!("{path}.boresightInclination"),
            "must lie in [0, 180]",
        ));
    }
    if !(cfg.pattern_floor_db.is_finite() && cfg.pattern_floor_db >= 0.0) {
        return Err(invalid(
            format!("{path}.patternFloor"),
            "must be non-negative",
        ));
    }
    Ok(cfg)
}

fn build(raw: RawScenario, options: &LoadOptions) -> Result<Scenario, ScenarioError> {
    let reference = Scenario::reference();

    let schema_version = raw.schema_version.unwrap_or(SCHEMA_VERSION);
    if schema_version != SCHEMA_VERSION {
        return Err(invalid(
            "schemaVersion",
            format!("unsupported version {schema_version}, expected {SCHEMA_VERSION}"),
        ));
    }

    let raw_link = raw.link.unwrap_or_default();
    let carrier_frequency_ghz = positive(
        "link.carrierFrequency",
        raw_link
            .carrier_frequency
            .unwrap_or(reference.link.carrier_frequency_ghz),
    )?;

    let raw_sat = raw.satellite.unwrap_or_default();
    let position = raw_sat
        .position
        .ok_or_else(|| ScenarioError::MissingField {
            path: "satellite.position".into(),
        })?;
    let sat_position = coordinate(
        "satellite.position",
        position.latitude_deg,
        position.longitude_deg,
        position.altitude_m,
    )?;
    let sat_antenna = antenna(
        "satellite.antenna",
        raw_sat.antenna,
        reference.satellite.antenna,
        carrier_frequency_ghz,
    )?;

    let raw_hap = raw.hap.unwrap_or_default();
    let pois = match raw_hap.pois {
        None => reference.hap.pois.clone(),
        Some(list) if list.is_empty() => {
            return Err(invalid(
                "hap.pois",
                "at least one point of interest is required",
            ))
        }
        Some(list) => list
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let path = format!("hap.pois[{i}]");
                if p.latitude_deg.abs() >= MAX_POI_LATITUDE_DEG {
                    return Err(invalid(
                        format!("{path}.latitudeDeg"),
                        format!("|latitude| must stay below {MAX_POI_LATITUDE_DEG} deg"),
                    ));
                }
                let position = coordinate(&path, p.latitude_deg, p.longitude_deg, p.altitude_m)?;
                let level = p.interest_level.unwrap_or(1);
                if level == 0 {
                    return Err(invalid(
                        format!("{path}.interestLevel"),
                        "must be at least 1",
                    ));
                }
                Ok(PointOfInterest::new(position, level))
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    let speed = positive("hap.speed", raw_hap.speed.unwrap_or(reference.hap.speed))?;
    if let Some(k) = raw_hap.sample_count {
        if k < 2 {
            return Err(invalid("hap.sampleCount", "must be at least 2"));
        }
    }
    let hover_duration = raw_hap.hover_duration.unwrap_or(0.0);
    if !(hover_duration.is_finite() && hover_duration >= 0.0) {
        return Err(invalid("hap.hoverDuration", "must be non-negative"));
    }
    let hap_antenna = antenna(
        "hap.antenna",
        raw_hap.antenna,
        reference.hap.antenna,
        carrier_frequency_ghz,
    )?;

    let link = LinkConfig {
        tx_power_dbm: raw_link.tx_power.unwrap_or(reference.link.tx_power_dbm),
        tx_antenna: sat_antenna,
        rx_antenna: hap_antenna,
        bandwidth_hz: positive(
            "link.bandwidth",
            raw_link.bandwidth.unwrap_or(reference.link.bandwidth_hz),
        )?,
        noise_figure_db: raw_link
            .noise_figure
            .unwrap_or(reference.link.noise_figure_db),
        carrier_frequency_ghz,
    };
    if !link.tx_power_dbm.is_finite() {
        return Err(invalid("link.txPower", "must be finite"));
    }
    if !link.noise_figure_db.is_finite() {
        return Err(invalid("link.noiseFigure", "must be finite"));
    }
    let eirp_density_dbw_per_mhz = match raw_link.eirp_density {
        Some(v) if !v.is_finite() => return Err(invalid("link.eirpDensity", "must be finite")),
        Some(v) => Some(v),
        None => reference.eirp_density_dbw_per_mhz,
    };
    if let Some(density) = eirp_density_dbw_per_mhz {
        let check = link.eirp_consistency(density);
        if !check.is_consistent() {
            log::warn!(
                "configured EIRP {:.2} dBW differs from {:.2} dBW implied by {density} dBW/MHz over the bandwidth",
                check.configured_dbw,
                check.expected_dbw
            );
        }
    }

    let raw_toggles = raw.toggles.unwrap_or_default();
    let defaults = Toggles::default();
    let toggles = Toggles {
        shadowing: raw_toggles.shadowing.unwrap_or(defaults.shadowing),
        tropospheric_scint: raw_toggles
            .tropospheric_scint
            .unwrap_or(defaults.tropospheric_scint),
        ionospheric_scint: raw_toggles
            .ionospheric_scint
            .unwrap_or(defaults.ionospheric_scint),
        force_los: raw_toggles.force_los.unwrap_or(defaults.force_los),
        atmospheric_column_fraction: raw_toggles
            .atmospheric_column_fraction
            .unwrap_or(defaults.atmospheric_column_fraction),
    };
    let fraction = toggles.atmospheric_column_fraction;
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(invalid(
            "toggles.atmosphericColumnFraction",
            "must lie in (0, 1]",
        ));
    }

    let update_period = positive(
        "updatePeriod",
        raw.update_period.unwrap_or(reference.update_period),
    )?;
    let time_resolution = positive(
        "timeResolution",
        raw.time_resolution.unwrap_or(reference.time_resolution),
    )?;

    let p_fluc_4ghz_db = raw.p_fluc_4ghz;
    match p_fluc_4ghz_db {
        Some(p) if !(p.is_finite() && p >= 0.0) => {
            return Err(invalid("pFluc4GHz", "must be finite and non-negative"))
        }
        None if toggles.ionospheric_scint => {
            return Err(invalid(
                "pFluc4GHz",
                "required when toggles.ionosphericScint is true",
            ))
        }
        _ => {}
    }

    let seed = options.seed.or(raw.seed);

    let base = options.base_dir.as_deref();
    let resolve = |p: Option<PathBuf>| {
        p.map(|p| match base {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        })
    };
    let raw_paths = raw.table_paths.unwrap_or_default();
    let table_paths = TablePaths {
        zenith_attenuation: resolve(raw_paths.zenith_attenuation),
        shadow_sigma: resolve(raw_paths.shadow_sigma),
        clutter_loss: resolve(raw_paths.clutter_loss),
        tropospheric_scintillation: resolve(raw_paths.tropospheric_scintillation),
        los_probability: resolve(raw_paths.los_probability),
    };

    let scenario = Scenario {
        schema_version,
        satellite: SatelliteConfig {
            position: sat_position,
            antenna: sat_antenna,
        },
        hap: HapConfig {
            pois,
            speed,
            sample_count: raw_hap.sample_count,
            hover_duration,
            antenna: hap_antenna,
        },
        link,
        eirp_density_dbw_per_mhz,
        environment: raw.environment.unwrap_or(reference.environment),
        toggles,
        update_period,
        time_resolution,
        seed,
        shadow_band: raw.shadow_band.unwrap_or(reference.shadow_band),
        p_fluc_4ghz_db,
        table_paths,
    };
    if scenario.is_stochastic() && scenario.seed.is_none() {
        return Err(invalid(
            "seed",
            "required when shadowing or probabilistic LOS is enabled",
        ));
    }
    Ok(scenario)
}
