//! Loss tables indexed by environment, visibility, elevation bucket and frequency.
//!
//! Every table is a plain CSV file with a header row. Packaged copies are
//! embedded in the binary; a directory named by `NTNSIM_TABLE_DIR` or
//! explicit per-table paths take precedence.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TABLE_DIR_ENV: &str = "NTNSIM_TABLE_DIR";

const ZENITH_CSV: &str = include_str!("../../data/zenith_attenuation.csv");
const SIGMA_S_CSV: &str = include_str!("../../data/shadow_sigma_s.csv");
const SIGMA_KA_CSV: &str = include_str!("../../data/shadow_sigma_ka.csv");
const CLUTTER_S_CSV: &str = include_str!("../../data/clutter_loss_s.csv");
const CLUTTER_KA_CSV: &str = include_str!("../../data/clutter_loss_ka.csv");
const TROPO_CSV: &str = include_str!("../../data/tropospheric_scintillation.csv");
const LOS_CSV: &str = include_str!("../../data/los_probability.csv");

/// Elevation buckets (degrees) shared by every elevation-indexed table.
pub const ELEVATION_BUCKETS: [u32; 9] = [10, 20, 30, 40, 50, 60, 70, 80, 90];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{table}: cannot read {path}: {source}")]
    Io {
        table: &'static str,
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{table}: {source}")]
    Csv {
        table: &'static str,
        source: csv::Error,
    },
    #[error("{table}: {message}")]
    Invalid {
        table: &'static str,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Environment {
    DenseUrban,
    Urban,
    Suburban,
    Rural,
}

impl Environment {
    pub const ALL: [Environment; 4] = [
        Environment::DenseUrban,
        Environment::Urban,
        Environment::Suburban,
        Environment::Rural,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Environment::DenseUrban => "denseUrban",
            Environment::Urban => "urban",
            Environment::Suburban => "suburban",
            Environment::Rural => "rural",
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Environment {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Environment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown environment `{s}`"))
    }
}

/// Which frequency-band column of the shadowing/clutter tables to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FrequencyBand {
    S,
    #[default]
    Ka,
}

impl FrequencyBand {
    fn suffix(&self) -> &'static str {
        match self {
            FrequencyBand::S => "s",
            FrequencyBand::Ka => "ka",
        }
    }
}

/// Optional per-table overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TablePaths {
    pub zenith_attenuation: Option<PathBuf>,
    pub shadow_sigma: Option<PathBuf>,
    pub clutter_loss: Option<PathBuf>,
    pub tropospheric_scintillation: Option<PathBuf>,
    pub los_probability: Option<PathBuf>,
}

/// Rounds an elevation to the nearest 10° bucket, ties upward, clamped to [10, 90].
pub fn elevation_bucket(elevation_deg: f64) -> u32 {
    let nearest = (elevation_deg / 10.0 + 0.5).floor() * 10.0;
    nearest.clamp(10.0, 90.0) as u32
}

#[derive(Debug, Deserialize)]
struct ZenithRow {
    frequency_ghz: f64,
    zenith_db: f64,
}

#[derive(Debug, Deserialize)]
struct SigmaRow {
    env: String,
    los: bool,
    elev_bucket: u32,
    sigma_db: f64,
}

#[derive(Debug, Deserialize)]
struct ClutterRow {
    env: String,
    elev_bucket: u32,
    clutter_db: f64,
}

#[derive(Debug, Deserialize)]
struct ScintRow {
    elev_bucket: u32,
    scint_db: f64,
}

#[derive(Debug, Deserialize)]
struct LosRow {
    env: String,
    elev_bucket: u32,
    p_los: f64,
}

fn parse_rows<T: for<'de> Deserialize<'de>>(
    table: &'static str,
    text: &str,
) -> Result<Vec<T>, TableError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .map_err(|source| TableError::Csv { table, source })
}

fn invalid(table: &'static str, message: impl Into<String>) -> TableError {
    TableError::Invalid {
        table,
        message: message.into(),
    }
}

fn parse_env(table: &'static str, s: &str) -> Result<Environment, TableError> {
    s.parse().map_err(|m: String| invalid(table, m))
}

fn check_bucket(table: &'static str, bucket: u32) -> Result<u32, TableError> {
    if ELEVATION_BUCKETS.contains(&bucket) {
        Ok(bucket)
    } else {
        Err(invalid(
            table,
            format!("elevation bucket {bucket} is not a multiple of 10 in [10, 90]"),
        ))
    }
}

fn check_db(table: &'static str, value: f64) -> Result<f64, TableError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(invalid(
            table,
            format!("value {value} must be finite and non-negative"),
        ))
    }
}

/// Immutable lookup tables for the large-scale channel model.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTables {
    zenith: Vec<(f64, f64)>,
    shadow_sigma: HashMap<(Environment, bool, u32), f64>,
    clutter: HashMap<(Environment, u32), f64>,
    tropospheric: HashMap<u32, f64>,
    los_probability: HashMap<(Environment, u32), f64>,
}

/// CSV texts of the five tables.
#[derive(Debug, Clone, Copy)]
pub struct TableTexts<'a> {
    pub zenith_attenuation: &'a str,
    pub shadow_sigma: &'a str,
    pub clutter_loss: &'a str,
    pub tropospheric_scintillation: &'a str,
    pub los_probability: &'a str,
}

impl LossTables {
    /// Tables embedded in the crate.
    pub fn packaged(band: FrequencyBand) -> Self {
        let (sigma, clutter) = match band {
            FrequencyBand::S => (SIGMA_S_CSV, CLUTTER_S_CSV),
            FrequencyBand::Ka => (SIGMA_KA_CSV, CLUTTER_KA_CSV),
        };
        Self::from_texts(TableTexts {
            zenith_attenuation: ZENITH_CSV,
            shadow_sigma: sigma,
            clutter_loss: clutter,
            tropospheric_scintillation: TROPO_CSV,
            los_probability: LOS_CSV,
        })
        .expect("packaged tables are valid")
    }

    /// Resolves each table from, in order: an explicit path, `table_dir`, the packaged copy.
    pub fn load(
        paths: &TablePaths,
        table_dir: Option<&Path>,
        band: FrequencyBand,
    ) -> Result<Self, TableError> {
        let packaged_sigma = match band {
            FrequencyBand::S => SIGMA_S_CSV,
            FrequencyBand::Ka => SIGMA_KA_CSV,
        };
        let packaged_clutter = match band {
            FrequencyBand::S => CLUTTER_S_CSV,
            FrequencyBand::Ka => CLUTTER_KA_CSV,
        };
        let suffix = band.suffix();
        let zenith = resolve(
            "zenith attenuation",
            paths.zenith_attenuation.as_deref(),
            table_dir,
            "zenith_attenuation.csv",
            ZENITH_CSV,
        )?;
        let sigma = resolve(
            "shadow sigma",
            paths.shadow_sigma.as_deref(),
            table_dir,
            &format!("shadow_sigma_{suffix}.csv"),
            packaged_sigma,
        )?;
        let clutter = resolve(
            "clutter loss",
            paths.clutter_loss.as_deref(),
            table_dir,
            &format!("clutter_loss_{suffix}.csv"),
            packaged_clutter,
        )?;
        let tropo = resolve(
            "tropospheric scintillation",
            paths.tropospheric_scintillation.as_deref(),
            table_dir,
            "tropospheric_scintillation.csv",
            TROPO_CSV,
        )?;
        let los = resolve(
            "LOS probability",
            paths.los_probability.as_deref(),
            table_dir,
            "los_probability.csv",
            LOS_CSV,
        )?;
        Self::from_texts(TableTexts {
            zenith_attenuation: &zenith,
            shadow_sigma: &sigma,
            clutter_loss: &clutter,
            tropospheric_scintillation: &tropo,
            los_probability: &los,
        })
    }

    pub fn from_texts(texts: TableTexts<'_>) -> Result<Self, TableError> {
        const ZENITH: &str = "zenith attenuation";
        let mut zenith = Vec::new();
        for row in parse_rows::<ZenithRow>(ZENITH, texts.zenith_attenuation)? {
            if !(row.frequency_ghz.is_finite() && row.frequency_ghz > 0.0) {
                return Err(invalid(
                    ZENITH,
                    format!("frequency {} must be positive", row.frequency_ghz),
                ));
            }
            if !(row.zenith_db.is_finite() && row.zenith_db > 0.0) {
                return Err(invalid(
                    ZENITH,
                    format!("attenuation {} must be positive", row.zenith_db),
                ));
            }
            if let Some(&(last, _)) = zenith.last() {
                if row.frequency_ghz <= last {
                    return Err(invalid(ZENITH, "frequencies must be strictly increasing"));
                }
            }
            zenith.push((row.frequency_ghz, row.zenith_db));
        }
        if zenith.is_empty() {
            return Err(invalid(ZENITH, "table is empty"));
        }

        const SIGMA: &str = "shadow sigma";
        let mut shadow_sigma = HashMap::new();
        for row in parse_rows::<SigmaRow>(SIGMA, texts.shadow_sigma)? {
            let key = (
                parse_env(SIGMA, &row.env)?,
                row.los,
                check_bucket(SIGMA, row.elev_bucket)?,
            );
            shadow_sigma.insert(key, check_db(SIGMA, row.sigma_db)?);
        }

        const CLUTTER: &str = "clutter loss";
        let mut clutter = HashMap::new();
        for row in parse_rows::<ClutterRow>(CLUTTER, texts.clutter_loss)? {
            let key = (
                parse_env(CLUTTER, &row.env)?,
                check_bucket(CLUTTER, row.elev_bucket)?,
            );
            clutter.insert(key, check_db(CLUTTER, row.clutter_db)?);
        }

        const TROPO: &str = "tropospheric scintillation";
        let mut tropospheric = HashMap::new();
        for row in parse_rows::<ScintRow>(TROPO, texts.tropospheric_scintillation)? {
            tropospheric.insert(
                check_bucket(TROPO, row.elev_bucket)?,
                check_db(TROPO, row.scint_db)?,
            );
        }

        const LOS: &str = "LOS probability";
        let mut los_probability = HashMap::new();
        for row in parse_rows::<LosRow>(LOS, texts.los_probability)? {
            if !(0.0..=1.0).contains(&row.p_los) {
                return Err(invalid(
                    LOS,
                    format!("probability {} outside [0, 1]", row.p_los),
                ));
            }
            let key = (
                parse_env(LOS, &row.env)?,
                check_bucket(LOS, row.elev_bucket)?,
            );
            los_probability.insert(key, row.p_los);
        }
        for env in Environment::ALL {
            let mut previous = 0.0;
            for bucket in ELEVATION_BUCKETS {
                if let Some(&p) = los_probability.get(&(env, bucket)) {
                    if p < previous {
                        return Err(invalid(
                            LOS,
                            format!("{env}: probability decreases at {bucket} deg"),
                        ));
                    }
                    previous = p;
                }
            }
        }

        Ok(Self {
            zenith,
            shadow_sigma,
            clutter,
            tropospheric,
            los_probability,
        })
    }

    /// Frequency span (GHz) covered by the zenith-attenuation grid.
    pub fn zenith_range(&self) -> (f64, f64) {
        (self.zenith[0].0, self.zenith[self.zenith.len() - 1].0)
    }

    /// Zenith attenuation (dB), log-linear in frequency; `None` outside the grid.
    pub fn zenith_attenuation(&self, frequency_ghz: f64) -> Option<f64> {
        let (lo, hi) = self.zenith_range();
        if !(lo..=hi).contains(&frequency_ghz) {
            return None;
        }
        let upper = self.zenith.partition_point(|&(f, _)| f < frequency_ghz);
        let (f1, a1) = self.zenith[upper];
        if f1 == frequency_ghz || upper == 0 {
            return Some(a1);
        }
        let (f0, a0) = self.zenith[upper - 1];
        let frac = (frequency_ghz - f0) / (f1 - f0);
        Some((a0.ln() + frac * (a1.ln() - a0.ln())).exp())
    }

    pub fn shadow_sigma(&self, env: Environment, los: bool, bucket: u32) -> Option<f64> {
        self.shadow_sigma.get(&(env, los, bucket)).copied()
    }

    pub fn clutter_loss(&self, env: Environment, bucket: u32) -> Option<f64> {
        self.clutter.get(&(env, bucket)).copied()
    }

    pub fn tropospheric_scintillation(&self, bucket: u32) -> Option<f64> {
        self.tropospheric.get(&bucket).copied()
    }

    pub fn los_probability(&self, env: Environment, bucket: u32) -> Option<f64> {
        self.los_probability.get(&(env, bucket)).copied()
    }
}

fn resolve(
    table: &'static str,
    explicit: Option<&Path>,
    table_dir: Option<&Path>,
    file_name: &str,
    packaged: &str,
) -> Result<String, TableError> {
    // Explicit paths must exist; the directory only supplies the files it holds.
    let path = match (explicit, table_dir.map(|d| d.join(file_name))) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(candidate)) if candidate.exists() => candidate,
        _ => return Ok(packaged.to_owned()),
    };
    fs::read_to_string(&path).map_err(|source| TableError::Io {
        table,
        path,
        source,
    })
}
