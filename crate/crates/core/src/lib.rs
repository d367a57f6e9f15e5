//! Simulation of a GEO-satellite to high-altitude-platform (HAP) downlink
//! while the HAP flies a Bézier trajectory through points of interest.
//!
//! ```no_run
//! use ntnsim::{mission::run_mission, scenario::Scenario};
//!
//! let rows = run_mission(&Scenario::reference()).unwrap();
//! println!("peak SNR {:.2} dB", rows.iter().map(|r| r.snr_db).fold(f64::MIN, f64::max));
//! ```

pub mod antenna;
pub mod channel;
pub mod geodesy;
pub mod linkbudget;
pub mod mission;
pub mod scenario;
pub mod trajectory;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] scenario::ScenarioError),
    #[error(transparent)]
    Tables(#[from] channel::TableError),
    #[error(transparent)]
    Geodesy(#[from] geodesy::GeodesyError),
    #[error(transparent)]
    Trajectory(#[from] trajectory::TrajectoryError),
    #[error(transparent)]
    Antenna(#[from] antenna::AntennaError),
    #[error(transparent)]
    Channel(#[from] channel::ChannelError),
    #[error(transparent)]
    Link(#[from] linkbudget::LinkError),
    #[error("no result rows to process")]
    EmptyInput,
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for problems with the input description rather than the run itself.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Scenario(_) | Error::Tables(_))
    }
}
