//! Mission execution: trajectory sampling, per-sample channel and link
//! evaluation, frequency sweeps, and result CSV I/O.

use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{evaluate_channel, LossTables};
use crate::geodesy::{Ellipsoid, GeographicCoord};
use crate::linkbudget::{compute_snr, shannon_capacity, LinkConfig};
use crate::scenario::Scenario;
use crate::trajectory::{
    constant_speed_timeline, mission_duration, TimedTrajectory, TrajectoryError, TrajectoryPlan,
};
use crate::Error;

/// Lower bound on the arc-length table size when the scenario leaves it open.
pub const MIN_SAMPLE_COUNT: usize = 100_000;

pub const RESULT_COLUMNS: [&str; 16] = [
    "time_s",
    "lat_deg",
    "lon_deg",
    "alt_m",
    "slant_m",
    "ground_m",
    "elev_deg",
    "fspl_db",
    "sf_db",
    "cl_db",
    "atm_db",
    "tscint_db",
    "iscint_db",
    "total_loss_db",
    "snr_db",
    "capacity_bps",
];

/// One output row. In a sweep the first column holds the frequency in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub time_s: f64,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_m: f64,
    pub slant_m: f64,
    pub ground_m: f64,
    pub elev_deg: f64,
    pub fspl_db: f64,
    pub sf_db: f64,
    pub cl_db: f64,
    pub atm_db: f64,
    pub tscint_db: f64,
    pub iscint_db: f64,
    pub total_loss_db: f64,
    pub snr_db: f64,
    pub capacity_bps: f64,
}

impl ResultRow {
    fn values(&self) -> [f64; 16] {
        [
            self.time_s,
            self.lat_deg,
            self.lon_deg,
            self.alt_m,
            self.slant_m,
            self.ground_m,
            self.elev_deg,
            self.fspl_db,
            self.sf_db,
            self.cl_db,
            self.atm_db,
            self.tscint_db,
            self.iscint_db,
            self.total_loss_db,
            self.snr_db,
            self.capacity_bps,
        ]
    }

    fn from_values(v: [f64; 16]) -> Self {
        Self {
            time_s: v[0],
            lat_deg: v[1],
            lon_deg: v[2],
            alt_m: v[3],
            slant_m: v[4],
            ground_m: v[5],
            elev_deg: v[6],
            fspl_db: v[7],
            sf_db: v[8],
            cl_db: v[9],
            atm_db: v[10],
            tscint_db: v[11],
            iscint_db: v[12],
            total_loss_db: v[13],
            snr_db: v[14],
            capacity_bps: v[15],
        }
    }
}

/// Writes rows with a header; `first_column` renames `time_s` (e.g. `freq_ghz`).
pub fn write_results<W: Write>(
    rows: &[ResultRow],
    out: W,
    first_column: &str,
) -> Result<(), Error> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = RESULT_COLUMNS;
    header[0] = first_column;
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row.values().iter().map(|v| v.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads rows written by [`write_results`], whatever the first column's name.
pub fn read_results<R: Read>(input: R) -> Result<Vec<ResultRow>, Error> {
    let mut reader = csv::Reader::from_reader(input);
    let width = reader.headers()?.len();
    if width != RESULT_COLUMNS.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} columns, found {width}",
            RESULT_COLUMNS.len()
        )));
    }
    reader
        .records()
        .map(|record| {
            let record = record?;
            let mut values = [0.0; 16];
            for (slot, field) in values.iter_mut().zip(record.iter()) {
                *slot = field
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("not a number: {field:?}")))?;
            }
            Ok(ResultRow::from_values(values))
        })
        .collect()
}

/// A scenario bound to its loss tables, ready to run.
#[derive(Debug, Clone)]
pub struct Simulation {
    scenario: Scenario,
    tables: LossTables,
    ell: Ellipsoid,
}

impl Simulation {
    pub fn new(scenario: Scenario) -> Result<Self, Error> {
        let tables = scenario.load_tables()?;
        Ok(Self::with_tables(scenario, tables))
    }

    pub fn with_tables(scenario: Scenario, tables: LossTables) -> Self {
        Self {
            scenario,
            tables,
            ell: Ellipsoid::WGS84,
        }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn tables(&self) -> &LossTables {
        &self.tables
    }

    /// Trajectory plan, sizing the arc-length table from the mission length
    /// when the scenario does not fix it.
    pub fn plan(&self) -> Result<TrajectoryPlan, TrajectoryError> {
        let hap = &self.scenario.hap;
        let coarse = TrajectoryPlan::new(
            hap.pois.clone(),
            hap.sample_count.unwrap_or(MIN_SAMPLE_COUNT),
            hap.speed,
        )?;
        if hap.sample_count.is_some() {
            return Ok(coarse);
        }
        let steps = mission_duration(&coarse, &self.ell)? / self.scenario.update_period;
        coarse.with_sample_count(MIN_SAMPLE_COUNT.max(steps.ceil() as usize))
    }

    /// HAP positions over the mission; a zero-length curve hovers at its only point.
    pub fn timeline(&self) -> Result<TimedTrajectory, Error> {
        let plan = self.plan()?;
        match constant_speed_timeline(&plan, &self.ell, self.scenario.update_period) {
            Err(TrajectoryError::DegenerateCurve) => Ok(TimedTrajectory::hover(
                plan.pois()[0].position,
                self.scenario.hap.hover_duration,
                self.scenario.update_period,
            )?),
            other => Ok(other?),
        }
    }

    /// Evaluates one sample with the generator stream `index`.
    pub fn evaluate(
        &self,
        link: &LinkConfig,
        hap: &GeographicCoord,
        time_s: f64,
        index: u64,
    ) -> Result<ResultRow, Error> {
        let sat = &self.scenario.satellite.position;
        let mut rng = ChaCha8Rng::seed_from_u64(self.scenario.effective_seed());
        rng.set_stream(index);
        let channel = evaluate_channel(
            &self.tables,
            self.scenario.environment,
            link.carrier_frequency_ghz,
            sat,
            hap,
            &self.scenario.channel_options(),
            &self.ell,
            &mut rng,
        )?;
        let snr_db = compute_snr(link, &self.ell, sat, hap, &channel)?;
        Ok(ResultRow {
            time_s,
            lat_deg: hap.lat_deg(),
            lon_deg: hap.lon_deg(),
            alt_m: hap.altitude(),
            slant_m: channel.slant_distance,
            ground_m: self.ell.ground_distance(sat, hap),
            elev_deg: channel.elevation,
            fspl_db: channel.fspl,
            sf_db: channel.shadow_fading,
            cl_db: channel.clutter_loss,
            atm_db: channel.atmospheric_loss,
            tscint_db: channel.tropospheric_scint,
            iscint_db: channel.ionospheric_scint,
            total_loss_db: channel.total_loss,
            snr_db,
            capacity_bps: shannon_capacity(snr_db, link.bandwidth_hz),
        })
    }

    /// Runs the full mission. Output is independent of the thread count.
    pub fn run(&self) -> Result<Vec<ResultRow>, Error> {
        let timeline = self.timeline()?;
        let link = self.scenario.link;
        timeline
            .samples
            .par_iter()
            .enumerate()
            .map(|(i, s)| self.evaluate(&link, &s.position, s.time, i as u64))
            .collect()
    }

    /// The PoI with the best SNR at the scenario carrier.
    pub fn max_gain_poi(&self) -> Result<GeographicCoord, Error> {
        let link = self.scenario.link;
        let mut best: Option<(f64, GeographicCoord)> = None;
        for (i, poi) in self.scenario.hap.pois.iter().enumerate() {
            let row = self.evaluate(&link, &poi.position, 0.0, i as u64)?;
            if best.is_none_or(|(snr, _)| row.snr_db > snr) {
                best = Some((row.snr_db, poi.position));
            }
        }
        Ok(best.expect("scenario has at least one PoI").1)
    }

    /// SNR against carrier frequency with the HAP parked at the max-gain PoI.
    /// Both antennas are retuned at every step.
    pub fn sweep_frequency(
        &self,
        fstart: f64,
        fstop: f64,
        fstep: f64,
    ) -> Result<Vec<ResultRow>, Error> {
        if !(fstart.is_finite()
            && fstart > 0.0
            && fstop >= fstart
            && fstep.is_finite()
            && fstep > 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "bad sweep range start={fstart} stop={fstop} step={fstep}"
            )));
        }
        let hap = self.max_gain_poi()?;
        let count = crate::trajectory::step_count(fstop - fstart, fstep);
        (0..count)
            .into_par_iter()
            .map(|i| {
                let f = fstart + i as f64 * fstep;
                let link = self.scenario.link.at_frequency(f);
                self.evaluate(&link, &hap, f, i as u64)
            })
            .collect()
    }
}

pub fn run_mission(scenario: &Scenario) -> Result<Vec<ResultRow>, Error> {
    Simulation::new(scenario.clone())?.run()
}

/// `(ground_m, snr_db)` sorted by distance; rows at equal distance are averaged.
pub fn snr_vs_ground_distance(rows: &[ResultRow]) -> Result<Vec<(f64, f64)>, Error> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.ground_m, r.snr_db)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    let mut i = 0;
    while i < pairs.len() {
        let d = pairs[i].0;
        let mut j = i;
        let mut sum = 0.0;
        while j < pairs.len() && pairs[j].0 == d {
            sum += pairs[j].1;
            j += 1;
        }
        out.push((d, sum / (j - i) as f64));
        i = j;
    }
    Ok(out)
}

pub fn write_snr_distance<W: Write>(pairs: &[(f64, f64)], out: W) -> Result<(), Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["ground_m", "snr_db"])?;
    for (d, snr) in pairs {
        writer.write_record([d.to_string(), snr.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
