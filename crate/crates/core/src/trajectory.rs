//! HAP trajectory generation.
//!
//! Points of interest (PoIs) are projected to the Pseudo-Mercator plane and
//! blended with a generalized Bézier curve in which PoI `i` contributes
//! `l_i` consecutive Bernstein terms. A PoI with a higher interest level pulls
//! the curve closer to itself. With every level equal to one this is the
//! textbook Bézier curve over the projected PoIs.
//!
//! The curve parameter is not arc-length, so the constant-speed timeline is
//! produced by tabulating cumulative geocentric chord length over the
//! uniformly sampled curve and inverting it.

use std::io::{self, Write};

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::geodesy::{Ellipsoid, GeodesyError, GeographicCoord, ProjectedCoord};

/// PoIs must stay within this latitude (degrees) to be projectable.
pub const MAX_POI_LATITUDE_DEG: f64 = 85.0;

/// Curves shorter than this (m) are treated as zero-length.
pub const DEGENERATE_LENGTH: f64 = 1e-3;

/// Largest degree for which binomial coefficients are computed exactly.
const EXACT_BINOMIAL_MAX_DEGREE: u32 = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("trajectory plan has no points of interest")]
    EmptyPlan,
    #[error("point of interest {index} has interest level 0")]
    ZeroInterest { index: usize },
    #[error("point of interest {index} at latitude {lat_deg} deg cannot be projected (limit {MAX_POI_LATITUDE_DEG} deg)")]
    UnprojectablePoi { index: usize, lat_deg: f64 },
    #[error("sample count must be at least 2, got {0}")]
    TooFewSamples(usize),
    #[error("speed must be positive and finite, got {0}")]
    InvalidSpeed(f64),
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimeStep(f64),
    #[error("curve parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
    #[error("trajectory has zero arc length")]
    DegenerateCurve,
    #[error(transparent)]
    Geodesy(#[from] GeodesyError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOfInterest {
    pub position: GeographicCoord,
    pub interest_level: u32,
}

impl PointOfInterest {
    pub fn new(position: GeographicCoord, interest_level: u32) -> Self {
        Self {
            position,
            interest_level,
        }
    }
}

/// Ordered PoIs, the number of uniform parameter samples `K`, and the HAP speed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPlan {
    pois: Vec<PointOfInterest>,
    sample_count: usize,
    speed: f64,
}

impl TrajectoryPlan {
    pub fn new(
        pois: Vec<PointOfInterest>,
        sample_count: usize,
        speed: f64,
    ) -> Result<Self, TrajectoryError> {
        if pois.is_empty() {
            return Err(TrajectoryError::EmptyPlan);
        }
        for (index, poi) in pois.iter().enumerate() {
            if poi.interest_level == 0 {
                return Err(TrajectoryError::ZeroInterest { index });
            }
            if poi.position.lat_deg().abs() >= MAX_POI_LATITUDE_DEG {
                return Err(TrajectoryError::UnprojectablePoi {
                    index,
                    lat_deg: poi.position.lat_deg(),
                });
            }
        }
        if sample_count < 2 {
            return Err(TrajectoryError::TooFewSamples(sample_count));
        }
        if !(speed.is_finite() && speed > 0.0) {
            return Err(TrajectoryError::InvalidSpeed(speed));
        }
        Ok(Self {
            pois,
            sample_count,
            speed,
        })
    }

    pub fn pois(&self) -> &[PointOfInterest] {
        &self.pois
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn with_sample_count(&self, sample_count: usize) -> Result<Self, TrajectoryError> {
        Self::new(self.pois.clone(), sample_count, self.speed)
    }

    pub fn with_speed(&self, speed: f64) -> Result<Self, TrajectoryError> {
        Self::new(self.pois.clone(), self.sample_count, speed)
    }

    /// Curve degree: total interest minus one.
    pub fn degree(&self) -> u32 {
        self.pois.iter().map(|p| p.interest_level).sum::<u32>() - 1
    }

    /// Offset of each PoI's first Bernstein term: sum of the preceding levels.
    pub fn offsets(&self) -> Vec<u32> {
        self.pois
            .iter()
            .scan(0u32, |acc, p| {
                let start = *acc;
                *acc += p.interest_level;
                Some(start)
            })
            .collect()
    }
}

/// Exact binomial coefficient; callers keep `n` small enough for `u128`.
fn binomial_exact(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Bernstein basis of one degree with coefficients prepared once.
#[derive(Debug, Clone)]
enum Bernstein {
    Exact(Vec<f64>),
    LogSpace(Vec<f64>),
}

impl Bernstein {
    fn new(degree: u32) -> Self {
        if degree <= EXACT_BINOMIAL_MAX_DEGREE {
            Bernstein::Exact(
                (0..=degree)
                    .map(|k| binomial_exact(degree, k) as f64)
                    .collect(),
            )
        } else {
            let ln_n = ln_gamma(degree as f64 + 1.0);
            Bernstein::LogSpace(
                (0..=degree)
                    .map(|k| ln_n - ln_gamma(k as f64 + 1.0) - ln_gamma((degree - k) as f64 + 1.0))
                    .collect(),
            )
        }
    }

    /// All `degree + 1` basis values at `t`.
    fn weights(&self, t: f64, out: &mut Vec<f64>) {
        out.clear();
        match self {
            Bernstein::Exact(coeffs) => {
                let n = coeffs.len() - 1;
                let s = 1.0 - t;
                // t^k ascending, (1-t)^(n-k) filled from the top
                let mut tk = 1.0;
                out.extend(coeffs.iter().map(|c| {
                    let v = c * tk;
                    tk *= t;
                    v
                }));
                let mut sk = 1.0;
                for k in (0..=n).rev() {
                    out[k] *= sk;
                    sk *= s;
                }
            }
            Bernstein::LogSpace(ln_coeffs) => {
                let n = ln_coeffs.len() - 1;
                if t == 0.0 || t == 1.0 {
                    let hot = if t == 0.0 { 0 } else { n };
                    out.extend((0..=n).map(|k| if k == hot { 1.0 } else { 0.0 }));
                    return;
                }
                let (ln_t, ln_s) = (t.ln(), (1.0 - t).ln());
                out.extend(
                    ln_coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, c)| (c + k as f64 * ln_t + (n - k) as f64 * ln_s).exp()),
                );
            }
        }
    }
}

/// Generalized Bézier curve over projected PoIs.
#[derive(Debug, Clone)]
pub struct BezierCurve {
    points: Vec<ProjectedCoord>,
    levels: Vec<u32>,
    offsets: Vec<u32>,
    basis: Bernstein,
}

impl BezierCurve {
    pub fn new(plan: &TrajectoryPlan, ell: &Ellipsoid) -> Result<Self, TrajectoryError> {
        let points = plan
            .pois()
            .iter()
            .map(|p| ell.to_projected(&p.position))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            points,
            levels: plan.pois().iter().map(|p| p.interest_level).collect(),
            offsets: plan.offsets(),
            basis: Bernstein::new(plan.degree()),
        })
    }

    pub fn projected_pois(&self) -> &[ProjectedCoord] {
        &self.points
    }

    /// Control polygon of the equivalent ordinary Bézier: PoI `i` repeated `l_i` times.
    pub fn control_polygon(&self) -> Vec<ProjectedCoord> {
        self.points
            .iter()
            .zip(&self.levels)
            .flat_map(|(p, &l)| std::iter::repeat_n(*p, l as usize))
            .collect()
    }

    pub fn evaluate(&self, t: f64) -> Result<ProjectedCoord, TrajectoryError> {
        let mut scratch = Vec::with_capacity(self.offsets.len());
        self.evaluate_with(t, &mut scratch)
    }

    fn evaluate_with(
        &self,
        t: f64,
        weights: &mut Vec<f64>,
    ) -> Result<ProjectedCoord, TrajectoryError> {
        if !(0.0..=1.0).contains(&t) {
            return Err(TrajectoryError::ParameterOutOfRange(t));
        }
        if self.points.len() == 1 {
            return Ok(self.points[0]);
        }
        self.basis.weights(t, weights);
        let mut q = ProjectedCoord::default();
        for ((p, &level), &offset) in self.points.iter().zip(&self.levels).zip(&self.offsets) {
            let start = offset as usize;
            let w: f64 = weights[start..start + level as usize].iter().sum();
            q.x += w * p.x;
            q.y += w * p.y;
            q.z += w * p.z;
        }
        Ok(q)
    }
}

pub fn bezier_curve(
    plan: &TrajectoryPlan,
    ell: &Ellipsoid,
    t: f64,
) -> Result<ProjectedCoord, TrajectoryError> {
    BezierCurve::new(plan, ell)?.evaluate(t)
}

/// `q̄_k` at `t = k/K` for `k = 0..=K`.
pub fn sample_uniform_parameter(
    plan: &TrajectoryPlan,
    ell: &Ellipsoid,
) -> Result<Vec<ProjectedCoord>, TrajectoryError> {
    let curve = BezierCurve::new(plan, ell)?;
    let k_max = plan.sample_count();
    let mut weights = Vec::new();
    (0..=k_max)
        .map(|k| curve.evaluate_with(k as f64 / k_max as f64, &mut weights))
        .collect()
}

/// Cumulative geocentric chord length against the curve parameter.
#[derive(Debug, Clone)]
pub struct ArcLengthTable {
    params: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ArcLengthTable {
    pub fn build(plan: &TrajectoryPlan, ell: &Ellipsoid) -> Result<Self, TrajectoryError> {
        let samples = sample_uniform_parameter(plan, ell)?;
        let k_max = plan.sample_count();
        let mut cumulative = Vec::with_capacity(samples.len());
        let mut previous = None;
        let mut total = 0.0;
        for p in &samples {
            let here = ell.to_geocentric(&ell.from_projected(p)?);
            if let Some(prev) = previous {
                total += (here - prev).norm();
            }
            cumulative.push(total);
            previous = Some(here);
        }
        let params = (0..=k_max).map(|k| k as f64 / k_max as f64).collect();
        Ok(Self { params, cumulative })
    }

    pub fn total_length(&self) -> f64 {
        *self
            .cumulative
            .last()
            .expect("table has at least two knots")
    }

    /// Curve parameter at arc length `s`, by linear interpolation between knots.
    pub fn parameter_at(&self, s: f64) -> f64 {
        let total = self.total_length();
        if s <= 0.0 {
            return 0.0;
        }
        if s >= total {
            return 1.0;
        }
        let hi = self.cumulative.partition_point(|&c| c < s);
        let lo = hi - 1;
        let span = self.cumulative[hi] - self.cumulative[lo];
        let frac = if span > 0.0 {
            (s - self.cumulative[lo]) / span
        } else {
            0.0
        };
        self.params[lo] + frac * (self.params[hi] - self.params[lo])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub time: f64,
    pub position: GeographicCoord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedTrajectory {
    pub samples: Vec<TrajectorySample>,
    pub total_duration: f64,
}

impl TimedTrajectory {
    /// A HAP held at one position for `duration` seconds.
    pub fn hover(
        position: GeographicCoord,
        duration: f64,
        time_step: f64,
    ) -> Result<Self, TrajectoryError> {
        if !(time_step.is_finite() && time_step > 0.0) {
            return Err(TrajectoryError::InvalidTimeStep(time_step));
        }
        let count = step_count(duration.max(0.0), time_step);
        let samples = (0..count)
            .map(|k| TrajectorySample {
                time: k as f64 * time_step,
                position,
            })
            .collect();
        Ok(Self {
            samples,
            total_duration: duration.max(0.0),
        })
    }

    /// CSV with columns `time_s,lat_deg,lon_deg,alt_m`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "time_s,lat_deg,lon_deg,alt_m")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{}",
                s.time,
                s.position.lat_deg(),
                s.position.lon_deg(),
                s.position.altitude()
            )?;
        }
        Ok(())
    }
}

/// `floor(span / step) + 1`, tolerant of rounding when `span` is an exact multiple.
pub(crate) fn step_count(span: f64, step: f64) -> usize {
    ((span / step) * (1.0 + 1e-12)).floor() as usize + 1
}

/// Samples the curve every `time_step` seconds at the plan's constant speed.
pub fn constant_speed_timeline(
    plan: &TrajectoryPlan,
    ell: &Ellipsoid,
    time_step: f64,
) -> Result<TimedTrajectory, TrajectoryError> {
    if !(time_step.is_finite() && time_step > 0.0) {
        return Err(TrajectoryError::InvalidTimeStep(time_step));
    }
    let curve = BezierCurve::new(plan, ell)?;
    let table = ArcLengthTable::build(plan, ell)?;
    let length = table.total_length();
    if length < DEGENERATE_LENGTH {
        return Err(TrajectoryError::DegenerateCurve);
    }
    let total_duration = length / plan.speed();
    let count = step_count(total_duration, time_step);
    let mut weights = Vec::new();
    let samples = (0..count)
        .map(|k| {
            let time = k as f64 * time_step;
            let t = table.parameter_at(time * plan.speed());
            let q = curve.evaluate_with(t, &mut weights)?;
            Ok(TrajectorySample {
                time,
                position: ell.from_projected(&q)?,
            })
        })
        .collect::<Result<Vec<_>, TrajectoryError>>()?;
    Ok(TimedTrajectory {
        samples,
        total_duration,
    })
}

/// Arc length divided by speed; zero for a zero-length curve.
pub fn mission_duration(plan: &TrajectoryPlan, ell: &Ellipsoid) -> Result<f64, TrajectoryError> {
    Ok(ArcLengthTable::build(plan, ell)?.total_length() / plan.speed())
}

#[cfg(test)]
mod tests {
    use super::*;

    const WGS: Ellipsoid = Ellipsoid::WGS84;

    fn poi(lat: f64, lon: f64, level: u32) -> PointOfInterest {
        PointOfInterest::new(
            GeographicCoord::from_degrees(lat, lon, 20_000.0).unwrap(),
            level,
        )
    }

    #[test]
    fn plan_validation() {
        assert_eq!(
            TrajectoryPlan::new(vec![], 10, 24.0),
            Err(TrajectoryError::EmptyPlan)
        );
        assert_eq!(
            TrajectoryPlan::new(vec![poi(0.0, 0.0, 0)], 10, 24.0),
            Err(TrajectoryError::ZeroInterest { index: 0 })
        );
        assert!(matches!(
            TrajectoryPlan::new(vec![poi(86.0, 0.0, 1)], 10, 24.0),
            Err(TrajectoryError::UnprojectablePoi { index: 0, .. })
        ));
        assert_eq!(
            TrajectoryPlan::new(vec![poi(0.0, 0.0, 1)], 1, 24.0),
            Err(TrajectoryError::TooFewSamples(1))
        );
        assert!(TrajectoryPlan::new(vec![poi(0.0, 0.0, 1)], 2, 0.0).is_err());
    }

    #[test]
    fn degree_and_offsets() {
        let plan = TrajectoryPlan::new(
            vec![poi(0.0, 0.0, 2), poi(1.0, 0.0, 3), poi(2.0, 0.0, 1)],
            10,
            24.0,
        )
        .unwrap();
        assert_eq!(plan.degree(), 5);
        assert_eq!(plan.offsets(), vec![0, 2, 5]);
    }

    #[test]
    fn binomials_exact_at_limit() {
        assert_eq!(binomial_exact(60, 30), 118_264_581_564_861_424);
        assert_eq!(binomial_exact(5, 0), 1);
        assert_eq!(binomial_exact(5, 5), 1);
    }

    #[test]
    fn log_space_basis_matches_exact() {
        let exact = Bernstein::new(60);
        let Bernstein::Exact(c) = &exact else {
            panic!()
        };
        let ln: Vec<f64> = c.iter().map(|v| v.ln()).collect();
        let logspace = Bernstein::LogSpace(ln);
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for t in [0.0, 0.1, 0.37, 0.5, 0.9, 1.0] {
            exact.weights(t, &mut a);
            logspace.weights(t, &mut b);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-12, "t={t}");
            }
        }
    }

    #[test]
    fn high_degree_partition_of_unity() {
        let basis = Bernstein::new(150);
        let mut w = Vec::new();
        for t in [0.0, 0.01, 0.5, 0.99, 1.0] {
            basis.weights(t, &mut w);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn single_poi_is_constant() {
        let plan = TrajectoryPlan::new(vec![poi(10.0, 20.0, 4)], 10, 24.0).unwrap();
        let curve = BezierCurve::new(&plan, &WGS).unwrap();
        let p0 = curve.projected_pois()[0];
        for t in [0.0, 0.25, 0.5, 1.0] {
            let q = curve.evaluate(t).unwrap();
            assert!((q.x - p0.x).abs() < 1e-6 && (q.y - p0.y).abs() < 1e-6);
        }
        assert_eq!(mission_duration(&plan, &WGS).unwrap(), 0.0);
        assert_eq!(
            constant_speed_timeline(&plan, &WGS, 1.0),
            Err(TrajectoryError::DegenerateCurve)
        );
    }

    #[test]
    fn parameter_out_of_range() {
        let plan = TrajectoryPlan::new(vec![poi(0.0, 0.0, 1), poi(1.0, 0.0, 1)], 10, 24.0).unwrap();
        assert!(bezier_curve(&plan, &WGS, 1.5).is_err());
        assert!(bezier_curve(&plan, &WGS, -0.1).is_err());
    }

    #[test]
    fn uniform_sampling_linear_midpoint() {
        let plan = TrajectoryPlan::new(vec![poi(0.0, 0.0, 1), poi(0.0, 2.0, 1)], 2, 24.0).unwrap();
        let s = sample_uniform_parameter(&plan, &WGS).unwrap();
        assert_eq!(s.len(), 3);
        let mid = WGS
            .to_projected(&GeographicCoord::from_degrees(0.0, 1.0, 20_000.0).unwrap())
            .unwrap();
        assert!((s[1].x - mid.x).abs() < 1e-6);
        assert!((s[1].y - mid.y).abs() < 1e-6);
        let curve = BezierCurve::new(&plan, &WGS).unwrap();
        assert_eq!(s[0], curve.projected_pois()[0]);
        assert_eq!(s[2], curve.projected_pois()[1]);
    }

    #[test]
    fn hover_timeline() {
        let g = GeographicCoord::from_degrees(0.0, 0.0, 20_000.0).unwrap();
        let t = TimedTrajectory::hover(g, 10.0, 1.0).unwrap();
        assert_eq!(t.samples.len(), 11);
        assert_eq!(
            TimedTrajectory::hover(g, 0.0, 1.0).unwrap().samples.len(),
            1
        );
    }

    #[test]
    fn csv_export_header() {
        let g = GeographicCoord::from_degrees(1.0, 2.0, 3.0).unwrap();
        let mut buf = Vec::new();
        TimedTrajectory::hover(g, 1.0, 1.0)
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("time_s,lat_deg,lon_deg,alt_m"));
        assert_eq!(lines.count(), 2);
    }
}
