//! Coordinate systems on the WGS84 ellipsoid.
//!
//! Four frames are used throughout the simulator:
//!
//! - geographic: latitude/longitude in radians, altitude in meters above the ellipsoid
//! - geocentric: Earth-centered Cartesian meters (ECEF)
//! - projected: WGS84/Pseudo-Mercator with scaled exponents, used as the Bézier workspace
//! - topocentric: local east-north-up frame at an observer, used for elevation angles
//!
//! Projection convention: `x` is driven by longitude and `y` by latitude, as in
//! EPSG:3857. Angles are radians internally; degrees only appear in the
//! `*_deg` helpers and in elevation results.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::ops::{Add, Mul, Sub};

use thiserror::Error;

/// Margin from the poles inside which the Mercator projection is undefined.
pub const POLE_MARGIN: f64 = 1e-6;

/// Lowest accepted altitude (m).
pub const MIN_ALTITUDE: f64 = -500.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesyError {
    #[error("latitude {0} rad outside [-pi/2, pi/2]")]
    LatitudeOutOfRange(f64),
    #[error("altitude {0} m below the {MIN_ALTITUDE} m floor")]
    AltitudeOutOfRange(f64),
    #[error("non-finite coordinate component")]
    NonFinite,
    #[error("latitude {0} rad too close to a pole for the Mercator projection")]
    PoleSingularity(f64),
    #[error("observer and target coincide")]
    CoincidentPoints,
    #[error("invalid ellipsoid: {0}")]
    InvalidEllipsoid(&'static str),
}

/// Point on the ellipsoid: latitude and longitude in radians, altitude in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeographicCoord {
    latitude: f64,
    longitude: f64,
    altitude: f64,
}

impl GeographicCoord {
    /// Builds a coordinate, normalizing longitude to `[-pi, pi)`.
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self, GeodesyError> {
        if !(latitude.is_finite() && longitude.is_finite() && altitude.is_finite()) {
            return Err(GeodesyError::NonFinite);
        }
        if latitude.abs() > FRAC_PI_2 {
            return Err(GeodesyError::LatitudeOutOfRange(latitude));
        }
        if altitude < MIN_ALTITUDE {
            return Err(GeodesyError::AltitudeOutOfRange(altitude));
        }
        Ok(Self {
            latitude,
            longitude: normalize_longitude(longitude),
            altitude,
        })
    }

    pub fn from_degrees(lat_deg: f64, lon_deg: f64, altitude: f64) -> Result<Self, GeodesyError> {
        Self::new(lat_deg.to_radians(), lon_deg.to_radians(), altitude)
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn altitude(&self) -> f64 {
        self.altitude
    }

    pub fn lat_deg(&self) -> f64 {
        self.latitude.to_degrees()
    }

    pub fn lon_deg(&self) -> f64 {
        self.longitude.to_degrees()
    }

    /// Same latitude/longitude at a different altitude.
    pub fn with_altitude(&self, altitude: f64) -> Result<Self, GeodesyError> {
        Self::new(self.latitude, self.longitude, altitude)
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn normalize_longitude(lon: f64) -> f64 {
    let wrapped = (lon + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Earth-centered, Earth-fixed Cartesian point (m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GeocentricCoord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GeocentricCoord {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Angle between two vectors in radians, stable near 0 and pi.
    pub fn angle_to(&self, other: &Self) -> f64 {
        self.cross(other).norm().atan2(self.dot(other))
    }
}

impl Sub for GeocentricCoord {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Add for GeocentricCoord {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Mul<f64> for GeocentricCoord {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

/// Pseudo-Mercator point; `z` is the altitude carried through unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProjectedCoord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ProjectedCoord {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Local east/north/up unit vectors at a point, expressed in the geocentric frame.
#[derive(Debug, Clone, Copy)]
pub struct EnuBasis {
    pub east: GeocentricCoord,
    pub north: GeocentricCoord,
    pub up: GeocentricCoord,
}

/// Reference ellipsoid plus the exponents that scale the Pseudo-Mercator plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    semi_major_axis: f64,
    eccentricity: f64,
    projection_alpha: f64,
    projection_beta: f64,
}

impl Default for Ellipsoid {
    fn default() -> Self {
        Self::WGS84
    }
}

impl Ellipsoid {
    pub const WGS84: Ellipsoid = Ellipsoid {
        semi_major_axis: 6_378_137.0,
        eccentricity: 0.081_819_190_842_621_5,
        projection_alpha: 25.059,
        projection_beta: 24.665,
    };

    pub fn new(
        semi_major_axis: f64,
        eccentricity: f64,
        projection_alpha: f64,
        projection_beta: f64,
    ) -> Result<Self, GeodesyError> {
        if !(semi_major_axis.is_finite() && semi_major_axis > 0.0) {
            return Err(GeodesyError::InvalidEllipsoid(
                "semi-major axis must be positive",
            ));
        }
        if !(0.0..1.0).contains(&eccentricity) {
            return Err(GeodesyError::InvalidEllipsoid(
                "eccentricity must lie in [0, 1)",
            ));
        }
        if !(projection_alpha.is_finite() && projection_beta.is_finite()) {
            return Err(GeodesyError::InvalidEllipsoid(
                "projection exponents must be finite",
            ));
        }
        Ok(Self {
            semi_major_axis,
            eccentricity,
            projection_alpha,
            projection_beta,
        })
    }

    pub fn semi_major_axis(&self) -> f64 {
        self.semi_major_axis
    }

    pub fn eccentricity(&self) -> f64 {
        self.eccentricity
    }

    pub fn semi_minor_axis(&self) -> f64 {
        self.semi_major_axis * (1.0 - self.eccentricity * self.eccentricity).sqrt()
    }

    /// Width of the projected plane in x, `2^alpha`.
    pub fn projected_width(&self) -> f64 {
        self.projection_alpha.exp2()
    }

    fn x_scale(&self) -> f64 {
        self.projection_alpha.exp2() / TAU
    }

    fn y_scale(&self) -> f64 {
        self.projection_beta.exp2() / TAU
    }

    pub fn to_projected(&self, g: &GeographicCoord) -> Result<ProjectedCoord, GeodesyError> {
        if g.latitude.abs() >= FRAC_PI_2 - POLE_MARGIN {
            return Err(GeodesyError::PoleSingularity(g.latitude));
        }
        let x = self.x_scale() * (g.longitude + PI);
        let y = self.y_scale() * (PI - (FRAC_PI_4 + g.latitude / 2.0).tan().ln());
        Ok(ProjectedCoord::new(x, y, g.altitude))
    }

    /// Analytic inverse of [`Ellipsoid::to_projected`].
    pub fn from_projected(&self, p: &ProjectedCoord) -> Result<GeographicCoord, GeodesyError> {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(GeodesyError::NonFinite);
        }
        let longitude = p.x / self.x_scale() - PI;
        let latitude = 2.0 * (PI - p.y / self.y_scale()).exp().atan() - FRAC_PI_2;
        GeographicCoord::new(latitude, longitude, p.z)
    }

    /// Prime-vertical radius of curvature at a latitude.
    pub fn prime_vertical_radius(&self, latitude: f64) -> f64 {
        let e2 = self.eccentricity * self.eccentricity;
        let s = latitude.sin();
        self.semi_major_axis / (1.0 - e2 * s * s).sqrt()
    }

    pub fn to_geocentric(&self, g: &GeographicCoord) -> GeocentricCoord {
        let e2 = self.eccentricity * self.eccentricity;
        let r = self.prime_vertical_radius(g.latitude);
        let (sin_lat, cos_lat) = g.latitude.sin_cos();
        let (sin_lon, cos_lon) = g.longitude.sin_cos();
        GeocentricCoord::new(
            (r + g.altitude) * cos_lat * cos_lon,
            (r + g.altitude) * cos_lat * sin_lon,
            ((1.0 - e2) * r + g.altitude) * sin_lat,
        )
    }

    /// Straight-line distance between two points through the geocentric frame.
    pub fn slant_distance(&self, a: &GeographicCoord, b: &GeographicCoord) -> f64 {
        (self.to_geocentric(a) - self.to_geocentric(b)).norm()
    }

    /// East/north/up unit vectors; `up` is the ellipsoidal normal.
    pub fn enu_basis(&self, g: &GeographicCoord) -> EnuBasis {
        let (sin_lat, cos_lat) = g.latitude.sin_cos();
        let (sin_lon, cos_lon) = g.longitude.sin_cos();
        EnuBasis {
            east: GeocentricCoord::new(-sin_lon, cos_lon, 0.0),
            north: GeocentricCoord::new(-sin_lat * cos_lon, -sin_lat * sin_lon, cos_lat),
            up: GeocentricCoord::new(cos_lat * cos_lon, cos_lat * sin_lon, sin_lat),
        }
    }

    /// Line-of-sight vector from `observer` to `target` in local ENU components (m).
    pub fn to_topocentric(&self, observer: &GeographicCoord, target: &GeographicCoord) -> [f64; 3] {
        let d = self.to_geocentric(target) - self.to_geocentric(observer);
        let basis = self.enu_basis(observer);
        [d.dot(&basis.east), d.dot(&basis.north), d.dot(&basis.up)]
    }

    /// Elevation of `target` above the observer's local horizontal plane, in degrees.
    pub fn elevation_angle(
        &self,
        observer: &GeographicCoord,
        target: &GeographicCoord,
    ) -> Result<f64, GeodesyError> {
        let [east, north, up] = self.to_topocentric(observer, target);
        let horizontal = east.hypot(north);
        if horizontal == 0.0 && up == 0.0 {
            return Err(GeodesyError::CoincidentPoints);
        }
        Ok(up.atan2(horizontal).to_degrees())
    }

    /// Great-circle distance between the ground projections of two points on a
    /// sphere of radius `a`; altitudes are ignored.
    pub fn ground_distance(&self, a: &GeographicCoord, b: &GeographicCoord) -> f64 {
        let dlat = b.latitude - a.latitude;
        let dlon = b.longitude - a.longitude;
        let h = (dlat / 2.0).sin().powi(2)
            + a.latitude.cos() * b.latitude.cos() * (dlon / 2.0).sin().powi(2);
        2.0 * self.semi_major_axis * h.sqrt().min(1.0).asin()
    }
}
