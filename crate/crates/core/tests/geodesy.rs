use std::f64::consts::PI;

use ntnsim::geodesy::{Ellipsoid, GeographicCoord};
use proptest::prelude::*;

const WGS: Ellipsoid = Ellipsoid::WGS84;
const A: f64 = 6_378_137.0;
const E: f64 = 0.081_819_190_842_621_5;

/// Closed-form ECEF written out independently of the library.
fn ecef(lat: f64, lon: f64, h: f64) -> [f64; 3] {
    let n = A / (1.0 - E * E * lat.sin().powi(2)).sqrt();
    [
        (n + h) * lat.cos() * lon.cos(),
        (n + h) * lat.cos() * lon.sin(),
        (n * (1.0 - E * E) + h) * lat.sin(),
    ]
}

#[test]
fn equator_origin_and_pole() {
    let o = WGS.to_geocentric(&GeographicCoord::new(0.0, 0.0, 0.0).unwrap());
    assert_eq!((o.x, o.y, o.z), (A, 0.0, 0.0));
    let pole = WGS.to_geocentric(&GeographicCoord::new(PI / 2.0, 0.0, 0.0).unwrap());
    assert!((pole.z - A * (1.0 - E * E).sqrt()).abs() < 1e-3);
    assert!((pole.z - 6_356_752.314_245).abs() < 1e-3);
}

#[test]
fn projection_reference_points() {
    let p = WGS
        .to_projected(&GeographicCoord::new(0.0, 0.0, 20_000.0).unwrap())
        .unwrap();
    let half_width = 2f64.powf(25.059) / 2.0;
    let half_height = 2f64.powf(24.665) / 2.0;
    assert!((p.x - half_width).abs() < 1e-6 * half_width);
    assert!((p.y - half_height).abs() < 1e-6 * half_height);
    assert_eq!(p.z, 20_000.0);
}

#[test]
fn elevation_of_zenith_and_horizon() {
    let obs = GeographicCoord::from_degrees(45.0, 10.0, 0.0).unwrap();
    let above = obs.with_altitude(1000.0).unwrap();
    assert!((WGS.elevation_angle(&obs, &above).unwrap() - 90.0).abs() < 1e-9);
    assert!(WGS.elevation_angle(&obs, &obs).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projected_round_trip(lat in -85.0f64..85.0, lon in -180.0f64..180.0, h in 0.0f64..50_000.0) {
        let g = GeographicCoord::from_degrees(lat, lon, h).unwrap();
        let back = WGS.from_projected(&WGS.to_projected(&g).unwrap()).unwrap();
        prop_assert!((back.latitude() - g.latitude()).abs() < 1e-9);
        let dlon = (back.longitude() - g.longitude()).abs();
        prop_assert!(dlon.min(2.0 * PI - dlon) < 1e-9);
        prop_assert_eq!(back.altitude(), h);
    }

    #[test]
    fn geocentric_matches_closed_form(lat in -90.0f64..=90.0, lon in -180.0f64..180.0, h in -500.0f64..4e7) {
        let g = GeographicCoord::from_degrees(lat, lon, h).unwrap();
        let c = WGS.to_geocentric(&g);
        let expected = ecef(g.latitude(), g.longitude(), h);
        for (got, want) in [c.x, c.y, c.z].iter().zip(expected) {
            prop_assert!((got - want).abs() <= 1e-6 * want.abs().max(1.0));
        }
    }

    #[test]
    fn geocentric_norm_bounds(lat in -90.0f64..=90.0, lon in -180.0f64..180.0, h in 0.0f64..1e6) {
        let norm = WGS.to_geocentric(&GeographicCoord::from_degrees(lat, lon, h).unwrap()).norm();
        let b = A * (1.0 - E * E).sqrt();
        prop_assert!(norm >= b + h - 1e-6);
        prop_assert!(norm <= A + h + 1e-6);
    }

    #[test]
    fn slant_distance_is_a_metric(
        la in -80.0f64..80.0, oa in -180.0f64..180.0, ha in 0.0f64..4e7,
        lb in -80.0f64..80.0, ob in -180.0f64..180.0, hb in 0.0f64..4e7,
    ) {
        let a = GeographicCoord::from_degrees(la, oa, ha).unwrap();
        let b = GeographicCoord::from_degrees(lb, ob, hb).unwrap();
        prop_assert_eq!(WGS.slant_distance(&a, &b), WGS.slant_distance(&b, &a));
        prop_assert!(WGS.slant_distance(&a, &b) >= (ha - hb).abs() - 1e-6);
    }

    #[test]
    fn ground_distance_matches_vector_angle(
        la in -89.0f64..89.0, oa in -180.0f64..180.0,
        lb in -89.0f64..89.0, ob in -180.0f64..180.0,
    ) {
        let a = GeographicCoord::from_degrees(la, oa, 0.0).unwrap();
        let b = GeographicCoord::from_degrees(lb, ob, 0.0).unwrap();
        let unit = |g: &GeographicCoord| {
            [g.latitude().cos() * g.longitude().cos(), g.latitude().cos() * g.longitude().sin(), g.latitude().sin()]
        };
        let (u, v) = (unit(&a), unit(&b));
        let cross = [u[1]*v[2]-u[2]*v[1], u[2]*v[0]-u[0]*v[2], u[0]*v[1]-u[1]*v[0]];
        let sin = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
        let cos = u[0]*v[0] + u[1]*v[1] + u[2]*v[2];
        let expected = A * sin.atan2(cos);
        prop_assert!((WGS.ground_distance(&a, &b) - expected).abs() < 1e-3);
    }

    #[test]
    fn elevation_stays_in_range(
        la in -80.0f64..80.0, oa in -180.0f64..180.0,
        lb in -80.0f64..80.0, ob in -180.0f64..180.0, hb in 1.0f64..4e7,
    ) {
        let obs = GeographicCoord::from_degrees(la, oa, 0.0).unwrap();
        let tgt = GeographicCoord::from_degrees(lb, ob, hb).unwrap();
        let el = WGS.elevation_angle(&obs, &tgt).unwrap();
        prop_assert!((-90.0..=90.0).contains(&el));
    }
}
