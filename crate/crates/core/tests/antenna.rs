use ntnsim::antenna::AntennaConfig;
use ntnsim::geodesy::{Ellipsoid, GeographicCoord};
use proptest::prelude::*;

const WGS: Ellipsoid = Ellipsoid::WGS84;

/// First pattern null found by scanning the gain, in degrees.
fn first_null(cfg: &AntennaConfig) -> f64 {
    let mut theta = 0.0;
    let step = 1e-5;
    let mut prev = cfg.gain(0.0).unwrap();
    loop {
        theta += step;
        let g = cfg.gain(theta).unwrap();
        if g > prev || g == cfg.floor_gain_dbi() {
            return theta;
        }
        prev = g;
    }
}

#[test]
fn null_angle_halves_with_frequency() {
    let low = AntennaConfig::geo_default().with_frequency(10.0);
    let high = low.with_frequency(20.0);
    let ratio = first_null(&high).to_radians().sin() / first_null(&low).to_radians().sin();
    assert!((ratio - 0.5).abs() < 2e-3, "{ratio}");
}

#[test]
fn reference_beam_footprint() {
    let geo = AntennaConfig::geo_default();
    assert!((geo.electrical_radius() - 1047.9).abs() < 1.0);
    let theta = first_null(&geo).to_radians();
    let footprint = 35_750_880.0 * theta.tan();
    assert!((footprint - 131e3).abs() < 5e3, "{footprint}");
}

proptest! {
    #[test]
    fn gain_is_bounded(theta in 0.0f64..=180.0, f in 1.0f64..100.0, d in 0.1f64..10.0, g in 0.0f64..70.0) {
        let cfg = AntennaConfig::new(g, d, 0.0, f).unwrap();
        let gain = cfg.gain(theta).unwrap();
        prop_assert!(gain <= g && gain >= cfg.floor_gain_dbi());
    }

    #[test]
    fn main_lobe_is_monotone(f in 1.0f64..100.0, d in 0.1f64..10.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let cfg = AntennaConfig::new(40.0, d, 0.0, f).unwrap();
        let null = (3.831_705_970_207_512 / cfg.electrical_radius()).min(1.0).asin().to_degrees();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(cfg.gain(lo * null).unwrap() >= cfg.gain(hi * null).unwrap());
    }

    #[test]
    fn zenith_antenna_angle_complements_elevation(
        lat in -80.0f64..80.0, lon in -180.0f64..180.0,
        dlat in -5.0f64..5.0, dlon in -5.0f64..5.0, h in 1e5f64..4e7,
    ) {
        let hap = GeographicCoord::from_degrees(lat, lon, 20_000.0).unwrap();
        let target = GeographicCoord::from_degrees((lat + dlat).clamp(-89.0, 89.0), lon + dlon, h).unwrap();
        let el = WGS.elevation_angle(&hap, &target).unwrap();
        let off = AntennaConfig::hap_default().off_boresight_angle(&WGS, &hap, &target).unwrap();
        prop_assert!((off + el - 90.0).abs() < 1e-7, "off={off} el={el}");
    }

    #[test]
    fn nadir_antenna_sees_sub_point_on_boresight(lat in -80.0f64..80.0, lon in -180.0f64..180.0) {
        let sat = GeographicCoord::from_degrees(lat, lon, 35_786_000.0).unwrap();
        let below = sat.with_altitude(0.0).unwrap();
        let off = AntennaConfig::geo_default().off_boresight_angle(&WGS, &sat, &below).unwrap();
        prop_assert!(off < 1e-6);
    }
}
