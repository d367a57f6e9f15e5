use ntnsim::geodesy::{Ellipsoid, GeographicCoord, ProjectedCoord};
use ntnsim::trajectory::{
    constant_speed_timeline, mission_duration, BezierCurve, PointOfInterest, TrajectoryPlan,
    DEGENERATE_LENGTH,
};
use proptest::prelude::*;

const WGS: Ellipsoid = Ellipsoid::WGS84;

fn de_casteljau(points: &[ProjectedCoord], t: f64) -> ProjectedCoord {
    let mut pts = points.to_vec();
    for n in (1..pts.len()).rev() {
        for i in 0..n {
            let (a, b) = (pts[i], pts[i + 1]);
            pts[i] = ProjectedCoord::new(
                a.x + t * (b.x - a.x),
                a.y + t * (b.y - a.y),
                a.z + t * (b.z - a.z),
            );
        }
    }
    pts[0]
}

fn close(a: &ProjectedCoord, b: &ProjectedCoord, rel: f64) -> bool {
    let scale = a.x.abs().max(a.y.abs()).max(a.z.abs()).max(1.0);
    (a.x - b.x).abs() <= rel * scale
        && (a.y - b.y).abs() <= rel * scale
        && (a.z - b.z).abs() <= rel * scale
}

fn poi_strategy(max_level: u32) -> impl Strategy<Value = PointOfInterest> {
    (
        -80.0f64..80.0,
        -180.0f64..180.0,
        0.0f64..30_000.0,
        1..=max_level,
    )
        .prop_map(|(lat, lon, h, l)| {
            PointOfInterest::new(GeographicCoord::from_degrees(lat, lon, h).unwrap(), l)
        })
}

fn plan(pois: Vec<PointOfInterest>) -> TrajectoryPlan {
    TrajectoryPlan::new(pois, 2000, 24.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn unit_levels_match_de_casteljau(pois in prop::collection::vec(poi_strategy(1), 2..=8), t in 0.0f64..=1.0) {
        let curve = BezierCurve::new(&plan(pois), &WGS).unwrap();
        let got = curve.evaluate(t).unwrap();
        let want = de_casteljau(curve.projected_pois(), t);
        prop_assert!(close(&got, &want, 1e-9), "{got:?} vs {want:?}");
    }

    #[test]
    fn mixed_levels_equal_repeated_control_points(pois in prop::collection::vec(poi_strategy(5), 2..=6), t in 0.0f64..=1.0) {
        let curve = BezierCurve::new(&plan(pois.clone()), &WGS).unwrap();
        let repeated: Vec<ProjectedCoord> = curve
            .projected_pois()
            .iter()
            .zip(&pois)
            .flat_map(|(p, poi)| std::iter::repeat_n(*p, poi.interest_level as usize))
            .collect();
        prop_assert!(close(&curve.evaluate(t).unwrap(), &de_casteljau(&repeated, t), 1e-9));
    }

    #[test]
    fn endpoints_are_interpolated(pois in prop::collection::vec(poi_strategy(4), 2..=8)) {
        let curve = BezierCurve::new(&plan(pois), &WGS).unwrap();
        let ends = curve.projected_pois();
        prop_assert_eq!(curve.evaluate(0.0).unwrap(), ends[0]);
        prop_assert_eq!(curve.evaluate(1.0).unwrap(), *ends.last().unwrap());
    }

    #[test]
    fn curve_stays_in_bounding_box(pois in prop::collection::vec(poi_strategy(4), 1..=8), t in 0.0f64..=1.0) {
        let curve = BezierCurve::new(&plan(pois), &WGS).unwrap();
        let pts = curve.projected_pois();
        let q = curve.evaluate(t).unwrap();
        for axis in [|p: &ProjectedCoord| p.x, |p: &ProjectedCoord| p.y, |p: &ProjectedCoord| p.z] {
            let lo = pts.iter().map(axis).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(axis).fold(f64::NEG_INFINITY, f64::max);
            let slack = 1e-9 * hi.abs().max(1.0);
            prop_assert!(axis(&q) >= lo - slack && axis(&q) <= hi + slack);
        }
    }

    #[test]
    fn raising_interest_pulls_curve_closer(pois in prop::collection::vec(poi_strategy(1), 3), level in 1u32..8) {
        let min_gap = |l: u32| {
            let mut p = pois.clone();
            p[1].interest_level = l;
            let curve = BezierCurve::new(&plan(p), &WGS).unwrap();
            let goal = curve.projected_pois()[1];
            (0..=4000)
                .map(|i| {
                    let q = curve.evaluate(i as f64 / 4000.0).unwrap();
                    ((q.x - goal.x).powi(2) + (q.y - goal.y).powi(2) + (q.z - goal.z).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        };
        let (before, after) = (min_gap(level), min_gap(level + 1));
        prop_assume!(before > 1.0);
        prop_assert!(after < before, "{after} !< {before}");
    }
}

fn two_pois(a: (f64, f64), b: (f64, f64), la: u32, lb: u32) -> Vec<PointOfInterest> {
    vec![
        PointOfInterest::new(
            GeographicCoord::from_degrees(a.0, a.1, 20_000.0).unwrap(),
            la,
        ),
        PointOfInterest::new(
            GeographicCoord::from_degrees(b.0, b.1, 20_000.0).unwrap(),
            lb,
        ),
    ]
}

/// Arc length by composite Simpson integration of |dr/dt| with a central-difference derivative.
fn arc_length_simpson(curve: &BezierCurve, n: usize) -> f64 {
    let speed = |t: f64| {
        let h = 1e-6;
        let (t0, t1) = ((t - h).max(0.0), (t + h).min(1.0));
        let p0 = WGS.to_geocentric(&WGS.from_projected(&curve.evaluate(t0).unwrap()).unwrap());
        let p1 = WGS.to_geocentric(&WGS.from_projected(&curve.evaluate(t1).unwrap()).unwrap());
        (p1 - p0).norm() / (t1 - t0)
    };
    let h = 1.0 / n as f64;
    let mut sum = speed(0.0) + speed(1.0);
    for i in 1..n {
        sum += speed(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

#[test]
fn duration_matches_quadrature() {
    let pois = vec![
        PointOfInterest::new(
            GeographicCoord::from_degrees(40.0, -3.7, 20_000.0).unwrap(),
            1,
        ),
        PointOfInterest::new(
            GeographicCoord::from_degrees(48.8, 2.3, 20_000.0).unwrap(),
            3,
        ),
        PointOfInterest::new(
            GeographicCoord::from_degrees(52.5, 13.4, 20_000.0).unwrap(),
            2,
        ),
    ];
    let plan = TrajectoryPlan::new(pois, 200_000, 24.0).unwrap();
    let curve = BezierCurve::new(&plan, &WGS).unwrap();
    let oracle = arc_length_simpson(&curve, 2000) / 24.0;
    let t = mission_duration(&plan, &WGS).unwrap();
    assert!((t - oracle).abs() / oracle < 1e-6, "{t} vs {oracle}");
}

#[test]
fn duration_scales_inversely_with_speed() {
    let plan = TrajectoryPlan::new(two_pois((10.0, 10.0), (12.0, 14.0), 1, 1), 5000, 24.0).unwrap();
    let slow = mission_duration(&plan, &WGS).unwrap();
    let fast = mission_duration(&plan.with_speed(48.0).unwrap(), &WGS).unwrap();
    assert!((slow / fast - 2.0).abs() < 1e-12);
}

#[test]
fn constant_speed_spacing() {
    let pois = vec![
        PointOfInterest::new(
            GeographicCoord::from_degrees(0.0, 0.0, 20_000.0).unwrap(),
            1,
        ),
        PointOfInterest::new(
            GeographicCoord::from_degrees(3.0, 1.0, 20_000.0).unwrap(),
            4,
        ),
        PointOfInterest::new(
            GeographicCoord::from_degrees(1.0, 4.0, 20_000.0).unwrap(),
            1,
        ),
    ];
    let plan = TrajectoryPlan::new(pois, 200_000, 24.0).unwrap();
    let tl = constant_speed_timeline(&plan, &WGS, 60.0).unwrap();
    let expected = 24.0 * 60.0;
    let full = &tl.samples[..tl.samples.len() - 1];
    for w in full.windows(2) {
        let d = WGS.slant_distance(&w[0].position, &w[1].position);
        assert!((d - expected).abs() / expected < 1e-3, "spacing {d}");
    }
    let count = (tl.total_duration / 60.0).floor() as usize + 1;
    assert_eq!(tl.samples.len(), count);
}

#[test]
fn identical_pois_are_degenerate() {
    let plan = TrajectoryPlan::new(two_pois((5.0, 5.0), (5.0, 5.0), 1, 3), 100, 24.0).unwrap();
    assert!(mission_duration(&plan, &WGS).unwrap() * 24.0 < DEGENERATE_LENGTH);
    assert!(constant_speed_timeline(&plan, &WGS, 1.0).is_err());
}

#[test]
fn csv_export_round_trips_positions() {
    let plan = TrajectoryPlan::new(two_pois((0.0, 0.0), (0.1, 0.1), 1, 1), 1000, 24.0).unwrap();
    let tl = constant_speed_timeline(&plan, &WGS, 50.0).unwrap();
    let mut buf = Vec::new();
    tl.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time_s,lat_deg,lon_deg,alt_m"));
    for (line, s) in lines.zip(&tl.samples) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(f[0], s.time);
        assert_eq!(f[1], s.position.lat_deg());
        assert_eq!(f[2], s.position.lon_deg());
    }
}
