use sarhp_core::calib::radar_brightness;
use sarhp_core::geom::interpolate_sensor_state;
use sarhp_core::synth::{gen_scene, oracle_project, SceneSpec};

fn spec(seed: u64) -> SceneSpec {
    SceneSpec {
        seed,
        n_az: 96,
        n_rg: 128,
        building_count: 8,
        footprint_range: (8.0, 25.0),
        ..SceneSpec::default()
    }
}

#[test]
fn incidence_at_scene_center_matches_request() {
    for theta in [20.0, 35.0, 55.0] {
        let s = gen_scene(&SceneSpec { incidence_angle: theta, ..spec(1) }).unwrap();
        let m = &s.metadata;
        let row = m.grid.n_az / 2;
        let sensor = interpolate_sensor_state(&m.orbit, m.grid.row_time(row)).unwrap().position;
        // ground point of the center pixel on the flat terrain
        let r = m.grid.range_of(m.grid.n_rg / 2);
        let a = sensor.z - s.spec.ground_height;
        let x = sensor.x + (r * r - a * a).sqrt();
        let look = [x - sensor.x, 0.0, s.spec.ground_height - sensor.z];
        let norm = (look[0] * look[0] + look[2] * look[2]).sqrt();
        let angle = (-look[2] / norm).acos().to_degrees();
        assert!((angle - theta).abs() < 0.1, "{angle} vs {theta}");
    }
}

#[test]
fn oracle_shadow_coincides_with_zero_return() {
    for seed in [3, 4] {
        let s = gen_scene(&spec(seed)).unwrap();
        let m = &s.metadata;
        let heights = oracle_project(&m.grid, &m.orbit, &s.dem).unwrap();
        let db = radar_brightness(&s.slc);
        let zero: Vec<bool> = s.slc.samples.as_slice().iter().map(|c| c.norm_sqr() == 0.0).collect();
        let agree = heights
            .as_slice()
            .iter()
            .zip(&zero)
            .filter(|(h, &z)| h.is_nan() == z)
            .count();
        let frac = agree as f64 / zero.len() as f64;
        assert!(frac >= 0.98, "seed {seed}: {frac}");
        assert!(zero.iter().any(|&z| z), "scene without shadow");
        assert!(db.as_slice().iter().zip(&zero).all(|(&d, &z)| !z || d == -30.0));
    }
}
