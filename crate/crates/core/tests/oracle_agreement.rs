use sarhp_core::geom::project_heights;
use sarhp_core::synth::{build_scene, gen_scene, oracle_project, Building, SceneGeometry, SceneSpec};

fn agreement(a: &[f64], b: &[f64]) -> (f64, f64) {
    let (mut mutual, mut close, mut mask) = (0usize, 0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        mask += usize::from(x.is_nan() == y.is_nan());
        if !x.is_nan() && !y.is_nan() {
            mutual += 1;
            close += usize::from((x - y).abs() <= 0.5);
        }
    }
    (close as f64 / mutual as f64, mask as f64 / a.len() as f64)
}

#[test]
fn random_scenes_agree_with_oracle() {
    for (seed, theta, dr) in [(11, 22.0, 0.6), (12, 38.0, 1.2), (13, 53.0, 2.5)] {
        let spec = SceneSpec {
            seed,
            n_az: 128,
            n_rg: 128,
            incidence_angle: theta,
            range_spacing: dr,
            azimuth_spacing: dr,
            building_count: 8,
            ..SceneSpec::default()
        };
        let s = gen_scene(&spec).unwrap();
        let m = &s.metadata;
        let fast = project_heights(&m.grid, &m.orbit, &s.dem, m.up_hint).unwrap();
        let slow = oracle_project(&m.grid, &m.orbit, &s.dem).unwrap();
        let (within, mask) = agreement(fast.heights.as_slice(), slow.as_slice());
        assert!(within >= 0.99, "seed {seed}: {within}");
        assert!(mask >= 0.98, "seed {seed}: {mask}");
    }
}

#[test]
fn single_box_layover_and_shadow() {
    let (h, theta) = (30.0, 35.0f64);
    let spec = SceneSpec {
        building_count: 0,
        n_az: 16,
        n_rg: 160,
        range_spacing: 1.0,
        azimuth_spacing: 1.0,
        cell: 0.25,
        incidence_angle: theta,
        height_range: (h, h),
        ..SceneSpec::default()
    };
    let geo = SceneGeometry::new(&spec).unwrap();
    let t = theta.to_radians();
    // roof narrower than the layover so the facade ends in shadow
    let width = 0.4 * h / t.tan();
    let cx = (-geo.dem_origin.x / spec.cell).round() as usize;
    let cy = (-geo.dem_origin.y / spec.cell).round() as usize;
    let b = Building {
        row0: cy - 16,
        row1: cy + 16,
        col0: cx,
        col1: cx + (width / spec.cell).round() as usize,
        height: h,
    };
    let s = build_scene(&spec, vec![b]).unwrap();
    let m = &s.metadata;
    let fast = project_heights(&m.grid, &m.orbit, &s.dem, m.up_hint).unwrap().heights;
    let slow = oracle_project(&m.grid, &m.orbit, &s.dem).unwrap();
    let g = spec.ground_height;
    for p in [fast.row(8), slow.row(8)] {
        let top = p.iter().position(|&v| v > g + 1e-6).unwrap();
        let run = p[top..].iter().take_while(|&&v| v > g + 1e-6).count();
        let facade = h * t.cos() / m.grid.dr;
        assert!((run as f64 - facade.ceil()).abs() <= 1.0, "facade {run} vs {facade}");
        assert!(p[top..top + run].windows(2).all(|w| w[1] <= w[0]));
        let gap = p[top + run..].iter().take_while(|v| v.is_nan()).count();
        let r = m.grid.range_of(top + run + gap);
        let a = geo.sensor_z - g;
        let x = geo.sensor_x + (r * r - a * a).sqrt();
        let shadow = x - (geo.dem_origin.x + b.col1 as f64 * spec.cell);
        assert!((shadow - h * t.tan()).abs() <= m.grid.dr / t.sin(), "shadow {shadow}");
    }
}
