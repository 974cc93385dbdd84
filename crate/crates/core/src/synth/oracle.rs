//! Brute-force projection that shares no geometry code with `geom`: it
//! supersamples the bilinear DEM surface, assigns samples to azimuth rows by
//! their zero-Doppler time, and resolves visibility per row by sweeping the
//! samples in look angle.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geom::{DemRaster, OrbitTrack, SlantRangeGrid};
use crate::raster::Grid;

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn lerp(a: V3, b: V3, s: f64) -> V3 {
    [
        a[0] + (b[0] - a[0]) * s,
        a[1] + (b[1] - a[1]) * s,
        a[2] + (b[2] - a[2]) * s,
    ]
}

fn unit(a: V3) -> Option<V3> {
    let n = dot(a, a).sqrt();
    (n > 0.0).then(|| scale(a, 1.0 / n))
}

/// Knots copied out of the track; positions are evaluated in Bézier form.
struct Knots {
    t: Vec<f64>,
    p: Vec<V3>,
    v: Vec<V3>,
}

impl Knots {
    fn new(track: &OrbitTrack<f64>) -> Self {
        let s = track.samples();
        Self {
            t: s.iter().map(|k| k.t).collect(),
            p: s.iter().map(|k| [k.position.x, k.position.y, k.position.z]).collect(),
            v: s.iter().map(|k| [k.velocity.x, k.velocity.y, k.velocity.z]).collect(),
        }
    }

    fn span(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    fn interval(&self, t: f64) -> usize {
        let mut i = 0;
        while i + 2 < self.t.len() && t >= self.t[i + 1] {
            i += 1;
        }
        i
    }

    /// Position and velocity; `t` must lie inside the span.
    fn state(&self, t: f64) -> (V3, V3) {
        let i = self.interval(t);
        if t == self.t[i] {
            return (self.p[i], self.v[i]);
        }
        if t == self.t[i + 1] {
            return (self.p[i + 1], self.v[i + 1]);
        }
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let b0 = self.p[i];
        let tangent = scale(self.v[i], h / 3.0);
        let b1 = [b0[0] + tangent[0], b0[1] + tangent[1], b0[2] + tangent[2]];
        let b3 = self.p[i + 1];
        let b2 = sub(b3, scale(self.v[i + 1], h / 3.0));
        let c0 = lerp(b0, b1, s);
        let c1 = lerp(b1, b2, s);
        let c2 = lerp(b2, b3, s);
        let d0 = lerp(c0, c1, s);
        let d1 = lerp(c1, c2, s);
        (lerp(d0, d1, s), lerp(self.v[i], self.v[i + 1], s))
    }

    fn doppler(&self, x: V3, t: f64) -> f64 {
        let (p, v) = self.state(t);
        dot(v, sub(x, p))
    }

    /// Time at which `x` crosses the zero-Doppler plane, by safeguarded
    /// false position; `None` when it never does inside the span.
    fn zero_doppler_time(&self, x: V3) -> Option<f64> {
        let mut bracket = None;
        let mut f_prev = self.doppler(x, self.t[0]);
        if f_prev == 0.0 {
            return Some(self.t[0]);
        }
        for k in 1..self.t.len() {
            let f = self.doppler(x, self.t[k]);
            if f == 0.0 {
                return Some(self.t[k]);
            }
            if (f > 0.0) != (f_prev > 0.0) {
                bracket = Some((self.t[k - 1], f_prev, self.t[k], f));
                break;
            }
            f_prev = f;
        }
        let (mut a, mut fa, mut b, mut fb) = bracket?;
        let mut side = 0i8;
        for _ in 0..200 {
            let c = (a * fb - b * fa) / (fb - fa);
            let c = if c > a && c < b { c } else { 0.5 * (a + b) };
            let fc = self.doppler(x, c);
            if fc == 0.0 || (b - a) < 1e-13 * (1.0 + c.abs()) {
                return Some(c);
            }
            if (fc > 0.0) == (fa > 0.0) {
                a = c;
                fa = fc;
                if side == -1 {
                    fb *= 0.5;
                }
                side = -1;
            } else {
                b = c;
                fb = fc;
                if side == 1 {
                    fa *= 0.5;
                }
                side = 1;
            }
        }
        Some(0.5 * (a + b))
    }
}

/// Sensor frame of one azimuth row.
struct RowFrame {
    p: V3,
    n: V3,
    e1: V3,
    e2: V3,
}

struct Sample {
    angle: f64,
    range: f64,
    h: f64,
}

/// Brute-force slant-range heights for the same inputs as
/// [`crate::geom::project_heights`].
///
/// Sampling step `s = min(dr, cell)/10`. Every DEM cell is cut into a lattice
/// fine enough that neighbors differ by at most `s` horizontally and in
/// height; lattice points within half a lattice step of a row's zero-Doppler
/// plane are that row's samples. A sample is hidden when another sample within
/// `±s/r` of its look angle is nearer by more than `4s`. A pixel takes the
/// largest height among visible samples whose range is within `s` of the
/// pixel's range.
pub fn oracle_project(
    grid: &SlantRangeGrid<f64>,
    track: &OrbitTrack<f64>,
    dem: &DemRaster<f64>,
) -> Result<Grid<f64>> {
    grid.validate()?;
    let knots = Knots::new(track);
    let (start, end) = knots.span();
    let row_time = |i: usize| grid.t0 + grid.dt * i as f64;
    for i in [0, grid.n_az - 1] {
        let t = row_time(i);
        if !(t >= start && t <= end) {
            return Err(Error::OutOfRange { t, start, end });
        }
    }
    let (rows, cols) = (dem.heights.rows(), dem.heights.cols());
    let cell = dem.cell;
    let o = [dem.origin.x, dem.origin.y, dem.origin.z];
    let vertex = |r: usize, c: usize| -> V3 {
        [
            o[0] + c as f64 * cell,
            o[1] + r as f64 * cell,
            o[2] + dem.heights.get(r, c),
        ]
    };
    let mut out = Grid::filled(grid.n_az, grid.n_rg, f64::NAN);
    if rows < 2 || cols < 2 {
        return Ok(out);
    }
    let s = grid.dr.min(cell) / 10.0;

    let center = vertex(rows / 2, cols / 2);
    let frames = (0..grid.n_az)
        .map(|i| {
            let (p, v) = knots.state(row_time(i));
            let n = unit(v).ok_or(Error::DegenerateBasis("sensor velocity is zero"))?;
            let look = sub(center, p);
            let e1 = unit(sub(look, scale(n, dot(look, n))))
                .ok_or(Error::DegenerateBasis("scene center lies on the flight line"))?;
            Ok(RowFrame {
                p,
                n,
                e1,
                e2: cross(n, e1),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let times: Vec<f64> = (0..rows * cols)
        .map(|k| {
            let (r, c) = (k / cols, k % cols);
            if dem.heights.get(r, c).is_nan() {
                f64::NAN
            } else {
                knots.zero_doppler_time(vertex(r, c)).unwrap_or(f64::NAN)
            }
        })
        .collect();

    // cells whose corner times bracket a row time, bucketed by row
    let mut buckets: Vec<Vec<(u32, u32)>> = vec![Vec::new(); grid.n_az];
    for r in 0..rows - 1 {
        for c in 0..cols - 1 {
            let ts = [
                times[r * cols + c],
                times[r * cols + c + 1],
                times[(r + 1) * cols + c],
                times[(r + 1) * cols + c + 1],
            ];
            if ts.iter().any(|t| t.is_nan()) {
                continue;
            }
            let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min) - grid.dt;
            let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + grid.dt;
            let i_lo = ((lo - grid.t0) / grid.dt).ceil().max(0.0);
            let i_hi = ((hi - grid.t0) / grid.dt).floor().min((grid.n_az - 1) as f64);
            if i_lo > i_hi {
                continue;
            }
            for bucket in &mut buckets[i_lo as usize..=i_hi as usize] {
                bucket.push((r as u32, c as u32));
            }
        }
    }

    for (i, frame) in frames.iter().enumerate() {
        let mut samples = Vec::new();
        for &(r, c) in &buckets[i] {
            let (r, c) = (r as usize, c as usize);
            sample_cell(
                [vertex(r, c), vertex(r, c + 1), vertex(r + 1, c), vertex(r + 1, c + 1)],
                cell,
                s,
                frame,
                &mut samples,
            );
        }
        resolve_row(&mut samples, grid, s, out.row_mut(i));
    }
    Ok(out)
}

/// Lattice samples of the bilinear patch `q00 q01 / q10 q11` (x along the
/// second index) that lie within half a lattice step of the row plane.
fn sample_cell(q: [V3; 4], cell: f64, s: f64, frame: &RowFrame, samples: &mut Vec<Sample>) {
    let [q00, q01, q10, q11] = q;
    let dist = |x: V3| dot(frame.n, sub(x, frame.p));
    let d = [dist(q00), dist(q01), dist(q10), dist(q11)];
    let dhx = (q01[2] - q00[2]).abs().max((q11[2] - q10[2]).abs());
    let dhy = (q10[2] - q00[2]).abs().max((q11[2] - q01[2]).abs());
    let nx = (cell.max(dhx) / s).ceil().max(1.0) as usize;
    let ny = (cell.max(dhy) / s).ceil().max(1.0) as usize;
    let n = frame.n;
    let step_x = n[0].abs() * cell / nx as f64 + n[2].abs() * dhx / nx as f64;
    let step_y = n[1].abs() * cell / ny as f64 + n[2].abs() * dhy / ny as f64;
    let half = 0.5 * step_x.max(step_y);
    let d_min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let d_max = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if d_min > half || d_max < -half {
        return;
    }
    let mut push = |x: V3| {
        let q = sub(x, frame.p);
        samples.push(Sample {
            angle: dot(q, frame.e2).atan2(dot(q, frame.e1)),
            range: dot(q, q).sqrt(),
            h: x[2],
        });
    };
    for k in 0..=nx {
        let fx = k as f64 / nx as f64;
        // the lattice line at fixed x is straight, so its distance is linear in y
        let a = lerp(q00, q01, fx);
        let b = lerp(q10, q11, fx);
        let (da, db) = (dist(a), dist(b));
        let (j_lo, j_hi) = if da == db {
            if da.abs() > half {
                continue;
            }
            (0, ny)
        } else {
            let ja = (-half - da) / (db - da) * ny as f64;
            let jb = (half - da) / (db - da) * ny as f64;
            let (lo, hi) = (ja.min(jb), ja.max(jb));
            let lo = lo.ceil().max(0.0);
            let hi = hi.floor().min(ny as f64);
            if lo > hi {
                continue;
            }
            (lo as usize, hi as usize)
        };
        for j in j_lo..=j_hi {
            let x = lerp(a, b, j as f64 / ny as f64);
            if dist(x).abs() <= half {
                push(x);
            }
        }
    }
}

/// Visibility sweep over look angle, then per-pixel maximum.
fn resolve_row(samples: &mut [Sample], grid: &SlantRangeGrid<f64>, s: f64, out: &mut [f64]) {
    if samples.is_empty() {
        return;
    }
    samples.sort_by(|a, b| a.angle.total_cmp(&b.angle).then(a.range.total_cmp(&b.range)));
    let r_min = samples.iter().map(|p| p.range).fold(f64::INFINITY, f64::min);
    let w = s / r_min;
    let tol = 4.0 * s;
    let n = samples.len();
    let mut visible = vec![false; n];
    // sliding-window minimum of range over angles in [angle - w, angle + w]
    let mut window: VecDeque<usize> = VecDeque::new();
    let mut hi = 0;
    for i in 0..n {
        while hi < n && samples[hi].angle <= samples[i].angle + w {
            while window.back().is_some_and(|&b| samples[b].range >= samples[hi].range) {
                window.pop_back();
            }
            window.push_back(hi);
            hi += 1;
        }
        while window.front().is_some_and(|&f| samples[f].angle < samples[i].angle - w) {
            window.pop_front();
        }
        let nearest = samples[*window.front().expect("window holds sample i")].range;
        visible[i] = samples[i].range <= nearest + tol;
    }
    for (p, _) in samples.iter().zip(&visible).filter(|(_, &v)| v) {
        let c_lo = ((p.range - s - grid.r_near) / grid.dr).ceil().max(0.0);
        let c_hi = ((p.range + s - grid.r_near) / grid.dr).floor();
        if c_hi < 0.0 || c_lo > c_hi {
            continue;
        }
        let (lo, hi) = (c_lo as usize, (c_hi as usize).min(grid.n_rg - 1));
        for slot in out.iter_mut().take(hi + 1).skip(lo) {
            if !(*slot >= p.h) {
                *slot = p.h;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{SensorStateSample, Vec3};

    fn track() -> OrbitTrack<f64> {
        let samples = (0..4)
            .map(|k| {
                let t = -1.0 + k as f64 * 2.0 / 3.0;
                SensorStateSample {
                    t,
                    position: Vec3::new(-300.0, 7000.0 * t, 600.0),
                    velocity: Vec3::new(0.0, 7000.0, 0.0),
                }
            })
            .collect();
        OrbitTrack::new(samples).unwrap()
    }

    fn grid() -> SlantRangeGrid<f64> {
        SlantRangeGrid {
            t0: -0.002,
            dt: 1.0 / 7000.0,
            r_near: 640.0,
            dr: 1.5,
            n_az: 20,
            n_rg: 40,
        }
    }

    #[test]
    fn flat_dem_gives_constant_field() {
        let heights = Grid::filled(60, 160, 12.5);
        let dem = DemRaster::new(Vec3::new(-60.0, -30.0, 0.0), 1.0, heights).unwrap();
        let out = oracle_project(&grid(), &track(), &dem).unwrap();
        let valid: Vec<f64> = out.as_slice().iter().cloned().filter(|v| !v.is_nan()).collect();
        assert!(valid.len() > out.as_slice().len() * 9 / 10);
        assert!(valid.iter().all(|&v| (v - 12.5).abs() < 1e-9));
    }

    #[test]
    fn wall_shadows_the_ground_behind_it() {
        let mut heights = Grid::filled(60, 160, 0.0);
        for r in 0..60 {
            for c in 80..83 {
                heights.set(r, c, 20.0);
            }
        }
        let dem = DemRaster::new(Vec3::new(-20.0, -30.0, 0.0), 1.0, heights).unwrap();
        let out = oracle_project(&grid(), &track(), &dem).unwrap();
        let row = out.row(10);
        assert!(row.iter().any(|v| v.is_nan()));
        assert!(row.contains(&20.0));
    }

    #[test]
    fn zero_doppler_time_inverts_the_track() {
        let k = Knots::new(&track());
        let t = k.zero_doppler_time([10.0, 700.0, 3.0]).unwrap();
        assert!((t - 0.1).abs() < 1e-12);
        assert!(k.zero_doppler_time([0.0, 1.0e6, 0.0]).is_none());
    }

    #[test]
    fn rows_outside_the_track_are_rejected() {
        let mut g = grid();
        g.t0 = 5.0;
        let dem = DemRaster::new(Vec3::zero(), 1.0, Grid::filled(4, 4, 0.0)).unwrap();
        assert!(matches!(oracle_project(&g, &track(), &dem), Err(Error::OutOfRange { .. })));
    }
}
