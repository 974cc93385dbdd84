use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::scalar::Real;

/// Sensor position and velocity at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorStateSample<T> {
    /// Mission time in seconds.
    pub t: T,
    pub position: Vec3<T>,
    /// m/s
    pub velocity: Vec3<T>,
}

/// Time-ordered sensor state vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrack<T> {
    samples: Vec<SensorStateSample<T>>,
}

impl<T: Real> OrbitTrack<T> {
    pub fn new(samples: Vec<SensorStateSample<T>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "orbit needs at least 2 state vectors, got {}",
                samples.len()
            )));
        }
        for w in samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::InvalidInput(format!(
                    "orbit times must be strictly increasing ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        for s in &samples {
            if !(s.velocity.norm() > T::zero()) || !s.position.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "state vector at t={} has zero velocity or non-finite position",
                    s.t
                )));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[SensorStateSample<T>] {
        &self.samples
    }

    pub fn start(&self) -> T {
        self.samples[0].t
    }

    pub fn end(&self) -> T {
        self.samples[self.samples.len() - 1].t
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.start() && t <= self.end()
    }
}

/// Sensor state at `t`: cubic Hermite on positions (using the stored
/// velocities as tangents), linear on velocities. Exact at the knots.
pub fn interpolate_sensor_state<T: Real>(
    track: &OrbitTrack<T>,
    t: T,
) -> Result<SensorStateSample<T>> {
    if !track.contains(t) {
        return Err(Error::OutOfRange {
            t: t.as_f64(),
            start: track.start().as_f64(),
            end: track.end().as_f64(),
        });
    }
    let samples = track.samples();
    // index of the first knot with time > t
    let upper = samples.partition_point(|s| s.t <= t);
    if upper > 0 && samples[upper - 1].t == t {
        return Ok(samples[upper - 1]);
    }
    let (a, b) = (samples[upper - 1], samples[upper]);
    let h = b.t - a.t;
    let s = (t - a.t) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let h00 = two * s3 - three * s2 + T::one();
    let h10 = s3 - two * s2 + s;
    let h01 = three * s2 - two * s3;
    let h11 = s3 - s2;
    let position =
        a.position * h00 + a.velocity * (h10 * h) + b.position * h01 + b.velocity * (h11 * h);
    let velocity = a.velocity * (T::one() - s) + b.velocity * s;
    Ok(SensorStateSample {
        t,
        position,
        velocity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(t: f64, p: [f64; 3], v: [f64; 3]) -> SensorStateSample<f64> {
        SensorStateSample {
            t,
            position: Vec3::new(p[0], p[1], p[2]),
            velocity: Vec3::new(v[0], v[1], v[2]),
        }
    }

    #[test]
    fn exact_at_knots() {
        let track = OrbitTrack::new(vec![
            state(0.0, [1.0, 2.0, 3.0], [0.0, 7.0, 0.0]),
            state(1.0, [1.5, 9.0, 3.0], [0.1, 7.0, 0.0]),
            state(2.0, [2.5, 16.0, 3.2], [0.2, 7.1, 0.0]),
        ])
        .unwrap();
        for s in track.samples() {
            assert_eq!(interpolate_sensor_state(&track, s.t).unwrap(), *s);
        }
    }

    #[test]
    fn linear_motion_midpoint() {
        let v = [10.0, -3.0, 2.0];
        let track =
            OrbitTrack::new(vec![state(0.0, [0.0; 3], v), state(2.0, [20.0, -6.0, 4.0], v)])
                .unwrap();
        let mid = interpolate_sensor_state(&track, 1.0).unwrap();
        assert!((mid.position - Vec3::new(10.0, -3.0, 2.0)).norm() < 1e-12);
        assert!((mid.velocity - Vec3::new(10.0, -3.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn circular_orbit_within_a_millimetre() {
        // analytic circle: radius R, angular rate w
        let radius = 6_892_000.0f64;
        let speed = 7_600.0;
        let w = speed / radius;
        let at = |t: f64| {
            state(
                t,
                [radius * (w * t).cos(), radius * (w * t).sin(), 0.0],
                [-radius * w * (w * t).sin(), radius * w * (w * t).cos(), 0.0],
            )
        };
        let track = OrbitTrack::new((0..=12).map(|k| at(k as f64 * 10.0)).collect()).unwrap();
        let mut worst = 0.0f64;
        for i in 0..1200 {
            let t = i as f64 * 0.1 + 0.037;
            let got = interpolate_sensor_state(&track, t).unwrap();
            let want = at(t);
            worst = worst.max((got.position - want.position).norm());
        }
        assert!(worst < 1e-3, "max deviation {worst} m");
    }

    #[test]
    fn outside_span_is_an_error() {
        let v = [1.0, 0.0, 0.0];
        let track = OrbitTrack::new(vec![state(0.0, [0.0; 3], v), state(1.0, [1.0, 0.0, 0.0], v)])
            .unwrap();
        assert!(matches!(
            interpolate_sensor_state(&track, 1.5),
            Err(Error::OutOfRange { .. })
        ));
        assert!(interpolate_sensor_state(&track, -1e-9).is_err());
    }

    #[test]
    fn rejects_unordered_or_short_tracks() {
        let v = [1.0, 0.0, 0.0];
        assert!(OrbitTrack::new(vec![state(0.0, [0.0; 3], v)]).is_err());
        assert!(OrbitTrack::new(vec![state(1.0, [0.0; 3], v), state(1.0, [0.0; 3], v)]).is_err());
        assert!(OrbitTrack::new(vec![state(0.0, [0.0; 3], [0.0; 3]), state(1.0, [0.0; 3], v)])
            .is_err());
    }
}
