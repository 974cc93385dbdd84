use crate::error::{Error, Result};
use crate::geom::{SensorStateSample, Vec3};
use crate::scalar::Real;

/// Orthonormal frame of a zero-Doppler plane. The sensor sits at the origin;
/// `e_v` is the in-plane direction closest to local up and `e_u = normal × e_v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneBasis<T> {
    pub origin: Vec3<T>,
    pub normal: Vec3<T>,
    pub e_u: Vec3<T>,
    pub e_v: Vec3<T>,
}

impl<T: Real> PlaneBasis<T> {
    /// Signed distance of `p` from the plane along the normal.
    #[inline]
    pub fn signed_distance(&self, p: Vec3<T>) -> T {
        self.normal.dot(p - self.origin)
    }

    /// In-plane coordinates `(u, v)` of `p`, sensor-relative.
    #[inline]
    pub fn to_plane(&self, p: Vec3<T>) -> (T, T) {
        let q = p - self.origin;
        (q.dot(self.e_u), q.dot(self.e_v))
    }

    #[inline]
    pub fn from_plane(&self, u: T, v: T) -> Vec3<T> {
        self.origin + self.e_u * u + self.e_v * v
    }
}

/// Plane through the sensor whose normal is the flight direction: every
/// target `q` on it satisfies `velocity · (q − position) = 0`.
pub fn zero_doppler_plane<T: Real>(
    state: &SensorStateSample<T>,
    up_hint: Vec3<T>,
) -> Result<PlaneBasis<T>> {
    let normal = state
        .velocity
        .normalized()
        .ok_or(Error::DegenerateBasis("sensor velocity is zero"))?;
    let up_len = up_hint.norm();
    let in_plane = up_hint - normal * up_hint.dot(normal);
    if !(up_len > T::zero()) || in_plane.norm() <= up_len * T::lit(1e-9) {
        return Err(Error::DegenerateBasis("up hint is parallel to the velocity"));
    }
    let e_v = in_plane
        .normalized()
        .ok_or(Error::DegenerateBasis("up hint is parallel to the velocity"))?;
    let e_u = normal.cross(e_v);
    Ok(PlaneBasis {
        origin: state.position,
        normal,
        e_u,
        e_v,
    })
}

/// Line-plane intersection `p0 + u·t` with `t = −(n·w)/(n·u)`, `u = p1 − p0`,
/// `w = p0 − origin`. Returns the point and `t`, only for `t ∈ [0, 1]`;
/// parameters within rounding of an endpoint are snapped onto it.
pub fn segment_plane_parameter<T: Real>(
    p0: Vec3<T>,
    p1: Vec3<T>,
    plane: &PlaneBasis<T>,
) -> Option<(Vec3<T>, T)> {
    let u = p1 - p0;
    let w = p0 - plane.origin;
    let nu = plane.normal.dot(u);
    if nu.abs() <= u.norm() * T::epsilon() * T::lit(16.0) {
        return None;
    }
    let t = -plane.normal.dot(w) / nu;
    let slack = T::epsilon() * T::lit(64.0) * (T::one() + w.norm() / u.norm());
    if t < -slack || t > T::one() + slack {
        return None;
    }
    let t = t.max(T::zero()).min(T::one());
    Some((p0 + u * t, t))
}

pub fn segment_plane_intersection<T: Real>(
    p0: Vec3<T>,
    p1: Vec3<T>,
    plane: &PlaneBasis<T>,
) -> Option<Vec3<T>> {
    segment_plane_parameter(p0, p1, plane).map(|(p, _)| p)
}
