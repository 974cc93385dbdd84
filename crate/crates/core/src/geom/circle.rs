use crate::geom::{visible, SliceVertex, TerrainSlice};
use crate::scalar::Real;

/// A point where a range circle meets the terrain slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntersectionCandidate<T> {
    pub u: T,
    pub v: T,
    /// Height interpolated linearly along the hit segment.
    pub h: T,
    pub visible: bool,
}

/// How a line relates to a circle, from the sign of the discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CircleContact {
    Miss,
    Tangent,
    Secant,
}

/// Intersections of the circle `|p| = r` (centered on the sensor) with the
/// segment `a → b`, given in sensor-relative plane coordinates.
///
/// With `d = b − a`, `d_r = |d|` and `D = a_u·b_v − b_u·a_v` the discriminant is
/// `Δ = r²d_r² − D²` and the points on the carrier line are
/// `u = (D·d_v ± sgn(d_v)·d_u·√Δ)/d_r²`, `v = (−D·d_u ± |d_v|·√Δ)/d_r²`.
/// Only points whose segment parameter lies in `[0, 1]` (up to rounding) are
/// reported through `hit(u, v, s)`.
///
/// Far from the sensor the closed form loses digits to the `D·d` products, so
/// each point is re-expressed as `a + s·d` and `s` gets one Newton step on
/// `|p| = r`; the reported point then lies on the segment to rounding.
pub fn segment_circle_intersections<T: Real>(
    a: (T, T),
    b: (T, T),
    r: T,
    mut hit: impl FnMut(T, T, T),
) -> CircleContact {
    let (du, dv) = (b.0 - a.0, b.1 - a.1);
    let dr2 = du * du + dv * dv;
    if !(dr2 > T::zero()) {
        return CircleContact::Miss;
    }
    let det = a.0 * b.1 - b.0 * a.1;
    let disc = r * r * dr2 - det * det;
    if disc < T::zero() {
        return CircleContact::Miss;
    }
    let root = disc.sqrt();
    let len = dr2.sqrt();
    let slack = (T::lit(1e-9) + r * T::epsilon() * T::lit(512.0)) / len;
    let newton_cap = T::lit(1e-3) / len;
    let mut emit = |u: T, v: T, polish: bool| {
        let mut s = ((u - a.0) * du + (v - a.1) * dv) / dr2;
        if s < -slack || s > T::one() + slack {
            return;
        }
        if polish {
            let (pu, pv) = (a.0 + du * s, a.1 + dv * s);
            let norm = (pu * pu + pv * pv).sqrt();
            let slope = pu * du + pv * dv;
            if slope != T::zero() {
                let step = (norm - r) * norm / slope;
                if step.abs() <= newton_cap {
                    s -= step;
                }
            }
        }
        let s = s.max(T::zero()).min(T::one());
        hit(a.0 + du * s, a.1 + dv * s, s);
    };
    let u_mid = det * dv;
    let v_mid = -det * du;
    if disc == T::zero() {
        emit(u_mid / dr2, v_mid / dr2, false);
        return CircleContact::Tangent;
    }
    let u_off = dv.sgn_nonzero() * du * root;
    let v_off = dv.abs() * root;
    emit((u_mid + u_off) / dr2, (v_mid + v_off) / dr2, true);
    emit((u_mid - u_off) / dr2, (v_mid - v_off) / dr2, true);
    CircleContact::Secant
}

/// Height of the segment `a → b` at parameter `s`.
#[inline]
pub(crate) fn lerp_height<T: Real>(a: &SliceVertex<T>, b: &SliceVertex<T>, s: T) -> T {
    a.h + (b.h - a.h) * s
}

/// All points where the range circle of radius `r` crosses the slice,
/// deduplicated within 1e-9 m, with their visibility resolved.
pub fn circle_slice_intersections<T: Real>(
    slice: &TerrainSlice<T>,
    r: T,
) -> Vec<IntersectionCandidate<T>> {
    let mut found: Vec<IntersectionCandidate<T>> = Vec::new();
    let tol = T::lit(1e-9);
    for (a, b) in slice.segments() {
        segment_circle_intersections((a.u, a.v), (b.u, b.v), r, |u, v, s| {
            if found
                .iter()
                .any(|c| (c.u - u).abs() <= tol && (c.v - v).abs() <= tol)
            {
                return;
            }
            found.push(IntersectionCandidate {
                u,
                v,
                h: lerp_height(&a, &b, s),
                visible: false,
            });
        });
    }
    for c in &mut found {
        c.visible = visible(slice, c.u, c.v);
    }
    found
}

/// Largest height among visible candidates at range `r`; `None` for shadow
/// or when the circle misses the terrain.
pub fn pixel_height<T: Real>(slice: &TerrainSlice<T>, r: T) -> Option<T> {
    circle_slice_intersections(slice, r)
        .into_iter()
        .filter(|c| c.visible)
        .map(|c| c.h)
        .fold(None, |best, h| match best {
            Some(b) if b >= h => Some(b),
            _ => Some(h),
        })
}
