use crate::geom::TerrainSlice;
use crate::scalar::Real;

/// Distance along the ray below which a hit counts as the target itself.
pub const SELF_HIT_TOLERANCE: f64 = 1e-6;

#[inline]
fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

/// True iff the open segment from the sensor (plane origin) to `(u, v)` does
/// not meet any slice segment more than 1e-6 m before the target.
pub fn visible<T: Real>(slice: &TerrainSlice<T>, u: T, v: T) -> bool {
    let p = (u.as_f64(), v.as_f64());
    let p_len = (p.0 * p.0 + p.1 * p.1).sqrt();
    if p_len <= SELF_HIT_TOLERANCE {
        return true;
    }
    let limit = 1.0 - SELF_HIT_TOLERANCE / p_len;
    let slack = 1e-12;
    for (a, b) in slice.segments() {
        let a = (a.u.as_f64(), a.v.as_f64());
        let b = (b.u.as_f64(), b.v.as_f64());
        let e = (b.0 - a.0, b.1 - a.1);
        let denom = cross(p, e);
        let e_len = (e.0 * e.0 + e.1 * e.1).sqrt();
        if denom.abs() <= 1e-14 * p_len * e_len {
            // parallel: only a collinear overlap can block
            if cross(a, p).abs() > 1e-9 * p_len * p_len {
                continue;
            }
            let pp = p_len * p_len;
            let la = (a.0 * p.0 + a.1 * p.1) / pp;
            let lb = (b.0 * p.0 + b.1 * p.1) / pp;
            let lo = la.min(lb).max(0.0);
            let hi = la.max(lb).min(1.0);
            if lo <= hi && lo < limit {
                return false;
            }
            continue;
        }
        let lambda = cross(a, e) / denom;
        let mu = cross(a, p) / denom;
        if mu >= -slack && mu <= 1.0 + slack && lambda >= 0.0 && lambda < limit {
            return false;
        }
    }
    true
}

/// Horizon table answering the same question as [`visible`] in O(log n).
///
/// For a polyline sorted by `u`, a target on the right side (`u > 0`) is
/// hidden iff some vertex nearer in `u` lies above the sensor-target ray, that
/// is, has a larger elevation slope `v/u`. The left side is mirrored.
#[derive(Debug, Clone)]
pub struct HorizonIndex<T> {
    right_u: Vec<T>,
    right_max_slope: Vec<T>,
    left_u: Vec<T>,
    left_max_slope: Vec<T>,
    nadir_blocked: bool,
}

impl<T: Real> HorizonIndex<T> {
    pub fn new(slice: &TerrainSlice<T>) -> Self {
        let verts = &slice.vertices;
        let mut right_u = Vec::new();
        let mut right_max_slope = Vec::new();
        let mut best = T::neg_infinity();
        for p in verts.iter().filter(|p| p.u > T::zero()) {
            best = best.max(p.v / p.u);
            right_u.push(p.u);
            right_max_slope.push(best);
        }
        let mut left_u = Vec::new();
        let mut left_max_slope = Vec::new();
        best = T::neg_infinity();
        for p in verts.iter().rev().filter(|p| p.u < T::zero()) {
            best = best.max(p.v / -p.u);
            left_u.push(-p.u);
            left_max_slope.push(best);
        }
        // terrain height directly below the sensor, when the slice spans u = 0
        let mut nadir_blocked = false;
        for w in verts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a.u <= T::zero() && b.u >= T::zero() {
                let v0 = if b.u == a.u {
                    a.v.max(b.v)
                } else {
                    a.v + (b.v - a.v) * (-a.u / (b.u - a.u))
                };
                if v0 >= T::zero() {
                    nadir_blocked = true;
                }
            }
        }
        Self {
            right_u,
            right_max_slope,
            left_u,
            left_max_slope,
            nadir_blocked,
        }
    }

    pub fn is_visible(&self, u: T, v: T) -> bool {
        if self.nadir_blocked {
            return false;
        }
        let (dist, us, us_slope) = if u > T::zero() {
            (u, &self.right_u, &self.right_max_slope)
        } else if u < T::zero() {
            (-u, &self.left_u, &self.left_max_slope)
        } else {
            return true;
        };
        let p_len = (u * u + v * v).sqrt();
        let limit = dist - T::lit(SELF_HIT_TOLERANCE) * dist / p_len;
        let k = us.partition_point(|&x| x < limit);
        if k == 0 {
            return true;
        }
        let slope = v / dist;
        let tol = T::epsilon() * T::lit(8.0) * slope.abs().max(T::one());
        us_slope[k - 1] <= slope + tol
    }
}
