//! Radiometric calibration of complex samples to normalized radar brightness.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::raster::Grid;
use crate::scalar::Real;

/// Lower end of the brightness clip interval (dB); also the value given to zero returns.
pub const CLIP_MIN_DB: f64 = -30.0;
/// Upper end of the brightness clip interval (dB).
pub const CLIP_MAX_DB: f64 = 10.0;

/// Complex digital numbers with their calibration factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SlcPatch<T> {
    pub samples: Grid<Complex<T>>,
    k_s: T,
}

impl<T: Real> SlcPatch<T> {
    pub fn new(samples: Grid<Complex<T>>, k_s: T) -> Result<Self> {
        if !(k_s > T::zero()) || !k_s.is_finite() {
            return Err(Error::InvalidInput(format!("calibration factor must be > 0, got {k_s}")));
        }
        Ok(Self { samples, k_s })
    }

    pub fn k_s(&self) -> T {
        self.k_s
    }
}

/// Intensities normalized to [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityPatch<T> {
    pub values: Grid<T>,
}

/// β⁰ = 10·log10(k_s·|u|²) in dB; zero returns map to the clip minimum.
pub fn radar_brightness<T: Real>(patch: &SlcPatch<T>) -> Grid<T> {
    let floor = T::lit(CLIP_MIN_DB);
    let ten = T::lit(10.0);
    let k_s = patch.k_s;
    patch.samples.map(|u| {
        let power = k_s * u.norm_sqr();
        if power > T::zero() {
            ten * power.log10()
        } else {
            floor
        }
    })
}

/// Clips to [−30, +10] dB and maps linearly onto [0, 1].
pub fn clip_normalize<T: Real>(db: &Grid<T>) -> IntensityPatch<T> {
    let lo = T::lit(CLIP_MIN_DB);
    let hi = T::lit(CLIP_MAX_DB);
    let span = hi - lo;
    IntensityPatch {
        values: db.map(|b| (b.max(lo).min(hi) - lo) / span),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn patch(vals: &[(f64, f64)], k_s: f64) -> SlcPatch<f64> {
        let g = Grid::from_vec(1, vals.len(), vals.iter().map(|&(r, i)| Complex::new(r, i)).collect()).unwrap();
        SlcPatch::new(g, k_s).unwrap()
    }

    #[test]
    fn brightness_values() {
        let b = radar_brightness(&patch(&[(1.0, 0.0), (6.0, 8.0), (0.0, 0.0)], 1.0));
        assert_eq!(b.as_slice(), &[0.0, 20.0, -30.0]);
        let b = radar_brightness(&patch(&[(0.0, 2.0)], 0.25));
        assert_eq!(b.get(0, 0), 0.0);
    }

    #[test]
    fn clip_endpoints_are_exact() {
        let db = Grid::from_vec(1, 5, vec![-30.0, 10.0, 0.0, -45.0, 99.0]).unwrap();
        let n = clip_normalize(&db);
        assert_eq!(n.values.as_slice(), &[0.0, 1.0, 0.75, 0.0, 1.0]);
        let db32 = Grid::from_vec(1, 3, vec![-30.0f32, 10.0, 0.0]).unwrap();
        assert_eq!(clip_normalize(&db32).values.as_slice(), &[0.0f32, 1.0, 0.75]);
    }

    #[test]
    fn rejects_nonpositive_factor() {
        let g = Grid::filled(1, 1, Complex::new(1.0, 0.0));
        assert!(SlcPatch::new(g.clone(), 0.0).is_err());
        assert!(SlcPatch::new(g, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn normalization_is_monotone_and_bounded(a in -200.0..200.0f64, b in -200.0..200.0f64) {
            let g = Grid::from_vec(1, 2, vec![a.min(b), a.max(b)]).unwrap();
            let n = clip_normalize(&g).values;
            prop_assert!(n.get(0, 0) <= n.get(0, 1));
            prop_assert!((0.0..=1.0).contains(&n.get(0, 0)) && (0.0..=1.0).contains(&n.get(0, 1)));
        }

        #[test]
        fn factor_scaling_is_absorbed(re in -1e3..1e3f64, im in -1e3..1e3f64, k in 1e-6..1e3f64, c in 1e-3..1e3f64) {
            prop_assume!(re * re + im * im > 1e-12);
            let a = radar_brightness(&patch(&[(re, im)], k)).get(0, 0);
            let s = c.sqrt();
            let b = radar_brightness(&patch(&[(re / s, im / s)], k * c)).get(0, 0);
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}
