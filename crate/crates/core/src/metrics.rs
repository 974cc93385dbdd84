//! Height-map evaluation: RMSE, RMSE_log, Rel, Rel_log, δ₁..δ₃ and global SSIM.
//!
//! `reference` is the ground truth y, `predicted` is ŷ. A pixel takes part only
//! where both rasters hold a value (non-NaN). Sums use a fixed pairwise order.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::raster::Grid;
use crate::scalar::{pairwise_sum, Real};

/// Stabilizing constants of the SSIM.
pub const SSIM_C1: f64 = 1e-6;
pub const SSIM_C2: f64 = 1e-6;
pub const DELTA_BASE: f64 = 1.25;

/// Full metric suite for one prediction/reference pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport<T> {
    pub rmse: T,
    pub rmse_log: T,
    pub rel: T,
    pub rel_log: T,
    /// Percent; `None` when no pixel is positive in both rasters.
    pub delta1: Option<T>,
    pub delta2: Option<T>,
    pub delta3: Option<T>,
    pub ssim: T,
    pub n_valid: usize,
    /// Valid pixels left out of δ because y or ŷ is not positive.
    pub delta_excluded: usize,
}

fn paired<T: Real>(reference: &Grid<T>, predicted: &Grid<T>) -> Result<(Vec<T>, Vec<T>)> {
    if reference.shape() != predicted.shape() {
        return Err(Error::ShapeMismatch(reference.shape(), predicted.shape()));
    }
    let (mut y, mut yh) = (Vec::new(), Vec::new());
    for (&a, &b) in reference.as_slice().iter().zip(predicted.as_slice()) {
        if !a.is_nan() && !b.is_nan() {
            y.push(a);
            yh.push(b);
        }
    }
    if y.is_empty() {
        return Err(Error::NoValidPixels);
    }
    Ok((y, yh))
}

fn mean<T: Real>(terms: &[T]) -> T {
    pairwise_sum(terms) / T::from_usize_lossy(terms.len())
}

fn log_terms<T: Real>(y: &[T], yh: &[T]) -> Result<Vec<T>> {
    let one = T::one();
    y.iter()
        .zip(yh)
        .enumerate()
        .map(|(i, (&a, &b))| {
            for v in [a, b] {
                if v < T::zero() {
                    return Err(Error::NegativeHeight {
                        index: i,
                        value: v.as_f64(),
                    });
                }
            }
            Ok(((a + one).log10() - (b + one).log10()).abs())
        })
        .collect()
}

pub fn rmse<T: Real>(reference: &Grid<T>, predicted: &Grid<T>) -> Result<T> {
    let (y, yh) = paired(reference, predicted)?;
    let sq: Vec<T> = y.iter().zip(&yh).map(|(&a, &b)| (a - b) * (a - b)).collect();
    Ok(mean(&sq).sqrt())
}

/// RMSE of log10(h + 1); heights must be non-negative.
pub fn rmse_log<T: Real>(reference: &Grid<T>, predicted: &Grid<T>) -> Result<T> {
    let (y, yh) = paired(reference, predicted)?;
    let sq: Vec<T> = log_terms(&y, &yh)?.into_iter().map(|d| d * d).collect();
    Ok(mean(&sq).sqrt())
}

/// Mean of |y − ŷ| / (|y| + 1). Not symmetric in its arguments.
pub fn rel<T: Real>(reference: &Grid<T>, predicted: &Grid<T>) -> Result<T> {
    let (y, yh) = paired(reference, predicted)?;
    let terms: Vec<T> = y
        .iter()
        .zip(&yh)
        .map(|(&a, &b)| (a - b).abs() / (a.abs() + T::one()))
        .collect();
    Ok(mean(&terms))
}

/// Mean of |log10(y + 1) − log10(ŷ + 1)|.
pub fn rel_log<T: Real>(reference: &Grid<T>, predicted: &Grid<T>) -> Result<T> {
    let (y, yh) = paired(reference, predicted)?;
    Ok(mean(&log_terms(&y, &yh)?))
}

/// δᵢ in percent: share of pixels with max(y/ŷ, ŷ/y) < 1.25ⁱ. Pixels where
/// either value is not positive are left out; their count is returned too.
pub fn delta_with_exclusions<T: Real>(
    reference: &Grid<T>,
    predicted: &Grid<T>,
    i: u32,
) -> Result<(T, usize)> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidInput(format!("delta order must be 1, 2 or 3, got {i}")));
    }
    let (y, yh) = paired(reference, predicted)?;
    let threshold = T::lit(DELTA_BASE.powi(i as i32));
    let mut counted = 0usize;
    let mut below = 0usize;
    for (&a, &b) in y.iter().zip(&yh) {
        if !(a > T::zero() && b > T::zero()) {
            continue;
        }
        counted += 1;
        if (a / b).max(b / a) < threshold {
            below += 1;
        }
    }
    if counted == 0 {
        return Err(Error::NoValidPixels);
    }
    let pct = T::lit(100.0) * T::from_usize_lossy(below) / T::from_usize_lossy(counted);
    Ok((pct, y.len() - counted))
}

pub fn delta<T: Real>(reference: &Grid<T>, predicted: &Grid<T>, i: u32) -> Result<T> {
    delta_with_exclusions(reference, predicted, i).map(|(p, _)| p)
}

/// Single-window SSIM over all valid pixels with population statistics and
/// the standard denominator (μ_y² + μ_ŷ² + C₁)(σ_y² + σ_ŷ² + C₂).
pub fn ssim<T: Real>(reference: &Grid<T>, predicted: &Grid<T>) -> Result<T> {
    let (y, yh) = paired(reference, predicted)?;
    let (my, mp) = (mean(&y), mean(&yh));
    let dy: Vec<T> = y.iter().map(|&a| a - my).collect();
    let dp: Vec<T> = yh.iter().map(|&b| b - mp).collect();
    let var_y = mean(&dy.iter().map(|&a| a * a).collect::<Vec<_>>());
    let var_p = mean(&dp.iter().map(|&b| b * b).collect::<Vec<_>>());
    let cov = mean(&dy.iter().zip(&dp).map(|(&a, &b)| a * b).collect::<Vec<_>>());
    let (c1, c2) = (T::lit(SSIM_C1), T::lit(SSIM_C2));
    let two = T::lit(2.0);
    let num = (two * my * mp + c1) * (two * cov + c2);
    let den = (my * my + mp * mp + c1) * (var_y + var_p + c2);
    Ok(num / den)
}

/// Computes every metric. δ fields are `None` when no pixel is positive in both.
pub fn evaluate<T: Real>(reference: &Grid<T>, predicted: &Grid<T>) -> Result<MetricReport<T>> {
    let (y, _) = paired(reference, predicted)?;
    let deltas = (1..=3)
        .map(|i| match delta_with_exclusions(reference, predicted, i) {
            Ok((p, ex)) => Ok((Some(p), ex)),
            Err(Error::NoValidPixels) => Ok((None, y.len())),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricReport {
        rmse: rmse(reference, predicted)?,
        rmse_log: rmse_log(reference, predicted)?,
        rel: rel(reference, predicted)?,
        rel_log: rel_log(reference, predicted)?,
        delta1: deltas[0].0,
        delta2: deltas[1].0,
        delta3: deltas[2].0,
        ssim: ssim(reference, predicted)?,
        n_valid: y.len(),
        delta_excluded: deltas[0].1,
    })
}

impl<T: Real> MetricReport<T> {
    /// One `key = value` per line, preceded by a comment header.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<T>| v.map_or_else(|| "none".to_string(), |x| format!("{x}"));
        format!(
            "# height metrics (reference = y, prediction = y_hat)\n\
             # ssim: single window, denominator (mu_y^2 + mu_yhat^2 + C1)(sigma_y^2 + sigma_yhat^2 + C2), C1 = C2 = 1e-6\n\
             # delta_*: percent of pixels positive in both rasters\n\
             rmse = {}\nrmse_log = {}\nrel = {}\nrel_log = {}\ndelta1 = {}\ndelta2 = {}\ndelta3 = {}\nssim = {}\nn_valid = {}\ndelta_excluded = {}\n",
            self.rmse,
            self.rmse_log,
            self.rel,
            self.rel_log,
            opt(self.delta1),
            opt(self.delta2),
            opt(self.delta3),
            self.ssim,
            self.n_valid,
            self.delta_excluded
        )
    }
}
