//! The Chern–Ricci potential `f = log(iΩ∧Ω̄/ω³)` normalized against the cone.

use crate::conifold::{cone_metric, AdaptedFrame, ChartPoint};
use crate::error::{Error, Result};
use crate::field::MetricField;
use crate::forms::{HermitianMatrixForm, TwoTwoMatrixForm};

fn log_ratio(reference: f64, det: f64) -> Result<f64> {
    if !(det > 0.0) || !det.is_finite() {
        return Err(Error::SingularMetric { det });
    }
    Ok((reference / det).ln())
}

/// `f = log(det ω_co,0 / det ω)`; zero on the cone and on the CdLO metric.
pub fn chern_ricci_potential(field: &dyn MetricField, pt: &ChartPoint) -> Result<f64> {
    chern_ricci_of(&field.metric(pt)?, pt)
}

/// Determinants are taken in the adapted frame, where they stay O(1) at small `r`.
pub fn chern_ricci_of(h: &HermitianMatrixForm, pt: &ChartPoint) -> Result<f64> {
    let frame = AdaptedFrame::at(pt)?;
    log_ratio(frame.to_adapted(&cone_metric(pt)?).determinant(), frame.to_adapted(h).determinant())
}

/// Same quantity read off the square: `det ω = sqrt(det(Σ/2))`.
pub fn chern_ricci_from_square(sigma: &TwoTwoMatrixForm, pt: &ChartPoint) -> Result<f64> {
    let frame = AdaptedFrame::at(pt)?;
    let det_half = frame.to_adapted_two_two(sigma).determinant() / 8.0;
    if !(det_half > 0.0) {
        return Err(Error::SingularMetric { det: det_half });
    }
    log_ratio(frame.to_adapted(&cone_metric(pt)?).determinant(), det_half.sqrt())
}
