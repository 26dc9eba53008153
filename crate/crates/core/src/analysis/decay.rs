//! Log-log regression of sampled decay.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub quantity: String,
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual of the fit in log space.
    pub max_residual: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    /// Samples dropped because the value was zero.
    pub dropped: usize,
    pub predicted: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    pub notes: Vec<String>,
    /// The `(r, value)` pairs that were fitted.
    pub data: Vec<(f64, f64)>,
}

impl DecayReport {
    /// Attaches a predicted exponent and tolerance and records the verdict.
    pub fn with_prediction(mut self, predicted: f64, tolerance: f64) -> Self {
        self.pass = Some((self.slope - predicted).abs() <= tolerance);
        self.predicted = Some(predicted);
        self.tolerance = Some(tolerance);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

/// Least-squares slope of `log|value|` against `log r`.
pub fn decay_fit(quantity: &str, samples: &[(f64, f64)]) -> Result<DecayReport> {
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) || samples.iter().any(|s| !(s.0 > 0.0)) {
        return Err(Error::InvalidParameter("decay samples need positive, strictly increasing radii".into()));
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(Error::InvalidParameter("decay samples must be finite".into()));
    }
    let kept: Vec<(f64, f64)> = samples.iter().filter(|s| s.1 != 0.0).map(|&(r, v)| (r.ln(), v.abs().ln())).collect();
    let dropped = samples.len() - kept.len();
    if kept.len() < 4 {
        return Err(Error::TooFewSamples(kept.len()));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = kept.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    let mut report = DecayReport {
        quantity: quantity.to_string(),
        slope,
        intercept,
        max_residual,
        r_min: samples[0].0,
        r_max: samples[samples.len() - 1].0,
        samples: kept.len(),
        dropped,
        predicted: None,
        tolerance: None,
        pass: None,
        notes: Vec::new(),
        data: samples.to_vec(),
    };
    if dropped > 0 {
        report.notes.push(format!("{dropped} zero-valued samples dropped"));
    }
    Ok(report)
}
