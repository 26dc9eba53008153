//! Metrics as evaluatable fields over the chart.

use std::sync::Arc;

use crate::cdlo::{cdlo_metric, RadialProfile};
use crate::conifold::{cone_metric, radius, ChartPoint};
use crate::error::{Error, Result};
use crate::forms::{HermitianMatrixForm, TwoTwoMatrixForm};

/// Which model a field belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Cone,
    Cdlo,
    Cutoff,
    SingularSide,
    Preglued,
    /// Test fields and negative controls.
    Synthetic,
}

/// Radial window in which a field may be evaluated.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct RadialDomain {
    pub r_min: f64,
    pub r_max: f64,
}

impl RadialDomain {
    pub const UNBOUNDED: Self = Self { r_min: 0.0, r_max: f64::INFINITY };

    pub fn check(&self, what: &'static str, pt: &ChartPoint) -> Result<f64> {
        let r = radius(pt)?;
        if r < self.r_min || r > self.r_max {
            return Err(Error::OutOfRange { what, r, min: self.r_min, max: self.r_max });
        }
        Ok(r)
    }
}

/// Point → positive (1,1)-form.
///
/// `square` returns the (2,2)-form that is the primary object for balanced
/// metrics. The default squares the metric; fields defined through their
/// square override it so that closedness is exact.
pub trait MetricField: Send + Sync {
    fn kind(&self) -> FieldKind;
    fn label(&self) -> String;
    fn domain(&self) -> RadialDomain;
    fn metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm>;

    fn square(&self, pt: &ChartPoint) -> Result<TwoTwoMatrixForm> {
        Ok(self.metric(pt)?.to_two_two())
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ConeField;

impl MetricField for ConeField {
    fn kind(&self) -> FieldKind {
        FieldKind::Cone
    }
    fn label(&self) -> String {
        "cone".into()
    }
    fn domain(&self) -> RadialDomain {
        RadialDomain::UNBOUNDED
    }
    fn metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        cone_metric(pt)
    }
}

#[derive(Clone, Debug)]
pub struct CdloField {
    pub profile: Arc<RadialProfile>,
}

impl CdloField {
    pub fn new(profile: Arc<RadialProfile>) -> Self {
        Self { profile }
    }
}

impl MetricField for CdloField {
    fn kind(&self) -> FieldKind {
        FieldKind::Cdlo
    }
    fn label(&self) -> String {
        "cdlo".into()
    }
    fn domain(&self) -> RadialDomain {
        let (lo, hi) = self.profile.y_range();
        RadialDomain { r_min: lo.cbrt(), r_max: hi.cbrt() }
    }
    fn metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        cdlo_metric(pt, &self.profile)
    }
}

/// Wraps a closure; used for controls and ad-hoc fields.
pub struct FnField<F> {
    pub name: String,
    pub f: F,
}

impl<F> MetricField for FnField<F>
where
    F: Fn(&ChartPoint) -> Result<HermitianMatrixForm> + Send + Sync,
{
    fn kind(&self) -> FieldKind {
        FieldKind::Synthetic
    }
    fn label(&self) -> String {
        self.name.clone()
    }
    fn domain(&self) -> RadialDomain {
        RadialDomain::UNBOUNDED
    }
    fn metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        (self.f)(pt)
    }
}
