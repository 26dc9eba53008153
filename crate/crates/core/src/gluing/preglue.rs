//! The preglued metric on the `w`-chart.
//!
//! The resolution side lives on the `ζ`-chart with `u_w = λ^{3/4} u_ζ`,
//! `v_w = λ^{3/4} v_ζ`, `z_w = z_ζ`, so that `r(w) = λ^{1/2} r(ζ)`. The metric is
//! `λω_R` for `r(w) < ε^p/2` and `ω̃_ε` elsewhere; both are the cone on
//! `ε^p/2 ≤ r(w) ≤ ε^p`.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

use crate::conifold::{radius, ChartPoint};
use crate::error::Result;
use crate::field::{FieldKind, MetricField, RadialDomain};
use crate::forms::{CMat3, HermitianMatrixForm, TwoTwoMatrixForm};

use super::cutoff_metric::{CutoffMetric, TailSource};
use super::params::GluingParams;
use super::singular::singular_side_metric;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `λω_R` with `r(ζ) < R/4`: the rescaled CdLO metric.
    Resolution,
    /// `λω_R` with `R/4 ≤ r(ζ) < R/2`.
    ResolutionCutoff,
    /// `ε^p/2 ≤ r(w) ≤ ε^p`: the cone.
    Neck,
    /// `ε^p < r(w) < 2ε^p`.
    SingularCutoff,
    /// `r(w) ≥ 2ε^p`.
    SingularSide,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Resolution => "resolution",
            Self::ResolutionCutoff => "resolution-cutoff",
            Self::Neck => "neck",
            Self::SingularCutoff => "singular-cutoff",
            Self::SingularSide => "singular-side",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PregluedField {
    pub params: GluingParams,
    pub cutoff: CutoffMetric,
}

impl PregluedField {
    /// Checks feasibility and builds `ω_R` with `R = ε^{-q}`.
    pub fn new(params: GluingParams, tail: TailSource) -> Result<Self> {
        params.check_feasible()?;
        let cutoff = CutoffMetric::new(params.r_cutoff(), tail)?;
        Ok(Self { params, cutoff })
    }

    /// Same without the feasibility gate, for decay sweeps outside the solver's range.
    pub fn new_unchecked(params: GluingParams, tail: TailSource) -> Result<Self> {
        params.validate()?;
        let cutoff = CutoffMetric::new(params.r_cutoff(), tail)?;
        Ok(Self { params, cutoff })
    }

    /// `w`-chart point → `ζ`-chart point.
    pub fn to_resolution_chart(&self, pt: &ChartPoint) -> ChartPoint {
        let k = self.params.lambda().powf(-0.75);
        ChartPoint::new(pt.z, pt.u * k, pt.v * k)
    }

    /// `ζ`-chart point → `w`-chart point.
    pub fn from_resolution_chart(&self, pt: &ChartPoint) -> ChartPoint {
        let k = self.params.lambda().powf(0.75);
        ChartPoint::new(pt.z, pt.u * k, pt.v * k)
    }

    /// `dζ = J dw`.
    fn jacobian(&self) -> CMat3 {
        let k = Complex64::new(self.params.lambda().powf(-0.75), 0.0);
        Matrix3::from_diagonal(&nalgebra::Vector3::new(k, k, Complex64::new(1.0, 0.0)))
    }

    pub fn region(&self, pt: &ChartPoint) -> Result<Region> {
        let r = radius(pt)?;
        let e = self.params.neck_radius();
        let r_zeta = r / self.params.lambda().sqrt();
        Ok(if r < 0.5 * e {
            if r_zeta < 0.25 * self.cutoff.r_cut {
                Region::Resolution
            } else {
                Region::ResolutionCutoff
            }
        } else if r <= e {
            Region::Neck
        } else if r < 2.0 * e {
            Region::SingularCutoff
        } else {
            Region::SingularSide
        })
    }

    /// `λω_R` pulled back to the `w`-chart.
    pub fn resolution_metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        let h = self.cutoff.omega(&self.to_resolution_chart(pt))?;
        Ok(h.transform(&self.jacobian()).scale(self.params.lambda()))
    }
}

impl MetricField for PregluedField {
    fn kind(&self) -> FieldKind {
        FieldKind::Preglued
    }
    fn label(&self) -> String {
        "preglued".into()
    }
    fn domain(&self) -> RadialDomain {
        RadialDomain { r_min: self.params.lambda().sqrt() * self.cutoff.tail.r_min(), r_max: 1.0 }
    }
    fn metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        let r = self.domain().check("preglued metric", pt)?;
        if r < 0.5 * self.params.neck_radius() {
            self.resolution_metric(pt)
        } else {
            singular_side_metric(pt, &self.params)
        }
    }
    fn square(&self, pt: &ChartPoint) -> Result<TwoTwoMatrixForm> {
        let r = self.domain().check("preglued metric", pt)?;
        if r < 0.5 * self.params.neck_radius() {
            let s = self.cutoff.squared(&self.to_resolution_chart(pt))?;
            let l = self.params.lambda();
            Ok(s.transform(&self.jacobian()).scale(l * l))
        } else {
            Ok(singular_side_metric(pt, &self.params)?.to_two_two())
        }
    }
}
