//! The cut-off balanced metric `ω_R`.
//!
//! Write `ω_co,1 = ω_co,0 + S + i∂∂̄t` with `S = 4π*ω_FS − 6i∂∂̄ log r` and `t` the
//! tail of the potential. Then `ω_co,1² = ω_co,0² + 2ω_co,0∧S + i∂∂̄Q` with
//!
//! ```text
//! Q = 2t·ω_co,0 + 2t·S + t·i∂∂̄t − 48 log r·π*ω_FS + 36 log r·i∂∂̄ log r
//! ```
//!
//! and the cut-off square is `ω_co,0² + 2i∂∂̄((3/2)r²ξ_R)∧S + i∂∂̄(ξ_R Q)`.
//! Every term is evaluated as `i∂∂̄(ξ_R A)∧i∂∂̄B` with `A`, `B` radial or
//! pulled back from the base, so the result is exactly closed.

use std::sync::Arc;

use crate::cdlo::{tail_potential, RadialProfile, SeriesCoefficients};
use crate::conifold::{cone_metric, fs_form, positivity_against_cone_two_two, radial_hessian, slow_term, ChartPoint, Jet};
use crate::error::{Error, Result};
use crate::field::{FieldKind, MetricField, RadialDomain};
use crate::forms::{HermitianMatrixForm, TwoTwoMatrixForm};

use super::cutoff::xi_of_rho;

/// Where the tail `t(y)` comes from.
#[derive(Clone, Debug)]
pub enum TailSource {
    Profile(Arc<RadialProfile>),
    Series(SeriesCoefficients),
}

impl TailSource {
    pub fn tail(&self, y: f64) -> Result<Jet> {
        match self {
            Self::Profile(p) => Ok(p.evaluate(y)?.tail),
            Self::Series(c) => tail_potential(y, c),
        }
    }

    /// Smallest radius at which the tail is available.
    pub fn r_min(&self) -> f64 {
        match self {
            Self::Profile(p) => p.y_range().0.cbrt(),
            Self::Series(c) => c.y_min.cbrt(),
        }
    }
}

/// The explicit (1,1)-form `Q` from the tail jet at `pt`.
pub fn tail_one_one_from_jet(pt: &ChartPoint, t: Jet) -> Result<HermitianMatrixForm> {
    let y = pt.rho()?;
    let log_rho = y.ln();
    let cone = cone_metric(pt)?;
    let s = slow_term(pt)?;
    let ddbar_t = radial_hessian(pt, t);
    let ddbar_log_rho = radial_hessian(pt, Jet::log(y, 1.0));
    Ok(cone
        .scale(2.0 * t.v)
        .add(&s.scale(2.0 * t.v))
        .add(&ddbar_t.scale(t.v))
        .add(&fs_form(pt).scale(-16.0 * log_rho))
        .add(&ddbar_log_rho.scale(4.0 * log_rho)))
}

/// `Q` with the tail taken from truncated series coefficients.
pub fn tail_one_one(pt: &ChartPoint, c: &SeriesCoefficients) -> Result<HermitianMatrixForm> {
    tail_one_one_from_jet(pt, tail_potential(pt.rho()?, c)?)
}

/// `i∂∂̄(ξ_R Q)` as a (2,2)-form, given `ξ_R` and `t` as jets in `ρ`.
fn ddbar_cut_tail(pt: &ChartPoint, y: f64, xi: Jet, t: Jet) -> Result<TwoTwoMatrixForm> {
    let cone = cone_metric(pt)?;
    let s = slow_term(pt)?;
    let ddbar = |a: Jet| radial_hessian(pt, xi.mul(a));
    let w = TwoTwoMatrixForm::wedge_of;
    let l = radial_hessian(pt, Jet::log(y, 1.0 / 3.0));
    Ok(w(&ddbar(t.scale(2.0)), &cone)
        .add(&w(&ddbar(t.scale(2.0)), &s))
        .add(&w(&ddbar(t), &radial_hessian(pt, t)))
        .add(&w(&ddbar(Jet::log(y, -16.0)), &fs_form(pt)))
        .add(&w(&ddbar(Jet::log(y, 12.0)), &l)))
}

/// The cut-off balanced metric at cut-off radius `R`.
#[derive(Clone, Debug)]
pub struct CutoffMetric {
    pub r_cut: f64,
    pub tail: TailSource,
}

impl CutoffMetric {
    pub fn new(r_cut: f64, tail: TailSource) -> Result<Self> {
        if !(r_cut.is_finite() && r_cut / 4.0 >= tail.r_min()) {
            return Err(Error::InvalidParameter(format!(
                "cut-off radius R = {r_cut} must satisfy R/4 ≥ {} (inner edge of the tail)",
                tail.r_min()
            )));
        }
        Ok(Self { r_cut, tail })
    }

    fn inner_metric(&self, pt: &ChartPoint, y: f64) -> Result<HermitianMatrixForm> {
        let t = self.tail.tail(y)?;
        Ok(cone_metric(pt)?.add(&slow_term(pt)?).add(&radial_hessian(pt, t)))
    }

    /// `ω_R²`.
    pub fn squared(&self, pt: &ChartPoint) -> Result<TwoTwoMatrixForm> {
        let y = pt.rho()?;
        let r = y.cbrt();
        if r >= 0.5 * self.r_cut {
            return Ok(cone_metric(pt)?.to_two_two());
        }
        if r < 0.25 * self.r_cut {
            return Ok(self.inner_metric(pt, y)?.to_two_two());
        }
        let xi = xi_of_rho(y, self.r_cut);
        let eta = xi.mul(Jet::power(y, 1.5, 2.0 / 3.0));
        let s = slow_term(pt)?;
        let sigma = cone_metric(pt)?
            .to_two_two()
            .add(&TwoTwoMatrixForm::wedge_of(&radial_hessian(pt, eta), &s).scale(2.0))
            .add(&ddbar_cut_tail(pt, y, xi, self.tail.tail(y)?)?);
        let pos = positivity_against_cone_two_two(pt, &sigma)?;
        if !pos.positive {
            return Err(Error::PositivityLoss { region: "cut-off annulus R/4 ≤ r < R/2".into(), r, min_eigenvalue: pos.min_eigenvalue });
        }
        Ok(sigma)
    }

    /// `ω_R`, the Michelsohn root of [`squared`](Self::squared).
    pub fn omega(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        let y = pt.rho()?;
        let r = y.cbrt();
        if r >= 0.5 * self.r_cut {
            return cone_metric(pt);
        }
        if r < 0.25 * self.r_cut {
            return self.inner_metric(pt, y);
        }
        self.squared(pt)?.michelsohn_root()
    }
}

/// `ω_R²` at `pt` for cut-off radius `R` and tail series `c`.
pub fn cutoff_squared(pt: &ChartPoint, r_cut: f64, c: &SeriesCoefficients) -> Result<TwoTwoMatrixForm> {
    CutoffMetric::new(r_cut, TailSource::Series(c.clone()))?.squared(pt)
}

/// `ω_R` at `pt` for cut-off radius `R` and tail series `c`.
pub fn omega_r(pt: &ChartPoint, r_cut: f64, c: &SeriesCoefficients) -> Result<HermitianMatrixForm> {
    CutoffMetric::new(r_cut, TailSource::Series(c.clone()))?.omega(pt)
}

impl MetricField for CutoffMetric {
    fn kind(&self) -> FieldKind {
        FieldKind::Cutoff
    }
    fn label(&self) -> String {
        format!("cutoff(R={})", self.r_cut)
    }
    fn domain(&self) -> RadialDomain {
        RadialDomain { r_min: self.tail.r_min(), r_max: f64::INFINITY }
    }
    fn metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        self.domain().check("cut-off metric", pt)?;
        self.omega(pt)
    }
    fn square(&self, pt: &ChartPoint) -> Result<TwoTwoMatrixForm> {
        self.domain().check("cut-off metric", pt)?;
        self.squared(pt)
    }
}

