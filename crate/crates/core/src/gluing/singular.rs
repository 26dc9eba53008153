use crate::conifold::{cone_metric, positivity_against_cone, radial_hessian, ChartPoint, Jet};
use crate::error::{Error, Result};
use crate::field::{FieldKind, MetricField, RadialDomain};
use crate::forms::HermitianMatrixForm;

use super::cutoff::chi;
use super::params::GluingParams;

/// Synthetic potential `φ = A·r^{2+λ₀}` as a function of `ρ = r³`.
pub fn synthetic_potential(rho: f64, params: &GluingParams) -> Jet {
    Jet::power(rho, params.amplitude, (2.0 + params.lambda0) / 3.0)
}

/// `χ_ε(r)·φ` as a function of `ρ`.
fn cut_potential(rho: f64, params: &GluingParams) -> Jet {
    let r = Jet::power(rho, 1.0, 1.0 / 3.0);
    let c = r.compose(chi(r.v, params.epsilon, params.p));
    c.mul(synthetic_potential(rho, params))
}

fn region_name(r: f64, params: &GluingParams) -> &'static str {
    let e = params.neck_radius();
    if r <= e {
        "cone region r ≤ ε^p"
    } else if r < 2.0 * e {
        "cut-off annulus ε^p < r < 2ε^p"
    } else {
        "outer region r ≥ 2ε^p"
    }
}

/// `ω̃_ε = ω_co,0 + i∂∂̄(χ_ε(r)φ)`.
pub fn singular_side_metric(pt: &ChartPoint, params: &GluingParams) -> Result<HermitianMatrixForm> {
    let rho = pt.rho()?;
    let r = rho.cbrt();
    let cone = cone_metric(pt)?;
    if r <= params.neck_radius() {
        return Ok(cone);
    }
    let h = cone.add(&radial_hessian(pt, cut_potential(rho, params)));
    let pos = positivity_against_cone(pt, &h)?;
    if !pos.positive {
        return Err(Error::PositivityLoss { region: region_name(r, params).into(), r, min_eigenvalue: pos.min_eigenvalue });
    }
    Ok(h)
}

/// The uncut metric `ω_co,0 + i∂∂̄φ`.
pub fn singular_reference_metric(pt: &ChartPoint, params: &GluingParams) -> Result<HermitianMatrixForm> {
    let rho = pt.rho()?;
    Ok(cone_metric(pt)?.add(&radial_hessian(pt, synthetic_potential(rho, params))))
}

#[derive(Clone, Copy, Debug)]
pub struct SingularSideField {
    pub params: GluingParams,
}

impl MetricField for SingularSideField {
    fn kind(&self) -> FieldKind {
        FieldKind::SingularSide
    }
    fn label(&self) -> String {
        "singular-side".into()
    }
    fn domain(&self) -> RadialDomain {
        RadialDomain { r_min: 0.0, r_max: 1.0 }
    }
    fn metric(&self, pt: &ChartPoint) -> Result<HermitianMatrixForm> {
        singular_side_metric(pt, &self.params)
    }
}
