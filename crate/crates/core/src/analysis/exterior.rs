//! Numerical exterior derivative of `ω²`.

use num_complex::Complex64;
use serde::Serialize;

use crate::conifold::ChartPoint;
use crate::error::Result;
use crate::field::MetricField;
use crate::forms::{CMat3, PQForm, TwoTwoMatrixForm};

/// Per-coordinate steps: fibre directions scale with `|(u, v)|`, the base with `max(1, |z|)`.
pub fn coordinate_steps(pt: &ChartPoint, h: f64) -> [f64; 6] {
    let fibre = pt.fibre_norm_sqr().sqrt();
    let base = pt.z.norm().max(1.0);
    [h * fibre, h * fibre, h * fibre, h * fibre, h * base, h * base]
}

/// `dσ` for `σ = field.square`, split into its (3,2) and (2,3) parts, by
/// second-order central differences in the six real coordinates.
pub fn exterior_derivative(field: &dyn MetricField, pt: &ChartPoint, h: f64) -> Result<(PQForm, PQForm)> {
    let x0 = pt.to_real();
    let steps = coordinate_steps(pt, h);
    let mut partial = [CMat3::zeros(); 6];
    for (a, d) in partial.iter_mut().enumerate() {
        let mut xp = x0;
        let mut xm = x0;
        xp[a] += steps[a];
        xm[a] -= steps[a];
        let sp = field.square(&ChartPoint::from_real(&xp))?;
        let sm = field.square(&ChartPoint::from_real(&xm))?;
        *d = (sp.m - sm.m) / Complex64::new(2.0 * steps[a], 0.0);
    }
    let half = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut d32 = PQForm::zero(3, 2)?;
    let mut d23 = PQForm::zero(2, 3)?;
    for j in 0..3 {
        let (dx, dy) = (partial[2 * j], partial[2 * j + 1]);
        // Wirtinger derivatives ∂_j = ½(∂_x − i∂_y), ∂̄_j = ½(∂_x + i∂_y)
        let holo = TwoTwoMatrixForm { m: (dx - dy * i) * half }.to_pq_form();
        let anti = TwoTwoMatrixForm { m: (dx + dy * i) * half }.to_pq_form();
        d32 = d32.add(&PQForm::dtheta(j).wedge(&holo)?)?;
        d23 = d23.add(&PQForm::dtheta_bar(j).wedge(&anti)?)?;
    }
    Ok((d32, d23))
}

/// Max-norm of `d(ω²)` at `pt` with relative step `h`.
pub fn exterior_derivative_residual(field: &dyn MetricField, pt: &ChartPoint, h: f64) -> Result<f64> {
    let (a, b) = exterior_derivative(field, pt, h)?;
    Ok(a.max_abs().max(b.max_abs()))
}

/// Residuals at `h` and `h/2` and their ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RefinementSample {
    pub r: f64,
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
}

pub fn refinement_sample(field: &dyn MetricField, pt: &ChartPoint, h: f64) -> Result<RefinementSample> {
    let coarse = exterior_derivative_residual(field, pt, h)?;
    let fine = exterior_derivative_residual(field, pt, 0.5 * h)?;
    Ok(RefinementSample { r: crate::conifold::radius(pt)?, coarse, fine, ratio: coarse / fine })
}
