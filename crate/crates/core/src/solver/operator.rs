//! The ansatz `ω_ψ² = ω² + i∂∂̄(ψω)` for radial `ψ` and its linearization.
//!
//! For `ψ = ψ(ρ)` the product rule gives
//! `∂_a∂̄_b(ψh) = ψ h_{ab̄} + ψ_ρ(ρ_a ∂̄_b h + ρ_b̄ ∂_a h + ρ_{ab̄} h) + ψ_ρρ ρ_a ρ_b̄ h`,
//! so `i∂∂̄(ψω) = ψA₀ + ψ_ρA₁ + ψ_ρρA₂` with (2,2)-forms built from numerical
//! Wirtinger derivatives of the metric.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::analysis::chern_ricci_potential;
use crate::analysis::exterior::coordinate_steps;
use crate::conifold::{positivity_against_cone_two_two, radius, rho_gradient, rho_hessian, AdaptedFrame, ChartPoint, Jet};
use crate::error::{Error, Result};
use crate::field::MetricField;
use crate::forms::{CMat3, PQForm, TwoTwoMatrixForm};

use super::grid::RadialGrid;

/// Relative finite-difference step for the metric derivatives.
pub const FD_STEP: f64 = 1e-3;

struct Derivatives {
    d: [CMat3; 3],
    dbar: [CMat3; 3],
    dd: [[CMat3; 3]; 3],
}

fn wirtinger(field: &dyn MetricField, pt: &ChartPoint, h: f64) -> Result<Derivatives> {
    let x0 = pt.to_real();
    let steps = coordinate_steps(pt, h);
    let eval = |shift: &[(usize, f64)]| -> Result<CMat3> {
        let mut x = x0;
        for &(a, s) in shift {
            x[a] += s * steps[a];
        }
        Ok(field.metric(&ChartPoint::from_real(&x))?.m)
    };
    let f0 = eval(&[])?;
    let mut plus = [CMat3::zeros(); 6];
    let mut minus = [CMat3::zeros(); 6];
    for a in 0..6 {
        plus[a] = eval(&[(a, 1.0)])?;
        minus[a] = eval(&[(a, -1.0)])?;
    }
    let mut first = [CMat3::zeros(); 6];
    let mut second = [[CMat3::zeros(); 6]; 6];
    for a in 0..6 {
        first[a] = (plus[a] - minus[a]) / c(2.0 * steps[a]);
        second[a][a] = (plus[a] - f0 * c(2.0) + minus[a]) / c(steps[a] * steps[a]);
        for b in 0..a {
            let v = (eval(&[(a, 1.0), (b, 1.0)])? - eval(&[(a, 1.0), (b, -1.0)])? - eval(&[(a, -1.0), (b, 1.0)])?
                + eval(&[(a, -1.0), (b, -1.0)])?)
                / c(4.0 * steps[a] * steps[b]);
            second[a][b] = v;
            second[b][a] = v;
        }
    }
    let i = Complex64::new(0.0, 1.0);
    let mut out = Derivatives { d: [CMat3::zeros(); 3], dbar: [CMat3::zeros(); 3], dd: [[CMat3::zeros(); 3]; 3] };
    for j in 0..3 {
        out.d[j] = (first[2 * j] - first[2 * j + 1] * i) * c(0.5);
        out.dbar[j] = (first[2 * j] + first[2 * j + 1] * i) * c(0.5);
        for k in 0..3 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            out.dd[j][k] = (second[xj][xk] + second[yj][yk] + (second[xj][yk] - second[yj][xk]) * i) * c(0.25);
        }
    }
    Ok(out)
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Richardson combination of steps `h` and `h/2`.
fn wirtinger_extrapolated(field: &dyn MetricField, pt: &ChartPoint, h: f64) -> Result<Derivatives> {
    let coarse = wirtinger(field, pt, h)?;
    let fine = wirtinger(field, pt, 0.5 * h)?;
    let mix = |a: CMat3, b: CMat3| (b * c(4.0) - a) / c(3.0);
    let mut out = fine;
    for j in 0..3 {
        out.d[j] = mix(coarse.d[j], out.d[j]);
        out.dbar[j] = mix(coarse.dbar[j], out.dbar[j]);
        for k in 0..3 {
            out.dd[j][k] = mix(coarse.dd[j][k], out.dd[j][k]);
        }
    }
    Ok(out)
}

/// `i∂∂̄G` for a (1,1)-form `G` from the array `D[a][b] = ∂_a∂̄_b g`.
fn ddbar_from_second(d: &[[CMat3; 3]; 3]) -> Result<TwoTwoMatrixForm> {
    let i = Complex64::new(0.0, 1.0);
    let mut acc = PQForm::zero(2, 2)?;
    for a in 0..3 {
        for b in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let coef = d[a][b][(j, k)];
                    if coef == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let term = PQForm::monomial(i * coef, &[a], &[b]).wedge(&PQForm::monomial(i, &[j], &[k]))?;
                    acc = acc.add(&term)?;
                }
            }
        }
    }
    TwoTwoMatrixForm::from_pq_form(&acc)
}

/// `ω²` and the coefficients of `ψ`, `ψ_ρ`, `ψ_ρρ` in `i∂∂̄(ψω)`, in the chart frame.
#[derive(Clone, Debug)]
pub struct AnsatzTerms {
    pub sigma: TwoTwoMatrixForm,
    pub a: [TwoTwoMatrixForm; 3],
}

impl AnsatzTerms {
    pub fn at(field: &dyn MetricField, pt: &ChartPoint) -> Result<Self> {
        let h = field.metric(pt)?.m;
        let der = wirtinger_extrapolated(field, pt, FD_STEP)?;
        let g = rho_gradient(pt);
        let hess = rho_hessian(pt);
        let mut d1 = [[CMat3::zeros(); 3]; 3];
        let mut d2 = [[CMat3::zeros(); 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                d1[a][b] = der.dbar[b] * g[a] + der.d[a] * g[b].conj() + h * hess[(a, b)];
                d2[a][b] = h * (g[a] * g[b].conj());
            }
        }
        Ok(Self { sigma: field.square(pt)?, a: [ddbar_from_second(&der.dd)?, ddbar_from_second(&d1)?, ddbar_from_second(&d2)?] })
    }

    /// `ω² + i∂∂̄(ψω)` for the jet of `ψ` in `ρ`.
    pub fn perturbed(&self, psi: Jet) -> TwoTwoMatrixForm {
        self.sigma.add(&self.a[0].scale(psi.v)).add(&self.a[1].scale(psi.d1)).add(&self.a[2].scale(psi.d2))
    }
}

/// `ω_ψ² = ω² + i∂∂̄(ψω)` at `pt` for a radial `ψ` given by its jet in `ρ`;
/// fails if the result leaves the positive cone.
pub fn perturbed_square(field: &dyn MetricField, pt: &ChartPoint, psi: Jet) -> Result<TwoTwoMatrixForm> {
    let sigma = AnsatzTerms::at(field, pt)?.perturbed(psi);
    let pos = positivity_against_cone_two_two(pt, &sigma)?;
    if !pos.positive {
        return Err(Error::PositivityLoss { region: "ω_ψ²".into(), r: radius(pt)?, min_eigenvalue: pos.min_eigenvalue });
    }
    Ok(sigma)
}

/// Per-node data in the adapted frame: `Σ₀`, the coefficients `B_k` of
/// `(ψ, ψ_r, ψ_rr)` and `X_k = Σ₀^{-1}B_k`.
#[derive(Clone, Debug)]
pub struct Node {
    pub r: f64,
    pub sigma0: TwoTwoMatrixForm,
    pub b: [TwoTwoMatrixForm; 3],
    pub x: [CMat3; 3],
    /// `½ tr X_k`: `L ψ = c₀ψ + c₁ψ_r + c₂ψ_rr`.
    pub coeff: [f64; 3],
}

impl Node {
    fn build(field: &dyn MetricField, pt: &ChartPoint) -> Result<Self> {
        let r = radius(pt)?;
        let terms = AnsatzTerms::at(field, pt)?;
        let frame = AdaptedFrame::at(pt)?;
        let ad = |s: &TwoTwoMatrixForm| frame.to_adapted_two_two(s);
        let (r2, r4, r5) = (r * r, r.powi(4), r.powi(5));
        // ψ_ρ = ψ_r/(3r²), ψ_ρρ = (ψ_rr − 2ψ_r/r)/(9r⁴)
        let b = [
            ad(&terms.a[0]),
            ad(&terms.a[1].scale(1.0 / (3.0 * r2)).sub(&terms.a[2].scale(2.0 / (9.0 * r5)))),
            ad(&terms.a[2].scale(1.0 / (9.0 * r4))),
        ];
        let sigma0 = ad(&terms.sigma);
        let inv = sigma0.m.try_inverse().ok_or(Error::SingularMetric { det: sigma0.determinant() })?;
        let x = [inv * b[0].m, inv * b[1].m, inv * b[2].m];
        let coeff = [0.5 * x[0].trace().re, 0.5 * x[1].trace().re, 0.5 * x[2].trace().re];
        Ok(Self { r, sigma0, b, x, coeff })
    }

    /// `X = Σ₀^{-1}δΣ` for the jet `(ψ, ψ_r, ψ_rr)`.
    fn x_of(&self, d: &[f64; 3]) -> CMat3 {
        self.x[0] * c(d[0]) + self.x[1] * c(d[1]) + self.x[2] * c(d[2])
    }

    fn sigma_of(&self, d: &[f64; 3]) -> TwoTwoMatrixForm {
        self.sigma0.add(&self.b[0].scale(d[0])).add(&self.b[1].scale(d[1])).add(&self.b[2].scale(d[2]))
    }
}

/// `(F̂ − 1, Q̂ = F̂ − 1 − Lψ)` from `det(I + X) = 1 + y`, without cancellation.
fn volume_terms(x: &CMat3) -> (f64, f64) {
    let tr = x.trace().re;
    let e2 = 0.5 * (tr * tr - (x * x).trace().re);
    let e3 = x.determinant().re;
    let y = tr + e2 + e3;
    let s = (1.0 + y).sqrt();
    (y / (s + 1.0), -y * y / (2.0 * (s + 1.0) * (s + 1.0)) + 0.5 * (e2 + e3))
}

/// The discretized problem: nodes along one angular seed, the Chern–Ricci
/// potential `f` at the nodes, and the grid.
#[derive(Clone, Debug)]
pub struct LinearizedProblem {
    pub label: String,
    pub grid: RadialGrid,
    pub nodes: Vec<Node>,
    pub f: Vec<f64>,
}

impl LinearizedProblem {
    /// Nodes on the ray through `direction`; `f` is the Chern–Ricci potential
    /// of the field against the cone volume.
    pub fn assemble(field: &dyn MetricField, grid: RadialGrid, direction: &ChartPoint) -> Result<Self> {
        let points = grid.r.iter().map(|&r| direction.with_radius(r)).collect::<Result<Vec<_>>>()?;
        let nodes = points.par_iter().map(|p| Node::build(field, p)).collect::<Result<Vec<_>>>()?;
        let f = points.par_iter().map(|p| chern_ricci_potential(field, p)).collect::<Result<Vec<_>>>()?;
        Ok(Self { label: field.label(), grid, nodes, f })
    }

    pub fn with_f(mut self, f: Vec<f64>) -> Result<Self> {
        if f.len() != self.grid.len() || f.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("f must be finite with one value per node".into()));
        }
        self.f = f;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `L`, the derivative of `F̂` at `ψ = 0`.
    pub fn l_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, node) in self.nodes.iter().enumerate() {
            m[(i, i)] += node.coeff[0];
            for (j, w1, w2) in self.grid.radial_stencil(i) {
                m[(i, j)] += node.coeff[1] * w1 + node.coeff[2] * w2;
            }
        }
        m
    }

    /// `12 × (c₁∂_r + c₂∂_r²)`, normalized so that it is the Laplacian on the cone.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, node) in self.nodes.iter().enumerate() {
            for (j, w1, w2) in self.grid.radial_stencil(i) {
                m[(i, j)] += 12.0 * (node.coeff[1] * w1 + node.coeff[2] * w2);
            }
        }
        m
    }

    /// `L̃u = Lu + u(s)e^f`.
    pub fn linearized_matrix(&self) -> DMatrix<f64> {
        let mut m = self.l_matrix();
        let s = self.grid.s;
        for (i, f) in self.f.iter().enumerate() {
            m[(i, s)] += f.exp();
        }
        m
    }

    pub fn apply_l(&self, psi: &[f64]) -> Vec<f64> {
        self.grid.derivatives(psi).iter().zip(&self.nodes).map(|(d, n)| n.coeff[0] * d[0] + n.coeff[1] * d[1] + n.coeff[2] * d[2]).collect()
    }

    fn check_positive(&self, i: usize, d: &[f64; 3]) -> Result<()> {
        let pos = self.nodes[i].sigma_of(d).positivity_check();
        if !pos.positive {
            return Err(Error::PositivityLoss { region: "ω_ψ²".into(), r: self.nodes[i].r, min_eigenvalue: pos.min_eigenvalue });
        }
        Ok(())
    }

    /// `F̂(ψ) − 1` and `Q̂(ψ)` at every node, with a positivity check of `ω_ψ²`.
    pub fn volume_terms(&self, psi: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let ders = self.grid.derivatives(psi);
        let mut fm1 = Vec::with_capacity(self.len());
        let mut q = Vec::with_capacity(self.len());
        for (i, d) in ders.iter().enumerate() {
            self.check_positive(i, d)?;
            let (a, b) = volume_terms(&self.nodes[i].x_of(d));
            fm1.push(a);
            q.push(b);
        }
        Ok((fm1, q))
    }

    /// `F̃(ψ) = F̂(ψ) − e^{f − ψ(s)}` at every node.
    pub fn equation_residual(&self, psi: &[f64]) -> Result<Vec<f64>> {
        let (fm1, _) = self.volume_terms(psi)?;
        let ps = psi[self.grid.s];
        Ok(fm1.iter().zip(&self.f).map(|(a, f)| a - (f - ps).exp_m1()).collect())
    }

    /// Jacobian of `F̃` at `ψ`.
    pub fn residual_jacobian(&self, psi: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.len();
        let ders = self.grid.derivatives(psi);
        let s = self.grid.s;
        let mut m = DMatrix::zeros(n, n);
        for (i, d) in ders.iter().enumerate() {
            self.check_positive(i, d)?;
            let node = &self.nodes[i];
            let ix = CMat3::identity() + node.x_of(d);
            let fhat = ix.determinant().re.sqrt();
            let inv = ix.try_inverse().ok_or(Error::SingularSystem(format!("I + X singular at r = {}", node.r)))?;
            let t = |k: usize| 0.5 * fhat * (inv * node.x[k]).trace().re;
            let (t0, t1, t2) = (t(0), t(1), t(2));
            m[(i, i)] += t0;
            for (j, w1, w2) in self.grid.radial_stencil(i) {
                m[(i, j)] += t1 * w1 + t2 * w2;
            }
            m[(i, s)] += (self.f[i] - psi[s]).exp();
        }
        Ok(m)
    }
}

/// The matrix of `L̃` for `field` on `grid`.
pub fn assemble_linearized(field: &dyn MetricField, grid: RadialGrid, direction: &ChartPoint) -> Result<DMatrix<f64>> {
    Ok(LinearizedProblem::assemble(field, grid, direction)?.linearized_matrix())
}
