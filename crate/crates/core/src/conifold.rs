//! Pointwise geometry of the resolved conifold chart `(u, v, z)`.
//!
//! The coframe order is `(du, dv, dz)` everywhere. The radius is
//! `r³ = ρ = (1+|z|²)(|u|²+|v|²)` and every model potential used by the crate
//! is either a function of `ρ` or a multiple of `log(1+|z|²)`. For a radial
//! potential `G(ρ)` the complex Hessian is
//!
//! ```text
//! ∂_j ∂̄_k G = G'(ρ) ∂_j∂̄_k ρ + G''(ρ) ∂_jρ · conj(∂_kρ)
//! ```
//!
//! which is what [`radial_hessian`] evaluates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{CMat3, HermitianMatrixForm, Positivity, TwoTwoMatrixForm};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A point of the resolved conifold in bundle coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartPoint {
    pub z: Complex64,
    pub u: Complex64,
    pub v: Complex64,
}

impl ChartPoint {
    pub fn new(z: Complex64, u: Complex64, v: Complex64) -> Self {
        Self { z, u, v }
    }

    pub fn h(&self) -> f64 {
        1.0 + self.z.norm_sqr()
    }

    pub fn fibre_norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    /// `ρ = r³`.
    pub fn rho(&self) -> Result<f64> {
        let s = self.fibre_norm_sqr();
        if s <= 0.0 {
            return Err(Error::ZeroFibre);
        }
        Ok(self.h() * s)
    }

    /// The point scaled along the fibre so that its radius becomes `r`,
    /// keeping `z` and the fibre direction.
    pub fn with_radius(&self, r: f64) -> Result<Self> {
        let rho = self.rho()?;
        let t = (r * r * r / rho).sqrt();
        Ok(Self { z: self.z, u: self.u * t, v: self.v * t })
    }

    /// Real coordinates `(Re u, Im u, Re v, Im v, Re z, Im z)`.
    pub fn to_real(&self) -> [f64; 6] {
        [self.u.re, self.u.im, self.v.re, self.v.im, self.z.re, self.z.im]
    }

    pub fn from_real(x: &[f64; 6]) -> Self {
        Self {
            u: Complex64::new(x[0], x[1]),
            v: Complex64::new(x[2], x[3]),
            z: Complex64::new(x[4], x[5]),
        }
    }
}

/// `r = [(1+|z|²)(|u|²+|v|²)]^{1/3}`.
pub fn radius(pt: &ChartPoint) -> Result<f64> {
    Ok(pt.rho()?.cbrt())
}

/// Value and first two derivatives of a scalar function of `ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    pub const fn constant(v: f64) -> Self {
        Self { v, d1: 0.0, d2: 0.0 }
    }

    /// `k · ρ^a`.
    pub fn power(rho: f64, k: f64, a: f64) -> Self {
        let p = rho.powf(a);
        Self { v: k * p, d1: k * a * p / rho, d2: k * a * (a - 1.0) * p / (rho * rho) }
    }

    /// `k · log ρ`.
    pub fn log(rho: f64, k: f64) -> Self {
        Self { v: k * rho.ln(), d1: k / rho, d2: -k / (rho * rho) }
    }

    pub fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.scale(-1.0))
    }

    pub fn scale(self, k: f64) -> Self {
        Self { v: k * self.v, d1: k * self.d1, d2: k * self.d2 }
    }

    pub fn mul(self, o: Self) -> Self {
        Self {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    /// `f ∘ self`, where `outer` holds `(f, f', f'')` evaluated at `self.v`.
    pub fn compose(self, outer: Jet) -> Self {
        Self {
            v: outer.v,
            d1: outer.d1 * self.d1,
            d2: outer.d2 * self.d1 * self.d1 + outer.d1 * self.d2,
        }
    }
}

/// `∂_j ρ` in the coframe `(du, dv, dz)`.
pub fn rho_gradient(pt: &ChartPoint) -> [Complex64; 3] {
    let h = pt.h();
    [pt.u.conj() * h, pt.v.conj() * h, pt.z.conj() * pt.fibre_norm_sqr()]
}

/// `∂_j ∂̄_k ρ`.
pub fn rho_hessian(pt: &ChartPoint) -> CMat3 {
    let h = c(pt.h());
    let mut m = CMat3::zeros();
    m[(0, 0)] = h;
    m[(1, 1)] = h;
    m[(2, 2)] = c(pt.fibre_norm_sqr());
    m[(0, 2)] = pt.z * pt.u.conj();
    m[(1, 2)] = pt.z * pt.v.conj();
    m[(2, 0)] = pt.z.conj() * pt.u;
    m[(2, 1)] = pt.z.conj() * pt.v;
    m
}

/// `i∂∂̄ G(ρ)` for the jet of `G` at this point.
pub fn radial_hessian(pt: &ChartPoint, g: Jet) -> HermitianMatrixForm {
    let grad = rho_gradient(pt);
    let mut m = rho_hessian(pt) * c(g.d1);
    for j in 0..3 {
        for k in 0..3 {
            m[(j, k)] += grad[j] * grad[k].conj() * g.d2;
        }
    }
    HermitianMatrixForm { m }
}

/// `i∂∂̄ log(1+|z|²) = π*ω_FS`.
pub fn fs_form(pt: &ChartPoint) -> HermitianMatrixForm {
    let h = pt.h();
    HermitianMatrixForm::diag(0.0, 0.0, 1.0 / (h * h))
}

/// The standard cone metric `(3/2) i∂∂̄ r²`.
pub fn cone_metric(pt: &ChartPoint) -> Result<HermitianMatrixForm> {
    let rho = pt.rho()?;
    Ok(radial_hessian(pt, Jet::power(rho, 1.5, 2.0 / 3.0)))
}

/// `6 i∂∂̄ log r = 2 i∂∂̄ log ρ`.
pub fn log_term(pt: &ChartPoint) -> Result<HermitianMatrixForm> {
    let rho = pt.rho()?;
    Ok(radial_hessian(pt, Jet::log(rho, 2.0)))
}

/// `4 π*ω_FS`.
pub fn fs_pullback(pt: &ChartPoint) -> Result<HermitianMatrixForm> {
    pt.rho()?;
    Ok(fs_form(pt).scale(4.0))
}

/// The slow-decay term `4π*ω_FS − 6i∂∂̄ log r`.
pub fn slow_term(pt: &ChartPoint) -> Result<HermitianMatrixForm> {
    Ok(fs_pullback(pt)?.sub(&log_term(pt)?))
}

/// `∂_j r` as a (1,0)-covector.
pub fn radius_gradient(pt: &ChartPoint) -> Result<[Complex64; 3]> {
    let rho = pt.rho()?;
    let k = rho.powf(-2.0 / 3.0) / 3.0;
    let g = rho_gradient(pt);
    Ok([g[0] * k, g[1] * k, g[2] * k])
}

/// Max-norm of `coefficient · i∂r∧∂̄r − (ω_co,0 − 3r² i∂∂̄ log r)`. The identity
/// holds with `coefficient = 6`; other values give a negative control.
pub fn dr_wedge_identity_residual_with(pt: &ChartPoint, coefficient: f64) -> Result<f64> {
    let r2 = radius(pt)?.powi(2);
    let lhs = HermitianMatrixForm::outer(&radius_gradient(pt)?, coefficient);
    // 3r² i∂∂̄ log r = (r²/2) · 6 i∂∂̄ log r
    let rhs = cone_metric(pt)?.sub(&log_term(pt)?.scale(0.5 * r2));
    Ok(lhs.sub(&rhs).max_abs())
}

pub fn dr_wedge_identity_residual(pt: &ChartPoint) -> Result<f64> {
    dr_wedge_identity_residual_with(pt, 6.0)
}

/// The adapted unit blocks `(idx∧dx̄, idy∧dȳ, idz∧dz̄)` at `pt`, written through
/// the geometric forms `ω_co,0`, `3r² i∂∂̄ log r` and `r² π*ω_FS` in chart
/// coordinates.
pub fn basis_decomposition(pt: &ChartPoint) -> Result<[HermitianMatrixForm; 3]> {
    let r2 = radius(pt)?.powi(2);
    let three_r2_ddbar_log = log_term(pt)?.scale(0.5 * r2);
    let r2_fs = fs_form(pt).scale(r2);
    let dz = r2_fs;
    let dy = three_r2_ddbar_log.sub(&r2_fs);
    let dx = cone_metric(pt)?.sub(&three_r2_ddbar_log);
    Ok([dx, dy, dz])
}

/// The SU(2) chart change moving the base coordinate `z0` to the origin.
///
/// On `O(-1)⊕O(-1)` the point `(u, v, z)` corresponds to `(u(1,z), v(1,z))`;
/// applying `g = n⁻¹ [[1, z̄0], [-z0, 1]]` with `n = (1+|z0|²)^{1/2}` gives new
/// coordinates `z' = (z-z0)/(1+z̄0 z)`, `u' = m u`, `v' = m v` with
/// `m = (1+z̄0 z)/n`. The radius is invariant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChartRotation {
    z0: Complex64,
    n: f64,
}

impl ChartRotation {
    pub fn to_origin(z0: Complex64) -> Self {
        Self { z0, n: (1.0 + z0.norm_sqr()).sqrt() }
    }

    pub fn apply(&self, pt: &ChartPoint) -> ChartPoint {
        let denom = c(1.0) + self.z0.conj() * pt.z;
        let m = denom / self.n;
        ChartPoint { z: (pt.z - self.z0) / denom, u: pt.u * m, v: pt.v * m }
    }

    /// `K` with `θ_new = K · θ_old` at `pt`.
    pub fn jacobian(&self, pt: &ChartPoint) -> CMat3 {
        let denom = c(1.0) + self.z0.conj() * pt.z;
        let m = denom / self.n;
        let dm = self.z0.conj() / self.n;
        let mut k = CMat3::zeros();
        k[(0, 0)] = m;
        k[(0, 2)] = pt.u * dm;
        k[(1, 1)] = m;
        k[(1, 2)] = pt.v * dm;
        k[(2, 2)] = c(self.n * self.n) / (denom * denom);
        k
    }
}

/// A linear coframe at a point in which the cone metric is the identity and
/// the log and Fubini–Study terms are simultaneously diagonal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptedFrame {
    pub base: ChartPoint,
    pub r_o: f64,
    /// `θ_chart = j · φ_adapted`.
    pub j: CMat3,
    pub j_inv: CMat3,
}

fn fibre_frame(pt: &ChartPoint, r_o: f64) -> CMat3 {
    // u = √(3/2) r⁻¹ u_o x − r⁻¹ v̄_o y,  v = √(3/2) r⁻¹ v_o x + r⁻¹ ū_o y,
    // and dz = r⁻¹ dz' for the rescaled base coordinate
    let a = (1.5f64).sqrt() / r_o;
    let mut j = CMat3::zeros();
    j[(0, 0)] = pt.u * a;
    j[(1, 0)] = pt.v * a;
    j[(0, 1)] = -pt.v.conj() / r_o;
    j[(1, 1)] = pt.u.conj() / r_o;
    j[(2, 2)] = c(1.0 / r_o);
    j
}

impl AdaptedFrame {
    /// Frame at a point with `z = 0`.
    pub fn at_origin_fibre(pt: &ChartPoint) -> Result<Self> {
        if pt.z.norm() > 1e-14 {
            return Err(Error::NonzeroBase(pt.z.norm()));
        }
        let r_o = radius(pt)?;
        let j = fibre_frame(pt, r_o);
        let j_inv = j.try_inverse().ok_or(Error::ZeroFibre)?;
        Ok(Self { base: *pt, r_o, j, j_inv })
    }

    /// Frame at an arbitrary point, built by rotating the chart so that the
    /// point lands on `z = 0`.
    pub fn at(pt: &ChartPoint) -> Result<Self> {
        if pt.z == ZERO {
            return Self::at_origin_fibre(pt);
        }
        let rot = ChartRotation::to_origin(pt.z);
        let moved = rot.apply(pt);
        let moved = ChartPoint { z: ZERO, ..moved };
        let inner = Self::at_origin_fibre(&moved)?;
        let k = rot.jacobian(pt);
        let k_inv = k.try_inverse().ok_or(Error::ZeroFibre)?;
        let j = k_inv * inner.j;
        let j_inv = j.try_inverse().ok_or(Error::ZeroFibre)?;
        Ok(Self { base: *pt, r_o: inner.r_o, j, j_inv })
    }

    /// Chart coefficients → adapted coefficients.
    pub fn to_adapted(&self, h: &HermitianMatrixForm) -> HermitianMatrixForm {
        h.transform(&self.j)
    }

    /// Adapted coefficients → chart coefficients.
    pub fn to_chart(&self, h: &HermitianMatrixForm) -> HermitianMatrixForm {
        h.transform(&self.j_inv)
    }

    pub fn to_adapted_two_two(&self, s: &TwoTwoMatrixForm) -> TwoTwoMatrixForm {
        s.transform(&self.j)
    }
}

/// Positivity measured in the adapted frame, where the cone is the identity;
/// insensitive to the `r`-dependent anisotropy of chart coordinates.
pub fn positivity_against_cone(pt: &ChartPoint, h: &HermitianMatrixForm) -> Result<Positivity> {
    Ok(AdaptedFrame::at(pt)?.to_adapted(h).positivity_check())
}

pub fn positivity_against_cone_two_two(pt: &ChartPoint, s: &TwoTwoMatrixForm) -> Result<Positivity> {
    Ok(AdaptedFrame::at(pt)?.to_adapted_two_two(s).positivity_check())
}

/// `det ω / det ω_co,0`, computed in the adapted frame.
pub fn volume_ratio(pt: &ChartPoint, h: &HermitianMatrixForm) -> Result<f64> {
    let f = AdaptedFrame::at(pt)?;
    Ok(f.to_adapted(h).determinant() / f.to_adapted(&cone_metric(pt)?).determinant())
}

/// Adapted-frame form of the three model terms at a radius: cone = I, 6i∂∂̄log r = diag(0, 2r⁻², 2r⁻²), 4π*ω_FS = diag(0, 0, 4r⁻²).
pub fn adapted_displays(r_o: f64) -> [HermitianMatrixForm; 3] {
    let k = 1.0 / (r_o * r_o);
    [
        HermitianMatrixForm::identity(),
        HermitianMatrixForm::diag(0.0, 2.0 * k, 2.0 * k),
        HermitianMatrixForm::diag(0.0, 0.0, 4.0 * k),
    ]
}

/// Largest off-diagonal modulus.
pub fn off_diagonal(h: &HermitianMatrixForm) -> f64 {
    let mut m = 0.0f64;
    for j in 0..3 {
        for k in 0..3 {
            if j != k {
                m = m.max(h.m[(j, k)].norm());
            }
        }
    }
    m
}
