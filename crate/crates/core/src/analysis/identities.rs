//! Pointwise identity suite for the model geometry and the Michelsohn root.

use nalgebra::Matrix3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conifold::{
    adapted_displays, cone_metric, dr_wedge_identity_residual_with, fs_pullback, log_term, radius, slow_term, AdaptedFrame, ChartPoint,
};
use crate::error::Result;
use crate::forms::HermitianMatrixForm;
use crate::gluing::{scalar_profiles, CutoffProfile};

use super::angular_seeds;

/// One identity with its worst residual over the sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub display: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityCheck {
    fn new(name: &str, display: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        Self { name: name.into(), display: display.into(), samples, max_residual, tolerance, pass: max_residual < tolerance }
    }
}

/// Points on random directions with radius log-uniform in `[r_lo, r_hi]`.
pub fn random_points(seed: u64, count: usize, r_lo: f64, r_hi: f64) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e37_79b9));
    angular_seeds(seed, count)
        .into_iter()
        .map(|p| p.with_radius(rng.random_range(r_lo.ln()..r_hi.ln()).exp()).expect("seeds have nonzero fibre"))
        .collect()
}

/// Deliberate errors for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Injection {
    /// Flip the sign of `6i∂r∧∂̄r` in the wedge identity.
    pub wedge_sign: bool,
}

fn rel(a: &HermitianMatrixForm, b: &HermitianMatrixForm) -> f64 {
    a.sub(b).max_abs() / b.max_abs().max(1.0)
}

/// Adapted-frame displays, the `∂r∧∂̄r` identity, primitivity of the slow
/// term and `α + β = γ`, each scaled by `tolerance_scale`.
pub fn identity_suite(points: &[ChartPoint], tolerance_scale: f64, injection: Injection) -> Result<Vec<IdentityCheck>> {
    let (mut cone, mut log, mut fs, mut wedge, mut prim) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let coefficient = if injection.wedge_sign { -6.0 } else { 6.0 };
    for pt in points {
        let r = radius(pt)?;
        let frame = AdaptedFrame::at(pt)?;
        let [id, log_d, fs_d] = adapted_displays(r);
        cone = cone.max(rel(&frame.to_adapted(&cone_metric(pt)?), &id));
        log = log.max(rel(&frame.to_adapted(&log_term(pt)?), &log_d));
        fs = fs.max(rel(&frame.to_adapted(&fs_pullback(pt)?), &fs_d));
        let c = cone_metric(pt)?;
        wedge = wedge.max(dr_wedge_identity_residual_with(pt, coefficient)? / c.max_abs());
        prim = prim.max(HermitianMatrixForm::lefschetz_trace(&c, &slow_term(pt)?)?.abs());
    }
    // α + β against the defining combination ξ + 3xξ' + x²ξ''
    let mut gamma = 0.0f64;
    for k in 0..=400 {
        let r = 1.0 + 10.0 * k as f64 / 400.0;
        let x = r * r / 400.0;
        let xi = CutoffProfile::XI.eval(x);
        let s = scalar_profiles(r, 20.0);
        gamma = gamma.max((s.alpha + s.beta - (xi.v + 3.0 * x * xi.d1 + x * x * xi.d2)).abs()).max((s.gamma - s.alpha - s.beta).abs());
    }
    let n = points.len();
    let t = tolerance_scale;
    Ok(vec![
        IdentityCheck::new("adapted cone", "ω_co,0 = idx∧dx̄ + idy∧dȳ + idz∧dz̄ in the adapted frame", n, cone, 1e-9 * t),
        IdentityCheck::new("adapted log term", "6i∂∂̄log r = 2r⁻²(idy∧dȳ + idz∧dz̄)", n, log, 1e-9 * t),
        IdentityCheck::new("adapted Fubini-Study", "4π*ω_FS = 4r⁻² idz∧dz̄", n, fs, 1e-9 * t),
        IdentityCheck::new("wedge identity", "6i∂r∧∂̄r = ω_co,0 − 3r²i∂∂̄log r", n, wedge, 1e-9 * t),
        IdentityCheck::new("slow term primitive", "Λ(4π*ω_FS − 6i∂∂̄log r) = 0", n, prim, 1e-10 * t),
        IdentityCheck::new("gamma identity", "γ_R = α_R + β_R = ξ + 3xξ' + x²ξ''", 401, gamma, 1e-12 * t),
    ])
}

/// Random positive Hermitian matrix `U diag(λ) U*`, `λ` log-uniform in `[1, cond]`.
pub fn random_positive_hermitian<R: Rng>(rng: &mut R, cond: f64) -> HermitianMatrixForm {
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let g = Matrix3::from_fn(|_, _| c());
    let q = g.qr().q();
    let mut lam = [0.0; 3];
    for l in &mut lam {
        *l = rng.random_range(0.0..cond.ln()).exp();
    }
    lam[0] = 1.0;
    lam[2] = cond;
    let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(Complex64::new(lam[0], 0.0), Complex64::new(lam[1], 0.0), Complex64::new(lam[2], 0.0)));
    let scale = rng.random_range(-2.0f64..2.0).exp();
    HermitianMatrixForm::new(q * d * q.adjoint() * Complex64::new(scale, 0.0))
}

/// `root(square(H)) = H` over `count` random matrices with condition number at most `cond`.
pub fn michelsohn_round_trip(seed: u64, count: usize, cond: f64, tolerance_scale: f64) -> Result<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let h = random_positive_hermitian(&mut rng, cond);
        let back = h.to_two_two().michelsohn_root()?;
        worst = worst.max(back.sub(&h).max_abs() / h.max_abs());
    }
    Ok(IdentityCheck::new("Michelsohn round trip", "(ω²)^{1/2} = ω", count, worst, 1e-10 * tolerance_scale))
}
