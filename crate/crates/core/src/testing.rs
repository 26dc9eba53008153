//! Test-only oracles. Kept deliberately naive and independent of the closed
//! forms and of the numerical differentiation used by the analysis module.

use num_complex::Complex64;
use rand::Rng;

use crate::conifold::ChartPoint;
use crate::forms::{CMat3, HermitianMatrixForm};

/// Central-difference `i∂∂̄P`: `∂_j∂̄_k = ¼[(∂x_j∂x_k + ∂y_j∂y_k) + i(∂x_j∂y_k − ∂y_j∂x_k)]`.
pub fn fd_ddbar(pot: &dyn Fn(&ChartPoint) -> f64, pt: &ChartPoint, h_rel: f64) -> HermitianMatrixForm {
    let x0 = pt.to_real();
    let mags = [pt.u.norm(), pt.u.norm(), pt.v.norm(), pt.v.norm(), pt.z.norm(), pt.z.norm()];
    let h: Vec<f64> = mags.iter().map(|m| h_rel * m.max(1.0)).collect();
    let f = |d: &[(usize, f64)]| {
        let mut x = x0;
        for &(a, s) in d {
            x[a] += s * h[a];
        }
        pot(&ChartPoint::from_real(&x))
    };
    let mut d2 = [[0.0f64; 6]; 6];
    let f0 = f(&[]);
    for a in 0..6 {
        d2[a][a] = (f(&[(a, 1.0)]) - 2.0 * f0 + f(&[(a, -1.0)])) / (h[a] * h[a]);
        for b in 0..a {
            let v = (f(&[(a, 1.0), (b, 1.0)]) - f(&[(a, 1.0), (b, -1.0)])
                - f(&[(a, -1.0), (b, 1.0)])
                + f(&[(a, -1.0), (b, -1.0)]))
                / (4.0 * h[a] * h[b]);
            d2[a][b] = v;
            d2[b][a] = v;
        }
    }
    let mut m = CMat3::zeros();
    for j in 0..3 {
        for k in 0..3 {
            let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
            m[(j, k)] = Complex64::new(
                0.25 * (d2[xj][xk] + d2[yj][yk]),
                0.25 * (d2[xj][yk] - d2[yj][xk]),
            );
        }
    }
    HermitianMatrixForm { m }
}

/// Random chart point with radius log-uniform in `[r_min, r_max]`.
pub fn random_point<R: Rng>(rng: &mut R, r_min: f64, r_max: f64) -> ChartPoint {
    let z = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
    let u = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let r = (rng.random_range(r_min.ln()..r_max.ln())).exp();
    ChartPoint::new(z, u, v).with_radius(r).expect("nonzero fibre")
}

/// Central-difference `i∂∂̄` of a (1,1)-form field, as a (2,2)-form.
pub fn fd_ddbar_one_one(
    field: &dyn Fn(&ChartPoint) -> HermitianMatrixForm,
    pt: &ChartPoint,
    h_rel: f64,
) -> crate::forms::TwoTwoMatrixForm {
    use crate::forms::PQForm;
    let mut acc = PQForm::zero(2, 2).expect("valid bidegree");
    let i = Complex64::new(0.0, 1.0);
    for j in 0..3 {
        for k in 0..3 {
            let re = fd_ddbar(&|q: &ChartPoint| field(q).m[(j, k)].re, pt, h_rel);
            let im = fd_ddbar(&|q: &ChartPoint| field(q).m[(j, k)].im, pt, h_rel);
            for a in 0..3 {
                for b in 0..3 {
                    let c = re.m[(a, b)] + i * im.m[(a, b)];
                    let outer = PQForm::monomial(i * c, &[a], &[b]);
                    let inner = PQForm::monomial(i, &[j], &[k]);
                    acc = acc.add(&outer.wedge(&inner).expect("degree fits")).expect("same bidegree");
                }
            }
        }
    }
    crate::forms::TwoTwoMatrixForm::from_pq_form(&acc).expect("(2,2)-form")
}
