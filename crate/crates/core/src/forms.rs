//! Pointwise complex exterior algebra on a three-dimensional chart.
//!
//! Forms are written over a coframe `θ¹, θ², θ³` and its conjugate. A basis
//! element of bidegree `(p, q)` is `θ^I ∧ θ̄^J` with `I`, `J` strictly
//! increasing multi-indices, all holomorphic factors to the left. Multi-indices
//! are stored as 3-bit masks.
//!
//! # The (2,2) convention
//!
//! A real (1,1)-form is represented by a Hermitian matrix `H` through
//! `ω = i Σ H_jk θ^j ∧ θ̄^k`. A (2,2)-form is represented by a 3×3 matrix `Σ`
//! where
//!
//! ```text
//! Σ_ab = (-1)^(a+b) · [coefficient of θ^{omit b} ∧ θ̄^{omit a}]
//! ```
//!
//! and `θ^{omit b}` is the increasing wedge of the two holomorphic covectors
//! other than `θ^b`. With this choice `ω ∧ ω` is represented by exactly
//! `Σ = 2·adj(H)` and the volume form `ω³` equals `6·det(H)` times
//! `(iθ¹∧θ̄¹)∧(iθ²∧θ̄²)∧(iθ³∧θ̄³)`. Every other module goes through
//! [`TwoTwoMatrixForm`] and inherits this convention.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat3 = Matrix3<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative eigenvalue threshold used by every positivity decision.
pub const POSITIVITY_RTOL: f64 = 1e-12;

fn mask_len(m: u8) -> usize {
    m.count_ones() as usize
}

fn mask_from(indices: &[usize]) -> Option<(u8, f64)> {
    // returns the mask and the sign of the permutation sorting `indices`
    let mut mask = 0u8;
    let mut inversions = 0;
    for (n, &a) in indices.iter().enumerate() {
        assert!(a < 3, "coframe index {a} out of range");
        if mask & (1 << a) != 0 {
            return None;
        }
        mask |= 1 << a;
        inversions += indices[..n].iter().filter(|&&b| b > a).count();
    }
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((mask, sign))
}

/// Sign of the permutation that sorts the concatenation of two disjoint
/// increasing index sets.
fn merge_sign(a: u8, b: u8) -> f64 {
    let mut inversions = 0;
    for i in 0..3 {
        if a & (1 << i) != 0 {
            // elements of b smaller than i must move in front of i
            inversions += (0..i).filter(|&k| b & (1 << k) != 0).count();
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Complement of a single index inside {0, 1, 2}, as a mask.
fn omit(j: usize) -> u8 {
    0b111 & !(1 << j)
}

fn parity(a: usize, b: usize) -> f64 {
    if (a + b).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A homogeneous form of bidegree `(p, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PQForm {
    p: usize,
    q: usize,
    coeffs: BTreeMap<(u8, u8), Complex64>,
}

impl PQForm {
    pub fn zero(p: usize, q: usize) -> Result<Self> {
        if p > 3 || q > 3 {
            return Err(Error::InvalidWedge { p, q });
        }
        Ok(Self { p, q, coeffs: BTreeMap::new() })
    }

    /// `c · θ^{hol} ∧ θ̄^{anti}` for arbitrary (not necessarily sorted) index lists.
    pub fn monomial(c: Complex64, hol: &[usize], anti: &[usize]) -> Self {
        let mut out = Self::zero(hol.len(), anti.len()).expect("degree at most 3");
        if let (Some((h, sh)), Some((a, sa))) = (mask_from(hol), mask_from(anti)) {
            out.add_term(h, a, c * sh * sa);
        }
        out
    }

    /// The holomorphic covector `θ^j`.
    pub fn dtheta(j: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), &[j], &[])
    }

    /// The antiholomorphic covector `θ̄^j`.
    pub fn dtheta_bar(j: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), &[], &[j])
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    fn add_term(&mut self, hol: u8, anti: u8, c: Complex64) {
        debug_assert_eq!(mask_len(hol), self.p);
        debug_assert_eq!(mask_len(anti), self.q);
        *self.coeffs.entry((hol, anti)).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    /// Coefficient of `θ^I ∧ θ̄^J` for increasing index lists.
    pub fn coefficient(&self, hol: &[usize], anti: &[usize]) -> Complex64 {
        match (mask_from(hol), mask_from(anti)) {
            (Some((h, sh)), Some((a, sa))) => {
                self.coeffs.get(&(h, a)).copied().unwrap_or_default() * sh * sa
            }
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub(crate) fn coefficient_masks(&self, hol: u8, anti: u8) -> Complex64 {
        self.coeffs.get(&(hol, anti)).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u8, u8), Complex64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c *= s;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.bidegree() != other.bidegree() {
            return Err(Error::InvalidParameter(format!(
                "cannot add forms of bidegree {:?} and {:?}",
                self.bidegree(),
                other.bidegree()
            )));
        }
        let mut out = self.clone();
        for (&(h, a), &c) in &other.coeffs {
            out.add_term(h, a, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Graded-commutative wedge product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let (p, q) = (self.p + other.p, self.q + other.q);
        let mut out = Self::zero(p, q)?;
        for (&(i, j), &a) in &self.coeffs {
            for (&(k, l), &b) in &other.coeffs {
                if i & k != 0 || j & l != 0 {
                    continue;
                }
                // θ^I θ̄^J θ^K θ̄^L = (-1)^{|J||K|} θ^I θ^K θ̄^J θ̄^L
                let mut sign = if (mask_len(j) * mask_len(k)).is_multiple_of(2) { 1.0 } else { -1.0 };
                sign *= merge_sign(i, k) * merge_sign(j, l);
                out.add_term(i | k, j | l, a * b * sign);
            }
        }
        Ok(out)
    }

    /// Complex conjugate, rewritten in the canonical basis.
    pub fn conjugate(&self) -> Self {
        let mut out = Self::zero(self.q, self.p).expect("same total degree");
        let sign = if (self.p * self.q).is_multiple_of(2) { 1.0 } else { -1.0 };
        for (&(h, a), &c) in &self.coeffs {
            // conj(θ^I θ̄^J) = θ̄^I θ^J = (-1)^{pq} θ^J θ̄^I
            out.add_term(a, h, c.conj() * sign);
        }
        out
    }

    /// True when the form equals its own conjugate within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        if self.p != self.q {
            return false;
        }
        match self.sub(&self.conjugate()) {
            Ok(d) => d.max_abs() <= tol,
            Err(_) => false,
        }
    }

    /// Coefficient of a (3,3)-form against `(iθ¹∧θ̄¹)∧(iθ²∧θ̄²)∧(iθ³∧θ̄³)`.
    pub fn volume_coefficient(&self) -> Result<Complex64> {
        if self.bidegree() != (3, 3) {
            return Err(Error::InvalidParameter("volume coefficient needs a (3,3)-form".into()));
        }
        // the reference volume equals i·θ^{123}∧θ̄^{123}
        Ok(self.coefficient_masks(0b111, 0b111) / I)
    }
}

/// A (1,1)-form `i Σ H_jk θ^j ∧ θ̄^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrixForm {
    pub m: CMat3,
}

/// Result of [`HermitianMatrixForm::positivity_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Positivity {
    pub positive: bool,
    pub min_eigenvalue: f64,
}

fn sorted_eigenvalues(m: &CMat3) -> [f64; 3] {
    let e = m.symmetric_eigenvalues();
    let mut v = [e[0], e[1], e[2]];
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

fn check_positive(m: &CMat3) -> Positivity {
    let ev = sorted_eigenvalues(m);
    let scale = ev.iter().map(|e| e.abs()).fold(0.0, f64::max);
    Positivity {
        positive: scale > 0.0 && ev[0] > POSITIVITY_RTOL * scale,
        min_eigenvalue: ev[0],
    }
}

/// Adjugate of a 3×3 matrix (transpose of the cofactor matrix).
pub fn adjugate(m: &CMat3) -> CMat3 {
    let mut out = CMat3::zeros();
    for r in 0..3 {
        for c in 0..3 {
            // adj_{rc} = (-1)^{r+c} · minor with row c and column r removed
            let rows: Vec<usize> = (0..3).filter(|&k| k != c).collect();
            let cols: Vec<usize> = (0..3).filter(|&k| k != r).collect();
            let minor = m[(rows[0], cols[0])] * m[(rows[1], cols[1])]
                - m[(rows[0], cols[1])] * m[(rows[1], cols[0])];
            out[(r, c)] = minor * parity(r, c);
        }
    }
    out
}

fn hermitian_part(m: &CMat3) -> CMat3 {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

impl HermitianMatrixForm {
    /// Wraps `m`, replacing it by its Hermitian part.
    pub fn new(m: CMat3) -> Self {
        Self { m: hermitian_part(&m) }
    }

    pub fn identity() -> Self {
        Self { m: CMat3::identity() }
    }

    pub fn zero() -> Self {
        Self { m: CMat3::zeros() }
    }

    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        let mut m = CMat3::zeros();
        m[(0, 0)] = a.into();
        m[(1, 1)] = b.into();
        m[(2, 2)] = c.into();
        Self { m }
    }

    /// `s · (i θ ∧ θ̄)` built from a (1,0)-covector with components `g`.
    pub fn outer(g: &[Complex64; 3], s: f64) -> Self {
        let mut m = CMat3::zeros();
        for j in 0..3 {
            for k in 0..3 {
                m[(j, k)] = g[j] * g[k].conj() * s;
            }
        }
        Self { m }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { m: self.m + o.m }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { m: self.m - o.m }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m * Complex64::new(s, 0.0) }
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant().re
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self.m - self.m.adjoint()).iter().all(|c| c.norm() <= tol)
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        sorted_eigenvalues(&self.m)
    }

    pub fn positivity_check(&self) -> Positivity {
        check_positive(&self.m)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        self.m
            .try_inverse()
            .map(Self::new)
            .ok_or(Error::SingularMetric { det })
    }

    /// `Λ_ref η = tr(H_ref⁻¹ H_η)`.
    pub fn lefschetz_trace(reference: &Self, eta: &Self) -> Result<f64> {
        let det = reference.determinant();
        let scale = reference.max_abs().powi(3);
        if !(det.abs() > 1e-14 * scale) {
            return Err(Error::SingularMetric { det });
        }
        let inv = reference.m.try_inverse().ok_or(Error::SingularMetric { det })?;
        Ok((inv * eta.m).trace().re)
    }

    /// Operator norm of `self` measured against a positive reference metric:
    /// the largest |eigenvalue| of `ref^{-1/2} self ref^{-1/2}`.
    pub fn norm_against(&self, reference: &Self) -> Result<f64> {
        let chol = reference
            .m
            .cholesky()
            .ok_or(Error::SingularMetric { det: reference.determinant() })?;
        let l_inv = chol
            .l()
            .try_inverse()
            .ok_or(Error::SingularMetric { det: reference.determinant() })?;
        let w = hermitian_part(&(l_inv * self.m * l_inv.adjoint()));
        let ev = sorted_eigenvalues(&w);
        Ok(ev[0].abs().max(ev[2].abs()))
    }

    /// Coefficients after the linear coframe change `θ_old = J · φ_new`.
    pub fn transform(&self, j: &CMat3) -> Self {
        Self::new(j.transpose() * self.m * j.map(|c| c.conj()))
    }

    pub fn to_two_two(&self) -> TwoTwoMatrixForm {
        TwoTwoMatrixForm { m: adjugate(&self.m) * Complex64::new(2.0, 0.0) }
    }

    pub fn to_pq_form(&self) -> PQForm {
        let mut out = PQForm::zero(1, 1).expect("valid bidegree");
        for j in 0..3 {
            for k in 0..3 {
                let c = self.m[(j, k)];
                if c != Complex64::new(0.0, 0.0) {
                    out.add_term(1 << j, 1 << k, I * c);
                }
            }
        }
        out
    }

    /// Reads a (1,1)-form back into matrix form (`H_jk = -i · coefficient`).
    pub fn from_pq_form(f: &PQForm) -> Result<Self> {
        if f.bidegree() != (1, 1) {
            return Err(Error::InvalidParameter("expected a (1,1)-form".into()));
        }
        let mut m = CMat3::zeros();
        for j in 0..3 {
            for k in 0..3 {
                m[(j, k)] = -I * f.coefficient_masks(1 << j, 1 << k);
            }
        }
        Ok(Self { m })
    }
}

/// A (2,2)-form in the complementary-coframe convention described at the top
/// of this module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoTwoMatrixForm {
    pub m: CMat3,
}

impl TwoTwoMatrixForm {
    pub fn new(m: CMat3) -> Self {
        Self { m: hermitian_part(&m) }
    }

    pub fn zero() -> Self {
        Self { m: CMat3::zeros() }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { m: self.m + o.m }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { m: self.m - o.m }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m * Complex64::new(s, 0.0) }
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant().re
    }

    pub fn positivity_check(&self) -> Positivity {
        check_positive(&self.m)
    }

    /// `a ∧ b` for two (1,1)-forms: the polarization of `H ↦ 2·adj(H)`.
    pub fn wedge_of(a: &HermitianMatrixForm, b: &HermitianMatrixForm) -> Self {
        let s = adjugate(&(a.m + b.m)) - adjugate(&a.m) - adjugate(&b.m);
        Self { m: s }
    }

    /// Unique positive `H` with `to_two_two(H) = Σ`, namely
    /// `H = sqrt(det(Σ/2)) · (Σ/2)⁻¹`.
    pub fn michelsohn_root(&self) -> Result<HermitianMatrixForm> {
        let pos = self.positivity_check();
        if !pos.positive {
            return Err(Error::NonPositiveTwoTwo { min_eigenvalue: pos.min_eigenvalue });
        }
        let half = self.m * Complex64::new(0.5, 0.0);
        let det = half.determinant().re;
        let inv = half
            .try_inverse()
            .ok_or(Error::NonPositiveTwoTwo { min_eigenvalue: pos.min_eigenvalue })?;
        Ok(HermitianMatrixForm::new(inv * Complex64::new(det.sqrt(), 0.0)))
    }

    /// Coefficients after `θ_old = J · φ_new`: a (2,2)-form transforms through
    /// the adjugate of the coframe change.
    pub fn transform(&self, j: &CMat3) -> Self {
        // omitted-index minors of J assemble into adj(J)
        let a = adjugate(j);
        Self::new(a.map(|c| c.conj()) * self.m * a.transpose())
    }

    pub fn to_pq_form(&self) -> PQForm {
        let mut out = PQForm::zero(2, 2).expect("valid bidegree");
        for a in 0..3 {
            for b in 0..3 {
                let c = self.m[(a, b)];
                if c != Complex64::new(0.0, 0.0) {
                    out.add_term(omit(b), omit(a), c * parity(a, b));
                }
            }
        }
        out
    }

    pub fn from_pq_form(f: &PQForm) -> Result<Self> {
        if f.bidegree() != (2, 2) {
            return Err(Error::InvalidParameter("expected a (2,2)-form".into()));
        }
        let mut m = CMat3::zeros();
        for a in 0..3 {
            for b in 0..3 {
                m[(a, b)] = f.coefficient_masks(omit(b), omit(a)) * parity(a, b);
            }
        }
        Ok(Self { m })
    }
}

impl fmt::Display for HermitianMatrixForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|c| format!("{:+.6e}{:+.6e}i", self.m[(r, c)].re, self.m[(r, c)].im))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force expansion of ω∧ω by the generic wedge, read back in the
    /// (2,2) convention.
    fn wedge_square(h: &HermitianMatrixForm) -> TwoTwoMatrixForm {
        let w = h.to_pq_form();
        TwoTwoMatrixForm::from_pq_form(&w.wedge(&w).unwrap()).unwrap()
    }

    #[test]
    fn dz_wedge_dz_vanishes() {
        let dz = PQForm::dtheta(2);
        assert_eq!(dz.wedge(&dz).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn degree_overflow_is_an_error() {
        let top = PQForm::monomial(c(1.0, 0.0), &[0, 1, 2], &[]);
        let dz = PQForm::dtheta(0);
        assert!(matches!(top.wedge(&dz), Err(Error::InvalidWedge { p: 4, q: 0 })));
    }

    #[test]
    fn fibre_blocks_wedge_to_the_element_omitting_z() {
        let du = PQForm::monomial(I, &[0], &[0]);
        let dv = PQForm::monomial(I, &[1], &[1]);
        let prod = du.wedge(&dv).unwrap();
        // i² θ⁰θ̄⁰θ¹θ̄¹ = θ^{01}θ̄^{01}
        assert_eq!(prod.coefficient(&[0, 1], &[0, 1]), c(1.0, 0.0));
        let s = TwoTwoMatrixForm::from_pq_form(&prod).unwrap();
        assert_eq!(s.m[(2, 2)], c(1.0, 0.0));
        assert_eq!(s.max_abs(), 1.0);
    }

    #[test]
    fn identity_cubed_is_six_volumes() {
        let w = HermitianMatrixForm::identity().to_pq_form();
        let cube = w.wedge(&w).unwrap().wedge(&w).unwrap();
        let v = cube.volume_coefficient().unwrap();
        assert!((v - c(6.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn to_two_two_examples() {
        let s = HermitianMatrixForm::identity().to_two_two();
        assert!((s.m - CMat3::identity() * c(2.0, 0.0)).norm() < 1e-15);
        let h = HermitianMatrixForm::diag(1.0, 2.0, 3.0);
        let oracle = wedge_square(&h);
        let expected = HermitianMatrixForm::diag(12.0, 6.0, 4.0).m;
        assert!((oracle.m - expected).norm() < 1e-14);
        assert!((h.to_two_two().m - expected).norm() < 1e-14);
    }

    #[test]
    fn michelsohn_examples() {
        let h = TwoTwoMatrixForm { m: CMat3::identity() * c(2.0, 0.0) }.michelsohn_root().unwrap();
        assert!((h.m - CMat3::identity()).norm() < 1e-15);
        let s = TwoTwoMatrixForm { m: HermitianMatrixForm::diag(12.0, 6.0, 4.0).m };
        let h = s.michelsohn_root().unwrap();
        assert!((h.m - HermitianMatrixForm::diag(1.0, 2.0, 3.0).m).norm() < 1e-14);
    }

    #[test]
    fn michelsohn_rejects_indefinite() {
        let s = TwoTwoMatrixForm { m: HermitianMatrixForm::diag(1.0, -1.0, 1.0).m };
        assert!(matches!(s.michelsohn_root(), Err(Error::NonPositiveTwoTwo { .. })));
    }

    #[test]
    fn lefschetz_examples() {
        let id = HermitianMatrixForm::identity();
        assert_eq!(HermitianMatrixForm::lefschetz_trace(&id, &id).unwrap(), 3.0);
        let r: f64 = 7.3;
        let slow = HermitianMatrixForm::diag(0.0, -2.0 / (r * r), -2.0 / (r * r))
            .add(&HermitianMatrixForm::diag(0.0, 0.0, 4.0 / (r * r)));
        assert!(HermitianMatrixForm::lefschetz_trace(&id, &slow).unwrap().abs() < 1e-15);
        let d = HermitianMatrixForm::diag(0.5, -1.25, 4.0);
        assert!((HermitianMatrixForm::lefschetz_trace(&id, &d).unwrap() - 3.25).abs() < 1e-15);
        let singular = HermitianMatrixForm::diag(1.0, 1.0, 0.0);
        assert!(HermitianMatrixForm::lefschetz_trace(&singular, &id).is_err());
    }

    #[test]
    fn positivity_examples() {
        let p = HermitianMatrixForm::identity().positivity_check();
        assert!(p.positive);
        assert!((p.min_eigenvalue - 1.0).abs() < 1e-15);
        let p = HermitianMatrixForm::diag(1.0, 1.0, 0.0).positivity_check();
        assert!(!p.positive);
        assert!(p.min_eigenvalue.abs() < 1e-15);
    }

    #[test]
    fn conjugation_of_real_one_one() {
        let mut m = CMat3::zeros();
        m[(0, 1)] = c(0.3, -0.7);
        m[(1, 0)] = c(0.3, 0.7);
        m[(2, 2)] = c(2.0, 0.0);
        let f = HermitianMatrixForm::new(m).to_pq_form();
        assert!(f.is_real(1e-15));
        assert!(!f.scale(I).is_real(1e-3));
    }

    #[test]
    fn two_two_transform_matches_wedge_of_transforms() {
        let mut j = CMat3::zeros();
        j[(0, 0)] = c(1.2, 0.1);
        j[(0, 1)] = c(-0.3, 0.4);
        j[(1, 0)] = c(0.2, 0.0);
        j[(1, 1)] = c(0.9, -0.2);
        j[(2, 2)] = c(0.5, 0.0);
        j[(2, 0)] = c(0.1, 0.3);
        let mut m = CMat3::identity();
        m[(0, 2)] = c(0.2, 0.1);
        m[(2, 0)] = c(0.2, -0.1);
        let h = HermitianMatrixForm::new(m);
        let lhs = h.to_two_two().transform(&j);
        let rhs = h.transform(&j).to_two_two();
        assert!((lhs.m - rhs.m).norm() < 1e-13);
    }
}
