use serde::Serialize;

use crate::conifold::Jet;

/// Quintic smoothstep `10t³ − 15t⁴ + 6t⁵` clamped to `[0, 1]`, with derivatives.
fn smoothstep(t: f64) -> Jet {
    if t <= 0.0 {
        return Jet::constant(0.0);
    }
    if t >= 1.0 {
        return Jet::constant(1.0);
    }
    let t2 = t * t;
    Jet::new(t2 * t * (10.0 - 15.0 * t + 6.0 * t2), 30.0 * t2 * (1.0 - t) * (1.0 - t), 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffKind {
    /// 0 below the first breakpoint, 1 above the second.
    Increasing,
    /// 1 below the first breakpoint, 0 above the second.
    Decreasing,
}

/// C² monotone blend between two plateaus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffProfile {
    pub kind: CutoffKind,
    pub start: f64,
    pub end: f64,
}

impl CutoffProfile {
    /// `χ`: 0 on `[0, 1]`, 1 on `[2, ∞)`.
    pub const CHI: Self = Self { kind: CutoffKind::Increasing, start: 1.0, end: 2.0 };
    /// `ξ`: 1 on `[0, 1/16]`, 0 on `[1/4, ∞)`.
    pub const XI: Self = Self { kind: CutoffKind::Decreasing, start: 1.0 / 16.0, end: 0.25 };

    pub fn breakpoints(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    /// Value and first two derivatives at `x`.
    pub fn eval(&self, x: f64) -> Jet {
        let w = self.end - self.start;
        let s = smoothstep((x - self.start) / w);
        let s = Jet::new(s.v, s.d1 / w, s.d2 / (w * w));
        match self.kind {
            CutoffKind::Increasing => s,
            CutoffKind::Decreasing => Jet::new(1.0 - s.v, -s.d1, -s.d2),
        }
    }
}

/// `χ_ε(r) = χ(ε^{-p} r)` with derivatives in `r`.
pub fn chi(r: f64, eps: f64, p: f64) -> Jet {
    let k = eps.powf(-p);
    let c = CutoffProfile::CHI.eval(k * r);
    Jet::new(c.v, k * c.d1, k * k * c.d2)
}

/// `ξ_R(r²) = ξ(r²/R²)` as a function of `ρ = r³`.
pub fn xi_of_rho(rho: f64, r_cut: f64) -> Jet {
    let x = Jet::power(rho, 1.0 / (r_cut * r_cut), 2.0 / 3.0);
    x.compose(CutoffProfile::XI.eval(x.v))
}

/// `α_R`, `β_R`, `γ_R` at radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarProfiles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub fn scalar_profiles(r: f64, r_cut: f64) -> ScalarProfiles {
    let x = r * r / (r_cut * r_cut);
    let xi = CutoffProfile::XI.eval(x);
    let alpha = 2.0 * x * xi.d1 + x * x * xi.d2;
    let beta = xi.v + x * xi.d1;
    ScalarProfiles { alpha, beta, gamma: alpha + beta }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus() {
        let c = CutoffProfile::CHI;
        for x in [0.0, 0.5, 1.0] {
            assert_eq!(c.eval(x), Jet::constant(0.0));
        }
        for x in [2.0, 3.0, 1e9] {
            assert_eq!(c.eval(x), Jet::constant(1.0));
        }
        let xi = CutoffProfile::XI;
        assert_eq!(xi.eval(0.01).v, 1.0);
        assert_eq!(xi.eval(0.25).v, 0.0);
        assert_eq!(chi(0.09, 0.1, 1.0).v, 0.0);
        assert_eq!(chi(0.2, 0.1, 1.0).v, 1.0);
    }

    #[test]
    fn monotone_and_c2() {
        for prof in [CutoffProfile::CHI, CutoffProfile::XI] {
            let (a, b) = prof.breakpoints();
            let mut prev = prof.eval(a).v;
            for k in 1..=400 {
                let v = prof.eval(a + (b - a) * k as f64 / 400.0).v;
                match prof.kind {
                    CutoffKind::Increasing => assert!(v >= prev),
                    CutoffKind::Decreasing => assert!(v <= prev),
                }
                prev = v;
            }
            // one-sided second derivatives agree at the breakpoints
            for x in [a, b] {
                let d = 1e-7 * (b - a);
                let (lo, hi) = (prof.eval(x - d), prof.eval(x + d));
                assert!((lo.d1 - hi.d1).abs() < 1e-5);
                assert!((lo.d2 - hi.d2).abs() < 1e-4 / (b - a).powi(2));
            }
        }
    }

    #[test]
    fn derivatives_match_differences() {
        for prof in [CutoffProfile::CHI, CutoffProfile::XI] {
            let (a, b) = prof.breakpoints();
            for k in 1..10 {
                let x = a + (b - a) * k as f64 / 10.0;
                let h = 1e-5 * (b - a);
                let (m, c, p) = (prof.eval(x - h), prof.eval(x), prof.eval(x + h));
                assert!(((p.v - m.v) / (2.0 * h) - c.d1).abs() < 1e-6 * (1.0 + c.d1.abs()));
                assert!(((p.d1 - m.d1) / (2.0 * h) - c.d2).abs() < 1e-5 * (1.0 + c.d2.abs()));
            }
        }
    }

    #[test]
    fn scalar_profile_plateaus_and_identity() {
        assert_eq!(scalar_profiles(2.0, 10.0), ScalarProfiles { alpha: 0.0, beta: 1.0, gamma: 1.0 });
        assert_eq!(scalar_profiles(5.0, 10.0), ScalarProfiles { alpha: 0.0, beta: 0.0, gamma: 0.0 });
        for k in 0..100 {
            let r = 1.0 + 0.07 * k as f64;
            let s = scalar_profiles(r, 10.0);
            assert_eq!(s.gamma, s.alpha + s.beta);
            let x = r * r / 100.0;
            let xi = CutoffProfile::XI.eval(x);
            let direct = xi.v + 3.0 * x * xi.d1 + x * x * xi.d2;
            assert!((s.gamma - direct).abs() < 1e-12);
            assert!(s.alpha.abs() < 10.0 && s.beta.abs() < 10.0);
        }
    }
}
