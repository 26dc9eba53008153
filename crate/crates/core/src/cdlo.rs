//! The Candelas–de la Ossa metric `ω_co,1 = i∂∂̄ F(r³) + 4π*ω_FS`.
//!
//! At a point with `z = 0` the metric of `i∂∂̄F(ρ) + 4π*ω_FS` has eigenvalues
//! `F' + ρF''`, `F'` and `ρF' + 4`, while the cone has determinant ratio
//! `2/3` against the same coframe. Writing `φ = ρF'` the Calabi–Yau condition
//! `det(ω_co,1)/det(ω_co,0) = C` becomes the first-order equation
//!
//! ```text
//! dφ/d(log ρ) = (2/3) C ρ² / (φ (φ + 4))
//! ```
//!
//! which is integrated outward from the exceptional curve, where regularity
//! forces `φ ≈ ρ √(C/6)`. The volume constant `C` is found by shooting so that
//! the deviation `w = φ − ρ^{2/3} + 2` vanishes at the outer boundary, i.e. so
//! that the potential matches `(3/2)y^{2/3} − 2 log y` plus a bounded tail.
//! For `y ≥ 1` the integration runs directly on `w` with the cancellation
//! against the cone done algebraically.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::conifold::{fs_form, radial_hessian, ChartPoint, Jet};
use crate::error::{Error, Result};
use crate::forms::HermitianMatrixForm;

/// Smallest `y` at which a truncated series is trusted.
pub const SERIES_Y_MIN: f64 = 10.0;

/// Coefficients `c_0, …, c_N` of the tail `Σ c_n y^{-2n/3}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesCoefficients {
    pub c: Vec<f64>,
    pub y_min: f64,
}

impl SeriesCoefficients {
    pub fn new(c: Vec<f64>) -> Self {
        Self { c, y_min: SERIES_Y_MIN }
    }

    pub fn order(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// Same coefficients with the gauge constant `c_0` set to zero.
    pub fn gauge_fixed(&self) -> Self {
        let mut c = self.c.clone();
        if let Some(c0) = c.first_mut() {
            *c0 = 0.0;
        }
        Self { c, y_min: self.y_min }
    }

    fn check(&self, y: f64) -> Result<()> {
        if !(y >= self.y_min) || !y.is_finite() {
            return Err(Error::OutOfRange { what: "series expansion", r: y.cbrt(), min: self.y_min.cbrt(), max: f64::INFINITY });
        }
        Ok(())
    }
}

/// `Σ c_n y^{-2n/3}` with derivatives in `y`.
pub fn tail_potential(y: f64, c: &SeriesCoefficients) -> Result<Jet> {
    c.check(y)?;
    Ok(c
        .c
        .iter()
        .enumerate()
        .fold(Jet::constant(0.0), |acc, (n, &cn)| acc.add(Jet::power(y, cn, -2.0 * n as f64 / 3.0))))
}

/// The leading part `(3/2) y^{2/3} − 2 log y`.
pub fn leading_potential(y: f64) -> Jet {
    Jet::power(y, 1.5, 2.0 / 3.0).add(Jet::log(y, -2.0))
}

/// `f_1(y) = (3/2)y^{2/3} − 2 log y + Σ c_n y^{-2n/3}` with derivatives.
pub fn f1_series_jet(y: f64, c: &SeriesCoefficients) -> Result<Jet> {
    Ok(leading_potential(y).add(tail_potential(y, c)?))
}

pub fn f1_series(y: f64, c: &SeriesCoefficients) -> Result<f64> {
    Ok(f1_series_jet(y, c)?.v)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileSettings {
    /// Inner edge of the stored profile.
    pub y_min: f64,
    /// Outer edge, where the shooting condition is imposed.
    pub y_max: f64,
    /// Where the regular branch is started.
    pub y_start: f64,
    pub nodes_per_decade: usize,
    /// Tolerance on the outer matching of `w`.
    pub match_tol: f64,
}

impl Default for ProfileSettings {
    fn default() -> Self {
        Self { y_min: 1.0, y_max: 1e12, y_start: 1e-6, nodes_per_decade: 200, match_tol: 1e-6 }
    }
}

/// Numerical Calabi–Yau potential on a log-spaced `y` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    /// Volume constant `det(ω_co,1)/det(ω_co,0)`.
    pub volume_constant: f64,
    y: Vec<f64>,
    w: Vec<f64>,
    wx: Vec<f64>,
    t: Vec<f64>,
    shooting_iterations: usize,
}

/// Everything the metric needs from the potential at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    /// `F(y)` with derivatives in `y`.
    pub potential: Jet,
    /// Tail `t = F − (3/2)y^{2/3} + 2 log y` with derivatives in `y`.
    pub tail: Jet,
}

fn phi_rhs(y: f64, phi: f64, cvol: f64) -> f64 {
    (2.0 / 3.0) * cvol * y * y / (phi * (phi + 4.0))
}

fn w_rhs(y: f64, w: f64, cvol: f64) -> f64 {
    let a = y.powf(2.0 / 3.0);
    let d = (a + w) * (a + w) - 4.0;
    (2.0 / 3.0) * a * ((cvol - 1.0) * a * a - 2.0 * a * w - w * w + 4.0) / d
}

struct Trajectory {
    x: Vec<f64>,
    w: Vec<f64>,
    wx: Vec<f64>,
}

fn rk4(x: f64, s: f64, h: f64, f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let k1 = f(x, s);
    let k2 = f(x + 0.5 * h, s + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h, s + 0.5 * h * k2);
    let k4 = f(x + h, s + h * k3);
    s + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

fn integrate(settings: &ProfileSettings, cvol: f64) -> Result<Trajectory> {
    let dx = std::f64::consts::LN_10 / settings.nodes_per_decade as f64;
    let x0 = settings.y_start.ln();
    let x_switch = settings.y_min.ln();
    let x_end = settings.y_max.ln();
    // regular branch: φ²(6 + φ) = C y² near y = 0
    let y0 = settings.y_start;
    let mut phi = y0 * (cvol / 6.0).sqrt();
    for _ in 0..20 {
        phi = y0 * (cvol / (6.0 + phi)).sqrt();
    }
    let fphi = |x: f64, p: f64| phi_rhs(x.exp(), p, cvol);
    let n_inner = ((x_switch - x0) / dx).ceil().max(1.0) as usize;
    let h_inner = (x_switch - x0) / n_inner as f64;
    let mut x = x0;
    for _ in 0..n_inner {
        phi = rk4(x, phi, h_inner, &fphi);
        x += h_inner;
        if !(phi > 0.0) || !phi.is_finite() {
            return Err(Error::Shooting(format!("profile lost positivity at y = {:.3e}", x.exp())));
        }
    }
    let y_sw = settings.y_min;
    let mut w = phi - y_sw.powf(2.0 / 3.0) + 2.0;
    let fw = |x: f64, w: f64| w_rhs(x.exp(), w, cvol);
    let n_outer = ((x_end - x_switch) / dx).ceil() as usize;
    let h = (x_end - x_switch) / n_outer as f64;
    let mut tr = Trajectory { x: Vec::with_capacity(n_outer + 1), w: Vec::new(), wx: Vec::new() };
    x = x_switch;
    tr.x.push(x);
    tr.w.push(w);
    tr.wx.push(fw(x, w));
    for k in 0..n_outer {
        w = rk4(x, w, h, &fw);
        x = x_switch + (k + 1) as f64 * h;
        let a = x.exp().powf(2.0 / 3.0);
        if !w.is_finite() || !(a - 2.0 + w > 0.0) {
            return Err(Error::Shooting(format!("profile lost positivity at y = {:.3e}", x.exp())));
        }
        tr.x.push(x);
        tr.w.push(w);
        tr.wx.push(fw(x, w));
    }
    Ok(tr)
}

/// Integrates the radial Calabi–Yau equation and shoots on the volume constant.
pub fn solve_radial_cy(settings: &ProfileSettings) -> Result<RadialProfile> {
    if !(settings.y_start > 0.0 && settings.y_start < settings.y_min && settings.y_min < settings.y_max) {
        return Err(Error::InvalidParameter("profile range must satisfy 0 < y_start < y_min < y_max".into()));
    }
    // slow manifold of the deviation equation: w ≈ 4y^{-2/3}
    let target = 4.0 * settings.y_max.powf(-2.0 / 3.0);
    let residual = |cvol: f64| -> Result<(f64, Trajectory)> {
        let tr = integrate(settings, cvol)?;
        Ok((*tr.w.last().expect("non-empty") - target, tr))
    };
    let (mut c0, mut c1) = (1.0, 1.0 + 1e-6);
    let (mut g0, _) = residual(c0)?;
    let (mut g1, mut tr) = residual(c1)?;
    let mut iterations = 0;
    while g1.abs() > settings.match_tol * 1e-3 && iterations < 60 {
        iterations += 1;
        if g1 == g0 {
            break;
        }
        let c2 = c1 - g1 * (c1 - c0) / (g1 - g0);
        c0 = c1;
        g0 = g1;
        c1 = c2;
        let (g, t) = residual(c1)?;
        g1 = g;
        tr = t;
    }
    if g1.abs() > settings.match_tol {
        return Err(Error::Shooting(format!(
            "outer matching residual {:.3e} exceeds {:.1e} after {iterations} secant steps (C = {c1})",
            g1.abs(),
            settings.match_tol
        )));
    }
    // tail: dt/dx = w, with t(∞) = 0 and w ~ y^{-2/3} beyond the grid
    let n = tr.x.len();
    let mut t = vec![0.0; n];
    t[n - 1] = -1.5 * tr.w[n - 1];
    for k in (0..n - 1).rev() {
        let h = tr.x[k + 1] - tr.x[k];
        let integral = 0.5 * h * (tr.w[k] + tr.w[k + 1]) + h * h / 12.0 * (tr.wx[k] - tr.wx[k + 1]);
        t[k] = t[k + 1] - integral;
    }
    Ok(RadialProfile {
        volume_constant: c1,
        y: tr.x.iter().map(|x| x.exp()).collect(),
        w: tr.w,
        wx: tr.wx,
        t,
        shooting_iterations: iterations,
    })
}

fn hermite(x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * f0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * f1
        + (s3 - s2) * h * d1
}

impl RadialProfile {
    pub fn y_range(&self) -> (f64, f64) {
        (self.y[0], *self.y.last().expect("non-empty"))
    }

    pub fn nodes(&self) -> usize {
        self.y.len()
    }

    pub fn shooting_iterations(&self) -> usize {
        self.shooting_iterations
    }

    fn locate(&self, y: f64) -> Result<usize> {
        let (lo, hi) = self.y_range();
        if !(y >= lo * (1.0 - 1e-12) && y <= hi * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange { what: "CdLO profile", r: y.cbrt(), min: lo.cbrt(), max: hi.cbrt() });
        }
        let k = self.y.partition_point(|&v| v <= y);
        Ok(k.clamp(1, self.y.len() - 1) - 1)
    }

    /// Deviation `w = yF' − y^{2/3} + 2` and the tail at `y`.
    fn interpolate(&self, y: f64) -> Result<(f64, f64)> {
        let k = self.locate(y)?;
        let (x0, x1, x) = (self.y[k].ln(), self.y[k + 1].ln(), y.ln());
        let w = hermite(x0, x1, self.w[k], self.w[k + 1], self.wx[k], self.wx[k + 1], x);
        let t = hermite(x0, x1, self.t[k], self.t[k + 1], self.w[k], self.w[k + 1], x);
        Ok((w, t))
    }

    pub fn evaluate(&self, y: f64) -> Result<ProfilePoint> {
        let (w, t) = self.interpolate(y)?;
        let a = y.powf(2.0 / 3.0);
        let phi = a - 2.0 + w;
        let phi_x = phi_rhs(y, phi, self.volume_constant);
        let wx = phi_x - (2.0 / 3.0) * a;
        let lead = leading_potential(y);
        let tail = Jet::new(t, w / y, (wx - w) / (y * y));
        let potential = Jet::new(lead.v + t, phi / y, (phi_x - phi) / (y * y));
        Ok(ProfilePoint { potential, tail })
    }

    /// Ratio `det(ω_co,1)/det(ω_co,0)` at every stored node, from the stored
    /// deviation and its derivative.
    pub fn volume_ratios(&self) -> Vec<f64> {
        self.y
            .iter()
            .zip(self.w.iter().zip(&self.wx))
            .map(|(&y, (&w, &wx))| {
                let a = y.powf(2.0 / 3.0);
                let phi = a - 2.0 + w;
                let phi_x = wx + (2.0 / 3.0) * a;
                // (F' + yF'') F' (yF' + 4) / (2/3) with φ = yF'
                1.5 * phi_x * phi * (phi + 4.0) / (y * y)
            })
            .collect()
    }

    /// True when the induced metric is positive at every node.
    pub fn is_positive(&self) -> bool {
        self.y.iter().zip(self.w.iter().zip(&self.wx)).all(|(&y, (&w, &wx))| {
            let a = y.powf(2.0 / 3.0);
            let phi = a - 2.0 + w;
            phi > 0.0 && wx + (2.0 / 3.0) * a > 0.0
        })
    }

    /// Plain-text table `y F F' F''`.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# cdlo radial profile");
        let _ = writeln!(s, "# volume_constant = {:.17e}", self.volume_constant);
        let _ = writeln!(s, "# y F dF d2F");
        for &y in &self.y {
            let p = self.evaluate(y).expect("node in range").potential;
            let _ = writeln!(s, "{:.17e} {:.17e} {:.17e} {:.17e}", y, p.v, p.d1, p.d2);
        }
        s
    }

    /// Parses the table written by [`RadialProfile::to_table`].
    pub fn from_table(text: &str) -> Result<Self> {
        let mut cvol: f64 = 1.0;
        let (mut y, mut w, mut wx, mut t) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    if k.trim() == "volume_constant" {
                        cvol = v.trim().parse().map_err(|_| Error::Parse { line: n + 1, msg: "bad volume_constant".into() })?;
                        if !(cvol.is_finite() && cvol > 0.0) {
                            return Err(Error::Parse { line: n + 1, msg: "volume_constant must be positive".into() });
                        }
                    }
                }
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|s| s.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse { line: n + 1, msg: e.to_string() })?;
            if vals.len() != 4 || vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse { line: n + 1, msg: "expected four finite columns: y F dF d2F".into() });
            }
            let (yy, f, df, d2f) = (vals[0], vals[1], vals[2], vals[3]);
            if !(yy > 0.0) || y.last().is_some_and(|&prev| yy <= prev) {
                return Err(Error::Parse { line: n + 1, msg: "y must be positive and strictly increasing".into() });
            }
            let a = yy.powf(2.0 / 3.0);
            let phi = yy * df;
            let phi_x = yy * (df + yy * d2f);
            y.push(yy);
            w.push(phi - a + 2.0);
            wx.push(phi_x - (2.0 / 3.0) * a);
            t.push(f - 1.5 * a + 2.0 * yy.ln());
        }
        if y.len() < 2 {
            return Err(Error::Parse { line: 0, msg: "profile needs at least two rows".into() });
        }
        Ok(Self { volume_constant: cvol, y, w, wx, t, shooting_iterations: 0 })
    }

    /// Least-squares fit of the tail on `[y_lo, y_hi]` against `y^{-2n/3}`, `n = 0..=order`.
    pub fn fit_series(&self, order: usize, y_lo: f64, y_hi: f64) -> Result<SeriesCoefficients> {
        let ys: Vec<f64> = self.y.iter().copied().filter(|&y| y >= y_lo && y <= y_hi).collect();
        if ys.len() < order + 2 {
            return Err(Error::TooFewSamples(ys.len()));
        }
        // columns scaled by their value at y_lo for conditioning
        let scale: Vec<f64> = (0..=order).map(|n| y_lo.powf(-2.0 * n as f64 / 3.0)).collect();
        let a = DMatrix::from_fn(ys.len(), order + 1, |i, n| ys[i].powf(-2.0 * n as f64 / 3.0) / scale[n]);
        let b = DVector::from_iterator(ys.len(), ys.iter().map(|&y| self.interpolate(y).map(|p| p.1).unwrap_or(f64::NAN)));
        let svd = a.svd(true, true);
        let sol = svd.solve(&b, 1e-15).map_err(|e| Error::SingularSystem(e.to_string()))?;
        let mut series = SeriesCoefficients::new((0..=order).map(|n| sol[n] / scale[n]).collect());
        series.y_min = y_lo.min(SERIES_Y_MIN);
        Ok(series)
    }
}

/// `ω_co,1` at a chart point.
pub fn cdlo_metric(pt: &ChartPoint, profile: &RadialProfile) -> Result<HermitianMatrixForm> {
    let y = pt.rho()?;
    let pp = profile.evaluate(y)?;
    Ok(radial_hessian(pt, pp.potential).add(&fs_form(pt).scale(4.0)))
}

/// `ω_co,1` built from a truncated series instead of the numerical profile.
pub fn cdlo_metric_from_series(pt: &ChartPoint, c: &SeriesCoefficients) -> Result<HermitianMatrixForm> {
    let y = pt.rho()?;
    Ok(radial_hessian(pt, f1_series_jet(y, c)?).add(&fs_form(pt).scale(4.0)))
}
