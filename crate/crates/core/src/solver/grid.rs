use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Log-spaced radii with Neumann ghost stencils in `t = ln r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    /// Uniform spacing in `ln r`.
    pub h: f64,
    /// Evaluation index.
    pub s: usize,
}

pub const MIN_NODES: usize = 64;

impl RadialGrid {
    /// `n` nodes on `[r_lo, r_hi]`; `s` is the node nearest `r_s`, which must
    /// fall in the outer third.
    pub fn new(r_lo: f64, r_hi: f64, n: usize, r_s: f64) -> Result<Self> {
        if n < MIN_NODES {
            return Err(Error::InvalidParameter(format!("grid needs at least {MIN_NODES} nodes, got {n}")));
        }
        if !(r_lo > 0.0 && r_hi > r_lo && r_hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid range [{r_lo}, {r_hi}] is invalid")));
        }
        let h = (r_hi / r_lo).ln() / (n - 1) as f64;
        let r: Vec<f64> = (0..n).map(|i| (r_lo.ln() + h * i as f64).exp()).collect();
        let s = ((r_s / r_lo).ln() / h).round().clamp(0.0, (n - 1) as f64) as usize;
        if 3 * s < 2 * (n - 1) {
            return Err(Error::InvalidParameter(format!("evaluation radius {r_s} is not in the outer third of the grid")));
        }
        Ok(Self { r, h, s })
    }

    /// Node count from a density per unit of `ln r`, at least [`MIN_NODES`].
    pub fn with_density(r_lo: f64, r_hi: f64, per_unit: f64, r_s: f64) -> Result<Self> {
        let n = ((r_hi / r_lo).ln() * per_unit).ceil() as usize + 1;
        Self::new(r_lo, r_hi, n.max(MIN_NODES), r_s)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Stencil weights `(j, w_t, w_tt)` for `∂_t` and `∂_t²` at node `i`.
    pub fn stencil(&self, i: usize) -> Vec<(usize, f64, f64)> {
        let n = self.len();
        let (h, h2) = (self.h, self.h * self.h);
        if i == 0 {
            // ghost u_{-1} = u_1
            vec![(0, 0.0, -2.0 / h2), (1, 0.0, 2.0 / h2)]
        } else if i == n - 1 {
            vec![(n - 2, 0.0, 2.0 / h2), (n - 1, 0.0, -2.0 / h2)]
        } else {
            vec![(i - 1, -0.5 / h, 1.0 / h2), (i, 0.0, -2.0 / h2), (i + 1, 0.5 / h, 1.0 / h2)]
        }
    }

    /// `(u, u_r, u_rr)` at every node.
    pub fn derivatives(&self, u: &[f64]) -> Vec<[f64; 3]> {
        (0..self.len())
            .map(|i| {
                let (mut dt, mut dtt) = (0.0, 0.0);
                for (j, wt, wtt) in self.stencil(i) {
                    dt += wt * u[j];
                    dtt += wtt * u[j];
                }
                let r = self.r[i];
                [u[i], dt / r, (dtt - dt) / (r * r)]
            })
            .collect()
    }

    /// Stencil weights `(j, ∂u_r/∂u_j, ∂u_rr/∂u_j)`.
    pub fn radial_stencil(&self, i: usize) -> Vec<(usize, f64, f64)> {
        let r = self.r[i];
        self.stencil(i).into_iter().map(|(j, wt, wtt)| (j, wt / r, (wtt - wt) / (r * r))).collect()
    }
}

/// Weighted sup-norms with weight `r^b`: order 0 is `sup r^b|u|`, order 2 is
/// `sup max(r^b|u|, r^{b+1}|u_r|, r^{b+2}|u_rr|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeightedNorm {
    pub weight: f64,
    pub order: u8,
}

impl WeightedNorm {
    /// The solution norm `C²_b`, `b ∈ (0, 2)`.
    pub fn solution(b: f64) -> Result<Self> {
        if !(b > 0.0 && b < 2.0) {
            return Err(Error::InvalidParameter(format!("weight b = {b} must lie in (0, 2)")));
        }
        Ok(Self { weight: b, order: 2 })
    }

    /// The data norm `C⁰_{b+2}`.
    pub fn data(b: f64) -> Result<Self> {
        Self::solution(b).map(|_| Self { weight: b + 2.0, order: 0 })
    }

    pub fn norm(&self, grid: &RadialGrid, u: &[f64]) -> f64 {
        if self.order == 0 {
            return grid.r.iter().zip(u).map(|(r, v)| r.powf(self.weight) * v.abs()).fold(0.0, f64::max);
        }
        grid.derivatives(u)
            .iter()
            .zip(&grid.r)
            .map(|(d, r)| {
                let w = r.powf(self.weight);
                (w * d[0].abs()).max(w * r * d[1].abs()).max(w * r * r * d[2].abs())
            })
            .fold(0.0, f64::max)
    }
}

/// A radial function on grid radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialFunction {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialFunction {
    pub fn zeros(grid: &RadialGrid) -> Self {
        Self { r: grid.r.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Two whitespace-separated columns `r psi` after `#` comment lines.
    pub fn to_table(&self) -> String {
        let mut s = format!("# psi table\n# nodes = {}\n# r psi\n", self.r.len());
        for (r, v) in self.r.iter().zip(&self.values) {
            let _ = writeln!(s, "{r:.17e} {v:.17e}");
        }
        s
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut values = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: k + 1, msg };
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(err(format!("expected 2 columns, found {}", cols.len())));
            }
            let parse = |c: &str| c.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| err(format!("`{c}` is not a finite number")));
            let (ri, vi) = (parse(cols[0])?, parse(cols[1])?);
            if !(ri > 0.0) || r.last().is_some_and(|&prev| ri <= prev) {
                return Err(err("radii must be positive and strictly increasing".into()));
            }
            r.push(ri);
            values.push(vi);
        }
        if r.is_empty() {
            return Err(Error::Parse { line: 0, msg: "table has no rows".into() });
        }
        Ok(Self { r, values })
    }
}
