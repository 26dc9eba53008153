use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

use super::grid::{RadialFunction, WeightedNorm};
use super::operator::LinearizedProblem;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverSettings {
    pub max_iterations: usize,
    /// Stop when the weighted norm of the update falls below this.
    pub update_tol: f64,
    /// Required `max |F̃|` at the returned iterate.
    pub residual_tol: f64,
    /// Consecutive growing updates that count as divergence.
    pub divergence_window: usize,
    pub b: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { max_iterations: 60, update_tol: 1e-13, residual_tol: 1e-8, divergence_window: 5, b: 1.0 }
    }
}

/// `N(ψ) = L̃^{-1}(E(ψ) + G(ψ) − F̂(0) − Q̂(ψ))` with `L̃` factored once.
pub struct FixedPointMap<'a> {
    pub problem: &'a LinearizedProblem,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl<'a> FixedPointMap<'a> {
    pub fn new(problem: &'a LinearizedProblem) -> Result<Self> {
        let lu = problem.linearized_matrix().lu();
        if !lu.is_invertible() {
            return Err(Error::SingularSystem("L̃ is singular".into()));
        }
        Ok(Self { problem, lu })
    }

    pub fn solve_linear(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.lu
            .solve(&DVector::from_column_slice(rhs))
            .map(|v| v.as_slice().to_vec())
            .ok_or_else(|| Error::SingularSystem("L̃ solve failed".into()))
    }

    /// `E(ψ) + G(ψ) − F̂(0) − Q̂(ψ)`.
    pub fn right_hand_side(&self, psi: &[f64]) -> Result<Vec<f64>> {
        let (_, q) = self.problem.volume_terms(psi)?;
        let ps = psi[self.problem.grid.s];
        let shift = (-ps).exp_m1() + ps;
        Ok(self.problem.f.iter().zip(&q).map(|(f, q)| f.exp_m1() + f.exp() * shift - q).collect())
    }

    pub fn apply(&self, psi: &[f64]) -> Result<Vec<f64>> {
        self.solve_linear(&self.right_hand_side(psi)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub update_norm: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub psi: RadialFunction,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    /// `max_i |F̃(ψ)_i|`.
    pub residual: f64,
    pub psi_s: f64,
}

impl FixedPointResult {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("iteration,update_norm,residual\n");
        for t in &self.trace {
            let _ = writeln!(s, "{},{:.17e},{:.17e}", t.iteration, t.update_norm, t.residual);
        }
        s
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Iterates `ψ_{k+1} = N(ψ_k)` from `ψ₀ = 0`.
pub fn fixed_point_solve(problem: &LinearizedProblem, settings: &SolverSettings) -> Result<FixedPointResult> {
    let norm = WeightedNorm::solution(settings.b)?;
    let map = FixedPointMap::new(problem)?;
    let mut psi = vec![0.0; problem.len()];
    let mut trace = Vec::new();
    let mut growing = 0;
    for k in 1..=settings.max_iterations {
        let next = map.apply(&psi)?;
        let diff: Vec<f64> = next.iter().zip(&psi).map(|(a, b)| a - b).collect();
        let update_norm = norm.norm(&problem.grid, &diff);
        psi = next;
        let residual = max_abs(&problem.equation_residual(&psi)?);
        if let Some(prev) = trace.last().map(|t: &TraceRow| t.update_norm) {
            growing = if update_norm > prev { growing + 1 } else { 0 };
        }
        trace.push(TraceRow { iteration: k, update_norm, residual });
        if !update_norm.is_finite() || growing >= settings.divergence_window {
            return Err(Error::Divergence { iterations: k, last_norm: update_norm });
        }
        if update_norm <= settings.update_tol && residual <= settings.residual_tol {
            let psi_s = psi[problem.grid.s];
            return Ok(FixedPointResult { psi: RadialFunction { r: problem.grid.r.clone(), values: psi }, trace, iterations: k, residual, psi_s });
        }
    }
    Err(Error::Divergence { iterations: settings.max_iterations, last_norm: trace.last().map_or(f64::NAN, |t| t.update_norm) })
}

/// Dense Newton on `F̃(ψ) = 0`, independent of the fixed-point splitting.
pub fn newton_solve(problem: &LinearizedProblem, tol: f64, max_iterations: usize) -> Result<(Vec<f64>, usize)> {
    let mut psi = vec![0.0; problem.len()];
    for k in 1..=max_iterations {
        let res = problem.equation_residual(&psi)?;
        if max_abs(&res) <= tol {
            return Ok((psi, k - 1));
        }
        let jac: DMatrix<f64> = problem.residual_jacobian(&psi)?;
        let step = jac.lu().solve(&DVector::from_vec(res)).ok_or_else(|| Error::SingularSystem("Newton Jacobian is singular".into()))?;
        for (p, d) in psi.iter_mut().zip(step.iter()) {
            *p -= d;
        }
    }
    let last = max_abs(&problem.equation_residual(&psi)?);
    if last <= tol {
        return Ok((psi, max_iterations));
    }
    Err(Error::Divergence { iterations: max_iterations, last_norm: last })
}
