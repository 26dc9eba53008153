//! Radial fixed-point solver for `ω_ψ³ = e^{f − ψ(s)}ω³` with the ansatz
//! `ω_ψ² = ω² + i∂∂̄(ψω)`.
//!
//! Unknowns are radial and sampled along one angular seed of the `w`-chart.
//! The linearization `L̃u = Lu + u(s)e^f` is discretized with central
//! differences in `ln r` and Neumann ghost nodes at both ends; the evaluation
//! term removes the constants from the kernel.

pub mod diagnostics;
pub mod grid;
pub mod iterate;
pub mod operator;

use serde::Serialize;

pub use diagnostics::{compact_side_kernel, contraction_diagnostic, inverse_norm, limit_kernel, ContractionReport, ContractionRow, KernelReport};
pub use grid::{RadialFunction, RadialGrid, WeightedNorm};
pub use iterate::{fixed_point_solve, newton_solve, FixedPointMap, FixedPointResult, SolverSettings, TraceRow};
pub use operator::{assemble_linearized, perturbed_square, AnsatzTerms, LinearizedProblem};

use crate::analysis::{angular_seeds, chern_ricci_of};
use crate::conifold::ChartPoint;
use crate::error::Result;
use crate::gluing::{singular_reference_metric, GluingParams, PregluedField, TailSource};

/// Grid placement for the preglued problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverSetup {
    /// Nodes per unit of `ln r`.
    pub density: f64,
    /// Lower end as a multiple of the field's inner radius.
    pub inner_factor: f64,
    pub r_max: f64,
    /// Radius of the evaluation point `s`.
    pub r_eval: f64,
    /// Seed of the angular direction.
    pub seed: u64,
}

impl Default for SolverSetup {
    fn default() -> Self {
        Self { density: 20.0, inner_factor: 2.0, r_max: 0.9, r_eval: 0.6, seed: 7 }
    }
}

impl SolverSetup {
    pub fn direction(&self) -> ChartPoint {
        angular_seeds(self.seed, 1)[0]
    }

    /// Grid from `inner_factor·λ^{1/2}·r_inner` to `r_max`.
    pub fn grid(&self, params: &GluingParams, r_inner: f64) -> Result<RadialGrid> {
        let r_lo = self.inner_factor * params.lambda().sqrt() * r_inner;
        RadialGrid::with_density(r_lo, self.r_max, self.density, self.r_eval)
    }
}

/// The preglued problem. `f` is measured against the volume of the uncut
/// singular-side metric, the Calabi–Yau reference away from the neck.
pub fn preglued_problem(params: &GluingParams, tail: TailSource, setup: &SolverSetup) -> Result<LinearizedProblem> {
    let r_inner = tail.r_min();
    let field = PregluedField::new(*params, tail)?;
    let grid = setup.grid(params, r_inner)?;
    let dir = setup.direction();
    let problem = LinearizedProblem::assemble(&field, grid, &dir)?;
    let f = problem
        .grid
        .r
        .iter()
        .zip(&problem.f)
        .map(|(&r, f)| {
            let p = dir.with_radius(r)?;
            Ok(f - chern_ricci_of(&singular_reference_metric(&p, params)?, &p)?)
        })
        .collect::<Result<Vec<_>>>()?;
    problem.with_f(f)
}

/// `a·(1 − x²)³` for `|x| < 1`, `x = ln(r/r_c)/w`; zero elsewhere.
pub fn synthetic_bump(grid: &RadialGrid, amplitude: f64, r_center: f64, width: f64) -> Vec<f64> {
    grid.r
        .iter()
        .map(|r| {
            let x = (r / r_center).ln() / width;
            if x.abs() < 1.0 {
                amplitude * (1.0 - x * x).powi(3)
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests;
