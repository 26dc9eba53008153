use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::decay_fit;
use crate::error::{Error, Result};
use crate::field::FnField;
use crate::gluing::{singular_reference_metric, GluingParams, TailSource};

use super::grid::WeightedNorm;
use super::iterate::FixedPointMap;
use super::operator::LinearizedProblem;
use super::{preglued_problem, SolverSetup};

/// Operator norm of `L̃^{-1}` from `C⁰_{b+2}` to `C²_b`. Both norms are
/// weighted sups, so the norm is the largest weighted absolute row sum of
/// `L̃^{-1}`, `∂_r L̃^{-1}` and `∂_r² L̃^{-1}`.
pub fn inverse_norm(problem: &LinearizedProblem, b: f64) -> Result<f64> {
    WeightedNorm::solution(b)?;
    let n = problem.len();
    let k = problem
        .linearized_matrix()
        .try_inverse()
        .ok_or_else(|| Error::SingularSystem("L̃ is singular".into()))?;
    let mut d1 = DMatrix::zeros(n, n);
    let mut d2 = DMatrix::zeros(n, n);
    for i in 0..n {
        for (j, w1, w2) in problem.grid.radial_stencil(i) {
            d1[(i, j)] += w1;
            d2[(i, j)] += w2;
        }
    }
    let r = &problem.grid.r;
    let col_w: Vec<f64> = r.iter().map(|x| x.powf(-(b + 2.0))).collect();
    let mut best: f64 = 0.0;
    for (order, m) in [(0, k.clone()), (1, &d1 * &k), (2, &d2 * &k)] {
        for i in 0..n {
            let row: f64 = (0..n).map(|j| m[(i, j)].abs() * col_w[j]).sum();
            best = best.max(r[i].powf(b + order as f64) * row);
        }
    }
    Ok(best)
}

/// Singular values of the limit operator `Δu + u(s)` and of `Δ` alone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelReport {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub kernel_dimension: usize,
    /// Without the evaluation term the constants are in the kernel.
    pub control_kernel_dimension: usize,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn limit_kernel(problem: &LinearizedProblem) -> Result<KernelReport> {
    let tolerance = 1e-10;
    // rows scaled by r², which leaves the kernel unchanged
    let mut lap = problem.laplacian_matrix();
    let mut with_ev = lap.clone();
    let s = problem.grid.s;
    for i in 0..problem.len() {
        with_ev[(i, s)] += 1.0;
        let w = problem.grid.r[i].powi(2);
        lap.row_mut(i).scale_mut(w);
        with_ev.row_mut(i).scale_mut(w);
    }
    let count = |m: DMatrix<f64>| -> (f64, f64, usize) {
        let sv = m.singular_values();
        let max = sv.max();
        (sv.min(), max, sv.iter().filter(|&&x| x <= tolerance * max).count())
    };
    let (sigma_min, sigma_max, kernel_dimension) = count(with_ev);
    let (_, _, control_kernel_dimension) = count(lap);
    Ok(KernelReport { sigma_min, sigma_max, kernel_dimension, control_kernel_dimension, tolerance, pass: kernel_dimension == 0 && control_kernel_dimension == 1 })
}

/// The compact-side analogue: the uncut singular-side metric on the solver grid.
pub fn compact_side_kernel(params: &GluingParams, setup: &SolverSetup) -> Result<KernelReport> {
    let p = *params;
    let field = FnField { name: "singular-side reference".into(), f: move |pt: &crate::conifold::ChartPoint| singular_reference_metric(pt, &p) };
    let grid = setup.grid(params, 1.0)?;
    limit_kernel(&LinearizedProblem::assemble(&field, grid, &setup.direction())?)
}

/// One `ε` of the contraction sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionRow {
    pub epsilon: f64,
    pub r_cutoff: f64,
    pub nodes: usize,
    /// `δ = c̃ε^{(p+q)(b+2)+τ}`.
    pub ball_radius: f64,
    /// `‖N(0)‖`.
    pub n0_norm: f64,
    /// Largest `‖N(ψ₁) − N(ψ₂)‖/‖ψ₁ − ψ₂‖` over the sampled pairs.
    pub lipschitz: f64,
    /// `‖N(0)‖ + Lip·δ ≤ δ`, and every sampled pair kept `ω_ψ²` positive.
    pub self_map: bool,
    /// Sampled pairs on which `ω_ψ²` left the positive cone.
    pub positivity_failures: usize,
    pub inverse_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionReport {
    pub b: f64,
    pub exponent: f64,
    /// Calibrated at the largest `ε` as `2‖N(0)‖/ε^exponent`.
    pub c_tilde: f64,
    pub trials: usize,
    pub rows: Vec<ContractionRow>,
    pub lipschitz_decreasing: bool,
    /// Fitted slope of `log Lip` against `log ε`; compared with `τ`.
    pub lipschitz_exponent: Option<f64>,
    pub predicted_exponent: f64,
    /// `max/min` of the inverse norm over the sweep.
    pub inverse_norm_spread: f64,
}

fn random_shape(rng: &mut ChaCha8Rng, r: &[f64], b: f64) -> Vec<f64> {
    let a: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = r.len();
    (0..n)
        .map(|i| {
            let x = i as f64 / (n - 1) as f64;
            r[i].powf(-b) * a.iter().enumerate().map(|(k, ak)| ak * (k as f64 * std::f64::consts::PI * x).cos()).sum::<f64>()
        })
        .collect()
}

/// Lipschitz constant of `N` and the self-mapping chain on the discrete
/// `U_τ` ball across an `ε` sweep.
pub fn contraction_diagnostic(params: &GluingParams, tail: &TailSource, epsilons: &[f64], trials: usize, setup: &SolverSetup) -> Result<ContractionReport> {
    params.check_feasible()?;
    let mut eps = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    if eps.is_empty() || trials == 0 {
        return Err(Error::InvalidParameter("contraction sweep needs at least one ε and one trial".into()));
    }
    let b = params.b;
    let norm = WeightedNorm::solution(b)?;
    let exponent = (params.p + params.q) * (b + 2.0) + params.tau;
    let mut rows = Vec::new();
    let mut c_tilde = f64::NAN;
    for (k, &e) in eps.iter().enumerate() {
        let g = GluingParams { epsilon: e, ..*params };
        g.check_feasible()?;
        let problem = preglued_problem(&g, tail.clone(), setup)?;
        let map = FixedPointMap::new(&problem)?;
        let zero = vec![0.0; problem.len()];
        let n0_norm = norm.norm(&problem.grid, &map.apply(&zero)?);
        if k == 0 {
            c_tilde = 2.0 * n0_norm / e.powf(exponent);
        }
        let ball_radius = c_tilde * e.powf(exponent);
        let mut rng = ChaCha8Rng::seed_from_u64(setup.seed ^ 0x5eed);
        let mut lipschitz: f64 = 0.0;
        let mut positivity_failures = 0;
        for _ in 0..trials {
            let mut pair = Vec::with_capacity(2);
            for _ in 0..2 {
                let shape = random_shape(&mut rng, &problem.grid.r, b);
                let frac = rng.random_range(0.2..0.9);
                let scale = frac * ball_radius / norm.norm(&problem.grid, &shape);
                pair.push(shape.iter().map(|v| v * scale).collect::<Vec<f64>>());
            }
            let (n1, n2) = match (map.apply(&pair[0]), map.apply(&pair[1])) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(Error::PositivityLoss { .. }), _) | (_, Err(Error::PositivityLoss { .. })) => {
                    positivity_failures += 1;
                    continue;
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            };
            let dn: Vec<f64> = n1.iter().zip(&n2).map(|(a, b)| a - b).collect();
            let dp: Vec<f64> = pair[0].iter().zip(&pair[1]).map(|(a, b)| a - b).collect();
            lipschitz = lipschitz.max(norm.norm(&problem.grid, &dn) / norm.norm(&problem.grid, &dp));
        }
        if positivity_failures == trials {
            lipschitz = f64::INFINITY;
        }
        rows.push(ContractionRow {
            epsilon: e,
            r_cutoff: g.r_cutoff(),
            nodes: problem.len(),
            ball_radius,
            n0_norm,
            lipschitz,
            self_map: positivity_failures == 0 && n0_norm + lipschitz * ball_radius <= ball_radius,
            positivity_failures,
            inverse_norm: inverse_norm(&problem, b)?,
        });
    }
    let lipschitz_decreasing = rows.iter().all(|r| r.positivity_failures == 0) && rows.windows(2).all(|w| w[1].lipschitz < w[0].lipschitz);
    let finite = rows.iter().all(|r| r.lipschitz.is_finite() && r.lipschitz > 0.0);
    let lipschitz_exponent = if !finite {
        None
    } else if rows.len() >= 4 {
        let mut pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.lipschitz)).collect();
        pts.reverse();
        Some(decay_fit("Lipschitz constant of N", &pts)?.slope)
    } else if rows.len() >= 2 {
        let (a, z) = (&rows[0], &rows[rows.len() - 1]);
        Some((a.lipschitz / z.lipschitz).ln() / (a.epsilon / z.epsilon).ln())
    } else {
        None
    };
    let inv: Vec<f64> = rows.iter().map(|r| r.inverse_norm).collect();
    let inverse_norm_spread = inv.iter().cloned().fold(0.0, f64::max) / inv.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(ContractionReport {
        b,
        exponent,
        c_tilde,
        trials,
        rows,
        lipschitz_decreasing,
        lipschitz_exponent,
        predicted_exponent: params.tau,
        inverse_norm_spread,
    })
}
