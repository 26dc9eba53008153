use std::sync::{Arc, OnceLock};

use super::*;
use crate::cdlo::{solve_radial_cy, ProfileSettings, RadialProfile};
use crate::conifold::{cone_metric, radial_hessian, AdaptedFrame, Jet};
use crate::error::Error;
use crate::field::{ConeField, MetricField};
use crate::forms::TwoTwoMatrixForm;
use crate::gluing::CutoffMetric;
use crate::testing::fd_ddbar_one_one;

fn profile() -> Arc<RadialProfile> {
    static P: OnceLock<Arc<RadialProfile>> = OnceLock::new();
    P.get_or_init(|| Arc::new(solve_radial_cy(&ProfileSettings::default()).unwrap())).clone()
}

fn tail() -> TailSource {
    TailSource::Profile(profile())
}

fn default_problem() -> LinearizedProblem {
    static P: OnceLock<LinearizedProblem> = OnceLock::new();
    P.get_or_init(|| preglued_problem(&GluingParams::default(), tail(), &SolverSetup::default()).unwrap()).clone()
}

fn rel(a: &TwoTwoMatrixForm, b: &TwoTwoMatrixForm) -> f64 {
    a.sub(b).max_abs() / b.max_abs()
}

#[test]
fn ansatz_trivial_cases() {
    let field = CutoffMetric::new(20.0, tail()).unwrap();
    let pt = angular_seeds(3, 1)[0].with_radius(7.0).unwrap();
    let terms = AnsatzTerms::at(&field, &pt).unwrap();
    assert_eq!(perturbed_square(&field, &pt, Jet::constant(0.0)).unwrap(), field.square(&pt).unwrap());
    // constant ψ: only the torsion term i∂∂̄ω survives, checked against an independent stencil
    let oracle = fd_ddbar_one_one(&|q| field.metric(q).unwrap(), &pt, 1e-4);
    assert!(rel(&terms.a[0], &oracle) < 1e-5, "{}", rel(&terms.a[0], &oracle));
    let c = 0.3;
    let sq = perturbed_square(&field, &pt, Jet::constant(c)).unwrap();
    assert!(rel(&sq, &field.square(&pt).unwrap().add(&oracle.scale(c))) < 1e-6);
}

#[test]
fn ansatz_on_kahler_field() {
    // dω = 0: i∂∂̄(ψω) = i∂∂̄ψ ∧ ω
    for r in [0.3, 2.0] {
        let pt = angular_seeds(4, 1)[0].with_radius(r).unwrap();
        let terms = AnsatzTerms::at(&ConeField, &pt).unwrap();
        let cone = cone_metric(&pt).unwrap();
        let a1 = TwoTwoMatrixForm::wedge_of(&radial_hessian(&pt, Jet::new(0.0, 1.0, 0.0)), &cone);
        let a2 = TwoTwoMatrixForm::wedge_of(&radial_hessian(&pt, Jet::new(0.0, 0.0, 1.0)), &cone);
        assert!(rel(&terms.a[1], &a1) < 1e-8, "{}", rel(&terms.a[1], &a1));
        assert!(rel(&terms.a[2], &a2) < 1e-12);
        assert!(terms.a[0].max_abs() < 1e-8 * terms.sigma.max_abs() / (r * r));
    }
}

#[test]
fn positivity_violation_names_radius() {
    let pt = angular_seeds(4, 1)[0].with_radius(0.5).unwrap();
    match perturbed_square(&ConeField, &pt, Jet::new(0.0, 0.0, -100.0)) {
        Err(Error::PositivityLoss { r, .. }) => assert!((r - 0.5).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

fn cone_problem(n: usize) -> LinearizedProblem {
    let grid = RadialGrid::new(0.1, 1.0, n, 0.8).unwrap();
    LinearizedProblem::assemble(&ConeField, grid, &angular_seeds(5, 1)[0]).unwrap()
}

#[test]
fn cone_laplacian_oracle() {
    // Δ r^a = a(a+4) r^{a-2} for the six-dimensional cone
    let a = 1.5;
    let err = |n: usize| {
        let p = cone_problem(n);
        let u: Vec<f64> = p.grid.r.iter().map(|r| r.powf(a)).collect();
        let lu = &p.laplacian_matrix() * nalgebra::DVector::from_vec(u);
        (1..n - 1).map(|i| (lu[i] - a * (a + 4.0) * p.grid.r[i].powf(a - 2.0)).abs() / p.grid.r[i].powf(a - 2.0)).fold(0.0, f64::max)
    };
    let (e1, e2) = (err(65), err(129));
    assert!(e1 < 1e-2 && (e1 / e2 - 4.0).abs() < 0.3, "{e1} {e2}");
}

#[test]
fn cone_coefficients_and_constants() {
    let p = cone_problem(64);
    for n in &p.nodes {
        assert!((n.coeff[2] - 1.0 / 12.0).abs() < 1e-8);
        assert!((n.coeff[1] * n.r - 5.0 / 12.0).abs() < 1e-8);
    }
    assert!(p.f.iter().all(|f| f.abs() < 1e-13));
    let ones = nalgebra::DVector::from_element(64, 1.0);
    let l1 = &p.linearized_matrix() * ones;
    assert!(l1.iter().all(|v| (v - 1.0).abs() < 1e-6), "{}", l1.amax());
}

#[test]
fn linearization_consistency() {
    let p = default_problem();
    let shape: Vec<f64> = p.grid.r.iter().map(|r| 1e-4 * (r.ln() * 0.7).sin() * r.sqrt()).collect();
    let lpsi = p.apply_l(&shape);
    let defect = |t: f64| {
        let scaled: Vec<f64> = shape.iter().map(|v| t * v).collect();
        let (fm1, _) = p.volume_terms(&scaled).unwrap();
        fm1.iter().zip(&lpsi).map(|(a, l)| (a / t - l).abs()).fold(0.0, f64::max)
    };
    let (d1, d2) = (defect(1.0), defect(0.5));
    assert!((d1 / d2 - 2.0).abs() < 0.05, "{d1} {d2}");
}

#[test]
fn zero_potential_gives_zero() {
    let p = default_problem();
    let n = p.len();
    let p = p.with_f(vec![0.0; n]).unwrap();
    let res = fixed_point_solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(res.iterations, 1);
    assert!(res.psi.values.iter().all(|v| *v == 0.0));
}

#[test]
fn first_iterate_bounded_by_data() {
    let p = default_problem();
    let b = GluingParams::default().b;
    let map = FixedPointMap::new(&p).unwrap();
    let n0 = WeightedNorm::solution(b).unwrap().norm(&p.grid, &map.apply(&vec![0.0; p.len()]).unwrap());
    let f_norm = WeightedNorm::data(b).unwrap().norm(&p.grid, &p.f);
    let c = inverse_norm(&p, b).unwrap();
    assert!(n0 > 0.0 && n0 <= 1.01 * c * f_norm, "{n0} {c} {f_norm}");
}

#[test]
fn synthetic_source_converges_and_matches_newton() {
    let p = default_problem();
    let f = synthetic_bump(&p.grid, 0.05, 0.2, 0.7);
    assert!(f.iter().filter(|v| **v == 0.0).count() > p.len() / 2);
    let p = p.with_f(f).unwrap();
    let res = fixed_point_solve(&p, &SolverSettings::default()).unwrap();
    assert!(res.iterations <= 30 && res.residual < 1e-8, "{res:?}");
    assert!(res.trace.windows(2).all(|w| w[1].update_norm < w[0].update_norm));
    let (newton, _) = newton_solve(&p, 1e-10, 30).unwrap();
    let diff = newton.iter().zip(&res.psi.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff < 1e-12 * res.psi.max_abs().max(1e-3), "{diff}");
    // the converged ψ keeps ω_ψ² positive on every node
    assert!(p.volume_terms(&res.psi.values).is_ok());
    let again = fixed_point_solve(&p, &SolverSettings::default()).unwrap();
    assert_eq!(res.trace_csv(), again.trace_csv());
    assert!(res.trace_csv().starts_with("iteration,update_norm,residual\n"));
}

#[test]
fn iteration_cap_is_divergence() {
    let p = default_problem();
    let f = synthetic_bump(&p.grid, 0.05, 0.2, 0.7);
    let p = p.with_f(f).unwrap();
    let settings = SolverSettings { max_iterations: 2, ..Default::default() };
    assert!(matches!(fixed_point_solve(&p, &settings), Err(Error::Divergence { iterations: 2, .. })));
}

#[test]
fn inverse_norm_is_uniform() {
    let setup = SolverSetup::default();
    for b in [0.5, 1.5] {
        let norms: Vec<f64> = [0.2, 0.05]
            .iter()
            .map(|&e| inverse_norm(&preglued_problem(&GluingParams { epsilon: e, ..Default::default() }, tail(), &setup).unwrap(), b).unwrap())
            .collect();
        assert!(norms[0] / norms[1] < 2.0 && norms[1] / norms[0] < 2.0, "{norms:?}");
    }
}

#[test]
fn limit_kernel_is_trivial() {
    let rep = compact_side_kernel(&GluingParams::default(), &SolverSetup::default()).unwrap();
    assert!(rep.pass, "{rep:?}");
    assert_eq!(rep.kernel_dimension, 0);
    assert_eq!(rep.control_kernel_dimension, 1);
}

#[test]
fn contraction_trend() {
    let rep = contraction_diagnostic(&GluingParams::default(), &tail(), &[0.2, 0.1, 0.05], 4, &SolverSetup::default()).unwrap();
    assert!(rep.lipschitz_decreasing, "{rep:?}");
    assert!(rep.rows.iter().all(|r| r.self_map && r.n0_norm <= r.ball_radius));
    assert!(rep.inverse_norm_spread < 2.0);
}

#[test]
fn infeasible_rejected_before_iteration() {
    let bad = GluingParams { lambda0: 2.0, ..Default::default() };
    assert!(matches!(contraction_diagnostic(&bad, &tail(), &[0.1], 1, &SolverSetup::default()), Err(Error::Infeasible(_))));
    assert!(matches!(preglued_problem(&bad, tail(), &SolverSetup::default()), Err(Error::Infeasible(_))));
}

#[test]
fn adapted_frame_of_nodes() {
    let p = cone_problem(64);
    let pt = angular_seeds(5, 1)[0].with_radius(p.nodes[10].r).unwrap();
    let frame = AdaptedFrame::at(&pt).unwrap();
    let sigma = frame.to_adapted_two_two(&cone_metric(&pt).unwrap().to_two_two());
    assert!(sigma.sub(&p.nodes[10].sigma0).max_abs() < 1e-12);
}
