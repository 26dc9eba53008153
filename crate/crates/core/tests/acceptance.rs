//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::DVector;

use conifold_lab::analysis::identities::{identity_suite, michelsohn_round_trip, random_points, Injection};
use conifold_lab::analysis::{angular_seeds, balancedness_check, cdlo_decay, chern_ricci_decay, cutoff_volume_decay, log_radii, shell, Sampling};
use conifold_lab::cdlo::{solve_radial_cy, ProfileSettings, RadialProfile};
use conifold_lab::field::ConeField;
use conifold_lab::gluing::{CutoffMetric, GluingParams, TailSource};
use conifold_lab::solver::{
    compact_side_kernel, contraction_diagnostic, fixed_point_solve, inverse_norm, limit_kernel, newton_solve, preglued_problem, synthetic_bump,
    LinearizedProblem, RadialGrid, SolverSettings, SolverSetup,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn timed(limit: Duration, start: Instant, ok: bool, detail: String) -> Outcome {
    let t = start.elapsed();
    check(ok && t < limit, format!("{detail}, {:.2}s (limit {}s)", t.as_secs_f64(), limit.as_secs()))
}

fn michelsohn() -> Outcome {
    let start = Instant::now();
    let c = michelsohn_round_trip(2024, 1000, 1e3, 1.0).map_err(|e| e.to_string())?;
    timed(Duration::from_secs(5), start, c.pass, format!("max error {:.2e} over {} matrices", c.max_residual, c.samples))
}

fn identities() -> Outcome {
    let start = Instant::now();
    let pts = random_points(2024, 100, 0.5, 50.0);
    let checks = identity_suite(&pts, 1.0, Injection::default()).map_err(|e| e.to_string())?;
    let worst = checks.iter().map(|c| format!("{} {:.1e}", c.name, c.max_residual)).collect::<Vec<_>>().join("; ");
    timed(Duration::from_secs(10), start, checks.iter().all(|c| c.pass), worst)
}

fn cdlo(profile: &RadialProfile) -> Outcome {
    let rep = cdlo_decay(profile, &Sampling::default()).map_err(|e| e.to_string())?;
    check((rep.slope + 2.0).abs() <= 0.1, format!("slope {:.4} (expected −2 ± 0.1)", rep.slope))
}

fn cutoff_volume(profile: &Arc<RadialProfile>) -> Outcome {
    let (vol, dev) = cutoff_volume_decay(profile.clone(), &[10.0, 20.0, 40.0, 80.0], &Sampling::default()).map_err(|e| e.to_string())?;
    check(
        (vol.slope + 4.0).abs() <= 0.3 && (dev.slope + 2.0).abs() <= 0.3,
        format!("volume slope {:.4} (−4 ± 0.3), deviation slope {:.4} (−2 ± 0.3)", vol.slope, dev.slope),
    )
}

fn balancedness(profile: &Arc<RadialProfile>) -> Outcome {
    let r_cut = 20.0;
    let field = CutoffMetric::new(r_cut, TailSource::Profile(profile.clone())).map_err(|e| e.to_string())?;
    let seeds = angular_seeds(2024, 10);
    let pts: Vec<_> = log_radii(0.27 * r_cut, 0.46 * r_cut, 5).into_iter().flat_map(|r| shell(&seeds, r)).collect();
    let rep = balancedness_check(&field, &pts, 1e-2).map_err(|e| e.to_string())?;
    check(rep.pass && pts.len() == 50, format!("{} points, ratio ∈ [{:.3}, {:.3}]", pts.len(), rep.min_ratio, rep.max_ratio))
}

fn chern_ricci(profile: &Arc<RadialProfile>) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (lambda0, p, q) in [(2.0, 1.0, 0.25), (0.5, 1.0, 1.0)] {
        let g = GluingParams { lambda0, p, q, ..Default::default() };
        let rep = chern_ricci_decay(&g, profile.clone(), &[32.0, 64.0, 128.0, 256.0], &Sampling::default()).map_err(|e| e.to_string())?;
        ok &= (rep.slope - g.m_tilde()).abs() <= 0.3;
        detail.push(format!("({lambda0}, {p}, {q}): slope {:.4} vs m̃ = {}", rep.slope, g.m_tilde()));
    }
    check(ok, detail.join("; "))
}

fn solver(tail: &TailSource) -> Outcome {
    let base = preglued_problem(&GluingParams::default(), tail.clone(), &SolverSetup::default()).map_err(|e| e.to_string())?;
    let n = base.len();
    let settings = SolverSettings { b: 0.5, ..Default::default() };
    let zero = fixed_point_solve(&base.clone().with_f(vec![0.0; n]).map_err(|e| e.to_string())?, &settings).map_err(|e| e.to_string())?;
    let zero_ok = zero.iterations == 1 && zero.psi.values.iter().all(|v| *v == 0.0);
    let bump = synthetic_bump(&base.grid, 0.05, 0.2, 0.7);
    let p = base.with_f(bump).map_err(|e| e.to_string())?;
    let res = fixed_point_solve(&p, &settings).map_err(|e| e.to_string())?;
    let (newton, _) = newton_solve(&p, 1e-10, 30).map_err(|e| e.to_string())?;
    let diff = newton.iter().zip(&res.psi.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let bump_ok = res.iterations <= 30 && res.residual < 1e-8;
    // Δr^a = a(a+4)r^{a−2} on the cone, second order in the grid spacing
    let a = 1.5;
    let err = |n: usize| -> Result<f64, String> {
        let grid = RadialGrid::new(0.1, 1.0, n, 0.8).map_err(|e| e.to_string())?;
        let p = LinearizedProblem::assemble(&ConeField, grid, &angular_seeds(5, 1)[0]).map_err(|e| e.to_string())?;
        let u: Vec<f64> = p.grid.r.iter().map(|r| r.powf(a)).collect();
        let lu = &p.laplacian_matrix() * DVector::from_vec(u);
        Ok((1..n - 1).map(|i| (lu[i] - a * (a + 4.0) * p.grid.r[i].powf(a - 2.0)).abs() / p.grid.r[i].powf(a - 2.0)).fold(0.0, f64::max))
    };
    let (e1, e2) = (err(65)?, err(129)?);
    let oracle_ok = e1 < 1e-2 && (e1 / e2 - 4.0).abs() < 0.3;
    check(
        zero_ok && bump_ok && oracle_ok,
        format!(
            "f ≡ 0: {} iteration(s); bump: {} iterations, residual {:.2e}, Newton gap {:.1e}; Laplacian error ratio {:.3}",
            zero.iterations,
            res.iterations,
            res.residual,
            diff,
            e1 / e2
        ),
    )
}

fn invertibility(tail: &TailSource) -> Outcome {
    let setup = SolverSetup::default();
    let mut ok = true;
    let mut detail = Vec::new();
    for b in [0.5, 1.5] {
        let mut vals = Vec::new();
        for epsilon in [0.2, 0.1, 0.05] {
            let g = GluingParams { epsilon, b, ..Default::default() };
            let p = preglued_problem(&g, tail.clone(), &setup).map_err(|e| e.to_string())?;
            vals.push(inverse_norm(&p, b).map_err(|e| e.to_string())?);
        }
        let spread = vals.iter().cloned().fold(0.0, f64::max) / vals.iter().cloned().fold(f64::INFINITY, f64::min);
        ok &= spread < 2.0;
        detail.push(format!("b = {b}: spread {spread:.4}"));
    }
    let g = GluingParams { epsilon: 0.05, ..Default::default() };
    let k1 = limit_kernel(&preglued_problem(&g, tail.clone(), &setup).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let k2 = compact_side_kernel(&g, &setup).map_err(|e| e.to_string())?;
    ok &= k1.pass && k2.pass;
    detail.push(format!("kernel dimension {} / {} (without evaluation term {})", k1.kernel_dimension, k2.kernel_dimension, k1.control_kernel_dimension));
    check(ok, detail.join("; "))
}

fn contraction(tail: &TailSource) -> Outcome {
    let rep = contraction_diagnostic(&GluingParams::default(), tail, &[0.2, 0.1, 0.05], 8, &SolverSetup::default()).map_err(|e| e.to_string())?;
    let lips = rep.rows.iter().map(|r| format!("{:.3e}", r.lipschitz)).collect::<Vec<_>>().join(" > ");
    check(rep.lipschitz_decreasing, format!("Lipschitz over ε = 0.2, 0.1, 0.05: {lips}"))
}

fn main() {
    let start = Instant::now();
    let profile = Arc::new(solve_radial_cy(&ProfileSettings::default()).expect("radial profile"));
    let tail = TailSource::Profile(profile.clone());
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("Michelsohn round trip", Box::new(michelsohn)),
        ("pointwise identity suite", Box::new(identities)),
        ("CdLO decay", Box::new(|| cdlo(&profile))),
        ("improved volume decay", Box::new(|| cutoff_volume(&profile))),
        ("balancedness", Box::new(|| balancedness(&profile))),
        ("Chern-Ricci potential rate", Box::new(|| chern_ricci(&profile))),
        ("solver", Box::new(|| solver(&tail))),
        ("uniform invertibility", Box::new(|| invertibility(&tail))),
        ("contraction trend", Box::new(|| contraction(&tail))),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(d) => println!("PASS {}. {name}: {d}", k + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {}. {name}: {d}", k + 1);
            }
        }
    }
    let total = start.elapsed();
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), total.as_secs_f64());
    if failed > 0 || total > Duration::from_secs(300) {
        std::process::exit(1);
    }
}
