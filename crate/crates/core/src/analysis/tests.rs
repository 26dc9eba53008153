use std::sync::{Arc, OnceLock};

use super::*;
use crate::cdlo::{solve_radial_cy, ProfileSettings};
use crate::conifold::slow_term;
use crate::field::{CdloField, ConeField, FnField};
use crate::gluing::scalar_profiles;

fn profile() -> Arc<RadialProfile> {
    static P: OnceLock<Arc<RadialProfile>> = OnceLock::new();
    P.get_or_init(|| Arc::new(solve_radial_cy(&ProfileSettings::default()).unwrap())).clone()
}

#[test]
fn seeds_are_deterministic() {
    assert_eq!(angular_seeds(3, 5), angular_seeds(3, 5));
    assert_ne!(angular_seeds(3, 5), angular_seeds(4, 5));
    let r = log_radii(1.0, 100.0, 3);
    assert!((r[1] - 10.0).abs() < 1e-12 && (r[2] - 100.0).abs() < 1e-12);
}

#[test]
fn exterior_derivative_of_known_form() {
    // ω = (1 + Re u)·I has ω² = 2(1 + Re u)² I and |∂_u| of the coefficient is 2(1 + Re u)
    let field = FnField { name: "scaled identity".into(), f: |p: &ChartPoint| Ok(HermitianMatrixForm::identity().scale(1.0 + p.u.re)) };
    let pt = ChartPoint::new(Complex64::new(0.2, 0.1), Complex64::new(0.3, -0.2), Complex64::new(0.5, 0.4));
    let res = exterior_derivative_residual(&field, &pt, 1e-3).unwrap();
    assert!((res - 2.0 * 1.3).abs() < 1e-6, "{res}");
    let (d32, d23) = exterior_derivative(&field, &pt, 1e-3).unwrap();
    assert_eq!((d32.bidegree(), d23.bidegree()), ((3, 2), (2, 3)));
    assert!(d32.coefficient(&[0, 1, 2], &[1, 2]).norm() > 1.0);
}

#[test]
fn cone_and_cdlo_are_balanced() {
    let seeds = angular_seeds(1, 4);
    for r in [2.0, 20.0] {
        for p in shell(&seeds, r) {
            let cone = refinement_sample(&ConeField, &p, 2e-2).unwrap();
            assert!(cone.coarse < 1e-2 * cone_metric(&p).unwrap().to_two_two().max_abs());
            assert!((cone.ratio - 4.0).abs() < 0.8, "{cone:?}");
            let cd = refinement_sample(&CdloField::new(profile()), &p, 2e-2).unwrap();
            assert!((cd.ratio - 4.0).abs() < 0.8, "{cd:?}");
        }
    }
}

#[test]
fn cutoff_metric_is_balanced_but_control_is_not() {
    let r_cut = 20.0;
    let field = CutoffMetric::new(r_cut, TailSource::Profile(profile())).unwrap();
    let seeds = angular_seeds(2, 3);
    let pts: Vec<_> = [0.28, 0.33, 0.38, 0.45].iter().flat_map(|&x| shell(&seeds, x * r_cut)).collect();
    let rep = balancedness_check(&field, &pts, 1e-2).unwrap();
    assert!(rep.pass, "{:?}", (rep.min_ratio, rep.max_ratio));
    // ω_co,0 + γ²S: squaring does not commute with the cut-off
    let control = FnField {
        name: "gamma-squared control".into(),
        f: move |p: &ChartPoint| {
            let g = scalar_profiles(radius(p)?, r_cut).gamma;
            Ok(cone_metric(p)?.add(&slow_term(p)?.scale(g * g)))
        },
    };
    // away from the inner plateau, where γ² ≈ γ
    let bad = balancedness_check(&control, &pts[3..], 1e-2).unwrap();
    assert!(!bad.pass);
    assert!(bad.samples.iter().all(|s| s.ratio < 1.5), "{:?}", bad.max_ratio);
    assert!(!bad.warnings.is_empty());
}

#[test]
fn chern_ricci_normalization() {
    let seeds = angular_seeds(5, 6);
    for p in shell(&seeds, 7.0) {
        assert!(chern_ricci_potential(&ConeField, &p).unwrap().abs() < 1e-13);
        assert!(chern_ricci_potential(&CdloField::new(profile()), &p).unwrap().abs() < 1e-10);
    }
    let field = CutoffMetric::new(16.0, TailSource::Profile(profile())).unwrap();
    for p in shell(&seeds, 5.0) {
        let a = chern_ricci_potential(&field, &p).unwrap();
        let b = chern_ricci_from_square(&field.squared(&p).unwrap(), &p).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn singular_side_rate() {
    let params = GluingParams { lambda0: 1.5, amplitude: 0.2, ..Default::default() };
    let rep = singular_side_decay(&params, &[0.2, 0.1, 0.05, 0.025, 0.0125], &Sampling { shells: 9, directions: 4, ..Default::default() }).unwrap();
    assert!(rep.pass.unwrap(), "{rep:?}");
}

#[test]
fn cdlo_rate() {
    let rep = cdlo_decay(&profile(), &Sampling { shells: 8, directions: 4, ..Default::default() }).unwrap();
    assert!(rep.pass.unwrap(), "{rep:?}");
    let json = to_json(&rep);
    assert!(json.contains("\"slope\""));
    assert_eq!(json, to_json(&cdlo_decay(&profile(), &Sampling { shells: 8, directions: 4, ..Default::default() }).unwrap()));
}

#[test]
fn primitivity_of_cutoff_deviation() {
    // trace/deviation falls like log r/r², i.e. two orders faster than the deviation
    let ratio = |r_cut: f64| {
        let field = CutoffMetric::new(r_cut, TailSource::Profile(profile())).unwrap();
        let pts = shell(&angular_seeds(9, 4), 0.35 * r_cut);
        primitivity_scan(&field, &pts).unwrap().iter().map(|s| s.trace.abs() / s.deviation).fold(0.0, f64::max)
    };
    let (a, b) = (ratio(40.0), ratio(160.0));
    assert!(a < 0.1 && b < a / 6.0, "{a} {b}");
}

#[test]
fn csv_outputs() {
    let csv = samples_csv("r,value", &[(1.0, 2.0), (3.0, 4.0)]);
    assert_eq!(csv.lines().count(), 3);
    let rs = ResidualSample { point: [0.0; 6], quantity: "d".into(), residual: 1e-3, step: 1e-2 };
    assert_eq!(residual_samples_csv(&[rs]).lines().nth(1).unwrap().split(',').count(), 9);
}
