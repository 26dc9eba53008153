use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use conifold_lab::analysis::decay_fit;
use conifold_lab::analysis::identities::random_positive_hermitian;
use conifold_lab::config::parse_key_values;
use conifold_lab::forms::{HermitianMatrixForm, PQForm, TwoTwoMatrixForm};
use conifold_lab::gluing::GluingParams;
use conifold_lab::solver::RadialFunction;

fn subsets(k: usize) -> Vec<Vec<usize>> {
    (0u8..8).filter(|m| m.count_ones() as usize == k).map(|m| (0..3).filter(|i| m & (1 << i) != 0).collect()).collect()
}

/// A random form of bidegree `(p, q)` from a coefficient pool.
fn form(p: usize, q: usize, pool: &[f64]) -> PQForm {
    let mut out = PQForm::zero(p, q).unwrap();
    let mut k = 0;
    for h in subsets(p) {
        for a in subsets(q) {
            let c = Complex64::new(pool[k % pool.len()], pool[(k + 7) % pool.len()]);
            out = out.add(&PQForm::monomial(c, &h, &a)).unwrap();
            k += 1;
        }
    }
    out
}

fn close(a: &PQForm, b: &PQForm) -> bool {
    a.sub(b).unwrap().max_abs() <= 1e-12 * (1.0 + a.max_abs().max(b.max_abs()))
}

fn positive(seed: u64) -> HermitianMatrixForm {
    random_positive_hermitian(&mut ChaCha8Rng::seed_from_u64(seed), 1e3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn michelsohn_root_inverts_squaring(seed in any::<u64>()) {
        let h = positive(seed);
        let back = h.to_two_two().michelsohn_root().unwrap();
        prop_assert!(back.sub(&h).max_abs() < 1e-10 * h.max_abs());
    }

    #[test]
    fn wedge_is_associative(
        d in (0usize..=1, 0usize..=1, 0usize..=1, 0usize..=1, 0usize..=1, 0usize..=1),
        pool in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let (a, b, c) = (form(d.0, d.1, &pool), form(d.2, d.3, &pool[3..]), form(d.4, d.5, &pool[5..]));
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn wedge_is_graded_commutative(
        d in (0usize..=2, 0usize..=2, 0usize..=1, 0usize..=1),
        pool in prop::collection::vec(-2.0f64..2.0, 16),
    ) {
        let (a, b) = (form(d.0, d.1, &pool), form(d.2, d.3, &pool[4..]));
        let sign = if ((d.0 + d.1) * (d.2 + d.3)) % 2 == 0 { 1.0 } else { -1.0 };
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale(Complex64::new(sign, 0.0));
        prop_assert!(close(&ab, &ba));
    }

    #[test]
    fn square_determinant_identity(seed in any::<u64>()) {
        // det(2·adj H) = 8 det(H)²
        let h = positive(seed);
        let d = h.determinant();
        let s = h.to_two_two().determinant();
        prop_assert!((s - 8.0 * d * d).abs() <= 1e-10 * 8.0 * d * d);
    }

    #[test]
    fn matrix_square_matches_exterior_wedge(seed in any::<u64>(), other in any::<u64>()) {
        let (h, g) = (positive(seed), positive(other));
        let via_wedge = TwoTwoMatrixForm::from_pq_form(&h.to_pq_form().wedge(&h.to_pq_form()).unwrap()).unwrap();
        prop_assert!(via_wedge.sub(&h.to_two_two()).max_abs() <= 1e-12 * h.to_two_two().max_abs());
        let mixed = TwoTwoMatrixForm::from_pq_form(&h.to_pq_form().wedge(&g.to_pq_form()).unwrap()).unwrap();
        let polar = TwoTwoMatrixForm::wedge_of(&h, &g);
        prop_assert!(mixed.sub(&polar).max_abs() <= 1e-11 * polar.max_abs());
    }

    #[test]
    fn decay_fit_exact_on_power_laws(k in -6.0f64..6.0, c in 1e-3f64..1e3, r0 in 0.01f64..10.0) {
        let samples: Vec<(f64, f64)> = (0..8).map(|i| { let r = r0 * 1.5f64.powi(i); (r, c * r.powf(k)) }).collect();
        let rep = decay_fit("power law", &samples).unwrap();
        prop_assert!((rep.slope - k).abs() < 1e-10);
        prop_assert!(rep.max_residual < 1e-10);
    }

    #[test]
    fn feasibility_matches_inequality(
        eps in 0.01f64..0.9, p in 0.1f64..3.0, q in 0.1f64..3.0, l in 0.1f64..10.0, b in 0.05f64..1.95, tau in 0.01f64..2.0,
    ) {
        let g = GluingParams { epsilon: eps, p, q, lambda0: l, b, tau, amplitude: 0.01 };
        let m = l.min(4.0 * q / p);
        prop_assert_eq!(g.check_feasible().is_ok(), p * m - q * (b + 2.0) > tau);
        prop_assert!((g.lambda() - eps.powf(2.0 * (p + q))).abs() <= 1e-14 * g.lambda().max(1e-300));
    }

    #[test]
    fn config_parser_never_panics(text in "\\PC*") {
        let _ = parse_key_values(&text);
        let _ = GluingParams::from_config_str(&text);
    }

    #[test]
    fn psi_table_round_trip(values in prop::collection::vec(-1e3f64..1e3, 1..40), r0 in 1e-6f64..1.0) {
        let r: Vec<f64> = (0..values.len()).map(|i| r0 * (1.0 + i as f64)).collect();
        let f = RadialFunction { r, values };
        prop_assert_eq!(RadialFunction::from_table(&f.to_table()).unwrap(), f);
    }
}
