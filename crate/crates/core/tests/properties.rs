mod common;

use approx::assert_relative_eq;
use common::{affine, has_lift, planted, rng};
use num_traits::Zero;
use oscillift::lift::{self, Branch, SolveOptions};
use oscillift::oracle::{
    exact_moments, exact_recurrence_oracle, forced_head, gauss_quadrature, k_general_constraints, quadrature_orthogonality,
};
use oscillift::oscillator::{
    algebras_equal, dimension_check, hamiltonian_spectrum, verify_algebra_relations, DimensionVerdict, OscillatorTruncation,
};
use oscillift::rational::{int, ratio, to_f64, Rational};
use oscillift::records::{FamilyRecord, SolutionRecord};
use oscillift::{CaseTag, Definiteness, PeriodicRecurrence};
use proptest::prelude::*;

fn small() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn positive() -> impl Strategy<Value = Rational> {
    (1i64..=8, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn family_k(k: usize) -> impl Strategy<Value = PeriodicRecurrence> {
    (prop::collection::vec(small(), k + 2), prop::collection::vec(positive(), k + 1))
        .prop_map(move |(b, g)| PeriodicRecurrence::new(k, b, g, Definiteness::Positive).unwrap())
}

fn family() -> impl Strategy<Value = PeriodicRecurrence> {
    (1usize..=4).prop_flat_map(family_k)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coefficients_are_periodic(p in family(), n in 0usize..40) {
        let (k, h) = (p.k(), p.head());
        prop_assert_eq!(p.beta(n + h + k), p.beta(n + h));
        prop_assert_eq!(p.gamma(n + h + k).unwrap(), p.gamma(n + h).unwrap());
    }

    #[test]
    fn evaluation_matches_coefficient_vector(p in family(), n in 0usize..10, x in small()) {
        let c = p.coefficient_vector(n);
        let horner = c.iter().rev().fold(Rational::zero(), |acc, ci| acc * &x + ci);
        prop_assert_eq!(p.eval_monic_exact(n, &x), horner);
        let f = p.eval_monic(n, to_f64(&x));
        let exact = to_f64(&p.eval_monic_exact(n, &x));
        prop_assert!((f - exact).abs() <= 1e-9 * exact.abs().max(1.0));
    }

    #[test]
    fn jacobi_matrix_is_tridiagonal_recurrence(p in family(), dim in 2usize..20) {
        let j = p.jacobi_matrix(dim).unwrap().to_dense();
        for r in 0..dim {
            prop_assert_eq!(j[(r, r)], p.beta_f64(r));
            if r + 1 < dim {
                prop_assert_eq!(j[(r, r + 1)], 1.0);
                prop_assert_eq!(j[(r + 1, r)], p.gamma_f64(r + 1));
            }
        }
    }

    #[test]
    fn orthonormal_scaling(p in family(), x in -3.0f64..3.0) {
        let sym = p.symmetrize().unwrap();
        let phi = sym.orthonormal_values(12, x);
        for (n, ph) in phi.iter().enumerate() {
            let lhs = sym.alpha(n) * ph;
            let rhs = p.eval_monic(n, x);
            prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0), "n={n}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn quadrature_gram_is_identity(p in family()) {
        let g = quadrature_orthogonality(&p, 15).unwrap();
        prop_assert!(g.offdiag <= 1e-10 && g.diag_dev <= 1e-10, "{g:?}");
    }

    #[test]
    fn quadrature_reproduces_exact_moments(p in family()) {
        let rule = gauss_quadrature(&p, 16).unwrap();
        for (k, mu) in exact_moments(&p, 15).iter().enumerate() {
            let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
            let scale: f64 = rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * x.abs().powi(k as i32)).sum();
            prop_assert!((q - to_f64(mu)).abs() <= 1e-11 * scale.max(1.0), "moment {k}: {q} vs {mu}");
        }
    }

    #[test]
    fn oscillator_relations_and_spectrum(p in family()) {
        let t = OscillatorTruncation::build(&p, 64).unwrap();
        let rel = verify_algebra_relations(&t).unwrap();
        prop_assert!(rel.max() <= 1e-13, "{rel:?}");
        let h = t.hamiltonian();
        for n in 0..63 {
            prop_assert!((h[(n, n)] - t.hamiltonian_diag[n]).abs() <= 1e-12 * t.hamiltonian_diag[n]);
        }
    }

    #[test]
    fn non_constant_gamma_gives_infinite_algebra(p in family()) {
        prop_assert_eq!(dimension_check(&p).unwrap(), DimensionVerdict::Infinite);
    }

    #[test]
    fn family_records_round_trip(p in family()) {
        let text = serde_json::to_string(&FamilyRecord::of(&p)).unwrap();
        let back: FamilyRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_family().unwrap(), p);
    }

    #[test]
    fn classification_inverts_kappa(n in 1i64..40, d in 1i64..40, a1 in small()) {
        prop_assume!(!a1.is_zero());
        let a1f = to_f64(&a1);
        let kappa = n as f64 / d as f64;
        let a2 = kappa * a1f * a1f;
        match theorem(a1f, a2) {
            Branch::III { lambda } => {
                prop_assert!(lambda.abs() < 1.0);
                prop_assert!((lambda / (1.0 + lambda).powi(2) - kappa).abs() <= 1e-10 * kappa.max(1.0));
            }
            Branch::IV { theta } => {
                let c = (theta / 2.0).cos();
                prop_assert!((1.0 / (4.0 * c * c) - kappa).abs() <= 1e-10 * kappa.max(1.0));
            }
            Branch::II => prop_assert!((kappa - 0.25).abs() <= 1e-9),
            Branch::I => prop_assert!(false),
        }
    }
}

fn theorem(a1: f64, a2: f64) -> Branch {
    lift::theorem11_classify(a1, a2).unwrap()
}

fn first_admissible(p: &common::Planted) -> Vec<oscillift::LiftSolution> {
    let opts = SolveOptions::default();
    let f = &p.family;
    let all = match p.case {
        CaseTag::I => vec![lift::solve_case_i(f, &opts).unwrap()],
        CaseTag::II => vec![lift::solve_case_ii(f, &opts).unwrap()],
        CaseTag::III => lift::solve_case_iii(f, &opts).unwrap(),
        CaseTag::IV => lift::solve_case_iv(f, &opts).unwrap(),
        CaseTag::V => lift::solve_case_v(f, p.param.unwrap(), &opts).unwrap(),
        CaseTag::VI => lift::solve_case_vi(f, p.param.unwrap(), &opts).unwrap(),
        CaseTag::VII | CaseTag::VIII => lift::solve_case_vii_viii(f, p.param.unwrap(), &opts).unwrap(),
    };
    all.into_iter().filter(|s| s.admissible).collect()
}

#[test]
fn lift_invariants_on_planted_families() {
    let mut r = rng(11);
    for case in CaseTag::ALL {
        for _ in 0..4 {
            let p = planted(&mut r, case);
            for s in first_admissible(&p) {
                let q = &s.q_family;
                assert!(algebras_equal(&p.family, q), "case {case}");
                for n in 3..20 {
                    assert_eq!(q.beta(n), p.family.beta(n), "case {case}: β̃_{n}");
                }
                assert!(lift::admissibility_check(&p.family, &s.a1));
                if case != CaseTag::I && case != CaseTag::II {
                    let kappa = s.constants.kappa.clone().unwrap();
                    assert_eq!(&s.a2, &(&kappa * &s.a1 * &s.a1), "case {case}: κ");
                }
                let branch = s.branch().unwrap();
                assert_eq!(branch.name(), case.branch_name(), "case {case}");
                match branch {
                    Branch::III { lambda } => assert_relative_eq!(lambda, p.param.unwrap(), max_relative = 1e-10),
                    Branch::IV { theta } => assert_relative_eq!(theta, p.param.unwrap(), max_relative = 1e-10),
                    _ => {}
                }
                if s.exact {
                    let back = SolutionRecord::of(&s).to_solution().unwrap();
                    assert_eq!(back, s);
                }
            }
        }
    }
}

#[test]
fn affine_maps_carry_lifts() {
    let mut r = rng(5);
    for case in [CaseTag::I, CaseTag::III, CaseTag::IV, CaseTag::V, CaseTag::VI, CaseTag::VII, CaseTag::VIII] {
        let p = planted(&mut r, case);
        let (a1, a2) = p.a.clone().unwrap();
        for (s, t) in [(ratio(2, 1), ratio(1, 3)), (ratio(-3, 2), ratio(-1, 1))] {
            let q = affine(&p.family, &s, &t);
            assert!(has_lift(&q, &(&s * &a1), &(&s * &s * &a2)), "case {case}");
        }
    }
}

#[test]
fn wrong_parameters_fail_the_oracle_early() {
    let mut r = rng(13);
    for case in CaseTag::ALL {
        let p = planted(&mut r, case);
        let (a1, a2) = p.a.clone().unwrap_or((int(0), int(1)));
        for (da1, da2) in [(ratio(1, 7), int(0)), (int(0), ratio(1, 5)), (ratio(-2, 3), ratio(3, 4))] {
            let (b1, b2) = (&a1 + &da1, &a2 + &da2);
            if b2.is_zero() {
                continue;
            }
            let head = forced_head(&p.family, &b1, &b2).map(|h| h.beta_tilde).unwrap_or([int(0), int(0), int(0)]);
            let out = exact_recurrence_oracle(&p.family, &b1, &b2, (&head[0], &head[1]), 6);
            assert!(out.is_err(), "case {case}: ({b1}, {b2}) survived to degree 6");
        }
    }
}

#[test]
fn k_general_conditions_hold_for_planted_lifts() {
    let mut r = rng(17);
    for case in [CaseTag::I, CaseTag::III, CaseTag::IV, CaseTag::VII] {
        let p = planted(&mut r, case);
        let (a1, a2) = p.a.clone().unwrap();
        let report = k_general_constraints(&p.family, &[a1, a2], 2).unwrap();
        assert!(report.all_pass(), "case {case}: {report:?}");
    }
}

#[test]
fn spectrum_matches_closed_form() {
    let mut r = rng(19);
    for _ in 0..10 {
        let p = common::random_positive_family(&mut r);
        let t = OscillatorTruncation::build(&p, 64).unwrap();
        let s = hamiltonian_spectrum(&t);
        assert!(s.max_rel_dev <= 1e-12, "{}", s.max_rel_dev);
    }
}
