use fongtsui::cli::io::{matrix_json, parse_matrix, to_csv};
use fongtsui::cli::report::analyze;
use fongtsui::conjecture::verdict;
use fongtsui::generators::{gaussian, generate, ClassKind, ClassSpec};
use fongtsui::linalg::{
    c64, hermitian_eig, kernel, loewner_leq, projector, psd_sqrt, range_closure, spectral_norm, svd, ComplexMatrix,
    Tolerances,
};
use fongtsui::props::{douglas_factor, fong_tsui_check, operator_functions};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn draw(seed: u64, rows: usize, cols: usize) -> ComplexMatrix {
    gaussian(&mut ChaCha8Rng::seed_from_u64(seed), rows, cols)
}

/// Rank-deficient for `rank < min(rows, cols)`.
fn low_rank(seed: u64, rows: usize, cols: usize, rank: usize) -> ComplexMatrix {
    &draw(seed, rows, rank) * &draw(seed ^ 0x9e37_79b9, rank, cols)
}

fn contraction(seed: u64, n: usize) -> ComplexMatrix {
    generate(&ClassSpec::new(ClassKind::Contraction, n, seed)).unwrap()
}

fn unitary(seed: u64, n: usize) -> ComplexMatrix {
    generate(&ClassSpec::new(ClassKind::Unitary, n, seed)).unwrap()
}

fn is_unitary_cols(u: &ComplexMatrix) -> bool {
    u.gram().dist_fro(&ComplexMatrix::identity(u.cols())) < 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs(seed: u64, rows in 1usize..9, cols in 1usize..9, rank in 1usize..9) {
        let a = low_rank(seed, rows, cols, rank.min(rows).min(cols));
        let s = svd(&a, &tol()).unwrap();
        prop_assert!(is_unitary_cols(&s.u) && is_unitary_cols(&s.v));
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let rebuilt = &(&s.u * &ComplexMatrix::from_real_diagonal(&s.singular_values)) * &s.v.adjoint();
        prop_assert!(rebuilt.dist_fro(&a) <= 1e-12 * a.norm_fro().max(1.0));
    }

    #[test]
    fn psd_sqrt_squares_back(seed: u64, n in 1usize..9, rank in 1usize..9) {
        let g = low_rank(seed, n, n, rank.min(n));
        let a = g.gram().hermitian_part();
        let r = psd_sqrt(&a, &tol()).unwrap();
        prop_assert!(r.asymmetry_fro() <= 1e-12 * a.norm_fro().max(1.0));
        prop_assert!((&r * &r).dist_fro(&a) <= 1e-9 * a.norm_fro().max(1.0));
        prop_assert!(hermitian_eig(&r, &tol()).unwrap().min_eigenvalue().unwrap() >= -1e-12);
    }

    #[test]
    fn kernel_and_range_of_adjoint_are_complements(seed: u64, rows in 1usize..9, cols in 1usize..9, rank in 1usize..9) {
        let a = low_rank(seed, rows, cols, rank.min(rows).min(cols));
        let k = kernel(&a, &tol()).unwrap();
        let r = range_closure(&a.adjoint(), &tol()).unwrap();
        prop_assert_eq!(k.dim() + r.dim(), cols);
        prop_assert!(k.equals(&r.complement(&tol()).unwrap(), &tol()).unwrap());
        prop_assert!((&a * k.basis()).norm_fro() <= 1e-10 * a.norm_fro().max(1.0));
    }

    #[test]
    fn projectors_are_orthogonal_idempotents(seed: u64, rows in 1usize..9, cols in 1usize..9) {
        let p = projector(&range_closure(&draw(seed, rows, cols), &tol()).unwrap());
        prop_assert!((&p * &p).dist_fro(&p) < 1e-12);
        prop_assert!(p.asymmetry_fro() < 1e-12);
    }

    #[test]
    fn loewner_order_is_reflexive_and_transitive(seed: u64, n in 1usize..9) {
        let a = draw(seed, n, n).hermitian_part();
        let step = |s: u64| draw(s, n, n).gram().hermitian_part();
        let b = &a + &step(seed.wrapping_add(1));
        let c = &b + &step(seed.wrapping_add(2));
        prop_assert!(loewner_leq(&a, &a, &tol()).unwrap().holds);
        prop_assert!(loewner_leq(&a, &b, &tol()).unwrap().holds);
        prop_assert!(loewner_leq(&b, &c, &tol()).unwrap().holds);
        prop_assert!(loewner_leq(&a, &c, &tol()).unwrap().holds);
    }

    #[test]
    fn condition_is_unitarily_invariant(seed: u64, n in 2usize..8) {
        let t = contraction(seed, n);
        let u = unitary(seed.wrapping_add(7), n);
        let conj = &(&u * &t) * &u.adjoint();
        let (a, b) = (fong_tsui_check(&t, &tol()).unwrap(), fong_tsui_check(&conj, &tol()).unwrap());
        prop_assert!((a.fong_tsui_defect - b.fong_tsui_defect).abs() < 1e-10);
        prop_assert_eq!(a.fong_tsui_holds, b.fong_tsui_holds);
    }

    #[test]
    fn defect_scales_linearly(seed: u64, n in 2usize..8, c in 0.1f64..10.0) {
        let t = contraction(seed, n);
        let a = fong_tsui_check(&t, &tol()).unwrap();
        let b = fong_tsui_check(&t.scale(c), &tol()).unwrap();
        prop_assert!((b.fong_tsui_defect - c * a.fong_tsui_defect).abs() < 1e-10 * c.max(1.0));
    }

    #[test]
    fn hermitian_matrices_satisfy_both_conditions(seed: u64, n in 1usize..9) {
        let h = draw(seed, n, n).hermitian_part();
        let c = fong_tsui_check(&h, &tol()).unwrap();
        prop_assert!(c.fong_tsui_holds && c.fong_istratescu_holds && c.self_adjoint);
    }

    #[test]
    fn real_part_of_a_contraction_is_a_contraction(seed: u64, n in 1usize..9) {
        let t = contraction(seed, n);
        let f = operator_functions(&t, &tol()).unwrap();
        prop_assert!(spectral_norm(&f.real_part) <= 1.0 + 1e-12);
        prop_assert!(spectral_norm(&f.abs_real_part) <= 1.0 + 1e-12);
    }

    #[test]
    fn douglas_factor_matches_condition(seed: u64, n in 1usize..9, hermitian: bool) {
        let t = if hermitian { contraction(seed, n).hermitian_part() } else { contraction(seed, n) };
        let d = douglas_factor(&t, &tol()).unwrap();
        let c = fong_tsui_check(&t, &tol()).unwrap();
        prop_assert_eq!(d.certifies_condition(), c.fong_tsui_holds);
    }

    #[test]
    fn verdict_is_sound_and_certified(seed: u64, n in 1usize..9, hermitian: bool) {
        let t = if hermitian { contraction(seed, n).hermitian_part() } else { contraction(seed, n) };
        let v = verdict(&t, &tol()).unwrap();
        prop_assert!(v.soundness_violation.is_none());
        prop_assert_eq!(v.condition.fong_tsui_holds, v.self_adjoint);
        if v.condition.fong_tsui_holds {
            prop_assert!(!v.certificates.is_empty());
        }
    }

    #[test]
    fn analysis_is_deterministic(seed: u64, n in 1usize..6) {
        let t = contraction(seed, n);
        let raw = matrix_json(&t);
        let run = || serde_json::to_string(&analyze(raw.as_bytes(), &t, &[1, 2], &tol(), false).unwrap()).unwrap();
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn matrix_files_round_trip(entries in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..30), cols in 1usize..6) {
        let rows = entries.len().div_ceil(cols);
        let data: Vec<_> = (0..rows * cols).map(|k| entries.get(k).map_or(c64(0.0, 0.0), |&(re, im)| c64(re, im))).collect();
        let m = ComplexMatrix::from_row_major(rows, cols, data).unwrap();
        prop_assert_eq!(parse_matrix(matrix_json(&m).as_bytes()).unwrap(), m.clone());
        prop_assert_eq!(parse_matrix(to_csv(&m).as_bytes()).unwrap(), m);
    }
}
