use monadcoh::cohomology::{chern, coh_table, euler_char, hypercoh, ChernData};
use monadcoh::complex::{dualize, restrict, rng_from_seed, tensor_total};
use monadcoh::p1split::{dual_splitting_on_line, splitting_type, Splitting};
use monadcoh::zoo::{self, build, canonicalize_beta, l0_line, BetaShape, FamilyParams};
use monadcoh::{projective, Field, PrimeField, Rationals};
use rand::Rng;

fn f101() -> PrimeField {
    PrimeField::new(101).unwrap()
}

#[test]
fn c32_cohomology_table_over_q() {
    let q = Rationals;
    let z = build(&q, &FamilyParams::with_params("c32", &["1", "0", "0", "1"])).unwrap();
    let t = coh_table(&z.monad, -4, 1).unwrap();
    assert_eq!(t.h(1, -1), Some(2));
    assert_eq!(t.h(1, 0), Some(2));
    assert_eq!(t.h(2, -3), Some(4));
    assert_eq!(t.h(2, -2), Some(1));
    let d = coh_table(&dualize(&z.monad), -3, 0).unwrap();
    assert_eq!(d.h(1, -2), Some(1));
    assert_eq!(d.h(1, -1), Some(4));
}

#[test]
fn c32_table_agrees_with_other_parameters() {
    let f = f101();
    let a = build(&f, &FamilyParams::with_params("c32", &["1", "0", "0", "1"])).unwrap();
    let b = build(&f, &FamilyParams::with_params("c32", &["2", "3", "5", "7"])).unwrap();
    assert_eq!(coh_table(&a.monad, -5, 2).unwrap(), coh_table(&b.monad, -5, 2).unwrap());
}

#[test]
fn c32_rejects_singular_parameters() {
    let f = f101();
    let err = build(&f, &FamilyParams::with_params("c32", &["1", "2", "2", "4"])).unwrap_err();
    assert!(err.to_string().contains("a1*b3 - a3*b1") || err.to_string().contains("determinant"), "{err}");
}

#[test]
fn schwarzenberger_secants_split_as_two_ones_and_minus_two() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c36_schwarzenberger")).unwrap();
    let mut rng = rng_from_seed(3);
    let mut seen = 0;
    while seen < 20 {
        let t = [f.one(), f.from_i64(rng.gen_range(0..101))];
        let u = [f.one(), f.from_i64(rng.gen_range(0..101))];
        if t == u {
            continue;
        }
        let line = zoo::schwarzenberger_secant(&f, &t, &u).unwrap();
        assert_eq!(dual_splitting_on_line(&z.monad, &line).unwrap(), Splitting::new(vec![1, 1, -2]));
        seen += 1;
    }
}

#[test]
fn c32_special_lines_have_one_dual_h1() {
    let f = f101();
    let z = build(&f, &FamilyParams::with_params("c32", &["1", "0", "0", "1"])).unwrap();
    let mut rng = rng_from_seed(4);
    for _ in 0..20 {
        let nz = |rng: &mut rand_chacha::ChaCha8Rng| f.from_i64(rng.gen_range(1..101));
        let line = zoo::c32_special_line(&f, &[nz(&mut rng), nz(&mut rng)], &[nz(&mut rng), nz(&mut rng)]).unwrap();
        assert_eq!(dual_splitting_on_line(&z.monad, &line).unwrap().h1(0), 1);
    }
}

#[test]
fn endomorphism_complex_of_schwarzenberger_bundle() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c36_schwarzenberger")).unwrap();
    let end = tensor_total(&dualize(&z.monad), &z.monad).unwrap();
    let sizes: Vec<usize> = (end.start..=end.end()).map(|p| end.term(p).len()).collect();
    assert_eq!(sizes, vec![18, 45, 18]);
    assert_eq!(end.term(-1), vec![-1; 18].as_slice());
    assert_eq!(end.term(1), vec![1; 18].as_slice());
    let h = hypercoh(&end, 0).unwrap();
    let got: Vec<Option<usize>> = (0..4).map(|i| h.get(i).exact()).collect();
    assert_eq!(got, vec![Some(1), Some(28), Some(0), Some(0)]);
    let c = ChernData { rank: 9, c1: 0, c2: 18, c3: 0 };
    assert_eq!(euler_char(&c, 0).unwrap(), -27);
    assert_eq!(chern(&end).unwrap(), c);
}

#[test]
fn alpha_space_dimensions() {
    let f = f101();
    for (t, dim) in [("1", 18), ("0", 21)] {
        let z = build(&f, &FamilyParams::with_params("c30_min", &[t])).unwrap();
        let beta = z.monad.diff(0).unwrap();
        assert_eq!(zoo::solve_left_differential(&f, beta, &[-1, -1, -1]).unwrap().len(), dim, "t = {t}");
    }
    let (m, _) = zoo::random_c30_max(&f, 5).unwrap();
    let beta = m.diff(0).unwrap();
    assert_eq!(zoo::solve_left_differential(&f, beta, &[-2]).unwrap().len(), 19);
}

#[test]
fn c30_family_jump_matches_restriction_to_l0() {
    let f = f101();
    for (t, h1) in [("1", 0), ("0", 1)] {
        let z = build(&f, &FamilyParams::with_params("c30_min", &[t])).unwrap();
        let table = coh_table(&z.monad, -1, 1).unwrap();
        assert_eq!(table.h(1, 0), Some(3));
        assert_eq!(table.h(1, 1), Some(h1), "t = {t}");
        let beta = z.monad.diff(0).unwrap();
        let canon = canonicalize_beta(&f, beta, BetaShape::C30, 11).unwrap();
        assert_eq!(zoo::jump_predicate(&f, &canon.canonical, BetaShape::C30), Some(h1 == 1));
        let l0 = l0_line(&f, &canon.h).unwrap();
        let split = splitting_type(&restrict(&z.monad, &l0)).unwrap();
        assert_eq!(split.h1(1), h1, "t = {t}, E_L0 = {split}");
    }
}

#[test]
fn c32_moduli_family_jump() {
    let f = f101();
    for (t, h1) in [("1", 0), ("0", 1)] {
        let z = build(&f, &FamilyParams::with_params("c32_moduli", &[t])).unwrap();
        let table = coh_table(&z.monad, 0, 1).unwrap();
        assert_eq!(table.h(1, 1), Some(h1), "t = {t}");
        let beta = z.monad.diff(0).unwrap();
        let canon = canonicalize_beta(&f, beta, BetaShape::C32, 2).unwrap();
        assert_eq!(zoo::jump_predicate(&f, &canon.canonical, BetaShape::C32), Some(h1 == 1));
        let l0 = l0_line(&f, &canon.h).unwrap();
        assert_eq!(splitting_type(&restrict(&z.monad, &l0)).unwrap().h1(1), h1);
    }
}

#[test]
fn random_c30_betas_canonicalize() {
    let f = f101();
    for seed in 0..3 {
        let m = zoo::random_c30_min(&f, seed).unwrap();
        let beta = m.diff(0).unwrap();
        let canon = canonicalize_beta(&f, beta, BetaShape::C30, seed).unwrap();
        assert!(zoo::pattern_holds(&f, &canon.canonical, BetaShape::C30));
        assert_eq!(zoo::solve_left_differential(&f, &canon.canonical, &[-1, -1, -1]).unwrap().len(), 18);
    }
}

#[test]
fn random_c32_betas_canonicalize() {
    let f = f101();
    for seed in 0..3 {
        let m = zoo::random_c32(&f, seed).unwrap();
        let canon = canonicalize_beta(&f, m.diff(0).unwrap(), BetaShape::C32, seed).unwrap();
        assert!(zoo::pattern_holds(&f, &canon.canonical, BetaShape::C32));
    }
}

#[test]
fn random_c36_has_six_sections_after_twist() {
    let f = f101();
    let m = zoo::random_c36(&f, 9).unwrap();
    assert_eq!(coh_table(&m, 1, 1).unwrap().h(0, 1), Some(6));
}

#[test]
fn nullcorrelation_is_stable_with_one_jumping_family() {
    let f = PrimeField::new(5).unwrap();
    let z = build(&f, &FamilyParams::new("nullcorrelation")).unwrap();
    let lines = projective::all_lines_p3(&f).unwrap();
    assert_eq!(lines.len(), 806);
    let jumping = lines
        .iter()
        .filter(|l| dual_splitting_on_line(&z.monad, l).unwrap() != Splitting::new(vec![0, 0]))
        .count();
    // the jumping lines of a null-correlation bundle are the null lines: (q^2+1)(q+1)
    assert_eq!(jumping, 26 * 6);
}
