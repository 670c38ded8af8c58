use monadcoh::cohomology::{coh_table, spectrum};
use monadcoh::complex::rng_from_seed;
use monadcoh::p1split::splitting_type;
use monadcoh::scanners::{self, Side, Stability, Universe};
use monadcoh::zoo::{self, build, FamilyParams, ALPHA2_FORMS, EXCLUDED_PENCILS};
use monadcoh::{complex, projective, Field, MonadSpec, PrimeField};

fn f101() -> PrimeField {
    PrimeField::new(101).unwrap()
}

fn dot<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
}

#[test]
fn trivial_bundle_is_unstable() {
    let f = f101();
    let m = MonadSpec::line_bundles(f, 3, vec![0, 0, 0]);
    assert_eq!(scanners::stability_check(&m).unwrap(), Stability::Unstable { h0: 3, h0_dual: 3 });
}

#[test]
fn stability_rejects_nonzero_first_chern_class() {
    let f = f101();
    let m = MonadSpec::line_bundles(f, 3, vec![1, 0, 0]);
    assert!(scanners::stability_check(&m).is_err());
}

#[test]
fn schwarzenberger_planes_all_have_dual_sections() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c36_schwarzenberger")).unwrap();
    let rep = scanners::restriction_stability_sample(&z.monad, Universe::Sample { count: 50, seed: 1 }).unwrap();
    assert_eq!(rep.summary_value("planes with h0(E_H^v) > 0"), Some("50"));
    assert_eq!(rep.summary_value("planes with h0(E_H) > 0"), Some("0"));
}

#[test]
fn c30_min_restricts_stably_to_general_planes() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c30_min")).unwrap();
    let rep = scanners::restriction_stability_sample(&z.monad, Universe::Sample { count: 50, seed: 2 }).unwrap();
    assert_eq!(rep.summary_value("general restriction stable"), Some("true"));
}

#[test]
fn c32_has_no_unstable_plane_over_f5() {
    let f = PrimeField::new(5).unwrap();
    let z = build(&f, &FamilyParams::with_params("c32", &["1", "0", "0", "1"])).unwrap();
    let rep = scanners::plane_scan(&z.monad, Universe::Exhaustive).unwrap();
    assert_eq!(rep.records.len(), 156);
    assert_eq!(rep.summary_value("unstable planes"), Some("0"));
    assert!(rep.summary_value("max h0(E_H)").unwrap().parse::<usize>().unwrap() <= 2);
}

#[test]
fn c34_sections_on_planes_detect_the_special_point() {
    let f = PrimeField::new(5).unwrap();
    let z = build(&f, &FamilyParams::with_params("c34", &["7"]).seed(3)).unwrap();
    let x = z.special_point.clone().unwrap();
    let table = coh_table(&z.monad, -6, 0).unwrap();
    assert_eq!(spectrum(&table, &z.chern).unwrap().multiset_string(), "(-1,-1,0)");
    let planes = scanners::planes(&f, Universe::Exhaustive).unwrap();
    for r in scanners::plane_records(&z.monad, &planes).unwrap() {
        let through = f.is_zero(&dot(&f, &r.h, &x));
        assert_eq!(r.h0, usize::from(through), "plane {:?}", r.h);
    }
}

#[test]
fn c30_max_has_an_order_one_plane_and_criterion_two_fires() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c30_max")).unwrap();
    let h = z.special_plane.clone().unwrap();
    assert_eq!(scanners::unstable_plane_order(&z.monad, &h).unwrap(), 1);
    let table = coh_table(&z.monad, -6, 1).unwrap();
    assert_eq!(table.h(2, -3), Some(3));
    assert_eq!(table.h(2, -2), Some(1));
    assert!(scanners::bilinear_criteria(&table, 1).unwrap());
    let mut rng = rng_from_seed(8);
    let mut other = 0;
    for _ in 0..10 {
        let g = projective::random_point(&f, 3, &mut rng);
        other += scanners::unstable_plane_order(&z.monad, &g).unwrap();
    }
    assert_eq!(other, 0);
}

#[test]
fn criterion_two_on_eliminated_spectrum_values() {
    assert!(scanners::bilinear_from_values(2, 1, 0));
}

#[test]
fn pencil_normal_forms_classify_to_their_case() {
    let f = f101();
    for (k, rows) in ALPHA2_FORMS.iter().enumerate() {
        let phi = zoo::pencil_matrix(&f, rows).unwrap();
        let c = scanners::pencil_classify(&f, &phi).unwrap();
        assert_eq!(c.case(), Some(k + 1), "form {k}: {c:?}");
        assert_eq!(c.generic_rank, 3);
    }
    let one = scanners::pencil_classify(&f, &zoo::pencil_matrix(&f, &ALPHA2_FORMS[0]).unwrap()).unwrap();
    assert_eq!(one.multiplicities, vec![3]);
    assert_eq!(one.drop_points, Some([1, 1, 1]));
    let seven = scanners::pencil_classify(&f, &zoo::pencil_matrix(&f, &ALPHA2_FORMS[6]).unwrap()).unwrap();
    assert_eq!(seven.torsion_length, 0);
    assert_eq!(seven.drop_points, Some([0, 0, 0]));
    let three = scanners::pencil_classify(&f, &zoo::pencil_matrix(&f, &ALPHA2_FORMS[2]).unwrap()).unwrap();
    assert_eq!(three.drop_points, Some([3, 3, 3]));
}

#[test]
fn excluded_pencils_are_flagged() {
    let f = f101();
    let labels: Vec<_> = EXCLUDED_PENCILS
        .iter()
        .map(|rows| scanners::pencil_classify(&f, &zoo::pencil_matrix(&f, rows).unwrap()).unwrap().excluded)
        .collect();
    assert_eq!(labels, vec![Some("viii"), Some("ix")]);
}

#[test]
fn pencil_with_a_rank_one_point_is_rejected() {
    let f = f101();
    let phi = zoo::pencil_matrix(&f, &[["X0", "X1", "0"], ["0", "0", "0"]]).unwrap();
    assert!(scanners::pencil_classify(&f, &phi).is_err());
}

#[test]
fn drop_points_in_extensions() {
    // Ψ rows (T0, 0, 2T1), (T1, T0, 0), (0, T1, T0) with det T0^3 + 2T1^3,
    // irreducible over F_7 since 3 is not a cube there
    let f = PrimeField::new(7).unwrap();
    let phi = zoo::pencil_matrix(&f, &[["X0", "X1", "X2"], ["X1", "X2", "2*X0"]]).unwrap();
    let c = scanners::pencil_classify(&f, &phi).unwrap();
    assert_eq!(c.case(), Some(3), "{c:?}");
    assert_eq!(c.drop_points, Some([0, 0, 3]));
}

#[test]
fn mu_dimensions() {
    let f = f101();
    let c30 = build(&f, &FamilyParams::new("c30_min")).unwrap();
    let mu = scanners::mu_build(&c30.monad, Side::E).unwrap();
    assert_eq!((mu.d_in, mu.d_out), (3, 3));
    let c32 = build(&f, &FamilyParams::with_params("c32", &["1", "0", "0", "1"])).unwrap();
    let mu = scanners::mu_build(&c32.monad, Side::Dual).unwrap();
    assert_eq!((mu.d_in, mu.d_out), (4, 4));
    let c36 = build(&f, &FamilyParams::new("c36_schwarzenberger")).unwrap();
    assert_eq!(scanners::mu_build(&c36.monad, Side::E).unwrap().d_in, 0);
}

#[test]
fn mu_corank_matches_restriction_on_every_family() {
    let f = f101();
    for fam in ["c36_schwarzenberger", "c32", "c30_min", "c32_moduli", "c34", "c30_max", "c36"] {
        let z = build(&f, &FamilyParams::new(fam)).unwrap();
        let planes = scanners::planes(&f, Universe::Sample { count: 30, seed: 5 }).unwrap();
        let recs = scanners::plane_records(&z.monad, &planes).unwrap();
        for side in [Side::E, Side::Dual] {
            let mu = scanners::mu_build(&z.monad, side).unwrap();
            assert_eq!(mu.common_kernel_dim(&f), 0, "{fam} {side:?}");
            for r in &recs {
                let expect = if side == Side::E { r.h0 } else { r.h0_dual };
                assert_eq!(mu.corank(&f, &r.h), expect, "{fam} {side:?} {:?}", r.h);
            }
        }
    }
}

#[test]
fn schwarzenberger_dual_mu_degenerates_everywhere() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c36_schwarzenberger")).unwrap();
    let mu = scanners::mu_build(&z.monad, Side::Dual).unwrap();
    let planes = scanners::planes(&f, Universe::Sample { count: 100, seed: 6 }).unwrap();
    let hist = scanners::mu_corank_scan(&f, &mu, &planes);
    assert!(hist.keys().all(|&c| c >= 1), "{hist:?}");
    let a = scanners::kernel_degree(&f, &mu).unwrap();
    assert!(a <= -2, "a = {a}");
}

#[test]
fn c30_min_mu_is_generically_injective() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c30_min")).unwrap();
    let mu = scanners::mu_build(&z.monad, Side::E).unwrap();
    let planes = scanners::planes(&f, Universe::Sample { count: 50, seed: 7 }).unwrap();
    let hist = scanners::mu_corank_scan(&f, &mu, &planes);
    assert!(scanners::general(*hist.get(&0).unwrap_or(&0), 50), "{hist:?}");
}

#[test]
fn general_xi_generates_h1() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c30_min")).unwrap();
    let mu = scanners::mu_build(&z.monad, Side::E).unwrap();
    let mut rng = rng_from_seed(12);
    for _ in 0..20 {
        let xi: Vec<u32> = (0..mu.d_in).map(|_| f.random(&mut rng)).collect();
        assert!(mu.generates(&f, &xi));
    }
}

#[test]
fn line_restriction_sequence_on_c30_min() {
    let f = f101();
    let z = build(&f, &FamilyParams::with_params("c30_min", &["0"])).unwrap();
    let mut rng = rng_from_seed(13);
    for _ in 0..10 {
        let line = projective::random_line_p3(&f, &mut rng);
        let eqs = line.equations(&f);
        let eqs: Vec<Vec<u32>> = (0..eqs.rows()).map(|i| eqs.row(i).to_vec()).collect();
        let coker = scanners::line_multiplication_cokernel(&z.monad, &eqs, 0).unwrap();
        let split = splitting_type(&complex::restrict(&z.monad, &line)).unwrap();
        assert_eq!(coker, split.h1(1));
    }
}

#[test]
fn jumping_lines_of_c32() {
    let f = PrimeField::new(5).unwrap();
    let z = build(&f, &FamilyParams::with_params("c32", &["1", "0", "0", "1"])).unwrap();
    let rep = scanners::jumping_line_scan(&z.monad, Universe::Exhaustive).unwrap();
    assert_eq!(rep.records.len(), 806);
    let generic = rep.summary_value("generic dual splitting").unwrap();
    assert!(generic == "(0,0,0)" || generic == "(1,0,-1)", "{generic}");
}

#[test]
fn scan_reports_are_deterministic() {
    let f = f101();
    let z = build(&f, &FamilyParams::new("c30_min")).unwrap();
    let u = Universe::Sample { count: 12, seed: 99 };
    let a = scanners::plane_scan(&z.monad, u).unwrap().to_tsv();
    let b = scanners::plane_scan(&z.monad, u).unwrap().to_tsv();
    assert_eq!(a, b);
}
