use monadcoh::cohomology::{chern, coh_table, euler_char, spectrum, spectrum_via_plane};
use monadcoh::complex::{dualize, restrict, rng_from_seed};
use monadcoh::graded::{self, LinearSubspace};
use monadcoh::matrix::{self, Mat};
use monadcoh::p1split::{dual_splitting_on_line, splitting_type, Splitting};
use monadcoh::scanners::{self, Universe};
use monadcoh::zoo::{self, build, FamilyParams};
use monadcoh::{projective, MonadSpec, PrimeField};
use proptest::prelude::*;
use std::sync::OnceLock;

const P: u32 = 101;

fn f101() -> PrimeField {
    PrimeField::new(P).unwrap()
}

fn zoo_bundles() -> &'static Vec<(String, MonadSpec<PrimeField>)> {
    static CELL: OnceLock<Vec<(String, MonadSpec<PrimeField>)>> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = f101();
        zoo::FAMILIES
            .iter()
            .map(|fam| (fam.to_string(), build(&f, &FamilyParams::new(fam)).unwrap().monad))
            .collect()
    })
}

fn rank3() -> impl Iterator<Item = &'static (String, MonadSpec<PrimeField>)> {
    zoo_bundles().iter().filter(|(_, m)| m.rank() == 3)
}

fn matrix_strategy() -> impl Strategy<Value = Mat<u32>> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
        prop::collection::vec(0u32..P, r * c).prop_map(move |v| Mat::from_vec(r, c, v))
    })
}

fn form_strategy(nvars: usize, degree: i64) -> impl Strategy<Value = graded::Form<u32>> {
    let n = graded::dim_s(nvars, degree);
    prop::collection::vec(0u32..P, n).prop_map(move |coeffs| graded::Form { nvars, degree, coeffs })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_is_transpose_invariant(a in matrix_strategy()) {
        let f = f101();
        prop_assert_eq!(matrix::rank(&f, &a), matrix::rank(&f, &a.transpose()));
    }

    #[test]
    fn rank_nullity(a in matrix_strategy()) {
        let f = f101();
        let k = matrix::kernel_basis(&f, &a);
        prop_assert_eq!(matrix::rank(&f, &a) + k.cols(), a.cols());
        prop_assert!(matrix::is_zero(&f, &matrix::mul(&f, &a, &k)));
    }

    #[test]
    fn multiplication_matrices_compose(g in form_strategy(4, 1), h in form_strategy(4, 2), d in 0i64..3) {
        let f = f101();
        let gh = graded::mul(&f, &g, &h);
        let lhs = graded::mult_matrix(&f, &gh, d);
        let rhs = matrix::mul(&f, &graded::mult_matrix(&f, &g, d + 2), &graded::mult_matrix(&f, &h, d));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_is_a_ring_map(g in form_strategy(4, 1), h in form_strategy(4, 2), seed in any::<u64>()) {
        let f = f101();
        let mut rng = rng_from_seed(seed);
        let line: LinearSubspace<u32> = projective::random_line_p3(&f, &mut rng);
        let lhs = graded::substitute(&f, &graded::mul(&f, &g, &h), &line);
        let rhs = graded::mul(&f, &graded::substitute(&f, &g, &line), &graded::substitute(&f, &h, &line));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn parse_format_round_trip(g in form_strategy(4, 2)) {
        let f = f101();
        let s = graded::format_form(&f, &g);
        prop_assert_eq!(graded::parse_form(&f, 4, &s, &[], 2).unwrap(), g);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn dual_restriction_splits_as_negated(seed in any::<u64>()) {
        let f = f101();
        let mut rng = rng_from_seed(seed);
        let line = projective::random_line_p3(&f, &mut rng);
        for (fam, m) in zoo_bundles() {
            let e = splitting_type(&restrict(m, &line)).unwrap();
            let d = dual_splitting_on_line(m, &line).unwrap();
            prop_assert_eq!(e.dual(), d, "{}", fam);
        }
    }

    #[test]
    fn random_c36_instances_look_like_the_schwarzenberger_bundle(seed in 0u64..1000) {
        let f = f101();
        let m = zoo::random_c36(&f, seed).unwrap();
        let c = chern(&m).unwrap();
        prop_assert_eq!(c.to_string(), "3 0 3 6");
        let t = coh_table(&m, -6, 1).unwrap();
        prop_assert_eq!(spectrum(&t, &c).unwrap().multiset_string(), "(-1,-1,-1)");
    }
}

#[test]
fn serre_duality_on_zoo_bundles() {
    for (fam, m) in zoo_bundles() {
        let a = coh_table(m, -4, 1).unwrap();
        let b = coh_table(&dualize(m), -5, 0).unwrap();
        for l in -4..=1 {
            for i in 0..4 {
                assert_eq!(a.get(i, l), b.get(3 - i, -l - 4), "{fam}: h^{i}(E({l}))");
            }
        }
    }
}

#[test]
fn euler_characteristic_matches_riemann_roch() {
    for (fam, m) in zoo_bundles() {
        let c = chern(m).unwrap();
        let t = coh_table(m, -6, 3).unwrap();
        for l in -6..=3 {
            if !t.column_exact(l) {
                continue;
            }
            let chi: i64 = (0..4).map(|i| (if i % 2 == 0 { 1 } else { -1 }) * t.h(i, l).unwrap() as i64).sum();
            assert_eq!(chi, euler_char(&c, l).unwrap(), "{fam} at {l}");
        }
    }
}

#[test]
fn spectra_pass_their_validators() {
    for (fam, m) in rank3() {
        let c = chern(m).unwrap();
        let s = spectrum(&coh_table(m, -c.c2 - 3, 1).unwrap(), &c).unwrap();
        assert!(s.ok(), "{fam}: {s} fails {:?}", s.failures());
        assert_eq!(s.allowed, Some(true), "{fam}");
    }
}

#[test]
fn plane_sequences_satisfy_the_inequalities() {
    let f = f101();
    for (fam, m) in rank3() {
        let c = chern(m).unwrap();
        let table_spectrum = spectrum(&coh_table(m, -c.c2 - 3, 1).unwrap(), &c).unwrap();
        let planes = scanners::planes(&f, Universe::Sample { count: 10, seed: 21 }).unwrap();
        let mut used = 0;
        for h in &planes {
            match spectrum_via_plane(m, h) {
                Ok(ps) => {
                    assert!(ps.validators_hold(), "{fam}: {ps:?}");
                    assert_eq!(ps.spectrum.k, table_spectrum.k, "{fam}");
                    used += 1;
                }
                Err(monadcoh::Error::Inconsistent(_)) => {}
                Err(e) => panic!("{fam}: {e}"),
            }
        }
        assert!(used >= 9, "{fam}: only {used} semistable planes");
    }
}

#[test]
fn plane_sections_have_at_most_two_sections() {
    let f = f101();
    for (fam, m) in rank3() {
        let planes = scanners::planes(&f, Universe::Sample { count: 20, seed: 22 }).unwrap();
        for r in scanners::plane_records(m, &planes).unwrap() {
            assert!(r.h0 <= 2, "{fam}: {:?}", r);
        }
    }
}

#[test]
fn generic_splitting_is_balanced_or_almost() {
    let f = f101();
    let allowed = [Splitting::new(vec![0, 0, 0]), Splitting::new(vec![1, 0, -1])];
    for (fam, m) in rank3() {
        let lines = scanners::lines(&f, Universe::Sample { count: 20, seed: 23 }).unwrap();
        let recs = scanners::line_records(m, &lines).unwrap();
        let generic = scanners::generic_splitting(&recs).unwrap();
        assert!(allowed.contains(&generic), "{fam}: {generic}");
    }
}
