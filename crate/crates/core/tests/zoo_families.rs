use monadcoh::cohomology::{chern, coh_table, spectrum};
use monadcoh::scanners::{stability_check, Stability};
use monadcoh::zoo::{build, FamilyParams, FAMILIES};
use monadcoh::PrimeField;

#[test]
fn every_family_builds_with_declared_invariants() {
    let f = PrimeField::new(101).unwrap();
    for fam in FAMILIES {
        let t = std::time::Instant::now();
        let z = build(&f, &FamilyParams::new(fam)).unwrap_or_else(|e| panic!("{fam}: {e}"));
        assert_eq!(chern(&z.monad).unwrap(), z.chern, "{fam}");
        let st = stability_check(&z.monad).unwrap();
        let table = coh_table(&z.monad, -z.chern.c2 - 3, 1).unwrap();
        let sp = if z.chern.rank == 3 { Some(spectrum(&table, &z.chern).unwrap()) } else { None };
        eprintln!("{fam}: {} {st} {:?} {:?}", z.chern, sp.as_ref().map(|s| s.to_string()), t.elapsed());
        assert_eq!(st, Stability::Stable, "{fam}");
        if let (Some(sp), Some(want)) = (sp, z.spectrum.clone()) {
            assert!(sp.ok(), "{fam}: {sp}");
            assert_eq!(sp.multiset_string(), monadcoh::cohomology::SpectrumData::from_multiset(want, &z.chern).multiset_string(), "{fam}");
        }
    }
}

#[test]
fn monad_files_round_trip() {
    use monadcoh::io::{write_monad, MonadFile};
    let f = PrimeField::new(101).unwrap();
    for fam in FAMILIES {
        let z = build(&f, &FamilyParams::new(fam)).unwrap();
        let text = write_monad(&z.monad);
        let back = MonadFile::parse(&text).unwrap().to_monad(&f).unwrap();
        assert_eq!(back, z.monad, "{fam}");
        assert_eq!(write_monad(&back), text, "{fam}");
    }
    let q = monadcoh::Rationals;
    let z = build(&q, &FamilyParams::new("c30_min")).unwrap();
    let text = write_monad(&z.monad);
    assert_eq!(MonadFile::parse(&text).unwrap().to_monad(&q).unwrap(), z.monad);
}

#[test]
fn unknown_family_and_bad_parameters_are_rejected() {
    let f = PrimeField::new(101).unwrap();
    assert!(build(&f, &FamilyParams::new("c99")).is_err());
    assert!(build(&f, &FamilyParams::with_params("c30_min", &["1", "2"])).is_err());
    assert!(build(&f, &FamilyParams::with_params("c34", &["8"])).is_err());
}

#[test]
fn every_pencil_case_yields_a_c34_bundle() {
    for p in [101, 5] {
        let f = PrimeField::new(p).unwrap();
        for case in 1..=7 {
            let (m, _) = monadcoh::zoo::random_c34(&f, case, 1).unwrap_or_else(|e| panic!("F_{p} case {case}: {e}"));
            assert_eq!(chern(&m).unwrap().to_string(), "3 0 3 4");
            assert_eq!(stability_check(&m).unwrap(), Stability::Stable, "F_{p} case {case}");
        }
    }
}
