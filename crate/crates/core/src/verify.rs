//! The acceptance run behind `verify-paper`: ten criteria, each a list of
//! named checks with the observed values. Output depends only on the seed
//! and the quick flag.

use std::fmt::{Display, Write as _};

use rand::Rng;

use crate::cohomology::{self, chern, coh_table, euler_char, hypercoh, spectrum, spectrum_via_plane, ChernData};
use crate::complex::{self, dualize, restrict, rng_from_seed, FiberMode, MonadSpec};
use crate::field::{Field, PrimeField, Rationals};
use crate::p1split::{self, Splitting};
use crate::scanners::{self, Side, Stability, Universe};
use crate::zoo::{self, build, BetaShape, FamilyParams};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub seed: u64,
    /// Smaller samples; exhaustive scans are kept.
    pub quick: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub options: Options,
    pub criteria: Vec<Criterion>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(Criterion::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verify seed={} quick={}", self.options.seed, self.options.quick);
        for c in &self.criteria {
            let _ = writeln!(out, "[{}] {} {}", c.id, if c.passed() { "PASS" } else { "FAIL" }, c.title);
            for k in &c.checks {
                let _ = writeln!(out, "    {} {}", if k.ok { "ok  " } else { "FAIL" }, k.label);
            }
            if let Some(e) = &c.error {
                let _ = writeln!(out, "    error: {e}");
            }
        }
        let n = self.criteria.iter().filter(|c| c.passed()).count();
        let _ = writeln!(out, "summary: {n}/{} criteria passed", self.criteria.len());
        out
    }
}

pub const TITLES: [&str; 10] = [
    "Schwarzenberger-type bundle (c3 = 6): invariants, secant lines, plane sections",
    "c3 = 2 bundle: invariants, special lines, no unstable plane over F_5",
    "c3 = 2 bundle: cohomology table values",
    "endomorphism complex of the c3 = 6 bundle",
    "alpha-space dimensions",
    "c3 = 0 deformation family and the line L0",
    "c3 = 4 bundle: spectrum and the special point over F_5",
    "maximal c3 = 0 spectrum: unstable plane of order 1",
    "property suites (a)-(g) on all zoo bundles",
    "determinism of seeded runs",
];

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.0.push(Check { label: label.into(), ok });
    }

    fn eq<T: PartialEq + Display>(&mut self, what: &str, got: T, want: T) {
        let ok = got == want;
        let label = if ok { format!("{what} = {got}") } else { format!("{what} = {got}, expected {want}") };
        self.check(label, ok);
    }

    fn count(&mut self, what: &str, hits: usize, total: usize) {
        self.check(format!("{what}: {hits}/{total}"), hits == total && total > 0);
    }
}

fn seed_for(base: u64, id: u64) -> u64 {
    base.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(id)
}

fn samples(o: &Options, full: usize) -> usize {
    if o.quick {
        (full / 5).max(3)
    } else {
        full
    }
}

fn f101() -> PrimeField {
    PrimeField::new(101).expect("prime")
}

fn f5() -> PrimeField {
    PrimeField::new(5).expect("prime")
}

fn opt_str(v: Option<usize>) -> String {
    v.map_or_else(|| "?".to_string(), |x| x.to_string())
}

fn spectrum_of<F: Field>(m: &MonadSpec<F>, c: &ChernData) -> Result<cohomology::SpectrumData, Error> {
    spectrum(&coh_table(m, -c.c2 - 3, 1)?, c)
}

fn valid_monad<F: Field>(ch: &mut Checks, m: &MonadSpec<F>) -> Result<(), Error> {
    let composes = complex::compose_check(m)?;
    let bundle = complex::fiberwise_check(m, FiberMode::Closure)?.ok;
    ch.check("differentials compose to zero", composes);
    ch.check("fiberwise exact over the algebraic closure", bundle);
    Ok(())
}

fn criterion_1(o: &Options) -> Result<Checks, Error> {
    let f = f101();
    let mut ch = Checks::default();
    let z = build(&f, &FamilyParams::new("c36_schwarzenberger"))?;
    let m = &z.monad;
    let c = chern(m)?;
    ch.eq("chern", c.to_string().as_str(), "3 0 3 6");
    valid_monad(&mut ch, m)?;
    ch.eq("stability", scanners::stability_check(m)?, Stability::Stable);
    ch.eq("spectrum", spectrum_of(m, &c)?.to_string().as_str(), "(-1,-1,-1) OK");
    let mut rng = rng_from_seed(seed_for(o.seed, 1));
    let want = Splitting::new(vec![1, 1, -2]);
    let n = samples(o, 20);
    let mut good = 0;
    let mut done = 0;
    while done < n {
        let (a, b): (i64, i64) = (rng.gen_range(0..101), rng.gen_range(0..101));
        if a == b {
            continue;
        }
        let line = zoo::schwarzenberger_secant(&f, &[f.one(), f.from_i64(a)], &[f.one(), f.from_i64(b)])
            .ok_or_else(|| Error::Inconsistent("secant planes coincide".into()))?;
        good += usize::from(p1split::dual_splitting_on_line(m, &line)? == want);
        done += 1;
    }
    ch.count("secant lines with E_L^v = (1,1,-2)", good, n);
    let n = samples(o, 50);
    let planes = scanners::planes(&f, Universe::Sample { count: n, seed: seed_for(o.seed, 11) })?;
    let recs = scanners::plane_records(m, &planes)?;
    ch.count("planes with h0(E_H^v) >= 1", recs.iter().filter(|r| r.h0_dual >= 1).count(), n);
    ch.count("planes with h0(E_H) = 0", recs.iter().filter(|r| r.h0 == 0).count(), n);
    Ok(ch)
}

fn criterion_2(o: &Options) -> Result<Checks, Error> {
    let f = f101();
    let mut ch = Checks::default();
    let z = build(&f, &FamilyParams::with_params("c32", &["1", "0", "0", "1"]))?;
    let m = &z.monad;
    let c = chern(m)?;
    ch.eq("chern", c.to_string().as_str(), "3 0 3 2");
    valid_monad(&mut ch, m)?;
    ch.eq("stability", scanners::stability_check(m)?, Stability::Stable);
    ch.eq("spectrum", spectrum_of(m, &c)?.to_string().as_str(), "(-1,0,0) OK");
    let mut rng = rng_from_seed(seed_for(o.seed, 2));
    let n = samples(o, 20);
    let mut good = 0;
    for _ in 0..n {
        let mut nz = || f.from_i64(rng.gen_range(1..101));
        let (ab, cd) = ([nz(), nz()], [nz(), nz()]);
        let line = zoo::c32_special_line(&f, &ab, &cd).ok_or_else(|| Error::Inconsistent("degenerate line".into()))?;
        good += usize::from(p1split::dual_splitting_on_line(m, &line)?.h1(0) == 1);
    }
    ch.count("special lines with h1(E_L^v) = 1", good, n);
    let g = f5();
    let z5 = build(&g, &FamilyParams::with_params("c32", &["1", "0", "0", "1"]))?;
    let rep = scanners::plane_scan(&z5.monad, Universe::Exhaustive)?;
    ch.eq("planes over F_5", rep.records.len(), 156);
    ch.eq("unstable planes over F_5", rep.summary_value("unstable planes").unwrap_or("?"), "0");
    Ok(ch)
}

fn criterion_3(_: &Options) -> Result<Checks, Error> {
    let mut ch = Checks::default();
    let z = build(&Rationals, &FamilyParams::with_params("c32", &["1", "0", "0", "1"]))?;
    let t = coh_table(&z.monad, -4, 1)?;
    ch.eq("h1(E(-1))", opt_str(t.h(1, -1)).as_str(), "2");
    ch.eq("h1(E)", opt_str(t.h(1, 0)).as_str(), "2");
    ch.eq("h2(E(-3))", opt_str(t.h(2, -3)).as_str(), "4");
    ch.eq("h2(E(-2))", opt_str(t.h(2, -2)).as_str(), "1");
    let d = coh_table(&dualize(&z.monad), -3, 0)?;
    ch.eq("h1(E^v(-2))", opt_str(d.h(1, -2)).as_str(), "1");
    ch.eq("h1(E^v(-1))", opt_str(d.h(1, -1)).as_str(), "4");
    Ok(ch)
}

fn criterion_4(_: &Options) -> Result<Checks, Error> {
    let f = f101();
    let mut ch = Checks::default();
    let z = build(&f, &FamilyParams::new("c36_schwarzenberger"))?;
    let end = complex::tensor_total(&dualize(&z.monad), &z.monad)?;
    let shape: Vec<String> = (end.start..=end.end())
        .map(|p| {
            let t = end.term(p);
            let tw: std::collections::BTreeSet<i64> = t.iter().copied().collect();
            let tw: Vec<String> = tw.iter().map(|x| x.to_string()).collect();
            format!("{}O({})", t.len(), tw.join("|"))
        })
        .collect();
    ch.eq("terms", shape.join(" -> ").as_str(), "18O(-1) -> 45O(0) -> 18O(1)");
    let h = hypercoh(&end, 0)?;
    let vals: Vec<String> = (0..4).map(|i| opt_str(h.get(i).exact())).collect();
    ch.eq("h^i(End E), i = 0..3", vals.join(",").as_str(), "1,28,0,0");
    ch.check("all four values exact", (0..4).all(|i| h.get(i).is_exact()));
    let c = ChernData { rank: 9, c1: 0, c2: 18, c3: 0 };
    ch.eq("chern of the total complex", chern(&end)?, c);
    ch.eq("euler_char(9,0,18,0)", euler_char(&c, 0)?, -27);
    Ok(ch)
}

fn criterion_5(o: &Options) -> Result<Checks, Error> {
    let f = f101();
    let mut ch = Checks::default();
    for (t, want) in [("1", 18), ("0", 21)] {
        let z = build(&f, &FamilyParams::with_params("c30_min", &[t]))?;
        let beta = z.monad.diff(0).ok_or_else(|| Error::Shape("missing beta".into()))?;
        let canon = zoo::canonicalize_beta(&f, beta, BetaShape::C30, seed_for(o.seed, 5))?;
        let got = zoo::solve_left_differential(&f, &canon.canonical, &[-1, -1, -1])?.len();
        ch.eq(&format!("dim alpha-space, c3 = 0 family at t = {t}"), got, want);
    }
    let (m, _) = zoo::random_c30_max(&f, seed_for(o.seed, 55))?;
    let beta = m.diff(0).ok_or_else(|| Error::Shape("missing beta".into()))?;
    let got = zoo::solve_left_differential(&f, beta, &[-2])?.len();
    ch.eq("dim alpha-space, O(1)+3O+O(-1) -> O(2)", got, 19);
    Ok(ch)
}

fn criterion_6(o: &Options) -> Result<Checks, Error> {
    let f = f101();
    let mut ch = Checks::default();
    for (t, want) in [("1", 0), ("0", 1)] {
        let z = build(&f, &FamilyParams::with_params("c30_min", &[t]))?;
        let table = coh_table(&z.monad, 1, 1)?;
        ch.eq(&format!("h1(E(1)) at t = {t}"), opt_str(table.h(1, 1)).as_str(), &want.to_string());
        let beta = z.monad.diff(0).ok_or_else(|| Error::Shape("missing beta".into()))?;
        let canon = zoo::canonicalize_beta(&f, beta, BetaShape::C30, seed_for(o.seed, 6))?;
        let l0 = zoo::l0_line(&f, &canon.h).ok_or_else(|| Error::Inconsistent("h0, h1 dependent".into()))?;
        let on_line = p1split::splitting_type(&restrict(&z.monad, &l0))?.h1(1);
        ch.eq(&format!("h1(E_L0(1)) at t = {t}"), on_line, want);
        ch.eq(
            &format!("jump predicate at t = {t}"),
            zoo::jump_predicate(&f, &canon.canonical, BetaShape::C30).unwrap_or(false),
            want == 1,
        );
    }
    Ok(ch)
}

fn criterion_7(o: &Options) -> Result<Checks, Error> {
    let f = f5();
    let mut ch = Checks::default();
    let z = build(&f, &FamilyParams::with_params("c34", &["7"]).seed(seed_for(o.seed, 7)))?;
    let m = &z.monad;
    let c = chern(m)?;
    ch.eq("chern", c.to_string().as_str(), "3 0 3 4");
    ch.eq("stability", scanners::stability_check(m)?, Stability::Stable);
    ch.eq("spectrum", spectrum_of(m, &c)?.to_string().as_str(), "(-1,-1,0) OK");
    let x = z.special_point.clone().ok_or_else(|| Error::Inconsistent("no special point".into()))?;
    let planes = scanners::planes(&f, Universe::Exhaustive)?;
    let recs = scanners::plane_records(m, &planes)?;
    let mut good = 0;
    for r in &recs {
        let through = f.is_zero(&r.h.iter().zip(&x).fold(f.zero(), |acc, (a, b)| f.add(&acc, &f.mul(a, b))));
        good += usize::from(r.h0 == usize::from(through));
    }
    ch.count("planes over F_5 with h0(E_H) = [x in H]", good, recs.len());
    Ok(ch)
}

fn criterion_8(o: &Options) -> Result<Checks, Error> {
    let f = f101();
    let mut ch = Checks::default();
    let z = build(&f, &FamilyParams::new("c30_max").seed(seed_for(o.seed, 8)))?;
    let m = &z.monad;
    let c = chern(m)?;
    ch.eq("spectrum", spectrum_of(m, &c)?.to_string().as_str(), "(-1,0,1) OK");
    let h = z.special_plane.clone().ok_or_else(|| Error::Inconsistent("no special plane".into()))?;
    ch.eq("order of the plane h0 = 0", scanners::unstable_plane_order(m, &h)?, 1);
    let table = coh_table(m, -6, 1)?;
    ch.eq("criterion (II) at r = 1", scanners::bilinear_criteria(&table, 1)?, true);
    Ok(ch)
}

fn criterion_9(o: &Options) -> Result<Checks, Error> {
    let f = f101();
    let mut ch = Checks::default();
    let mut bundles = Vec::new();
    for fam in zoo::FAMILIES {
        bundles.push((fam, build(&f, &FamilyParams::new(fam).seed(seed_for(o.seed, 9)))?.monad));
    }
    let mut serre = true;
    let mut chi = true;
    for (_, m) in &bundles {
        let a = coh_table(m, -4, 1)?;
        let b = coh_table(&dualize(m), -5, 0)?;
        serre &= (-4..=1).all(|l| (0..4).all(|i| a.get(i, l) == b.get(3 - i, -l - 4)));
        let c = chern(m)?;
        for l in -4..=1 {
            if a.column_exact(l) {
                let s: i64 = (0..4).map(|i| (1 - 2 * (i as i64 % 2)) * a.h(i, l).unwrap_or(0) as i64).sum();
                chi &= s == euler_char(&c, l)?;
            }
        }
    }
    ch.check("(a) Serre duality on [-4,1]", serre);
    ch.check("(b) Euler characteristics agree with Riemann-Roch", chi);
    let rank3: Vec<_> = bundles.iter().filter(|(_, m)| m.rank() == 3).collect();
    let mut validators = true;
    for (_, m) in &rank3 {
        let c = chern(m)?;
        let s = spectrum_of(m, &c)?;
        validators &= s.ok() && s.allowed != Some(false);
    }
    ch.check("(c) spectrum validators", validators);
    let planes = scanners::planes(&f, Universe::Sample { count: samples(o, 10), seed: seed_for(o.seed, 91) })?;
    let mut ineq = true;
    let mut used = 0;
    for (_, m) in &rank3 {
        for h in &planes {
            match spectrum_via_plane(m, h) {
                Ok(ps) => {
                    ineq &= ps.validators_hold();
                    used += 1;
                }
                Err(Error::Inconsistent(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    ch.check(format!("(d) n_-1 >= n_-2 and strict growth on {used} plane sections"), ineq && used > 0);
    let planes = scanners::planes(&f, Universe::Sample { count: samples(o, 30), seed: seed_for(o.seed, 92) })?;
    let mut mu_ok = true;
    let mut h0_bound = true;
    for (_, m) in &bundles {
        let recs = scanners::plane_records(m, &planes)?;
        for side in [Side::E, Side::Dual] {
            let mu = scanners::mu_build(m, side)?;
            for r in &recs {
                let want = if side == Side::E { r.h0 } else { r.h0_dual };
                mu_ok &= mu.corank(&f, &r.h) == want;
            }
        }
        if m.rank() == 3 {
            h0_bound &= recs.iter().all(|r| r.h0 <= 2);
        }
    }
    ch.check(format!("(e) mu corank = h0 of the restriction on {} planes", planes.len()), mu_ok);
    ch.check("(f) h0(E_H) <= 2", h0_bound);
    // the 90% rule needs enough lines to absorb a stray jumping line
    let lines = scanners::lines(&f, Universe::Sample { count: 50, seed: seed_for(o.seed, 93) })?;
    let allowed = [Splitting::new(vec![0, 0, 0]), Splitting::new(vec![1, 0, -1])];
    let mut gms = true;
    let mut seen = Vec::new();
    for (fam, m) in &rank3 {
        let recs = scanners::line_records(m, &lines)?;
        let generic = scanners::generic_splitting(&recs);
        let hits = recs.iter().filter(|r| Some(&r.dual_splitting) == generic.as_ref()).count();
        seen.push(format!("{fam} {} {hits}/{}", generic.as_ref().map_or("-".into(), |g| g.to_string()), recs.len()));
        gms &= generic.is_some_and(|g| allowed.contains(&g)) && scanners::general(hits, recs.len());
    }
    ch.check(format!("(g) generic splitting in {{(0,0,0),(1,0,-1)}}: {}", seen.join(", ")), gms);
    Ok(ch)
}

fn run_one(id: usize, o: &Options) -> Criterion {
    let result = match id {
        1 => criterion_1(o),
        2 => criterion_2(o),
        3 => criterion_3(o),
        4 => criterion_4(o),
        5 => criterion_5(o),
        6 => criterion_6(o),
        7 => criterion_7(o),
        8 => criterion_8(o),
        9 => criterion_9(o),
        _ => unreachable!(),
    };
    let (checks, error) = match result {
        Ok(c) => (c.0, None),
        Err(e) => (vec![], Some(e.to_string())),
    };
    Criterion { id, title: TITLES[id - 1], checks, error }
}

/// Criteria 1 to 9; the tenth compares two complete runs.
pub fn run(o: &Options) -> Report {
    let first: Vec<Criterion> = (1..=9).map(|id| run_one(id, o)).collect();
    let second: Vec<Criterion> = (1..=9).map(|id| run_one(id, o)).collect();
    let same = first == second;
    let mut criteria = first;
    criteria.push(Criterion {
        id: 10,
        title: TITLES[9],
        checks: vec![Check { label: "second in-process run identical".into(), ok: same }],
        error: None,
    });
    Report { options: *o, criteria }
}
