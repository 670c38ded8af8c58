//! Explicit monads for the known rank-3 families on P^3, randomized
//! generators for each monad shape, the α-space solver and the canonical
//! forms of β for the c_3 = 0 and c_3 = 2 shapes.

use rand::Rng;

use crate::cohomology::ChernData;
use crate::complex::{self, compose, fiberwise_check, form_matrix, form_matrix_zero, FiberMode, FormMatrix, MonadSpec, TwistList};
use crate::field::Field;
use crate::graded::{self, dim_s, Form, LinearSubspace};
use crate::matrix::{self, Mat};
use crate::projective;
use crate::scanners;
use crate::Error;

/// Rejection budget per sampling stage.
pub const MAX_TRIES: usize = 200;

pub const FAMILIES: &[&str] = &[
    "nullcorrelation",
    "c36_schwarzenberger",
    "c32",
    "c30_min",
    "c32_moduli",
    "c34",
    "c30_max",
    "c36",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    pub family: String,
    /// Scalars in the field's textual syntax; empty means the defaults.
    pub params: Vec<String>,
    pub seed: u64,
}

impl FamilyParams {
    pub fn new(family: &str) -> Self {
        FamilyParams { family: family.into(), params: vec![], seed: 0 }
    }

    pub fn with_params(family: &str, params: &[&str]) -> Self {
        FamilyParams { family: family.into(), params: params.iter().map(|s| s.to_string()).collect(), seed: 0 }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// A zoo bundle with the invariants it is built to have.
#[derive(Clone, Debug)]
pub struct ZooBundle<F: Field> {
    pub family: String,
    pub monad: MonadSpec<F>,
    pub chern: ChernData,
    /// Expected spectrum, for the rank-3 families.
    pub spectrum: Option<Vec<i64>>,
    /// c34: the common zero x of the three linear forms of β_1.
    pub special_point: Option<Vec<F::Elem>>,
    /// c30_max: the linear entry h_0 of α, cutting out an unstable plane.
    pub special_plane: Option<Vec<F::Elem>>,
}

fn declared(family: &str) -> (ChernData, Option<Vec<i64>>) {
    let c = |r, c2, c3| ChernData { rank: r, c1: 0, c2, c3 };
    match family {
        "nullcorrelation" => (c(2, 1, 0), None),
        "c36_schwarzenberger" | "c36" => (c(3, 3, 6), Some(vec![-1, -1, -1])),
        "c32" | "c32_moduli" => (c(3, 3, 2), Some(vec![-1, 0, 0])),
        "c30_min" => (c(3, 3, 0), Some(vec![0, 0, 0])),
        "c30_max" => (c(3, 3, 0), Some(vec![-1, 0, 1])),
        "c34" => (c(3, 3, 4), Some(vec![-1, -1, 0])),
        _ => unreachable!("family list and declarations out of sync"),
    }
}

/// Form matrix from polynomial strings, one slice per target summand.
fn fm_rows<F: Field>(
    f: &F,
    source: &[i64],
    target: &[i64],
    rows: &[&[&str]],
    params: &[(&str, F::Elem)],
) -> Result<FormMatrix<F::Elem>, Error> {
    let mut entries = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != source.len() {
            return Err(Error::Shape(format!("row {i} has {} entries", row.len())));
        }
        for (j, s) in row.iter().enumerate() {
            entries.push(graded::parse_form(f, 4, s, params, target[i] - source[j])?);
        }
    }
    form_matrix(f, 4, source, target, entries)
}

fn scalar_params<F: Field>(f: &F, p: &FamilyParams, defaults: &[&str]) -> Result<Vec<F::Elem>, Error> {
    let raw: Vec<String> = if p.params.is_empty() {
        defaults.iter().map(|s| s.to_string()).collect()
    } else {
        p.params.clone()
    };
    if raw.len() != defaults.len() {
        return Err(Error::Parse(format!(
            "family {} takes {} parameters, got {}",
            p.family,
            defaults.len(),
            raw.len()
        )));
    }
    raw.iter().map(|s| f.parse(s)).collect()
}

/// Builds a zoo family and checks that it is a monad presenting a bundle
/// with the declared Chern classes.
pub fn build<F: Field>(f: &F, p: &FamilyParams) -> Result<ZooBundle<F>, Error> {
    let fam = p.family.as_str();
    if !FAMILIES.contains(&fam) {
        return Err(Error::Parse(format!("unknown family `{fam}` (known: {})", FAMILIES.join(", "))));
    }
    let (chern, spectrum) = declared(fam);
    let mut special_point = None;
    let mut special_plane = None;
    let monad = match fam {
        "nullcorrelation" => nullcorrelation(f)?,
        "c36_schwarzenberger" => schwarzenberger(f)?,
        "c32" => {
            let v = scalar_params(f, p, &["1", "0", "0", "1"])?;
            c32(f, &v[0], &v[1], &v[2], &v[3])?
        }
        "c30_min" => {
            let v = scalar_params(f, p, &["1"])?;
            c30_min(f, &v[0])?
        }
        "c32_moduli" => {
            let v = scalar_params(f, p, &["1"])?;
            c32_moduli(f, &v[0])?
        }
        "c34" => {
            let raw = if p.params.is_empty() { "7".to_string() } else { p.params.join(",") };
            let case: usize = raw
                .parse()
                .ok()
                .filter(|k| (1..=7).contains(k))
                .ok_or_else(|| Error::Parse(format!("c34 takes a normal-form case 1..7, got `{raw}`")))?;
            let (m, x) = random_c34(f, case, p.seed)?;
            special_point = Some(x);
            m
        }
        "c30_max" => {
            let (m, h) = random_c30_max(f, p.seed)?;
            special_plane = Some(h);
            m
        }
        "c36" => random_c36(f, p.seed)?,
        _ => unreachable!(),
    };
    if !complex::compose_check(&monad)? {
        return Err(Error::Inconsistent(format!("{fam}: consecutive maps do not compose to zero")));
    }
    if !is_bundle(&monad)? {
        return Err(Error::Inconsistent(format!("{fam}: the complex does not present a vector bundle")));
    }
    let got = crate::cohomology::chern(&monad)?;
    if got != chern {
        return Err(Error::Inconsistent(format!("{fam}: Chern classes {got}, expected {chern}")));
    }
    Ok(ZooBundle { family: fam.into(), monad, chern, spectrum, special_point, special_plane })
}

/// Fiberwise exactness over the algebraic closure.
fn is_bundle<F: Field>(m: &MonadSpec<F>) -> Result<bool, Error> {
    Ok(fiberwise_check(m, FiberMode::Closure)?.ok)
}

/// O(−1) → 4O → O(1) with α = (X_0..X_3)^t and β = (X_1, −X_0, X_3, −X_2).
pub fn nullcorrelation<F: Field>(f: &F) -> Result<MonadSpec<F>, Error> {
    let alpha = fm_rows(f, &[-1], &[0; 4], &[&["X0"], &["X1"], &["X2"], &["X3"]], &[])?;
    let beta = fm_rows(f, &[0; 4], &[1], &[&["X1", "-X0", "X3", "-X2"]], &[])?;
    MonadSpec::new(f.clone(), 3, -1, vec![vec![-1], vec![0; 4], vec![1]], vec![alpha, beta], 0)
}

/// Cokernel of the transpose of the 3×6 catalecticant-type matrix
/// [[X0,X1,X2,X3,0,0],[0,X0,X1,X2,X3,0],[0,0,X0,X1,X2,X3]].
pub fn schwarzenberger<F: Field>(f: &F) -> Result<MonadSpec<F>, Error> {
    let m: [[&str; 6]; 3] = [
        ["X0", "X1", "X2", "X3", "0", "0"],
        ["0", "X0", "X1", "X2", "X3", "0"],
        ["0", "0", "X0", "X1", "X2", "X3"],
    ];
    let rows: Vec<Vec<&str>> = (0..6).map(|i| (0..3).map(|j| m[j][i]).collect()).collect();
    let rows: Vec<&[&str]> = rows.iter().map(|r| r.as_slice()).collect();
    let alpha = fm_rows(f, &[-2; 3], &[-1; 6], &rows, &[])?;
    MonadSpec::new(f.clone(), 3, -1, vec![vec![-2; 3], vec![-1; 6]], vec![alpha], 0)
}

/// O(−2) → 6O → 2O(1) with parameters a_1, a_3, b_1, b_3.
pub fn c32<F: Field>(f: &F, a1: &F::Elem, a3: &F::Elem, b1: &F::Elem, b3: &F::Elem) -> Result<MonadSpec<F>, Error> {
    let det = f.sub(&f.mul(a1, b3), &f.mul(a3, b1));
    if f.is_zero(&det) {
        return Err(Error::Inconsistent("c32 needs a1*b3 - a3*b1 != 0".into()));
    }
    let ps = [("a1", a1.clone()), ("a3", a3.clone()), ("b1", b1.clone()), ("b3", b3.clone())];
    let alpha = fm_rows(
        f,
        &[-2],
        &[0; 6],
        &[&["X2^2"], &["X3^2"], &["-X0*X2"], &["-X1*X3"], &["X0^2"], &["X1^2"]],
        &ps,
    )?;
    let beta = fm_rows(
        f,
        &[0; 6],
        &[1, 1],
        &[
            &["X0", "a1*X1", "X2", "a1*X3 + a3*X1", "0", "a3*X3"],
            &["0", "b1*X1", "X0", "b1*X3 + b3*X1", "X2", "b3*X3"],
        ],
        &ps,
    )?;
    MonadSpec::new(f.clone(), 3, -1, vec![vec![-2], vec![0; 6], vec![1, 1]], vec![alpha, beta], 0)
}

/// The deformation family 3O(−1) → 9O → 3O(1) through bundles with
/// spectrum (0,0,0); h^1(E(1)) jumps at t = 0.
pub fn c30_min<F: Field>(f: &F, t: &F::Elem) -> Result<MonadSpec<F>, Error> {
    let ps = [("t", t.clone())];
    let beta = fm_rows(
        f,
        &[0; 9],
        &[1; 3],
        &[
            &["X0", "X1", "0", "0", "X2", "t*X3", "t*X2", "X3", "0"],
            &["0", "X0", "X1", "X2", "X3", "0", "0", "0", "0"],
            &["0", "0", "0", "0", "0", "X0", "X1", "X2", "X3"],
        ],
        &ps,
    )?;
    let alpha_dual = fm_rows(
        f,
        &[0; 9],
        &[1; 3],
        &[
            &["X2", "X3", "0", "t*X3", "-X0 - t*X2", "0", "X2", "-X1", "0"],
            &["0", "X2", "X3", "-X0", "-X1", "0", "0", "0", "0"],
            &["-X3", "0", "0", "0", "0", "-X2", "X3", "X0", "-X1"],
        ],
        &ps,
    )?;
    let alpha = alpha_dual.transpose();
    MonadSpec::new(f.clone(), 3, -1, vec![vec![-1; 3], vec![0; 9], vec![1; 3]], vec![alpha, beta], 0)
}

/// O(−1)⊕O(−2) → 6O⊕O(−1) → 2O(1); h^1(E(1)) jumps at t = 0.
pub fn c32_moduli<F: Field>(f: &F, t: &F::Elem) -> Result<MonadSpec<F>, Error> {
    let ps = [("t", t.clone())];
    let mid = [0, 0, 0, 0, 0, 0, -1];
    let beta = fm_rows(
        f,
        &mid,
        &[1, 1],
        &[
            &["X0", "X1", "t*X2", "t*X3", "0", "X2", "X3^2"],
            &["0", "0", "X0", "X1", "X2", "X3", "0"],
        ],
        &ps,
    )?;
    let alpha_t = fm_rows(
        f,
        &[0, 0, 0, 0, 0, 0, 1],
        &[1, 2],
        &[
            &["X2", "0", "X3", "-X2", "X1", "-X0", "0"],
            &["X3^2 + t*X1*X3", "-X2^2 - t*X1*X2", "X1^2", "-X0*X1", "-X1*X3", "X1*X2", "-X0"],
        ],
        &ps,
    )?;
    let alpha = alpha_t.transpose();
    MonadSpec::new(f.clone(), 3, -1, vec![vec![-1, -2], mid.to_vec(), vec![1, 1]], vec![alpha, beta], 0)
}

/// The normal forms (1)–(7) of α_2^∨(−1) : 3O → 2O(1).
pub const ALPHA2_FORMS: [[[&str; 3]; 2]; 7] = [
    [["X0", "X1", "X2"], ["0", "X0", "X1"]],
    [["X0", "X1", "0"], ["0", "X0", "X2"]],
    [["X0", "0", "X2"], ["0", "X1", "X2"]],
    [["X0", "X1", "X2"], ["0", "X0", "X3"]],
    [["X0", "0", "X2"], ["0", "X1", "X3"]],
    [["X0", "X1", "X2"], ["0", "X2", "X3"]],
    [["X0", "X1", "X2"], ["X1", "X2", "X3"]],
];

/// The pencils excluded from the list above, (viii) and (ix).
pub const EXCLUDED_PENCILS: [[[&str; 3]; 2]; 2] = [
    [["X0", "X1", "0"], ["0", "X0", "X1"]],
    [["X0", "0", "X1"], ["0", "X0", "X2"]],
];

/// A 2×3 pencil of linear forms as a map 3O → 2O(1).
pub fn pencil_matrix<F: Field>(f: &F, rows: &[[&str; 3]; 2]) -> Result<FormMatrix<F::Elem>, Error> {
    fm_rows(f, &[0; 3], &[1; 2], &[&rows[0], &rows[1]], &[])
}

/// Basis of {α : ⊕O(left) → source(β) | β∘α = 0}; each basis element has a
/// single nonzero column.
pub fn solve_left_differential<F: Field>(
    f: &F,
    beta: &FormMatrix<F::Elem>,
    left: &[i64],
) -> Result<Vec<FormMatrix<F::Elem>>, Error> {
    let nvars = beta.nvars;
    let src = &beta.source;
    let mut basis = Vec::new();
    for (j, &lj) in left.iter().enumerate() {
        let sizes: Vec<usize> = src.iter().map(|&s| dim_s(nvars, s - lj)).collect();
        let ncols: usize = sizes.iter().sum();
        let blocks: Vec<Mat<F::Elem>> = beta
            .target
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let parts: Vec<Mat<F::Elem>> =
                    (0..src.len()).map(|i| graded::mult_matrix(f, beta.get(k, i), src[i] - lj)).collect();
                hcat_all(f, &parts, dim_s(nvars, beta.target[k] - lj))
            })
            .collect();
        let system = vcat_all(f, &blocks, ncols);
        let ker = matrix::kernel_basis(f, &system);
        for c in 0..ker.cols() {
            let v = ker.column(c);
            let mut alpha = form_matrix_zero(f, nvars, left, src);
            let mut off = 0;
            for (i, &sz) in sizes.iter().enumerate() {
                if sz > 0 {
                    let g = Form { nvars, degree: src[i] - lj, coeffs: v[off..off + sz].to_vec() };
                    alpha.set(i, j, g);
                }
                off += sz;
            }
            basis.push(alpha);
        }
    }
    Ok(basis)
}

fn hcat_all<F: Field>(f: &F, parts: &[Mat<F::Elem>], rows: usize) -> Mat<F::Elem> {
    parts.iter().fold(matrix::zeros(f, rows, 0), |acc, p| {
        if p.rows() == rows {
            acc.hcat(p)
        } else {
            acc.hcat(&matrix::zeros(f, rows, p.cols()))
        }
    })
}

fn vcat_all<F: Field>(f: &F, parts: &[Mat<F::Elem>], cols: usize) -> Mat<F::Elem> {
    parts.iter().fold(matrix::zeros(f, 0, cols), |acc, p| acc.vcat(p))
}

/// Random linear combination of a basis of form matrices.
pub fn random_combination<F: Field, R: Rng + ?Sized>(
    f: &F,
    basis: &[FormMatrix<F::Elem>],
    template: &FormMatrix<F::Elem>,
    rng: &mut R,
) -> FormMatrix<F::Elem> {
    basis.iter().fold(template.clone(), |acc, b| {
        let c = f.random(rng);
        complex::fm_add(f, &acc, &complex::fm_scale(f, &c, b))
    })
}

fn random_matrix<F: Field, R: Rng + ?Sized>(
    f: &F,
    source: &[i64],
    target: &[i64],
    rng: &mut R,
) -> FormMatrix<F::Elem> {
    let mut m = form_matrix_zero(f, 4, source, target);
    for (i, &t) in target.iter().enumerate() {
        for (j, &s) in source.iter().enumerate() {
            m.set(i, j, graded::random_form(f, 4, t - s, rng));
        }
    }
    m
}

/// Whether H^0 of a map of sums of line bundles is injective.
pub fn h0_injective<F: Field>(f: &F, m: &FormMatrix<F::Elem>) -> bool {
    let h = complex::h0_matrix(f, m, 0);
    matrix::rank(f, &h) == h.cols()
}

/// Draws a candidate with `gen` until `accept` holds or the budget runs out.
fn rejection<T, G, A>(what: &str, mut gen: G, mut accept: A) -> Result<T, Error>
where
    G: FnMut(usize) -> Result<T, Error>,
    A: FnMut(&T) -> Result<Option<String>, Error>,
{
    let mut last = String::from("no attempt made");
    for attempt in 0..MAX_TRIES {
        let cand = match gen(attempt) {
            Ok(c) => c,
            Err(e) => {
                last = e.to_string();
                continue;
            }
        };
        match accept(&cand)? {
            None => return Ok(cand),
            Some(reason) => last = reason,
        }
    }
    Err(Error::Exhausted(format!("{what}: {MAX_TRIES} tries, last failure: {last}")))
}

fn check_instance<F: Field>(m: &MonadSpec<F>) -> Result<Option<String>, Error> {
    if !is_bundle(m)? {
        return Ok(Some("not fiberwise exact".into()));
    }
    match scanners::stability_check(m)? {
        scanners::Stability::Stable => Ok(None),
        scanners::Stability::Unstable { h0, h0_dual } => {
            Ok(Some(format!("unstable: h0(E) = {h0}, h0(E^v) = {h0_dual}")))
        }
    }
}

/// A random monad of the given shape; α is a random point of the α-space
/// of a random β with H^0(β) injective.
fn random_monad<F: Field>(
    f: &F,
    what: &str,
    left: &[i64],
    mid: &[i64],
    right: &[i64],
    seed: u64,
) -> Result<MonadSpec<F>, Error> {
    let mut rng = complex::rng_from_seed(seed);
    let beta = rejection(
        &format!("{what}: beta"),
        |_| Ok(random_matrix(f, mid, right, &mut rng)),
        |b| Ok((!h0_injective(f, b)).then(|| "H^0(beta) not injective".to_string())),
    )?;
    let basis = solve_left_differential(f, &beta, left)?;
    let template = form_matrix_zero(f, 4, left, mid);
    let mut rng2 = complex::rng_from_seed(seed ^ 0x9e37_79b9_7f4a_7c15);
    rejection(
        &format!("{what}: alpha"),
        |_| {
            let alpha = random_combination(f, &basis, &template, &mut rng2);
            MonadSpec::new(
                f.clone(),
                3,
                -1,
                vec![left.to_vec(), mid.to_vec(), right.to_vec()],
                vec![alpha, beta.clone()],
                0,
            )
        },
        check_instance,
    )
}

/// 3O(−2) → 6O(−1) with a random linear map.
pub fn random_c36<F: Field>(f: &F, seed: u64) -> Result<MonadSpec<F>, Error> {
    let mut rng = complex::rng_from_seed(seed);
    rejection(
        "c36",
        |_| {
            let alpha = random_matrix(f, &[-2; 3], &[-1; 6], &mut rng);
            MonadSpec::new(f.clone(), 3, -1, vec![vec![-2; 3], vec![-1; 6]], vec![alpha], 0)
        },
        check_instance,
    )
}

/// Random 3O(−1) → 9O → 3O(1).
pub fn random_c30_min<F: Field>(f: &F, seed: u64) -> Result<MonadSpec<F>, Error> {
    random_monad(f, "c30_min", &[-1; 3], &[0; 9], &[1; 3], seed)
}

/// Random O(−1)⊕O(−2) → 6O⊕O(−1) → 2O(1).
pub fn random_c32<F: Field>(f: &F, seed: u64) -> Result<MonadSpec<F>, Error> {
    random_monad(f, "c32", &[-1, -2], &[0, 0, 0, 0, 0, 0, -1], &[1, 1], seed)
}

/// Random O(−2) → O(1)⊕3O⊕O(−1) → O(2), together with the coefficient
/// vector of the linear entry O(−2) → O(−1) of α.
pub fn random_c30_max<F: Field>(f: &F, seed: u64) -> Result<(MonadSpec<F>, Vec<F::Elem>), Error> {
    let m = random_monad(f, "c30_max", &[-2], &[1, 0, 0, 0, -1], &[2], seed)?;
    let h = m.diffs[0].get(4, 0).coeffs.clone();
    if h.iter().all(|c| f.is_zero(c)) {
        return Err(Error::Inconsistent("c30_max: the linear entry of alpha vanishes".into()));
    }
    Ok((m, h))
}

/// Random 2O(−2) → 3O⊕3O(−1) → O(1) with α_2 = (normal form `case`)^t and
/// β_1 three linear forms through a random point x. Returns the monad and x.
pub fn random_c34<F: Field>(f: &F, case: usize, seed: u64) -> Result<(MonadSpec<F>, Vec<F::Elem>), Error> {
    if !(1..=7).contains(&case) {
        return Err(Error::Parse(format!("normal form case {case} out of range 1..7")));
    }
    let phi = pencil_matrix(f, &ALPHA2_FORMS[case - 1])?;
    let mut rng = complex::rng_from_seed(seed);
    let x = projective::random_point(f, 3, &mut rng);
    let through_x = matrix::kernel_basis(f, &Mat::from_vec(1, 4, x.clone()));
    let space = solve_c34(f, &phi, &through_x)?;
    let mid = [0, 0, 0, -1, -1, -1];
    let built = rejection(
        "c34",
        |_| {
            let mut beta = form_matrix_zero(f, 4, &mid, &[1]);
            // β_1: a random basis of the linear forms vanishing at x
            let g = random_invertible(f, 3, &mut rng);
            let forms = matrix::mul(f, &through_x, &g);
            for i in 0..3 {
                beta.set(0, i, graded::linear(f, &forms.column(i)));
            }
            let v: Vec<F::Elem> = {
                let coeffs: Vec<F::Elem> = (0..space.basis.cols()).map(|_| f.random(&mut rng)).collect();
                let c = Mat::from_vec(coeffs.len(), 1, coeffs);
                matrix::mul(f, &space.basis, &c).column(0)
            };
            let (alpha1, beta2) = space.unpack(f, &v);
            // the α-space was computed for the standard β_1 = through_x;
            // a change of basis g on 3O transforms α_1 by g^{-1}
            let gi = matrix::inverse(f, &g).expect("invertible");
            let alpha1 = complex::compose(f, &complex::fm_from_scalars(f, 4, &gi, 0), &alpha1)?;
            for i in 0..3 {
                beta.set(0, 3 + i, beta2.get(0, i).clone());
            }
            let mut alpha = form_matrix_zero(f, 4, &[-2, -2], &mid);
            let alpha2 = phi.transpose().twisted(-1);
            for j in 0..2 {
                for i in 0..3 {
                    alpha.set(i, j, alpha1.get(i, j).clone());
                    alpha.set(3 + i, j, alpha2.get(i, j).clone());
                }
            }
            MonadSpec::new(f.clone(), 3, -1, vec![vec![-2, -2], mid.to_vec(), vec![1]], vec![alpha, beta], 0)
        },
        check_instance,
    )?;
    Ok((built, x))
}

struct C34Space<E> {
    /// Columns: α_1 coefficients (6 quadrics, column-major by α column)
    /// followed by β_2 coefficients (3 quadrics).
    basis: Mat<E>,
}

impl<E: Clone> C34Space<E> {
    fn unpack<F: Field<Elem = E>>(&self, f: &F, v: &[E]) -> (FormMatrix<E>, FormMatrix<E>) {
        let q = dim_s(4, 2);
        let mut alpha1 = form_matrix_zero(f, 4, &[-2, -2], &[0, 0, 0]);
        for j in 0..2 {
            for i in 0..3 {
                let off = (j * 3 + i) * q;
                alpha1.set(i, j, Form { nvars: 4, degree: 2, coeffs: v[off..off + q].to_vec() });
            }
        }
        let mut beta2 = form_matrix_zero(f, 4, &[-1, -1, -1], &[1]);
        for i in 0..3 {
            let off = (6 + i) * q;
            beta2.set(0, i, Form { nvars: 4, degree: 2, coeffs: v[off..off + q].to_vec() });
        }
        (alpha1, beta2)
    }
}

/// Solutions (α_1, β_2) of β_1 α_1 + β_2 α_2 = 0 for β_1 given by the
/// columns of `b1` (linear forms) and α_2 = φ^t.
fn solve_c34<F: Field>(f: &F, phi: &FormMatrix<F::Elem>, b1: &Mat<F::Elem>) -> Result<C34Space<F::Elem>, Error> {
    let q = dim_s(4, 2);
    let c = dim_s(4, 3);
    let mut system = matrix::zeros(f, 2 * c, 9 * q);
    for j in 0..2 {
        for i in 0..3 {
            let b = graded::linear(f, &b1.column(i));
            put_block(&mut system, j * c, (j * 3 + i) * q, &graded::mult_matrix(f, &b, 2));
            // α_2[i][j] = φ[j][i]
            put_block(&mut system, j * c, (6 + i) * q, &graded::mult_matrix(f, phi.get(j, i), 2));
        }
    }
    Ok(C34Space { basis: matrix::kernel_basis(f, &system) })
}

fn put_block<E: Clone>(m: &mut Mat<E>, r0: usize, c0: usize, b: &Mat<E>) {
    for r in 0..b.rows() {
        for c in 0..b.cols() {
            m.set(r0 + r, c0 + c, b.get(r, c).clone());
        }
    }
}

fn random_invertible<F: Field, R: Rng + ?Sized>(f: &F, n: usize, rng: &mut R) -> Mat<F::Elem> {
    loop {
        let m = Mat::from_vec(n, n, (0..n * n).map(|_| f.random(rng)).collect());
        if matrix::rank(f, &m) == n {
            return m;
        }
    }
}

/// Random instance of a monad shape by name.
pub fn random_instance<F: Field>(f: &F, shape: &str, seed: u64) -> Result<MonadSpec<F>, Error> {
    match shape {
        "c36" => random_c36(f, seed),
        "c30_min" => random_c30_min(f, seed),
        "c30_max" => random_c30_max(f, seed).map(|p| p.0),
        "c32" => random_c32(f, seed),
        "c34" => random_c34(f, 7, seed).map(|p| p.0),
        _ => Err(Error::Parse(format!("unknown shape `{shape}` (known: c36, c30_min, c30_max, c32, c34)"))),
    }
}

/// Secant line of the twisted cubic of planes Σ t_0^{3−i} t_1^i X_i = 0
/// through the parameters t and u.
pub fn schwarzenberger_secant<F: Field>(f: &F, t: &[F::Elem; 2], u: &[F::Elem; 2]) -> Option<LinearSubspace<F::Elem>> {
    let plane = |p: &[F::Elem; 2]| -> Vec<F::Elem> {
        (0..4)
            .map(|i| {
                let mut c = f.one();
                for _ in 0..3 - i {
                    c = f.mul(&c, &p[0]);
                }
                for _ in 0..i {
                    c = f.mul(&c, &p[1]);
                }
                c
            })
            .collect()
    };
    LinearSubspace::from_equations(f, &[plane(t), plane(u)])
}

/// Line joining (0:a:0:b) ∈ {X_0 = X_2 = 0} and (c:0:d:0) ∈ {X_1 = X_3 = 0}.
pub fn c32_special_line<F: Field>(f: &F, ab: &[F::Elem; 2], cd: &[F::Elem; 2]) -> Option<LinearSubspace<F::Elem>> {
    let z = f.zero();
    let p = vec![z.clone(), ab[0].clone(), z.clone(), ab[1].clone()];
    let q = vec![cd[0].clone(), z.clone(), cd[1].clone(), z];
    projective::line_through(f, &p, &q)
}

// ---------------------------------------------------------------------------
// canonical forms of β

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaShape {
    /// 9O → 3O(1).
    C30,
    /// 6O⊕O(−1) → 2O(1).
    C32,
}

/// A β brought to its canonical pattern: `canonical = g ∘ input ∘ c` with
/// g and c automorphisms of the target and the source.
#[derive(Clone, Debug)]
pub struct CanonicalBeta<E> {
    pub canonical: FormMatrix<E>,
    pub g: FormMatrix<E>,
    pub c: FormMatrix<E>,
    /// The basis h_0..h_3 of S_1 the pattern refers to, as coefficient rows.
    pub h: Mat<E>,
}

/// Coordinates of a linear form in the basis given by the rows of `h`.
fn coords_in<F: Field>(f: &F, h: &Mat<F::Elem>, form: &Form<F::Elem>) -> Option<Vec<F::Elem>> {
    if form.degree != 1 {
        return if graded::is_zero(f, form) { Some(vec![f.zero(); h.rows()]) } else { None };
    }
    let rhs = Mat::from_vec(4, 1, form.coeffs.clone());
    matrix::solve(f, &h.transpose(), &rhs).map(|s| s.column(0))
}

/// Extends independent rows to a basis of k^4 with standard vectors.
fn complete_basis<F: Field>(f: &F, rows: &[Vec<F::Elem>]) -> Result<Mat<F::Elem>, Error> {
    let base = Mat::from_vec(rows.len(), 4, rows.concat()).transpose();
    if matrix::rank(f, &base) < rows.len() {
        return Err(Error::Inconsistent("linear forms of the pattern are dependent".into()));
    }
    let pool = matrix::identity(f, 4);
    let extra = matrix::extend_basis(f, &base, &pool);
    let mut all = rows.to_vec();
    for e in extra {
        all.push(pool.column(e));
    }
    Ok(Mat::from_vec(4, 4, all.concat()))
}

fn lin<F: Field>(f: &F, coeffs: &[F::Elem]) -> Form<F::Elem> {
    graded::linear(f, coeffs)
}

/// Brings β to the pattern of its shape.
pub fn canonicalize_beta<F: Field>(
    f: &F,
    beta: &FormMatrix<F::Elem>,
    shape: BetaShape,
    seed: u64,
) -> Result<CanonicalBeta<F::Elem>, Error> {
    let out = match shape {
        BetaShape::C30 => canonicalize_c30(f, beta, seed)?,
        BetaShape::C32 => canonicalize_c32(f, beta, seed)?,
    };
    let again = compose(f, &compose(f, &out.g, beta)?, &out.c)?;
    if again != out.canonical {
        return Err(Error::Inconsistent("recorded automorphisms do not reproduce the canonical form".into()));
    }
    if !pattern_holds(f, &out.canonical, shape) {
        return Err(Error::Inconsistent("canonical form violates its pattern".into()));
    }
    Ok(out)
}

fn scalar_fm<F: Field>(f: &F, m: &Mat<F::Elem>, twists: &[i64]) -> FormMatrix<F::Elem> {
    let mut out = form_matrix_zero(f, 4, twists, twists);
    for i in 0..twists.len() {
        for j in 0..twists.len() {
            if twists[i] == twists[j] {
                out.set(i, j, graded::constant(f, 4, m.get(i, j).clone()));
            }
        }
    }
    out
}

fn canonicalize_c30<F: Field>(f: &F, beta: &FormMatrix<F::Elem>, seed: u64) -> Result<CanonicalBeta<F::Elem>, Error> {
    if beta.source != vec![0; 9] || beta.target != vec![1; 3] {
        return Err(Error::Shape("c30 canonical form needs beta : 9O -> 3O(1)".into()));
    }
    let h0b = complex::h0_matrix(f, beta, 0);
    if matrix::rank(f, &h0b) != 9 {
        return Err(Error::Inconsistent("H^0(beta) is not injective".into()));
    }
    // ξ ∈ H^1(E(−1)) ≅ k^3 with S_1 ξ + im H^0(β) = H^0(3O(1))
    let mut rng = complex::rng_from_seed(seed);
    let vars: Vec<Form<F::Elem>> = (0..4).map(|i| graded::variable(f, 4, i)).collect();
    let xi = rejection(
        "c30 canonical form: xi",
        |_| {
            let v: Vec<F::Elem> = (0..3).map(|_| f.random(&mut rng)).collect();
            Ok(v)
        },
        |v| {
            if v.iter().all(|c| f.is_zero(c)) {
                return Ok(Some("zero vector".into()));
            }
            let mut cols = h0b.clone();
            for x in &vars {
                let col: Vec<F::Elem> = v.iter().flat_map(|c| graded::scale(f, c, x).coeffs).collect();
                cols = cols.hcat(&Mat::from_vec(12, 1, col));
            }
            Ok((matrix::rank(f, &cols) != 12).then(|| "S_1 xi misses H^1(E)".to_string()))
        },
    )?;
    // g sends ξ to the first basis vector
    let pool = matrix::identity(f, 3);
    let vcol = Mat::from_vec(3, 1, xi.clone());
    let mut cols = vec![xi.clone()];
    for e in matrix::extend_basis(f, &vcol, &pool) {
        cols.push(pool.column(e));
    }
    let p = Mat::from_columns(3, &cols, f.zero());
    let g0 = matrix::inverse(f, &p).expect("basis");
    let mut g = scalar_fm(f, &g0, &[1; 3]);
    let mut b = compose(f, &g, beta)?;

    for attempt in 0..2 {
        let b23 = b.select_rows(&[1, 2]);
        let h23 = complex::h0_matrix(f, &b23, 0);
        if matrix::rank(f, &h23) != 8 {
            return Err(Error::Inconsistent("H^0(beta_23) is not surjective".into()));
        }
        let k = matrix::kernel_basis(f, &h23).column(0);
        let mut kcol = form_matrix_zero(f, 4, &[0; 9], &[0]);
        for (j, kj) in k.iter().enumerate() {
            kcol.set(0, j, graded::constant(f, 4, kj.clone()));
        }
        let h0 = compose(f, &b, &kcol.transpose())?.get(0, 0).clone();
        let h0 = h0.coeffs.clone();
        // preimage under H^0(β_23) of (v, 0) and (0, v)
        let pre = |row: usize, v: &[F::Elem]| -> Vec<F::Elem> {
            let mut rhs = vec![f.zero(); 8];
            for i in 0..4 {
                rhs[row * 4 + i] = v[i].clone();
            }
            matrix::solve(f, &h23, &Mat::from_vec(8, 1, rhs)).expect("surjective").column(0)
        };
        let first_row_at = |col: &[F::Elem]| -> Vec<F::Elem> {
            let mut acc = vec![f.zero(); 4];
            for (j, cj) in col.iter().enumerate() {
                for (i, a) in b.get(0, j).coeffs.iter().enumerate() {
                    acc[i] = f.add(&acc[i], &f.mul(cj, a));
                }
            }
            acc
        };
        let h1p = first_row_at(&pre(0, &h0));
        let in_kh0 = |v: &[F::Elem]| {
            let m = Mat::from_vec(2, 4, [h0.clone(), v.to_vec()].concat());
            matrix::rank(f, &m) < 2
        };
        if in_kh0(&h1p) {
            if attempt == 0 {
                let swap = matrix::from_i64(f, 3, 3, &[1, 0, 0, 0, 0, 1, 0, 1, 0]);
                let sw = scalar_fm(f, &swap, &[1; 3]);
                g = compose(f, &sw, &g)?;
                b = compose(f, &sw, &b)?;
                continue;
            }
            return Err(Error::Inconsistent("h1' and h5' both lie in k*h0".into()));
        }
        let h = complete_basis(f, &[h0.clone(), h1p.clone()])?;
        // source change: column 0 = kernel, columns 1..4 / 5..8 = preimages
        let mut cmat: Vec<Vec<F::Elem>> = vec![k.clone()];
        for row in 0..2 {
            for i in 0..4 {
                cmat.push(pre(row, h.row(i)));
            }
        }
        let cm = Mat::from_columns(9, &cmat, f.zero());
        let mut c = scalar_fm(f, &cm, &[0; 9]);
        let mut bc = compose(f, &b, &c)?;
        // row 1 += a·row 2 + b·row 3 clears the h_1-part of h_2', h_6'
        let hc = |form: &Form<F::Elem>| coords_in(f, &h, form).expect("linear entry");
        let a2 = f.neg(&hc(bc.get(0, 2))[1]);
        let a3 = f.neg(&hc(bc.get(0, 6))[1]);
        let mut rowop = matrix::identity(f, 3);
        rowop.set(0, 1, a2);
        rowop.set(0, 2, a3);
        let rg = scalar_fm(f, &rowop, &[1; 3]);
        g = compose(f, &rg, &g)?;
        bc = compose(f, &rg, &bc)?;
        // column j −= (h_0-coefficient of the first-row entry)·column 0
        let mut colop = matrix::identity(f, 9);
        for j in 1..9 {
            colop.set(0, j, f.neg(&hc(bc.get(0, j))[0]));
        }
        let cc = scalar_fm(f, &colop, &[0; 9]);
        c = compose(f, &c, &cc)?;
        bc = compose(f, &bc, &cc)?;
        return Ok(CanonicalBeta { canonical: bc, g, c, h });
    }
    unreachable!()
}

fn canonicalize_c32<F: Field>(f: &F, beta: &FormMatrix<F::Elem>, seed: u64) -> Result<CanonicalBeta<F::Elem>, Error> {
    let mid = [0, 0, 0, 0, 0, 0, -1];
    if beta.source != mid || beta.target != vec![1, 1] {
        return Err(Error::Shape("c32 canonical form needs beta : 6O+O(-1) -> 2O(1)".into()));
    }
    if !h0_injective(f, beta) {
        return Err(Error::Inconsistent("H^0(beta) is not injective".into()));
    }
    let lin_rows = |b: &FormMatrix<F::Elem>, r: usize| -> Mat<F::Elem> {
        let cols: Vec<Vec<F::Elem>> = (0..6).map(|j| b.get(r, j).coeffs.clone()).collect();
        Mat::from_columns(4, &cols, f.zero())
    };
    // a general combination of the rows becomes the second row
    let mut rng = complex::rng_from_seed(seed);
    let pi = rejection(
        "c32 canonical form: projection",
        |_| Ok([f.random(&mut rng), f.random(&mut rng)]),
        |p| {
            let r = matrix::add(f, &matrix::scale(f, &p[0], &lin_rows(beta, 0)), &matrix::scale(f, &p[1], &lin_rows(beta, 1)));
            Ok((matrix::rank(f, &r) != 4).then(|| "projected beta_1 is not onto".to_string()))
        },
    )?;
    let first = if f.is_zero(&pi[0]) { vec![f.one(), f.zero()] } else { vec![f.zero(), f.one()] };
    let g0 = Mat::from_vec(2, 2, [first, pi.to_vec()].concat());
    let g = scalar_fm(f, &g0, &[1, 1]);
    let b = compose(f, &g, beta)?;
    let r2 = lin_rows(&b, 1);
    let ker = matrix::kernel_basis(f, &r2);
    let first_row_at = |col: &[F::Elem]| -> Vec<F::Elem> {
        let mut acc = vec![f.zero(); 4];
        for (j, cj) in col.iter().enumerate() {
            for (i, a) in b.get(0, j).coeffs.iter().enumerate() {
                acc[i] = f.add(&acc[i], &f.mul(cj, a));
            }
        }
        acc
    };
    let (k0, k1) = (ker.column(0), ker.column(1));
    let (h0, h1) = (first_row_at(&k0), first_row_at(&k1));
    let h = complete_basis(f, &[h0, h1])?;
    let mut cols = vec![k0, k1];
    for i in 0..4 {
        let rhs = Mat::from_vec(4, 1, h.row(i).to_vec());
        cols.push(matrix::solve(f, &r2, &rhs).expect("onto").column(0));
    }
    let cm6 = Mat::from_columns(6, &cols, f.zero());
    let mut c = form_matrix_zero(f, 4, &mid, &mid);
    for i in 0..6 {
        for j in 0..6 {
            c.set(i, j, graded::constant(f, 4, cm6.get(i, j).clone()));
        }
    }
    c.set(6, 6, graded::constant(f, 4, f.one()));
    let bc = compose(f, &b, &c)?;
    // clear the second-row quadric of the last column with columns 2..5
    let mut c2 = form_matrix_zero(f, 4, &mid, &mid);
    for i in 0..7 {
        c2.set(i, i, graded::constant(f, 4, f.one()));
    }
    for (i, l) in quadric_parts(f, &h, bc.get(1, 6)).into_iter().enumerate() {
        c2.set(2 + i, 6, graded::neg(f, &l));
    }
    let c = compose(f, &c, &c2)?;
    let bc = compose(f, &bc, &c2)?;
    // clear the (h_0, h_1)-parts using the first two columns
    let hc = |form: &Form<F::Elem>| coords_in(f, &h, form).expect("linear entry");
    let mut cc = form_matrix_zero(f, 4, &mid, &mid);
    for i in 0..7 {
        cc.set(i, i, graded::constant(f, 4, f.one()));
    }
    for j in 2..6 {
        let w = hc(bc.get(0, j));
        cc.set(0, j, graded::constant(f, 4, f.neg(&w[0])));
        cc.set(1, j, graded::constant(f, 4, f.neg(&w[1])));
    }
    let (l0, l1) = split_quadric(f, &h, bc.get(0, 6));
    cc.set(0, 6, graded::neg(f, &l0));
    cc.set(1, 6, graded::neg(f, &l1));
    let c = compose(f, &c, &cc)?;
    let canonical = compose(f, &bc, &cc)?;
    Ok(CanonicalBeta { canonical, g, c, h })
}

/// Writes q = l_0 h_0 + l_1 h_1 + (part in k[h_2, h_3]) and returns (l_0, l_1).
fn split_quadric<F: Field>(f: &F, h: &Mat<F::Elem>, q: &Form<F::Elem>) -> (Form<F::Elem>, Form<F::Elem>) {
    let [l0, l1, _, _] = quadric_parts(f, h, q);
    (l0, l1)
}

/// Linear forms l_i with q = Σ l_i h_i, l_i free of h_0..h_{i−1}.
fn quadric_parts<F: Field>(f: &F, h: &Mat<F::Elem>, q: &Form<F::Elem>) -> [Form<F::Elem>; 4] {
    // in coordinates Y = H X the form becomes q(H^{-1} Y)
    let hinv = matrix::inverse(f, h).expect("basis");
    let to_y = LinearSubspace { param: hinv.transpose() };
    let qy = graded::substitute(f, q, &to_y);
    let mut parts: [Form<F::Elem>; 4] = std::array::from_fn(|_| graded::zero_form(f, 4, 1));
    for (coef, e) in graded::terms(f, &qy) {
        let i = (0..4).find(|&i| e[i] > 0).expect("quadric monomial");
        let mut r = e.clone();
        r[i] -= 1;
        parts[i] = graded::add(f, &parts[i], &graded::monomial(f, &r, coef));
    }
    // back to X: Y_i = h_i(X)
    let to_x = LinearSubspace { param: h.transpose() };
    parts.map(|l| graded::substitute(f, &l, &to_x))
}

fn in_span<F: Field>(f: &F, h: &Mat<F::Elem>, g: &Form<F::Elem>, allowed: &[usize]) -> bool {
    match coords_in(f, h, g) {
        None => false,
        Some(c) => c.iter().enumerate().all(|(i, x)| allowed.contains(&i) || f.is_zero(x)),
    }
}

/// The basis h read off the canonical matrix, if the fixed entries form one.
pub fn pattern_basis<F: Field>(f: &F, beta: &FormMatrix<F::Elem>, shape: BetaShape) -> Option<Mat<F::Elem>> {
    let (row, cols) = match shape {
        BetaShape::C30 => (1, [1, 2, 3, 4]),
        BetaShape::C32 => (1, [2, 3, 4, 5]),
    };
    let mut rows = Vec::new();
    for j in cols {
        let e = beta.get(row, j);
        if e.degree != 1 {
            return None;
        }
        rows.push(e.coeffs.clone());
    }
    let h = Mat::from_vec(4, 4, rows.concat());
    (matrix::rank(f, &h) == 4).then_some(h)
}

/// Whether β has exactly the canonical pattern of its shape.
pub fn pattern_holds<F: Field>(f: &F, beta: &FormMatrix<F::Elem>, shape: BetaShape) -> bool {
    let Some(h) = pattern_basis(f, beta, shape) else {
        return false;
    };
    let hv = |i: usize| lin(f, h.row(i));
    let eq = |a: &Form<F::Elem>, b: &Form<F::Elem>| graded::is_zero(f, &graded::sub(f, a, b));
    let zero = |a: &Form<F::Elem>| graded::is_zero(f, a);
    match shape {
        BetaShape::C30 => {
            if beta.rows() != 3 || beta.cols() != 9 {
                return false;
            }
            let row2_ok = zero(beta.get(1, 0)) && (5..9).all(|j| zero(beta.get(1, j)));
            let row3_ok = (0..5).all(|j| zero(beta.get(2, j))) && (0..4).all(|i| eq(beta.get(2, 5 + i), &hv(i)));
            let row1_fixed = eq(beta.get(0, 0), &hv(0)) && eq(beta.get(0, 1), &hv(1));
            let primes = in_span(f, &h, beta.get(0, 2), &[2, 3])
                && in_span(f, &h, beta.get(0, 6), &[2, 3])
                && [3, 4, 5, 7, 8].iter().all(|&j| in_span(f, &h, beta.get(0, j), &[1, 2, 3]));
            row2_ok && row3_ok && row1_fixed && primes
        }
        BetaShape::C32 => {
            if beta.rows() != 2 || beta.cols() != 7 {
                return false;
            }
            let row2_ok = zero(beta.get(1, 0)) && zero(beta.get(1, 1)) && zero(beta.get(1, 6));
            let row1_fixed = eq(beta.get(0, 0), &hv(0)) && eq(beta.get(0, 1), &hv(1));
            let primes = (2..6).all(|j| in_span(f, &h, beta.get(0, j), &[2, 3]));
            let q_ok = {
                let (l0, l1) = split_quadric(f, &h, beta.get(0, 6));
                zero(&l0) && zero(&l1)
            };
            row2_ok && row1_fixed && primes && q_ok
        }
    }
}

/// The jump predicate on a canonical β: for C30, h_2' = h_6' = 0 and
/// h_5' ∈ k h_1; for C32, h_2' = h_3' = 0.
pub fn jump_predicate<F: Field>(f: &F, beta: &FormMatrix<F::Elem>, shape: BetaShape) -> Option<bool> {
    let h = pattern_basis(f, beta, shape)?;
    let zero = |a: &Form<F::Elem>| graded::is_zero(f, a);
    Some(match shape {
        BetaShape::C30 => zero(beta.get(0, 2)) && zero(beta.get(0, 6)) && in_span(f, &h, beta.get(0, 5), &[1]),
        BetaShape::C32 => zero(beta.get(0, 2)) && zero(beta.get(0, 3)),
    })
}

/// The line h_0 = h_1 = 0 of a canonical β.
pub fn l0_line<F: Field>(f: &F, h: &Mat<F::Elem>) -> Option<LinearSubspace<F::Elem>> {
    LinearSubspace::from_equations(f, &[h.row(0).to_vec(), h.row(1).to_vec()])
}

/// Left-shape parsing for the CLI: "-1,-1,-1" or "3x-1".
pub fn parse_twists(s: &str) -> Result<TwistList, Error> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::Parse(format!("bad twist list entry `{part}`"));
        match part.split_once('x') {
            Some((n, a)) => {
                let n: usize = n.parse().map_err(|_| bad())?;
                let a: i64 = a.parse().map_err(|_| bad())?;
                out.extend(std::iter::repeat_n(a, n));
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("empty twist list".into()));
    }
    Ok(out)
}
