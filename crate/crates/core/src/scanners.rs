//! Detectors: stability, restrictions to planes, unstable planes, jumping
//! lines, the μ-matrix of H^1 multiplication, the bilinear criterion and
//! the classifier for 2×3 pencils of linear forms.

use std::collections::BTreeMap;
use std::fmt;

use crate::cohomology::{self, hypercoh, CohTable};
use crate::complex::{self, dualize, restrict, FormMatrix, MonadSpec};
use crate::field::Field;
use crate::graded::{self, dim_s, Form, LinearSubspace};
use crate::matrix::{self, Mat};
use crate::p1split::{self, Splitting};
use crate::projective;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable { h0: usize, h0_dual: usize },
}

impl fmt::Display for Stability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stability::Stable => write!(f, "stable"),
            Stability::Unstable { h0, h0_dual } => write!(f, "unstable h0={h0} h0_dual={h0_dual}"),
        }
    }
}

fn h0_at<F: Field>(m: &MonadSpec<F>, l: i64) -> Result<usize, Error> {
    hypercoh(m, l)?
        .get(0)
        .exact()
        .ok_or_else(|| Error::Unsupported(format!("h^0 at twist {l} is not determined by E_2")))
}

/// Stability of a rank 2 or 3 bundle with c_1 = 0: h^0(E) = h^0(E^∨) = 0.
pub fn stability_check<F: Field>(m: &MonadSpec<F>) -> Result<Stability, Error> {
    let r = m.rank();
    if !(2..=3).contains(&r) || complex::first_chern(m) != 0 {
        return Err(Error::Unsupported(format!(
            "stability test needs rank 2 or 3 and c1 = 0, got rank {r} and c1 = {}",
            complex::first_chern(m)
        )));
    }
    let h0 = h0_at(m, 0)?;
    let h0_dual = h0_at(&dualize(m), 0)?;
    Ok(if h0 == 0 && h0_dual == 0 { Stability::Stable } else { Stability::Unstable { h0, h0_dual } })
}

/// Which objects a scan visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Universe {
    /// Every object defined over the (finite) base field.
    Exhaustive,
    Sample { count: usize, seed: u64 },
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Universe::Exhaustive => write!(f, "exhaustive"),
            Universe::Sample { count, seed } => write!(f, "sample count={count} seed={seed}"),
        }
    }
}

/// Planes of P^3 as normalized linear forms.
pub fn planes<F: Field>(f: &F, u: Universe) -> Result<Vec<Vec<F::Elem>>, Error> {
    match u {
        Universe::Exhaustive => projective::all_points(f, 3)
            .ok_or_else(|| Error::Unsupported("exhaustive scans need a finite field".into())),
        Universe::Sample { count, seed } => {
            let mut rng = complex::rng_from_seed(seed);
            Ok((0..count).map(|_| projective::random_point(f, 3, &mut rng)).collect())
        }
    }
}

pub fn lines<F: Field>(f: &F, u: Universe) -> Result<Vec<LinearSubspace<F::Elem>>, Error> {
    match u {
        Universe::Exhaustive => projective::all_lines_p3(f)
            .ok_or_else(|| Error::Unsupported("exhaustive scans need a finite field".into())),
        Universe::Sample { count, seed } => {
            let mut rng = complex::rng_from_seed(seed);
            Ok((0..count).map(|_| projective::random_line_p3(f, &mut rng)).collect())
        }
    }
}

/// Tab-separated scan output with a commented preamble and summary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub title: String,
    pub universe: String,
    pub field: String,
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
    pub summary: Vec<(String, String)>,
}

impl ScanReport {
    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {}\n# universe: {}\n# field: {}\n", self.title, self.universe, self.field);
        out.push_str(&self.header.join("\t"));
        out.push('\n');
        for r in &self.records {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out
    }

    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn format_vector<F: Field>(f: &F, v: &[F::Elem]) -> String {
    v.iter().map(|c| f.format(c)).collect::<Vec<_>>().join(",")
}

/// h^0 of E_H and E_H^∨ for the plane {h = 0}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneRecord<E> {
    pub h: Vec<E>,
    pub h0: usize,
    pub h0_dual: usize,
}

pub fn plane_record<F: Field>(m: &MonadSpec<F>, h: &[F::Elem]) -> Result<PlaneRecord<F::Elem>, Error> {
    let plane = projective::hyperplane(&m.field, h);
    let r = restrict(m, &plane);
    Ok(PlaneRecord { h: h.to_vec(), h0: h0_at(&r, 0)?, h0_dual: h0_at(&dualize(&r), 0)? })
}

pub fn plane_records<F: Field>(m: &MonadSpec<F>, hs: &[Vec<F::Elem>]) -> Result<Vec<PlaneRecord<F::Elem>>, Error> {
    crate::par::map_collect(hs, |h| plane_record(m, h)).into_iter().collect()
}

/// Restrictions to planes; a plane counts as stable when both h^0 vanish.
pub fn restriction_stability_sample<F: Field>(m: &MonadSpec<F>, u: Universe) -> Result<ScanReport, Error> {
    let f = &m.field;
    let hs = planes(f, u)?;
    let recs = plane_records(m, &hs)?;
    let stable = recs.iter().filter(|r| r.h0 == 0 && r.h0_dual == 0).count();
    let with_h0 = recs.iter().filter(|r| r.h0 > 0).count();
    let with_dual = recs.iter().filter(|r| r.h0_dual > 0).count();
    Ok(ScanReport {
        title: "restriction to planes".into(),
        universe: u.to_string(),
        field: f.spec().to_string(),
        header: vec!["plane".into(), "h0(E_H)".into(), "h0(E_H^v)".into()],
        records: recs
            .iter()
            .map(|r| vec![format_vector(f, &r.h), r.h0.to_string(), r.h0_dual.to_string()])
            .collect(),
        summary: vec![
            ("planes".into(), recs.len().to_string()),
            ("stable restrictions".into(), stable.to_string()),
            ("planes with h0(E_H) > 0".into(), with_h0.to_string()),
            ("planes with h0(E_H^v) > 0".into(), with_dual.to_string()),
            ("general restriction stable".into(), general(stable, recs.len()).to_string()),
        ],
    })
}

/// "General" means at least 90% of the visited objects.
pub fn general(hits: usize, total: usize) -> bool {
    total > 0 && hits * 10 >= total * 9
}

/// Largest r ≥ 1 with h^0(E_H^∨(−r)) > 0, or 0.
pub fn unstable_plane_order<F: Field>(m: &MonadSpec<F>, h: &[F::Elem]) -> Result<usize, Error> {
    let plane = projective::hyperplane(&m.field, h);
    let dual = dualize(&restrict(m, &plane));
    let mut r = 0;
    while r < 64 && h0_at(&dual, -(r as i64) - 1)? > 0 {
        r += 1;
    }
    Ok(r)
}

/// Planes with their h^0 data and unstable-plane order.
pub fn plane_scan<F: Field>(m: &MonadSpec<F>, u: Universe) -> Result<ScanReport, Error> {
    let f = &m.field;
    let hs = planes(f, u)?;
    let rows: Vec<(PlaneRecord<F::Elem>, usize)> = crate::par::map_collect(&hs, |h| -> Result<_, Error> {
        Ok((plane_record(m, h)?, unstable_plane_order(m, h)?))
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let unstable = rows.iter().filter(|(_, o)| *o > 0).count();
    let max_order = rows.iter().map(|(_, o)| *o).max().unwrap_or(0);
    let max_h0 = rows.iter().map(|(r, _)| r.h0).max().unwrap_or(0);
    Ok(ScanReport {
        title: "plane scan".into(),
        universe: u.to_string(),
        field: f.spec().to_string(),
        header: vec!["plane".into(), "h0(E_H)".into(), "h0(E_H^v)".into(), "unstable_order".into()],
        records: rows
            .iter()
            .map(|(r, o)| vec![format_vector(f, &r.h), r.h0.to_string(), r.h0_dual.to_string(), o.to_string()])
            .collect(),
        summary: vec![
            ("planes".into(), rows.len().to_string()),
            ("unstable planes".into(), unstable.to_string()),
            ("max unstable order".into(), max_order.to_string()),
            ("max h0(E_H)".into(), max_h0.to_string()),
        ],
    })
}

// ---------------------------------------------------------------------------
// μ

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    E,
    Dual,
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "E" | "e" | "bundle" => Ok(Side::E),
            "dual" | "E_dual" | "Ev" => Ok(Side::Dual),
            _ => Err(Error::Parse(format!("unknown side `{s}` (use E or dual)"))),
        }
    }
}

/// Multiplication H^1(E′(−1)) ⊗ S_1 → H^1(E′) as four matrices M_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuData<E> {
    pub d_in: usize,
    pub d_out: usize,
    pub m: Vec<Mat<E>>,
}

impl<E: Clone> MuData<E> {
    /// M(h) = Σ h_i M_i.
    pub fn at<F: Field<Elem = E>>(&self, f: &F, h: &[E]) -> Mat<E> {
        let mut acc = matrix::zeros(f, self.d_out, self.d_in);
        for (i, hi) in h.iter().enumerate() {
            acc = matrix::add(f, &acc, &matrix::scale(f, hi, &self.m[i]));
        }
        acc
    }

    /// dim ker M(h).
    pub fn corank<F: Field<Elem = E>>(&self, f: &F, h: &[E]) -> usize {
        self.d_in - matrix::rank(f, &self.at(f, h))
    }

    /// dim ∩ ker M_i: nonzero exactly when some ξ has S_1 ξ = 0.
    pub fn common_kernel_dim<F: Field<Elem = E>>(&self, f: &F) -> usize {
        let stacked = self.m.iter().fold(matrix::zeros(f, 0, self.d_in), |acc, mi| acc.vcat(mi));
        self.d_in - matrix::rank(f, &stacked)
    }
}

pub fn mu_build<F: Field>(m: &MonadSpec<F>, side: Side) -> Result<MuData<F::Elem>, Error> {
    let e = match side {
        Side::E => m.clone(),
        Side::Dual => dualize(m),
    };
    let slice = cohomology::graded_module(&e, 1, -1, 0)?;
    let (d_in, d_out) = (slice.dim(-1), slice.dim(0));
    let mats = (0..4).map(|i| slice.var_map(i, -1).clone()).collect();
    Ok(MuData { d_in, d_out, m: mats })
}

impl<E: Clone> MuData<E> {
    /// Whether S_1 ξ spans H^1(E′) for ξ ∈ H^1(E′(−1)).
    pub fn generates<F: Field<Elem = E>>(&self, f: &F, xi: &[E]) -> bool {
        let v = Mat::from_vec(self.d_in, 1, xi.to_vec());
        let cols: Vec<Mat<E>> = self.m.iter().map(|mi| matrix::mul(f, mi, &v)).collect();
        let span = cols.iter().fold(matrix::zeros(f, self.d_out, 0), |acc, c| acc.hcat(c));
        matrix::rank(f, &span) == self.d_out
    }
}

/// dim of the cokernel of (h_0, h_1) : 2H^1(E(l)) → H^1(E(l+1)) for a line
/// {h_0 = h_1 = 0}.
pub fn line_multiplication_cokernel<F: Field>(
    m: &MonadSpec<F>,
    equations: &[Vec<F::Elem>],
    l: i64,
) -> Result<usize, Error> {
    let f = &m.field;
    let slice = cohomology::graded_module(m, 1, l, l + 1)?;
    let target = slice.dim(l + 1);
    let image = equations
        .iter()
        .fold(matrix::zeros(f, target, 0), |acc, h| acc.hcat(&slice.linear_map(f, h, l)));
    Ok(target - matrix::rank(f, &image))
}

/// Histogram corank → number of planes.
pub fn mu_corank_scan<F: Field>(f: &F, mu: &MuData<F::Elem>, hs: &[Vec<F::Elem>]) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for c in crate::par::map_collect(hs, |h| mu.corank(f, h)) {
        *hist.entry(c).or_insert(0) += 1;
    }
    hist
}

/// The degree a of Ker μ ≅ O(a) on the dual space: −s for the least s in
/// 1..=4 such that some nonzero v of forms of degree s − 1 has M(y) v = 0.
/// `None` when no such s exists in that range.
pub fn kernel_degree<F: Field>(f: &F, mu: &MuData<F::Elem>) -> Option<i64> {
    if mu.d_in == 0 {
        return None;
    }
    let ys: Vec<Form<F::Elem>> = (0..4).map(|i| graded::variable(f, 4, i)).collect();
    for s in 1..=4i64 {
        let src = dim_s(4, s - 1);
        let dst = dim_s(4, s);
        let mut system = matrix::zeros(f, mu.d_out * dst, mu.d_in * src);
        for (i, y) in ys.iter().enumerate() {
            let mult = graded::mult_matrix(f, y, s - 1);
            for r in 0..mu.d_out {
                for c in 0..mu.d_in {
                    let coeff = mu.m[i].get(r, c);
                    if f.is_zero(coeff) {
                        continue;
                    }
                    for a in 0..dst {
                        for b in 0..src {
                            let cur = system.get(r * dst + a, c * src + b).clone();
                            let v = f.add(&cur, &f.mul(coeff, mult.get(a, b)));
                            system.set(r * dst + a, c * src + b, v);
                        }
                    }
                }
            }
        }
        if matrix::rank(f, &system) < system.cols() {
            return Some(-s);
        }
    }
    None
}

pub fn mu_report<F: Field>(f: &F, mu: &MuData<F::Elem>, u: Universe) -> Result<ScanReport, Error> {
    let hs = planes(f, u)?;
    let hist = mu_corank_scan(f, mu, &hs);
    let mut records = Vec::new();
    for (i, mi) in mu.m.iter().enumerate() {
        for r in 0..mi.rows() {
            records.push(vec![format!("M{i}"), r.to_string(), format_vector(f, mi.row(r))]);
        }
    }
    let hist_s: Vec<String> = hist.iter().map(|(c, n)| format!("{c}:{n}")).collect();
    Ok(ScanReport {
        title: "mu matrices".into(),
        universe: u.to_string(),
        field: f.spec().to_string(),
        header: vec!["matrix".into(), "row".into(), "entries".into()],
        records,
        summary: vec![
            ("d_in".into(), mu.d_in.to_string()),
            ("d_out".into(), mu.d_out.to_string()),
            ("corank histogram".into(), hist_s.join(" ")),
            ("common kernel".into(), mu.common_kernel_dim(f).to_string()),
            (
                "kernel degree".into(),
                kernel_degree(f, mu).map_or_else(|| "none".to_string(), |a| a.to_string()),
            ),
        ],
    })
}

// ---------------------------------------------------------------------------
// lines

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineRecord<E> {
    pub line: LinearSubspace<E>,
    /// Splitting of E_L^∨.
    pub dual_splitting: Splitting,
}

impl<E> LineRecord<E> {
    /// h^1(E_L^∨).
    pub fn h1_dual(&self) -> usize {
        self.dual_splitting.h1(0)
    }
}

pub fn line_records<F: Field>(
    m: &MonadSpec<F>,
    ls: &[LinearSubspace<F::Elem>],
) -> Result<Vec<LineRecord<F::Elem>>, Error> {
    crate::par::map_collect(ls, |l| -> Result<_, Error> {
        Ok(LineRecord { line: l.clone(), dual_splitting: p1split::dual_splitting_on_line(m, l)? })
    })
    .into_iter()
    .collect()
}

/// Most frequent splitting, ties broken by the order on splittings.
pub fn generic_splitting<E>(recs: &[LineRecord<E>]) -> Option<Splitting> {
    let mut counts: BTreeMap<&Splitting, usize> = BTreeMap::new();
    for r in recs {
        *counts.entry(&r.dual_splitting).or_insert(0) += 1;
    }
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0))).map(|(s, _)| s.clone())
}

pub fn jumping_line_scan<F: Field>(m: &MonadSpec<F>, u: Universe) -> Result<ScanReport, Error> {
    let f = &m.field;
    let ls = lines(f, u)?;
    let recs = line_records(m, &ls)?;
    let generic = generic_splitting(&recs);
    let jumping = recs.iter().filter(|r| r.h1_dual() >= 1).count();
    let mut summary = vec![
        ("lines".into(), recs.len().to_string()),
        ("generic dual splitting".into(), generic.as_ref().map_or("none".into(), |s| s.to_string())),
        ("lines with h1(E_L^v) >= 1".into(), jumping.to_string()),
    ];
    if let (Universe::Exhaustive, Some(q)) = (u, f.elements().map(|e| e.len())) {
        summary.push(("jumping family dimension estimate".into(), dimension_estimate(jumping, q).to_string()));
    }
    Ok(ScanReport {
        title: "line scan".into(),
        universe: u.to_string(),
        field: f.spec().to_string(),
        header: vec!["line".into(), "splitting(E_L^v)".into(), "h1(E_L^v)".into()],
        records: recs
            .iter()
            .map(|r| {
                let key = projective::subspace_key(f, &r.line);
                let pts: Vec<String> = (0..key.rows()).map(|i| format_vector(f, key.row(i))).collect();
                vec![pts.join(";"), r.dual_splitting.to_string(), r.h1_dual().to_string()]
            })
            .collect(),
        summary,
    })
}

/// Rounded log_q of a point count: the dimension of a variety with that
/// many F_q-points, heuristically. −1 for the empty set.
pub fn dimension_estimate(count: usize, q: usize) -> i64 {
    if count == 0 {
        return -1;
    }
    ((count as f64).ln() / (q as f64).ln()).round() as i64
}

// ---------------------------------------------------------------------------
// bilinear criterion

/// Criterion (II) at r: h^2(E(r−2)) = 0 and h^2(E(r−4)) ≤ h^2(E(r−3)) + 2.
pub fn bilinear_criteria(table: &CohTable, r: i64) -> Result<bool, Error> {
    let h2 = |l: i64| {
        table
            .h(2, l)
            .ok_or_else(|| Error::Unsupported(format!("h^2 at twist {l} missing or not exact")))
    };
    Ok(h2(r - 2)? == 0 && h2(r - 4)? <= h2(r - 3)? + 2)
}

/// Criterion (II) from h^2 values alone: `h2(l)` for l = r−4, r−3, r−2.
pub fn bilinear_from_values(h2_rm4: usize, h2_rm3: usize, h2_rm2: usize) -> bool {
    h2_rm2 == 0 && h2_rm4 <= h2_rm3 + 2
}

// ---------------------------------------------------------------------------
// pencils

/// Cokernel profile of a 2×3 pencil of linear forms and its normal-form
/// case (1)–(7).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilClass {
    /// ψ has rank ≥ 2 at every point of P^1.
    pub rank_two_everywhere: bool,
    pub generic_rank: usize,
    /// Length of the torsion of coker ψ^∨ (generic rank 3).
    pub torsion_length: usize,
    /// Local lengths at the rank-drop points over the algebraic closure.
    pub multiplicities: Vec<usize>,
    /// Distinct drop points over F_q, F_{q^2}, F_{q^3} (finite fields only).
    pub drop_points: Option<[usize; 3]>,
    /// Generic rank 2: the degree d of coker ≅ O(d).
    pub free_twist: Option<usize>,
    pub candidates: Vec<usize>,
    /// "viii" or "ix" for the excluded generic-rank-2 pencils.
    pub excluded: Option<&'static str>,
}

impl PencilClass {
    pub fn case(&self) -> Option<usize> {
        match self.candidates.as_slice() {
            [c] => Some(*c),
            _ => None,
        }
    }
}

/// The 4×3 matrix Ψ of binary linear forms attached to φ : 3O → 2O(1).
pub fn pencil_psi<F: Field>(f: &F, phi: &FormMatrix<F::Elem>) -> Result<FormMatrix<F::Elem>, Error> {
    if phi.rows() != 2 || phi.cols() != 3 || phi.nvars != 4 {
        return Err(Error::Shape("pencil classifier expects a 2x3 matrix of linear forms on P^3".into()));
    }
    let mut psi = complex::form_matrix_zero(f, 2, &[0; 3], &[1; 4]);
    for j in 0..4 {
        for c in 0..3 {
            let coef = |r: usize| {
                let e = phi.get(r, c);
                if e.degree == 1 {
                    e.coeffs[graded::monomial_index(&unit(j))].clone()
                } else {
                    f.zero()
                }
            };
            psi.set(j, c, graded::linear(f, &[coef(0), coef(1)]));
        }
    }
    Ok(psi)
}

fn unit(j: usize) -> [u32; 4] {
    let mut e = [0u32; 4];
    e[j] = 1;
    e
}

fn det_forms<F: Field>(f: &F, m: &FormMatrix<F::Elem>, rows: &[usize], cols: &[usize]) -> Form<F::Elem> {
    let k = rows.len();
    if k == 1 {
        return m.get(rows[0], cols[0]).clone();
    }
    let mut acc: Option<Form<F::Elem>> = None;
    for (idx, &c) in cols.iter().enumerate() {
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let term = graded::mul(f, m.get(rows[0], c), &det_forms(f, m, &rows[1..], &rest));
        let term = if idx % 2 == 1 { graded::neg(f, &term) } else { term };
        acc = Some(match acc {
            None => term,
            Some(a) => graded::add(f, &a, &term),
        });
    }
    acc.expect("nonempty")
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

// Univariate polynomials, coefficients from low to high degree.

fn trim<F: Field>(f: &F, mut p: Vec<F::Elem>) -> Vec<F::Elem> {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
    p
}

fn poly_rem<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut r = trim(f, a.to_vec());
    let lead_inv = f.inv(b.last().expect("nonzero divisor")).expect("unit");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = f.mul(r.last().expect("nonempty"), &lead_inv);
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bi));
        }
        r = trim(f, r);
    }
    r
}

fn poly_div<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let mut r = trim(f, a.to_vec());
    if r.len() < b.len() {
        return vec![];
    }
    let mut q = vec![f.zero(); r.len() - b.len() + 1];
    let lead_inv = f.inv(b.last().expect("nonzero divisor")).expect("unit");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = f.mul(r.last().expect("nonempty"), &lead_inv);
        q[shift] = c.clone();
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, bi));
        }
        r = trim(f, r);
    }
    q
}

fn monic<F: Field>(f: &F, p: Vec<F::Elem>) -> Vec<F::Elem> {
    let p = trim(f, p);
    match p.last() {
        None => p,
        Some(l) => {
            let inv = f.inv(l).expect("unit");
            p.iter().map(|c| f.mul(c, &inv)).collect()
        }
    }
}

fn poly_gcd<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    let (mut x, mut y) = (trim(f, a.to_vec()), trim(f, b.to_vec()));
    while !y.is_empty() {
        let r = poly_rem(f, &x, &y);
        x = y;
        y = r;
    }
    monic(f, x)
}

fn derivative<F: Field>(f: &F, p: &[F::Elem]) -> Vec<F::Elem> {
    trim(f, p.iter().enumerate().skip(1).map(|(i, c)| f.mul(&f.from_i64(i as i64), c)).collect())
}

/// Yun's squarefree decomposition; entry k − 1 is the product of the
/// roots of multiplicity k. Valid when the degree is below the
/// characteristic.
fn squarefree<F: Field>(f: &F, p: &[F::Elem]) -> Vec<Vec<F::Elem>> {
    let p = monic(f, p.to_vec());
    if p.len() <= 1 {
        return vec![];
    }
    let dp = derivative(f, &p);
    let mut a = poly_gcd(f, &p, &dp);
    let mut b = poly_div(f, &p, &a);
    let mut c = poly_div(f, &dp, &a);
    let mut out = Vec::new();
    loop {
        let db = derivative(f, &b);
        let d: Vec<F::Elem> = {
            let len = c.len().max(db.len());
            trim(
                f,
                (0..len)
                    .map(|i| {
                        let ci = c.get(i).cloned().unwrap_or_else(|| f.zero());
                        let di = db.get(i).cloned().unwrap_or_else(|| f.zero());
                        f.sub(&ci, &di)
                    })
                    .collect(),
            )
        };
        let g = poly_gcd(f, &b, &d);
        out.push(g.clone());
        if b.len() <= 1 {
            break;
        }
        b = poly_div(f, &b, &g);
        c = poly_div(f, &d, &g);
        a = poly_div(f, &a, &g);
        if b.len() <= 1 {
            break;
        }
    }
    let _ = a;
    while out.last().is_some_and(|g| g.len() <= 1) {
        out.pop();
    }
    out
}

/// Binary form of degree d in T0, T1 → (p(x) with x = T1/T0, multiplicity
/// of the root T0 = 0).
fn dehomogenize<F: Field>(f: &F, g: &Form<F::Elem>) -> (Vec<F::Elem>, usize) {
    // monomial i of degree d is T0^{d−i} T1^i
    let p = trim(f, g.coeffs.clone());
    let at_inf = g.degree as usize + 1 - p.len();
    (p, at_inf)
}

pub fn pencil_classify<F: Field>(f: &F, phi: &FormMatrix<F::Elem>) -> Result<PencilClass, Error> {
    let psi = pencil_psi(f, phi)?;
    let minors2: Vec<Form<F::Elem>> = subsets(4, 2)
        .iter()
        .flat_map(|r| subsets(3, 2).into_iter().map(move |c| (r.clone(), c)))
        .map(|(r, c)| det_forms(f, &psi, &r, &c))
        .filter(|g| !graded::is_zero(f, g))
        .collect();
    let minors3: Vec<Form<F::Elem>> = subsets(4, 3)
        .iter()
        .map(|r| det_forms(f, &psi, r, &[0, 1, 2]))
        .filter(|g| !graded::is_zero(f, g))
        .collect();
    let (g2, inf2) = binary_gcd(f, &minors2);
    let rank_two_everywhere = !minors2.is_empty() && g2.len() <= 1 && inf2 == 0;
    if !rank_two_everywhere {
        return Err(Error::Inconsistent(
            "pencil has rank <= 1 at a point of P^1: invalid for a c3=4 monad".into(),
        ));
    }
    if minors3.is_empty() {
        // generic rank 2: coker ≅ O(d), d the least twist with a kernel section
        let mut d = None;
        for t in 0..=3 {
            let h = complex::h0_matrix(f, &psi, t);
            if matrix::rank(f, &h) < h.cols() {
                d = Some(t as usize);
                break;
            }
        }
        let excluded = match d {
            Some(2) => Some("viii"),
            Some(1) => Some("ix"),
            _ => None,
        };
        return Ok(PencilClass {
            rank_two_everywhere,
            generic_rank: 2,
            torsion_length: 0,
            multiplicities: vec![],
            drop_points: None,
            free_twist: d,
            candidates: vec![],
            excluded,
        });
    }
    let (g3, inf3) = binary_gcd(f, &minors3);
    let mut mults: Vec<usize> = Vec::new();
    for (k, part) in squarefree(f, &g3).iter().enumerate() {
        for _ in 0..part.len().saturating_sub(1) {
            mults.push(k + 1);
        }
    }
    if inf3 > 0 {
        mults.push(inf3);
    }
    mults.sort_unstable_by(|a, b| b.cmp(a));
    let torsion_length: usize = mults.iter().sum();
    let drop_points = Some(f.spec().characteristic()).filter(|&p| p > 0).map(|p| {
        let radical = squarefree(f, &g3).into_iter().fold(vec![f.one()], |acc, part| poly_mul(f, &acc, &part));
        let at_inf = usize::from(inf3 > 0);
        let mut out = [0; 3];
        let mut frob = vec![f.zero(), f.one()];
        for slot in out.iter_mut() {
            frob = poly_powmod(f, &frob, p as u64, &radical);
            *slot = roots_of_frobenius(f, &radical, &frob) + at_inf;
        }
        out
    });
    let case = match mults.as_slice() {
        [3] => Some(1),
        [2, 1] => Some(2),
        [1, 1, 1] => Some(3),
        [2] => Some(4),
        [1, 1] => Some(5),
        [1] => Some(6),
        [] => Some(7),
        _ => None,
    };
    Ok(PencilClass {
        rank_two_everywhere,
        generic_rank: 3,
        torsion_length,
        multiplicities: mults,
        drop_points,
        free_twist: None,
        candidates: case.into_iter().collect(),
        excluded: None,
    })
}

fn poly_mul<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![f.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = f.add(&out[i + j], &f.mul(x, y));
        }
    }
    trim(f, out)
}

/// a^e mod m.
fn poly_powmod<F: Field>(f: &F, a: &[F::Elem], mut e: u64, m: &[F::Elem]) -> Vec<F::Elem> {
    if m.len() <= 1 {
        return vec![];
    }
    let mut base = poly_rem(f, a, m);
    let mut acc = vec![f.one()];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(f, &poly_mul(f, &acc, &base), m);
        }
        base = poly_rem(f, &poly_mul(f, &base, &base), m);
        e >>= 1;
    }
    acc
}

/// Number of roots of the squarefree r in F_{q^k}, given x^{q^k} mod r.
fn roots_of_frobenius<F: Field>(f: &F, r: &[F::Elem], frob: &[F::Elem]) -> usize {
    if r.len() <= 1 {
        return 0;
    }
    let mut diff = frob.to_vec();
    diff.resize(diff.len().max(2), f.zero());
    diff[1] = f.sub(&diff[1], &f.one());
    let diff = trim(f, diff);
    if diff.is_empty() {
        return r.len() - 1;
    }
    poly_gcd(f, r, &diff).len() - 1
}

/// Gcd of nonzero binary forms: (dehomogenized gcd, multiplicity at T0 = 0).
fn binary_gcd<F: Field>(f: &F, forms: &[Form<F::Elem>]) -> (Vec<F::Elem>, usize) {
    let mut g: Option<Vec<F::Elem>> = None;
    let mut inf = usize::MAX;
    for form in forms {
        let (p, i) = dehomogenize(f, form);
        inf = inf.min(i);
        g = Some(match g {
            None => monic(f, p),
            Some(acc) => poly_gcd(f, &acc, &p),
        });
    }
    (g.unwrap_or_default(), if inf == usize::MAX { 0 } else { inf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn squarefree_parts() {
        let f = PrimeField::new(101).unwrap();
        // (x−1)^2 (x−2) = x^3 − 4x^2 + 5x − 2
        let p: Vec<u32> = [-2i64, 5, -4, 1].iter().map(|&c| f.from_i64(c)).collect();
        let parts = squarefree(&f, &p);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].len(), 2);
        assert_eq!(parts[1].len(), 2);
    }

    #[test]
    fn bilinear_values() {
        // spectrum (−1,0,1): h^2(E(−3)) = 3, h^2(E(−2)) = 1, h^2(E(−1)) = 0
        assert!(bilinear_from_values(3, 1, 0));
        assert!(!bilinear_from_values(4, 1, 0));
        assert!(!bilinear_from_values(1, 1, 1));
    }

    #[test]
    fn dimension_estimates() {
        assert_eq!(dimension_estimate(0, 5), -1);
        assert_eq!(dimension_estimate(6, 5), 1);
        assert_eq!(dimension_estimate(31, 5), 2);
        let _ = Rationals;
    }
}
