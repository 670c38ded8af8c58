//! Hypercohomology of line-bundle complexes through the two-row spectral
//! sequence, cohomology tables, graded module slices, Chern data and spectra.
//!
//! On P^n only H^0 and H^n of a line bundle are nonzero, so the first page
//! of the hypercohomology spectral sequence has the rows q = 0 and q = n.
//! E_2 is computed from ranks of the induced maps; the only further
//! differential is d_{n+1}: E_2^{p,n} → E_2^{p+n+1,0}, which is not computed.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::complex::{self, h0_matrix, hn_matrix, sign, MonadSpec};
use crate::field::{rational_to_i64, Field};
use crate::graded::{self, Form, LinearSubspace};
use crate::matrix::{self, Mat};
use crate::Error;

/// A cohomology dimension, or bounds for it when d_{n+1} could interfere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cell {
    Exact(usize),
    Interval { lo: usize, hi: usize },
}

impl Cell {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Cell::Exact(v) => Some(*v),
            Cell::Interval { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Cell::Exact(_))
    }

    pub fn lo(&self) -> usize {
        match self {
            Cell::Exact(v) => *v,
            Cell::Interval { lo, .. } => *lo,
        }
    }

    pub fn hi(&self) -> usize {
        match self {
            Cell::Exact(v) => *v,
            Cell::Interval { hi, .. } => *hi,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Exact(v) => write!(f, "{v}"),
            Cell::Interval { lo, hi } => write!(f, "{lo}..{hi}"),
        }
    }
}

/// Hypercohomology of a complex at one twist, indexed relative to the
/// middle position: `get(i)` is h^i of the presented sheaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperCoh {
    pub middle: i64,
    values: BTreeMap<i64, Cell>,
}

impl HyperCoh {
    pub fn get(&self, i: i64) -> Cell {
        self.values.get(&(i + self.middle)).copied().unwrap_or(Cell::Exact(0))
    }

    /// Nonzero or inexact degrees, relative to the middle.
    pub fn support(&self) -> Vec<(i64, Cell)> {
        self.values
            .iter()
            .filter(|(_, c)| c.hi() > 0)
            .map(|(&k, &c)| (k - self.middle, c))
            .collect()
    }

    pub fn all_exact(&self) -> bool {
        self.values.values().all(Cell::is_exact)
    }
}

/// Dimensions and ranks of the two nonzero rows of E_1.
struct Rows {
    start: i64,
    h0: Vec<usize>,
    hn: Vec<usize>,
    r0: Vec<usize>,
    rn: Vec<usize>,
}

impl Rows {
    fn at(v: &[usize], start: i64, p: i64) -> usize {
        if p < start || p - start >= v.len() as i64 {
            0
        } else {
            v[(p - start) as usize]
        }
    }

    fn e2_0(&self, p: i64) -> usize {
        Self::at(&self.h0, self.start, p) - Self::at(&self.r0, self.start, p) - Self::at(&self.r0, self.start, p - 1)
    }

    fn e2_n(&self, p: i64) -> usize {
        Self::at(&self.hn, self.start, p) - Self::at(&self.rn, self.start, p) - Self::at(&self.rn, self.start, p - 1)
    }
}

fn e1_rows<F: Field>(m: &MonadSpec<F>, l: i64) -> Rows {
    let f = &m.field;
    let n = m.n;
    let h0 = m.terms.iter().map(|t| t.iter().map(|a| graded::h0_line(n, a + l)).sum()).collect();
    let hn = m.terms.iter().map(|t| t.iter().map(|a| graded::serre_dual_dim(n, a + l)).sum()).collect();
    let r0 = m.diffs.iter().map(|d| matrix::rank(f, &h0_matrix(f, d, l))).collect();
    let rn = m.diffs.iter().map(|d| matrix::rank(f, &hn_matrix(f, d, l))).collect();
    Rows { start: m.start, h0, hn, r0, rn }
}

/// Hypercohomology of `m(l)`.
pub fn hypercoh<F: Field>(m: &MonadSpec<F>, l: i64) -> Result<HyperCoh, Error> {
    if m.n == 0 {
        return Err(Error::Unsupported("hypercohomology needs n ≥ 1".into()));
    }
    let rows = e1_rows(m, l);
    let n = m.n as i64;
    let mut values = BTreeMap::new();
    for k in m.start..=m.end() + n {
        let a = rows.e2_0(k);
        let b = rows.e2_n(k - n);
        // d_{n+1} into E^{k,0} and out of E^{k-n,n}
        let rho_in = rows.e2_n(k - n - 1).min(a);
        let rho_out = b.min(rows.e2_0(k + 1));
        let cell = if rho_in == 0 && rho_out == 0 {
            Cell::Exact(a + b)
        } else {
            Cell::Interval { lo: a + b - rho_in - rho_out, hi: a + b }
        };
        if cell.hi() > 0 {
            values.insert(k, cell);
        }
    }
    Ok(HyperCoh { middle: m.middle, values })
}

/// h^i(E(l)) for 0 ≤ i ≤ n over a window of twists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohTable {
    pub n: usize,
    pub lo: i64,
    pub hi: i64,
    /// `cells[l - lo][i]`.
    pub cells: Vec<Vec<Cell>>,
}

impl CohTable {
    pub fn get(&self, i: usize, l: i64) -> Option<Cell> {
        if l < self.lo || l > self.hi || i > self.n {
            return None;
        }
        Some(self.cells[(l - self.lo) as usize][i])
    }

    /// Exact value, if the cell is in the window and exact.
    pub fn h(&self, i: usize, l: i64) -> Option<usize> {
        self.get(i, l)?.exact()
    }

    pub fn column_exact(&self, l: i64) -> bool {
        l >= self.lo && l <= self.hi && self.cells[(l - self.lo) as usize].iter().all(Cell::is_exact)
    }

    /// TSV with columns l, h0..hn, flag.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("l");
        for i in 0..=self.n {
            s.push_str(&format!("\th{i}"));
        }
        s.push_str("\tflag\n");
        for l in self.lo..=self.hi {
            s.push_str(&l.to_string());
            for c in &self.cells[(l - self.lo) as usize] {
                s.push_str(&format!("\t{c}"));
            }
            s.push_str(if self.column_exact(l) { "\texact\n" } else { "\tinterval\n" });
        }
        s
    }
}

pub fn coh_table<F: Field>(m: &MonadSpec<F>, lo: i64, hi: i64) -> Result<CohTable, Error> {
    if lo > hi {
        return Err(Error::Shape(format!("empty window {lo}:{hi}")));
    }
    let twists: Vec<i64> = (lo..=hi).collect();
    let cols = crate::par::map_collect(&twists, |&l| hypercoh(m, l));
    let mut cells = Vec::with_capacity(cols.len());
    for c in cols {
        let c = c?;
        cells.push((0..=m.n as i64).map(|i| c.get(i)).collect());
    }
    Ok(CohTable { n: m.n, lo, hi, cells })
}

/// Rank and Chern classes up to c_3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChernData {
    pub rank: i64,
    pub c1: i64,
    pub c2: i64,
    pub c3: i64,
}

impl fmt::Display for ChernData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.rank, self.c1, self.c2, self.c3)
    }
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn q_frac(a: i64, b: i64) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

fn to_int(v: &BigRational, what: &str) -> Result<i64, Error> {
    rational_to_i64(v).ok_or_else(|| Error::Inconsistent(format!("{what} = {v} is not an integer")))
}

/// Chern character components ch_0..ch_3 of the presented class.
pub fn chern_character<F: Field>(m: &MonadSpec<F>) -> [BigRational; 4] {
    let mut ch: [BigRational; 4] = Default::default();
    let fact = [1, 1, 2, 6];
    for p in m.start..=m.end() {
        let s = sign(p - m.middle);
        for &a in m.term(p) {
            for (k, c) in ch.iter_mut().enumerate() {
                *c += q_frac(s * a.pow(k as u32), fact[k]);
            }
        }
    }
    ch
}

pub fn chern<F: Field>(m: &MonadSpec<F>) -> Result<ChernData, Error> {
    let [ch0, ch1, ch2, ch3] = chern_character(m);
    let c1 = ch1.clone();
    let c2 = (&c1 * &c1 - q(2) * &ch2) / q(2);
    let c3 = (q(6) * &ch3 - &c1 * &c1 * &c1 + q(3) * &c1 * &c2) / q(3);
    Ok(ChernData {
        rank: to_int(&ch0, "rank")?,
        c1: to_int(&c1, "c1")?,
        c2: to_int(&c2, "c2")?,
        c3: to_int(&c3, "c3")?,
    })
}

/// χ(E(l)) on P^3 by Hirzebruch–Riemann–Roch.
pub fn euler_char(c: &ChernData, l: i64) -> Result<i64, Error> {
    let (c1, c2, c3) = (q(c.c1), q(c.c2), q(c.c3));
    let ch = [
        q(c.rank),
        c1.clone(),
        (&c1 * &c1 - q(2) * &c2) / q(2),
        (&c1 * &c1 * &c1 - q(3) * &c1 * &c2 + q(3) * &c3) / q(6),
    ];
    let ql = q(l);
    let twist = [BigRational::one(), ql.clone(), &ql * &ql / q(2), &ql * &ql * &ql / q(6)];
    let todd = [BigRational::one(), q(2), q_frac(11, 6), BigRational::one()];
    let mut chl: [BigRational; 4] = Default::default();
    for i in 0..4 {
        for j in 0..=i {
            chl[i] += &ch[j] * &twist[i - j];
        }
    }
    let mut chi = BigRational::zero();
    for i in 0..4 {
        chi += &chl[i] * &todd[3 - i];
    }
    to_int(&chi, "χ")
}

/// χ(C(l)) directly from the terms, on any P^n.
pub fn euler_from_terms<F: Field>(m: &MonadSpec<F>, l: i64) -> i64 {
    let n = m.n;
    (m.start..=m.end())
        .map(|p| {
            let s = sign(p - m.middle);
            m.term(p)
                .iter()
                .map(|a| graded::h0_line(n, a + l) as i64 + sign(n as i64) * graded::serre_dual_dim(n, a + l) as i64)
                .sum::<i64>()
                * s
        })
        .sum()
}

/// Which row of E_1 a graded piece comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Row {
    /// H^0 of the terms: pieces are cycles modulo boundaries of H^0 maps.
    Sections,
    /// H^n of the terms in Serre-dual coordinates.
    Top,
}

/// H^q(E(l)) as Z/B inside a coordinate space: `basis = [B | R]` with the
/// columns of R representing a basis of the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subquotient<E> {
    pub ambient: usize,
    pub boundaries: usize,
    pub basis: Mat<E>,
}

impl<E: Clone> Subquotient<E> {
    pub fn dim(&self) -> usize {
        self.basis.cols() - self.boundaries
    }

    pub fn reps(&self) -> Mat<E> {
        self.basis.column_slice(self.boundaries, self.basis.cols())
    }
}

impl<E: Clone> Subquotient<E> {
    /// Coordinates of cycles (columns of `v`) in the quotient basis.
    pub fn coords<F: Field<Elem = E>>(&self, f: &F, v: &Mat<E>) -> Result<Mat<E>, Error> {
        if self.dim() == 0 {
            return Ok(matrix::zeros(f, 0, v.cols()));
        }
        let x = matrix::solve(f, &self.basis, v)
            .ok_or_else(|| Error::Inconsistent("vector is not a cycle of the subquotient".into()))?;
        Ok(x.row_slice(self.boundaries, x.rows()))
    }
}

fn subquotient<F: Field>(f: &F, ambient: usize, outgoing: Option<Mat<F::Elem>>, incoming: Option<Mat<F::Elem>>) -> Subquotient<F::Elem> {
    let z = match outgoing {
        Some(d) => matrix::kernel_basis(f, &d),
        None => matrix::identity(f, ambient),
    };
    let b = match incoming {
        Some(d) => matrix::column_space(f, &d),
        None => matrix::zeros(f, ambient, 0),
    };
    let chosen = matrix::extend_basis(f, &b, &z);
    let reps: Vec<Vec<F::Elem>> = chosen.iter().map(|&c| z.column(c)).collect();
    let r = Mat::from_columns(ambient, &reps, f.zero());
    Subquotient { ambient, boundaries: b.cols(), basis: b.hcat(&r) }
}

fn piece<F: Field>(m: &MonadSpec<F>, row: Row, p: i64, l: i64) -> Subquotient<F::Elem> {
    let f = &m.field;
    let n = m.n;
    let twists = m.term(p);
    match row {
        Row::Sections => {
            let amb = twists.iter().map(|a| graded::h0_line(n, a + l)).sum();
            subquotient(f, amb, m.diff(p).map(|d| h0_matrix(f, d, l)), m.diff(p - 1).map(|d| h0_matrix(f, d, l)))
        }
        Row::Top => {
            let amb = twists.iter().map(|a| graded::serre_dual_dim(n, a + l)).sum();
            subquotient(f, amb, m.diff(p).map(|d| hn_matrix(f, d, l)), m.diff(p - 1).map(|d| hn_matrix(f, d, l)))
        }
    }
}

/// Multiplication by a form g on ⊕H^0(O(a+l)) or ⊕H^n(O(a+l)).
fn ambient_mult<F: Field>(f: &F, n: usize, row: Row, twists: &[i64], g: &Form<F::Elem>, l: i64) -> Mat<F::Elem> {
    let blocks: Vec<Mat<F::Elem>> = twists
        .iter()
        .map(|a| match row {
            Row::Sections => graded::mult_matrix(f, g, a + l),
            Row::Top => graded::mult_matrix(f, g, -a - l - n as i64 - 1 - g.degree).transpose(),
        })
        .collect();
    matrix::block_diag(f, &blocks)
}

/// Graded pieces of H^q_*(E) over a window with the multiplication maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModuleSlice<E> {
    pub q: usize,
    pub lo: i64,
    pub hi: i64,
    pub nvars: usize,
    pub row: Row,
    pub position: i64,
    pub twists: Vec<i64>,
    pub pieces: Vec<Subquotient<E>>,
    /// `mult[l - lo][i]`: X_i : H^q(E(l)) → H^q(E(l+1)) for lo ≤ l < hi.
    pub mult: Vec<Vec<Mat<E>>>,
}

impl<E: Clone> GradedModuleSlice<E> {
    pub fn dim(&self, l: i64) -> usize {
        if l < self.lo || l > self.hi {
            return 0;
        }
        self.pieces[(l - self.lo) as usize].dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(Subquotient::dim).collect()
    }

    /// X_i : H^q(E(l)) → H^q(E(l+1)).
    pub fn var_map(&self, i: usize, l: i64) -> &Mat<E> {
        &self.mult[(l - self.lo) as usize][i]
    }
}

impl<E: Clone> GradedModuleSlice<E> {
    /// Multiplication by the linear form Σ h_i X_i from degree l to l+1.
    pub fn linear_map<F: Field<Elem = E>>(&self, f: &F, h: &[E], l: i64) -> Mat<E> {
        let ms = &self.mult[(l - self.lo) as usize];
        let mut acc = matrix::zeros(f, ms[0].rows(), ms[0].cols());
        for (i, hi) in h.iter().enumerate() {
            if !f.is_zero(hi) {
                acc = matrix::add(f, &acc, &matrix::scale(f, hi, &ms[i]));
            }
        }
        acc
    }
}

/// The S-module slice of H^q_*(E) on [lo, hi]. Each piece must come from a
/// single row of E_2 with no possible d_{n+1}.
pub fn graded_module<F: Field>(m: &MonadSpec<F>, qdeg: usize, lo: i64, hi: i64) -> Result<GradedModuleSlice<F::Elem>, Error> {
    if lo > hi {
        return Err(Error::Shape(format!("empty window {lo}:{hi}")));
    }
    let f = &m.field;
    let n = m.n;
    let k = qdeg as i64 + m.middle;
    let twists_range: Vec<i64> = (lo..=hi).collect();
    for c in crate::par::map_collect(&twists_range, |&l| hypercoh(m, l)) {
        if !c?.get(qdeg as i64).is_exact() {
            return Err(Error::Unsupported(format!("H^{qdeg} is not determined by E_2 on this window")));
        }
    }
    let sec: Vec<Subquotient<F::Elem>> = crate::par::map_collect(&twists_range, |&l| piece(m, Row::Sections, k, l));
    let top: Vec<Subquotient<F::Elem>> = crate::par::map_collect(&twists_range, |&l| piece(m, Row::Top, k - n as i64, l));
    let sec_nonzero = sec.iter().any(|p| p.dim() > 0);
    let top_nonzero = top.iter().any(|p| p.dim() > 0);
    let (row, position, pieces) = match (sec_nonzero, top_nonzero) {
        (true, true) => return Err(Error::Unsupported(format!("H^{qdeg} mixes both rows of the spectral sequence"))),
        (false, true) => (Row::Top, k - n as i64, top),
        _ => (Row::Sections, k, sec),
    };
    let twists = m.term(position).to_vec();
    let nvars = n + 1;
    let vars: Vec<Form<F::Elem>> = (0..nvars).map(|i| graded::variable(f, nvars, i)).collect();
    let steps: Vec<i64> = (lo..hi).collect();
    let mult = crate::par::map_collect(&steps, |&l| {
        let (src, dst) = (&pieces[(l - lo) as usize], &pieces[(l - lo + 1) as usize]);
        vars.iter()
            .map(|x| {
                if src.dim() == 0 || dst.dim() == 0 {
                    return Ok(matrix::zeros(f, dst.dim(), src.dim()));
                }
                let t = ambient_mult(f, n, row, &twists, x, l);
                dst.coords(f, &matrix::mul(f, &t, &src.reps()))
            })
            .collect::<Result<Vec<_>, Error>>()
    });
    let mult = mult.into_iter().collect::<Result<Vec<_>, Error>>()?;
    Ok(GradedModuleSlice { q: qdeg, lo, hi, nvars, row, position, twists, pieces, mult })
}

/// A spectrum with the checks it is expected to pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumData {
    pub k: Vec<i64>,
    pub length_matches_c2: bool,
    pub connected: bool,
    pub sum_matches_c3: bool,
    pub property_v: bool,
    pub property_vi: bool,
    /// Membership in the list of possible spectra, for c_2 ∈ {2, 3}.
    pub allowed: Option<bool>,
}

const ALLOWED_C2_2: [[i64; 2]; 3] = [[-1, 0], [0, 0], [0, 1]];
const ALLOWED_C2_3: [[i64; 3]; 10] = [
    [-2, -1, 0],
    [-1, -1, -1],
    [-1, -1, 0],
    [-1, 0, 0],
    [0, 0, 0],
    [-1, 0, 1],
    [0, 0, 1],
    [0, 1, 1],
    [0, 1, 2],
    [1, 1, 1],
];

impl SpectrumData {
    pub fn from_multiset(mut k: Vec<i64>, c: &ChernData) -> Self {
        k.sort_unstable();
        let m = k.len();
        let connected = k.windows(2).all(|w| w[1] - w[0] <= 1);
        let sum_matches_c3 = -2 * k.iter().sum::<i64>() == c.c3;
        let property_v = m == 0
            || k.contains(&0)
            || (m >= 3 && (k[m - 3..].iter().all(|&x| x == -1) || k[..3].iter().all(|&x| x == 1)));
        // 1-based i with 2 ≤ i ≤ m−1 is 0-based j = i−1 in 1..m−1
        let property_vi = (1..m.saturating_sub(1)).all(|j| {
            let hyp = k[j - 1] < k[j] && k[j] < k[j + 1] && k[j + 1] <= 0;
            !hyp || k[..=j].windows(2).all(|w| w[0] < w[1])
        });
        let allowed = match c.c2 {
            2 => Some(ALLOWED_C2_2.iter().any(|a| a[..] == k[..])),
            3 => Some(ALLOWED_C2_3.iter().any(|a| a[..] == k[..])),
            _ => None,
        };
        SpectrumData {
            length_matches_c2: m as i64 == c.c2,
            k,
            connected,
            sum_matches_c3,
            property_v,
            property_vi,
            allowed,
        }
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.length_matches_c2 {
            out.push("length");
        }
        if !self.connected {
            out.push("connected");
        }
        if !self.sum_matches_c3 {
            out.push("c3");
        }
        if !self.property_v {
            out.push("v");
        }
        if !self.property_vi {
            out.push("vi");
        }
        if self.allowed == Some(false) {
            out.push("allowed");
        }
        out
    }

    pub fn ok(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn multiset_string(&self) -> String {
        let parts: Vec<String> = self.k.iter().map(|x| x.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for SpectrumData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fails = self.failures();
        if fails.is_empty() {
            write!(f, "{} OK", self.multiset_string())
        } else {
            write!(f, "{} FAIL[{}]", self.multiset_string(), fails.join(","))
        }
    }
}

/// h^1(E(l)) predicted by a spectrum, valid for l ≤ −1.
pub fn spectrum_h1(k: &[i64], l: i64) -> usize {
    k.iter().map(|&x| (x + l + 2).max(0) as usize).sum()
}

/// h^2(E(l)) predicted by a spectrum, valid for l ≥ −3.
pub fn spectrum_h2(k: &[i64], l: i64) -> usize {
    k.iter().map(|&x| (-x - l - 2).max(0) as usize).sum()
}

const MAX_SPECTRUM_C2: i64 = 8;

fn multisets(len: usize, lo: i64, hi: i64, visit: &mut dyn FnMut(&[i64])) {
    fn rec(cur: &mut Vec<i64>, len: usize, from: i64, hi: i64, visit: &mut dyn FnMut(&[i64])) {
        if cur.len() == len {
            visit(cur);
            return;
        }
        for v in from..=hi {
            cur.push(v);
            rec(cur, len, v, hi, visit);
            cur.pop();
        }
    }
    rec(&mut Vec::with_capacity(len), len, lo, hi, visit);
}

/// Recovers the spectrum from h^1(E(l)), l ≤ −1, and h^2(E(l)), l ≥ −3.
pub fn spectrum(table: &CohTable, c: &ChernData) -> Result<SpectrumData, Error> {
    if table.n != 3 {
        return Err(Error::Unsupported("spectra are defined for bundles on P^3".into()));
    }
    if c.c2 < 0 || c.c2 > MAX_SPECTRUM_C2 {
        return Err(Error::Unsupported(format!("spectrum search supports 0 ≤ c2 ≤ {MAX_SPECTRUM_C2}")));
    }
    let need_lo = -c.c2 - 3;
    if table.lo > need_lo || table.hi < 0 {
        return Err(Error::Shape(format!("spectrum needs the window {need_lo}:0")));
    }
    let mut h1 = Vec::new();
    for l in need_lo..=-1 {
        h1.push((l, table.h(1, l).ok_or_else(|| Error::Unsupported(format!("h^1(E({l})) is not exact")))?));
    }
    let mut h2 = Vec::new();
    for l in -3..=table.hi {
        h2.push((l, table.h(2, l).ok_or_else(|| Error::Unsupported(format!("h^2(E({l})) is not exact")))?));
    }
    let fits_i = |k: &[i64]| h1.iter().all(|&(l, v)| spectrum_h1(k, l) == v);
    let fits_ii = |k: &[i64]| h2.iter().all(|&(l, v)| spectrum_h2(k, l) == v);
    let (mut both, mut only_i, mut only_ii) = (Vec::new(), false, false);
    let bound = c.c2.max(1);
    multisets(c.c2 as usize, -bound, bound, &mut |k| {
        let (a, b) = (fits_i(k), fits_ii(k));
        if a && b {
            both.push(k.to_vec());
        }
        only_i |= a;
        only_ii |= b;
    });
    match both.len() {
        1 => Ok(SpectrumData::from_multiset(both.pop().unwrap(), c)),
        0 => {
            let why = match (only_i, only_ii) {
                (false, false) => "relations (I) and (II) both fail",
                (false, true) => "relation (I) fails",
                (true, false) => "relation (II) fails",
                (true, true) => "relations (I) and (II) have no common solution",
            };
            Err(Error::Inconsistent(format!("no spectrum fits the table: {why}")))
        }
        _ => Err(Error::Inconsistent(format!("{} spectra fit the table", both.len()))),
    }
}

/// Spectrum computed from the N and Q modules of a plane section, with the
/// sequences n_i and q_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneSpectrum {
    pub spectrum: SpectrumData,
    /// (i, n_i) for i ≤ −1.
    pub n: Vec<(i64, usize)>,
    /// (i, q_i) for i ≥ −2.
    pub q: Vec<(i64, usize)>,
    pub sum_is_c2: bool,
    pub n_nonincreasing: bool,
    pub n_strict: bool,
    pub q_nondecreasing: bool,
    pub q_strict: bool,
}

impl PlaneSpectrum {
    pub fn validators_hold(&self) -> bool {
        self.sum_is_c2 && self.n_nonincreasing && self.n_strict && self.q_nondecreasing && self.q_strict
    }
}

/// Whether the restriction of a rank-3, c_1 = 0 bundle to the subspace is
/// semistable: h^0(F(−1)) = 0 and h^0(F^∨(−1)) = 0.
pub fn restriction_semistable<F: Field>(m: &MonadSpec<F>, sub: &LinearSubspace<F::Elem>) -> Result<bool, Error> {
    let r = complex::restrict(m, sub);
    let a = hypercoh(&r, -1)?.get(0);
    let b = hypercoh(&complex::dualize(&r), -1)?.get(0);
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => Ok(x == 0 && y == 0),
        _ => Err(Error::Unsupported("h^0 of the restriction is not determined".into())),
    }
}

fn map_rank<F: Field>(f: &F, s: &GradedModuleSlice<F::Elem>, h: &[F::Elem], l: i64) -> usize {
    if s.dim(l) == 0 || s.dim(l + 1) == 0 {
        0
    } else {
        matrix::rank(f, &s.linear_map(f, h, l))
    }
}

/// Spectrum through multiplication by the equation h of a plane.
pub fn spectrum_via_plane<F: Field>(m: &MonadSpec<F>, h: &[F::Elem]) -> Result<PlaneSpectrum, Error> {
    let f = &m.field;
    if m.n != 3 {
        return Err(Error::Unsupported("spectra are defined for bundles on P^3".into()));
    }
    let c = chern(m)?;
    if c.rank != 3 || c.c1 != 0 {
        return Err(Error::Unsupported("spectrum needs rank 3 and c1 = 0".into()));
    }
    let plane = LinearSubspace::from_equations(f, &[h.to_vec()])
        .ok_or_else(|| Error::Shape("zero linear form".into()))?;
    if !restriction_semistable(m, &plane)? {
        return Err(Error::Inconsistent("restriction to the plane is not semistable; resample".into()));
    }
    let c2 = c.c2;
    let lo = -c2 - 3;
    let s1 = graded_module(m, 1, lo, 0)?;
    let s2 = graded_module(m, 2, -4, c2 + 1)?;
    // n_i = dim coker(h : H^1(E(i−1)) → H^1(E(i)))
    let n: Vec<(i64, usize)> = (lo + 1..=-1).rev().map(|i| (i, s1.dim(i) - map_rank(f, &s1, h, i - 1))).collect();
    // q_i = dim ker(h : H^2(E(i−1)) → H^2(E(i)))
    let q: Vec<(i64, usize)> = (-2..=c2 + 1).map(|i| (i, s2.dim(i - 1) - map_rank(f, &s2, h, i - 1))).collect();
    let nv = |i: i64| n.iter().find(|x| x.0 == i).map(|x| x.1).unwrap_or(0);
    let qv = |i: i64| q.iter().find(|x| x.0 == i).map(|x| x.1).unwrap_or(0);
    let mut k = Vec::new();
    for i in 1..=(-lo) {
        let mult = nv(-i) as i64 - nv(-i - 1) as i64;
        if mult < 0 {
            return Err(Error::Inconsistent(format!("n_{} < n_{}", -i, -i - 1)));
        }
        k.extend(std::iter::repeat_n(i - 1, mult as usize));
    }
    for i in -1..=c2 + 1 {
        let mult = qv(i) as i64 - qv(i + 1) as i64;
        if mult < 0 {
            return Err(Error::Inconsistent(format!("q_{} < q_{}", i, i + 1)));
        }
        k.extend(std::iter::repeat_n(-i - 2, mult as usize));
    }
    let spectrum = SpectrumData::from_multiset(k, &c);
    let n_strict = (2..=(-lo - 1)).all(|i| nv(-i - 1) == 0 || nv(-i) > nv(-i - 1));
    let q_strict = (-1..=c2).all(|j| qv(j + 1) == 0 || qv(j) > qv(j + 1));
    Ok(PlaneSpectrum {
        spectrum,
        sum_is_c2: (nv(-1) + qv(-1)) as i64 == c2,
        n_nonincreasing: nv(-1) >= nv(-2),
        n_strict,
        q_nondecreasing: qv(-2) >= qv(-1),
        q_strict,
        n,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn single_line_bundle() {
        let m = MonadSpec::line_bundles(Rationals, 3, vec![0]);
        let c = hypercoh(&m, 0).unwrap();
        assert_eq!(c.get(0), Cell::Exact(1));
        assert_eq!(c.get(3), Cell::Exact(0));
        let c = hypercoh(&m, -4).unwrap();
        assert_eq!(c.get(3), Cell::Exact(1));
    }

    #[test]
    fn euler_characteristics() {
        let c = ChernData { rank: 3, c1: 0, c2: 3, c3: 2 };
        assert_eq!(euler_char(&c, 0).unwrap(), -2);
        assert_eq!(euler_char(&ChernData { rank: 1, c1: 0, c2: 0, c3: 0 }, 0).unwrap(), 1);
        assert_eq!(euler_char(&ChernData { rank: 9, c1: 0, c2: 18, c3: 0 }, 0).unwrap(), -27);
        assert!(euler_char(&ChernData { rank: 3, c1: 0, c2: 3, c3: 1 }, 0).is_err());
    }

    #[test]
    fn schwarzenberger_chern_from_terms() {
        let f = PrimeField::new(101).unwrap();
        let d = complex::form_matrix_zero(&f, 4, &[-2, -2, -2], &[-1; 6]);
        let m = MonadSpec::new(f, 3, -1, vec![vec![-2; 3], vec![-1; 6]], vec![d], 0).unwrap();
        assert_eq!(chern(&m).unwrap(), ChernData { rank: 3, c1: 0, c2: 3, c3: 6 });
    }

    #[test]
    fn spectrum_flags() {
        let c = ChernData { rank: 3, c1: 0, c2: 3, c3: 2 };
        let s = SpectrumData::from_multiset(vec![0, -1, 0], &c);
        assert_eq!(s.k, vec![-1, 0, 0]);
        assert!(s.ok(), "{s}");
        let bad = SpectrumData::from_multiset(vec![-1, 1, 1], &ChernData { c3: -2, ..c });
        assert!(!bad.connected);
        assert_eq!(bad.allowed, Some(false));
    }
}
