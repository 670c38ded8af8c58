//! Bounded complexes of sums of twisted line bundles with form-matrix
//! differentials.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::certify;
use crate::field::Field;
use crate::graded::{self, dim_s, Form, LinearSubspace};
use crate::matrix::{self, Mat};
use crate::projective;
use crate::Error;

/// ⊕ O(a_i).
pub type TwistList = Vec<i64>;

/// A map ⊕O(s_j) → ⊕O(t_i); entry (i, j) is a form of degree t_i − s_j.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormMatrix<E> {
    pub nvars: usize,
    pub source: TwistList,
    pub target: TwistList,
    entries: Vec<Form<E>>,
}

impl<E: Clone> FormMatrix<E> {
    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn cols(&self) -> usize {
        self.source.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Form<E> {
        &self.entries[i * self.source.len() + j]
    }

    pub fn entries(&self) -> &[Form<E>] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let (r, c) = (self.rows(), self.cols());
        let mut entries = Vec::with_capacity(r * c);
        for j in 0..c {
            for i in 0..r {
                entries.push(self.get(i, j).clone());
            }
        }
        FormMatrix {
            nvars: self.nvars,
            source: self.target.iter().map(|a| -a).collect(),
            target: self.source.iter().map(|a| -a).collect(),
            entries,
        }
    }

    /// Same matrix between the twisted sums ⊕O(s_j + l) → ⊕O(t_i + l).
    pub fn twisted(&self, l: i64) -> Self {
        FormMatrix {
            nvars: self.nvars,
            source: self.source.iter().map(|a| a + l).collect(),
            target: self.target.iter().map(|a| a + l).collect(),
            entries: self.entries.clone(),
        }
    }
}

impl<E: Clone + PartialEq> FormMatrix<E> {
    /// Columns `cols` (in the given order) as a new map.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(self.rows() * cols.len());
        for i in 0..self.rows() {
            for &j in cols {
                entries.push(self.get(i, j).clone());
            }
        }
        FormMatrix {
            nvars: self.nvars,
            source: cols.iter().map(|&j| self.source[j]).collect(),
            target: self.target.clone(),
            entries,
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * self.cols());
        for &i in rows {
            for j in 0..self.cols() {
                entries.push(self.get(i, j).clone());
            }
        }
        FormMatrix {
            nvars: self.nvars,
            source: self.source.clone(),
            target: rows.iter().map(|&i| self.target[i]).collect(),
            entries,
        }
    }
}

pub fn form_matrix_zero<F: Field>(f: &F, nvars: usize, source: &[i64], target: &[i64]) -> FormMatrix<F::Elem> {
    let mut entries = Vec::with_capacity(source.len() * target.len());
    for t in target {
        for s in source {
            entries.push(graded::zero_form(f, nvars, t - s));
        }
    }
    FormMatrix { nvars, source: source.to_vec(), target: target.to_vec(), entries }
}

/// Builds a form matrix, checking that every entry has the forced degree.
pub fn form_matrix<F: Field>(
    f: &F,
    nvars: usize,
    source: &[i64],
    target: &[i64],
    entries: Vec<Form<F::Elem>>,
) -> Result<FormMatrix<F::Elem>, Error> {
    if entries.len() != source.len() * target.len() {
        return Err(Error::Shape(format!(
            "{} entries for a {}x{} map",
            entries.len(),
            target.len(),
            source.len()
        )));
    }
    let mut fixed = Vec::with_capacity(entries.len());
    for (k, e) in entries.into_iter().enumerate() {
        let (i, j) = (k / source.len(), k % source.len());
        let deg = target[i] - source[j];
        if e.nvars != nvars {
            return Err(Error::Shape(format!("entry ({i},{j}) has {} variables, expected {nvars}", e.nvars)));
        }
        if e.degree != deg {
            if graded::is_zero(f, &e) {
                fixed.push(graded::zero_form(f, nvars, deg));
                continue;
            }
            return Err(Error::Shape(format!("entry ({i},{j}) has degree {}, expected {deg}", e.degree)));
        }
        fixed.push(e);
    }
    Ok(FormMatrix { nvars, source: source.to_vec(), target: target.to_vec(), entries: fixed })
}

impl<E: Clone> FormMatrix<E> {
    pub fn set(&mut self, i: usize, j: usize, g: Form<E>) {
        assert_eq!(g.degree, self.target[i] - self.source[j], "entry degree");
        let c = self.source.len();
        self.entries[i * c + j] = g;
    }
}

pub fn fm_is_zero<F: Field>(f: &F, m: &FormMatrix<F::Elem>) -> bool {
    m.entries.iter().all(|e| graded::is_zero(f, e))
}

/// a ∘ b.
pub fn compose<F: Field>(f: &F, a: &FormMatrix<F::Elem>, b: &FormMatrix<F::Elem>) -> Result<FormMatrix<F::Elem>, Error> {
    if a.source != b.target {
        return Err(Error::Shape(format!("cannot compose: {:?} vs {:?}", a.source, b.target)));
    }
    let mut out = form_matrix_zero(f, a.nvars, &b.source, &a.target);
    for i in 0..a.rows() {
        for j in 0..b.cols() {
            let mut acc = graded::zero_form(f, a.nvars, a.target[i] - b.source[j]);
            for k in 0..a.cols() {
                let p = graded::mul(f, a.get(i, k), b.get(k, j));
                if p.degree >= 0 && acc.degree >= 0 {
                    acc = graded::add(f, &acc, &p);
                }
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

pub fn fm_add<F: Field>(f: &F, a: &FormMatrix<F::Elem>, b: &FormMatrix<F::Elem>) -> FormMatrix<F::Elem> {
    assert_eq!((&a.source, &a.target), (&b.source, &b.target));
    FormMatrix {
        nvars: a.nvars,
        source: a.source.clone(),
        target: a.target.clone(),
        entries: a.entries.iter().zip(&b.entries).map(|(x, y)| graded::add(f, x, y)).collect(),
    }
}

pub fn fm_scale<F: Field>(f: &F, c: &F::Elem, a: &FormMatrix<F::Elem>) -> FormMatrix<F::Elem> {
    FormMatrix {
        nvars: a.nvars,
        source: a.source.clone(),
        target: a.target.clone(),
        entries: a.entries.iter().map(|x| graded::scale(f, c, x)).collect(),
    }
}

/// Scalar matrix `s` as a map between equal-twist sums.
pub fn fm_from_scalars<F: Field>(f: &F, nvars: usize, s: &Mat<F::Elem>, twist: i64) -> FormMatrix<F::Elem> {
    let mut out = form_matrix_zero(f, nvars, &vec![twist; s.cols()], &vec![twist; s.rows()]);
    for i in 0..s.rows() {
        for j in 0..s.cols() {
            out.set(i, j, graded::constant(f, nvars, s.get(i, j).clone()));
        }
    }
    out
}

/// Entrywise restriction to a linear subspace.
pub fn fm_substitute<F: Field>(f: &F, m: &FormMatrix<F::Elem>, sub: &LinearSubspace<F::Elem>) -> FormMatrix<F::Elem> {
    FormMatrix {
        nvars: sub.param.rows(),
        source: m.source.clone(),
        target: m.target.clone(),
        entries: m.entries.iter().map(|e| graded::substitute(f, e, sub)).collect(),
    }
}

/// The scalar matrix of the fiber at a point.
pub fn fm_evaluate<F: Field>(f: &F, m: &FormMatrix<F::Elem>, point: &[F::Elem]) -> Mat<F::Elem> {
    Mat::from_vec(m.rows(), m.cols(), m.entries.iter().map(|e| graded::evaluate(f, e, point)).collect())
}

/// Block offsets of a sum ⊕ S_{a_i + shift}.
fn offsets(nvars: usize, twists: &[i64], shift: i64, sign: i64) -> Vec<usize> {
    let mut out = Vec::with_capacity(twists.len() + 1);
    let mut acc = 0;
    out.push(0);
    for a in twists {
        acc += dim_s(nvars, sign * a + shift);
        out.push(acc);
    }
    out
}

/// Matrix of H^0(φ(l)) in monomial bases.
pub fn h0_matrix<F: Field>(f: &F, m: &FormMatrix<F::Elem>, l: i64) -> Mat<F::Elem> {
    let ro = offsets(m.nvars, &m.target, l, 1);
    let co = offsets(m.nvars, &m.source, l, 1);
    let mut out = matrix::zeros(f, *ro.last().unwrap(), *co.last().unwrap());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if co[j + 1] == co[j] || ro[i + 1] == ro[i] {
                continue;
            }
            let b = graded::mult_matrix(f, m.get(i, j), m.source[j] + l);
            paste(f, &mut out, &b, ro[i], co[j]);
        }
    }
    out
}

/// Matrix of H^n(φ(l)) in Serre-dual coordinates: H^n(O(a)) is the dual of
/// S_{-a-n-1} and the induced maps are transposed multiplications.
pub fn hn_matrix<F: Field>(f: &F, m: &FormMatrix<F::Elem>, l: i64) -> Mat<F::Elem> {
    let n1 = m.nvars as i64;
    let ro = offsets(m.nvars, &m.target, -l - n1, -1);
    let co = offsets(m.nvars, &m.source, -l - n1, -1);
    let mut out = matrix::zeros(f, *ro.last().unwrap(), *co.last().unwrap());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if co[j + 1] == co[j] || ro[i + 1] == ro[i] {
                continue;
            }
            let b = graded::mult_matrix(f, m.get(i, j), -m.target[i] - l - n1).transpose();
            paste(f, &mut out, &b, ro[i], co[j]);
        }
    }
    out
}

fn paste<F: Field>(_f: &F, out: &mut Mat<F::Elem>, b: &Mat<F::Elem>, r0: usize, c0: usize) {
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            out.set(r0 + i, c0 + j, b.get(i, j).clone());
        }
    }
}

/// A bounded complex on P^n; `terms[k]` sits in position `start + k` and
/// `diffs[k]` maps it to the next term. The presented sheaf lives in
/// position `middle`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonadSpec<F: Field> {
    pub field: F,
    pub n: usize,
    pub start: i64,
    pub terms: Vec<TwistList>,
    pub diffs: Vec<FormMatrix<F::Elem>>,
    pub middle: i64,
}

impl<F: Field> MonadSpec<F> {
    pub fn new(
        field: F,
        n: usize,
        start: i64,
        terms: Vec<TwistList>,
        diffs: Vec<FormMatrix<F::Elem>>,
        middle: i64,
    ) -> Result<Self, Error> {
        if terms.is_empty() {
            return Err(Error::Shape("a complex needs at least one term".into()));
        }
        if diffs.len() + 1 != terms.len() {
            return Err(Error::Shape(format!("{} terms but {} differentials", terms.len(), diffs.len())));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.source != terms[k] || d.target != terms[k + 1] {
                return Err(Error::Shape(format!("differential {} does not match its terms", start + k as i64)));
            }
            if d.nvars != n + 1 {
                return Err(Error::Shape(format!("differential {} lives on the wrong space", start + k as i64)));
            }
        }
        if middle < start || middle >= start + terms.len() as i64 {
            return Err(Error::Shape("middle position outside the complex".into()));
        }
        Ok(MonadSpec { field, n, start, terms, diffs, middle })
    }

    /// The single-term complex ⊕O(a_i) in position 0.
    pub fn line_bundles(field: F, n: usize, twists: TwistList) -> Self {
        MonadSpec { field, n, start: 0, terms: vec![twists], diffs: vec![], middle: 0 }
    }

    pub fn end(&self) -> i64 {
        self.start + self.terms.len() as i64 - 1
    }

    /// Term at position p (empty outside the complex).
    pub fn term(&self, p: i64) -> &[i64] {
        if p < self.start || p > self.end() {
            &[]
        } else {
            &self.terms[(p - self.start) as usize]
        }
    }

    /// Differential leaving position p.
    pub fn diff(&self, p: i64) -> Option<&FormMatrix<F::Elem>> {
        if p < self.start || p >= self.end() {
            None
        } else {
            Some(&self.diffs[(p - self.start) as usize])
        }
    }

    pub fn twisted(&self, l: i64) -> Self {
        MonadSpec {
            field: self.field.clone(),
            n: self.n,
            start: self.start,
            terms: self.terms.iter().map(|t| t.iter().map(|a| a + l).collect()).collect(),
            diffs: self.diffs.iter().map(|d| d.twisted(l)).collect(),
            middle: self.middle,
        }
    }

    /// Rank of the presented sheaf.
    pub fn rank(&self) -> i64 {
        (self.start..=self.end())
            .map(|p| sign(p - self.middle) * self.term(p).len() as i64)
            .sum()
    }
}

pub(crate) fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Whether all consecutive composites vanish.
pub fn compose_check<F: Field>(m: &MonadSpec<F>) -> Result<bool, Error> {
    let f = &m.field;
    for w in m.diffs.windows(2) {
        if !fm_is_zero(f, &compose(f, &w[1], &w[0])?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The dual complex: position p goes to −p, terms negated, maps transposed.
pub fn dualize<F: Field>(m: &MonadSpec<F>) -> MonadSpec<F> {
    let terms: Vec<TwistList> = m.terms.iter().rev().map(|t| t.iter().map(|a| -a).collect()).collect();
    let diffs = m.diffs.iter().rev().map(|d| d.transpose()).collect();
    MonadSpec { field: m.field.clone(), n: m.n, start: -m.end(), terms, diffs, middle: -m.middle }
}

/// Restriction to a linear subspace.
pub fn restrict<F: Field>(m: &MonadSpec<F>, sub: &LinearSubspace<F::Elem>) -> MonadSpec<F> {
    MonadSpec {
        field: m.field.clone(),
        n: sub.sub_dim(),
        start: m.start,
        terms: m.terms.clone(),
        diffs: m.diffs.iter().map(|d| fm_substitute(&m.field, d, sub)).collect(),
        middle: m.middle,
    }
}

/// Total complex of the tensor product; blocks of T^k are ordered by p
/// ascending and within a block C^p ⊗ D^q the index of C is major. The
/// differential is d_C ⊗ 1 + (−1)^p 1 ⊗ d_D.
pub fn tensor_total<F: Field>(m1: &MonadSpec<F>, m2: &MonadSpec<F>) -> Result<MonadSpec<F>, Error> {
    if m1.n != m2.n || m1.field.spec() != m2.field.spec() {
        return Err(Error::Shape("tensor factors live on different spaces".into()));
    }
    let f = &m1.field;
    let nvars = m1.n + 1;
    let start = m1.start + m2.start;
    let end = m1.end() + m2.end();
    // blocks[k] = list of (p, q, offset) for T^{start+k}
    let mut terms = Vec::new();
    let mut blocks: Vec<Vec<(i64, i64, usize)>> = Vec::new();
    for k in start..=end {
        let mut tw = Vec::new();
        let mut bl = Vec::new();
        for p in m1.start..=m1.end() {
            let q = k - p;
            if q < m2.start || q > m2.end() {
                continue;
            }
            bl.push((p, q, tw.len()));
            for a in m1.term(p) {
                for b in m2.term(q) {
                    tw.push(a + b);
                }
            }
        }
        terms.push(tw);
        blocks.push(bl);
    }
    let mut diffs = Vec::new();
    for k in start..end {
        let ki = (k - start) as usize;
        let mut d = form_matrix_zero(f, nvars, &terms[ki], &terms[ki + 1]);
        for &(p, q, off) in &blocks[ki] {
            let (c, dd) = (m1.term(p).len(), m2.term(q).len());
            // d_C ⊗ 1 into block (p+1, q)
            if let (Some(dc), Some(&(_, _, toff))) =
                (m1.diff(p), blocks[ki + 1].iter().find(|b| b.0 == p + 1 && b.1 == q))
            {
                for i in 0..dc.rows() {
                    for i2 in 0..c {
                        for j in 0..dd {
                            d.set(toff + i * dd + j, off + i2 * dd + j, dc.get(i, i2).clone());
                        }
                    }
                }
            }
            // (−1)^p 1 ⊗ d_D into block (p, q+1)
            if let (Some(ddm), Some(&(_, _, toff))) =
                (m2.diff(q), blocks[ki + 1].iter().find(|b| b.0 == p && b.1 == q + 1))
            {
                let s = f.from_i64(sign(p));
                let dq1 = m2.term(q + 1).len();
                for i in 0..c {
                    for j in 0..ddm.rows() {
                        for j2 in 0..dd {
                            d.set(toff + i * dq1 + j, off + i * dd + j2, graded::scale(f, &s, ddm.get(j, j2)));
                        }
                    }
                }
            }
        }
        diffs.push(d);
    }
    MonadSpec::new(f.clone(), m1.n, start, terms, diffs, m1.middle + m2.middle)
}

/// How fibers are checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberMode {
    /// Every point of P^n over the (finite) base field.
    ExhaustiveFp,
    /// Seeded random points.
    Sample { count: usize, seed: u64 },
    /// Exact emptiness of the degeneracy loci over the algebraic closure,
    /// via the ideal of maximal minors.
    Closure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberReport<E> {
    pub ok: bool,
    pub checked: usize,
    pub witnesses: Vec<Vec<E>>,
}

/// Whether the fiber complex at `point` is exact away from the middle.
pub fn fiber_exact_at<F: Field>(m: &MonadSpec<F>, point: &[F::Elem]) -> bool {
    let f = &m.field;
    let ranks: Vec<usize> = m.diffs.iter().map(|d| matrix::rank(f, &fm_evaluate(f, d, point))).collect();
    let r = |p: i64| -> usize {
        if p < m.start || p >= m.end() {
            0
        } else {
            ranks[(p - m.start) as usize]
        }
    };
    (m.start..=m.end()).filter(|&p| p != m.middle).all(|p| m.term(p).len() == r(p - 1) + r(p))
}

/// Checks that the complex presents a vector bundle: fiberwise exact away
/// from the middle position.
pub fn fiberwise_check<F: Field>(m: &MonadSpec<F>, mode: FiberMode) -> Result<FiberReport<F::Elem>, Error> {
    let f = &m.field;
    match mode {
        FiberMode::ExhaustiveFp => {
            let pts = projective::all_points(f, m.n)
                .ok_or_else(|| Error::Unsupported("exhaustive fiber check needs a finite field".into()))?;
            Ok(scan_points(m, &pts))
        }
        FiberMode::Sample { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<_> = (0..count).map(|_| projective::random_point(f, m.n, &mut rng)).collect();
            Ok(scan_points(m, &pts))
        }
        FiberMode::Closure => {
            let ok = certify::bundle_certificate(m)?;
            Ok(FiberReport { ok, checked: 0, witnesses: vec![] })
        }
    }
}

fn scan_points<F: Field>(m: &MonadSpec<F>, pts: &[Vec<F::Elem>]) -> FiberReport<F::Elem> {
    let witnesses: Vec<Vec<F::Elem>> = crate::par::map_collect(pts, |p| (!fiber_exact_at(m, p)).then(|| p.clone()))
        .into_iter()
        .flatten()
        .collect();
    FiberReport { ok: witnesses.is_empty(), checked: pts.len(), witnesses }
}

/// Sum of all twists weighted by position sign, i.e. c_1.
pub fn first_chern<F: Field>(m: &MonadSpec<F>) -> i64 {
    (m.start..=m.end())
        .map(|p| sign(p - m.middle) * m.term(p).iter().sum::<i64>())
        .sum()
}

/// Seeded rng helper shared by the randomized modules.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    #[test]
    fn koszul_composite_vanishes() {
        let q = Rationals;
        let x: Vec<_> = (0..4).map(|i| graded::variable(&q, 4, i)).collect();
        let alpha = form_matrix(&q, 4, &[-1], &[0, 0, 0, 0], x.clone()).unwrap();
        let beta = form_matrix(
            &q,
            4,
            &[0, 0, 0, 0],
            &[1],
            vec![x[1].clone(), graded::neg(&q, &x[0]), x[3].clone(), graded::neg(&q, &x[2])],
        )
        .unwrap();
        let m = MonadSpec::new(q, 3, -1, vec![vec![-1], vec![0; 4], vec![1]], vec![alpha, beta], 0).unwrap();
        assert!(compose_check(&m).unwrap());
        assert_eq!(m.rank(), 2);
        assert_eq!(first_chern(&m), 0);
        let d = dualize(&m);
        assert_eq!(d.terms, m.terms);
        assert_eq!(dualize(&d), m);
    }
}
