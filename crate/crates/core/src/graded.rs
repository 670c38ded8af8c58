//! Graded pieces S_d of k[X_0..X_n]: monomial bases, forms, multiplication
//! matrices, linear substitution and Serre-dual coordinates for H^n(O(a)).

use std::sync::{Mutex, OnceLock};

use std::collections::HashMap;

use crate::field::Field;
use crate::matrix::{self, Mat};
use crate::Error;

/// C(a, b) for small arguments, 0 when out of range.
pub fn binomial(a: i64, b: i64) -> usize {
    if b < 0 || a < b || a < 0 {
        return 0;
    }
    let b = b.min(a - b);
    let mut num: u128 = 1;
    for i in 0..b {
        num = num * (a - i) as u128 / (i + 1) as u128;
    }
    num as usize
}

/// dim S_d for `nvars` variables.
pub fn dim_s(nvars: usize, d: i64) -> usize {
    if d < 0 {
        0
    } else {
        binomial(d + nvars as i64 - 1, nvars as i64 - 1)
    }
}

type BasisCache = Mutex<HashMap<(usize, i64), std::sync::Arc<Vec<Vec<u32>>>>>;

fn basis_cache() -> &'static BasisCache {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Exponent vectors of degree `d` in `nvars` variables, graded-lex order
/// (lexicographically decreasing).
pub fn monomial_basis(nvars: usize, d: i64) -> std::sync::Arc<Vec<Vec<u32>>> {
    if let Some(b) = basis_cache().lock().unwrap().get(&(nvars, d)) {
        return b.clone();
    }
    let mut out = Vec::with_capacity(dim_s(nvars, d));
    if d >= 0 && nvars > 0 {
        let mut cur = vec![0u32; nvars];
        fill_monomials(&mut out, &mut cur, 0, d as u32);
    }
    let arc = std::sync::Arc::new(out);
    basis_cache().lock().unwrap().insert((nvars, d), arc.clone());
    arc
}

fn fill_monomials(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, rem: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = rem;
        out.push(cur.clone());
        return;
    }
    for e in (0..=rem).rev() {
        cur[pos] = e;
        fill_monomials(out, cur, pos + 1, rem - e);
    }
}

/// Position of an exponent vector in `monomial_basis(exps.len(), |exps|)`.
pub fn monomial_index(exps: &[u32]) -> usize {
    let k = exps.len();
    let mut rem: i64 = exps.iter().map(|&e| e as i64).sum();
    let mut idx = 0usize;
    for (pos, &e) in exps.iter().enumerate().take(k.saturating_sub(1)) {
        let vars_left = (k - pos - 1) as i64;
        // monomials with a larger exponent in this slot come first
        for bigger in (e as i64 + 1)..=rem {
            idx += binomial(rem - bigger + vars_left - 1, vars_left - 1);
        }
        rem -= e as i64;
    }
    idx
}

/// A homogeneous form; a negative degree denotes the zero form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form<E> {
    pub nvars: usize,
    pub degree: i64,
    pub coeffs: Vec<E>,
}

impl<E: Clone> Form<E> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

pub fn zero_form<F: Field>(f: &F, nvars: usize, degree: i64) -> Form<F::Elem> {
    Form { nvars, degree, coeffs: vec![f.zero(); dim_s(nvars, degree)] }
}

pub fn constant<F: Field>(_f: &F, nvars: usize, c: F::Elem) -> Form<F::Elem> {
    Form { nvars, degree: 0, coeffs: vec![c] }
}

pub fn variable<F: Field>(f: &F, nvars: usize, i: usize) -> Form<F::Elem> {
    let mut e = vec![0u32; nvars];
    e[i] = 1;
    monomial(f, &e, f.one())
}

pub fn monomial<F: Field>(f: &F, exps: &[u32], c: F::Elem) -> Form<F::Elem> {
    let degree = exps.iter().map(|&e| e as i64).sum();
    let mut form = zero_form(f, exps.len(), degree);
    form.coeffs[monomial_index(exps)] = c;
    form
}

/// Linear form with the given coefficients.
pub fn linear<F: Field>(f: &F, coeffs: &[F::Elem]) -> Form<F::Elem> {
    let _ = f;
    Form { nvars: coeffs.len(), degree: 1, coeffs: coeffs.to_vec() }
}

/// Builds a form from (coefficient, exponent vector) terms.
pub fn from_terms<F: Field>(f: &F, nvars: usize, degree: i64, terms: &[(F::Elem, Vec<u32>)]) -> Form<F::Elem> {
    let mut form = zero_form(f, nvars, degree);
    for (c, e) in terms {
        assert_eq!(e.len(), nvars);
        assert_eq!(e.iter().map(|&x| x as i64).sum::<i64>(), degree);
        let i = monomial_index(e);
        form.coeffs[i] = f.add(&form.coeffs[i], c);
    }
    form
}

pub fn is_zero<F: Field>(f: &F, g: &Form<F::Elem>) -> bool {
    g.coeffs.iter().all(|c| f.is_zero(c))
}

/// Nonzero terms in basis order.
pub fn terms<F: Field>(f: &F, g: &Form<F::Elem>) -> Vec<(F::Elem, Vec<u32>)> {
    if g.degree < 0 {
        return Vec::new();
    }
    let basis = monomial_basis(g.nvars, g.degree);
    g.coeffs
        .iter()
        .zip(basis.iter())
        .filter(|(c, _)| !f.is_zero(c))
        .map(|(c, e)| (c.clone(), e.clone()))
        .collect()
}

pub fn add<F: Field>(f: &F, a: &Form<F::Elem>, b: &Form<F::Elem>) -> Form<F::Elem> {
    assert_eq!(a.nvars, b.nvars);
    assert_eq!(a.degree, b.degree, "adding forms of different degree");
    Form {
        nvars: a.nvars,
        degree: a.degree,
        coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| f.add(x, y)).collect(),
    }
}

pub fn sub<F: Field>(f: &F, a: &Form<F::Elem>, b: &Form<F::Elem>) -> Form<F::Elem> {
    add(f, a, &neg(f, b))
}

pub fn neg<F: Field>(f: &F, a: &Form<F::Elem>) -> Form<F::Elem> {
    scale(f, &f.neg(&f.one()), a)
}

pub fn scale<F: Field>(f: &F, c: &F::Elem, a: &Form<F::Elem>) -> Form<F::Elem> {
    Form { nvars: a.nvars, degree: a.degree, coeffs: a.coeffs.iter().map(|x| f.mul(c, x)).collect() }
}

pub fn mul<F: Field>(f: &F, a: &Form<F::Elem>, b: &Form<F::Elem>) -> Form<F::Elem> {
    assert_eq!(a.nvars, b.nvars);
    let degree = if a.degree < 0 || b.degree < 0 { -1 } else { a.degree + b.degree };
    let mut out = zero_form(f, a.nvars, degree);
    if degree < 0 {
        return out;
    }
    let ta = terms(f, a);
    let tb = terms(f, b);
    let mut e = vec![0u32; a.nvars];
    for (ca, ea) in &ta {
        for (cb, eb) in &tb {
            for k in 0..a.nvars {
                e[k] = ea[k] + eb[k];
            }
            let i = monomial_index(&e);
            out.coeffs[i] = f.mul_add(&out.coeffs[i], ca, cb);
        }
    }
    out
}

pub fn pow<F: Field>(f: &F, a: &Form<F::Elem>, k: u32) -> Form<F::Elem> {
    let mut acc = constant(f, a.nvars, f.one());
    for _ in 0..k {
        acc = mul(f, &acc, a);
    }
    acc
}

/// Value at a point.
pub fn evaluate<F: Field>(f: &F, g: &Form<F::Elem>, point: &[F::Elem]) -> F::Elem {
    let mut acc = f.zero();
    for (c, e) in terms(f, g) {
        let mut v = c;
        for (k, &ek) in e.iter().enumerate() {
            for _ in 0..ek {
                v = f.mul(&v, &point[k]);
            }
        }
        acc = f.add(&acc, &v);
    }
    acc
}

/// Random form of the given degree.
pub fn random_form<F: Field, R: rand::Rng + ?Sized>(f: &F, nvars: usize, degree: i64, rng: &mut R) -> Form<F::Elem> {
    Form { nvars, degree, coeffs: (0..dim_s(nvars, degree)).map(|_| f.random(rng)).collect() }
}

/// Matrix of multiplication by `g`: S_d → S_{d+deg g}; column j holds the
/// coefficients of g times the j-th monomial of S_d.
pub fn mult_matrix<F: Field>(f: &F, g: &Form<F::Elem>, d: i64) -> Mat<F::Elem> {
    let cols = dim_s(g.nvars, d);
    let rows = if g.degree < 0 { 0 } else { dim_s(g.nvars, d + g.degree) };
    let mut m = matrix::zeros(f, rows, cols);
    if rows == 0 || cols == 0 {
        return m;
    }
    let basis = monomial_basis(g.nvars, d);
    let tg = terms(f, g);
    let mut e = vec![0u32; g.nvars];
    for (j, mj) in basis.iter().enumerate() {
        for (c, eg) in &tg {
            for k in 0..g.nvars {
                e[k] = mj[k] + eg[k];
            }
            m.set(monomial_index(&e), j, c.clone());
        }
    }
    m
}

/// A linear subspace P^m ⊂ P^n given by m+1 spanning points (the rows of
/// `param`); the substitution is X_j = Σ_k t_k · param[k][j].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearSubspace<E> {
    pub param: Mat<E>,
}

impl<E: Clone> LinearSubspace<E> {
    pub fn ambient_dim(&self) -> usize {
        self.param.cols() - 1
    }

    pub fn sub_dim(&self) -> usize {
        self.param.rows() - 1
    }
}

impl<E: Clone> LinearSubspace<E> {
    pub fn from_points<F: Field<Elem = E>>(f: &F, points: &[Vec<E>]) -> Option<Self> {
        let n1 = points.first()?.len();
        let m = Mat::from_vec(points.len(), n1, points.concat());
        if matrix::rank(f, &m) != points.len() {
            return None;
        }
        Some(LinearSubspace { param: m })
    }

    /// The zero locus of the given independent linear forms (rows).
    pub fn from_equations<F: Field<Elem = E>>(f: &F, eqs: &[Vec<E>]) -> Option<Self> {
        let n1 = eqs.first()?.len();
        let m = Mat::from_vec(eqs.len(), n1, eqs.concat());
        if matrix::rank(f, &m) != eqs.len() {
            return None;
        }
        let k = matrix::kernel_basis(f, &m);
        Some(LinearSubspace { param: k.transpose() })
    }

    /// Linear forms cutting out the subspace (rows).
    pub fn equations<F: Field<Elem = E>>(&self, f: &F) -> Mat<E> {
        matrix::kernel_basis(f, &self.param).transpose()
    }

    /// Whether a point of the ambient space lies on the subspace.
    pub fn contains<F: Field<Elem = E>>(&self, f: &F, point: &[E]) -> bool {
        let p = Mat::from_vec(1, point.len(), point.to_vec());
        matrix::rank(f, &self.param.vcat(&p)) == self.param.rows()
    }
}

/// Restriction of a form to a linear subspace.
pub fn substitute<F: Field>(f: &F, g: &Form<F::Elem>, sub: &LinearSubspace<F::Elem>) -> Form<F::Elem> {
    assert_eq!(g.nvars, sub.param.cols(), "form and subspace live in different spaces");
    let m1 = sub.param.rows();
    if g.degree < 0 {
        return zero_form(f, m1, g.degree);
    }
    // images of the ambient variables as linear forms on the subspace
    let images: Vec<Form<F::Elem>> = (0..g.nvars)
        .map(|j| linear(f, &sub.param.column(j)))
        .collect();
    let mut out = zero_form(f, m1, g.degree);
    let mut powers: Vec<Vec<Form<F::Elem>>> = images.iter().map(|x| vec![constant(f, m1, f.one()), x.clone()]).collect();
    for (c, e) in terms(f, g) {
        let mut prod = constant(f, m1, c);
        for (j, &ej) in e.iter().enumerate() {
            while powers[j].len() <= ej as usize {
                let next = mul(f, powers[j].last().unwrap(), &images[j]);
                powers[j].push(next);
            }
            prod = mul(f, &prod, &powers[j][ej as usize]);
        }
        out = add(f, &out, &prod);
    }
    out
}

/// dim H^n(O_{P^n}(a)): Serre dual to S_{-a-n-1}.
pub fn serre_dual_dim(n: usize, a: i64) -> usize {
    dim_s(n + 1, -a - n as i64 - 1)
}

/// dim H^0(O_{P^n}(a)).
pub fn h0_line(n: usize, a: i64) -> usize {
    dim_s(n + 1, a)
}

/// Parses a polynomial written like `X0^2 - 3*X1*X3 + t*X2`. Identifiers
/// other than `X<i>` are looked up in `params`. The zero polynomial gets
/// degree `zero_degree`.
pub fn parse_form<F: Field>(
    f: &F,
    nvars: usize,
    s: &str,
    params: &[(&str, F::Elem)],
    zero_degree: i64,
) -> Result<Form<F::Elem>, Error> {
    let bad = |msg: &str| Error::Parse(format!("{msg} in `{s}`"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty polynomial"));
    }
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, c) in compact.char_indices() {
        if (c == '+' || c == '-') && !(i > 0 && compact[..i].ends_with('^')) {
            if !cur.is_empty() {
                chunks.push((neg, std::mem::take(&mut cur)));
            } else if i > 0 {
                return Err(bad("dangling sign"));
            }
            neg = c == '-';
        } else {
            cur.push(c);
        }
    }
    if cur.is_empty() {
        return Err(bad("dangling sign"));
    }
    chunks.push((neg, cur));

    let mut terms: Vec<(F::Elem, Vec<u32>)> = Vec::new();
    for (neg, chunk) in chunks {
        let mut coeff = if neg { f.neg(&f.one()) } else { f.one() };
        let mut exps = vec![0u32; nvars];
        for factor in chunk.split('*') {
            let (base, power) = match factor.split_once('^') {
                Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                None => (factor, 1),
            };
            if base.is_empty() {
                return Err(bad("empty factor"));
            }
            if let Some(idx) = base.strip_prefix('X').and_then(|r| r.parse::<usize>().ok()) {
                if idx >= nvars {
                    return Err(bad("variable out of range"));
                }
                exps[idx] += power;
            } else {
                let v = if base.starts_with(|c: char| c.is_ascii_digit()) {
                    f.parse(base)?
                } else {
                    params
                        .iter()
                        .find(|(name, _)| *name == base)
                        .map(|(_, v)| v.clone())
                        .ok_or_else(|| bad(&format!("unknown symbol `{base}`")))?
                };
                for _ in 0..power {
                    coeff = f.mul(&coeff, &v);
                }
            }
        }
        terms.push((coeff, exps));
    }
    let degrees: Vec<i64> = terms
        .iter()
        .filter(|(c, _)| !f.is_zero(c))
        .map(|(_, e)| e.iter().map(|&x| x as i64).sum())
        .collect();
    let degree = match degrees.first() {
        None => return Ok(zero_form(f, nvars, zero_degree)),
        Some(&d) => d,
    };
    if degrees.iter().any(|&d| d != degree) {
        return Err(bad("inhomogeneous polynomial"));
    }
    let terms: Vec<_> = terms.into_iter().filter(|(c, _)| !f.is_zero(c)).collect();
    Ok(from_terms(f, nvars, degree, &terms))
}

/// Human-readable rendering, inverse to `parse_form`.
pub fn format_form<F: Field>(f: &F, g: &Form<F::Elem>) -> String {
    let mut out = String::new();
    for (c, e) in terms(f, g) {
        let mut factors: Vec<String> = Vec::new();
        let (neg, mag) = {
            let s = f.format(&c);
            match s.strip_prefix('-') {
                Some(r) => (true, r.to_string()),
                None => (false, s),
            }
        };
        let is_const = e.iter().all(|&x| x == 0);
        if mag != "1" || is_const {
            factors.push(mag);
        }
        for (i, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => factors.push(format!("X{i}")),
                _ => factors.push(format!("X{i}^{x}")),
            }
        }
        let body = factors.join("*");
        if out.is_empty() {
            out = if neg { format!("-{body}") } else { body };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rationals;

    #[test]
    fn basis_examples() {
        assert_eq!(*monomial_basis(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(*monomial_basis(4, 0), vec![vec![0, 0, 0, 0]]);
        assert_eq!(monomial_basis(4, 2).len(), 10);
    }

    #[test]
    fn index_matches_position() {
        for nv in 1..5 {
            for d in 0..6 {
                for (i, e) in monomial_basis(nv, d).iter().enumerate() {
                    assert_eq!(monomial_index(e), i);
                }
            }
        }
    }

    #[test]
    fn multiplication_by_x0_on_p1() {
        let q = Rationals;
        let m = mult_matrix(&q, &variable(&q, 2, 0), 1);
        assert_eq!(m, matrix::from_i64(&q, 3, 2, &[1, 0, 0, 1, 0, 0]));
    }

    #[test]
    fn serre_dimensions() {
        assert_eq!(serre_dual_dim(3, -4), 1);
        assert_eq!(serre_dual_dim(3, -3), 0);
        assert_eq!(serre_dual_dim(1, -3), 2);
    }

    #[test]
    fn parse_and_format_round_trip() {
        let q = Rationals;
        let t = q.from_i64(3);
        let g = parse_form(&q, 4, "X0^2 - t*X1*X3 + 1/2*X2*X3", &[("t", t)], 0).unwrap();
        assert_eq!(g.degree, 2);
        assert_eq!(format_form(&q, &g), "X0^2 - 3*X1*X3 + 1/2*X2*X3");
        let back = parse_form(&q, 4, &format_form(&q, &g), &[], 0).unwrap();
        assert_eq!(back, g);
        assert!(parse_form(&q, 4, "X0 + X1^2", &[], 0).is_err());
        assert!(is_zero(&q, &parse_form(&q, 4, "0", &[], 1).unwrap()));
        assert_eq!(format_form(&q, &constant(&q, 4, q.from_i64(-2))), "-2");
    }
}
